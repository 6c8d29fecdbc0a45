#include <gtest/gtest.h>

#include <cmath>

#include "tpflow/scenarios.hpp"
#include "tpflow/timestepping.hpp"

using namespace tpflow;

namespace {

// Saturation-independent coefficients and a flat capillary pressure, so the
// pressure equation does not see s and one pressure/saturation sweep is exact.
FluidModel frozen_model() {
  FluidModel m;
  m.porosity = 0.3;
  m.relperm = ConstantRelPerm{1.5, 0.5};
  m.capillary = LinearCapillary{0.0, 1.0};
  return m;
}

Problem frozen_problem(int n) {
  Problem pb;
  pb.space = unit_square_space(n, 1);
  pb.model = frozen_model();
  pb.sources.total = [](double x, double y, double t) { return 1.0 + x * y * t; };
  pb.sources.aqueous = [](double x, double, double t) { return 0.5 * x + t; };
  pb.bc.pressure_dirichlet = {BoundaryTag::DirichletAll};
  pb.bc.pressure_value = [](double x, double, double) { return x; };
  pb.bc.saturation_dirichlet = {BoundaryTag::DirichletAll};
  pb.bc.saturation_value = [](double, double y, double) { return 0.4 + 0.1 * y; };
  return pb;
}

}  // namespace

TEST(ForwardExtrapolate, Examples) {
  const Field a = Field::Constant(1, 0.6), b = Field::Constant(1, 0.5);
  EXPECT_NEAR(forward_extrapolate(a, b, 0.5)[0], 0.7, 1e-15);
  EXPECT_EQ(forward_extrapolate(a, b, 1.0)[0], 0.6);
  EXPECT_NEAR(forward_extrapolate(Field::Constant(1, 0.55), b, 0.25)[0], 0.7, 1e-14);
  EXPECT_THROW(forward_extrapolate(a, b, 0.0), std::invalid_argument);
}

TEST(InitialGuess, Extrapolation) {
  StepperState st;
  st.t = 1.0;
  st.tau_prev = 0.1;
  st.s = Field::Constant(2, 0.4);
  st.s_prev = Field::Constant(2, 0.3);
  st.theta_pressures = {{0.85, Field::Constant(2, 1.0)}, {0.95, Field::Constant(2, 2.0)}};
  const auto [p, s] = initial_guess(st, 0.5, 0.1);
  EXPECT_NEAR(s[0], 1.5 * 0.4 - 0.5 * 0.3, 1e-15);
  EXPECT_NEAR(p[0], 2 * 2.0 - 1.0, 1e-12);

  st.s_prev = st.s;
  EXPECT_NEAR(initial_guess(st, 0.5, 0.1).second[1], 0.4, 1e-15);

  StepperState empty;
  EXPECT_THROW(initial_guess(empty, 0.5, 0.1), std::logic_error);
}

TEST(Subiteration, FrozenCoefficientsReachFixedPointAtOnce) {
  Stepper st(frozen_problem(4), SchemeConfig::midpoint(0.1));
  const Index n = st.space().num_dofs();
  const auto sub = st.be_subiterate(Field::Zero(n), Field::Constant(n, 0.5), MassTerm{20.0, Field::Constant(n, 0.5)},
                                    0.05, 1e-5, 1);
  ASSERT_TRUE(sub.report.converged);
  EXPECT_EQ(sub.report.iterations, 2);  // the second iteration only confirms
  EXPECT_LT(sub.report.saturation_increments[1], 1e-12);
  EXPECT_LT(sub.report.pressure_increments[1], 1e-12);
}

TEST(Schemes, Tl1EqualsBackwardEulerForConstantCoefficients) {
  const Problem pb = frozen_problem(4);
  Stepper be(pb, SchemeConfig::backward_euler(0.1)), tl1(pb, SchemeConfig::tl1(0.1));
  const Index n = be.space().num_dofs();
  const Field p0 = Field::Zero(n), s0 = Field::Constant(n, 0.45);
  const RunResult a = run(be, p0, s0, 0.0, 0.3), b = run(tl1, p0, s0, 0.0, 0.3);
  ASSERT_TRUE(a.completed() && b.completed());
  EXPECT_LT((a.final_state.s - b.final_state.s).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT((a.final_state.p - b.final_state.p).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Schemes, ConstantStateUnchanged) {
  auto space = unit_square_space(4, 1);
  const Field s0 = Field::Constant(space->num_dofs(), 0.35), p0 = Field::Zero(space->num_dofs());
  for (const SchemeConfig& c : {SchemeConfig::midpoint(0.1), SchemeConfig::backward_euler(0.1), SchemeConfig::tl1(0.1),
                                SchemeConfig::tl2(0.1)}) {
    Stepper st(make_relax_problem(space), c);
    const RunResult r = run(st, p0, s0, 0.0, 0.5);
    ASSERT_TRUE(r.completed()) << scheme_name(c) << (r.failure ? r.failure->what() : "");
    EXPECT_LT((r.final_state.s - s0).cwiseAbs().maxCoeff(), 1e-12) << scheme_name(c);
    EXPECT_LT(r.final_state.p.cwiseAbs().maxCoeff(), 1e-10) << scheme_name(c);
  }
}

TEST(Schemes, BootstrapFlags) {
  auto space = unit_square_space(4, 1);
  const Field s0 = relax_initial_saturation(*space), p0 = Field::Zero(space->num_dofs());
  Stepper tl2(make_relax_problem(space), SchemeConfig::tl2(0.05));
  const RunResult r = run(tl2, p0, s0, 0.0, 0.2);
  ASSERT_TRUE(r.completed());
  ASSERT_EQ(r.reports.size(), 4u);
  EXPECT_TRUE(r.reports[0].bootstrap);
  EXPECT_GT(r.reports[0].subiteration.iterations, 1);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_FALSE(r.reports[k].bootstrap);

  Stepper tl1(make_relax_problem(space), SchemeConfig::tl1(0.05));
  const RunResult r1 = run(tl1, p0, s0, 0.0, 0.2);
  ASSERT_EQ(r1.reports.size(), 4u);
  EXPECT_FALSE(r1.reports[0].bootstrap);
}

TEST(Schemes, TemporalOrderOnFixedMesh) {
  // Differences to a fine-step reference on one mesh isolate the time error.
  auto mms = std::make_shared<const ManufacturedCase>(1.0);
  auto space = unit_square_space(8, 2);
  const Field p0 = space->interpolate([&](double x, double y) { return mms->pressure(x, y, 0.0); });
  const Field s0 = space->interpolate([&](double x, double y) { return mms->saturation(x, y, 0.0); });
  const auto final_s = [&](SchemeConfig c) {
    c.tol = 1e-9;
    Stepper st(make_mms_problem(space, mms), c);
    const RunResult r = run(st, p0, s0, 0.0, 0.4);
    EXPECT_TRUE(r.completed());
    return r.final_state.s;
  };
  const Field ref = final_s(SchemeConfig::midpoint(0.4 / 256));
  const auto rate = [&](SchemeConfig (*make)(double)) {
    const double e1 = l2_norm(*space, final_s(make(0.05)) - ref);
    const double e2 = l2_norm(*space, final_s(make(0.025)) - ref);
    return std::log2(e1 / e2);
  };
  EXPECT_GT(rate(&SchemeConfig::midpoint), 1.9);
  EXPECT_NEAR(rate(&SchemeConfig::backward_euler), 1.0, 0.15);
}

TEST(Failures, NonConvergenceIsDistinct) {
  auto mms = std::make_shared<const ManufacturedCase>(1.0);
  auto space = unit_square_space(4, 1);
  SchemeConfig c = SchemeConfig::midpoint(0.25);
  c.max_iters = 1;
  Stepper st(make_mms_problem(space, mms), c);
  const Field p0 = space->interpolate([&](double x, double y) { return mms->pressure(x, y, 0.0); });
  const Field s0 = space->interpolate([&](double x, double y) { return mms->saturation(x, y, 0.0); });
  const RunResult r = run(st, p0, s0, 0.0, 1.0);
  ASSERT_FALSE(r.completed());
  EXPECT_EQ(r.failure->cause(), FailureCause::NonConvergence);
  EXPECT_EQ(r.failure->step(), 1);
}

TEST(Failures, NonFiniteDataIsBlowUp) {
  auto space = unit_square_space(4, 1);
  Field s0 = Field::Constant(space->num_dofs(), 0.4);
  s0[3] = std::nan("");
  for (const SchemeConfig& c : {SchemeConfig::midpoint(0.1), SchemeConfig::tl1(0.1)}) {
    Stepper st(make_relax_problem(space), c);
    const RunResult r = run(st, Field::Zero(space->num_dofs()), s0, 0.0, 0.2);
    ASSERT_FALSE(r.completed());
    EXPECT_EQ(r.failure->cause(), FailureCause::BlowUp);
  }
}

TEST(Failures, InvalidConfiguration) {
  const Problem pb = frozen_problem(2);
  EXPECT_THROW(Stepper(pb, SchemeConfig::midpoint(0.0)), std::invalid_argument);
  SchemeConfig c = SchemeConfig::midpoint(0.1);
  c.theta = 0.0;
  EXPECT_THROW(Stepper(pb, c), std::invalid_argument);
  c = SchemeConfig::midpoint(0.1);
  c.tol = 1e-12;
  EXPECT_THROW(Stepper(pb, c), std::invalid_argument);
  Stepper ok(pb, SchemeConfig::midpoint(0.3));
  const Index n = ok.space().num_dofs();
  EXPECT_THROW(run(ok, Field::Zero(n), Field::Constant(n, 0.4), 0.0, 1.0), std::invalid_argument);
}

TEST(Schemes, Deterministic) {
  const SchemeConfig c = SchemeConfig::midpoint(0.125);
  const MmsOutcome a = run_mms(c, 8, 1, 0.5, true), b = run_mms(c, 8, 1, 0.5, true);
  ASSERT_TRUE(a.run.completed());
  EXPECT_EQ(a.run.final_state.s, b.run.final_state.s);
  EXPECT_EQ(a.run.final_state.p, b.run.final_state.p);
  ASSERT_EQ(a.series.samples.size(), 4u);
}

TEST(Schemes, ParseNames) {
  EXPECT_EQ(scheme_name(parse_scheme("mp", 0.1)), "MP");
  EXPECT_EQ(scheme_name(parse_scheme("BE", 0.1)), "BE");
  EXPECT_EQ(scheme_name(parse_scheme("tl2", 0.1)), "TL2");
  EXPECT_THROW(parse_scheme("RK4", 0.1), std::invalid_argument);
}

TEST(Outflow, UniformSaturationStaysUniform) {
  // Injecting the resident saturation: the aqueous flux is a fixed fraction
  // of a divergence-free total flux, so nothing may change, including at
  // the outflow corner where the pressure gradient is singular.
  auto space = q5spot_space(10, 2);
  Problem pb = make_q5spot_problem(space);
  pb.bc.saturation_value = [](double, double, double) { return 0.2; };
  const Index n = space->num_dofs();
  for (const SchemeConfig& c : {SchemeConfig::midpoint(5.0), SchemeConfig::tl1(5.0)}) {
    Stepper st(pb, c);
    const RunResult r = run(st, Field::Constant(n, 1e5), Field::Constant(n, 0.2), 0.0, 50.0);
    ASSERT_TRUE(r.completed()) << scheme_name(c);
    EXPECT_LT((r.final_state.s.array() - 0.2).abs().maxCoeff(), 1e-9) << scheme_name(c);
  }
}
