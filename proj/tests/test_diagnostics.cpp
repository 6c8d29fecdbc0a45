#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "tpflow/diagnostics.hpp"
#include "tpflow/scenarios.hpp"

using namespace tpflow;

TEST(Rates, ExamplePairs) {
  EXPECT_NEAR(observed_rate(0.5, 1.16e-2, 0.25, 3.16e-3), 1.88, 0.005);
  EXPECT_NEAR(observed_rate(0.5, 3.19e-4, 0.25, 1.53e-4), 1.06, 0.005);
  EXPECT_DOUBLE_EQ(observed_rate(0.1, 4.0, 0.05, 1.0), 2.0);
}

TEST(Rates, Table) {
  std::vector<ConvergenceRow> rows(3);
  for (int k = 0; k < 3; ++k) {
    rows[static_cast<std::size_t>(k)].tau = 1.0 / (2 << k);
    rows[static_cast<std::size_t>(k)].err_p = 1.0 / std::pow(4.0, k);
    rows[static_cast<std::size_t>(k)].err_s = 3.0 / std::pow(2.0, k);
  }
  ConvergenceTable t = convergence_rates(rows);
  EXPECT_FALSE(t.rows[0].rate_p.has_value());
  EXPECT_NEAR(*t.rows[2].rate_p, 2.0, 1e-14);
  EXPECT_NEAR(*t.rows[2].rate_s, 1.0, 1e-14);

  for (auto& r : rows) r.err_p *= 17.0;  // scale invariance
  EXPECT_NEAR(*convergence_rates(rows).rows[2].rate_p, 2.0, 1e-14);

  rows[1].err_s = 0.0;
  t = convergence_rates(rows);
  EXPECT_EQ(t.rows[1].note, "zero error");
  EXPECT_FALSE(t.rows[1].rate_s.has_value());
  EXPECT_FALSE(t.rows[2].rate_s.has_value());

  std::ostringstream os;
  convergence_rates({rows[0]}).write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "tau,dofs,err_pl,rate_pl,err_sa,rate_sa");
  EXPECT_NE(os.str().find(",,"), std::string::npos);  // single row: empty rates
}

TEST(ChainRule, ExactAndNegativeControl) {
  const auto space = unit_square_space(6, 1);
  const EnergyParams g = log_consistent_energy();
  const Field a = space->interpolate([](double x, double y) { return 0.3 + 0.2 * std::sin(3 * x) * y; });
  const Field b = space->interpolate([](double x, double y) { return 0.5 + 0.3 * std::cos(2 * y) * x; });
  EXPECT_EQ(chain_rule_check(*space, 0.2, g, a, a), 0.0);

  const double scale = 1 + std::abs(energy_integral(*space, 0.2, g, a)) + std::abs(energy_integral(*space, 0.2, g, b));
  EXPECT_LE(std::abs(chain_rule_check(*space, 0.2, g, a, b)), 1e-12 * scale);
  EXPECT_GT(std::abs(chain_rule_check_midpoint(*space, 0.2, g, a, b)), 1e-6 * scale);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const EnergyParams mixed{1.2, 0.6, -0.3};
  Field c(space->num_dofs()), d(space->num_dofs());
  for (Index i = 0; i < c.size(); ++i) {
    c[i] = u(rng);
    d[i] = u(rng);
  }
  EXPECT_LE(std::abs(chain_rule_check(*space, 0.2, mixed, c, d)), 1e-12 * (1 + std::abs(energy_integral(*space, 0.2, mixed, d))));
}

TEST(EnergyBalance, ConstantStateAllZero) {
  const auto space = unit_square_space(4, 1);
  const Problem pb = make_relax_problem(space);
  const Field s = Field::Constant(space->num_dofs(), 0.4), p = Field::Zero(space->num_dofs());
  const auto row = energy_balance_row(pb, p, s, s, 0.1, 0.05, 1);
  ASSERT_TRUE(row.has_value());
  EXPECT_EQ(row->energy_rate, 0.0);
  EXPECT_EQ(row->dissipation, 0.0);
  EXPECT_EQ(row->source_supply, 0.0);
  EXPECT_EQ(row->boundary_supply, 0.0);
  EXPECT_EQ(row->balance_residual, 0.0);
}

TEST(EnergyBalance, DisabledWithoutFreeEnergy) {
  const auto space = q5spot_space(20, 1);
  const Problem pb = make_q5spot_problem(space);
  const Field s = Field::Constant(space->num_dofs(), 0.4), p = Field::Zero(space->num_dofs());
  EXPECT_FALSE(energy_balance_row(pb, p, s, s, 1.0, 0.5, 1).has_value());
}

TEST(EnergyBalance, RelaxationDissipates) {
  const RelaxOutcome o = run_relax(SchemeConfig::midpoint(1.0 / 16), 16, 1, 0.5);
  ASSERT_TRUE(o.run.completed());
  ASSERT_EQ(o.ledger.rows().size(), 8u);
  EXPECT_TRUE(o.ledger.energy_nonincreasing());
  EXPECT_LE(o.ledger.max_chain_rule_ratio(), 1e-12);
  for (const auto& r : o.ledger.rows()) {
    EXPECT_GT(r.dissipation, 0.0);
    EXPECT_LT(std::abs(r.balance_residual), 0.05 * r.dissipation);
  }
}

TEST(ErrorSeries, MaximaAndLength) {
  const MmsOutcome o = run_mms(SchemeConfig::backward_euler(0.25), 4, 1, 1.0, true);
  ASSERT_TRUE(o.run.completed());
  ASSERT_EQ(o.series.samples.size(), 4u);
  double m = 0.0;
  for (const auto& e : o.series.samples) m = std::max(m, e.err_p);
  EXPECT_EQ(o.series.max_err_p(), m);
  EXPECT_EQ(o.series.samples.back().err_s, o.final_error.err_s);
  EXPECT_TRUE(o.series.samples[0].energy_rel_err.has_value());
  for (const auto& e : o.series.samples) EXPECT_EQ(e.t_p, e.t);
}

TEST(ErrorSeries, MidpointPressureAtThetaPoint) {
  const MmsOutcome o = run_mms(SchemeConfig::midpoint(0.25), 4, 1, 1.0, true);
  ASSERT_TRUE(o.run.completed());
  for (const auto& e : o.series.samples) EXPECT_DOUBLE_EQ(e.t_p, e.t - 0.125);
  EXPECT_EQ(o.final_error.t_p, 1.0);  // final error stays at T
}

TEST(ErrorSeries, ExactInterpolantOfLinearField) {
  // A field the space represents exactly has zero error.
  const auto space = unit_square_space(3, 1);
  const ManufacturedCase mms(1.0);
  const Field p = space->interpolate([&](double x, double y) { return mms.pressure(x, y, 1.0); });
  const Field s = space->interpolate([&](double x, double y) { return mms.saturation(x, y, 1.0); });
  const ErrorSample e = error_sample(*space, mms, p, s, 1.0, 0);
  EXPECT_GT(e.err_p, 0.0);  // the manufactured fields are not bilinear
  EXPECT_EQ(l2_error(*space, space->interpolate([](double x, double y) { return x * y; }),
                     [](double x, double y, double) { return x * y; }, 0.0) < 1e-15,
            true);
}
