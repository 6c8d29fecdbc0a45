#include "tpflow/timestepping.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace tpflow {

namespace {

constexpr double kBlowUpBound = 10.0;
constexpr double kBootstrapTolFactor = 1e-2;
// Increments this small in absolute terms are round-off; treating them
// relatively would stall on fields that sit at zero (e.g. a pinned pressure
// in equilibrium).
constexpr double kRoundoffIncrement = 1e-13;

double relative_increment(const FeSpace& space, const Field& next, const Field& cur) {
  const double diff = l2_norm(space, next - cur);
  if (diff <= kRoundoffIncrement) return 0.0;
  double denom = l2_norm(space, cur);
  if (denom == 0.0) denom = l2_norm(space, next);
  if (denom == 0.0) return 0.0;
  return diff / denom;
}

void check_blow_up(const Field& f, const char* what, int step) {
  if (!f.allFinite()) throw StepFailure(FailureCause::BlowUp, step, std::string("non-finite ") + what);
  if (f.lpNorm<Eigen::Infinity>() > kBlowUpBound && std::string(what) == "saturation")
    throw StepFailure(FailureCause::BlowUp, step, "saturation exceeds blow-up bound");
}

Eigen::VectorXd values_at(const FeSpace& space, std::span<const Index> dofs, const SpaceTimeFn& f, double t) {
  Eigen::VectorXd v(static_cast<Index>(dofs.size()));
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const Index d = dofs[k];
    v[static_cast<Index>(k)] = f ? f(space.dof_coordinates()(0, d), space.dof_coordinates()(1, d), t) : 0.0;
  }
  return v;
}

}  // namespace

std::string scheme_name(const SchemeConfig& config) {
  switch (config.kind) {
    case SchemeKind::TL1: return "TL1";
    case SchemeKind::TL2: return "TL2";
    case SchemeKind::Theta:
      if (config.theta == 0.5) return "MP";
      if (config.theta == 1.0) return "BE";
      {
        std::ostringstream os;
        os << "theta=" << config.theta;
        return os.str();
      }
  }
  return "?";
}

SchemeConfig parse_scheme(const std::string& name, double tau) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::toupper(c); });
  if (n == "MP") return SchemeConfig::midpoint(tau);
  if (n == "BE") return SchemeConfig::backward_euler(tau);
  if (n == "TL1") return SchemeConfig::tl1(tau);
  if (n == "TL2") return SchemeConfig::tl2(tau);
  throw std::invalid_argument("unknown scheme '" + name + "' (expected MP, BE, TL1 or TL2)");
}

std::string to_string(FailureCause cause) {
  switch (cause) {
    case FailureCause::BlowUp: return "blow-up";
    case FailureCause::NonConvergence: return "nonconvergence";
    case FailureCause::SolverFailure: return "solver-failure";
  }
  return "?";
}

StepFailure::StepFailure(FailureCause cause, int step, const std::string& what)
    : std::runtime_error(to_string(cause) + " at step " + std::to_string(step) + ": " + what),
      cause_(cause),
      step_(step) {}

Field forward_extrapolate(const Field& s_theta, const Field& s_old, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("forward_extrapolate: theta must be positive");
  if (theta == 1.0) return s_theta;
  return s_theta / theta - ((1.0 - theta) / theta) * s_old;
}

std::pair<Field, Field> initial_guess(const StepperState& state, double theta, double tau) {
  if (state.theta_pressures.size() < 2 || state.s_prev.size() != state.s.size() || !(state.tau_prev > 0.0))
    throw std::logic_error("initial_guess: histories not populated");
  const double r = theta * tau / state.tau_prev;
  Field s = (1.0 + r) * state.s - r * state.s_prev;

  const auto& [t1, p1] = state.theta_pressures[state.theta_pressures.size() - 2];
  const auto& [t2, p2] = state.theta_pressures.back();
  const double t = state.t + theta * tau;
  // Linear Lagrange extrapolation through the two stored theta-points.
  const double l1 = (t - t2) / (t1 - t2);
  const double l2 = (t - t1) / (t2 - t1);
  Field p = l1 * p1 + l2 * p2;
  return {std::move(p), std::move(s)};
}

Stepper::Stepper(Problem problem, SchemeConfig config) : problem_(std::move(problem)), config_(config) {
  if (!problem_.space) throw std::invalid_argument("Stepper: missing space");
  if (!(config_.tau > 0.0)) throw std::invalid_argument("Stepper: tau must be positive");
  if (config_.kind == SchemeKind::Theta && !(config_.theta > 0.0 && config_.theta <= 1.0))
    throw std::invalid_argument("Stepper: theta must lie in (0, 1]");
  if (!(config_.tol > kSolveTolerance)) throw std::invalid_argument("Stepper: TOL must exceed the solver tolerance");
  if (config_.max_iters < 1) throw std::invalid_argument("Stepper: max_iters must be at least 1");
  const auto& bc = problem_.bc;
  p_dofs_ = space().boundary_dofs(bc.pressure_dirichlet);
  if (p_dofs_.empty() && bc.pin_pressure) p_dofs_.push_back(0);
  s_dofs_ = space().boundary_dofs(bc.saturation_dirichlet);
  outflow_dofs_ = space().boundary_dofs(bc.aqueous_outflow);
}

LinearSystem Stepper::pressure_system(const Coefficients& coeffs, double t, LinearSystem* raw) const {
  LinearSystem sys = assemble_pressure(space(), coeffs, problem_.sources.total, t);
  if (raw) *raw = sys;
  const bool pinned = problem_.bc.pressure_dirichlet.empty();
  const Eigen::VectorXd g = pinned ? Eigen::VectorXd::Zero(static_cast<Index>(p_dofs_.size()))
                                   : values_at(space(), p_dofs_, problem_.bc.pressure_value, t);
  apply_dirichlet(sys, p_dofs_, g);
  return sys;
}

LinearSystem Stepper::saturation_system(const Coefficients& coeffs, const MassTerm& mass, const Field& p,
                                        double t, std::span<const OutflowTerm> outflow) const {
  LinearSystem sys = assemble_saturation(space(), coeffs, mass, problem_.model.porosity, p,
                                         problem_.sources.aqueous, outflow, t);
  apply_dirichlet(sys, s_dofs_, values_at(space(), s_dofs_, problem_.bc.saturation_value, t));
  return sys;
}

// The total flux through an outflow dof is the residual of the unconstrained
// pressure equation there, so the boundary flux balances the discrete
// interior fluxes exactly; the pointwise normal derivative does not, and at
// a well corner the mismatch drives the saturation far out of range. The
// aqueous part is the fractional flow of that flux, linearized as
// (f_a(s*)/s*) s for outflow so it adds to the diagonal.
std::vector<OutflowTerm> Stepper::outflow_terms(const LinearSystem& raw_pressure, const Field& p,
                                                const Field& s) const {
  std::vector<OutflowTerm> terms;
  if (outflow_dofs_.empty()) return terms;
  const Eigen::VectorXd flux = raw_pressure.rhs - raw_pressure.matrix * p;
  terms.reserve(outflow_dofs_.size());
  for (Index i : outflow_dofs_) {
    const double si = clamp_saturation(s[i]);
    const double la = mobility(problem_.model, Phase::Aqueous, si);
    const double fa = la / (la + mobility(problem_.model, Phase::Liquid, si));
    if (flux[i] > 0.0)
      terms.push_back({i, flux[i] * fa / si, 0.0});
    else
      terms.push_back({i, 0.0, flux[i] * fa});
  }
  return terms;
}

Field Stepper::solve_checked(const LinearSystem& system, int step_index, bool saturation) {
  Field x;
  try {
    x = (saturation ? s_solver_ : p_solver_).solve(system.matrix, system.rhs);
  } catch (const SolveError& e) {
    throw StepFailure(FailureCause::SolverFailure, step_index, e.what());
  }
  check_blow_up(x, saturation ? "saturation" : "pressure", step_index);
  return x;
}

Field Stepper::dirichlet_saturation(const Field& s, double t) const {
  Field out = s;
  const Eigen::VectorXd g = values_at(space(), s_dofs_, problem_.bc.saturation_value, t);
  for (std::size_t k = 0; k < s_dofs_.size(); ++k) out[s_dofs_[k]] = g[static_cast<Index>(k)];
  return out;
}

Stepper::Subiterate Stepper::be_subiterate(const Field& p_guess, const Field& s_guess, const MassTerm& mass,
                                           double t_eval, double tol, int step_index) {
  Subiterate out{p_guess, s_guess, {}};
  for (int i = 0; i < config_.max_iters; ++i) {
    Field p_next, s_next;
    try {
      const Coefficients coeffs = evaluate_coefficients(space(), problem_.model, out.s);
      LinearSystem raw;
      p_next = solve_checked(pressure_system(coeffs, t_eval, &raw), step_index, false);
      s_next = solve_checked(saturation_system(coeffs, mass, p_next, t_eval, outflow_terms(raw, p_next, out.s)),
                             step_index, true);
    } catch (const StepFailure&) {
      throw;
    } catch (const std::runtime_error& e) {  // non-finite assembly data
      throw StepFailure(FailureCause::BlowUp, step_index, e.what());
    } catch (const std::domain_error& e) {
      throw StepFailure(FailureCause::BlowUp, step_index, e.what());
    }
    const double dp = relative_increment(space(), p_next, out.p);
    const double ds = relative_increment(space(), s_next, out.s);
    out.p = std::move(p_next);
    out.s = std::move(s_next);
    out.report.iterations = i + 1;
    out.report.pressure_increments.push_back(dp);
    out.report.saturation_increments.push_back(ds);
    if (!std::isfinite(dp) || !std::isfinite(ds))
      throw StepFailure(FailureCause::BlowUp, step_index, "non-finite increment");
    if (std::max(dp, ds) < tol) {
      out.report.converged = true;
      return out;
    }
  }
  throw StepFailure(FailureCause::NonConvergence, step_index,
                    "no convergence in " + std::to_string(config_.max_iters) + " subiterations");
}

Field Stepper::whole_step_pressure(const Field& s, double t, int step_index) {
  try {
    const Coefficients coeffs = evaluate_coefficients(space(), problem_.model, s);
    return solve_checked(pressure_system(coeffs, t), step_index, false);
  } catch (const StepFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw StepFailure(FailureCause::BlowUp, step_index, e.what());
  }
}

StepReport Stepper::theta_step(StepperState& state, double theta, const Field& p_guess, const Field& s_guess,
                               double tol, bool bootstrap, const std::function<void(const StepRecord&)>& observer) {
  const double tau = config_.tau;
  const int next = state.step + 1;
  const double t_theta = state.t + theta * tau;
  const double t_new = state.t + tau;
  const MassTerm mass{1.0 / (theta * tau), state.s};
  Subiterate sub = be_subiterate(p_guess, s_guess, mass, t_theta, tol, next);

  Field s_new = dirichlet_saturation(forward_extrapolate(sub.s, state.s, theta), t_new);
  check_blow_up(s_new, "saturation", next);
  Field p_new = theta == 1.0 ? sub.p : whole_step_pressure(s_new, t_new, next);

  StepReport report{next, t_new, std::move(sub.report), bootstrap};
  if (observer) {
    StepRecord rec{report, tau, theta, &state.s, &s_new, &p_new, &sub.p, &sub.s};
    observer(rec);
  }
  state.theta_pressures.emplace_back(t_theta, std::move(sub.p));
  if (state.theta_pressures.size() > 2) state.theta_pressures.erase(state.theta_pressures.begin());
  state.s_prev = std::move(state.s);
  state.s = std::move(s_new);
  state.p = std::move(p_new);
  state.t = t_new;
  state.step = next;
  state.tau_prev = tau;
  return report;
}

StepperState Stepper::bootstrap(const Field& p0, const Field& s0, double t0,
                                const std::function<void(const StepRecord&)>& observer) {
  if (p0.size() != space().num_dofs() || s0.size() != space().num_dofs())
    throw std::invalid_argument("bootstrap: initial fields do not match the space");
  StepperState state;
  state.t = t0;
  state.s = s0;
  state.s_prev = s0;
  state.p = p0;
  state.theta_pressures.emplace_back(t0, p0);
  state.bootstrapped = true;
  if (config_.kind == SchemeKind::TL1) return state;
  const double theta = config_.kind == SchemeKind::Theta ? config_.theta : 0.5;
  theta_step(state, theta, p0, s0, config_.tol * kBootstrapTolFactor, true, observer);
  return state;
}

StepReport Stepper::step(StepperState& state, const std::function<void(const StepRecord&)>& observer) {
  if (!state.bootstrapped) throw std::logic_error("step: state not bootstrapped");
  switch (config_.kind) {
    case SchemeKind::Theta: return step_theta(state, observer);
    case SchemeKind::TL1: return step_tl1(state, observer);
    case SchemeKind::TL2: return step_tl2(state, observer);
  }
  throw std::logic_error("step: unknown scheme");
}

StepReport Stepper::step_theta(StepperState& state, const std::function<void(const StepRecord&)>& observer) {
  auto [p_guess, s_guess] = initial_guess(state, config_.theta, config_.tau);
  return theta_step(state, config_.theta, p_guess, s_guess, config_.tol, false, observer);
}

StepReport Stepper::step_tl1(StepperState& state, const std::function<void(const StepRecord&)>& observer) {
  const double tau = config_.tau;
  const int next = state.step + 1;
  const double t_new = state.t + tau;
  Field p_new, s_new;
  try {
    const Coefficients coeffs = evaluate_coefficients(space(), problem_.model, state.s);
    LinearSystem raw;
    p_new = solve_checked(pressure_system(coeffs, t_new, &raw), next, false);
    s_new = solve_checked(
        saturation_system(coeffs, MassTerm{1.0 / tau, state.s}, p_new, t_new, outflow_terms(raw, p_new, state.s)),
        next, true);
  } catch (const StepFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw StepFailure(FailureCause::BlowUp, next, e.what());
  }
  StepReport report{next, t_new, {1, {}, {}, true}, false};
  if (observer) observer(StepRecord{report, tau, 1.0, &state.s, &s_new, &p_new, nullptr, nullptr});
  state.s_prev = std::move(state.s);
  state.s = std::move(s_new);
  state.p = std::move(p_new);
  state.t = t_new;
  state.step = next;
  state.tau_prev = tau;
  return report;
}

StepReport Stepper::step_tl2(StepperState& state, const std::function<void(const StepRecord&)>& observer) {
  const double tau = config_.tau;
  const int next = state.step + 1;
  const double t_new = state.t + tau;
  Field p_new, s_new;
  try {
    const Coefficients coeffs = extrapolate(evaluate_coefficients(space(), problem_.model, state.s),
                                            evaluate_coefficients(space(), problem_.model, state.s_prev));
    LinearSystem raw;
    p_new = solve_checked(pressure_system(coeffs, t_new, &raw), next, false);
    const MassTerm mass{1.5 / tau, (4.0 * state.s - state.s_prev) / 3.0};
    const Field s_lagged = 2.0 * state.s - state.s_prev;
    s_new = solve_checked(saturation_system(coeffs, mass, p_new, t_new, outflow_terms(raw, p_new, s_lagged)), next,
                          true);
  } catch (const StepFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw StepFailure(FailureCause::BlowUp, next, e.what());
  }
  StepReport report{next, t_new, {1, {}, {}, true}, false};
  if (observer) observer(StepRecord{report, tau, 1.0, &state.s, &s_new, &p_new, nullptr, nullptr});
  state.s_prev = std::move(state.s);
  state.s = std::move(s_new);
  state.p = std::move(p_new);
  state.t = t_new;
  state.step = next;
  state.tau_prev = tau;
  return report;
}

RunResult run(Stepper& stepper, const Field& p0, const Field& s0, double t0, double t_final,
              const std::function<void(const StepRecord&)>& observer) {
  const double tau = stepper.config().tau;
  const double steps_real = (t_final - t0) / tau;
  const int steps = static_cast<int>(std::lround(steps_real));
  if (steps < 1 || std::abs(steps_real - steps) > 1e-8 * std::max(1.0, steps_real))
    throw std::invalid_argument("run: final time is not a whole number of steps");

  RunResult result;
  const auto record = [&](const StepRecord& rec) {
    result.reports.push_back(rec.report);
    if (observer) observer(rec);
  };
  try {
    result.final_state = stepper.bootstrap(p0, s0, t0, record);
    while (result.final_state.step < steps) stepper.step(result.final_state, record);
  } catch (const StepFailure& f) {
    result.failure = f;
  }
  return result;
}

}  // namespace tpflow
