#ifndef TPFLOW_TIMESTEPPING_HPP
#define TPFLOW_TIMESTEPPING_HPP

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tpflow/linalg.hpp"
#include "tpflow/spatial.hpp"

namespace tpflow {

enum class SchemeKind { Theta, TL1, TL2 };

struct SchemeConfig {
  SchemeKind kind = SchemeKind::Theta;
  double theta = 0.5;  // 1/2 = midpoint (MP), 1 = backward Euler (BE)
  double tau = 0.0;
  double tol = 1e-5;
  int max_iters = 50;

  static SchemeConfig midpoint(double tau) { return {SchemeKind::Theta, 0.5, tau}; }
  static SchemeConfig backward_euler(double tau) { return {SchemeKind::Theta, 1.0, tau}; }
  static SchemeConfig tl1(double tau) { return {SchemeKind::TL1, 1.0, tau}; }
  static SchemeConfig tl2(double tau) { return {SchemeKind::TL2, 1.0, tau}; }
};

/// "MP", "BE", "TL1", "TL2", or "theta=<value>".
std::string scheme_name(const SchemeConfig& config);
/// Accepts MP, BE, TL1, TL2 (any case). Throws std::invalid_argument.
SchemeConfig parse_scheme(const std::string& name, double tau);

struct SourceTerms {
  SpaceTimeFn total;    // q = q_l + q_a; empty means zero
  SpaceTimeFn aqueous;  // q_a
};

struct BoundarySpec {
  std::vector<BoundaryTag> pressure_dirichlet;
  SpaceTimeFn pressure_value;
  std::vector<BoundaryTag> saturation_dirichlet;
  SpaceTimeFn saturation_value;
  /// Edges carrying the advective aqueous flux <lambda_a kappa grad p . n, w>.
  std::vector<BoundaryTag> aqueous_outflow;
  /// Fix pressure dof 0 to zero when no pressure Dirichlet data is given.
  bool pin_pressure = false;
};

struct Problem {
  std::shared_ptr<const FeSpace> space;
  FluidModel model;
  SourceTerms sources;
  BoundarySpec bc;
};

struct StepperState {
  int step = 0;
  double t = 0.0;
  Field s;       // s_a^n
  Field s_prev;  // s_a^{n-1}
  Field p;       // p_l^n (whole step)
  /// Converged theta-point pressures (time, field), most recent last; at most two.
  std::vector<std::pair<double, Field>> theta_pressures;
  double tau_prev = 0.0;
  bool bootstrapped = false;
};

struct SubiterationReport {
  int iterations = 0;
  std::vector<double> pressure_increments;
  std::vector<double> saturation_increments;
  bool converged = false;
};

struct StepReport {
  int step = 0;  // index of the new level n+1
  double t = 0.0;
  SubiterationReport subiteration;
  bool bootstrap = false;
};

enum class FailureCause { BlowUp, NonConvergence, SolverFailure };
std::string to_string(FailureCause cause);

class StepFailure : public std::runtime_error {
 public:
  StepFailure(FailureCause cause, int step, const std::string& what);
  FailureCause cause() const { return cause_; }
  int step() const { return step_; }

 private:
  FailureCause cause_;
  int step_;
};

/// s^{n+1} = s^{n+theta}/theta - (1-theta)/theta s^n. Throws for theta <= 0.
Field forward_extrapolate(const Field& s_theta, const Field& s_old, double theta);

/// Extrapolated starting values at t^n + theta tau. Throws std::logic_error if
/// the histories are not populated.
std::pair<Field, Field> initial_guess(const StepperState& state, double theta, double tau);

/// Everything a per-step observer may need, including the theta-point fields.
struct StepRecord {
  StepReport report;
  double tau = 0.0;
  double theta = 1.0;
  const Field* s_old = nullptr;
  const Field* s_new = nullptr;
  const Field* p_new = nullptr;
  const Field* p_theta = nullptr;  // null for the lagging schemes
  const Field* s_theta = nullptr;
};

class Stepper {
 public:
  Stepper(Problem problem, SchemeConfig config);

  const Problem& problem() const { return problem_; }
  const SchemeConfig& config() const { return config_; }
  const FeSpace& space() const { return *problem_.space; }

  /// Sequential pressure -> saturation fixed point at t_eval. `history` enters
  /// the mass term with the given rate. Throws StepFailure.
  struct Subiterate {
    Field p, s;
    SubiterationReport report;
  };
  Subiterate be_subiterate(const Field& p_guess, const Field& s_guess, const MassTerm& mass, double t_eval,
                           double tol, int step_index);

  /// Populates the histories by one step from (p0, s0) with a tightened
  /// tolerance: theta schemes use their own theta, TL2 uses the midpoint rule,
  /// TL1 only records the initial state (no step is taken).
  StepperState bootstrap(const Field& p0, const Field& s0, double t0, const std::function<void(const StepRecord&)>& observer = {});

  StepReport step(StepperState& state, const std::function<void(const StepRecord&)>& observer = {});
  StepReport step_theta(StepperState& state, const std::function<void(const StepRecord&)>& observer = {});
  StepReport step_tl1(StepperState& state, const std::function<void(const StepRecord&)>& observer = {});
  StepReport step_tl2(StepperState& state, const std::function<void(const StepRecord&)>& observer = {});

  Field dirichlet_saturation(const Field& s, double t) const;

 private:
  // `raw`, when given, receives the system before Dirichlet elimination.
  LinearSystem pressure_system(const Coefficients& coeffs, double t, LinearSystem* raw = nullptr) const;
  LinearSystem saturation_system(const Coefficients& coeffs, const MassTerm& mass, const Field& p, double t,
                                 std::span<const OutflowTerm> outflow) const;
  std::vector<OutflowTerm> outflow_terms(const LinearSystem& raw_pressure, const Field& p, const Field& s) const;
  Field solve_checked(const LinearSystem& system, int step_index, bool saturation);
  Field whole_step_pressure(const Field& s, double t, int step_index);
  StepReport theta_step(StepperState& state, double theta, const Field& p_guess, const Field& s_guess, double tol,
                        bool bootstrap, const std::function<void(const StepRecord&)>& observer);

  Problem problem_;
  SchemeConfig config_;
  std::vector<Index> p_dofs_, s_dofs_;
  std::vector<Index> outflow_dofs_;
  DirectSolver p_solver_, s_solver_;
};

struct RunResult {
  StepperState final_state;
  std::vector<StepReport> reports;
  std::optional<StepFailure> failure;
  bool completed() const { return !failure.has_value(); }
};

/// Fixed-step loop from t0 to t_final (must be a whole number of steps).
/// The first failure stops the run and is returned, not thrown.
RunResult run(Stepper& stepper, const Field& p0, const Field& s0, double t0, double t_final,
              const std::function<void(const StepRecord&)>& observer = {});

}  // namespace tpflow

#endif  // TPFLOW_TIMESTEPPING_HPP
