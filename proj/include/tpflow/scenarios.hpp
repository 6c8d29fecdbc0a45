#ifndef TPFLOW_SCENARIOS_HPP
#define TPFLOW_SCENARIOS_HPP

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tpflow/config.hpp"
#include "tpflow/diagnostics.hpp"
#include "tpflow/mms.hpp"
#include "tpflow/timestepping.hpp"

namespace tpflow {

std::shared_ptr<const FeSpace> unit_square_space(int n, int degree);

/// Dirichlet data and sources of the manufactured solution on the unit square.
Problem make_mms_problem(std::shared_ptr<const FeSpace> space, std::shared_ptr<const ManufacturedCase> mms);

/// Permeability of the relaxation medium. With kappa = 1 the slowest mode
/// decays on a ~1e-2 time scale, far below any practical step; 1e-2 puts it
/// near unit time.
inline constexpr double kRelaxPermeability = 0.01;
std::shared_ptr<const FeSpace> relax_space(int n, int degree);

/// No sources, no-flux everywhere, pressure pinned at one dof; log capillary
/// model with its consistent free energy.
Problem make_relax_problem(std::shared_ptr<const FeSpace> space);
/// 0.5 + 0.2 cos(pi x) cos(pi y).
Field relax_initial_saturation(const FeSpace& space);

/// Inflow corner: p = 3e5 Pa, s = 0.7; outflow corner: p = 1e5 Pa with the
/// advective aqueous flux; no flow elsewhere.
Problem make_q5spot_problem(std::shared_ptr<const FeSpace> space);
std::shared_ptr<const FeSpace> q5spot_space(int n, int degree);

struct MmsOutcome {
  RunResult run;
  Index dofs = 0;
  ErrorSample final_error;
  ErrorSeries series;   // every step when requested, else empty
  EnergyLedger ledger;  // midpoint runs only
};

/// Runs the manufactured problem on an n x n mesh from the exact data at t=0.
MmsOutcome run_mms(const SchemeConfig& scheme, int n, int degree, double final_time, bool record_series);

struct RelaxOutcome {
  RunResult run;
  EnergyLedger ledger;
};
RelaxOutcome run_relax(const SchemeConfig& scheme, int n, int degree, double final_time);

struct Q5Outcome {
  std::string scheme;
  double tau = 0.0;
  bool completed = false;
  std::string failure;
  int steps = 0;
  double mean_iterations = 0.0;  // over non-bootstrap steps
  double min_s = 0.0, max_s = 0.0;
  Field final_s;
};
using SnapshotFn = std::function<void(double t, const Field& p, const Field& s)>;
Q5Outcome run_q5spot(const SchemeConfig& scheme, int n, int degree, double final_time,
                     const SnapshotFn& snapshot = {});

/// Subcommands. Each writes its files plus `config.resolved` under
/// config.output_dir and returns the process exit code.
int cmd_converge(const RunConfig& config, std::ostream& log);
int cmd_longtime(const RunConfig& config, std::ostream& log);
int cmd_q5spot(const RunConfig& config, std::ostream& log);
int cmd_run(const RunConfig& config, std::ostream& log);
int dispatch(const RunConfig& config, std::ostream& log);

/// step,t,iterations,inc_p,inc_s,converged,bootstrap[,wall_seconds]
void write_step_log(std::ostream& out, const std::vector<StepReport>& reports,
                    const std::vector<double>* wall_seconds = nullptr);

}  // namespace tpflow

#endif  // TPFLOW_SCENARIOS_HPP
