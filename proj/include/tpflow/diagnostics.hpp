#ifndef TPFLOW_DIAGNOSTICS_HPP
#define TPFLOW_DIAGNOSTICS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tpflow/mms.hpp"
#include "tpflow/spatial.hpp"
#include "tpflow/timestepping.hpp"

namespace tpflow {

/// (E(s_new) - E(s_old)) - sum_q w_q phi nu_half(s_old, s_new) (s_new - s_old),
/// both sums over the same quadrature kernel as energy_integral.
double chain_rule_check(const FeSpace& space, double porosity, const EnergyParams& params, const Field& s_old,
                        const Field& s_new);
/// Same with nu_continuous at the midpoint; not exact (negative control).
double chain_rule_check_midpoint(const FeSpace& space, double porosity, const EnergyParams& params,
                                 const Field& s_old, const Field& s_new);

struct EnergyRow {
  int step = 0;
  double t = 0.0;
  double energy_old = 0.0;    // E^n
  double energy = 0.0;        // E^{n+1}
  double energy_rate = 0.0;   // (E^{n+1} - E^n) / tau
  double dissipation = 0.0;   // |sqrt(lambda_l kappa) grad p_l|^2 + |sqrt(lambda_a kappa) grad p_a|^2
  double source_supply = 0.0;    // (q_l, p_l) + (q_a, p_a)
  double boundary_supply = 0.0;  // flux pairings on non-natural boundary edges
  double chain_rule_residual = 0.0;
  double balance_residual = 0.0;  // energy_rate + dissipation - supplies
};

/// One row of the discrete energy balance with p_a = I(nu_half) + p_l and the
/// mobilities at (s_old + s_new)/2. `p_mid` is the midpoint pressure and
/// `t_mid` the time the sources are sampled at. Returns nothing if the model
/// carries no free energy.
std::optional<EnergyRow> energy_balance_row(const Problem& problem, const Field& p_mid, const Field& s_old,
                                            const Field& s_new, double tau, double t_mid, int step);

class EnergyLedger {
 public:
  void add(const EnergyRow& row) { rows_.push_back(row); }
  const std::vector<EnergyRow>& rows() const { return rows_; }
  double max_chain_rule_ratio() const;  // max |residual| / (1 + |E^{n+1}| + |E^n|)
  double max_abs_balance_residual() const;
  bool energy_nonincreasing() const;
  void write_csv(std::ostream& out) const;

 private:
  std::vector<EnergyRow> rows_;
};

struct ConvergenceRow {
  double tau = 0.0;
  Index dofs = 0;
  double err_p = 0.0;
  double err_s = 0.0;
  std::optional<double> rate_p;
  std::optional<double> rate_s;
  bool failed = false;
  std::string note;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  void write_csv(std::ostream& out) const;
};

/// rate_k = log(e_{k-1}/e_k) / log(h_{k-1}/h_k); the first row and rows next
/// to a failed run or a zero error have no rate (zero errors are noted).
ConvergenceTable convergence_rates(std::vector<ConvergenceRow> rows);
double observed_rate(double h_coarse, double e_coarse, double h_fine, double e_fine);

struct ErrorSample {
  int step = 0;
  double t = 0.0;
  double t_p = 0.0;  // time the pressure is compared at
  double err_p = 0.0;
  double err_s = 0.0;
  std::optional<double> energy_rel_err;
};

/// L2 errors of one state against the manufactured case and, if the model has
/// a free energy, |E(s_h) - E(s(t))| / |E(s(t))|.
ErrorSample error_sample(const FeSpace& space, const ManufacturedCase& mms, const Field& p, const Field& s, double t,
                         int step);
/// As above, with the pressure taken at its own time level `t_p`.
ErrorSample error_sample(const FeSpace& space, const ManufacturedCase& mms, const Field& p, double t_p, const Field& s,
                         double t, int step);

struct ErrorSeries {
  std::vector<ErrorSample> samples;
  double max_err_p() const;
  double max_err_s() const;
  double max_energy_rel_err() const;
  void write_csv(std::ostream& out) const;
};

}  // namespace tpflow

#endif  // TPFLOW_DIAGNOSTICS_HPP
