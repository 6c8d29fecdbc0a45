#include "tpflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace tpflow {

namespace {

template <typename Potential>
double chain_rule_residual(const FeSpace& space, double porosity, const EnergyParams& params, const Field& s_old,
                           const Field& s_new, Potential potential) {
  const QuadratureValues a = evaluate_at_quadrature(space, s_old);
  const QuadratureValues b = evaluate_at_quadrature(space, s_new);
  double work = 0.0;
  for (Index k = 0; k < space.num_qp(); ++k) {
    const double s0 = clamp_saturation(a.value[k]);
    const double s1 = clamp_saturation(b.value[k]);
    work += space.qp_weights()[k] * porosity * potential(s0, s1) * (s1 - s0);
  }
  const double de = energy_integral(space, porosity, params, s_new) - energy_integral(space, porosity, params, s_old);
  return de - work;
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << *v;
}

}  // namespace

double chain_rule_check(const FeSpace& space, double porosity, const EnergyParams& params, const Field& s_old,
                        const Field& s_new) {
  return chain_rule_residual(space, porosity, params, s_old, s_new,
                             [&](double s0, double s1) { return nu_half(params, s0, s1); });
}

double chain_rule_check_midpoint(const FeSpace& space, double porosity, const EnergyParams& params,
                                 const Field& s_old, const Field& s_new) {
  return chain_rule_residual(space, porosity, params, s_old, s_new,
                             [&](double s0, double s1) { return nu_continuous(params, 0.5 * (s0 + s1)); });
}

std::optional<EnergyRow> energy_balance_row(const Problem& problem, const Field& p_mid, const Field& s_old,
                                            const Field& s_new, double tau, double t_mid, int step) {
  if (!problem.model.energy) return std::nullopt;
  const EnergyParams& g = *problem.model.energy;
  const FeSpace& space = *problem.space;
  const double phi = problem.model.porosity;

  Field nu(space.num_dofs());
  for (Index i = 0; i < nu.size(); ++i) nu[i] = nu_half(g, s_old[i], s_new[i]);
  const Field s_mid = 0.5 * (s_old + s_new);
  const Field p_a = nu + p_mid;

  const Coefficients c = evaluate_coefficients(space, problem.model, s_mid);
  const QuadratureValues pl = evaluate_at_quadrature(space, p_mid);
  const QuadratureValues pa = evaluate_at_quadrature(space, p_a);

  EnergyRow row;
  row.step = step;
  row.t = t_mid + 0.5 * tau;  // reported at the new level
  row.energy_old = energy_integral(space, phi, g, s_old);
  row.energy = energy_integral(space, phi, g, s_new);
  row.energy_rate = (row.energy - row.energy_old) / tau;
  row.chain_rule_residual = chain_rule_check(space, phi, g, s_old, s_new);

  const auto& q = problem.sources.total;
  const auto& qa = problem.sources.aqueous;
  for (Index k = 0; k < space.num_qp(); ++k) {
    const double w = space.qp_weights()[k];
    const double kappa = space.qp_permeability(k);
    const double la = c.lambda_aqueous[k];
    const double ll = c.lambda_total[k] - la;
    row.dissipation += w * kappa *
                       (ll * (pl.dx[k] * pl.dx[k] + pl.dy[k] * pl.dy[k]) + la * (pa.dx[k] * pa.dx[k] + pa.dy[k] * pa.dy[k]));
    const double x = space.qp_coordinates()(0, k), y = space.qp_coordinates()(1, k);
    const double qt = q ? q(x, y, t_mid) : 0.0;
    const double qaq = qa ? qa(x, y, t_mid) : 0.0;
    row.source_supply += w * ((qt - qaq) * pl.value[k] + qaq * pa.value[k]);
  }

  // Fluxes pair with the potentials only where the boundary flux is not
  // naturally zero.
  std::vector<BoundaryTag> tags = problem.bc.pressure_dirichlet;
  tags.insert(tags.end(), problem.bc.saturation_dirichlet.begin(), problem.bc.saturation_dirichlet.end());
  tags.insert(tags.end(), problem.bc.aqueous_outflow.begin(), problem.bc.aqueous_outflow.end());
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  if (!tags.empty()) {
    const int nloc = space.dofs_per_cell();
    Eigen::VectorXd lp(nloc), la_loc(nloc), ls(nloc);
    for (const EdgePoint& ep : space.edge_points(tags)) {
      const auto dofs = space.cell_dofs(ep.cell);
      for (int a = 0; a < nloc; ++a) {
        lp[a] = p_mid[dofs[static_cast<std::size_t>(a)]];
        la_loc[a] = p_a[dofs[static_cast<std::size_t>(a)]];
        ls[a] = s_mid[dofs[static_cast<std::size_t>(a)]];
      }
      const double s = clamp_saturation(ep.basis.dot(ls));
      const double kappa = space.mesh().cell_permeability[ep.cell];
      const double lam_a = mobility(problem.model, Phase::Aqueous, s);
      const double lam_l = mobility(problem.model, Phase::Liquid, s);
      const double flux_l = lam_l * kappa * (ep.grad * lp).dot(ep.normal);
      const double flux_a = lam_a * kappa * (ep.grad * la_loc).dot(ep.normal);
      row.boundary_supply += ep.weight * (flux_l * ep.basis.dot(lp) + flux_a * ep.basis.dot(la_loc));
    }
  }
  row.balance_residual = row.energy_rate + row.dissipation - row.source_supply - row.boundary_supply;
  return row;
}

double EnergyLedger::max_chain_rule_ratio() const {
  double worst = 0.0;
  for (const auto& r : rows_)
    worst = std::max(worst, std::abs(r.chain_rule_residual) / (1.0 + std::abs(r.energy) + std::abs(r.energy_old)));
  return worst;
}

double EnergyLedger::max_abs_balance_residual() const {
  double worst = 0.0;
  for (const auto& r : rows_) worst = std::max(worst, std::abs(r.balance_residual));
  return worst;
}

bool EnergyLedger::energy_nonincreasing() const {
  return std::all_of(rows_.begin(), rows_.end(), [](const EnergyRow& r) { return r.energy_rate <= 0.0; });
}

void EnergyLedger::write_csv(std::ostream& out) const {
  out << "step,t,energy,energy_rate,dissipation,source_supply,boundary_supply,chain_rule_residual,balance_residual\n";
  out.precision(12);
  for (const auto& r : rows_)
    out << r.step << ',' << r.t << ',' << r.energy << ',' << r.energy_rate << ',' << r.dissipation << ','
        << r.source_supply << ',' << r.boundary_supply << ',' << r.chain_rule_residual << ',' << r.balance_residual
        << '\n';
}

double observed_rate(double h_coarse, double e_coarse, double h_fine, double e_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

ConvergenceTable convergence_rates(std::vector<ConvergenceRow> rows) {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto& r = rows[k];
    r.rate_p.reset();
    r.rate_s.reset();
    if (!r.failed && (r.err_p == 0.0 || r.err_s == 0.0) && r.note.empty()) r.note = "zero error";
    if (k == 0 || r.failed || rows[k - 1].failed) continue;
    const auto& prev = rows[k - 1];
    if (prev.err_p > 0.0 && r.err_p > 0.0) r.rate_p = observed_rate(prev.tau, prev.err_p, r.tau, r.err_p);
    if (prev.err_s > 0.0 && r.err_s > 0.0) r.rate_s = observed_rate(prev.tau, prev.err_s, r.tau, r.err_s);
  }
  return {std::move(rows)};
}

void ConvergenceTable::write_csv(std::ostream& out) const {
  out << "tau,dofs,err_pl,rate_pl,err_sa,rate_sa\n";
  out.precision(6);
  for (const auto& r : rows) {
    out << r.tau << ',' << r.dofs << ',';
    if (r.failed) {
      out << "failed,,failed,\n";
      continue;
    }
    out << r.err_p << ',';
    write_optional(out, r.rate_p);
    out << ',' << r.err_s << ',';
    write_optional(out, r.rate_s);
    out << '\n';
  }
}

ErrorSample error_sample(const FeSpace& space, const ManufacturedCase& mms, const Field& p, const Field& s, double t,
                         int step) {
  return error_sample(space, mms, p, t, s, t, step);
}

ErrorSample error_sample(const FeSpace& space, const ManufacturedCase& mms, const Field& p, double t_p, const Field& s,
                         double t, int step) {
  ErrorSample e;
  e.step = step;
  e.t = t;
  e.t_p = t_p;
  e.err_p = l2_error(space, p, [&](double x, double y, double tt) { return mms.pressure(x, y, tt); }, t_p);
  e.err_s = l2_error(space, s, [&](double x, double y, double tt) { return mms.saturation(x, y, tt); }, t);
  if (mms.model().energy) {
    const EnergyParams& g = *mms.model().energy;
    const double phi = mms.model().porosity;
    double exact = 0.0;
    for (Index k = 0; k < space.num_qp(); ++k)
      exact += space.qp_weights()[k] * phi *
               free_energy_density(g, mms.saturation(space.qp_coordinates()(0, k), space.qp_coordinates()(1, k), t));
    e.energy_rel_err = std::abs(energy_integral(space, phi, g, s) - exact) / std::abs(exact);
  }
  return e;
}

double ErrorSeries::max_err_p() const {
  double m = 0.0;
  for (const auto& e : samples) m = std::max(m, e.err_p);
  return m;
}

double ErrorSeries::max_err_s() const {
  double m = 0.0;
  for (const auto& e : samples) m = std::max(m, e.err_s);
  return m;
}

double ErrorSeries::max_energy_rel_err() const {
  double m = 0.0;
  for (const auto& e : samples)
    if (e.energy_rel_err) m = std::max(m, *e.energy_rel_err);
  return m;
}

void ErrorSeries::write_csv(std::ostream& out) const {
  out << "step,t,t_pl,err_pl,err_sa,energy_rel_err\n";
  out.precision(10);
  for (const auto& e : samples) {
    out << e.step << ',' << e.t << ',' << e.t_p << ',' << e.err_p << ',' << e.err_s << ',';
    write_optional(out, e.energy_rel_err);
    out << '\n';
  }
}

}  // namespace tpflow
