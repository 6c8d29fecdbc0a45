// Independent reference computations shared by the unit and acceptance tests.
#ifndef TPFLOW_TESTS_ORACLES_HPP
#define TPFLOW_TESTS_ORACLES_HPP

#include <array>
#include <cmath>

#include "tpflow/mms.hpp"
#include "tpflow/physics.hpp"

namespace oracle {

using Real = long double;

/// Strong-form residuals (total, aqueous) of the manufactured fields with the
/// closed-form sources, by nested central differences in flux form.
inline std::array<double, 2> mms_residuals(const tpflow::ManufacturedCase& mms, double xd, double yd, double td,
                                           Real h = 1e-5L) {
  using tpflow::Phase;
  const tpflow::FluidModel& m = mms.model();
  const Real x = xd, y = yd, t = td;
  const auto p = [&](Real a, Real b) { return mms.pressure<Real>(a, b, t); };
  const auto s = [&](Real a, Real b) { return mms.saturation<Real>(a, b, t); };
  const auto grad = [&](auto f, Real a, Real b) {
    return std::array<Real, 2>{(f(a + h, b) - f(a - h, b)) / (2 * h), (f(a, b + h) - f(a, b - h)) / (2 * h)};
  };
  // Fluxes whose divergence equals the sources (kappa = 1).
  const auto flux_total = [&](Real a, Real b) {
    const Real sv = s(a, b);
    const Real lam = tpflow::mobility<Real>(m, Phase::Aqueous, sv) + tpflow::mobility<Real>(m, Phase::Liquid, sv);
    const Real lam_a = tpflow::mobility<Real>(m, Phase::Aqueous, sv);
    const Real dpc = tpflow::capillary_derivative<Real>(m, sv);
    const auto gp = grad(p, a, b), gs = grad(s, a, b);
    return std::array<Real, 2>{-lam * gp[0] + lam_a * dpc * gs[0], -lam * gp[1] + lam_a * dpc * gs[1]};
  };
  const auto flux_aqueous = [&](Real a, Real b) {
    const Real sv = s(a, b);
    const Real lam_a = tpflow::mobility<Real>(m, Phase::Aqueous, sv);
    const Real dpc = tpflow::capillary_derivative<Real>(m, sv);
    const auto gp = grad(p, a, b), gs = grad(s, a, b);
    return std::array<Real, 2>{lam_a * dpc * gs[0] - lam_a * gp[0], lam_a * dpc * gs[1] - lam_a * gp[1]};
  };
  const auto div = [&](auto f) {
    return (f(x + h, y)[0] - f(x - h, y)[0]) / (2 * h) + (f(x, y + h)[1] - f(x, y - h)[1]) / (2 * h);
  };
  const Real s_t = (mms.saturation<Real>(x, y, t + h) - mms.saturation<Real>(x, y, t - h)) / (2 * h);
  const tpflow::Sources q = mms.sources(xd, yd, td);
  const Real r_total = div(flux_total) - Real(q.total);
  const Real r_aqueous = Real(m.porosity) * s_t + div(flux_aqueous) - Real(q.aqueous);
  return {static_cast<double>(r_total), static_cast<double>(r_aqueous)};
}

}  // namespace oracle

#endif  // TPFLOW_TESTS_ORACLES_HPP
