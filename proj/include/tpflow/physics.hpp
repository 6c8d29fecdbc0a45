#ifndef TPFLOW_PHYSICS_HPP
#define TPFLOW_PHYSICS_HPP

#include <algorithm>
#include <utility>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace tpflow {

enum class Phase { Aqueous, Liquid };

/// Every log/power evaluation sees s_a clamped to [kSatFloor, 1 - kSatFloor].
inline constexpr double kSatFloor = 1e-10;
/// Increments below this use the midpoint chemical potential in nu_half.
inline constexpr double kDegenerateIncrement = 1e-8;

template <typename Scalar>
Scalar clamp_saturation(Scalar s) {
  return std::clamp(s, Scalar(kSatFloor), Scalar(1) - Scalar(kSatFloor));
}

// ---------------------------------------------------------------------------
// Relative permeabilities

/// kr_l = s_l (s_l + s_a)(1 - s_a), kr_a = s_a^2 (manufactured-solution set).
struct QuadraticRelPerm {};
/// kr_l = (1 - s)^2 (1 - s^{5/3}), kr_a = s^{11/3}.
struct BrooksCoreyRelPerm {};
/// Saturation independent values; used for frozen-coefficient checks.
struct ConstantRelPerm {
  double liquid = 1.0;
  double aqueous = 1.0;
};
using RelPerm = std::variant<QuadraticRelPerm, BrooksCoreyRelPerm, ConstantRelPerm>;

// ---------------------------------------------------------------------------
// Capillary pressure

/// p_c(s) = coefficient * ln(s).
struct LogCapillary {
  double coefficient;
};
/// p_c(s) = entry_pressure * s^{-exponent}.
struct BrooksCoreyCapillary {
  double entry_pressure;
  double exponent;
};
/// p_c(s) = slope * s + offset. Linear so that frozen-coefficient problems
/// are exactly solvable; also used to inject hypothesis violations.
struct LinearCapillary {
  double slope;
  double offset = 0.0;
};
using CapillaryModel = std::variant<LogCapillary, BrooksCoreyCapillary, LinearCapillary>;

/// Constant parameters of the mixing free energy
/// F(s) = g_a s(ln s - 1) + g_l (1-s)(ln(1-s) - 1) + g_al s(1-s).
struct EnergyParams {
  double gamma_a = 0.0;
  double gamma_l = 0.0;
  double gamma_al = 0.0;
};

struct FluidModel {
  double porosity = 0.2;
  double mu_liquid = 1.0;
  double mu_aqueous = 1.0;
  RelPerm relperm = QuadraticRelPerm{};
  CapillaryModel capillary = LogCapillary{1.0};
  /// Present only when the capillary model derives from the free energy
  /// (nu_a = -p_c); energy diagnostics are disabled otherwise.
  std::optional<EnergyParams> energy;
};

/// 6.3 / ln(0.01), the coefficient of the logarithmic capillary model.
inline double log_capillary_coefficient() { return 6.3 / std::log(0.01); }

/// Parameters used by the manufactured-solution experiments.
FluidModel mms_fluid_model();
/// Brooks-Corey parameters of the quarter-five-spot experiment (SI units).
FluidModel q5spot_fluid_model();
/// gamma_a = -6.3/ln(0.01), gamma_l = gamma_al = 0: consistent with LogCapillary.
EnergyParams log_consistent_energy();

// ---------------------------------------------------------------------------
// Constitutive functions. Templated on the scalar so the finite-difference
// oracles can run in extended precision.

template <typename Scalar>
Scalar relative_permeability(const RelPerm& kr, Phase phase, Scalar s) {
  using std::pow;
  s = clamp_saturation(s);
  const Scalar sl = Scalar(1) - s;
  return std::visit(
      [&](const auto& m) -> Scalar {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, QuadraticRelPerm>) {
          return phase == Phase::Aqueous ? s * s : sl * (sl + s) * (Scalar(1) - s);
        } else if constexpr (std::is_same_v<M, BrooksCoreyRelPerm>) {
          return phase == Phase::Aqueous ? pow(s, Scalar(11) / Scalar(3))
                                         : sl * sl * (Scalar(1) - pow(s, Scalar(5) / Scalar(3)));
        } else {
          return Scalar(phase == Phase::Aqueous ? m.aqueous : m.liquid);
        }
      },
      kr);
}

/// lambda_j = kr_j(s_a) / mu_j. Throws std::domain_error on NaN.
template <typename Scalar>
Scalar mobility(const FluidModel& model, Phase phase, Scalar s) {
  if (std::isnan(static_cast<double>(s))) throw std::domain_error("mobility: NaN saturation");
  const double mu = phase == Phase::Aqueous ? model.mu_aqueous : model.mu_liquid;
  return relative_permeability(model.relperm, phase, s) / Scalar(mu);
}

template <typename Scalar>
Scalar total_mobility(const FluidModel& model, Scalar s) {
  return mobility(model, Phase::Aqueous, s) + mobility(model, Phase::Liquid, s);
}

namespace detail {
template <typename Scalar>
Scalar capillary_pressure_clamped(const CapillaryModel& pc, Scalar s) {
  using std::log;
  using std::pow;
  return std::visit(
      [&](const auto& m) -> Scalar {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LogCapillary>) {
          return Scalar(m.coefficient) * log(s);
        } else if constexpr (std::is_same_v<M, BrooksCoreyCapillary>) {
          return Scalar(m.entry_pressure) * pow(s, -Scalar(m.exponent));
        } else {
          return Scalar(m.slope) * s + Scalar(m.offset);
        }
      },
      pc);
}

template <typename Scalar>
Scalar capillary_derivative_clamped(const CapillaryModel& pc, Scalar s) {
  using std::pow;
  return std::visit(
      [&](const auto& m) -> Scalar {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LogCapillary>) {
          return Scalar(m.coefficient) / s;
        } else if constexpr (std::is_same_v<M, BrooksCoreyCapillary>) {
          return -Scalar(m.exponent) * Scalar(m.entry_pressure) * pow(s, -Scalar(m.exponent) - Scalar(1));
        } else {
          return Scalar(m.slope);
        }
      },
      pc);
}

inline void require_positive_saturation(double s, const char* who) {
  if (!(s > 0.0)) throw std::domain_error(std::string(who) + ": saturation must be positive");
}
}  // namespace detail

/// Throws std::domain_error for s <= 0 or NaN; otherwise evaluates at the clamped s.
template <typename Scalar>
Scalar capillary_pressure(const FluidModel& model, Scalar s) {
  detail::require_positive_saturation(static_cast<double>(s), "capillary_pressure");
  return detail::capillary_pressure_clamped(model.capillary, clamp_saturation(s));
}

template <typename Scalar>
Scalar capillary_derivative(const FluidModel& model, Scalar s) {
  detail::require_positive_saturation(static_cast<double>(s), "capillary_derivative");
  return detail::capillary_derivative_clamped(model.capillary, clamp_saturation(s));
}

// ---------------------------------------------------------------------------
// Free energy and chemical potentials

template <typename Scalar>
Scalar free_energy_density(const EnergyParams& g, Scalar s) {
  using std::log;
  s = clamp_saturation(s);
  const Scalar sl = Scalar(1) - s;
  return Scalar(g.gamma_a) * s * (log(s) - Scalar(1)) + Scalar(g.gamma_l) * sl * (log(sl) - Scalar(1)) +
         Scalar(g.gamma_al) * s * sl;
}

/// nu_a = dF/ds_a - dF/ds_l.
template <typename Scalar>
Scalar nu_continuous(const EnergyParams& g, Scalar s) {
  using std::log;
  s = clamp_saturation(s);
  return Scalar(g.gamma_a) * log(s) - Scalar(g.gamma_l) * log(Scalar(1) - s) +
         Scalar(g.gamma_al) * (Scalar(1) - Scalar(2) * s);
}

/// Two-point discrete gradient: F(s_new) - F(s_old) = nu_half * (s_new - s_old)
/// holds exactly (up to round-off) for the clamped arguments. Symmetric in its
/// arguments and a second-order approximation of nu at the midpoint.
template <typename Scalar>
Scalar nu_half(const EnergyParams& g, Scalar s_old, Scalar s_new) {
  using std::abs;
  using std::log;
  using std::log1p;
  s_old = clamp_saturation(s_old);
  s_new = clamp_saturation(s_new);
  if (s_new < s_old) std::swap(s_old, s_new);  // bitwise symmetry
  const Scalar ds = s_new - s_old;
  const Scalar mid = Scalar(0.5) * (s_old + s_new);
  if (abs(ds) < Scalar(kDegenerateIncrement)) return nu_continuous(g, mid);

  // Log increments through log1p keep the difference quotients accurate for
  // small ds.
  const Scalar dlog_a = log1p(ds / s_old);
  const Scalar dlog_l = log1p(-ds / (Scalar(1) - s_old));
  const Scalar sum_log_a = log(s_new) + log(s_old);
  const Scalar sum_log_l = log(Scalar(1) - s_new) + log(Scalar(1) - s_old);

  const Scalar aqueous = Scalar(0.5) * sum_log_a + mid * dlog_a / ds - Scalar(1);
  const Scalar liquid = -Scalar(0.5) * sum_log_l + (Scalar(1) - mid) * dlog_l / ds + Scalar(1);
  const Scalar mixing = Scalar(1) - Scalar(2) * mid;
  return Scalar(g.gamma_a) * aqueous + Scalar(g.gamma_l) * liquid + Scalar(g.gamma_al) * mixing;
}

// ---------------------------------------------------------------------------
// Model validation

struct ModelReport {
  double min_lambda_aqueous = 0.0, max_lambda_aqueous = 0.0;
  double min_lambda_liquid = 0.0, max_lambda_liquid = 0.0;
  double min_lambda_total = 0.0, max_lambda_total = 0.0;
  double min_neg_dpc = 0.0, max_neg_dpc = 0.0;  // bounds of -p_c'
  double lipschitz_lambda_aqueous = 0.0;
  double lipschitz_lambda_liquid = 0.0;
  double lipschitz_lambda_total = 0.0;
  double lipschitz_dpc = 0.0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Sweeps the samples and reports mobility/capillary bounds and empirical
/// Lipschitz constants (between consecutive sorted samples). Flags any sample
/// with a non-positive mobility or a non-negative p_c'.
ModelReport validate_model(const FluidModel& model, std::span<const double> samples);

}  // namespace tpflow

#endif  // TPFLOW_PHYSICS_HPP
