#include "tpflow/physics.hpp"

#include <limits>
#include <sstream>

namespace tpflow {

FluidModel mms_fluid_model() {
  FluidModel m;
  m.porosity = 0.2;
  m.mu_liquid = 0.75;
  m.mu_aqueous = 0.5;
  m.relperm = QuadraticRelPerm{};
  m.capillary = LogCapillary{log_capillary_coefficient()};
  m.energy = log_consistent_energy();
  return m;
}

FluidModel q5spot_fluid_model() {
  FluidModel m;
  m.porosity = 0.2;
  m.mu_liquid = 2e-3;
  m.mu_aqueous = 5e-4;
  m.relperm = BrooksCoreyRelPerm{};
  m.capillary = BrooksCoreyCapillary{5e3, 1.0 / 3.0};
  m.energy.reset();  // not derived from the mixing free energy
  return m;
}

EnergyParams log_consistent_energy() { return {-log_capillary_coefficient(), 0.0, 0.0}; }

ModelReport validate_model(const FluidModel& model, std::span<const double> samples) {
  ModelReport r;
  if (samples.empty()) {
    r.violations.push_back("no samples");
    return r;
  }
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());

  constexpr double inf = std::numeric_limits<double>::infinity();
  r.min_lambda_aqueous = r.min_lambda_liquid = r.min_lambda_total = r.min_neg_dpc = inf;
  r.max_lambda_aqueous = r.max_lambda_liquid = r.max_lambda_total = r.max_neg_dpc = -inf;

  struct Sample {
    double la, ll, lt, dpc;
  };
  std::vector<Sample> values;
  values.reserve(s.size());
  for (double x : s) {
    const double la = mobility(model, Phase::Aqueous, x);
    const double ll = mobility(model, Phase::Liquid, x);
    const double dpc = capillary_derivative(model, x);
    values.push_back({la, ll, la + ll, dpc});
    r.min_lambda_aqueous = std::min(r.min_lambda_aqueous, la);
    r.max_lambda_aqueous = std::max(r.max_lambda_aqueous, la);
    r.min_lambda_liquid = std::min(r.min_lambda_liquid, ll);
    r.max_lambda_liquid = std::max(r.max_lambda_liquid, ll);
    r.min_lambda_total = std::min(r.min_lambda_total, la + ll);
    r.max_lambda_total = std::max(r.max_lambda_total, la + ll);
    r.min_neg_dpc = std::min(r.min_neg_dpc, -dpc);
    r.max_neg_dpc = std::max(r.max_neg_dpc, -dpc);
  }
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double h = s[k] - s[k - 1];
    if (!(h > 0.0)) continue;
    const auto slope = [h](double a, double b) { return std::abs(b - a) / h; };
    r.lipschitz_lambda_aqueous = std::max(r.lipschitz_lambda_aqueous, slope(values[k - 1].la, values[k].la));
    r.lipschitz_lambda_liquid = std::max(r.lipschitz_lambda_liquid, slope(values[k - 1].ll, values[k].ll));
    r.lipschitz_lambda_total = std::max(r.lipschitz_lambda_total, slope(values[k - 1].lt, values[k].lt));
    r.lipschitz_dpc = std::max(r.lipschitz_dpc, slope(values[k - 1].dpc, values[k].dpc));
  }

  const auto flag = [&r](const char* hypothesis, double at, const char* what) {
    std::ostringstream os;
    os << hypothesis << " violated at s=" << at << ": " << what;
    r.violations.push_back(os.str());
  };
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!(values[k].la > 0.0)) flag("(A1)", s[k], "aqueous mobility not positive");
    if (!(values[k].ll > 0.0)) flag("(A1)", s[k], "liquid mobility not positive");
    if (!(values[k].lt > 0.0)) flag("(A2)", s[k], "total mobility not positive");
    if (!(values[k].dpc < 0.0)) flag("(A4)", s[k], "capillary pressure not decreasing");
  }
  return r;
}

}  // namespace tpflow
