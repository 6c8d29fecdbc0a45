#include "tpflow/mms.hpp"

#include <stdexcept>
#include <variant>

namespace tpflow {

ManufacturedCase::ManufacturedCase(double final_time, FluidModel model)
    : final_time_(final_time), model_(std::move(model)) {
  if (!std::holds_alternative<QuadraticRelPerm>(model_.relperm) ||
      !std::holds_alternative<LogCapillary>(model_.capillary))
    throw std::invalid_argument("ManufacturedCase: sources are derived for quadratic kr and log p_c only");
  pc_coefficient_ = std::get<LogCapillary>(model_.capillary).coefficient;
}

Eigen::Vector2d ManufacturedCase::pressure_gradient(double x, double y, double t) const {
  const double e = std::exp(t - final_time_);
  return {e * (y * y + 2.0 * x * std::sin(y)), e * (2.0 * x * y + x * x * std::cos(y))};
}

Eigen::Vector2d ManufacturedCase::saturation_gradient(double x, double y, double t) const {
  const double e = std::exp(t - final_time_) / 8.0;
  return {e * (2.0 * x * y * y - std::sin(x)), e * (2.0 * x * x * y)};
}

double ManufacturedCase::pressure_laplacian(double x, double y, double t) const {
  return std::exp(t - final_time_) * (2.0 * std::sin(y) + 2.0 * x - x * x * std::sin(y));
}

double ManufacturedCase::saturation_laplacian(double x, double y, double t) const {
  return std::exp(t - final_time_) * (2.0 * y * y - std::cos(x) + 2.0 * x * x) / 8.0;
}

double ManufacturedCase::saturation_rate(double x, double y, double t) const {
  // The time factor is e^{t-T}, so d/dt reproduces the field.
  return saturation(x, y, t);
}

Sources ManufacturedCase::sources(double x, double y, double t) const {
  const double s = saturation(x, y, t);
  const Eigen::Vector2d gs = saturation_gradient(x, y, t);
  const Eigen::Vector2d gp = pressure_gradient(x, y, t);
  const double lap_s = saturation_laplacian(x, y, t);
  const double lap_p = pressure_laplacian(x, y, t);

  const double mu_a = model_.mu_aqueous;
  const double mu_l = model_.mu_liquid;
  // lambda_a = s^2/mu_a, lambda_l = (1-s)^2/mu_l.
  const double lam_a = s * s / mu_a;
  const double lam_l = (1.0 - s) * (1.0 - s) / mu_l;
  const double dlam_a = 2.0 * s / mu_a;
  const double dlam_l = -2.0 * (1.0 - s) / mu_l;
  const double lam = lam_a + lam_l;
  const double dlam = dlam_a + dlam_l;

  // lambda_a p_c' = c s / mu_a, so div(lambda_a grad p_c) = c/mu_a (|grad s|^2 + s lap s).
  const double capillary_div = pc_coefficient_ / mu_a * (gs.squaredNorm() + s * lap_s);
  const double grads_dot_gradp = gs.dot(gp);

  const double div_total = dlam * grads_dot_gradp + lam * lap_p;
  const double div_aqueous = dlam_a * grads_dot_gradp + lam_a * lap_p;

  Sources out;
  out.total = -div_total + capillary_div;
  out.aqueous = model_.porosity * saturation_rate(x, y, t) + capillary_div - div_aqueous;
  return out;
}

}  // namespace tpflow
