#ifndef TPFLOW_MMS_HPP
#define TPFLOW_MMS_HPP

#include <cmath>

#include <Eigen/Core>

#include "tpflow/physics.hpp"

namespace tpflow {

enum class Unknown { Pressure, Saturation };

struct Sources {
  double total;    // q = q_l + q_a
  double aqueous;  // q_a
};

/// Manufactured solution on the unit square with unit permeability:
///   p_l = e^{t-T} (2 + x y^2 + x^2 sin y)
///   s_a = e^{t-T} (2 + x^2 y^2 + cos x) / 8
/// The sources are hand-derived for the quadratic relative permeabilities and
/// the logarithmic capillary model.
class ManufacturedCase {
 public:
  /// Throws std::invalid_argument unless the model uses QuadraticRelPerm and
  /// LogCapillary.
  explicit ManufacturedCase(double final_time, FluidModel model = mms_fluid_model());

  double final_time() const { return final_time_; }
  const FluidModel& model() const { return model_; }

  template <typename Scalar>
  Scalar pressure(Scalar x, Scalar y, Scalar t) const {
    using std::exp;
    using std::sin;
    return exp(t - Scalar(final_time_)) * (Scalar(2) + x * y * y + x * x * sin(y));
  }

  template <typename Scalar>
  Scalar saturation(Scalar x, Scalar y, Scalar t) const {
    using std::cos;
    using std::exp;
    return exp(t - Scalar(final_time_)) * (Scalar(2) + x * x * y * y + cos(x)) / Scalar(8);
  }

  template <typename Scalar>
  Scalar exact(Unknown which, Scalar x, Scalar y, Scalar t) const {
    return which == Unknown::Pressure ? pressure(x, y, t) : saturation(x, y, t);
  }

  Eigen::Vector2d pressure_gradient(double x, double y, double t) const;
  Eigen::Vector2d saturation_gradient(double x, double y, double t) const;
  double pressure_laplacian(double x, double y, double t) const;
  double saturation_laplacian(double x, double y, double t) const;
  double saturation_rate(double x, double y, double t) const;  // d s_a / dt

  Sources sources(double x, double y, double t) const;

  /// Trace of the exact solution; the caller supplies a boundary point.
  double dirichlet_value(Unknown which, double x, double y, double t) const {
    return exact(which, x, y, t);
  }

 private:
  double final_time_;
  FluidModel model_;
  double pc_coefficient_;
};

}  // namespace tpflow

#endif  // TPFLOW_MMS_HPP
