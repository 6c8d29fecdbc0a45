#ifndef TPFLOW_SPATIAL_HPP
#define TPFLOW_SPATIAL_HPP

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tpflow/linalg.hpp"
#include "tpflow/mesh.hpp"
#include "tpflow/physics.hpp"

namespace tpflow {

/// Degree-of-freedom vector of one scalar unknown on an FeSpace.
using Field = Eigen::VectorXd;

using SpaceTimeFn = std::function<double(double x, double y, double t)>;

/// Tensor Gauss rule on the reference cell [0,1]^2. Weights sum to 1.
struct QuadratureRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;

  /// n points per direction, 1 <= n <= 4.
  static QuadratureRule gauss(int n);
  /// 1D Gauss rule on [0,1] (first coordinate of each point).
  static QuadratureRule gauss_line(int n);
  int size() const { return static_cast<int>(points.size()); }
};

/// Field value and gradient at one physical point on a boundary edge.
struct EdgePoint {
  Index cell;
  Eigen::Vector2d x;
  Eigen::Vector2d normal;  // outward unit normal
  double weight;           // Gauss weight times edge length element
  Eigen::VectorXd basis;
  Eigen::Matrix2Xd grad;   // physical basis gradients
};

/// Continuous Lagrange space of degree 1 (bilinear) or 2 (biquadratic) on a
/// quadrilateral mesh, with cached geometry at the cell quadrature points.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree, int points_per_direction = 3);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  Index num_dofs() const { return dof_coords_.cols(); }
  Index num_cells() const { return mesh_->num_cells(); }
  int dofs_per_cell() const { return (degree_ + 1) * (degree_ + 1); }
  int qp_per_cell() const { return rule_.size(); }
  Index num_qp() const { return num_cells() * qp_per_cell(); }
  const QuadratureRule& rule() const { return rule_; }

  const Eigen::Matrix2Xd& dof_coordinates() const { return dof_coords_; }
  std::span<const Index> cell_dofs(Index cell) const {
    return {cell_dofs_.data() + cell * dofs_per_cell(), static_cast<std::size_t>(dofs_per_cell())};
  }

  /// Flattened quadrature data; index k = cell * qp_per_cell() + q.
  const Eigen::Matrix2Xd& qp_coordinates() const { return qp_coords_; }
  const Eigen::VectorXd& qp_weights() const { return qp_weights_; }  // rule weight * |det J|
  /// Reference basis values, dofs_per_cell() x qp_per_cell().
  const Eigen::MatrixXd& basis() const { return basis_; }
  /// Physical basis gradients, dofs_per_cell() x num_qp().
  const Eigen::MatrixXd& grad_x() const { return grad_x_; }
  const Eigen::MatrixXd& grad_y() const { return grad_y_; }
  double qp_permeability(Index k) const { return mesh_->cell_permeability[k / qp_per_cell()]; }

  /// Sorted, unique dofs on boundary edges carrying any of the tags.
  std::vector<Index> boundary_dofs(std::span<const BoundaryTag> tags) const;
  /// Quadrature points (3-point Gauss per edge) on edges carrying any of the tags.
  std::vector<EdgePoint> edge_points(std::span<const BoundaryTag> tags) const;

  /// Nodal interpolant of f(x, y).
  Field interpolate(const std::function<double(double, double)>& f) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  QuadratureRule rule_;
  Eigen::Matrix2Xd dof_coords_;
  std::vector<Index> cell_dofs_;
  Eigen::Matrix2Xd qp_coords_;
  Eigen::VectorXd qp_weights_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd grad_x_, grad_y_;
};

/// Values and gradients of a field at every quadrature point (flattened).
struct QuadratureValues {
  Eigen::ArrayXd value;
  Eigen::ArrayXd dx;
  Eigen::ArrayXd dy;
};

/// Shared evaluation kernel for assembly, norms, energies and diagnostics.
QuadratureValues evaluate_at_quadrature(const FeSpace& space, const Field& field);

/// Saturation-dependent coefficients frozen at the quadrature points.
struct Coefficients {
  Eigen::ArrayXd lambda_total;
  Eigen::ArrayXd lambda_aqueous;
  Eigen::ArrayXd dpc;        // p_c'
  Eigen::ArrayXd grad_pc_x;  // grad p_c
  Eigen::ArrayXd grad_pc_y;
};

Coefficients evaluate_coefficients(const FeSpace& space, const FluidModel& model, const Field& s);
/// 2 * current - previous, entry by entry (second-order lagging).
Coefficients extrapolate(const Coefficients& current, const Coefficients& previous);

struct LinearSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

/// Mass term (rate * phi * s, w) on the left and (rate * phi * history, w) on
/// the right: rate = 1/(theta tau) with history s^n for the implicit Euler
/// stage, rate = 3/(2 tau) with history (4 s^n - s^{n-1})/3 for BDF2.
struct MassTerm {
  double rate;
  Field history;
};

/// (lambda kappa grad p, grad v) = (q, v) + (lambda_a kappa grad p_c, grad v).
/// Dirichlet rows are not yet eliminated. Throws std::runtime_error on
/// non-finite data.
LinearSystem assemble_pressure(const FeSpace& space, const Coefficients& coeffs, const SpaceTimeFn& q,
                               double t);

/// Lumped aqueous boundary flux at one dof, outward positive:
/// rate * s_dof + flux.
struct OutflowTerm {
  Index dof = 0;
  double rate = 0.0;
  double flux = 0.0;
};

/// (rate phi s, w) + (K_a grad s, grad w) + sum_outflow (rate s_i + flux) w_i
///   = (q_a, w) + (rate phi history, w) - (B_a grad p, grad w)
/// with K_a = -lambda_a kappa p_c' and B_a = lambda_a kappa. Throws
/// std::invalid_argument if rate <= 0.
LinearSystem assemble_saturation(const FeSpace& space, const Coefficients& coeffs, const MassTerm& mass,
                                 double porosity, const Field& p_new, const SpaceTimeFn& q_a,
                                 std::span<const OutflowTerm> outflow, double t);

/// Symmetric elimination: rows and columns of `dofs` are replaced by the
/// identity and the right-hand side is corrected so the constrained unknowns
/// attain `values` exactly.
void apply_dirichlet(LinearSystem& system, std::span<const Index> dofs, const Eigen::VectorXd& values);

/// ||u_h - u(., t)||_{L2} by quadrature.
double l2_error(const FeSpace& space, const Field& field, const SpaceTimeFn& exact, double t);
double l2_norm(const FeSpace& space, const Field& field);

/// E(s) = sum_q w_q phi F(s(x_q)).
double energy_integral(const FeSpace& space, double porosity, const EnergyParams& params, const Field& s);

}  // namespace tpflow

#endif  // TPFLOW_SPATIAL_HPP
