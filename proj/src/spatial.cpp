#include "tpflow/spatial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include <Eigen/LU>

namespace tpflow {

namespace {

// 1D Lagrange basis on [0,1] with equispaced nodes.
void lagrange_1d(int degree, double x, double* value, double* deriv) {
  if (degree == 1) {
    value[0] = 1.0 - x;
    value[1] = x;
    deriv[0] = -1.0;
    deriv[1] = 1.0;
  } else {
    value[0] = 2.0 * (x - 0.5) * (x - 1.0);
    value[1] = -4.0 * x * (x - 1.0);
    value[2] = 2.0 * x * (x - 0.5);
    deriv[0] = 4.0 * x - 3.0;
    deriv[1] = -8.0 * x + 4.0;
    deriv[2] = 4.0 * x - 1.0;
  }
}

// Tensor basis, local index = b * (p+1) + a.
void tensor_basis(int degree, const Eigen::Vector2d& xi, Eigen::VectorXd& value, Eigen::Matrix2Xd& grad_ref) {
  const int n = degree + 1;
  std::array<double, 3> vx{}, dx{}, vy{}, dy{};
  lagrange_1d(degree, xi.x(), vx.data(), dx.data());
  lagrange_1d(degree, xi.y(), vy.data(), dy.data());
  value.resize(n * n);
  grad_ref.resize(2, n * n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      const int k = b * n + a;
      value[k] = vx[static_cast<std::size_t>(a)] * vy[static_cast<std::size_t>(b)];
      grad_ref(0, k) = dx[static_cast<std::size_t>(a)] * vy[static_cast<std::size_t>(b)];
      grad_ref(1, k) = vx[static_cast<std::size_t>(a)] * dy[static_cast<std::size_t>(b)];
    }
}

struct Geometry {
  Eigen::Vector2d x;
  Eigen::Matrix2d jacobian;  // columns d x / d xi, d x / d eta
};

Geometry bilinear_map(const Mesh& mesh, Index cell, const Eigen::Vector2d& xi) {
  const auto& c = mesh.cells[static_cast<std::size_t>(cell)];
  const double s = xi.x(), t = xi.y();
  const std::array<double, 4> n = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
  const std::array<double, 4> ns = {-(1 - t), (1 - t), t, -t};
  const std::array<double, 4> nt = {-(1 - s), -s, s, (1 - s)};
  Geometry g;
  g.x.setZero();
  g.jacobian.setZero();
  for (std::size_t k = 0; k < 4; ++k) {
    const Eigen::Vector2d p = mesh.nodes.col(c[k]);
    g.x += n[k] * p;
    g.jacobian.col(0) += ns[k] * p;
    g.jacobian.col(1) += nt[k] * p;
  }
  return g;
}

// Tensor positions (a, b) along local edge e, ordered along the edge.
std::vector<std::pair<int, int>> edge_positions(int degree, int edge) {
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k <= degree; ++k) {
    switch (edge) {
      case 0: out.emplace_back(k, 0); break;
      case 1: out.emplace_back(degree, k); break;
      case 2: out.emplace_back(k, degree); break;
      default: out.emplace_back(0, k); break;
    }
  }
  return out;
}

bool has_tag(std::span<const BoundaryTag> tags, BoundaryTag tag) {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

void require_finite(const Eigen::ArrayXd& a, const char* what) {
  if (!a.allFinite()) throw std::runtime_error(std::string("assembly: non-finite ") + what);
}

}  // namespace

QuadratureRule QuadratureRule::gauss_line(int n) {
  QuadratureRule r;
  std::vector<double> x, w;
  switch (n) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: x = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)}; w = {1.0, 1.0}; break;
    case 3: x = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}; w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}; break;
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0, wb = (18.0 - std::sqrt(30.0)) / 36.0;
      x = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    default: throw std::invalid_argument("QuadratureRule: 1 to 4 points per direction supported");
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    r.points.emplace_back(0.5 * (x[k] + 1.0), 0.0);
    r.weights.push_back(0.5 * w[k]);
  }
  return r;
}

QuadratureRule QuadratureRule::gauss(int n) {
  const QuadratureRule line = gauss_line(n);
  QuadratureRule r;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      r.points.emplace_back(line.points[static_cast<std::size_t>(i)].x(), line.points[static_cast<std::size_t>(j)].x());
      r.weights.push_back(line.weights[static_cast<std::size_t>(i)] * line.weights[static_cast<std::size_t>(j)]);
    }
  return r;
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree, int points_per_direction)
    : mesh_(std::move(mesh)), degree_(degree), rule_(QuadratureRule::gauss(points_per_direction)) {
  if (!mesh_) throw std::invalid_argument("FeSpace: null mesh");
  if (degree_ != 1 && degree_ != 2) throw std::invalid_argument("FeSpace: degree must be 1 or 2");
  const Mesh& m = *mesh_;
  const int n = degree_ + 1;
  const int nloc = n * n;
  const Index ncell = m.num_cells();

  // Vertex dofs share the mesh node numbering; edge and cell dofs follow.
  cell_dofs_.assign(static_cast<std::size_t>(ncell * nloc), -1);
  Index next = m.num_nodes();
  std::map<std::pair<Index, Index>, Index> edge_dof;
  for (Index c = 0; c < ncell; ++c) {
    const auto& cell = m.cells[static_cast<std::size_t>(c)];
    Index* dofs = cell_dofs_.data() + c * nloc;
    const int p = degree_;
    dofs[0] = cell[0];
    dofs[p] = cell[1];
    dofs[p * n + p] = cell[2];
    dofs[p * n] = cell[3];
    if (degree_ == 2) {
      constexpr std::array<std::array<int, 2>, 4> mid = {{{1, 0}, {2, 1}, {1, 2}, {0, 1}}};
      for (std::size_t e = 0; e < 4; ++e) {
        const Index a = cell[e], b = cell[(e + 1) % 4];
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto [it, inserted] = edge_dof.try_emplace(key, next);
        if (inserted) ++next;
        dofs[mid[e][1] * n + mid[e][0]] = it->second;
      }
    }
  }
  if (degree_ == 2)
    for (Index c = 0; c < ncell; ++c) cell_dofs_[static_cast<std::size_t>(c * nloc + 4)] = next++;

  dof_coords_.resize(2, next);
  for (Index c = 0; c < ncell; ++c)
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) {
        const Eigen::Vector2d xi(static_cast<double>(a) / degree_, static_cast<double>(b) / degree_);
        dof_coords_.col(cell_dofs_[static_cast<std::size_t>(c * nloc + b * n + a)]) = bilinear_map(m, c, xi).x;
      }

  const int nq = rule_.size();
  basis_.resize(nloc, nq);
  std::vector<Eigen::Matrix2Xd> grad_ref(static_cast<std::size_t>(nq));
  for (int q = 0; q < nq; ++q) {
    Eigen::VectorXd v;
    tensor_basis(degree_, rule_.points[static_cast<std::size_t>(q)], v, grad_ref[static_cast<std::size_t>(q)]);
    basis_.col(q) = v;
  }
  qp_coords_.resize(2, ncell * nq);
  qp_weights_.resize(ncell * nq);
  grad_x_.resize(nloc, ncell * nq);
  grad_y_.resize(nloc, ncell * nq);
  for (Index c = 0; c < ncell; ++c)
    for (int q = 0; q < nq; ++q) {
      const Index k = c * nq + q;
      const Geometry g = bilinear_map(m, c, rule_.points[static_cast<std::size_t>(q)]);
      const double det = g.jacobian.determinant();
      if (!(det > 0.0)) throw std::invalid_argument("FeSpace: degenerate cell");
      qp_coords_.col(k) = g.x;
      qp_weights_[k] = rule_.weights[static_cast<std::size_t>(q)] * det;
      const Eigen::Matrix2Xd grad = g.jacobian.inverse().transpose() * grad_ref[static_cast<std::size_t>(q)];
      grad_x_.col(k) = grad.row(0).transpose();
      grad_y_.col(k) = grad.row(1).transpose();
    }
}

std::vector<Index> FeSpace::boundary_dofs(std::span<const BoundaryTag> tags) const {
  std::vector<Index> out;
  const int n = degree_ + 1;
  for (const auto& e : mesh_->boundary_edges) {
    if (!has_tag(tags, e.tag)) continue;
    const auto dofs = cell_dofs(e.cell);
    for (const auto& [a, b] : edge_positions(degree_, e.local_edge))
      out.push_back(dofs[static_cast<std::size_t>(b * n + a)]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<EdgePoint> FeSpace::edge_points(std::span<const BoundaryTag> tags) const {
  static const std::array<Eigen::Vector2d, 4> direction = {
      Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(-1, 0), Eigen::Vector2d(0, -1)};
  const QuadratureRule line = QuadratureRule::gauss_line(3);
  std::vector<EdgePoint> out;
  for (const auto& e : mesh_->boundary_edges) {
    if (!has_tag(tags, e.tag)) continue;
    for (int q = 0; q < line.size(); ++q) {
      const double t = line.points[static_cast<std::size_t>(q)].x();
      Eigen::Vector2d xi;
      switch (e.local_edge) {
        case 0: xi = {t, 0.0}; break;
        case 1: xi = {1.0, t}; break;
        case 2: xi = {1.0 - t, 1.0}; break;
        default: xi = {0.0, 1.0 - t}; break;
      }
      const Geometry g = bilinear_map(*mesh_, e.cell, xi);
      const Eigen::Vector2d tangent = g.jacobian * direction[static_cast<std::size_t>(e.local_edge)];
      EdgePoint p;
      p.cell = e.cell;
      p.x = g.x;
      p.normal = Eigen::Vector2d(tangent.y(), -tangent.x()) / tangent.norm();
      p.weight = line.weights[static_cast<std::size_t>(q)] * tangent.norm();
      Eigen::Matrix2Xd grad_ref;
      tensor_basis(degree_, xi, p.basis, grad_ref);
      p.grad = g.jacobian.inverse().transpose() * grad_ref;
      out.push_back(std::move(p));
    }
  }
  return out;
}

Field FeSpace::interpolate(const std::function<double(double, double)>& f) const {
  Field out(num_dofs());
  for (Index i = 0; i < num_dofs(); ++i) out[i] = f(dof_coords_(0, i), dof_coords_(1, i));
  return out;
}

QuadratureValues evaluate_at_quadrature(const FeSpace& space, const Field& field) {
  if (field.size() != space.num_dofs()) throw std::invalid_argument("evaluate_at_quadrature: size mismatch");
  const int nq = space.qp_per_cell();
  const int nloc = space.dofs_per_cell();
  QuadratureValues out;
  out.value.resize(space.num_qp());
  out.dx.resize(space.num_qp());
  out.dy.resize(space.num_qp());
  Eigen::VectorXd local(nloc);
  for (Index c = 0; c < space.num_cells(); ++c) {
    const auto dofs = space.cell_dofs(c);
    for (int a = 0; a < nloc; ++a) local[a] = field[dofs[static_cast<std::size_t>(a)]];
    for (int q = 0; q < nq; ++q) {
      const Index k = c * nq + q;
      out.value[k] = space.basis().col(q).dot(local);
      out.dx[k] = space.grad_x().col(k).dot(local);
      out.dy[k] = space.grad_y().col(k).dot(local);
    }
  }
  return out;
}

Coefficients evaluate_coefficients(const FeSpace& space, const FluidModel& model, const Field& s) {
  const QuadratureValues sq = evaluate_at_quadrature(space, s);
  const Index n = space.num_qp();
  Coefficients c;
  c.lambda_total.resize(n);
  c.lambda_aqueous.resize(n);
  c.dpc.resize(n);
  c.grad_pc_x.resize(n);
  c.grad_pc_y.resize(n);
  for (Index k = 0; k < n; ++k) {
    const double sk = clamp_saturation(sq.value[k]);
    const double la = mobility(model, Phase::Aqueous, sk);
    c.lambda_aqueous[k] = la;
    c.lambda_total[k] = la + mobility(model, Phase::Liquid, sk);
    c.dpc[k] = detail::capillary_derivative_clamped(model.capillary, sk);
    c.grad_pc_x[k] = c.dpc[k] * sq.dx[k];
    c.grad_pc_y[k] = c.dpc[k] * sq.dy[k];
  }
  return c;
}

Coefficients extrapolate(const Coefficients& current, const Coefficients& previous) {
  Coefficients c;
  c.lambda_total = 2.0 * current.lambda_total - previous.lambda_total;
  c.lambda_aqueous = 2.0 * current.lambda_aqueous - previous.lambda_aqueous;
  c.dpc = 2.0 * current.dpc - previous.dpc;
  c.grad_pc_x = 2.0 * current.grad_pc_x - previous.grad_pc_x;
  c.grad_pc_y = 2.0 * current.grad_pc_y - previous.grad_pc_y;
  return c;
}

LinearSystem assemble_pressure(const FeSpace& space, const Coefficients& coeffs, const SpaceTimeFn& q,
                               double t) {
  require_finite(coeffs.lambda_total, "total mobility");
  require_finite(coeffs.grad_pc_x, "capillary gradient");
  require_finite(coeffs.grad_pc_y, "capillary gradient");
  const int nq = space.qp_per_cell();
  const int nloc = space.dofs_per_cell();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(space.num_cells() * nloc * nloc));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.num_dofs());
  Eigen::MatrixXd ke(nloc, nloc);
  Eigen::VectorXd fe(nloc);
  for (Index c = 0; c < space.num_cells(); ++c) {
    ke.setZero();
    fe.setZero();
    const double kappa = space.mesh().cell_permeability[c];
    for (int qi = 0; qi < nq; ++qi) {
      const Index k = c * nq + qi;
      const double w = space.qp_weights()[k];
      const auto gx = space.grad_x().col(k);
      const auto gy = space.grad_y().col(k);
      const double a = w * coeffs.lambda_total[k] * kappa;
      ke.noalias() += a * (gx * gx.transpose() + gy * gy.transpose());
      const double flux = w * coeffs.lambda_aqueous[k] * kappa;
      fe.noalias() += flux * (coeffs.grad_pc_x[k] * gx + coeffs.grad_pc_y[k] * gy);
      if (q) fe.noalias() += w * q(space.qp_coordinates()(0, k), space.qp_coordinates()(1, k), t) * space.basis().col(qi);
    }
    const auto dofs = space.cell_dofs(c);
    for (int i = 0; i < nloc; ++i) {
      rhs[dofs[static_cast<std::size_t>(i)]] += fe[i];
      for (int j = 0; j < nloc; ++j)
        triplets.emplace_back(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], ke(i, j));
    }
  }
  if (!rhs.allFinite()) throw std::runtime_error("assembly: non-finite pressure right-hand side");
  return {assemble_from_triplets(space.num_dofs(), triplets), std::move(rhs)};
}

LinearSystem assemble_saturation(const FeSpace& space, const Coefficients& coeffs, const MassTerm& mass,
                                 double porosity, const Field& p_new, const SpaceTimeFn& q_a,
                                 std::span<const OutflowTerm> outflow, double t) {
  if (!(mass.rate > 0.0)) throw std::invalid_argument("assemble_saturation: time step must be positive");
  if (mass.history.size() != space.num_dofs() || p_new.size() != space.num_dofs())
    throw std::invalid_argument("assemble_saturation: field size mismatch");
  require_finite(coeffs.lambda_aqueous, "aqueous mobility");
  require_finite(coeffs.dpc, "capillary derivative");
  const int nq = space.qp_per_cell();
  const int nloc = space.dofs_per_cell();
  const double mass_coef = mass.rate * porosity;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(space.num_cells() * nloc * nloc));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.num_dofs());
  Eigen::MatrixXd ke(nloc, nloc);
  Eigen::VectorXd fe(nloc), hist(nloc), pl(nloc);
  for (Index c = 0; c < space.num_cells(); ++c) {
    ke.setZero();
    fe.setZero();
    const double kappa = space.mesh().cell_permeability[c];
    const auto dofs = space.cell_dofs(c);
    for (int a = 0; a < nloc; ++a) {
      hist[a] = mass.history[dofs[static_cast<std::size_t>(a)]];
      pl[a] = p_new[dofs[static_cast<std::size_t>(a)]];
    }
    for (int qi = 0; qi < nq; ++qi) {
      const Index k = c * nq + qi;
      const double w = space.qp_weights()[k];
      const auto n = space.basis().col(qi);
      const auto gx = space.grad_x().col(k);
      const auto gy = space.grad_y().col(k);
      const double ka = -coeffs.lambda_aqueous[k] * kappa * coeffs.dpc[k];
      const double ba = coeffs.lambda_aqueous[k] * kappa;
      ke.noalias() += w * mass_coef * (n * n.transpose());
      ke.noalias() += w * ka * (gx * gx.transpose() + gy * gy.transpose());
      fe.noalias() += w * mass_coef * n.dot(hist) * n;
      fe.noalias() -= w * ba * (gx.dot(pl) * gx + gy.dot(pl) * gy);
      if (q_a) fe.noalias() += w * q_a(space.qp_coordinates()(0, k), space.qp_coordinates()(1, k), t) * n;
    }
    for (int i = 0; i < nloc; ++i) {
      rhs[dofs[static_cast<std::size_t>(i)]] += fe[i];
      for (int j = 0; j < nloc; ++j)
        triplets.emplace_back(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], ke(i, j));
    }
  }
  for (const OutflowTerm& o : outflow) {
    if (o.dof < 0 || o.dof >= space.num_dofs()) throw std::invalid_argument("assemble_saturation: outflow dof out of range");
    if (o.rate != 0.0) triplets.emplace_back(o.dof, o.dof, o.rate);
    rhs[o.dof] -= o.flux;
  }
  if (!rhs.allFinite()) throw std::runtime_error("assembly: non-finite saturation right-hand side");
  return {assemble_from_triplets(space.num_dofs(), triplets), std::move(rhs)};
}

void apply_dirichlet(LinearSystem& system, std::span<const Index> dofs, const Eigen::VectorXd& values) {
  if (static_cast<Index>(dofs.size()) != values.size())
    throw std::invalid_argument("apply_dirichlet: dofs/values size mismatch");
  if (dofs.empty()) return;
  const Index n = system.matrix.rows();
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    fixed[static_cast<std::size_t>(dofs[k])] = 1;
    g[dofs[k]] = values[static_cast<Index>(k)];
  }
  system.rhs -= system.matrix * g;
  SparseMatrix& a = system.matrix;
  for (Index row = 0; row < a.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(a, row); it; ++it) {
      const bool row_fixed = fixed[static_cast<std::size_t>(it.row())];
      const bool col_fixed = fixed[static_cast<std::size_t>(it.col())];
      if (row_fixed || col_fixed) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    }
  a.prune(0.0, 0.0);
  for (std::size_t k = 0; k < dofs.size(); ++k) system.rhs[dofs[k]] = values[static_cast<Index>(k)];
}

double l2_error(const FeSpace& space, const Field& field, const SpaceTimeFn& exact, double t) {
  const QuadratureValues v = evaluate_at_quadrature(space, field);
  double sum = 0.0;
  for (Index k = 0; k < space.num_qp(); ++k) {
    const double e = v.value[k] - (exact ? exact(space.qp_coordinates()(0, k), space.qp_coordinates()(1, k), t) : 0.0);
    sum += space.qp_weights()[k] * e * e;
  }
  return std::sqrt(sum);
}

double l2_norm(const FeSpace& space, const Field& field) {
  const QuadratureValues v = evaluate_at_quadrature(space, field);
  return std::sqrt((space.qp_weights().array() * v.value.square()).sum());
}

double energy_integral(const FeSpace& space, double porosity, const EnergyParams& params, const Field& s) {
  const QuadratureValues v = evaluate_at_quadrature(space, s);
  double sum = 0.0;
  for (Index k = 0; k < space.num_qp(); ++k)
    sum += space.qp_weights()[k] * porosity * free_energy_density(params, v.value[k]);
  return sum;
}

}  // namespace tpflow
