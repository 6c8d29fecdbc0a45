#include "tpflow/linalg.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace tpflow {

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

bool same_pattern(const ColMatrix& a, const std::vector<int>& outer, const std::vector<int>& inner) {
  if (static_cast<std::size_t>(a.outerSize() + 1) != outer.size() ||
      static_cast<std::size_t>(a.nonZeros()) != inner.size())
    return false;
  return std::equal(outer.begin(), outer.end(), a.outerIndexPtr()) &&
         std::equal(inner.begin(), inner.end(), a.innerIndexPtr());
}

double residual(const ColMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  return (a * x - b).norm();
}

}  // namespace

SparseMatrix assemble_from_triplets(Eigen::Index dim, std::span<const Triplet> triplets) {
  for (const auto& t : triplets)
    if (t.row() < 0 || t.col() < 0 || t.row() >= dim || t.col() >= dim)
      throw std::out_of_range("assemble_from_triplets: index (" + std::to_string(t.row()) + ", " +
                              std::to_string(t.col()) + ") outside dimension " + std::to_string(dim));
  SparseMatrix a(dim, dim);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.prune(0.0, 0.0);
  a.makeCompressed();
  return a;
}

struct DirectSolver::Impl {
  Eigen::SimplicialLDLT<ColMatrix> ldlt;
  std::vector<int> outer, inner;
  bool analyzed = false;
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

Eigen::VectorXd DirectSolver::solve(const SparseMatrix& a_row, const Eigen::VectorXd& b, SolveReport* report) {
  if (a_row.rows() != a_row.cols() || a_row.rows() != b.size())
    throw SolveError("solve: dimension mismatch");
  if (!b.allFinite()) throw SolveError("solve: non-finite right-hand side");
  ColMatrix a = a_row;
  a.makeCompressed();
  if (!Eigen::Map<const Eigen::VectorXd>(a.valuePtr(), a.nonZeros()).allFinite())
    throw SolveError("solve: non-finite matrix entries");

  SolveReport rep;
  rep.rhs_norm = b.norm();
  const double bound = kSolveTolerance * (rep.rhs_norm + 1.0);

  if (!impl_->analyzed || !same_pattern(a, impl_->outer, impl_->inner)) {
    impl_->ldlt.analyzePattern(a);
    impl_->outer.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
    impl_->inner.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
    impl_->analyzed = true;
  }
  impl_->ldlt.factorize(a);
  Eigen::VectorXd x;
  if (impl_->ldlt.info() == Eigen::Success) {
    x = impl_->ldlt.solve(b);
    rep.residual_norm = residual(a, x, b);
  }
  if (impl_->ldlt.info() != Eigen::Success || !x.allFinite() || !(rep.residual_norm <= bound)) {
    Eigen::SparseLU<ColMatrix> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw SolveError("solve: matrix is singular");
    x = lu.solve(b);
    rep.residual_norm = residual(a, x, b);
    rep.used_fallback = true;
    if (!x.allFinite() || !(rep.residual_norm <= bound))
      throw SolveError("solve: residual " + std::to_string(rep.residual_norm) + " exceeds bound " +
                       std::to_string(bound));
  }
  if (report) *report = rep;
  return x;
}

std::pair<Eigen::VectorXd, SolveReport> solve(const SparseMatrix& a, const Eigen::VectorXd& b) {
  DirectSolver solver;
  SolveReport report;
  Eigen::VectorXd x = solver.solve(a, b, &report);
  return {std::move(x), report};
}

}  // namespace tpflow
