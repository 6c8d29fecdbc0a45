#ifndef TPFLOW_LINALG_HPP
#define TPFLOW_LINALG_HPP

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace tpflow {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Relative residual bound every accepted solve satisfies:
/// ||Ax - b|| <= kSolveTolerance * (||b|| + 1).
inline constexpr double kSolveTolerance = 1e-10;

struct SolveReport {
  double residual_norm = 0.0;
  double rhs_norm = 0.0;
  bool used_fallback = false;  // LDL^T rejected, LU used instead
};

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sums duplicates and drops explicit zeros. Throws std::out_of_range for
/// indices outside [0, dim).
SparseMatrix assemble_from_triplets(Eigen::Index dim, std::span<const Triplet> triplets);

/// Sparse direct solve: LDL^T first, LU if the factorization fails or the
/// residual bound is not met. Throws SolveError if neither meets the bound.
std::pair<Eigen::VectorXd, SolveReport> solve(const SparseMatrix& a, const Eigen::VectorXd& b);

/// Same contract as solve(), but keeps the symbolic analysis between calls
/// with an unchanged sparsity pattern. Not thread-safe; use one per run.
class DirectSolver {
 public:
  DirectSolver();
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b, SolveReport* report = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tpflow

#endif  // TPFLOW_LINALG_HPP
