#include <gtest/gtest.h>

#include <vector>

#include <Eigen/Dense>

#include "tpflow/linalg.hpp"

using namespace tpflow;

TEST(Linalg, DuplicatesSummed) {
  const std::vector<Triplet> t = {{0, 0, 1.0}, {0, 0, 2.0}};
  const SparseMatrix a = assemble_from_triplets(2, t);
  EXPECT_EQ(a.nonZeros(), 1);
  EXPECT_EQ(a.coeff(0, 0), 3.0);
}

TEST(Linalg, EmptyIsZero) {
  const SparseMatrix a = assemble_from_triplets(3, {});
  EXPECT_EQ(a.rows(), 3);
  EXPECT_EQ(a.nonZeros(), 0);
}

TEST(Linalg, OutOfRange) {
  const std::vector<Triplet> t = {{0, 3, 1.0}};
  EXPECT_THROW(assemble_from_triplets(3, t), std::out_of_range);
}

TEST(Linalg, ExplicitZerosDropped) {
  const std::vector<Triplet> t = {{0, 1, 1.0}, {0, 1, -1.0}, {1, 1, 2.0}};
  EXPECT_EQ(assemble_from_triplets(2, t).nonZeros(), 1);
}

TEST(Linalg, LaplacianMatchesDense) {
  // 5-point Laplacian on a 3 x 3 grid.
  const int n = 3;
  std::vector<Triplet> t;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int k = j * n + i;
      t.emplace_back(k, k, 4.0);
      dense(k, k) += 4.0;
      const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& q : nb)
        if (q[0] >= 0 && q[0] < n && q[1] >= 0 && q[1] < n) {
          t.emplace_back(k, q[1] * n + q[0], -1.0);
          dense(k, q[1] * n + q[0]) -= 1.0;
        }
    }
  const SparseMatrix a = assemble_from_triplets(n * n, t);
  const Eigen::MatrixXd ad = Eigen::MatrixXd(a);
  EXPECT_EQ((ad - dense).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((ad - ad.transpose()).cwiseAbs().maxCoeff(), 0.0);

  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n * n, 1.0, 2.0);
  const auto [x, report] = solve(a, b);
  EXPECT_LE((a * x - b).norm(), kSolveTolerance * (b.norm() + 1));
  EXPECT_LE(report.residual_norm, kSolveTolerance * (b.norm() + 1));
}

TEST(Linalg, SmallSolves) {
  const std::vector<Triplet> id = {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}};
  const Eigen::Vector3d b(1, -2, 3);
  EXPECT_EQ(solve(assemble_from_triplets(3, id), b).first, Eigen::VectorXd(b));

  const std::vector<Triplet> t = {{0, 0, 2}, {0, 1, 1}, {1, 0, 1}, {1, 1, 2}};
  const auto [x, r] = solve(assemble_from_triplets(2, t), Eigen::Vector2d(3, 3));
  EXPECT_NEAR(x[0], 1.0, 1e-14);
  EXPECT_NEAR(x[1], 1.0, 1e-14);
}

TEST(Linalg, NonsymmetricUsesFallback) {
  const std::vector<Triplet> t = {{0, 0, 1}, {0, 1, 5}, {1, 0, -1}, {1, 1, 1}};
  const SparseMatrix a = assemble_from_triplets(2, t);
  const Eigen::Vector2d b(1, 2);
  const auto [x, r] = solve(a, b);
  EXPECT_LE((a * x - b).norm(), kSolveTolerance * (b.norm() + 1));
}

TEST(Linalg, SingularFails) {
  const std::vector<Triplet> t = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
  EXPECT_THROW(solve(assemble_from_triplets(2, t), Eigen::Vector2d(1, 0)), SolveError);
}

TEST(Linalg, DeterministicReuse) {
  const std::vector<Triplet> t = {{0, 0, 4}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}, {2, 2, 2}};
  const SparseMatrix a = assemble_from_triplets(3, t);
  const Eigen::Vector3d b(1, 2, 3);
  DirectSolver s;
  const Eigen::VectorXd x1 = s.solve(a, b);
  const Eigen::VectorXd x2 = s.solve(a, b);
  EXPECT_EQ(x1, x2);
  EXPECT_EQ(x1, solve(a, b).first);
}
