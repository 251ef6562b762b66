#include "homlts/sparse.hpp"
#include "homlts/tensor.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace homlts;

namespace {

Matrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, int density_pct) {
  std::uniform_int_distribution<int> pct(0, 99), num(-4, 4), den(1, 3);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (pct(rng) < density_pct) {
        m(i, j) = Scalar(num(rng), den(rng));
        m(i, j).canonicalize();
      }
  return m;
}

}  // namespace

TEST(Rref, IdentityIsFixed) {
  const auto r = rref(Matrix::identity(3));
  EXPECT_EQ(r.reduced, Matrix::identity(3));
  EXPECT_EQ(r.pivot_cols, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(r.rank, 3u);
}

TEST(Rref, ZeroMatrix) {
  const auto r = rref(Matrix(2, 4));
  EXPECT_EQ(r.reduced, Matrix(2, 4));
  EXPECT_TRUE(r.pivot_cols.empty());
  EXPECT_EQ(r.rank, 0u);
}

TEST(Rref, DependentRows) {
  const auto r = rref(Matrix{{1, 2}, {2, 4}});
  EXPECT_EQ(r.reduced, (Matrix{{1, 2}, {0, 0}}));
  EXPECT_EQ(r.rank, 1u);
}

TEST(Rref, RationalPivotsAreNormalized) {
  const auto r = rref(Matrix{{Scalar(2, 3), Scalar(1, 3)}, {Scalar(1), Scalar(1)}});
  EXPECT_EQ(r.reduced, Matrix::identity(2));
}

TEST(Nullspace, IdentityHasEmptyBasis) { EXPECT_EQ(nullspace_basis(Matrix::identity(4)).cols(), 0u); }

TEST(Nullspace, ZeroMatrixSpansEverything) {
  const Matrix b = nullspace_basis(Matrix(2, 3));
  EXPECT_EQ(b, Matrix::identity(3));
}

TEST(Nullspace, SingleRow) {
  const Matrix m{{1, 1, 0}};
  const Matrix b = nullspace_basis(m);
  ASSERT_EQ(b.cols(), 2u);
  for (std::size_t j = 0; j < b.cols(); ++j) EXPECT_TRUE(is_zero(m.apply(b.column(j))));
  EXPECT_EQ(rank(b), 2u);
}

TEST(Solve, Identity) {
  const Vector b{Scalar(3), Scalar(-1, 2), Scalar(0)};
  EXPECT_EQ(solve_linear(Matrix::identity(3), b), b);
}

TEST(Solve, Inconsistent) { EXPECT_FALSE(solve_linear(Matrix(2, 2), Vector{Scalar(1), Scalar(0)}).has_value()); }

TEST(Solve, Diagonal) {
  const auto x = solve_linear(Matrix{{2, 0}, {0, 3}}, Vector{Scalar(1), Scalar(1)});
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ(*x, (Vector{Scalar(1, 2), Scalar(1, 3)}));
}

TEST(Solve, DimensionMismatchIsContractViolation) {
  EXPECT_THROW(solve_linear(Matrix::identity(2), Vector(3, Scalar(0))), ContractViolation);
}

TEST(Solve, RandomSystemsAgreeWithRank) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const Matrix a = random_matrix(rng, 1 + trial % 4, 1 + (trial / 4) % 5, 50);
    const Matrix bm = random_matrix(rng, a.rows(), 1, 70);
    const Vector b = bm.column(0);
    const auto x = solve_linear(a, b);
    Matrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
      aug(i, a.cols()) = b[i];
    }
    if (x) {
      EXPECT_EQ(a.apply(*x), b);
    } else {
      EXPECT_GT(rank(aug), rank(a));
    }
  }
}

TEST(CanonicalSpan, EqualSpacesGiveEqualBases) {
  const Matrix a{{1, 0}, {1, 1}, {0, 1}};
  const Matrix b{{1, 1}, {2, 1}, {1, 0}};  // other columns, same span
  EXPECT_EQ(canonical_span_basis(a), canonical_span_basis(b));
}

TEST(CanonicalSpan, MatchesNullspaceNormalForm) {
  const Matrix m{{1, 2, 0, -1}, {0, 0, 1, 3}};
  const Matrix k = nullspace_basis(m);
  EXPECT_EQ(canonical_span_basis(k), k);
}

TEST(Sparse, EchelonMatchesDenseRref) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Matrix m = random_matrix(rng, 2 + trial % 6, 3 + trial % 5, 35);
    SparseEchelon e(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      Vector row(m.cols());
      for (std::size_t j = 0; j < m.cols(); ++j) row[j] = m(i, j);
      e.insert_dense(row);
    }
    const auto dense = rref(m);
    EXPECT_EQ(e.rank(), dense.rank);
    const SparseKernel k(e);
    EXPECT_EQ(k.matrix(), nullspace_basis(m));
  }
}

TEST(Sparse, KernelCoordinatesRoundTrip) {
  const Matrix m{{1, -1, 0, 2}, {0, 1, 1, 0}};
  SparseEchelon e(4);
  for (std::size_t i = 0; i < 2; ++i) e.insert_dense(Vector{m(i, 0), m(i, 1), m(i, 2), m(i, 3)});
  const SparseKernel k(e);
  ASSERT_EQ(k.dim(), 2u);
  const Vector c{Scalar(3, 2), Scalar(-2)};
  const Vector v = k.combine(c);
  EXPECT_TRUE(is_zero(m.apply(v)));
  EXPECT_TRUE(k.contains(v));
  EXPECT_EQ(k.coordinates(v), c);
  EXPECT_FALSE(k.contains(Vector{Scalar(1), Scalar(0), Scalar(0), Scalar(0)}));
}

TEST(Sparse, RankOfVectors) {
  const std::vector<Vector> vs{{Scalar(1), Scalar(2)}, {Scalar(2), Scalar(4)}, {Scalar(0), Scalar(1)}};
  EXPECT_EQ(rank_of_vectors(vs, 2), 2u);
}

TEST(Tensor, EvalMultilinearOnBasis) {
  // t(e_i, e_j) = (i + 2j) e_0, n = 2, arity 2, output dim 1
  Vector t(4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) t[i * 2 + j] = Scalar(static_cast<long>(i + 2 * j));
  const Vector x{Scalar(1), Scalar(1)}, y{Scalar(0), Scalar(1)};
  // sum_i x_i * y_1 * (i + 2) = 2 + 3
  EXPECT_EQ(eval_multilinear(t, TensorShape{2, 2, 1}, {x, y}), Vector{Scalar(5)});
}

TEST(Tensor, CheckedPowOverflowIsDetected) {
  EXPECT_EQ(checked_pow(3, 4), std::optional<std::size_t>(81));
  EXPECT_FALSE(checked_pow(1000, 10).has_value());
}
