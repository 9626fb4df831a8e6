#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "nzsg/vecmat.hpp"

using namespace nzsg;

namespace {

SparseMatrix random_sparse(std::size_t r, std::size_t c, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.0, 1.0);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      if (p(rng) < density) t.push_back({i, j, u(rng)});
  return SparseMatrix::from_triplets(r, c, std::move(t));
}

// Row-sequential dense reference, same summation order as the kernel.
DenseVector dense_mv(const SparseMatrix& A, const DenseVector& x) {
  const auto D = A.to_dense();
  DenseVector out(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j)
      if (D[i * A.cols() + j] != 0.0) s += D[i * A.cols() + j] * x[j];
    out[i] = s;
  }
  return out;
}

DenseVector random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  DenseVector v(n);
  for (auto& e : v) e = nd(rng);
  return v;
}

Eigen::MatrixXd to_eigen(const SparseMatrix& A) {
  const auto D = A.to_dense();
  Eigen::MatrixXd M(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) M(i, j) = D[i * A.cols() + j];
  return M;
}

}  // namespace

TEST(DenseVector, RejectsNonFinite) {
  EXPECT_THROW(DenseVector({1.0, std::nan("")}), std::invalid_argument);
  EXPECT_THROW(DenseVector({INFINITY}), std::invalid_argument);
  EXPECT_NO_THROW(DenseVector({1.0, -2.0}));
}

TEST(DenseVector, Arithmetic) {
  const DenseVector a{1.0, 2.0}, b{3.0, -1.0};
  EXPECT_DOUBLE_EQ(dot(a, b), 1.0);
  EXPECT_EQ(a + b, (DenseVector{4.0, 1.0}));
  EXPECT_EQ(a - b, (DenseVector{-2.0, 3.0}));
  EXPECT_EQ(2.0 * a, (DenseVector{2.0, 4.0}));
  EXPECT_DOUBLE_EQ(squared_distance(a, b), 13.0);
  EXPECT_THROW(dot(a, DenseVector{1.0}), DimensionError);
}

TEST(SparseMatrix, ValidatesCsr) {
  EXPECT_THROW(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), std::invalid_argument);           // offsets length
  EXPECT_THROW(SparseMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 2.0}), std::invalid_argument);   // unsorted cols
  EXPECT_THROW(SparseMatrix(1, 2, {0, 1}, {2}, {1.0}), std::invalid_argument);           // col range
  EXPECT_THROW(SparseMatrix(1, 1, {0, 1}, {0}, {std::nan("")}), std::invalid_argument);  // finite values
}

TEST(SparseMatrix, TripletsSumDuplicates) {
  const auto A = SparseMatrix::from_triplets(2, 2, {{1, 1, 2.0}, {0, 0, 1.0}, {1, 1, 3.0}});
  EXPECT_EQ(A.nnz(), 2u);
  EXPECT_DOUBLE_EQ(A.at(1, 1), 5.0);
  EXPECT_DOUBLE_EQ(A.at(0, 1), 0.0);
}

TEST(Spmv, Identity) {
  const auto I = SparseMatrix::identity(2);
  EXPECT_EQ(spmv(I, DenseVector{3.0, -1.0}), (DenseVector{3.0, -1.0}));
  EXPECT_EQ(spmv_transpose(I, DenseVector{3.0, -1.0}), (DenseVector{3.0, -1.0}));
}

TEST(Spmv, PostFeeMatrix) {
  const auto A = SparseMatrix::from_dense({{297.0, -200.0}, {-100.0, 396.0}});
  EXPECT_EQ(spmv(A, DenseVector{0.5, 0.5}), (DenseVector{48.5, 148.0}));
  EXPECT_EQ(spmv_transpose(A, DenseVector{1.0, 0.0}), (DenseVector{297.0, -200.0}));
}

TEST(Spmv, MatchesDenseReferenceExactly) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto A = random_sparse(17, 23, 0.3, s);
    const auto x = random_vec(23, 100 + s);
    EXPECT_EQ(max_abs_diff(spmv(A, x), dense_mv(A, x)), 0.0);
  }
}

TEST(Spmv, TransposeMatchesDense) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto A = random_sparse(17, 23, 0.3, s);
    const auto y = random_vec(17, 200 + s);
    const Eigen::VectorXd ref = to_eigen(A).transpose() * Eigen::Map<const Eigen::VectorXd>(y.span().data(), 17);
    const DenseVector got = spmv_transpose(A, y);
    for (std::size_t j = 0; j < 23; ++j) EXPECT_NEAR(got[j], ref[j], 1e-12 * (1.0 + std::abs(ref[j])));
  }
}

TEST(Spmv, DimensionMismatch) {
  const auto A = random_sparse(3, 4, 0.5, 1);
  EXPECT_THROW(spmv(A, DenseVector(3)), DimensionError);
  EXPECT_THROW(spmv_transpose(A, DenseVector(4)), DimensionError);
}

TEST(SpectralNorm, SimpleCases) {
  const auto D = SparseMatrix::from_dense({{3.0, 0.0}, {0.0, 4.0}});
  EXPECT_NEAR(spectral_norm(D), 4.0, 4.0 * 1e-8);
  EXPECT_NEAR(spectral_norm(SparseMatrix::identity(7)), 1.0, 1e-8);
}

TEST(SpectralNorm, MatchesSvd) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto A = random_sparse(50, 50, 0.5, s);
    const double ref = Eigen::JacobiSVD<Eigen::MatrixXd>(to_eigen(A)).singularValues()(0);
    EXPECT_NEAR(spectral_norm(A), ref, 1e-6 * ref);
  }
}

TEST(SpectralNorm, Homogeneous) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 10; ++k) {
    const auto A = random_sparse(20, 30, 0.4, 50 + k);
    const double c = u(rng);
    const double a = spectral_norm(A), b = spectral_norm(A.scaled(c));
    EXPECT_NEAR(b, std::abs(c) * a, 2e-8 * std::abs(c) * a);
  }
}

TEST(SpectralNorm, NonConvergenceCarriesEstimate) {
  const auto A = random_sparse(40, 40, 0.5, 9);
  try {
    spectral_norm(A, 1e-15, 2, 0);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_estimate(), 0.0);
  }
  EXPECT_THROW(spectral_norm(A, 0.0, 10, 0), PreconditionError);
}

TEST(SparseLincomb, UnionPattern) {
  const auto A = SparseMatrix::from_dense({{1.0, 0.0}, {0.0, 2.0}});
  const auto B = SparseMatrix::from_dense({{0.0, 3.0}, {0.0, 4.0}});
  const auto C = lincomb(0.5, A, -1.0, B);
  EXPECT_DOUBLE_EQ(C.at(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(C.at(0, 1), -3.0);
  EXPECT_DOUBLE_EQ(C.at(1, 1), -3.0);
}
