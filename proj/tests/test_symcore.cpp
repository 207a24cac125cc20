#include <gtest/gtest.h>

#include <cmath>

#include "psdrank/symcore.hpp"
#include "test_support.hpp"

namespace psdrank {
namespace {

SymMatrix sym2(double a, double b, double c) {
  DenseMatrix m(2, 2);
  m << a, b, b, c;
  return SymMatrix::from_upper(m);
}

TEST(Svec, IdentityAndBasisElements) {
  EXPECT_EQ(svec(SymMatrix::identity(2)), Vector::Ones(3).cwiseProduct(Eigen::Vector3d(1, 1, 0)));
  const Vector off = svec(sym2(0, 1, 0));
  EXPECT_EQ(off(0), 0.0);
  EXPECT_EQ(off(1), 0.0);
  EXPECT_DOUBLE_EQ(off(2), std::sqrt(2.0));
  const Vector y = svec(sym2(2, 3, 5));
  EXPECT_DOUBLE_EQ(y(0), 2.0);
  EXPECT_DOUBLE_EQ(y(1), 5.0);
  EXPECT_DOUBLE_EQ(y(2), 3.0 * std::sqrt(2.0));
}

TEST(Svec, OrderingIsDiagonalFirst) {
  DenseMatrix m(3, 3);
  m << 1, 4, 5, 4, 2, 6, 5, 6, 3;
  const Vector y = svec(SymMatrix::from_upper(m));
  const double r2 = std::sqrt(2.0);
  EXPECT_DOUBLE_EQ(y(0), 1);
  EXPECT_DOUBLE_EQ(y(1), 2);
  EXPECT_DOUBLE_EQ(y(2), 3);
  EXPECT_DOUBLE_EQ(y(3), 4 * r2);  // E_12
  EXPECT_DOUBLE_EQ(y(4), 5 * r2);  // E_13
  EXPECT_DOUBLE_EQ(y(5), 6 * r2);  // E_23
}

TEST(Smat, InvertsSvec) {
  EXPECT_EQ(smat(Eigen::Vector3d(1, 1, 0)), SymMatrix::identity(2));
  EXPECT_EQ(smat(Eigen::Vector3d(0, 0, std::sqrt(2.0))), sym2(0, 1, 0));
}

TEST(Smat, RejectsNonTriangularLength) {
  try {
    smat(Vector::Zero(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonTriangularLength);
  }
}

TEST(SvecProperty, RoundTripAndIsometry) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index k = 1 + trial % 8;
    const SymMatrix s = testing::random_sym(rng, k);
    const SymMatrix t = testing::random_sym(rng, k);
    const SymMatrix back = smat(svec(s));
    for (Index i = 0; i < k; ++i)
      for (Index j = i; j < k; ++j)
        if (i == j) EXPECT_EQ(back(i, j), s(i, j));
        else EXPECT_NEAR(back(i, j), s(i, j), 4e-16 * std::abs(s(i, j)));
    const double scale = s.dense().norm() * t.dense().norm();
    EXPECT_LE(std::abs(inner(s, t) - svec(s).dot(svec(t))), 1e-12 * scale);
  }
}

TEST(EigSym, DiagonalAndSwap) {
  auto e = eig_sym(sym2(3, 0, -2));
  EXPECT_DOUBLE_EQ(e.values(0), -2);
  EXPECT_DOUBLE_EQ(e.values(1), 3);
  e = eig_sym(sym2(0, 1, 0));
  EXPECT_NEAR(e.values(0), -1, 1e-15);
  EXPECT_NEAR(e.values(1), 1, 1e-15);
  e = eig_sym(SymMatrix(4));
  EXPECT_EQ(e.values, Vector::Zero(4));
}

TEST(EigSym, ReconstructionAndOrthonormality) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Index k = 1 + trial % 10;
    const SymMatrix s = testing::random_sym(rng, k);
    const auto e = eig_sym(s);
    const DenseMatrix rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE(max_abs(rec - s.dense()), 1e-12 * (1.0 + max_abs(s.dense())));
    EXPECT_LE(max_abs(e.vectors.transpose() * e.vectors - DenseMatrix::Identity(k, k)), 1e-12);
    for (Index i = 1; i < k; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  }
}

TEST(MinEig, Examples) {
  EXPECT_DOUBLE_EQ(min_eig(sym2(3, 0, -2)), -2);
  EXPECT_DOUBLE_EQ(min_eig(SymMatrix::identity(3)), 1);
  EXPECT_NEAR(min_eig(sym2(1, 2, 1)), -1, 1e-15);
}

TEST(ProjectPsd, Examples) {
  EXPECT_EQ(project_psd(sym2(3, 0, -2)), sym2(3, 0, 0));
  const SymMatrix neg = SymMatrix::identity(3) * -1.0;
  EXPECT_EQ(max_abs(project_psd(neg).dense()), 0.0);
  std::mt19937_64 rng(5);
  const SymMatrix p = testing::random_psd(rng, 4);
  EXPECT_LE(max_abs(project_psd(p).dense() - p.dense()), 1e-12 * max_abs(p.dense()));
}

TEST(ProjectPsd, PsdIdempotentAndNearestAmongClippings) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Index k = 2 + trial % 6;
    const SymMatrix s = testing::random_sym(rng, k);
    const SymMatrix p = project_psd(s);
    EXPECT_GE(min_eig(p), -1e-12);
    EXPECT_LE(max_abs(project_psd(p).dense() - p.dense()), 1e-12 * (1 + max_abs(p.dense())));
    // Clipping at any threshold >= 0 is never closer than clipping at 0.
    const auto e = eig_sym(s);
    const double best = (p - s).dense().norm();
    for (double thr : {0.1, 0.5, 1.0}) {
      Vector clipped = e.values;
      for (Index i = 0; i < k; ++i)
        if (clipped(i) < thr) clipped(i) = 0.0;
      const DenseMatrix other = e.vectors * clipped.asDiagonal() * e.vectors.transpose();
      EXPECT_LE(best, (other - s.dense()).norm() + 1e-12);
    }
  }
}

TEST(RankFactor, Examples) {
  EXPECT_EQ(rank_factor(DenseMatrix::Ones(2, 2)).rank, 1);
  EXPECT_EQ(rank_factor(DenseMatrix::Identity(3, 3)).rank, 3);
  DenseMatrix m_eps(4, 4);
  const double e = 0.3;
  m_eps << 2 - e, 2 - e, e, e, e, 2 - e, 2 - e, e, e, e, 2 - e, 2 - e, 2 - e, e, e, 2 - e;
  EXPECT_EQ(rank_factor(m_eps).rank, 3);
  EXPECT_EQ(rank_factor(DenseMatrix::Zero(3, 2)).rank, 0);
}

TEST(RankFactor, ResidualOnPlantedLowRank) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const Index p = 3 + trial % 7, q = 2 + (trial * 3) % 9, r = 1 + trial % std::min(p, q);
    const DenseMatrix m = testing::gaussian(rng, p, r) * testing::gaussian(rng, r, q);
    const auto f = rank_factor(m);
    EXPECT_EQ(f.rank, r);
    const double smax = svd_jacobi(m).sigma(0);
    EXPECT_LE(f.residual, 10 * kDefaultRankTol * smax);
    EXPECT_EQ(f.u.cols(), r);
  }
}

TEST(RankFactor, OnesFirst) {
  std::mt19937_64 rng(13);
  DenseMatrix m = testing::random_nonneg_rank(rng, 7, 5, 3);
  for (Index i = 0; i < m.rows(); ++i) m.row(i) /= m.row(i).sum();
  const auto f = rank_factor(m, kDefaultRankTol, true);
  EXPECT_EQ(f.rank, 3);
  EXPECT_EQ(f.u.col(0), Vector::Ones(7));
  EXPECT_LE(f.residual, 1e-12);
}

TEST(RankFactor, OnesNotInSpan) {
  DenseMatrix m = DenseMatrix::Zero(3, 2);
  m(0, 0) = 1;
  m(1, 1) = 1;
  try {
    rank_factor(m, kDefaultRankTol, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OnesNotInSpan);
  }
}

}  // namespace
}  // namespace psdrank
