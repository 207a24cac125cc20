#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "psdrank/polyform.hpp"
#include "test_support.hpp"

namespace psdrank {
namespace {

Vector v2(double x, double y) { return Eigen::Vector2d(x, y); }

VPolytope square(double s) { return VPolytope({v2(s, s), v2(-s, s), v2(-s, -s), v2(s, -s)}); }

HPolyhedron square_facets() {
  return HPolyhedron(2, {{v2(1, 0), 1}, {v2(0, 1), 1}, {v2(-1, 0), 1}, {v2(0, -1), 1}});
}

bool is_row_permutation(const DenseMatrix& a, const DenseMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  // Compare sorted rows as multisets of sorted entries.
  auto canon = [](const DenseMatrix& m) {
    std::vector<std::vector<double>> rows;
    for (Index i = 0; i < m.rows(); ++i) {
      std::vector<double> r(m.row(i).data(), m.row(i).data() + 0);
      for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
      std::sort(r.begin(), r.end());
      rows.push_back(r);
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  const auto ca = canon(a), cb = canon(b);
  for (std::size_t i = 0; i < ca.size(); ++i)
    for (std::size_t j = 0; j < ca[i].size(); ++j)
      if (std::abs(ca[i][j] - cb[i][j]) > tol) return false;
  return true;
}

TEST(SlackMatrix, UnitTriangle) {
  const VPolytope tri({v2(0, 0), v2(1, 0), v2(0, 1)});
  const HPolyhedron facets(2, {{v2(-1, 0), 0}, {v2(0, -1), 0}, {v2(1, 1), 1}});
  DenseMatrix expect(3, 3);
  expect << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  EXPECT_EQ(slack_matrix(tri, facets).matrix(), expect);
}

TEST(SlackMatrix, SquareInsideItself) {
  const DenseMatrix s = slack_matrix(square(1.0), square_facets()).matrix();
  for (Index i = 0; i < 4; ++i) {
    std::vector<double> row(s.row(i).data(), s.row(i).data());
    for (Index j = 0; j < 4; ++j) row.push_back(s(i, j));
    std::sort(row.begin(), row.end());
    EXPECT_EQ(row, (std::vector<double>{0, 0, 2, 2}));
  }
}

TEST(SlackMatrix, PointInHalfLine) {
  const VPolytope pt({Vector::Zero(1)});
  const HPolyhedron half(1, {{Vector::Ones(1), 1.0}});
  EXPECT_EQ(slack_matrix(pt, half).matrix(), DenseMatrix::Ones(1, 1));
}

TEST(SlackMatrix, NotNestedAndClipping) {
  const HPolyhedron half(1, {{Vector::Ones(1), 1.0}});
  try {
    slack_matrix(VPolytope({Vector::Constant(1, 1.5)}), half);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNested);
    EXPECT_EQ(e.index(), 0u);
  }
  EXPECT_EQ(slack_matrix(VPolytope({Vector::Constant(1, 1.0 + 1e-13)}), half).matrix()(0, 0), 0.0);
}

TEST(HPolyhedron, RejectsTriviallyInfeasibleRow) {
  EXPECT_THROW(HPolyhedron(2, {{Vector::Zero(2), -1.0}}), Error);
  EXPECT_NO_THROW(HPolyhedron(2, {{Vector::Zero(2), 1.0}}));
}

TEST(MEpsilon, Values) {
  DenseMatrix zero(4, 4);
  zero << 2, 2, 0, 0, 0, 2, 2, 0, 0, 0, 2, 2, 2, 0, 0, 2;
  EXPECT_EQ(make_m_epsilon(0.0).matrix(), zero);
  EXPECT_EQ(make_m_epsilon(1.0).matrix(), DenseMatrix::Ones(4, 4));
  const DenseMatrix half = make_m_epsilon(0.5).matrix();
  EXPECT_EQ(half.row(0), Eigen::RowVector4d(1.5, 1.5, 0.5, 0.5));
  EXPECT_EQ(half.row(2), Eigen::RowVector4d(0.5, 0.5, 1.5, 1.5));
  EXPECT_THROW(make_m_epsilon(-0.1), Error);
  EXPECT_THROW(make_m_epsilon(1.1), Error);
}

TEST(MEpsilon, MatchesScaledSquareSlack) {
  for (double e : {0.0, 0.2, 0.3, 0.7}) {
    const DenseMatrix s = slack_matrix(square(1.0 - e), square_facets()).matrix();
    EXPECT_TRUE(is_row_permutation(s, make_m_epsilon(e).matrix(), 1e-14)) << e;
  }
}

TEST(MEpsilon, RankThreeUntilOne) {
  for (int i = 0; i < 20; ++i) EXPECT_EQ(numerical_rank(make_m_epsilon(0.05 * i).matrix()), 3) << i;
  EXPECT_EQ(numerical_rank(make_m_epsilon(1.0).matrix()), 1);
}

TEST(Polar, SquareGivesDiamond) {
  const HPolyhedron h = polar(square(1.0));
  ASSERT_EQ(h.size(), 4u);
  for (const auto& row : h.inequalities) {
    EXPECT_EQ(row.d, 1.0);
    EXPECT_EQ(row.c.cwiseAbs(), v2(1, 1));
  }
  const VPolytope back = polygon_vertices(h);
  ASSERT_EQ(back.size(), 4u);
  for (const auto& v : back.vertices) EXPECT_NEAR(v.cwiseAbs().sum(), 1.0, 1e-12);
}

TEST(Polar, OriginOutside) {
  const VPolytope tri({v2(1, 1), v2(2, 1), v2(1, 2)});
  try {
    polar(tri);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OriginNotInterior);
  }
  // Origin on the boundary is not interior either.
  EXPECT_THROW(polar(VPolytope({v2(0, 0), v2(1, 0), v2(0, 1)})), Error);
}

TEST(Polar, HigherDimensionalInteriorTest) {
  std::vector<Vector> cube;
  for (int m = 0; m < 8; ++m) cube.push_back(Eigen::Vector3d(m & 1 ? 1 : -1, m & 2 ? 1 : -1, m & 4 ? 1 : -1));
  EXPECT_TRUE(origin_in_interior(VPolytope(cube)));
  EXPECT_EQ(polar(VPolytope(cube)).size(), 8u);
  std::vector<Vector> shifted;
  for (const auto& c : cube) shifted.push_back(c + Eigen::Vector3d(1, 0, 0));
  EXPECT_FALSE(origin_in_interior(VPolytope(shifted)));
  // Flat set in R^3.
  EXPECT_FALSE(origin_in_interior(VPolytope({Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 1, 0), Eigen::Vector3d(-1, -1, 0)})));
}

TEST(PolarProperty, DoublePolarRecoversVertices) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), rad(0.5, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vector> pts;
    for (int i = 0; i < 3 + trial % 8; ++i) {
      const double a = ang(rng), r = rad(rng);
      pts.push_back(v2(r * std::cos(a), r * std::sin(a)));
    }
    VPolytope p = reduce_to_extreme(VPolytope(pts));
    if (!origin_in_interior(p)) continue;
    const VPolytope dual = polygon_vertices(polar(p));
    const VPolytope back = polygon_vertices(polar(dual));
    ASSERT_EQ(back.size(), p.size());
    for (const auto& v : p.vertices) {
      double best = 1e9;
      for (const auto& w : back.vertices) best = std::min(best, (v - w).norm());
      EXPECT_LE(best, 1e-9);
    }
  }
}

TEST(IsBounded, Examples) {
  EXPECT_TRUE(is_bounded(square_facets()));
  EXPECT_FALSE(is_bounded(HPolyhedron(2, {{v2(1, 0), 1}})));
  EXPECT_FALSE(is_bounded(HPolyhedron(2, {{v2(1, 0), 1}, {v2(-1, 0), 1}, {v2(0, 1), 1}})));
  EXPECT_TRUE(is_bounded(HPolyhedron(2, {{v2(-1, 0), 0}, {v2(0, -1), 0}, {v2(1, 1), 1}})));
}

TEST(ReduceToExtreme, DropsInteriorAndEdgePoints) {
  const VPolytope p({v2(0, 0), v2(2, 0), v2(0, 2), v2(1, 0), v2(0.3, 0.3)});
  const VPolytope r = reduce_to_extreme(p);
  EXPECT_EQ(r.size(), 3u);
  EXPECT_TRUE(r.verified);
  const VPolytope r3 = reduce_to_extreme(VPolytope({Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0),
                                                    Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(0.1, 0.1, 0.1)}));
  EXPECT_EQ(r3.size(), 4u);
}

TEST(PairFromMatrix, MEpsilon) {
  const NonnegMatrix m = make_m_epsilon(0.3);
  const NestedPair pair = pair_from_matrix(m);
  EXPECT_EQ(pair.p.n, 2);
  EXPECT_LE(max_abs(reconstruct(pair).matrix() - pair.normalized), 1e-9);
  EXPECT_LE(max_abs(pair.normalized - m.matrix() / 4.0), 1e-15);
  EXPECT_TRUE(is_bounded(pair.q));
  // Every vertex touches exactly two inequalities with slack 0.3/4 and two with 1.7/4,
  // and the centroid of P is the origin.
  Vector mean = Vector::Zero(2);
  for (const auto& v : pair.p.vertices) mean += v / 4.0;
  EXPECT_LE(mean.norm(), 1e-12);
  // The outer square's vertices are images of (±1, ±1): ratio of P to Q is 0.7.
  const VPolytope outer = polygon_vertices(pair.q);
  ASSERT_EQ(outer.size(), 4u);
  double rp = 0, rq = 0;
  for (const auto& v : pair.p.vertices) rp += v.norm();
  for (const auto& v : outer.vertices) rq += v.norm();
  EXPECT_NEAR(rp / rq, 0.7, 1e-12);
}

TEST(PairFromMatrix, TriangleSlack) {
  DenseMatrix s(3, 3);
  s << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  const NestedPair pair = pair_from_matrix(NonnegMatrix(s));
  EXPECT_LE(max_abs(reconstruct(pair).matrix() - s), 1e-9);
  // P = Q: each vertex of P is a vertex of Q.
  const VPolytope outer = polygon_vertices(pair.q);
  ASSERT_EQ(outer.size(), 3u);
  for (const auto& v : pair.p.vertices) {
    double best = 1e9;
    for (const auto& w : outer.vertices) best = std::min(best, (v - w).norm());
    EXPECT_LE(best, 1e-9);
  }
}

TEST(PairFromMatrix, Errors) {
  try {
    pair_from_matrix(NonnegMatrix(DenseMatrix::Ones(3, 3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankMismatch);
  }
  EXPECT_THROW(pair_from_matrix(NonnegMatrix(DenseMatrix::Zero(3, 3))), Error);
}

TEST(PairFromMatrix, StripsZeroRowsAndColumns) {
  DenseMatrix m = DenseMatrix::Zero(5, 6);
  m.block(0, 0, 4, 4) = make_m_epsilon(0.2).matrix();
  m.row(4).setZero();
  DenseMatrix shuffled(5, 6);
  shuffled << m.row(0), m.row(4), m.row(1), m.row(2), m.row(3);
  const NestedPair pair = pair_from_matrix(NonnegMatrix(shuffled));
  EXPECT_EQ(pair.kept_rows, (std::vector<Index>{0, 2, 3, 4}));
  EXPECT_EQ(pair.kept_cols, (std::vector<Index>{0, 1, 2, 3}));
  EXPECT_LE(max_abs(reconstruct(pair).matrix() - pair.normalized), 1e-9);
}

TEST(PairFromMatrixProperty, ReconstructsRandomRankThree) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Index p = 3 + trial % 9, q = 3 + (trial * 7) % 11;
    const DenseMatrix m = testing::random_nonneg_rank(rng, p, q, 3);
    const NestedPair pair = pair_from_matrix(NonnegMatrix(m));
    EXPECT_LE(max_abs(reconstruct(pair).matrix() - pair.normalized), 1e-9) << trial;
    for (Index i = 0; i < p; ++i) EXPECT_NEAR(pair.normalized.row(i).sum(), 1.0, 1e-12);
  }
}

TEST(SlackMatrixProperty, NonnegativeWhenNested) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vector> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(v2(u(rng), u(rng)));
    const NonnegMatrix s = slack_matrix(VPolytope(pts), square_facets());
    EXPECT_GE(s.matrix().minCoeff(), 0.0);
  }
}

}  // namespace
}  // namespace psdrank
