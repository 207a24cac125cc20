#pragma once

// Polytopes, polyhedra and their (generalized) slack matrices.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "psdrank/lmifeas.hpp"
#include "psdrank/symcore.hpp"

namespace psdrank {

inline constexpr double kSlackTol = 1e-10;

// Dense matrix with finite, entrywise nonnegative entries.
class NonnegMatrix {
 public:
  NonnegMatrix() = default;
  explicit NonnegMatrix(DenseMatrix m) : m_(std::move(m)) {
    require_finite(m_, "nonnegative matrix");
    if (m_.size() > 0 && m_.minCoeff() < 0.0) throw Error(ErrorCode::InvalidInput, "matrix has negative entries");
  }

  const DenseMatrix& matrix() const { return m_; }
  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  NonnegMatrix transpose() const { return NonnegMatrix(m_.transpose()); }

 private:
  DenseMatrix m_;
};

struct VPolytope {
  Index n = 0;
  std::vector<Vector> vertices;
  bool verified = false;  // redundant points removed

  VPolytope() = default;
  explicit VPolytope(std::vector<Vector> pts, bool extreme_checked = false) : vertices(std::move(pts)), verified(extreme_checked) {
    if (vertices.empty()) throw Error(ErrorCode::InvalidInput, "polytope needs at least one vertex");
    n = vertices.front().size();
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i].size() != n) throw Error(ErrorCode::DimensionMismatch, "vertex dimensions differ", i);
      if (!vertices[i].allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite vertex", i);
      for (std::size_t j = 0; j < i; ++j)
        if (vertices[i] == vertices[j]) throw Error(ErrorCode::InvalidInput, "duplicate vertex", i);
    }
  }

  static VPolytope from_rows(const DenseMatrix& rows) {
    std::vector<Vector> pts;
    for (Index i = 0; i < rows.rows(); ++i) pts.emplace_back(rows.row(i).transpose());
    return VPolytope(std::move(pts));
  }

  std::size_t size() const { return vertices.size(); }
};

struct Inequality {
  Vector c;  // c^T x <= d
  double d = 0.0;
};

struct HPolyhedron {
  Index n = 0;
  std::vector<Inequality> inequalities;

  HPolyhedron() = default;
  HPolyhedron(Index dim, std::vector<Inequality> rows) : n(dim), inequalities(std::move(rows)) {
    for (std::size_t j = 0; j < inequalities.size(); ++j) {
      const auto& q = inequalities[j];
      if (q.c.size() != n) throw Error(ErrorCode::DimensionMismatch, "inequality dimension", j);
      if (!q.c.allFinite() || !std::isfinite(q.d)) throw Error(ErrorCode::InvalidInput, "non-finite inequality", j);
      if (q.c.isZero(0.0) && q.d < 0.0) throw Error(ErrorCode::InvalidInput, "trivially infeasible inequality 0 <= d < 0", j);
    }
  }

  std::size_t size() const { return inequalities.size(); }

  bool contains(const Vector& x, double tol = kSlackTol) const {
    for (const auto& q : inequalities)
      if (q.d - q.c.dot(x) < -tol) return false;
    return true;
  }
};

// Inner polytope P, outer polyhedron Q and the normalization that produced
// them from a nonnegative matrix. slack_matrix(P, Q) reproduces `normalized`.
struct NestedPair {
  VPolytope p;
  HPolyhedron q;
  Vector row_scalings;     // normalized row i = source row kept_rows[i] * row_scalings(i)
  Vector translation;      // source coordinates were shifted by -translation
  DenseMatrix linear;      // then mapped by this matrix
  std::vector<Index> kept_rows, kept_cols;
  Index source_rows = 0, source_cols = 0;
  DenseMatrix normalized;  // stripped, row-scaled source matrix
};

inline double slack_tolerance(const Inequality& q, double radius) {
  return kSlackTol * std::max({1.0, std::abs(q.d), q.c.norm() * radius});
}

// Entry (i, j) is d_j - c_j^T p_i. Slacks down to -1e-10 (relative to the
// inequality's scale over P) are clipped to zero; anything lower is NotNested.
inline NonnegMatrix slack_matrix(const VPolytope& p, const HPolyhedron& q) {
  if (p.n != q.n) throw Error(ErrorCode::DimensionMismatch, "polytope and polyhedron live in different dimensions");
  double radius = 0.0;
  for (const auto& v : p.vertices) radius = std::max(radius, v.norm());
  DenseMatrix s(static_cast<Index>(p.size()), static_cast<Index>(q.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      const auto& ineq = q.inequalities[j];
      double v = ineq.d - ineq.c.dot(p.vertices[i]);
      if (v < 0.0) {
        if (v < -slack_tolerance(ineq, radius)) throw Error(ErrorCode::NotNested, "vertex violates inequality", i);
        v = 0.0;
      }
      s(static_cast<Index>(i), static_cast<Index>(j)) = v;
    }
  }
  return NonnegMatrix(std::move(s));
}

// Rows are cyclic shifts of (2-e, 2-e, e, e): the slack matrix of the
// (1-e)-scaled +-1 square inside the +-1 square.
inline NonnegMatrix make_m_epsilon(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorCode::DomainError, "epsilon must lie in [0, 1]");
  const double hi = 2.0 - eps, lo = eps;
  DenseMatrix m(4, 4);
  m << hi, hi, lo, lo,
       lo, hi, hi, lo,
       lo, lo, hi, hi,
       hi, lo, lo, hi;
  return NonnegMatrix(std::move(m));
}

namespace geom2 {

inline double cross(const Vector& o, const Vector& a, const Vector& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

// Indices of the strict convex hull in counterclockwise order (monotone chain).
inline std::vector<std::size_t> hull_indices(const std::vector<Vector>& pts, double tol = 1e-12) {
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pts[a](0) < pts[b](0) || (pts[a](0) == pts[b](0) && pts[a](1) < pts[b](1));
  });
  if (idx.size() < 3) return idx;
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = tol * std::max(1.0, scale * scale);
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t i : idx) {
    while (k >= 2 && cross(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
    const std::size_t i = idx[t];
    while (k >= lower && cross(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

inline double signed_area(const std::vector<Vector>& ring) {
  double a = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vector& p = ring[i];
    const Vector& q = ring[(i + 1) % ring.size()];
    a += p(0) * q(1) - p(1) * q(0);
  }
  return 0.5 * a;
}

}  // namespace geom2

// Facet description of a full-dimensional polygon, one inequality per hull
// edge in counterclockwise order, with unit outer normals.
inline HPolyhedron polygon_facets(const VPolytope& p) {
  if (p.n != 2) throw Error(ErrorCode::DimensionMismatch, "polygon_facets needs points in the plane");
  const auto h = geom2::hull_indices(p.vertices);
  if (h.size() < 3) throw Error(ErrorCode::InvalidInput, "polygon is not full-dimensional");
  std::vector<Inequality> rows;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Vector& a = p.vertices[h[i]];
    const Vector& b = p.vertices[h[(i + 1) % h.size()]];
    Vector normal(2);
    normal << b(1) - a(1), a(0) - b(0);
    normal.normalize();
    rows.push_back({normal, normal.dot(a)});
  }
  return HPolyhedron(2, std::move(rows));
}

// Vertices of a bounded planar polyhedron, counterclockwise.
inline VPolytope polygon_vertices(const HPolyhedron& q, double tol = 1e-9) {
  if (q.n != 2) throw Error(ErrorCode::DimensionMismatch, "polygon_vertices needs a planar polyhedron");
  std::vector<Vector> cand;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      Eigen::Matrix2d a;
      a << q.inequalities[i].c.transpose(), q.inequalities[j].c.transpose();
      if (std::abs(a.determinant()) < 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff())) continue;
      const Vector x = a.partialPivLu().solve(Eigen::Vector2d(q.inequalities[i].d, q.inequalities[j].d));
      if (!q.contains(x, tol)) continue;
      bool dup = false;
      for (const auto& c : cand) dup = dup || (c - x).norm() <= tol * std::max(1.0, x.norm());
      if (!dup) cand.push_back(x);
    }
  }
  if (cand.empty()) throw Error(ErrorCode::InvalidInput, "polyhedron has no vertices");
  std::vector<Vector> ordered;
  for (std::size_t i : geom2::hull_indices(cand)) ordered.push_back(cand[i]);
  return VPolytope(std::move(ordered), true);
}

// True iff the origin lies in the interior of conv(P). In the plane this is a
// winding test against the hull; in higher dimension an LMI over the convex
// weights asks for a strictly positive combination summing to the origin.
inline bool origin_in_interior(const VPolytope& p) {
  if (p.n == 2) {
    const auto h = geom2::hull_indices(p.vertices);
    if (h.size() < 3) return false;
    const Vector zero = Vector::Zero(2);
    double scale = 0.0;
    for (const auto& v : p.vertices) scale = std::max(scale, v.norm());
    for (std::size_t i = 0; i < h.size(); ++i)
      if (geom2::cross(p.vertices[h[i]], p.vertices[h[(i + 1) % h.size()]], zero) <= 1e-12 * scale * scale) return false;
    return true;
  }
  const Index v = static_cast<Index>(p.size());
  DenseMatrix diffs(p.n, std::max<Index>(v - 1, 0));
  for (Index i = 1; i < v; ++i) diffs.col(i - 1) = p.vertices[static_cast<std::size_t>(i)] - p.vertices[0];
  if (v - 1 < p.n || numerical_rank(diffs, 1e-12) < p.n) return false;

  // Weights lambda = lambda0 + N z with sum(lambda) = 1 and sum(lambda_i p_i) = 0.
  DenseMatrix eq(p.n + 1, v);
  for (Index i = 0; i < v; ++i) {
    eq.block(0, i, p.n, 1) = p.vertices[static_cast<std::size_t>(i)];
    eq(p.n, i) = 1.0;
  }
  Vector rhs = Vector::Zero(p.n + 1);
  rhs(p.n) = 1.0;
  const Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(eq);
  const Vector lambda0 = cod.solve(rhs);
  if ((eq * lambda0 - rhs).cwiseAbs().maxCoeff() > 1e-9) return false;
  const Svd s = svd_jacobi(eq.transpose() * eq);
  Index rank = 0;
  for (Index i = 0; i < s.sigma.size(); ++i)
    if (s.sigma(i) > 1e-12 * s.sigma(0)) ++rank;
  const DenseMatrix null = s.v.rightCols(v - rank);
  LmiProblem lmi(null.cols());
  for (Index i = 0; i < v; ++i) lmi.add_scalar(lambda0(i), null.row(i).transpose());
  const FeasResult r = solve(lmi);
  return r.status == FeasStatus::Feasible && r.margin > 1e-9;
}

// {y : p_i^T y <= 1}.
inline HPolyhedron polar(const VPolytope& p) {
  if (!origin_in_interior(p)) throw Error(ErrorCode::OriginNotInterior, "origin is not interior to the polytope");
  std::vector<Inequality> rows;
  for (const auto& v : p.vertices) rows.push_back({v, 1.0});
  return HPolyhedron(p.n, std::move(rows));
}

// conv{c_j / d_j}; requires every d_j > 0 (origin strictly inside Q).
inline VPolytope polar(const HPolyhedron& q) {
  std::vector<Vector> pts;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto& row = q.inequalities[j];
    if (!(row.d > 0.0)) throw Error(ErrorCode::OriginNotInterior, "inequality does not strictly contain the origin", j);
    pts.push_back(row.c / row.d);
  }
  return VPolytope(std::move(pts));
}

// Planar only: the recession cone {x : c_j^T x <= 0} is {0} iff the normals
// positively span the plane, i.e. every angular gap between them is < pi.
inline bool is_bounded(const HPolyhedron& q) {
  if (q.n != 2) throw Error(ErrorCode::DimensionMismatch, "is_bounded is implemented for planar polyhedra");
  std::vector<double> angles;
  for (const auto& row : q.inequalities)
    if (!row.c.isZero(0.0)) angles.push_back(std::atan2(row.c(1), row.c(0)));
  if (angles.size() < 3) return false;
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return gap < std::numbers::pi - 1e-12;
}

// Drops points that are not extreme. Planar input goes through the hull;
// otherwise each point is tested for membership in the hull of the rest.
inline VPolytope reduce_to_extreme(const VPolytope& p) {
  if (p.n == 2 && p.size() >= 3) {
    std::vector<Vector> keep;
    for (std::size_t i : geom2::hull_indices(p.vertices)) keep.push_back(p.vertices[i]);
    if (keep.size() >= 3) return VPolytope(std::move(keep), true);
  }
  std::vector<Vector> keep;
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::vector<Vector> others;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (i != k) others.push_back(p.vertices[i] - p.vertices[k]);
    bool redundant = false;
    if (!others.empty()) {
      // 0 in conv(others): lambda >= 0, sum lambda = 1, sum lambda (p_i - p_k) = 0.
      const Index v = static_cast<Index>(others.size());
      DenseMatrix eq(p.n + 1, v);
      for (Index i = 0; i < v; ++i) {
        eq.block(0, i, p.n, 1) = others[static_cast<std::size_t>(i)];
        eq(p.n, i) = 1.0;
      }
      Vector rhs = Vector::Zero(p.n + 1);
      rhs(p.n) = 1.0;
      const Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(eq);
      const Vector lambda0 = cod.solve(rhs);
      if ((eq * lambda0 - rhs).cwiseAbs().maxCoeff() <= 1e-9) {
        const Svd s = svd_jacobi(eq.transpose() * eq);
        Index rank = 0;
        for (Index i = 0; i < s.sigma.size(); ++i)
          if (s.sigma(i) > 1e-12 * s.sigma(0)) ++rank;
        const DenseMatrix null = s.v.rightCols(v - rank);
        LmiProblem lmi(null.cols());
        for (Index i = 0; i < v; ++i) lmi.add_scalar(lambda0(i), null.row(i).transpose());
        redundant = solve(lmi).status == FeasStatus::Feasible;
      }
    }
    if (!redundant) keep.push_back(p.vertices[k]);
  }
  return VPolytope(std::move(keep), true);
}

// Builds P = conv(u_i), Q = {x : (1, x^T) V >= 0} from a rank factorization
// M = UV with rows of U equal to (1, u_i^T), after stripping zero rows and
// columns and scaling rows to unit sum. The pair is then centered at the
// vertex centroid and whitened (unit vertex covariance), which keeps
// downstream systems well conditioned without changing the slack matrix.
inline NestedPair pair_from_matrix(const NonnegMatrix& m, Index expected_rank = 3, double tol = kDefaultRankTol) {
  const DenseMatrix& a = m.matrix();
  const double top = max_abs(a);
  if (top == 0.0) throw Error(ErrorCode::ZeroMatrix, "matrix is zero");
  NestedPair pair;
  pair.source_rows = a.rows();
  pair.source_cols = a.cols();
  for (Index i = 0; i < a.rows(); ++i)
    if (a.row(i).maxCoeff() > 0.0) pair.kept_rows.push_back(i);
  for (Index j = 0; j < a.cols(); ++j)
    if (a.col(j).maxCoeff() > 0.0) pair.kept_cols.push_back(j);

  const Index p = static_cast<Index>(pair.kept_rows.size()), q = static_cast<Index>(pair.kept_cols.size());
  DenseMatrix n(p, q);
  pair.row_scalings.resize(p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < q; ++j) n(i, j) = a(pair.kept_rows[static_cast<std::size_t>(i)], pair.kept_cols[static_cast<std::size_t>(j)]);
    pair.row_scalings(i) = 1.0 / n.row(i).sum();
    n.row(i) *= pair.row_scalings(i);
  }
  pair.normalized = n;

  const Index r = numerical_rank(n, tol);
  if (r != expected_rank)
    throw Error(ErrorCode::RankMismatch, "expected rank " + std::to_string(expected_rank) + ", got " + std::to_string(r));
  const RankFactorization f = rank_factor(n, tol, true);
  const Index dim = r - 1;

  DenseMatrix u = f.u.rightCols(dim);  // p x dim
  const Vector centroid = u.colwise().mean().transpose();
  const DenseMatrix centered = u.rowwise() - centroid.transpose();
  const SymMatrix cov = SymMatrix::symmetrize(centered.transpose() * centered / static_cast<double>(p));
  const SymEigen ce = eig_sym(cov);
  if (ce.values(0) <= 1e-14 * std::max(1.0, ce.values(dim - 1)))
    throw Error(ErrorCode::RankMismatch, "vertex set is not full-dimensional");
  const DenseMatrix whiten = ce.vectors * ce.values.cwiseSqrt().cwiseInverse().asDiagonal() * ce.vectors.transpose();
  const DenseMatrix unwhiten = ce.vectors * ce.values.cwiseSqrt().asDiagonal() * ce.vectors.transpose();

  std::vector<Vector> verts;
  for (Index i = 0; i < p; ++i) verts.push_back(whiten * centered.row(i).transpose());
  std::vector<Inequality> rows;
  for (Index j = 0; j < q; ++j) {
    // (1, x^T) v_j >= 0  <=>  (-v_j[1:])^T x <= v_j[0].
    const Vector c = -f.v.col(j).tail(dim);
    const double d = f.v(0, j);
    rows.push_back({unwhiten * c, d - c.dot(centroid)});
  }
  pair.p = VPolytope(std::move(verts));
  pair.q = HPolyhedron(dim, std::move(rows));
  pair.translation = centroid;
  pair.linear = whiten;
  return pair;
}

inline NonnegMatrix reconstruct(const NestedPair& pair) { return slack_matrix(pair.p, pair.q); }

}  // namespace psdrank
