#pragma once

// Spectrahedral lifts: sets {proj * x : g(x) psd} with a linear pencil
// g(x) = x_1 G_1 + ... + x_m G_m + G_const.

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "psdrank/lmifeas.hpp"
#include "psdrank/polyform.hpp"
#include "psdrank/psdfact.hpp"
#include "psdrank/symcore.hpp"

namespace psdrank {

struct SpectraLift {
  Index k = 0;                 // pencil size
  Index n = 0;                 // target dimension
  std::vector<SymMatrix> g;    // m coefficient matrices followed by the constant term
  DenseMatrix proj;            // n x m

  SpectraLift() = default;
  SpectraLift(std::vector<SymMatrix> pencil, DenseMatrix projection) : g(std::move(pencil)), proj(std::move(projection)) {
    if (g.empty()) throw Error(ErrorCode::DimensionMismatch, "pencil needs at least the constant term");
    k = g.front().size();
    for (const auto& s : g)
      if (s.size() != k) throw Error(ErrorCode::DimensionMismatch, "pencil matrices differ in size");
    if (proj.cols() != vars()) throw Error(ErrorCode::DimensionMismatch, "projection columns must equal pencil variables");
    require_finite(proj, "projection");
    n = proj.rows();
  }

  Index vars() const { return static_cast<Index>(g.size()) - 1; }
  const SymMatrix& constant() const { return g.back(); }

  SymMatrix pencil(const Vector& x) const {
    if (x.size() != vars()) throw Error(ErrorCode::DimensionMismatch, "pencil argument length");
    DenseMatrix s = constant().dense();
    for (Index l = 0; l < vars(); ++l) s += x(l) * g[static_cast<std::size_t>(l)].dense();
    return SymMatrix::symmetrize(s);
  }

  // Groups of pencil indices that never interact: the union sparsity pattern
  // of all G's splits into these diagonal blocks.
  std::vector<std::vector<Index>> components() const {
    std::vector<Index> parent(static_cast<std::size_t>(k));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index i) {
      while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      return i;
    };
    for (const auto& s : g)
      for (Index i = 0; i < k; ++i)
        for (Index j = i + 1; j < k; ++j)
          if (s(i, j) != 0.0) parent[static_cast<std::size_t>(find(i))] = find(j);
    std::vector<std::vector<Index>> groups;
    std::vector<Index> slot(static_cast<std::size_t>(k), -1);
    for (Index i = 0; i < k; ++i) {
      const Index r = find(i);
      if (slot[static_cast<std::size_t>(r)] < 0) {
        slot[static_cast<std::size_t>(r)] = static_cast<Index>(groups.size());
        groups.emplace_back();
      }
      groups[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(i);
    }
    return groups;
  }

  // g(x) psd up to tol, checked block by block.
  bool contains(const Vector& x, double tol = 0.0) const {
    const SymMatrix s = pencil(x);
    for (const auto& grp : components()) {
      const Index m = static_cast<Index>(grp.size());
      DenseMatrix sub(m, m);
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) sub(i, j) = s(grp[static_cast<std::size_t>(i)], grp[static_cast<std::size_t>(j)]);
      if (min_eig(SymMatrix::from_upper(sub)) < -tol) return false;
    }
    return true;
  }
};

struct HexagonCanonical {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
  Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();  // T(x) = linear * x + offset
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  bool reversed = false;  // input was clockwise
  std::array<Index, 6> order{0, 1, 2, 3, 4, 5};  // canonical vertex t is input vertex order[t]

  Eigen::Vector2d apply(const Vector& x) const { return linear * x + offset; }
  Eigen::Vector2d unapply(const Vector& y) const { return linear.inverse() * (y - offset); }

  bool invariants_hold() const {
    return a > 0 && b > 0 && a + b > 1 && c < 0 && d > 0 && c + d < 1 && e > 0 && f < 0 && e + f < 1;
  }
};

struct Octahedron {
  std::array<Eigen::Vector3d, 6> vertices;
  double v1 = 0, v3 = 0, w2 = 0, w3 = 0;

  bool sign_conditions_hold() const { return v1 < 0 && v3 > 0 && w2 < 0 && w3 > 0 && v1 + v3 < 1 && w2 + w3 < 1; }
};

struct OctahedronLift {
  Octahedron octahedron;
  DenseMatrix proj;  // 2 x 3
};

inline HexagonCanonical normalize_hexagon(const VPolytope& hex) {
  if (hex.size() != 6) throw Error(ErrorCode::WrongVertexCount, "hexagon needs 6 vertices, got " + std::to_string(hex.size()));
  if (hex.n != 2) throw Error(ErrorCode::DimensionMismatch, "hexagon must be planar");
  HexagonCanonical hc;
  std::vector<Vector> ring = hex.vertices;
  double scale = 0.0;
  for (const auto& v : ring)
    for (const auto& w : ring) scale = std::max(scale, (v - w).norm());
  const double tol = 1e-12 * scale * scale;
  if (geom2::signed_area(ring) < 0.0) {
    hc.reversed = true;
    hc.order = {0, 5, 4, 3, 2, 1};
    std::vector<Vector> rev;
    for (Index t : hc.order) rev.push_back(hex.vertices[static_cast<std::size_t>(t)]);
    ring = rev;
  }
  // Straight angles are tolerated as long as the canonical frame stays strict.
  std::optional<std::size_t> straight;
  double turning = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const double turn = geom2::cross(ring[i], ring[(i + 1) % 6], ring[(i + 2) % 6]);
    const std::size_t at = static_cast<std::size_t>(hc.order[(i + 1) % 6]);
    if (turn < -tol) throw Error(ErrorCode::NotConvex, "reflex vertex", at);
    if (turn <= tol && !straight) straight = at;
    const Vector u = ring[(i + 1) % 6] - ring[i], w = ring[(i + 2) % 6] - ring[(i + 1) % 6];
    turning += std::atan2(u(0) * w(1) - u(1) * w(0), u.dot(w));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) throw Error(ErrorCode::NotConvex, "vertex sequence does not wind once");

  Eigen::Matrix2d basis;
  basis.col(0) = ring[0] - ring[4];
  basis.col(1) = ring[2] - ring[4];
  if (std::abs(basis.determinant()) <= tol) throw Error(ErrorCode::CollinearVertices, "vertices 1, 3 and 5 are collinear", static_cast<std::size_t>(hc.order[2]));
  hc.linear = basis.inverse();
  hc.offset = -hc.linear * Eigen::Vector2d(ring[4]);
  const Eigen::Vector2d p2 = hc.apply(ring[1]), p4 = hc.apply(ring[3]), p6 = hc.apply(ring[5]);
  hc.a = p2(0), hc.b = p2(1), hc.c = p4(0), hc.d = p4(1), hc.e = p6(0), hc.f = p6(1);
  if (!hc.invariants_hold()) {
    if (straight) throw Error(ErrorCode::CollinearVertices, "three consecutive vertices are collinear", *straight);
    throw Error(ErrorCode::NotConvex, "canonical position violates convexity");
  }
  return hc;
}

inline OctahedronLift hex_octahedron_lift(const HexagonCanonical& hc) {
  if (hc.a == 0.0 || hc.b == 0.0) throw Error(ErrorCode::DegenerateParameters, "a and b must be nonzero");
  Octahedron o;
  o.v1 = hc.c - hc.a * hc.d / hc.b;
  o.v3 = hc.d / hc.b;
  o.w2 = hc.f - hc.b * hc.e / hc.a;
  o.w3 = hc.e / hc.a;
  o.vertices = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0),   Eigen::Vector3d(0, 1, 0),
                Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(o.v1, 0, o.v3), Eigen::Vector3d(0, o.w2, o.w3)};
  DenseMatrix proj(2, 3);
  proj << 1, 0, hc.a, 0, 1, hc.b;
  return {o, proj};
}

// Canonical hexagon vertex (1..6 -> index 0..5) hit by each octahedron vertex.
inline constexpr std::array<Index, 6> kOctahedronToHexagon{4, 0, 2, 1, 3, 5};

struct Plane {
  Eigen::Vector3d normal;  // unit
  double offset = 0.0;     // normal . x = offset
  std::array<Index, 4> members{};
};

struct BiplanarResult {
  bool biplanar = false;
  std::vector<Plane> planes;
};

inline BiplanarResult is_biplanar(const Octahedron& o, double tol = 1e-9) {
  BiplanarResult res;
  double scale = 1.0;
  for (const auto& v : o.vertices) scale = std::max(scale, v.norm());
  for (Index i = 0; i < 6; ++i)
    for (Index j = i + 1; j < 6; ++j)
      for (Index k = j + 1; k < 6; ++k)
        for (Index l = k + 1; l < 6; ++l) {
          const auto& p = o.vertices;
          const Eigen::Vector3d u = p[j] - p[i], v = p[k] - p[i], w = p[l] - p[i];
          const double det = u.cross(v).dot(w);
          if (std::abs(det) > tol * scale * scale * scale) continue;
          // Pick the best conditioned normal among the subset's triangles.
          Eigen::Vector3d nrm = u.cross(v);
          if (u.cross(w).norm() > nrm.norm()) nrm = u.cross(w);
          if (v.cross(w).norm() > nrm.norm()) nrm = v.cross(w);
          if (nrm.norm() <= tol * scale * scale) continue;
          nrm.normalize();
          for (Index t = 0; t < 3; ++t)
            if (std::abs(nrm(t)) > 1e-12) {
              if (nrm(t) < 0) nrm = -nrm;
              break;
            }
          Plane pl{nrm, nrm.dot(p[i]), {i, j, k, l}};
          bool fresh = true;
          for (const auto& q : res.planes)
            if ((q.normal - pl.normal).norm() <= 1e-9 && std::abs(q.offset - pl.offset) <= 1e-9 * scale) fresh = false;
          if (fresh) res.planes.push_back(pl);
        }
  res.biplanar = res.planes.size() >= 2;
  return res;
}

// Lift of P ∩ {a0 + a.x >= 0}: one more diagonal entry carrying the inequality
// pulled back through the projection.
inline SpectraLift augment_facet(const SpectraLift& lift, double a0, const Vector& a) {
  if (a.size() != lift.n) throw Error(ErrorCode::DimensionMismatch, "inequality length differs from target dimension");
  const Vector pulled = lift.proj.transpose() * a;
  std::vector<SymMatrix> out;
  for (std::size_t l = 0; l < lift.g.size(); ++l) {
    DenseMatrix m = DenseMatrix::Zero(lift.k + 1, lift.k + 1);
    m.topLeftCorner(lift.k, lift.k) = lift.g[l].dense();
    m(lift.k, lift.k) = static_cast<Index>(l) < lift.vars() ? pulled(static_cast<Index>(l)) : a0;
    out.push_back(SymMatrix::from_upper(m));
  }
  return SpectraLift(std::move(out), lift.proj);
}

inline SpectraLift project_lift(const SpectraLift& lift, const DenseMatrix& map) {
  if (map.cols() != lift.n) throw Error(ErrorCode::DimensionMismatch, "map columns differ from target dimension");
  return SpectraLift(lift.g, map * lift.proj);
}

// Diagonal pencil diag(d_j - c_j . x) of a polyhedron; proj is the identity.
inline SpectraLift diagonal_lift(const HPolyhedron& q) {
  const Index m = static_cast<Index>(q.size());
  if (m == 0) throw Error(ErrorCode::DimensionMismatch, "polyhedron has no inequalities");
  std::vector<SymMatrix> g;
  for (Index l = 0; l < q.n; ++l) {
    Vector diag(m);
    for (Index j = 0; j < m; ++j) diag(j) = -q.inequalities[static_cast<std::size_t>(j)].c(l);
    g.push_back(SymMatrix::diagonal(diag));
  }
  Vector rhs(m);
  for (Index j = 0; j < m; ++j) rhs(j) = q.inequalities[static_cast<std::size_t>(j)].d;
  g.push_back(SymMatrix::diagonal(rhs));
  return SpectraLift(std::move(g), DenseMatrix::Identity(q.n, q.n));
}

// Facets of a full-dimensional 3-polytope whose facets are triangles, by
// testing every vertex triple. Outer unit normals.
inline HPolyhedron simplicial_facets_3d(const VPolytope& p, double tol = 1e-9) {
  if (p.n != 3) throw Error(ErrorCode::DimensionMismatch, "expected points in R^3");
  const std::size_t v = p.size();
  double scale = 1.0;
  for (const auto& x : p.vertices) scale = std::max(scale, x.norm());
  std::vector<Inequality> rows;
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j)
      for (std::size_t k = j + 1; k < v; ++k) {
        Eigen::Vector3d nrm = Eigen::Vector3d(p.vertices[j] - p.vertices[i]).cross(Eigen::Vector3d(p.vertices[k] - p.vertices[i]));
        if (nrm.norm() <= tol * scale * scale) continue;
        nrm.normalize();
        const double off = nrm.dot(p.vertices[i]);
        int above = 0, below = 0;
        for (std::size_t t = 0; t < v; ++t) {
          const double side = nrm.dot(p.vertices[t]) - off;
          if (side > tol * scale) ++above;
          if (side < -tol * scale) ++below;
        }
        if (above + below != static_cast<int>(v) - 3) continue;
        if (above == 0) rows.push_back({nrm, off});
        else if (below == 0) rows.push_back({-nrm, -off});
      }
  return HPolyhedron(3, std::move(rows));
}

// Unit disk as {(x, y) : [[1 + x, y], [y, 1 - x]] psd}.
inline SpectraLift disk_lift() {
  SymMatrix gx(2), gy(2);
  gx.set(0, 0, 1.0);
  gx.set(1, 1, -1.0);
  gy.set(0, 1, 1.0);
  return SpectraLift({gx, gy, SymMatrix::identity(2)}, DenseMatrix::Identity(2, 2));
}

namespace detail {

struct AffineSolution {
  Vector particular;
  DenseMatrix null_basis;  // orthonormal columns
  double miss = 0.0;       // |E * particular - f|_inf
};

// Least-squares solution and null space of E v = f via the symmetric eigensolver on E^T E.
inline AffineSolution solve_affine(const DenseMatrix& e, const Vector& f) {
  AffineSolution s;
  const Index m = e.cols();
  if (m == 0) {
    s.particular = Vector::Zero(0);
    s.null_basis = DenseMatrix::Zero(0, 0);
    s.miss = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    return s;
  }
  const SymEigen eg = eig_sym(SymMatrix::symmetrize(e.transpose() * e));
  const double top = std::max(eg.values.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Index> range, null;
  for (Index t = 0; t < m; ++t) (eg.values(t) > 1e-12 * top ? range : null).push_back(t);
  s.particular = Vector::Zero(m);
  const Vector rhs = e.transpose() * f;
  for (Index t : range) s.particular += eg.vectors.col(t) * (eg.vectors.col(t).dot(rhs) / eg.values(t));
  s.null_basis.resize(m, static_cast<Index>(null.size()));
  for (std::size_t c = 0; c < null.size(); ++c) s.null_basis.col(static_cast<Index>(c)) = eg.vectors.col(null[c]);
  s.miss = f.size() ? (e * s.particular - f).cwiseAbs().maxCoeff() : 0.0;
  return s;
}

// Finds v = base + N w with sum_l v_l mats[l] + offset psd; interior point when one exists.
inline std::optional<SymMatrix> psd_point_on_affine(const std::vector<SymMatrix>& mats, const SymMatrix& offset, const Vector& base,
                                                   const DenseMatrix& null_basis, double tol) {
  DenseMatrix at_base = offset.dense();
  for (std::size_t l = 0; l < mats.size(); ++l) at_base += base(static_cast<Index>(l)) * mats[l].dense();
  SymMatrix value = SymMatrix::symmetrize(at_base);
  const double scale = std::max(1.0, max_abs(value.dense()));
  if (null_basis.cols() > 0) {
    LmiProblem lmi(null_basis.cols());
    const std::size_t b = lmi.add_block(value.size());
    lmi.constant(b) = value;
    for (Index t = 0; t < null_basis.cols(); ++t) {
      DenseMatrix dir = DenseMatrix::Zero(value.size(), value.size());
      for (std::size_t l = 0; l < mats.size(); ++l) dir += null_basis(static_cast<Index>(l), t) * mats[l].dense();
      lmi.coeff(b, t) = SymMatrix::symmetrize(dir);
    }
    const FeasResult r = solve(lmi);
    if (r.status != FeasStatus::Feasible) return std::nullopt;
    value = lmi.evaluate(b, r.y);
  }
  if (min_eig(value) < -tol * scale) return std::nullopt;
  return project_psd(value);
}

}  // namespace detail

// Factorization of S_{P,Q} read off a lift of a convex set C with P ⊆ C ⊆ Q:
// row factors are pencil values at preimages of the vertices, column factors
// represent each facet inequality as a psd functional on the pencil.
inline PsdFactorization factorization_from_lift(const SpectraLift& lift, const VPolytope& p, const HPolyhedron& q) {
  if (p.n != lift.n || q.n != lift.n) throw Error(ErrorCode::DimensionMismatch, "lift, P and Q dimensions differ");
  constexpr double kFeasTol = 1e-9;
  PsdFactorization f;
  f.k = lift.k;
  std::vector<SymMatrix> coeffs(lift.g.begin(), lift.g.end() - 1);

  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vector& v = p.vertices[i];
    const detail::AffineSolution fiber = detail::solve_affine(lift.proj, v);
    if (fiber.miss > 1e-9 * std::max(1.0, v.cwiseAbs().maxCoeff()))
      throw Error(ErrorCode::VertexNotInLift, "vertex is outside the projection's range", i);
    const auto a = detail::psd_point_on_affine(coeffs, lift.constant(), fiber.particular, fiber.null_basis, kFeasTol);
    if (!a) throw Error(ErrorCode::VertexNotInLift, "no psd preimage found for vertex", i);
    f.a.push_back(*a);
  }

  // <G_l, B> = -(proj^T c)_l and <G_const, B> = d, written in svec coordinates.
  const Index len = svec_length(lift.k);
  DenseMatrix eq(lift.vars() + 1, len);
  for (Index l = 0; l <= lift.vars(); ++l) eq.row(l) = svec(lift.g[static_cast<std::size_t>(l)]).transpose();
  std::vector<SymMatrix> basis;
  for (Index t = 0; t < len; ++t) basis.push_back(smat(Vector::Unit(len, t)));
  for (std::size_t j = 0; j < q.size(); ++j) {
    const Inequality& row = q.inequalities[j];
    Vector rhs(lift.vars() + 1);
    rhs.head(lift.vars()) = -(lift.proj.transpose() * row.c);
    rhs(lift.vars()) = row.d;
    const detail::AffineSolution sol = detail::solve_affine(eq, rhs);
    if (sol.miss > 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff()))
      throw Error(ErrorCode::NoDualWitness, "facet is not a linear functional of the pencil", j);
    const auto b = detail::psd_point_on_affine(basis, SymMatrix(lift.k), sol.particular, sol.null_basis, kFeasTol);
    if (!b) throw Error(ErrorCode::NoDualWitness, "no psd functional represents the facet", j);
    f.b.push_back(*b);
  }

  const NonnegMatrix slack = slack_matrix(p, q);
  const VerifyReport rep = verify_factorization(slack, f, kConstructedTol * std::max(1.0, max_abs(slack.matrix())));
  if (!rep.pass) throw Error(ErrorCode::NoDualWitness, "assembled factorization failed verification");
  f.residual = rep.max_residual;
  return f;
}

}  // namespace psdrank
