#pragma once

// Small dense linear algebra over real symmetric matrices.
//
// Everything here targets matrices of size ~10 or less: cyclic Jacobi for the
// symmetric eigenproblem, one-sided (Hestenes) Jacobi for the SVD, and the
// orthonormal vectorization svec/smat of the symmetric matrices S^k.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "psdrank/error.hpp"

namespace psdrank {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr int kJacobiMaxSweeps = 100;

inline bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

inline void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::InvalidInput, std::string(what) + " has non-finite entries");
}

inline double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Real symmetric k x k matrix. Writes go through set() which mirrors the
// entry, so the stored array is symmetric bit for bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index k) : a_(DenseMatrix::Zero(k, k)) {}

  // Takes the upper triangle of `m` and mirrors it.
  static SymMatrix from_upper(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must be square");
    SymMatrix s(m.rows());
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = i; j < m.cols(); ++j) s.set(i, j, m(i, j));
    return s;
  }

  // Averages m and its transpose.
  static SymMatrix symmetrize(const DenseMatrix& m) { return from_upper(0.5 * (m + m.transpose())); }

  static SymMatrix identity(Index k) { return from_upper(DenseMatrix::Identity(k, k)); }

  static SymMatrix diagonal(const Vector& d) {
    SymMatrix s(d.size());
    for (Index i = 0; i < d.size(); ++i) s.set(i, i, d(i));
    return s;
  }

  Index size() const { return a_.rows(); }
  double operator()(Index i, Index j) const { return a_(i, j); }
  void set(Index i, Index j, double v) {
    a_(i, j) = v;
    a_(j, i) = v;
  }
  const DenseMatrix& dense() const { return a_; }

  SymMatrix& operator+=(const SymMatrix& o) {
    check_same(o);
    a_ += o.a_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    check_same(o);
    a_ -= o.a_;
    return *this;
  }
  SymMatrix& operator*=(double s) {
    a_ *= s;
    return *this;
  }
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.a_.rows() == b.a_.rows() && a.a_ == b.a_;
  }

 private:
  void check_same(const SymMatrix& o) const {
    if (o.size() != size()) throw Error(ErrorCode::DimensionMismatch, "symmetric matrix sizes differ");
  }
  DenseMatrix a_;
};

// Trace inner product <A, B> = Trace(AB).
inline double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "inner product of different sizes");
  return a.dense().cwiseProduct(b.dense()).sum();
}

inline Index svec_length(Index k) { return k * (k + 1) / 2; }

// Inverse of svec_length; nullopt-free variant throwing NonTriangularLength.
inline Index triangular_root(Index d) {
  if (d < 0) throw Error(ErrorCode::NonTriangularLength, "negative length");
  auto k = static_cast<Index>(std::llround((std::sqrt(8.0 * static_cast<double>(d) + 1.0) - 1.0) / 2.0));
  if (svec_length(k) != d) throw Error(ErrorCode::NonTriangularLength, "length " + std::to_string(d) + " is not k(k+1)/2");
  return k;
}

// Coordinates in the basis E_11..E_kk, E_12, E_13, .., E_1k, E_23, .., E_{k-1,k}
// where off-diagonal basis elements carry 1/sqrt(2), so svec(S).svec(T) = <S,T>.
inline Vector svec(const SymMatrix& s) {
  const Index k = s.size();
  Vector y(svec_length(k));
  Index pos = 0;
  for (Index i = 0; i < k; ++i) y(pos++) = s(i, i);
  for (Index i = 0; i < k; ++i)
    for (Index j = i + 1; j < k; ++j) y(pos++) = std::sqrt(2.0) * s(i, j);
  return y;
}

inline SymMatrix smat(const Vector& y) {
  const Index k = triangular_root(y.size());
  SymMatrix s(k);
  Index pos = 0;
  for (Index i = 0; i < k; ++i) s.set(i, i, y(pos++));
  for (Index i = 0; i < k; ++i)
    for (Index j = i + 1; j < k; ++j) s.set(i, j, y(pos++) / std::sqrt(2.0));
  return s;
}

struct SymEigen {
  Vector values;         // ascending
  DenseMatrix vectors;   // column i pairs with values(i)
};

// Cyclic Jacobi. Off-diagonal entries that no longer perturb their diagonal
// neighbours are zeroed outright after the first few sweeps.
inline SymEigen eig_sym(const SymMatrix& s, int max_sweeps = kJacobiMaxSweeps) {
  const Index n = s.size();
  DenseMatrix a = s.dense();
  DenseMatrix v = DenseMatrix::Identity(n, n);
  if (!a.allFinite()) throw Error(ErrorCode::InvalidInput, "eig_sym on non-finite matrix");

  auto off_norm2 = [&] {
    double acc = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) acc += a(p, q) * a(p, q);
    return acc;
  };
  const double frob = a.norm();

  bool converged = n <= 1;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    const double off = off_norm2();
    if (off == 0.0 || std::sqrt(off) <= 1e-17 * frob) {
      converged = true;
      break;
    }
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) && std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        if (!std::isfinite(t)) t = 0.0;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Index r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - sn * arq;
          a(r, q) = sn * arp + c * arq;
        }
        for (Index r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - sn * aqr;
          a(q, r) = sn * apr + c * aqr;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Index r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - sn * vrq;
          v(r, q) = sn * vrp + c * vrq;
        }
      }
    }
  }
  if (!converged) {
    const double off = off_norm2();
    if (!(off == 0.0 || std::sqrt(off) <= 1e-14 * frob))
      throw Error(ErrorCode::NoConvergence, "Jacobi eigensolver exceeded sweep cap");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) < a(j, j); });
  SymEigen out{Vector(n), DenseMatrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

inline double min_eig(const SymMatrix& s) {
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  if (s.size() == 1) return s(0, 0);
  return eig_sym(s).values(0);
}

inline SymMatrix project_psd(const SymMatrix& s) {
  auto e = eig_sym(s);
  const Vector clipped = e.values.cwiseMax(0.0);
  return SymMatrix::symmetrize(e.vectors * clipped.asDiagonal() * e.vectors.transpose());
}

// Thin SVD, M = U diag(sigma) V^T with sigma descending.
struct Svd {
  DenseMatrix u;
  Vector sigma;
  DenseMatrix v;
};

// One-sided Jacobi orthogonalization of the columns of a tall matrix.
inline Svd svd_jacobi(const DenseMatrix& m, int max_sweeps = kJacobiMaxSweeps) {
  require_finite(m, "svd input");
  if (m.rows() < m.cols()) {
    Svd t = svd_jacobi(m.transpose(), max_sweeps);
    return Svd{t.v, t.sigma, t.u};
  }
  const Index p = m.rows(), q = m.cols();
  DenseMatrix w = m;
  DenseMatrix v = DenseMatrix::Identity(q, q);
  bool converged = q <= 1;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (Index i = 0; i < q; ++i) {
      for (Index j = i + 1; j < q; ++j) {
        const double alpha = w.col(i).squaredNorm();
        const double beta = w.col(j).squaredNorm();
        const double gamma = w.col(i).dot(w.col(j));
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        double t = 1.0 / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        if (zeta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Vector wi = w.col(i), wj = w.col(j);
        w.col(i) = c * wi - s * wj;
        w.col(j) = s * wi + c * wj;
        const Vector vi = v.col(i), vj = v.col(j);
        v.col(i) = c * vi - s * vj;
        v.col(j) = s * vi + c * vj;
      }
    }
    if (!rotated) converged = true;
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "one-sided Jacobi SVD exceeded sweep cap");

  Vector sigma(q);
  for (Index i = 0; i < q; ++i) sigma(i) = w.col(i).norm();
  std::vector<Index> order(static_cast<std::size_t>(q));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return sigma(i) > sigma(j); });

  Svd out{DenseMatrix::Zero(p, q), Vector(q), DenseMatrix(q, q)};
  for (Index k = 0; k < q; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.sigma(k) = sigma(src);
    out.v.col(k) = v.col(src);
    if (sigma(src) > 0.0) out.u.col(k) = w.col(src) / sigma(src);
  }
  return out;
}

inline Index numerical_rank(const DenseMatrix& m, double tol = kDefaultRankTol) {
  if (m.size() == 0) return 0;
  const Svd s = svd_jacobi(m);
  const double top = s.sigma.size() ? s.sigma(0) : 0.0;
  if (top == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < s.sigma.size(); ++i)
    if (s.sigma(i) > tol * top) ++r;
  return r;
}

struct RankFactorization {
  DenseMatrix u;  // p x r
  DenseMatrix v;  // r x q
  Index rank = 0;
  double residual = 0.0;  // max |M - UV|
};

// M = UV with inner dimension equal to the numerical rank (singular values
// above tol * sigma_max). With `ones_first` the basis is changed so that
// U's first column is exactly the all-ones vector.
inline RankFactorization rank_factor(const DenseMatrix& m, double tol = kDefaultRankTol, bool ones_first = false) {
  const Svd s = svd_jacobi(m);
  const double top = s.sigma.size() ? s.sigma(0) : 0.0;
  Index r = 0;
  if (top > 0.0)
    for (Index i = 0; i < s.sigma.size(); ++i)
      if (s.sigma(i) > tol * top) ++r;

  const Vector root = s.sigma.head(r).cwiseSqrt();
  DenseMatrix u = s.u.leftCols(r) * root.asDiagonal();
  DenseMatrix v = root.asDiagonal() * s.v.leftCols(r).transpose();

  if (ones_first) {
    const Index p = m.rows();
    const Vector ones = Vector::Ones(p);
    if (r == 0) throw Error(ErrorCode::OnesNotInSpan, "zero matrix has empty column span");
    // u has orthogonal columns, so the least squares coefficients decouple.
    Vector w(r);
    for (Index i = 0; i < r; ++i) w(i) = u.col(i).dot(ones) / u.col(i).squaredNorm();
    const double miss = (u * w - ones).cwiseAbs().maxCoeff();
    if (miss > 1e-7) throw Error(ErrorCode::OnesNotInSpan, "all-ones vector is not in the column span");

    // T = [w, N] with N an orthonormal basis of w's complement; T^{-1} = [w^T/|w|^2; N^T].
    Eigen::HouseholderQR<DenseMatrix> qr(w);
    const DenseMatrix full_q = qr.householderQ() * DenseMatrix::Identity(r, r);
    DenseMatrix t(r, r), t_inv(r, r);
    t.col(0) = w;
    t_inv.row(0) = w.transpose() / w.squaredNorm();
    for (Index i = 1; i < r; ++i) {
      t.col(i) = full_q.col(i);
      t_inv.row(i) = full_q.col(i).transpose();
    }
    u = u * t;
    v = t_inv * v;
    u.col(0).setOnes();
  }

  RankFactorization out{u, v, r, 0.0};
  out.residual = max_abs(m - u * v);
  return out;
}

}  // namespace psdrank
