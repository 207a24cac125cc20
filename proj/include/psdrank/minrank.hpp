#pragma once

// Deciding whether a nonnegative matrix of rank k(k+1)/2 has psd rank k.
//
// k = 2: an ellipse {x : [x;1]^T Omega [x;1] <= 0} sandwiched between the
// pair's P and Q, written as an LMI (S-procedure per facet). A verified
// point answers Yes, a verified Farkas ray answers No.
//
// General k: find an invertible L with smat(L^{-1} u_i) and smat(L^T v_j) psd
// for the rows u_i and columns v_j of a rank factorization M = U V.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "psdrank/liftkit.hpp"
#include "psdrank/lmifeas.hpp"
#include "psdrank/polyform.hpp"
#include "psdrank/psdfact.hpp"
#include "psdrank/symcore.hpp"

namespace psdrank {

inline constexpr double kCertTol = 1e-9;

struct ConicCertificate {
  SymMatrix omega = SymMatrix(3);
  Vector mu;
};

struct BilinearCertificate {
  DenseMatrix l, k;
};

enum class Answer { Yes, NoCertified, NotFound };

inline const char* to_string(Answer a) {
  switch (a) {
    case Answer::Yes: return "Yes";
    case Answer::NoCertified: return "NoCertified";
    case Answer::NotFound: return "NotFound";
  }
  return "?";
}

struct Verdict {
  Answer answer = Answer::NotFound;
  std::optional<ConicCertificate> conic;
  std::optional<BilinearCertificate> bilinear;
  std::optional<PsdFactorization> factorization;  // of the input matrix, on Yes
  std::vector<SymMatrix> ray;                     // Farkas ray, on NoCertified
  bool sufficient_only = false;                   // outer polyhedron unbounded: No cannot be certified
  double margin = 0.0;
  std::string diagnostics;
};

// ---------------------------------------------------------------- k = 2

inline constexpr Index kOmegaVars = 5;  // Omega_11, Omega_12, Omega_22, Omega_13, Omega_23

inline SymMatrix facet_form(const Inequality& row) {
  SymMatrix h(3);
  h.set(0, 2, -0.5 * row.c(0));
  h.set(1, 2, -0.5 * row.c(1));
  h.set(2, 2, row.d);
  return h;
}

inline SymMatrix omega_from_vars(const Vector& y) {
  SymMatrix o(3);
  o.set(0, 0, y(0));
  o.set(0, 1, y(1));
  o.set(1, 1, y(2));
  o.set(0, 2, y(3));
  o.set(1, 2, y(4));
  o.set(2, 2, -1.0);
  return o;
}

inline double conic_value(const SymMatrix& omega, const Vector& x) {
  const Eigen::Vector3d h(x(0), x(1), 1.0);
  return h.dot(omega.dense() * h);
}

struct ConicSystem {
  LmiProblem lmi;
  bool bounded = true;
  std::size_t facets = 0;
};

inline ConicSystem build_conic_system(const NestedPair& pair) {
  if (pair.p.n != 2 || pair.q.n != 2) throw Error(ErrorCode::DimensionMismatch, "conic system needs a planar pair");
  const std::size_t f = pair.q.size();
  ConicSystem sys{LmiProblem(kOmegaVars + static_cast<Index>(f)), is_bounded(pair.q), f};
  LmiProblem& lmi = sys.lmi;
  std::vector<SymMatrix> unit(kOmegaVars, SymMatrix(3));
  unit[0].set(0, 0, 1.0);
  unit[1].set(0, 1, 1.0);
  unit[2].set(1, 1, 1.0);
  unit[3].set(0, 2, 1.0);
  unit[4].set(1, 2, 1.0);
  SymMatrix fixed(3);
  fixed.set(2, 2, -1.0);

  const std::size_t top = lmi.add_block(2);
  lmi.coeff(top, 0).set(0, 0, 1.0);
  lmi.coeff(top, 1).set(0, 1, 1.0);
  lmi.coeff(top, 2).set(1, 1, 1.0);

  for (const auto& p : pair.p.vertices) {
    Vector a = Vector::Zero(lmi.num_vars());
    a.head(kOmegaVars) << -p(0) * p(0), -2.0 * p(0) * p(1), -p(1) * p(1), -2.0 * p(0), -2.0 * p(1);
    lmi.add_scalar(1.0, a);
  }
  for (std::size_t j = 0; j < f; ++j) {
    const std::size_t b = lmi.add_block(3);
    lmi.constant(b) = fixed;
    for (Index l = 0; l < kOmegaVars; ++l) lmi.coeff(b, l) = unit[static_cast<std::size_t>(l)];
    lmi.coeff(b, kOmegaVars + static_cast<Index>(j)) = facet_form(pair.q.inequalities[j]);
  }
  for (std::size_t j = 0; j < f; ++j) lmi.add_scalar(0.0, Vector::Unit(lmi.num_vars(), kOmegaVars + static_cast<Index>(j)));
  return sys;
}

struct ConicReport {
  double top_eig = 0.0;        // smallest eigenvalue of the upper-left block
  double worst_vertex = 0.0;   // largest conic value over the vertices
  double worst_facet = 0.0;    // smallest eigenvalue over Omega + mu_j H_j
  double worst_mu = 0.0;       // smallest multiplier
  bool pass = false;
};

// Checks the certificate directly against the geometry, not through the LMI.
inline ConicReport verify_conic(const ConicCertificate& cert, const NestedPair& pair, double tol = kCertTol) {
  if (cert.omega.size() != 3 || cert.mu.size() != static_cast<Index>(pair.q.size()))
    throw Error(ErrorCode::DimensionMismatch, "certificate shape does not match the pair");
  ConicReport rep;
  DenseMatrix top = cert.omega.dense().topLeftCorner(2, 2);
  rep.top_eig = min_eig(SymMatrix::symmetrize(top));
  rep.worst_vertex = -std::numeric_limits<double>::infinity();
  for (const auto& p : pair.p.vertices) rep.worst_vertex = std::max(rep.worst_vertex, conic_value(cert.omega, p));
  rep.worst_facet = std::numeric_limits<double>::infinity();
  rep.worst_mu = cert.mu.size() ? cert.mu.minCoeff() : 0.0;
  for (std::size_t j = 0; j < pair.q.size(); ++j)
    rep.worst_facet = std::min(rep.worst_facet, min_eig(cert.omega + facet_form(pair.q.inequalities[j]) * cert.mu(static_cast<Index>(j))));
  const double scale = std::max(1.0, max_abs(cert.omega.dense()));
  rep.pass = cert.omega(2, 2) == -1.0 && rep.top_eig >= -tol * scale && rep.worst_vertex <= tol * scale &&
             rep.worst_facet >= -tol * scale && rep.worst_mu >= 0.0;
  return rep;
}

// Size-2 factorization of pair.normalized through the ellipse: the map
// z = W x + w0 sends the ellipse onto the unit disk, whose pencil
// [[1 + z1, z2], [z2, 1 - z1]] then serves as the lift.
inline PsdFactorization conic_to_factorization(const ConicCertificate& cert, const NestedPair& pair) {
  const Eigen::Matrix2d a = cert.omega.dense().topLeftCorner(2, 2);
  const Eigen::Vector2d b = cert.omega.dense().block(0, 2, 2, 1);
  const SymEigen eg = eig_sym(SymMatrix::symmetrize(a));
  if (eg.values(0) <= 1e-12 * std::max(1.0, eg.values(1)))
    throw Error(ErrorCode::NotStrictlyElliptic, "upper-left block of the conic is singular");
  const Eigen::Vector2d center = -a.inverse() * b;
  const double rho = 1.0 - b.dot(center);  // 1 + b^T A^{-1} b
  if (!(rho > 0.0)) throw Error(ErrorCode::NotStrictlyElliptic, "conic has empty interior");
  const Eigen::Matrix2d root = eg.vectors * eg.values.cwiseSqrt().asDiagonal() * eg.vectors.transpose();
  const Eigen::Matrix2d w = root / std::sqrt(rho);
  const Eigen::Vector2d w0 = -w * center;
  const SpectraLift disk = disk_lift();
  std::vector<SymMatrix> g;
  for (Index l = 0; l < 2; ++l) g.push_back(disk.g[0] * w(0, l) + disk.g[1] * w(1, l));
  g.push_back(disk.g[2] + disk.g[0] * w0(0) + disk.g[1] * w0(1));
  return factorization_from_lift(SpectraLift(std::move(g), DenseMatrix::Identity(2, 2)), pair.p, pair.q);
}

inline Verdict decide_rank2(const NonnegMatrix& m, const LmiOptions& opt = {}) {
  const Index rank = numerical_rank(m.matrix());
  if (rank != 3) throw Error(ErrorCode::RankMismatch, "matrix rank is " + std::to_string(rank) + ", expected 3");
  const NestedPair pair = pair_from_matrix(m, 3);
  const ConicSystem sys = build_conic_system(pair);
  const FeasResult r = solve(sys.lmi, opt);
  Verdict v;
  v.margin = r.margin;
  v.sufficient_only = !sys.bounded;
  if (r.status == FeasStatus::Feasible) {
    ConicCertificate cert{omega_from_vars(r.y.head(kOmegaVars)), r.y.tail(static_cast<Index>(sys.facets))};
    const ConicReport rep = verify_conic(cert, pair);
    if (!rep.pass) {
      v.diagnostics = "solver point failed independent certificate check";
      return v;
    }
    v.answer = Answer::Yes;
    v.conic = cert;
    try {
      PsdFactorization f = restore_to_source(pair, conic_to_factorization(cert, pair));
      const VerifyReport fr = verify_factorization(m, f, kConstructedTol * std::max(1.0, max_abs(m.matrix())));
      if (fr.pass) {
        f.residual = fr.max_residual;
        v.factorization = std::move(f);
      } else {
        v.diagnostics = "factorization from the conic failed verification";
      }
    } catch (const Error& e) {
      v.diagnostics = std::string("factorization from the conic unavailable: ") + e.what();
    }
    return v;
  }
  if (r.status == FeasStatus::Infeasible) {
    if (!sys.bounded) {
      v.diagnostics = "ellipse system infeasible but outer polyhedron is unbounded; no certified answer";
      return v;
    }
    v.answer = Answer::NoCertified;
    v.ray = r.ray;
    return v;
  }
  v.diagnostics = "conic system undetermined (near the feasibility boundary)";
  return v;
}

// ---------------------------------------------------------------- general k

struct BilinearSystem {
  Index k = 0, d = 0;
  DenseMatrix u;  // p x d, rows u_i
  DenseMatrix v;  // d x q, columns v_j
  std::vector<Index> kept_rows, kept_cols;
  Index source_rows = 0, source_cols = 0;
};

inline BilinearSystem build_bilinear_system(const NonnegMatrix& m, Index k) {
  if (k < 1) throw Error(ErrorCode::DomainError, "k must be >= 1");
  BilinearSystem sys;
  sys.k = k;
  sys.d = svec_length(k);
  const DenseMatrix& a = m.matrix();
  sys.source_rows = a.rows();
  sys.source_cols = a.cols();
  for (Index i = 0; i < a.rows(); ++i)
    if (a.row(i).maxCoeff() > 0.0) sys.kept_rows.push_back(i);
  for (Index j = 0; j < a.cols(); ++j)
    if (a.col(j).maxCoeff() > 0.0) sys.kept_cols.push_back(j);
  DenseMatrix core(static_cast<Index>(sys.kept_rows.size()), static_cast<Index>(sys.kept_cols.size()));
  for (Index i = 0; i < core.rows(); ++i)
    for (Index j = 0; j < core.cols(); ++j) core(i, j) = a(sys.kept_rows[static_cast<std::size_t>(i)], sys.kept_cols[static_cast<std::size_t>(j)]);
  const Index rank = numerical_rank(core);
  if (rank != sys.d)
    throw Error(ErrorCode::RankMismatch, "matrix rank is " + std::to_string(rank) + ", expected " + std::to_string(sys.d));
  const RankFactorization rf = rank_factor(core);
  sys.u = rf.u;
  sys.v = rf.v;
  return sys;
}

struct BilinearReport {
  double identity_error = 0.0;  // max(|LK - I|, |KL - I|) entrywise
  double worst_row_eig = 0.0;
  double worst_col_eig = 0.0;
  Index worst_row = -1, worst_col = -1;
  bool pass = false;
};

inline BilinearReport verify_bilinear(const BilinearCertificate& cert, const BilinearSystem& sys, double tol) {
  if (cert.l.rows() != sys.d || cert.l.cols() != sys.d || cert.k.rows() != sys.d || cert.k.cols() != sys.d)
    throw Error(ErrorCode::DimensionMismatch, "certificate matrices must be " + std::to_string(sys.d) + "x" + std::to_string(sys.d));
  BilinearReport rep;
  const DenseMatrix id = DenseMatrix::Identity(sys.d, sys.d);
  rep.identity_error = std::max(max_abs(cert.l * cert.k - id), max_abs(cert.k * cert.l - id));
  rep.worst_row_eig = rep.worst_col_eig = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < sys.u.rows(); ++i) {
    const Vector s = cert.k * sys.u.row(i).transpose();
    const double e = min_eig(smat(s)) / std::max(1.0, s.norm());
    if (e < rep.worst_row_eig) rep.worst_row_eig = e, rep.worst_row = i;
  }
  for (Index j = 0; j < sys.v.cols(); ++j) {
    const Vector t = cert.l.transpose() * sys.v.col(j);
    const double e = min_eig(smat(t)) / std::max(1.0, t.norm());
    if (e < rep.worst_col_eig) rep.worst_col_eig = e, rep.worst_col = j;
  }
  if (sys.u.rows() == 0) rep.worst_row_eig = 0.0;
  if (sys.v.cols() == 0) rep.worst_col_eig = 0.0;
  rep.pass = rep.identity_error <= tol && rep.worst_row_eig >= -tol && rep.worst_col_eig >= -tol;
  return rep;
}

namespace detail {

// One local run on hinge residuals max(0, delta - lambda) over every eigenvalue
// of the row matrices smat(K u_i) and column matrices smat(L^T v_j), K = L^{-1}.
// Rows and columns are rescaled to unit length; psd-ness does not notice.
class HingeSearch {
 public:
  explicit HingeSearch(const BilinearSystem& sys) : k_(sys.k), d_(sys.d) {
    u_ = sys.u;
    v_ = sys.v;
    for (Index i = 0; i < u_.rows(); ++i) u_.row(i) /= std::max(u_.row(i).norm(), 1e-300);
    for (Index j = 0; j < v_.cols(); ++j) v_.col(j) /= std::max(v_.col(j).norm(), 1e-300);
  }

  std::optional<DenseMatrix> run(std::mt19937_64& rng, int max_iters) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    DenseMatrix l(d_, d_);
    for (Index i = 0; i < d_; ++i)
      for (Index j = 0; j < d_; ++j) l(i, j) = normal(rng);
    l += 0.5 * std::sqrt(static_cast<double>(d_)) * DenseMatrix::Identity(d_, d_);
    rebalance(l);
    double lambda = 1e-3, nu = 2.0;
    Eval cur = evaluate(l);
    if (!cur.ok) return std::nullopt;
    for (int it = 0; it < max_iters; ++it) {
      if (cur.min_eig >= 0.0) return l;
      DenseMatrix jtj = cur.jac.transpose() * cur.jac;
      const Vector g = cur.jac.transpose() * cur.r;
      bool accepted = false;
      for (int inner = 0; inner < 30 && !accepted; ++inner) {
        DenseMatrix sys = jtj;
        sys.diagonal().array() += lambda * std::max(1e-12, jtj.diagonal().maxCoeff());
        const Vector step = -sys.ldlt().solve(g);
        DenseMatrix trial = l + Eigen::Map<const DenseMatrix>(step.data(), d_, d_);
        rebalance(trial);
        const Eval next = evaluate(trial);
        if (next.ok && next.cost < cur.cost) {
          l = trial;
          cur = next;
          lambda = std::max(lambda / 3.0, 1e-12);
          nu = 2.0;
          accepted = true;
        } else {
          lambda *= nu;
          nu *= 2.0;
        }
      }
      if (!accepted) return std::nullopt;
    }
    return cur.min_eig >= 0.0 ? std::optional<DenseMatrix>(l) : std::nullopt;
  }

 private:
  struct Eval {
    bool ok = false;
    Vector r;
    DenseMatrix jac;
    double cost = 0.0;
    double min_eig = 0.0;
  };

  // Scales L so that mean traces of row and column matrices agree.
  void rebalance(DenseMatrix& l) const {
    Eigen::FullPivLU<DenseMatrix> lu(l);
    if (!lu.isInvertible()) return;
    const DenseMatrix k = lu.inverse();
    double tr_s = 0.0, tr_t = 0.0;
    for (Index i = 0; i < u_.rows(); ++i) tr_s += std::abs(smat(k * u_.row(i).transpose()).dense().trace());
    for (Index j = 0; j < v_.cols(); ++j) tr_t += std::abs(smat(l.transpose() * v_.col(j)).dense().trace());
    tr_s /= std::max<Index>(1, u_.rows());
    tr_t /= std::max<Index>(1, v_.cols());
    if (tr_s > 0.0 && tr_t > 0.0) l *= std::sqrt(tr_s / tr_t);
  }

  Eval evaluate(const DenseMatrix& l) const {
    Eval e;
    Eigen::FullPivLU<DenseMatrix> lu(l);
    if (!lu.isInvertible() || lu.rcond() < 1e-12) return e;
    const DenseMatrix k = lu.inverse();
    const Index rows = (u_.rows() + v_.cols()) * k_;
    e.r = Vector::Zero(rows);
    e.jac = DenseMatrix::Zero(rows, d_ * d_);
    e.min_eig = std::numeric_limits<double>::infinity();
    // Margin target relative to the typical factor size.
    double scale = 0.0;
    std::vector<SymEigen> row_eigs, col_eigs;
    std::vector<Vector> ku;
    for (Index i = 0; i < u_.rows(); ++i) {
      ku.push_back(k * u_.row(i).transpose());
      row_eigs.push_back(eig_sym(smat(ku.back())));
      scale += row_eigs.back().values.cwiseAbs().sum();
    }
    for (Index j = 0; j < v_.cols(); ++j) {
      col_eigs.push_back(eig_sym(smat(l.transpose() * v_.col(j))));
      scale += col_eigs.back().values.cwiseAbs().sum();
    }
    scale /= static_cast<double>(std::max<Index>(1, rows));
    const double delta = 0.05 * scale;
    Index row = 0;
    for (Index i = 0; i < u_.rows(); ++i) {
      const SymEigen& eg = row_eigs[static_cast<std::size_t>(i)];
      for (Index t = 0; t < k_; ++t, ++row) {
        const double lam = eg.values(t);
        e.min_eig = std::min(e.min_eig, lam);
        if (lam >= delta) continue;
        const Vector q = eg.vectors.col(t);
        const Vector sq = svec(SymMatrix::from_upper(q * q.transpose()));
        // d lambda / dL = -K^T svec(qq^T) (K u)^T ; residual is delta - lambda.
        const DenseMatrix grad = (k.transpose() * sq) * ku[static_cast<std::size_t>(i)].transpose();
        e.r(row) = delta - lam;
        e.jac.row(row) = Eigen::Map<const Eigen::RowVectorXd>(grad.data(), d_ * d_);
      }
    }
    for (Index j = 0; j < v_.cols(); ++j) {
      const SymEigen& eg = col_eigs[static_cast<std::size_t>(j)];
      for (Index t = 0; t < k_; ++t, ++row) {
        const double lam = eg.values(t);
        e.min_eig = std::min(e.min_eig, lam);
        if (lam >= delta) continue;
        const Vector q = eg.vectors.col(t);
        const Vector sq = svec(SymMatrix::from_upper(q * q.transpose()));
        // d lambda / dL = v svec(qq^T)^T
        const DenseMatrix grad = -(v_.col(j) * sq.transpose());
        e.r(row) = delta - lam;
        e.jac.row(row) = Eigen::Map<const Eigen::RowVectorXd>(grad.data(), d_ * d_);
      }
    }
    e.cost = 0.5 * e.r.squaredNorm() / (scale * scale);
    e.ok = std::isfinite(e.cost);
    return e;
  }

  Index k_, d_;
  DenseMatrix u_, v_;
};

// Certificate read off a psd factorization of U V: svec(A_i) = K u_i and
// svec(B_j) = L^T v_j determine K by least squares.
inline std::optional<BilinearCertificate> certificate_from_factorization(const BilinearSystem& sys, const PsdFactorization& f) {
  DenseMatrix abar(sys.u.rows(), sys.d);
  for (Index i = 0; i < sys.u.rows(); ++i) abar.row(i) = svec(f.a[static_cast<std::size_t>(i)]).transpose();
  const DenseMatrix g = sys.u.colPivHouseholderQr().solve(abar);  // abar = U g
  Eigen::FullPivLU<DenseMatrix> lu(g);
  if (!lu.isInvertible()) return std::nullopt;
  BilinearCertificate cert{DenseMatrix(lu.inverse().transpose()), DenseMatrix(g.transpose())};
  return cert;
}

}  // namespace detail

inline constexpr double kBilinearTol = 1e-7;

struct BilinearOutcome {
  std::optional<BilinearCertificate> cert;
  std::string method;  // which local search produced it
  int restart = -1;
};

// Local search with restarts. An empty result is not a No.
inline BilinearOutcome solve_bilinear(const BilinearSystem& sys, const SearchConfig& cfg = {}) {
  const detail::HingeSearch hinge(sys);
  const DenseMatrix core = sys.u * sys.v;
  auto attempt = [&](int index) -> std::optional<BilinearOutcome> {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(index));
    if (auto l = hinge.run(rng, 200)) {
      BilinearCertificate cert{*l, l->inverse()};
      if (verify_bilinear(cert, sys, kBilinearTol).pass) return BilinearOutcome{cert, "hinge", index};
    }
    SearchConfig one = cfg;
    one.restarts = 1;
    one.jobs = 1;
    one.seed = cfg.seed + 104729 + static_cast<std::uint64_t>(index);
    const auto f = search_factorization(core, sys.k, one);
    if (f) {
      if (auto cert = detail::certificate_from_factorization(sys, *f))
        if (verify_bilinear(*cert, sys, std::max(kBilinearTol, 10.0 * cfg.tol)).pass) return BilinearOutcome{*cert, "factor", index};
    }
    return std::nullopt;
  };
  auto found = detail::first_success(cfg.restarts, cfg.jobs, attempt);
  return found ? *found : BilinearOutcome{};
}

inline PsdFactorization certificate_to_factorization(const BilinearCertificate& cert, const BilinearSystem& sys,
                                                     double tol = kBilinearTol) {
  const BilinearReport rep = verify_bilinear(cert, sys, tol);
  if (!rep.pass) throw Error(ErrorCode::UnverifiedCertificate, "certificate fails verification");
  PsdFactorization core;
  core.k = sys.k;
  for (Index i = 0; i < sys.u.rows(); ++i) core.a.push_back(project_psd(smat(cert.k * sys.u.row(i).transpose())));
  for (Index j = 0; j < sys.v.cols(); ++j) core.b.push_back(project_psd(smat(cert.l.transpose() * sys.v.col(j))));
  return embed_factorization(core, sys.kept_rows, sys.kept_cols, sys.source_rows, sys.source_cols);
}

inline Verdict min_psd_rank_decide(const NonnegMatrix& m, Index k, const SearchConfig& cfg = {}) {
  if (k < 1) throw Error(ErrorCode::DomainError, "k must be >= 1");
  const Index rank = numerical_rank(m.matrix());
  if (rank != svec_length(k))
    throw Error(ErrorCode::RankMismatch, "matrix rank is " + std::to_string(rank) + ", expected " + std::to_string(svec_length(k)));
  const double tol = cfg.tol * std::max(1.0, max_abs(m.matrix()));
  Verdict v;
  if (k == 2) {
    v = decide_rank2(m);
    if (v.answer == Answer::NoCertified) return v;
    if (v.answer == Answer::Yes && v.factorization) return v;
  }
  const BilinearSystem sys = build_bilinear_system(m, k);
  const BilinearOutcome out = solve_bilinear(sys, cfg);
  if (out.cert) {
    PsdFactorization f = certificate_to_factorization(*out.cert, sys, std::max(kBilinearTol, 10.0 * cfg.tol));
    const VerifyReport fr = verify_factorization(m, f, tol);
    if (fr.pass) {
      f.residual = fr.max_residual;
      v.answer = Answer::Yes;
      v.bilinear = out.cert;
      v.factorization = std::move(f);
      v.diagnostics = "bilinear certificate (" + out.method + " search, restart " + std::to_string(out.restart) + ")";
      return v;
    }
  }
  if (v.answer == Answer::Yes) {
    v.diagnostics += "; no factorization could be extracted";
    v.answer = Answer::NotFound;
    v.conic.reset();
    return v;
  }
  v.answer = Answer::NotFound;
  if (v.diagnostics.empty()) v.diagnostics = "no certificate found within the restart budget";
  return v;
}

}  // namespace psdrank
