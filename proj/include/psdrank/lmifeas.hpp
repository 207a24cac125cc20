#pragma once

// Feasibility of block-diagonal linear matrix inequalities
//
//   F_0^b + sum_l y_l F_l^b  psd   for every block b.
//
// The engine maximizes the smallest eigenvalue t over all blocks with a
// primal-dual interior point method (HKM search direction, Mehrotra
// predictor-corrector) applied to
//
//   max t  s.t.  F^b(y) - t I  psd,   |y_l| <= R,   t <= cap.
//
// Its dual  min <F_0, Z>  s.t.  <F_l, Z> = 0, tr Z = 1, Z psd  produces a
// Farkas ray whenever the optimal margin is negative. Neither answer is
// trusted as computed: Feasible is re-checked with verify_point, Infeasible
// with verify_ray, and anything else comes back Undetermined.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "psdrank/symcore.hpp"

namespace psdrank {

struct LmiBlock {
  SymMatrix constant;             // F_0
  std::vector<SymMatrix> coeffs;  // F_1 .. F_m
};

class LmiProblem {
 public:
  explicit LmiProblem(Index num_vars = 0) : num_vars_(num_vars) {}

  Index num_vars() const { return num_vars_; }
  const std::vector<LmiBlock>& blocks() const { return blocks_; }
  std::vector<LmiBlock>& blocks() { return blocks_; }

  // Adds a block of the given size with zero data; returns its index.
  std::size_t add_block(Index size) {
    if (size < 1) throw Error(ErrorCode::DimensionMismatch, "LMI block size must be >= 1");
    LmiBlock b{SymMatrix(size), std::vector<SymMatrix>(static_cast<std::size_t>(num_vars_), SymMatrix(size))};
    blocks_.push_back(std::move(b));
    return blocks_.size() - 1;
  }

  // Scalar constraint  c + a.y >= 0  as a 1 x 1 block.
  std::size_t add_scalar(double c, const Vector& a) {
    if (a.size() != num_vars_) throw Error(ErrorCode::DimensionMismatch, "scalar constraint length");
    const std::size_t b = add_block(1);
    blocks_[b].constant.set(0, 0, c);
    for (Index l = 0; l < num_vars_; ++l) blocks_[b].coeffs[static_cast<std::size_t>(l)].set(0, 0, a(l));
    return b;
  }

  SymMatrix& constant(std::size_t b) { return blocks_.at(b).constant; }
  SymMatrix& coeff(std::size_t b, Index l) { return blocks_.at(b).coeffs.at(static_cast<std::size_t>(l)); }

  SymMatrix evaluate(std::size_t b, const Vector& y) const {
    const LmiBlock& blk = blocks_.at(b);
    DenseMatrix f = blk.constant.dense();
    for (Index l = 0; l < num_vars_; ++l)
      if (y(l) != 0.0) f += y(l) * blk.coeffs[static_cast<std::size_t>(l)].dense();
    return SymMatrix::symmetrize(f);
  }

  void validate() const {
    for (const auto& b : blocks_) {
      if (static_cast<Index>(b.coeffs.size()) != num_vars_)
        throw Error(ErrorCode::DimensionMismatch, "block has wrong number of coefficient matrices");
      for (const auto& c : b.coeffs)
        if (c.size() != b.constant.size()) throw Error(ErrorCode::DimensionMismatch, "coefficient size differs from block size");
    }
  }

  // Optional box |y_l| <= bound used by the solver; defaults to kDefaultBound.
  std::optional<double> bound;

 private:
  Index num_vars_;
  std::vector<LmiBlock> blocks_;
};

enum class FeasStatus { Feasible, Infeasible, Undetermined };

struct FeasResult {
  FeasStatus status = FeasStatus::Undetermined;
  Vector y;                  // Feasible: the point; otherwise the best iterate
  std::vector<SymMatrix> ray;  // Infeasible: per-block dual matrices, trace normalized
  double margin = 0.0;       // Feasible/Undetermined: min eigenvalue at y; Infeasible: <F_0, Z>
  int iterations = 0;
};

struct LmiOptions {
  double tol = 1e-9;
  int max_iters = 120;
  double cap = 1.0;           // t is not maximized past this (after block normalization)
  double default_bound = 1e3;
};

inline bool verify_point(const LmiProblem& p, const Vector& y, double tol) {
  if (y.size() != p.num_vars()) throw Error(ErrorCode::DimensionMismatch, "point has wrong length");
  for (std::size_t b = 0; b < p.blocks().size(); ++b)
    if (min_eig(p.evaluate(b, y)) < -tol) return false;
  return true;
}

inline double point_margin(const LmiProblem& p, const Vector& y) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < p.blocks().size(); ++b) m = std::min(m, min_eig(p.evaluate(b, y)));
  return m;
}

namespace detail {

inline double total_trace(const std::vector<SymMatrix>& z) {
  double t = 0.0;
  for (const auto& b : z) t += b.dense().trace();
  return t;
}

inline double ray_pairing(const LmiProblem& p, const std::vector<SymMatrix>& z, Index l) {
  double acc = 0.0;
  for (std::size_t b = 0; b < p.blocks().size(); ++b) {
    const LmiBlock& blk = p.blocks()[b];
    acc += inner(l < 0 ? blk.constant : blk.coeffs[static_cast<std::size_t>(l)], z[b]);
  }
  return acc;
}

inline double data_norm(const LmiProblem& p, Index l) {
  double acc = 0.0;
  for (const auto& blk : p.blocks()) {
    const SymMatrix& f = l < 0 ? blk.constant : blk.coeffs[static_cast<std::size_t>(l)];
    acc += f.dense().squaredNorm();
  }
  return std::sqrt(acc);
}

}  // namespace detail

// Checks that Z is a Farkas ray: every Z_b psd (to tol), <F_l, Z> = 0 for all
// l >= 1 and <F_0, Z> < 0, after scaling Z to unit total trace.
inline bool verify_ray(const LmiProblem& p, const std::vector<SymMatrix>& z_in, double tol) {
  if (z_in.size() != p.blocks().size()) throw Error(ErrorCode::DimensionMismatch, "ray has wrong number of blocks");
  for (std::size_t b = 0; b < z_in.size(); ++b)
    if (z_in[b].size() != p.blocks()[b].constant.size()) throw Error(ErrorCode::DimensionMismatch, "ray block size");
  const double tr = detail::total_trace(z_in);
  if (!(tr > 0.0) || !std::isfinite(tr)) return false;
  std::vector<SymMatrix> z = z_in;
  for (auto& b : z) b *= 1.0 / tr;
  for (const auto& b : z)
    if (min_eig(b) < -tol) return false;
  for (Index l = 0; l < p.num_vars(); ++l)
    if (std::abs(detail::ray_pairing(p, z, l)) > tol * std::max(1.0, detail::data_norm(p, l))) return false;
  return detail::ray_pairing(p, z, -1) <= -tol * std::max(1.0, detail::data_norm(p, -1));
}

namespace detail {

// Dense block data for the standard-form SDP
//   primal  min <C, X>  s.t. <A_i, X> = b_i, X psd
//   dual    max b.y     s.t. S = C - sum_i y_i A_i psd
struct SdpBlock {
  DenseMatrix c;
  std::vector<DenseMatrix> a;  // one per dual variable
  std::vector<char> nonzero;
};

// Largest step alpha in (0, 1] with X + alpha dX psd (X positive definite).
inline double max_step(const DenseMatrix& x, const DenseMatrix& dx) {
  Eigen::LLT<DenseMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const DenseMatrix l_inv = llt.matrixL().solve(DenseMatrix::Identity(x.rows(), x.cols()));
  const double lam = min_eig(SymMatrix::symmetrize(l_inv * dx * l_inv.transpose()));
  if (lam >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lam;
}

inline DenseMatrix sym_part(const DenseMatrix& m) { return 0.5 * (m + m.transpose()); }

// Linear-subspace projection followed by psd clipping, alternated; finishes
// on the subspace. Operates on the concatenated svec coordinates.
inline std::vector<SymMatrix> polish_ray(const LmiProblem& p, std::vector<SymMatrix> z) {
  const Index m = p.num_vars();
  if (m == 0) {
    for (auto& b : z) b = project_psd(b);
    return z;
  }
  std::vector<Index> offsets;
  Index total = 0;
  for (const auto& blk : p.blocks()) {
    offsets.push_back(total);
    total += svec_length(blk.constant.size());
  }
  DenseMatrix a(m, total);
  for (Index l = 0; l < m; ++l)
    for (std::size_t b = 0; b < p.blocks().size(); ++b)
      a.row(l).segment(offsets[b], svec_length(p.blocks()[b].constant.size())) =
          svec(p.blocks()[b].coeffs[static_cast<std::size_t>(l)]).transpose();
  const Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(a * a.transpose());

  auto to_vec = [&](const std::vector<SymMatrix>& blocks) {
    Vector v(total);
    for (std::size_t b = 0; b < blocks.size(); ++b) v.segment(offsets[b], svec_length(blocks[b].size())) = svec(blocks[b]);
    return v;
  };
  auto from_vec = [&](const Vector& v) {
    std::vector<SymMatrix> out;
    for (std::size_t b = 0; b < p.blocks().size(); ++b)
      out.push_back(smat(v.segment(offsets[b], svec_length(p.blocks()[b].constant.size()))));
    return out;
  };
  auto project_linear = [&](const Vector& v) -> Vector { return v - a.transpose() * cod.solve(a * v); };

  for (int it = 0; it < 30; ++it) {
    z = from_vec(project_linear(to_vec(z)));
    for (auto& b : z) b = project_psd(b);
  }
  return from_vec(project_linear(to_vec(z)));
}

}  // namespace detail

inline FeasResult solve(const LmiProblem& problem, const LmiOptions& opt = {}) {
  problem.validate();
  const Index m = problem.num_vars();
  const Index nv = m + 1;  // y plus the margin t
  const std::size_t nblocks = problem.blocks().size();

  FeasResult result;
  result.y = Vector::Zero(m);
  if (nblocks == 0) {
    result.status = FeasStatus::Feasible;
    result.margin = std::numeric_limits<double>::infinity();
    return result;
  }

  // Blockwise positive rescaling leaves the feasible set unchanged.
  std::vector<double> scale(nblocks, 1.0);
  for (std::size_t b = 0; b < nblocks; ++b) {
    const LmiBlock& blk = problem.blocks()[b];
    double nrm = blk.constant.dense().norm();
    for (const auto& c : blk.coeffs) nrm = std::max(nrm, c.dense().norm());
    if (nrm > 0.0) scale[b] = 1.0 / nrm;
  }

  const double bound = problem.bound.value_or(opt.default_bound);
  std::vector<detail::SdpBlock> sdp;
  auto new_block = [&](Index n) {
    detail::SdpBlock blk{DenseMatrix::Zero(n, n), std::vector<DenseMatrix>(static_cast<std::size_t>(nv), DenseMatrix::Zero(n, n)),
                         std::vector<char>(static_cast<std::size_t>(nv), 0)};
    return blk;
  };
  for (std::size_t b = 0; b < nblocks; ++b) {
    const LmiBlock& src = problem.blocks()[b];
    const Index n = src.constant.size();
    auto blk = new_block(n);
    blk.c = scale[b] * src.constant.dense();
    for (Index l = 0; l < m; ++l) {
      const DenseMatrix& f = src.coeffs[static_cast<std::size_t>(l)].dense();
      if (f.cwiseAbs().maxCoeff() > 0.0) {
        blk.a[static_cast<std::size_t>(l)] = -scale[b] * f;
        blk.nonzero[static_cast<std::size_t>(l)] = 1;
      }
    }
    blk.a[static_cast<std::size_t>(m)] = DenseMatrix::Identity(n, n);
    blk.nonzero[static_cast<std::size_t>(m)] = 1;
    sdp.push_back(std::move(blk));
  }
  for (Index l = 0; l < m; ++l) {
    for (double sign : {1.0, -1.0}) {
      auto blk = new_block(1);
      blk.c(0, 0) = bound;
      blk.a[static_cast<std::size_t>(l)](0, 0) = sign;
      blk.nonzero[static_cast<std::size_t>(l)] = 1;
      sdp.push_back(std::move(blk));
    }
  }
  {
    auto blk = new_block(1);
    blk.c(0, 0) = opt.cap;
    blk.a[static_cast<std::size_t>(m)](0, 0) = 1.0;
    blk.nonzero[static_cast<std::size_t>(m)] = 1;
    sdp.push_back(std::move(blk));
  }
  Vector rhs_b = Vector::Zero(nv);
  rhs_b(m) = 1.0;

  double total_dim = 0.0;
  std::vector<DenseMatrix> x, s;
  for (const auto& blk : sdp) {
    const Index n = blk.c.rows();
    total_dim += static_cast<double>(n);
    x.push_back(DenseMatrix::Identity(n, n));
    s.push_back(DenseMatrix::Identity(n, n));
  }
  Vector y = Vector::Zero(nv);
  // Start y with t well below the smallest eigenvalue at y = 0 so S starts near C - A(y).
  double c_norm = 1.0;
  for (const auto& blk : sdp) c_norm = std::max(c_norm, blk.c.cwiseAbs().maxCoeff());

  auto a_of = [&](const std::vector<DenseMatrix>& mats) {
    Vector out = Vector::Zero(nv);
    for (std::size_t b = 0; b < sdp.size(); ++b)
      for (Index i = 0; i < nv; ++i)
        if (sdp[b].nonzero[static_cast<std::size_t>(i)])
          out(i) += sdp[b].a[static_cast<std::size_t>(i)].cwiseProduct(mats[b].transpose()).sum();
    return out;
  };

  Vector best_y = Vector::Zero(m);
  double best_margin = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& yy) {
    const Vector cand = yy.head(m);
    if (!cand.allFinite()) return;
    const double mg = point_margin(problem, cand);
    if (mg > best_margin) {
      best_margin = mg;
      best_y = cand;
    }
  };

  int iter = 0;
  for (; iter < opt.max_iters; ++iter) {
    double mu = 0.0;
    for (std::size_t b = 0; b < sdp.size(); ++b) mu += x[b].cwiseProduct(s[b]).sum();
    mu /= total_dim;

    std::vector<DenseMatrix> rd(sdp.size()), s_inv(sdp.size());
    double rd_norm = 0.0;
    for (std::size_t b = 0; b < sdp.size(); ++b) {
      DenseMatrix r = sdp[b].c - s[b];
      for (Index i = 0; i < nv; ++i)
        if (sdp[b].nonzero[static_cast<std::size_t>(i)]) r -= y(i) * sdp[b].a[static_cast<std::size_t>(i)];
      rd[b] = r;
      rd_norm = std::max(rd_norm, r.cwiseAbs().maxCoeff());
      s_inv[b] = detail::sym_part(s[b].llt().solve(DenseMatrix::Identity(s[b].rows(), s[b].cols())));
    }
    const Vector rp = rhs_b - a_of(x);
    const double rp_norm = rp.cwiseAbs().maxCoeff();

    if (iter % 4 == 0 || mu < 1e-9) consider(y);
    if (rp_norm < 1e-11 && rd_norm < 1e-11 * c_norm && mu < 1e-12) break;

    // Schur complement O_ij = sum_b tr(A_i X A_j S^{-1}).
    DenseMatrix o = DenseMatrix::Zero(nv, nv);
    for (std::size_t b = 0; b < sdp.size(); ++b) {
      for (Index j = 0; j < nv; ++j) {
        if (!sdp[b].nonzero[static_cast<std::size_t>(j)]) continue;
        const DenseMatrix g = x[b] * sdp[b].a[static_cast<std::size_t>(j)] * s_inv[b];
        for (Index i = 0; i < nv; ++i)
          if (sdp[b].nonzero[static_cast<std::size_t>(i)])
            o(i, j) += sdp[b].a[static_cast<std::size_t>(i)].cwiseProduct(g.transpose()).sum();
      }
    }
    o = detail::sym_part(o);
    Eigen::LDLT<DenseMatrix> ldlt(o);
    const bool use_ldlt = ldlt.info() == Eigen::Success && ldlt.isPositive();
    Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod;
    if (!use_ldlt) cod.compute(o);
    auto schur_solve = [&](const Vector& r) -> Vector { return use_ldlt ? Vector(ldlt.solve(r)) : Vector(cod.solve(r)); };

    std::vector<DenseMatrix> x_rd_sinv(sdp.size());
    for (std::size_t b = 0; b < sdp.size(); ++b) x_rd_sinv[b] = x[b] * rd[b] * s_inv[b];
    const Vector base_rhs = rhs_b + a_of(x_rd_sinv);

    auto direction = [&](double sigma_mu, const std::vector<DenseMatrix>* corr, Vector& dy, std::vector<DenseMatrix>& dx,
                         std::vector<DenseMatrix>& ds) {
      Vector r = base_rhs - sigma_mu * a_of(s_inv);
      std::vector<DenseMatrix> corr_term;
      if (corr) {
        corr_term.resize(sdp.size());
        for (std::size_t b = 0; b < sdp.size(); ++b) corr_term[b] = (*corr)[b];
        r += a_of(corr_term);
      }
      dy = schur_solve(r);
      dx.resize(sdp.size());
      ds.resize(sdp.size());
      for (std::size_t b = 0; b < sdp.size(); ++b) {
        DenseMatrix d = rd[b];
        for (Index i = 0; i < nv; ++i)
          if (sdp[b].nonzero[static_cast<std::size_t>(i)]) d -= dy(i) * sdp[b].a[static_cast<std::size_t>(i)];
        ds[b] = detail::sym_part(d);
        DenseMatrix w = sigma_mu * s_inv[b] - x[b] - x[b] * ds[b] * s_inv[b];
        if (corr) w -= corr_term[b];
        dx[b] = detail::sym_part(w);
      }
    };
    auto step_lengths = [&](const std::vector<DenseMatrix>& dx, const std::vector<DenseMatrix>& ds) {
      double ap = 1.0, ad = 1.0;
      for (std::size_t b = 0; b < sdp.size(); ++b) {
        ap = std::min(ap, detail::max_step(x[b], dx[b]));
        ad = std::min(ad, detail::max_step(s[b], ds[b]));
      }
      return std::pair{ap, ad};
    };

    Vector dy;
    std::vector<DenseMatrix> dx, ds;
    direction(0.0, nullptr, dy, dx, ds);
    auto [ap_aff, ad_aff] = step_lengths(dx, ds);
    double mu_aff = 0.0;
    for (std::size_t b = 0; b < sdp.size(); ++b)
      mu_aff += (x[b] + ap_aff * dx[b]).cwiseProduct(s[b] + ad_aff * ds[b]).sum();
    mu_aff /= total_dim;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    std::vector<DenseMatrix> corr(sdp.size());
    for (std::size_t b = 0; b < sdp.size(); ++b) corr[b] = dx[b] * ds[b] * s_inv[b];
    direction(sigma * mu, &corr, dy, dx, ds);
    auto [ap, ad] = step_lengths(dx, ds);
    ap = std::min(1.0, 0.95 * ap);
    ad = std::min(1.0, 0.95 * ad);
    if (!(ap > 1e-12) && !(ad > 1e-12)) break;
    for (std::size_t b = 0; b < sdp.size(); ++b) {
      x[b] = detail::sym_part(x[b] + ap * dx[b]);
      s[b] = detail::sym_part(s[b] + ad * ds[b]);
    }
    y += ad * dy;
    if (!y.allFinite()) break;
  }
  result.iterations = iter;
  consider(y);

  if (best_margin >= -opt.tol) {
    result.status = FeasStatus::Feasible;
    result.y = best_y;
    result.margin = best_margin;
    return result;
  }

  std::vector<SymMatrix> z;
  for (std::size_t b = 0; b < nblocks; ++b) z.push_back(SymMatrix::symmetrize(scale[b] * x[b]));
  const double tr = detail::total_trace(z);
  if (tr > 0.0 && std::isfinite(tr)) {
    for (auto& b : z) b *= 1.0 / tr;
    z = detail::polish_ray(problem, std::move(z));
    const double tr2 = detail::total_trace(z);
    if (tr2 > 0.0) {
      for (auto& b : z) b *= 1.0 / tr2;
      if (verify_ray(problem, z, opt.tol)) {
        result.status = FeasStatus::Infeasible;
        result.margin = detail::ray_pairing(problem, z, -1);
        result.ray = std::move(z);
        result.y = best_y;
        return result;
      }
    }
  }
  result.status = FeasStatus::Undetermined;
  result.y = best_y;
  result.margin = best_margin;
  return result;
}

}  // namespace psdrank
