#pragma once

// Psd factorizations M_ij = <A_i, B_j> with A_i, B_j psd of size k.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "psdrank/polyform.hpp"
#include "psdrank/symcore.hpp"

namespace psdrank {

inline constexpr double kSearchTol = 1e-6;
inline constexpr double kConstructedTol = 1e-8;

struct PsdFactorization {
  Index k = 0;
  std::vector<SymMatrix> a;  // row factors
  std::vector<SymMatrix> b;  // column factors
  double residual = 0.0;

  Index rows() const { return static_cast<Index>(a.size()); }
  Index cols() const { return static_cast<Index>(b.size()); }

  DenseMatrix product() const {
    DenseMatrix m(rows(), cols());
    for (Index i = 0; i < rows(); ++i)
      for (Index j = 0; j < cols(); ++j) m(i, j) = inner(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);
    return m;
  }

  friend bool operator==(const PsdFactorization& x, const PsdFactorization& y) {
    return x.k == y.k && x.a == y.a && x.b == y.b && x.residual == y.residual;
  }
};

struct VerifyReport {
  double max_residual = 0.0;
  double min_factor_eig = 0.0;
  bool pass = false;
};

inline VerifyReport verify_factorization(const DenseMatrix& m, const PsdFactorization& f, double tol) {
  if (m.rows() != f.rows() || m.cols() != f.cols())
    throw Error(ErrorCode::DimensionMismatch, "factorization has " + std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                                                  " factors, matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  for (const auto* list : {&f.a, &f.b})
    for (const auto& s : *list)
      if (s.size() != f.k) throw Error(ErrorCode::DimensionMismatch, "factor size differs from k");
  VerifyReport rep;
  rep.min_factor_eig = std::numeric_limits<double>::infinity();
  for (const auto* list : {&f.a, &f.b})
    for (const auto& s : *list) rep.min_factor_eig = std::min(rep.min_factor_eig, f.k == 0 ? 0.0 : min_eig(s));
  if (f.a.empty() && f.b.empty()) rep.min_factor_eig = 0.0;
  rep.max_residual = m.size() == 0 ? 0.0 : max_abs(f.product() - m);
  rep.pass = std::isfinite(rep.max_residual) && rep.max_residual <= tol && rep.min_factor_eig >= -tol;
  return rep;
}

inline VerifyReport verify_factorization(const NonnegMatrix& m, const PsdFactorization& f, double tol) {
  return verify_factorization(m.matrix(), f, tol);
}

struct SearchConfig {
  int restarts = 32;
  int max_iters = 1500;
  double tol = kSearchTol;  // relative to max |M|
  std::uint64_t seed = 0;
  int jobs = 1;
};

namespace detail {

// Levenberg-Marquardt on Gram factors A_i = X_i X_i^T, B_j = Y_j Y_j^T.
// Works on m scaled to max entry 1; returns the factors on success.
struct GramSearch {
  const DenseMatrix& m;
  Index k;
  Index p, q, kk;

  GramSearch(const DenseMatrix& target, Index size) : m(target), k(size), p(target.rows()), q(target.cols()), kk(size * size) {}

  Index unknowns() const { return (p + q) * kk; }

  auto block(Vector& theta, Index slot) const { return Eigen::Map<DenseMatrix>(theta.data() + slot * kk, k, k); }
  auto block(const Vector& theta, Index slot) const { return Eigen::Map<const DenseMatrix>(theta.data() + slot * kk, k, k); }

  void grams(const Vector& theta, std::vector<DenseMatrix>& ga, std::vector<DenseMatrix>& gb) const {
    ga.resize(static_cast<std::size_t>(p));
    gb.resize(static_cast<std::size_t>(q));
    for (Index i = 0; i < p; ++i) {
      const auto x = block(theta, i);
      ga[static_cast<std::size_t>(i)] = x * x.transpose();
    }
    for (Index j = 0; j < q; ++j) {
      const auto y = block(theta, p + j);
      gb[static_cast<std::size_t>(j)] = y * y.transpose();
    }
  }

  Vector residual(const Vector& theta) const {
    std::vector<DenseMatrix> ga, gb;
    grams(theta, ga, gb);
    Vector r(p * q);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < q; ++j)
        r(i * q + j) = (ga[static_cast<std::size_t>(i)].cwiseProduct(gb[static_cast<std::size_t>(j)])).sum() - m(i, j);
    return r;
  }

  DenseMatrix jacobian(const Vector& theta) const {
    std::vector<DenseMatrix> ga, gb;
    grams(theta, ga, gb);
    DenseMatrix jac = DenseMatrix::Zero(p * q, unknowns());
    for (Index i = 0; i < p; ++i) {
      const auto x = block(theta, i);
      for (Index j = 0; j < q; ++j) {
        const auto y = block(theta, p + j);
        const DenseMatrix dx = 2.0 * gb[static_cast<std::size_t>(j)] * x;
        const DenseMatrix dy = 2.0 * ga[static_cast<std::size_t>(i)] * y;
        const Index row = i * q + j;
        jac.block(row, i * kk, 1, kk) = Eigen::Map<const Eigen::RowVectorXd>(dx.data(), kk);
        jac.block(row, (p + j) * kk, 1, kk) = Eigen::Map<const Eigen::RowVectorXd>(dy.data(), kk);
      }
    }
    return jac;
  }

  std::optional<Vector> run(std::mt19937_64& rng, int max_iters, double target) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double mean = std::max(m.mean(), 1e-3);
    const double sigma = std::pow(mean / static_cast<double>(k * k * k), 0.25);
    Vector theta(unknowns());
    for (Index t = 0; t < theta.size(); ++t) theta(t) = sigma * normal(rng);

    Vector r = residual(theta);
    double cost = 0.5 * r.squaredNorm();
    double lambda = -1.0, nu = 2.0;
    double last_check = cost;
    for (int it = 0; it < max_iters; ++it) {
      if (r.cwiseAbs().maxCoeff() <= target) return theta;
      const DenseMatrix jac = jacobian(theta);
      const bool dual = jac.rows() <= jac.cols();
      DenseMatrix normal_eq = dual ? DenseMatrix(jac * jac.transpose()) : DenseMatrix(jac.transpose() * jac);
      const Vector rhs = dual ? Vector(r) : Vector(jac.transpose() * r);
      if (lambda < 0.0) lambda = 1e-3 * std::max(normal_eq.diagonal().maxCoeff(), 1e-12);
      bool accepted = false;
      for (int inner_it = 0; inner_it < 30 && !accepted; ++inner_it) {
        DenseMatrix sys = normal_eq;
        sys.diagonal().array() += lambda;
        const Vector sol = sys.llt().solve(rhs);
        const Vector step = dual ? Vector(-jac.transpose() * sol) : Vector(-sol);
        const Vector trial = theta + step;
        const Vector r_trial = residual(trial);
        const double cost_trial = 0.5 * r_trial.squaredNorm();
        const double predicted = 0.5 * (r.squaredNorm() - (r + jac * step).squaredNorm());
        if (std::isfinite(cost_trial) && cost_trial < cost && predicted > 0.0) {
          const double rho = (cost - cost_trial) / predicted;
          theta = trial;
          r = r_trial;
          cost = cost_trial;
          lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
          nu = 2.0;
          accepted = true;
        } else {
          lambda *= nu;
          nu *= 2.0;
        }
      }
      if (!accepted) return std::nullopt;
      // Give up on a restart that has stalled at a nonzero local minimum.
      if (it % 50 == 49) {
        if (cost > 0.9 * last_check && cost > target * target) return std::nullopt;
        last_check = cost;
      }
    }
    if (r.cwiseAbs().maxCoeff() <= target) return theta;
    return std::nullopt;
  }

  PsdFactorization extract(const Vector& theta, double scale) const {
    PsdFactorization f;
    f.k = k;
    const double s = std::sqrt(scale);
    for (Index i = 0; i < p; ++i) {
      const auto x = block(theta, i);
      f.a.push_back(SymMatrix::symmetrize(s * x * x.transpose()));
    }
    for (Index j = 0; j < q; ++j) {
      const auto y = block(theta, p + j);
      f.b.push_back(SymMatrix::symmetrize(s * y * y.transpose()));
    }
    return f;
  }
};

// Runs restarts [0, count) with up to jobs threads and returns the result of
// the lowest-index restart that succeeded, so output does not depend on jobs.
template <class Attempt>
auto first_success(int count, int jobs, Attempt attempt) -> decltype(attempt(0)) {
  using Result = decltype(attempt(0));
  jobs = std::max(1, jobs);
  for (int start = 0; start < count; start += jobs) {
    const int batch = std::min(jobs, count - start);
    std::vector<Result> results(static_cast<std::size_t>(batch));
    if (batch == 1) {
      results[0] = attempt(start);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < batch; ++t) pool.emplace_back([&, t] { results[static_cast<std::size_t>(t)] = attempt(start + t); });
      for (auto& th : pool) th.join();
    }
    for (auto& r : results)
      if (r) return r;
  }
  return Result{};
}

}  // namespace detail

// Numeric search for a size-k psd factorization. An empty result says nothing
// about whether one exists.
inline std::optional<PsdFactorization> search_factorization(const DenseMatrix& m, Index k, const SearchConfig& cfg = {}) {
  require_finite(m, "matrix");
  if (k < 1) throw Error(ErrorCode::DomainError, "factor size must be >= 1");
  if (cfg.restarts < 1 || cfg.max_iters < 1) throw Error(ErrorCode::DomainError, "search counts must be positive");
  if (m.size() > 0 && m.minCoeff() < 0.0) throw Error(ErrorCode::DomainError, "matrix has negative entries");
  const double scale = max_abs(m);
  const double tol = cfg.tol * std::max(scale, 1e-300);
  if (scale == 0.0) {
    PsdFactorization f;
    f.k = k;
    f.a.assign(static_cast<std::size_t>(m.rows()), SymMatrix(k));
    f.b.assign(static_cast<std::size_t>(m.cols()), SymMatrix(k));
    return f;
  }
  const DenseMatrix normalized = m / scale;
  const detail::GramSearch search(normalized, k);
  return detail::first_success(cfg.restarts, cfg.jobs, [&](int index) -> std::optional<PsdFactorization> {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(index));
    const auto theta = search.run(rng, cfg.max_iters, 0.25 * cfg.tol);
    if (!theta) return std::nullopt;
    PsdFactorization f = search.extract(*theta, scale);
    const VerifyReport rep = verify_factorization(m, f, tol);
    if (!rep.pass) return std::nullopt;
    f.residual = rep.max_residual;
    return f;
  });
}

inline std::optional<PsdFactorization> search_factorization(const NonnegMatrix& m, Index k, const SearchConfig& cfg = {}) {
  return search_factorization(m.matrix(), k, cfg);
}

namespace detail {

inline SymMatrix block_diag(const SymMatrix& x, const SymMatrix& y) {
  DenseMatrix d = DenseMatrix::Zero(x.size() + y.size(), x.size() + y.size());
  d.topLeftCorner(x.size(), x.size()) = x.dense();
  d.bottomRightCorner(y.size(), y.size()) = y.dense();
  return SymMatrix::from_upper(d);
}

}  // namespace detail

// Factorization of [M1 M2] from factorizations of M1 and M2.
inline PsdFactorization concat_factorizations(const PsdFactorization& f1, const PsdFactorization& f2) {
  if (f1.rows() != f2.rows())
    throw Error(ErrorCode::RowCountMismatch,
                "row counts differ: " + std::to_string(f1.rows()) + " vs " + std::to_string(f2.rows()));
  PsdFactorization out;
  out.k = f1.k + f2.k;
  const SymMatrix z1(f1.k), z2(f2.k);
  for (std::size_t i = 0; i < f1.a.size(); ++i) out.a.push_back(detail::block_diag(f1.a[i], f2.a[i]));
  for (const auto& b : f1.b) out.b.push_back(detail::block_diag(b, z2));
  for (const auto& c : f2.b) out.b.push_back(detail::block_diag(z1, c));
  out.residual = f1.residual + f2.residual;
  return out;
}

inline PsdFactorization transpose_factorization(const PsdFactorization& f) {
  PsdFactorization t = f;
  std::swap(t.a, t.b);
  return t;
}

inline PsdFactorization scale_factorization(const PsdFactorization& f, const Vector& r, const Vector& s) {
  if (r.size() != f.rows() || s.size() != f.cols()) throw Error(ErrorCode::DimensionMismatch, "scalar vector length");
  for (Index i = 0; i < r.size(); ++i)
    if (!(r(i) > 0.0)) throw Error(ErrorCode::NonpositiveScalar, "row scalar is not positive", static_cast<std::size_t>(i));
  for (Index j = 0; j < s.size(); ++j)
    if (!(s(j) > 0.0)) throw Error(ErrorCode::NonpositiveScalar, "column scalar is not positive", static_cast<std::size_t>(j));
  PsdFactorization out = f;
  for (Index i = 0; i < r.size(); ++i) out.a[static_cast<std::size_t>(i)] *= r(i);
  for (Index j = 0; j < s.size(); ++j) out.b[static_cast<std::size_t>(j)] *= s(j);
  out.residual = f.residual * std::max(r.maxCoeff(), 1.0) * std::max(s.maxCoeff(), 1.0);
  return out;
}

// Places a factorization of a submatrix into a p x q frame: rows[i] and
// cols[j] give the positions, everything else gets zero factors.
inline PsdFactorization embed_factorization(const PsdFactorization& f, const std::vector<Index>& rows, const std::vector<Index>& cols,
                                            Index p, Index q) {
  if (static_cast<Index>(rows.size()) != f.rows() || static_cast<Index>(cols.size()) != f.cols())
    throw Error(ErrorCode::DimensionMismatch, "index lists do not match the factorization");
  PsdFactorization out;
  out.k = f.k;
  out.residual = f.residual;
  out.a.assign(static_cast<std::size_t>(p), SymMatrix(f.k));
  out.b.assign(static_cast<std::size_t>(q), SymMatrix(f.k));
  for (std::size_t i = 0; i < rows.size(); ++i) out.a.at(static_cast<std::size_t>(rows[i])) = f.a[i];
  for (std::size_t j = 0; j < cols.size(); ++j) out.b.at(static_cast<std::size_t>(cols[j])) = f.b[j];
  return out;
}

// Factorization of the matrix a nested pair was built from, given one of pair.normalized.
inline PsdFactorization restore_to_source(const NestedPair& pair, const PsdFactorization& f) {
  const PsdFactorization unscaled = scale_factorization(f, pair.row_scalings.cwiseInverse(), Vector::Ones(f.cols()));
  return embed_factorization(unscaled, pair.kept_rows, pair.kept_cols, pair.source_rows, pair.source_cols);
}

inline constexpr Index kChunkColumns = 6;

// Diagonal factorization of size q: A_i = diag(row i), B_j = e_j e_j^T.
inline PsdFactorization diagonal_factorization(const DenseMatrix& m) {
  PsdFactorization f;
  f.k = m.cols();
  for (Index i = 0; i < m.rows(); ++i) f.a.push_back(SymMatrix::diagonal(m.row(i).transpose()));
  for (Index j = 0; j < m.cols(); ++j) {
    SymMatrix e(m.cols());
    e.set(j, j, 1.0);
    f.b.push_back(e);
  }
  return f;
}

// Factorization of a nonnegative matrix of rank at most 3 with size at most
// 4 * ceil(min(p, q) / 6): columns of the (transposed if needed) matrix are cut
// into blocks of at most six, each block gets a size-4 factorization, and the
// blocks are concatenated.
inline PsdFactorization rank3_upper_factorize(const NonnegMatrix& input, const SearchConfig& cfg = {}) {
  const DenseMatrix& full = input.matrix();
  const Index rank = numerical_rank(full);
  if (rank > 3) throw Error(ErrorCode::RankMismatch, "matrix rank is " + std::to_string(rank) + ", expected at most 3");
  const bool flip = full.rows() < full.cols();
  const DenseMatrix m = flip ? DenseMatrix(full.transpose()) : full;

  std::vector<Index> rows, cols;
  for (Index i = 0; i < m.rows(); ++i)
    if (m.row(i).cwiseAbs().maxCoeff() > 0.0) rows.push_back(i);
  for (Index j = 0; j < m.cols(); ++j)
    if (m.col(j).cwiseAbs().maxCoeff() > 0.0) cols.push_back(j);

  PsdFactorization core;
  core.a.assign(rows.size(), SymMatrix(0));
  const Index q = static_cast<Index>(cols.size());
  for (Index start = 0, chunk = 0; start < q; start += kChunkColumns, ++chunk) {
    const Index width = std::min(kChunkColumns, q - start);
    DenseMatrix piece(static_cast<Index>(rows.size()), width);
    for (Index i = 0; i < piece.rows(); ++i)
      for (Index j = 0; j < width; ++j) piece(i, j) = m(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(start + j)]);
    PsdFactorization part;
    if (width <= 4) {
      part = diagonal_factorization(piece);
    } else {
      SearchConfig sub = cfg;
      sub.tol = 0.5 * cfg.tol * max_abs(full) / std::max(max_abs(piece), 1e-300);
      sub.tol = std::min(sub.tol, cfg.tol);
      sub.seed = cfg.seed + 7919 * static_cast<std::uint64_t>(chunk);
      auto found = search_factorization(piece, 4, sub);
      if (!found) throw Error(ErrorCode::SearchFailed, "no size-4 factorization found for column block", static_cast<std::size_t>(chunk));
      part = std::move(*found);
    }
    core = core.k == 0 && core.b.empty() ? part : concat_factorizations(core, part);
  }

  const Index k = std::max<Index>(core.k, 1);
  PsdFactorization out;
  out.k = k;
  auto pad = [&](const SymMatrix& s) {
    if (s.size() == k) return s;
    DenseMatrix d = DenseMatrix::Zero(k, k);
    d.topLeftCorner(s.size(), s.size()) = s.dense();
    return SymMatrix::from_upper(d);
  };
  out.a.assign(static_cast<std::size_t>(m.rows()), SymMatrix(k));
  out.b.assign(static_cast<std::size_t>(m.cols()), SymMatrix(k));
  for (std::size_t i = 0; i < rows.size(); ++i) out.a[static_cast<std::size_t>(rows[i])] = pad(core.a[i]);
  for (std::size_t j = 0; j < cols.size(); ++j) out.b[static_cast<std::size_t>(cols[j])] = pad(core.b[j]);
  if (flip) out = transpose_factorization(out);

  const VerifyReport rep = verify_factorization(full, out, cfg.tol * std::max(max_abs(full), 1e-300));
  if (!rep.pass) throw Error(ErrorCode::SearchFailed, "assembled factorization failed verification");
  out.residual = rep.max_residual;
  return out;
}

}  // namespace psdrank
