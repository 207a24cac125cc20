#pragma once

// Closed-form psd rank bounds and a bracket for a given matrix.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psdrank/minrank.hpp"
#include "psdrank/polyform.hpp"
#include "psdrank/psdfact.hpp"

namespace psdrank {

namespace detail {
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }
}  // namespace detail

// Smallest k with k(k+1)/2 >= r.
inline std::int64_t dim_count_lower(std::int64_t r) {
  if (r < 1) throw Error(ErrorCode::DomainError, "rank must be >= 1");
  std::int64_t k = 1;
  while (k * (k + 1) / 2 < r) ++k;
  return k;
}

// Smallest k with k^4 >= n v. Holds for generic polytopes only.
inline std::int64_t generic_lower(std::int64_t n, std::int64_t v) {
  if (n < 1 || v < n + 1) throw Error(ErrorCode::DomainError, "need n >= 1 and v >= n + 1");
  const std::int64_t target = n * v;
  std::int64_t k = 1;
  while (k * k * k * k < target) ++k;
  return k;
}

inline std::int64_t polygon_upper(std::int64_t v) {
  if (v < 3) throw Error(ErrorCode::DomainError, "a polygon has at least 3 vertices");
  return std::min(4 * detail::ceil_div(v, 6), v);
}

inline std::int64_t rank3_upper(std::int64_t p, std::int64_t q) {
  if (p < 1 || q < 1) throw Error(ErrorCode::DomainError, "dimensions must be >= 1");
  const std::int64_t m = std::min(p, q);
  return std::min(4 * detail::ceil_div(m, 6), m);
}

// Nonnegative rank bound for v-gons, for comparison only.
inline std::int64_t nn_rank_polygon_upper_info(std::int64_t v) {
  if (v < 3) throw Error(ErrorCode::DomainError, "a polygon has at least 3 vertices");
  return detail::ceil_div(6 * v, 7);
}

struct Bound {
  std::int64_t value = 0;
  std::string source;
};

struct BoundsReport {
  Index rank = 0;
  Bound lower, upper;
  std::optional<PsdFactorization> witness;  // factorization achieving upper, when one was built
  std::vector<std::string> notes;

  bool pinned() const { return lower.value == upper.value; }
};

struct BracketOptions {
  bool decide = true;  // run the exact size-2 decision when rank is 3
  bool search = true;  // try numeric factorizations between the bounds
  SearchConfig search_cfg{8, 1500, kSearchTol, 0, 1};
};

inline BoundsReport bracket(const NonnegMatrix& m, const BracketOptions& opt = {}) {
  BoundsReport rep;
  const DenseMatrix& a = m.matrix();
  rep.rank = numerical_rank(a);
  if (rep.rank == 0) {
    rep.lower = {0, "zero matrix"};
    rep.upper = {0, "zero matrix"};
    return rep;
  }
  rep.lower = {dim_count_lower(rep.rank), "dimension count from rank " + std::to_string(rep.rank)};
  rep.upper = {std::min(a.rows(), a.cols()), "diagonal factorization"};

  auto improve_upper = [&](PsdFactorization f, const std::string& source) {
    if (f.k < rep.upper.value) {
      rep.upper = {f.k, source};
      rep.witness = std::move(f);
    }
  };

  if (rep.rank == 1) {
    rep.upper = {1, "rank one"};
    return rep;
  }
  if (rep.rank == 3) {
    const std::int64_t r3 = rank3_upper(a.rows(), a.cols());
    if (r3 < rep.upper.value) rep.upper = {r3, "rank-three column blocks of six"};
    if (opt.decide) {
      const Verdict v = decide_rank2(m);
      if (v.answer == Answer::Yes && v.factorization) {
        improve_upper(*v.factorization, "verified size-2 factorization from an ellipse certificate");
      } else if (v.answer == Answer::NoCertified) {
        rep.lower = {3, "certified: no ellipse fits between the nested polygons"};
      } else {
        rep.notes.push_back("size-2 decision inconclusive: " + v.diagnostics);
      }
    }
  }
  if (opt.search) {
    for (std::int64_t k = rep.lower.value; k < rep.upper.value; ++k) {
      SearchConfig cfg = opt.search_cfg;
      auto f = search_factorization(a, static_cast<Index>(k), cfg);
      if (f) {
        improve_upper(std::move(*f), "verified size-" + std::to_string(k) + " factorization from numeric search");
        break;
      }
    }
  }
  if (!rep.pinned()) rep.notes.push_back("numeric search failures do not raise the lower bound");
  return rep;
}

}  // namespace psdrank
