// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "lmi_planted.hpp"
#include "planted.hpp"
#include "polygons.hpp"
#include "psdrank/bounds.hpp"
#include "psdrank/liftkit.hpp"
#include "psdrank/minrank.hpp"
#include "test_support.hpp"

namespace psdrank {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome m_epsilon_threshold() {
  const auto start = Clock::now();
  const double boundary = 1.0 - std::sqrt(0.5);
  int bad = 0;
  std::string notes;
  for (double eps : {0.30, 0.40, 0.50, 0.75, 0.90}) {
    if (std::abs(eps - boundary) < 1e-3) continue;
    const NonnegMatrix m = make_m_epsilon(eps);
    const Verdict v = decide_rank2(m);
    const bool cert_ok = v.conic && verify_conic(*v.conic, pair_from_matrix(m, 3)).pass;
    const bool fact_ok = v.factorization && verify_factorization(m, *v.factorization, kConstructedTol * max_abs(m.matrix())).pass;
    if (v.answer != Answer::Yes || !cert_ok || !fact_ok) {
      ++bad;
      notes += fmt(" eps=%.2f:%s", eps, to_string(v.answer));
    }
  }
  for (double eps : {0.00, 0.10, 0.20, 0.25}) {
    if (std::abs(eps - boundary) < 1e-3) continue;
    const Verdict v = decide_rank2(make_m_epsilon(eps));
    const bool ok = v.answer != Answer::Yes && (eps > 0.20 || v.answer == Answer::NoCertified);
    if (!ok) {
      ++bad;
      notes += fmt(" eps=%.2f:%s", eps, to_string(v.answer));
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {bad == 0 && secs <= 5.0, fmt("%d wrong answers, %.2f s (limit 5 s)", bad, secs) + notes};
}

// ---------------------------------------------------------------- 2

Outcome hexagon_pipeline() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  int structural = 0, found = 0;
  double worst_proj = 0.0;
  for (int t = 0; t < 100; ++t) {
    const VPolytope hex = testing::random_convex_polygon(rng, 6);
    const HexagonCanonical hc = normalize_hexagon(hex);
    const OctahedronLift ol = hex_octahedron_lift(hc);
    bool ok = hc.invariants_hold() && ol.octahedron.sign_conditions_hold() && is_biplanar(ol.octahedron).biplanar;
    for (std::size_t o = 0; o < 6; ++o) {
      const Eigen::Vector2d back = hc.unapply(ol.proj * ol.octahedron.vertices[o]);
      const Vector& orig = hex.vertices[static_cast<std::size_t>(hc.order[static_cast<std::size_t>(kOctahedronToHexagon[o])])];
      const double err = (back - orig).cwiseAbs().maxCoeff();
      worst_proj = std::max(worst_proj, err);
      ok = ok && err <= 1e-9;
    }
    if (ok) ++structural;
    SearchConfig cfg;
    cfg.restarts = 32;
    cfg.seed = 1000 + static_cast<std::uint64_t>(t);
    const NonnegMatrix s = testing::polygon_slack(hex);
    const auto f = search_factorization(s, 4, cfg);
    if (f && f->residual <= 1e-6 * max_abs(s.matrix()) && verify_factorization(s, *f, 1e-6 * max_abs(s.matrix())).pass) ++found;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {structural == 100 && found >= 95 && secs <= 120.0,
          fmt("structure %d/100, size-4 factorizations %d/100 (need 95), projection error %.1e, %.1f s (limit 120 s)", structural,
              found, worst_proj, secs)};
}

// ---------------------------------------------------------------- 3

Outcome small_polygons() {
  SearchConfig cfg;
  auto finds = [&](const VPolytope& p, Index k) {
    const NonnegMatrix s = testing::polygon_slack(p);
    const auto f = search_factorization(s, k, cfg);
    return f && verify_factorization(s, *f, 1e-6 * max_abs(s.matrix())).pass;
  };
  const VPolytope triangle({Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)});
  const VPolytope square({Eigen::Vector2d(1, 1), Eigen::Vector2d(-1, 1), Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, -1)});
  const bool tri3 = finds(triangle, 3);
  const bool sq3 = finds(square, 3);
  const bool pent4 = finds(testing::regular_polygon(5), 4);
  const Verdict v = decide_rank2(testing::polygon_slack(triangle));
  const bool tri_not2 = v.answer != Answer::Yes;
  return {tri3 && sq3 && pent4 && tri_not2, fmt("triangle k=3 %s, square k=3 %s, pentagon k=4 %s, triangle size-2 answer %s",
                                                tri3 ? "found" : "missing", sq3 ? "found" : "missing", pent4 ? "found" : "missing",
                                                to_string(v.answer))};
}

// ---------------------------------------------------------------- 4

Outcome rank3_upper_bound() {
  const auto start = Clock::now();
  std::mt19937_64 rng(3303);
  int ok = 0;
  Index worst = 0;
  for (int t = 0; t < 20; ++t) {
    const NonnegMatrix m(testing::random_nonneg_rank(rng, 9, 13, 3));
    SearchConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(t);
    try {
      const PsdFactorization f = rank3_upper_factorize(m, cfg);
      worst = std::max(worst, f.k);
      if (f.k <= 8 && verify_factorization(m, f, 1e-6 * max_abs(m.matrix())).pass) ++ok;
    } catch (const Error&) {
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {ok == 20 && secs <= 300.0, fmt("%d/20 verified, largest size %ld (bound 8), %.1f s (limit 300 s)", ok, static_cast<long>(worst), secs)};
}

// ---------------------------------------------------------------- 5

bool certificate_checks(const Verdict& v, const NonnegMatrix& m, Index k) {
  if (v.answer != Answer::Yes || !v.factorization) return false;
  bool cert = false;
  if (v.conic) cert = verify_conic(*v.conic, pair_from_matrix(m, 3)).pass;
  if (v.bilinear) cert = verify_bilinear(*v.bilinear, build_bilinear_system(m, k), std::max(kBilinearTol, 10.0 * kSearchTol)).pass;
  if (!cert) return false;
  const double tol = 1e-6 * std::max(1.0, max_abs(m.matrix()));
  return v.factorization->k == k && verify_factorization(m, *v.factorization, tol).pass;
}

Outcome planted_min_rank() {
  std::mt19937_64 rng(5151);
  int yes2 = 0, yes3 = 0;
  for (int t = 0; t < 30; ++t) {
    const Index k = t < 20 ? 2 : 3;
    const NonnegMatrix m(testing::planted_psd_product(rng, 8, 8, k));
    SearchConfig cfg;
    cfg.restarts = 64;
    cfg.seed = static_cast<std::uint64_t>(t);
    Verdict v;
    try {
      v = min_psd_rank_decide(m, k, cfg);
    } catch (const Error&) {
      continue;
    }
    if (certificate_checks(v, m, k)) ++(k == 2 ? yes2 : yes3);
  }
  const bool pass = yes2 >= 18 && yes3 >= 9;
  return {pass, fmt("k=2 %d/20, k=3 %d/10 verified (need 90%% of each)", yes2, yes3)};
}

// ---------------------------------------------------------------- 6

Outcome bound_values() {
  int bad = 0;
  for (std::int64_t k = 1; k <= 20; ++k) bad += dim_count_lower(k * (k + 1) / 2) != k;
  bad += generic_lower(2, 129) != 5;
  bad += generic_lower(2, 128) != 4;
  bad += polygon_upper(6) != 4;
  bad += polygon_upper(5) != 4;
  bad += polygon_upper(3) != 3;
  bad += rank3_upper(6, 100) != 4;
  return {bad == 0, fmt("%d mismatches", bad)};
}

// ---------------------------------------------------------------- 7

Outcome lift_calculus() {
  std::mt19937_64 rng(77);
  const HPolyhedron tri(2, {{Eigen::Vector2d(-1, 0), 0}, {Eigen::Vector2d(0, -1), 0}, {Eigen::Vector2d(1, 1), 1}});
  const SpectraLift bases[2] = {disk_lift(), diagonal_lift(tri)};
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const SpectraLift& base = bases[t % 2];
    const Vector a = testing::gaussian(rng, 2, 1);
    const double a0 = testing::gaussian(rng, 1, 1)(0, 0);
    const SpectraLift aug = augment_facet(base, a0, a);
    const Vector x = testing::uniform(rng, 2, 1, -1.5, 1.5);
    mismatches += aug.contains(x) != (base.contains(x) && a0 + a.dot(x) >= 0.0);
  }

  const double h = std::sqrt(0.5);
  const PsdFactorization one =
      factorization_from_lift(disk_lift(), VPolytope({Eigen::Vector2d(h, h)}), HPolyhedron(2, {{Eigen::Vector2d(1, 0), 1}}));
  Eigen::Matrix2d vertex;
  vertex << 1 + h, h, h, 1 - h;
  const double facet_err = max_abs(one.b[0].dense() - Eigen::Matrix2d(Eigen::Vector2d(0, 1).asDiagonal()));
  const double vertex_err = max_abs(one.a[0].dense() - vertex);

  const VPolytope inner({Eigen::Vector2d(h, h), Eigen::Vector2d(-h, h), Eigen::Vector2d(-h, -h), Eigen::Vector2d(h, -h)});
  const HPolyhedron box(2, {{Eigen::Vector2d(1, 0), 1}, {Eigen::Vector2d(0, 1), 1}, {Eigen::Vector2d(-1, 0), 1}, {Eigen::Vector2d(0, -1), 1}});
  const PsdFactorization sq = factorization_from_lift(disk_lift(), inner, box);
  const bool sq_ok = sq.k == 2 && verify_factorization(slack_matrix(inner, box), sq, 1e-8).pass;

  return {mismatches == 0 && facet_err <= 1e-10 && vertex_err <= 1e-10 && sq_ok,
          fmt("membership mismatches %d/1000, facet factor error %.1e, vertex factor error %.1e, square factorization %s", mismatches,
              facet_err, vertex_err, sq_ok ? "verified" : "failed")};
}

// ---------------------------------------------------------------- 8

Outcome lmi_soundness() {
  std::mt19937_64 rng(8888);
  int unverified = 0, resolved = 0, wrong = 0;
  auto check = [&](const LmiProblem& p, bool planted_feasible) {
    const FeasResult r = solve(p);
    if (r.status == FeasStatus::Feasible) {
      ++resolved;
      unverified += !verify_point(p, r.y, 0.0);
      wrong += !planted_feasible;
    } else if (r.status == FeasStatus::Infeasible) {
      ++resolved;
      unverified += !verify_ray(p, r.ray, 1e-9);
      wrong += planted_feasible;
    }
  };
  for (int t = 0; t < 200; ++t) check(testing::planted_feasible(rng), true);
  for (int t = 0; t < 50; ++t) check(testing::planted_infeasible(rng), false);
  return {unverified == 0 && wrong == 0 && resolved >= 238,
          fmt("resolved %d/250 (need 238), unverified claims %d, contradicting the plant %d", resolved, unverified, wrong)};
}

}  // namespace
}  // namespace psdrank

int main() {
  using psdrank::Outcome;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 M_eps size-2 threshold", psdrank::m_epsilon_threshold},
      {"2 hexagon pipeline", psdrank::hexagon_pipeline},
      {"3 small polygon ranks", psdrank::small_polygons},
      {"4 rank-three upper bound", psdrank::rank3_upper_bound},
      {"5 planted min psd rank", psdrank::planted_min_rank},
      {"6 bound calculators", psdrank::bound_values},
      {"7 lift calculus", psdrank::lift_calculus},
      {"8 lmi soundness", psdrank::lmi_soundness},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
