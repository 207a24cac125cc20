#pragma once

// Command-line front end. Every verb prints one JSON document.
// Exit codes: 0 yes/pass, 1 no/fail, 2 not found, 3 input error.

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "psdrank/io.hpp"

namespace psdrank::cli {

enum Exit : int { kYes = 0, kNo = 1, kNotFound = 2, kInputError = 3 };

inline const std::vector<std::string> kVerbs{"slack",     "pair",   "mexample", "hexlift", "augment", "factorize",
                                             "rank3fact", "verify", "decide2",  "minrank", "bounds"};

struct Options {
  std::string verb;
  std::vector<std::string> in;
  std::string out;
  std::optional<Index> k;
  std::optional<double> epsilon;
  std::optional<double> tol;
  std::uint64_t seed = 0;
  int restarts = 32;
  int jobs = 1;
  std::string format = "json";
};

namespace detail {

using io::Json;

inline std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::InvalidInput, "cannot open input file " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline Json parse_json(const std::string& text, const std::string& path) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, "malformed JSON in " + path + ": " + e.what());
  }
}

inline const std::string& input(const Options& o, std::size_t slot) {
  if (o.in.size() <= slot)
    throw Error(ErrorCode::InvalidInput, o.verb + " needs " + std::to_string(slot + 1) + " --in file(s)");
  return o.in[slot];
}

inline NonnegMatrix read_matrix(const Options& o, std::size_t slot = 0) {
  const std::string& path = input(o, slot);
  const std::string text = read_text(path);
  if (o.format == "csv") return io::matrix_from_csv(text);
  return io::matrix_from_json(parse_json(text, path));
}

inline Json read_doc(const Options& o, std::size_t slot) {
  const std::string& path = input(o, slot);
  return parse_json(read_text(path), path);
}

inline Index need_k(const Options& o) {
  if (!o.k) throw Error(ErrorCode::InvalidInput, o.verb + " needs --k");
  return *o.k;
}

inline SearchConfig search_config(const Options& o) {
  SearchConfig cfg;
  cfg.restarts = o.restarts;
  cfg.seed = o.seed;
  cfg.jobs = o.jobs;
  if (o.tol) cfg.tol = *o.tol;
  return cfg;
}

inline int verdict_exit(const Verdict& v) {
  switch (v.answer) {
    case Answer::Yes: return kYes;
    case Answer::NoCertified: return kNo;
    case Answer::NotFound: return kNotFound;
  }
  return kNotFound;
}

struct Result {
  Json doc;
  int code = kYes;
};

inline Result slack(const Options& o) {
  const Json doc = read_doc(o, 0);
  const VPolytope p = io::vpolytope_from_json(doc);
  HPolyhedron q;
  if (doc.contains("inequalities")) {
    q = io::hpolyhedron_from_json(doc);
  } else if (p.n == 2) {
    q = polygon_facets(p);
  } else {
    throw Error(ErrorCode::InvalidInput, "\"inequalities\" required outside the plane");
  }
  return {io::to_json(slack_matrix(p, q))};
}

inline Result pair(const Options& o) {
  const NestedPair np = pair_from_matrix(read_matrix(o), 3, o.tol.value_or(kDefaultRankTol));
  Json out = io::to_json(np.p);
  out.update(io::to_json(np.q));
  out["kept_rows"] = np.kept_rows;
  out["kept_cols"] = np.kept_cols;
  out["row_scalings"] = io::to_json(np.row_scalings);
  return {out};
}

inline Result mexample(const Options& o) {
  if (!o.epsilon) throw Error(ErrorCode::InvalidInput, "mexample needs --epsilon");
  return {io::to_json(make_m_epsilon(*o.epsilon))};
}

inline Result hexlift(const Options& o) {
  const VPolytope hex = io::vpolytope_from_json(read_doc(o, 0));
  const HexagonCanonical hc = normalize_hexagon(hex);
  const OctahedronLift ol = hex_octahedron_lift(hc);
  const BiplanarResult bp = is_biplanar(ol.octahedron);

  double back_err = 0.0;
  for (std::size_t t = 0; t < 6; ++t) {
    const Eigen::Vector2d back = hc.unapply(ol.proj * ol.octahedron.vertices[t]);
    const Vector& orig = hex.vertices[static_cast<std::size_t>(hc.order[static_cast<std::size_t>(kOctahedronToHexagon[t])])];
    back_err = std::max(back_err, (back - orig).cwiseAbs().maxCoeff());
  }

  Json verts = Json::array();
  for (const auto& v : ol.octahedron.vertices) verts.push_back(io::to_json(Vector(v)));
  Json planes = Json::array();
  for (const auto& pl : bp.planes)
    planes.push_back(Json{{"normal", io::to_json(Vector(pl.normal))}, {"offset", pl.offset}, {"members", pl.members}});

  std::vector<Vector> oct_pts;
  for (const auto& v : ol.octahedron.vertices) oct_pts.emplace_back(v);
  const SpectraLift canonical_lift = project_lift(diagonal_lift(simplicial_facets_3d(VPolytope(oct_pts))), ol.proj);

  Json out{{"canonical",
            {{"a", hc.a}, {"b", hc.b}, {"c", hc.c}, {"d", hc.d}, {"e", hc.e}, {"f", hc.f},
             {"linear", io::to_json(DenseMatrix(hc.linear))}, {"offset", io::to_json(Vector(hc.offset))},
             {"reversed", hc.reversed}, {"order", hc.order}, {"invariants", hc.invariants_hold()}}},
           {"octahedron", {{"vertices", verts}, {"sign_conditions", ol.octahedron.sign_conditions_hold()}}},
           {"proj", io::to_json(ol.proj)},
           {"biplanar", {{"value", bp.biplanar}, {"planes", planes}}},
           {"projection_error", back_err},
           {"canonical_lift", io::to_json(canonical_lift)}};

  const bool checks = hc.invariants_hold() && ol.octahedron.sign_conditions_hold() && bp.biplanar && back_err <= 1e-9;
  const NonnegMatrix s = slack_matrix(hex, polygon_facets(hex));
  const auto f = search_factorization(s, 4, search_config(o));
  if (f) out["factorization"] = io::to_json(*f);
  if (!checks) return {out, kNo};
  return {out, f ? kYes : kNotFound};
}

inline Result augment(const Options& o) {
  const Json doc = read_doc(o, 0);
  const SpectraLift lift = io::lift_from_json(io::field(doc, "lift"));
  const double a0 = io::number(io::field(doc, "a0"), "\"a0\"");
  return {io::to_json(augment_facet(lift, a0, io::vector_from_json(io::field(doc, "a"))))};
}

inline Result factorize(const Options& o) {
  const NonnegMatrix m = read_matrix(o);
  const auto f = search_factorization(m, need_k(o), search_config(o));
  if (!f) return {Json{{"answer", "NotFound"}, {"k", need_k(o)}, {"restarts", o.restarts}}, kNotFound};
  return {io::to_json(*f)};
}

inline Result rank3fact(const Options& o) {
  const NonnegMatrix m = read_matrix(o);
  try {
    const PsdFactorization f = rank3_upper_factorize(m, search_config(o));
    Json out = io::to_json(f);
    out["bound"] = rank3_upper(m.rows(), m.cols());
    return {out};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SearchFailed) throw;
    Json out = io::to_json(e);
    out["answer"] = "NotFound";
    return {out, kNotFound};
  }
}

// Checks every certificate found in the second document against the matrix.
inline Result verify(const Options& o) {
  const NonnegMatrix m = read_matrix(o, 0);
  const Json doc = read_doc(o, 1);
  const double tol = o.tol.value_or(kSearchTol) * std::max(1.0, max_abs(m.matrix()));
  Json checks = Json::array();
  bool all = true;

  auto pick = [&](const char* nested, const char* marker) -> const Json* {
    if (doc.contains(nested)) return &doc.at(nested);
    if (doc.contains(marker)) return &doc;
    return nullptr;
  };
  if (const Json* f = pick("factorization", "A")) {
    const VerifyReport r = verify_factorization(m, io::factorization_from_json(*f), tol);
    checks.push_back(Json{{"kind", "factorization"}, {"pass", r.pass}, {"max_residual", r.max_residual},
                          {"min_factor_eig", r.min_factor_eig}});
    all = all && r.pass;
  }
  if (const Json* c = pick("conic", "omega")) {
    const ConicCertificate cert = io::conic_from_json(*c);
    const NestedPair np = pair_from_matrix(m, 3);
    if (cert.mu.size() != static_cast<Index>(np.q.size()))
      throw Error(ErrorCode::DimensionMismatch, "\"mu\" length differs from the facet count");
    const ConicReport r = verify_conic(cert, np);
    checks.push_back(Json{{"kind", "conic"}, {"pass", r.pass}, {"top_eig", r.top_eig}, {"worst_vertex", r.worst_vertex},
                          {"worst_facet", r.worst_facet}, {"worst_mu", r.worst_mu}});
    all = all && r.pass;
  }
  if (const Json* b = pick("bilinear", "L")) {
    const BilinearCertificate cert = io::bilinear_from_json(*b);
    const Index k = triangular_root(cert.l.rows());
    const BilinearReport r = verify_bilinear(cert, build_bilinear_system(m, k), std::max(kBilinearTol, 10.0 * o.tol.value_or(kSearchTol)));
    checks.push_back(Json{{"kind", "bilinear"}, {"pass", r.pass}, {"identity_error", r.identity_error},
                          {"worst_row_eig", r.worst_row_eig}, {"worst_col_eig", r.worst_col_eig}});
    all = all && r.pass;
  }
  if (checks.empty()) throw Error(ErrorCode::InvalidInput, "no factorization or certificate in the second input");
  return {Json{{"pass", all}, {"checks", checks}}, all ? kYes : kNo};
}

inline Result decide2(const Options& o) {
  LmiOptions lopt;
  const Verdict v = decide_rank2(read_matrix(o), lopt);
  return {io::to_json(v), verdict_exit(v)};
}

inline Result minrank(const Options& o) {
  const Verdict v = min_psd_rank_decide(read_matrix(o), need_k(o), search_config(o));
  return {io::to_json(v), verdict_exit(v)};
}

inline Result bounds(const Options& o) {
  BracketOptions opt;
  opt.search_cfg = search_config(o);
  const BoundsReport r = bracket(read_matrix(o), opt);
  return {io::to_json(r), r.pinned() ? kYes : kNotFound};
}

inline Result dispatch(const Options& o) {
  if (o.verb == "slack") return slack(o);
  if (o.verb == "pair") return pair(o);
  if (o.verb == "mexample") return mexample(o);
  if (o.verb == "hexlift") return hexlift(o);
  if (o.verb == "augment") return augment(o);
  if (o.verb == "factorize") return factorize(o);
  if (o.verb == "rank3fact") return rank3fact(o);
  if (o.verb == "verify") return verify(o);
  if (o.verb == "decide2") return decide2(o);
  if (o.verb == "minrank") return minrank(o);
  return bounds(o);
}

inline std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto logger = std::make_shared<spdlog::logger>("psdrank", std::make_shared<spdlog::sinks::ostream_sink_mt>(err));
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("PSDRANK_LOG")) logger->set_level(spdlog::level::from_str(env));
  return logger;
}

inline void emit(const Json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidInput, "cannot write output file " + path);
  f << text;
}

}  // namespace detail

// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto log = detail::make_logger(err);
  Options o;
  CLI::App app{"psd rank tools"};
  app.add_option("verb", o.verb, "what to do")->required()->check(CLI::IsMember(kVerbs));
  app.add_option("--in", o.in, "input file, - for stdin (verify takes two)");
  app.add_option("--out", o.out, "output file (default stdout)");
  app.add_option("--k", o.k, "factorization size")->check(CLI::Range(1, 64));
  app.add_option("--epsilon", o.epsilon, "parameter for mexample");
  app.add_option("--tol", o.tol, "tolerance, relative to the largest entry");
  app.add_option("--seed", o.seed, "base random seed");
  app.add_option("--restarts", o.restarts, "random restarts")->check(CLI::Range(1, 100000));
  app.add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1, 256));
  app.add_option("--format", o.format, "matrix input format")->check(CLI::IsMember({"json", "csv"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kYes;
  } catch (const CLI::ParseError& e) {
    out << detail::Json{{"error", e.what()}, {"code", "InvalidInput"}}.dump(2) << "\n";
    return kInputError;
  }

  log->info("{} with {} input(s), seed {}", o.verb, o.in.size(), o.seed);
  try {
    const detail::Result r = detail::dispatch(o);
    detail::emit(r.doc, o.out, out);
    log->info("exit {}", r.code);
    return r.code;
  } catch (const Error& e) {
    log->warn("{}", e.what());
    out << io::to_json(e).dump(2) << "\n";
    const bool numeric = e.code() == ErrorCode::SearchFailed || e.code() == ErrorCode::NoConvergence;
    return numeric ? kNotFound : kInputError;
  } catch (const nlohmann::json::exception& e) {
    out << detail::Json{{"error", e.what()}, {"code", "InvalidInput"}}.dump(2) << "\n";
    return kInputError;
  }
}

}  // namespace psdrank::cli
