#pragma once

// JSON and CSV encodings of the library types. Doubles are written in
// shortest round-trip form, so a dump followed by a parse is lossless.

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "psdrank/bounds.hpp"
#include "psdrank/liftkit.hpp"
#include "psdrank/minrank.hpp"
#include "psdrank/polyform.hpp"
#include "psdrank/psdfact.hpp"

namespace psdrank::io {

using Json = nlohmann::json;

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidInput, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorCode::InvalidInput, std::string(what) + " must be a number");
  return j.get<double>();
}

inline Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], "vector entry");
  return v;
}

inline Json to_json(const DenseMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

// Row-major nested arrays; every row must have the same length.
inline DenseMatrix dense_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "expected an array of rows");
  if (j.empty()) return DenseMatrix(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  DenseMatrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw Error(ErrorCode::InvalidInput, "ragged matrix rows", i);
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Index>(i), static_cast<Index>(c)) = number(j[i][c], "matrix entry");
  }
  return m;
}

inline Json to_json(const SymMatrix& s) { return to_json(s.dense()); }

inline SymMatrix sym_from_json(const Json& j) {
  const DenseMatrix m = dense_from_json(j);
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must be square");
  if (m.size() > 0 && max_abs(m - m.transpose()) > 1e-12 * std::max(1.0, max_abs(m)))
    throw Error(ErrorCode::InvalidInput, "matrix is not symmetric");
  return SymMatrix::symmetrize(m);
}

inline Json to_json(const NonnegMatrix& m) { return Json{{"rows", to_json(m.matrix())}}; }

inline NonnegMatrix matrix_from_json(const Json& j) {
  const DenseMatrix m = dense_from_json(field(j, "rows"));
  if (m.size() == 0) throw Error(ErrorCode::InvalidInput, "empty matrix");
  return NonnegMatrix(m);
}

// One row per line, comma separated. Blank lines and lines starting with # are skipped.
inline NonnegMatrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidInput, "bad CSV cell \"" + cell + "\"", rows.size());
      }
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos)
        throw Error(ErrorCode::InvalidInput, "bad CSV cell \"" + cell + "\"", rows.size());
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw Error(ErrorCode::InvalidInput, "ragged CSV rows", rows.size());
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw Error(ErrorCode::InvalidInput, "empty matrix");
  DenseMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c) m(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
  return NonnegMatrix(m);
}

inline Json to_json(const VPolytope& p) {
  Json v = Json::array();
  for (const auto& x : p.vertices) v.push_back(to_json(x));
  return Json{{"vertices", v}};
}

inline VPolytope vpolytope_from_json(const Json& j) {
  const Json& v = field(j, "vertices");
  if (!v.is_array()) throw Error(ErrorCode::InvalidInput, "\"vertices\" must be an array");
  std::vector<Vector> pts;
  for (const auto& x : v) pts.push_back(vector_from_json(x));
  return VPolytope(std::move(pts));
}

inline Json to_json(const HPolyhedron& q) {
  Json rows = Json::array();
  for (const auto& r : q.inequalities) rows.push_back(Json{{"c", to_json(r.c)}, {"d", r.d}});
  return Json{{"inequalities", rows}};
}

inline HPolyhedron hpolyhedron_from_json(const Json& j) {
  const Json& rows = field(j, "inequalities");
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::InvalidInput, "\"inequalities\" must be a non-empty array");
  std::vector<Inequality> out;
  for (const auto& r : rows) out.push_back(Inequality{vector_from_json(field(r, "c")), number(field(r, "d"), "\"d\"")});
  const Index dim = out.front().c.size();
  return HPolyhedron(dim, std::move(out));
}

inline Json to_json(const SpectraLift& lift) {
  Json g = Json::array();
  for (const auto& s : lift.g) g.push_back(to_json(s));
  return Json{{"k", lift.k}, {"n", lift.n}, {"G", g}, {"proj", to_json(lift.proj)}};
}

inline SpectraLift lift_from_json(const Json& j) {
  const Json& g = field(j, "G");
  if (!g.is_array()) throw Error(ErrorCode::InvalidInput, "\"G\" must be an array of matrices");
  std::vector<SymMatrix> mats;
  for (const auto& s : g) mats.push_back(sym_from_json(s));
  DenseMatrix proj = dense_from_json(field(j, "proj"));
  if (proj.size() == 0) proj.resize(j.contains("n") ? j.at("n").get<Index>() : 0, static_cast<Index>(mats.size()) - 1);
  SpectraLift lift(std::move(mats), std::move(proj));
  if (j.contains("k") && j.at("k").get<Index>() != lift.k) throw Error(ErrorCode::DimensionMismatch, "\"k\" disagrees with G");
  if (j.contains("n") && j.at("n").get<Index>() != lift.n) throw Error(ErrorCode::DimensionMismatch, "\"n\" disagrees with proj");
  return lift;
}

inline Json to_json(const PsdFactorization& f) {
  Json a = Json::array(), b = Json::array();
  for (const auto& s : f.a) a.push_back(to_json(s));
  for (const auto& s : f.b) b.push_back(to_json(s));
  return Json{{"k", f.k}, {"A", a}, {"B", b}, {"residual", f.residual}};
}

inline PsdFactorization factorization_from_json(const Json& j) {
  PsdFactorization f;
  f.k = field(j, "k").get<Index>();
  for (const char* key : {"A", "B"}) {
    const Json& list = field(j, key);
    if (!list.is_array()) throw Error(ErrorCode::InvalidInput, std::string("\"") + key + "\" must be an array");
    auto& dst = key[0] == 'A' ? f.a : f.b;
    for (std::size_t i = 0; i < list.size(); ++i) {
      SymMatrix s = sym_from_json(list[i]);
      if (s.size() != f.k) throw Error(ErrorCode::DimensionMismatch, std::string("factor size differs from k in \"") + key + "\"", i);
      dst.push_back(std::move(s));
    }
  }
  if (j.contains("residual")) f.residual = number(j.at("residual"), "\"residual\"");
  return f;
}

inline Json to_json(const ConicCertificate& c) { return Json{{"omega", to_json(c.omega)}, {"mu", to_json(c.mu)}}; }

inline ConicCertificate conic_from_json(const Json& j) {
  ConicCertificate c;
  c.omega = sym_from_json(field(j, "omega"));
  if (c.omega.size() != 3) throw Error(ErrorCode::DimensionMismatch, "\"omega\" must be 3x3");
  c.mu = vector_from_json(field(j, "mu"));
  return c;
}

inline Json to_json(const BilinearCertificate& c) { return Json{{"L", to_json(c.l)}, {"K", to_json(c.k)}}; }

inline BilinearCertificate bilinear_from_json(const Json& j) {
  BilinearCertificate c{dense_from_json(field(j, "L")), dense_from_json(field(j, "K"))};
  if (c.l.rows() != c.l.cols() || c.k.rows() != c.k.cols() || c.l.rows() != c.k.rows())
    throw Error(ErrorCode::DimensionMismatch, "\"L\" and \"K\" must be square of equal size");
  return c;
}

inline Json to_json(const Verdict& v) {
  Json out{{"answer", to_string(v.answer)}, {"margin", v.margin}, {"sufficient_only", v.sufficient_only}};
  if (v.conic) out["conic"] = to_json(*v.conic);
  if (v.bilinear) out["bilinear"] = to_json(*v.bilinear);
  if (v.factorization) out["factorization"] = to_json(*v.factorization);
  if (!v.ray.empty()) {
    Json ray = Json::array();
    for (const auto& z : v.ray) ray.push_back(to_json(z));
    out["ray"] = ray;
  }
  if (!v.diagnostics.empty()) out["diagnostics"] = v.diagnostics;
  return out;
}

inline Json to_json(const BoundsReport& r) {
  Json out{{"rank", r.rank},
           {"lower", {{"value", r.lower.value}, {"source", r.lower.source}}},
           {"upper", {{"value", r.upper.value}, {"source", r.upper.source}}},
           {"pinned", r.pinned()},
           {"notes", r.notes}};
  if (r.witness) out["witness"] = to_json(*r.witness);
  return out;
}

inline Json to_json(const Error& e) {
  Json out{{"error", e.what()}, {"code", std::string(to_string(e.code()))}};
  if (e.index()) out["index"] = *e.index();
  return out;
}

}  // namespace psdrank::io
