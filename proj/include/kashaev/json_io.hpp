#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "kashaev/complexes.hpp"
#include "kashaev/error.hpp"
#include "kashaev/genrec.hpp"
#include "kashaev/kashaev3d.hpp"
#include "kashaev/lattice.hpp"
#include "kashaev/minors.hpp"
#include "kashaev/report.hpp"
#include "kashaev/scalar.hpp"
#include "kashaev/tilings.hpp"

namespace kashaev::io {

using json = nlohmann::json;

// True when some number in the document is written with a fractional part or exponent.
inline bool any_float(const json& j) {
  if (j.is_number_float()) return true;
  if (j.is_array() || j.is_object())
    for (const auto& e : j)
      if (any_float(e)) return true;
  return false;
}

inline mpq_class parse_rational(const std::string& s) {
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0) throw Error(ErrorKind::InvalidInput, "not a rational: \"" + s + "\"");
  if (sgn(q.get_den()) == 0) throw Error(ErrorKind::InvalidInput, "zero denominator in \"" + s + "\"");
  q.canonicalize();
  return q;
}

// Strings are exact "p/q"; integer numbers are exact; other numbers are floats.
template <class T>
T scalar(const json& j) {
  if (j.is_string()) {
    mpq_class q = parse_rational(j.get<std::string>());
    if constexpr (std::is_same_v<T, double>) return q.get_d();
    else return q;
  }
  if (j.is_number_integer()) {
    if constexpr (std::is_same_v<T, double>) return j.get<double>();
    else return mpq_class(j.get<long>());
  }
  if (j.is_number_float()) {
    if constexpr (std::is_same_v<T, double>) return j.get<double>();
    else throw Error(ErrorKind::ModeMismatch, "float value in exact mode");
  }
  throw Error(ErrorKind::InvalidInput, "expected a scalar, got " + j.dump());
}

inline json emit(const mpq_class& x) { return x.get_str(); }
inline json emit(double x) { return x; }

inline Pt3 pt3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::InvalidInput, "expected [i,j,k], got " + j.dump());
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

inline const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidInput, std::string("missing key \"") + key + "\"");
  return j.at(key);
}

// ---------------------------------------------------------------------------
// lattice fields

inline Box3 window3(const json& j) {
  const json& w = need(j, "window");
  if (!w.is_array() || w.size() != 2) throw Error(ErrorKind::InvalidInput, "window must be [[lo],[hi]]");
  return Box3(pt3(w[0]), pt3(w[1]));
}

template <class T>
KHexField3<T> field3(const json& j) {
  KHexField3<T> f(window3(j));
  for (const auto& e : need(j, "vertices")) f.vertices.set(pt3(need(e, "p")), scalar<T>(need(e, "v")));
  if (j.contains("faces"))
    for (const auto& e : j.at("faces")) {
      int axis = need(e, "axis").get<int>();
      if (axis < 1 || axis > 3) throw Error(ErrorKind::InvalidInput, "face axis must be 1, 2 or 3");
      f.faces.set(FaceKey{axis, pt3(need(e, "base"))}, scalar<T>(need(e, "v")));
    }
  return f;
}

template <class T>
json field3_json(const KHexField3<T>& f, bool with_faces) {
  const Box3& w = f.window();
  json out;
  out["window"] = {{w.lo[0], w.lo[1], w.lo[2]}, {w.hi[0], w.hi[1], w.hi[2]}};
  json vs = json::array();
  for (const Pt3& p : w.points_by_height())
    if (f.vertices.has(p)) vs.push_back({{"p", {p[0], p[1], p[2]}}, {"v", emit(f.vertices.at(p))}});
  out["vertices"] = vs;
  if (with_faces) {
    json fs = json::array();
    for (const FaceKey& k : f.faces.all_faces())
      if (f.faces.has(k)) fs.push_back({{"axis", k.axis}, {"base", {k.base[0], k.base[1], k.base[2]}}, {"v", emit(f.faces.at(k))}});
    out["faces"] = fs;
  }
  return out;
}

// ---------------------------------------------------------------------------
// tilings and piles

inline DiamondTiling tiling(const json& j) {
  DiamondTiling t(need(j, "n").get<int>());
  std::vector<char> seen(std::size_t(binom(t.n(), 2)), 0);
  for (const auto& e : need(j, "tiles")) {
    const json& pr = need(e, "pair");
    int a = pr.at(0).get<int>(), b = pr.at(1).get<int>();
    if (a > b) std::swap(a, b);
    if (a < 1 || b > t.n() || a == b) throw Error(ErrorKind::InvalidInput, "bad tile pair " + pr.dump());
    seen[t.pair_index(a, b)] = 1;
    t.set_base(a, b, need(e, "base").get<Label>());
  }
  if (std::count(seen.begin(), seen.end(), 0)) throw Error(ErrorKind::InvalidInput, "tiling must list one tile per pair");
  validate_tiling(t);
  return t;
}

inline json tiling_json(const DiamondTiling& t) {
  json tiles = json::array();
  for (const Tile& x : t.tiles()) tiles.push_back({{"pair", {x.i, x.j}}, {"base", x.base}});
  return {{"n", t.n()}, {"tiles", tiles}};
}

inline Triple triple(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::InvalidInput, "expected [i,j,k], got " + j.dump());
  Triple t{j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
  std::sort(t.begin(), t.end());
  return t;
}

inline Pile pile(const json& j) {
  DiamondTiling start = tiling(need(j, "start"));
  std::vector<Triple> flips;
  for (const auto& e : need(j, "flips")) flips.push_back(triple(e));
  return pile_from_flips(start, flips);
}

inline json pile_json(const Pile& p) {
  json flips = json::array();
  for (const auto& f : p.flips) flips.push_back({f.triple[0], f.triple[1], f.triple[2]});
  return {{"start", tiling_json(p.start())}, {"flips", flips}};
}

// ---------------------------------------------------------------------------
// directed complexes; external vertex ids map to 0..N-1 in listed order

struct LoadedComplex {
  DirectedComplex c;
  std::vector<long> ids;
  std::map<long, int> index;
  int at(long id) const {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorKind::InvalidComplex, "unknown vertex id " + std::to_string(id));
    return it->second;
  }
};

inline LoadedComplex complex(const json& j) {
  LoadedComplex L;
  for (const auto& e : need(j, "vertices")) {
    long id = e.get<long>();
    if (L.index.count(id)) throw Error(ErrorKind::InvalidComplex, "duplicate vertex id " + std::to_string(id));
    L.index[id] = int(L.ids.size());
    L.ids.push_back(id);
  }
  DirectedComplex& c = L.c;
  c.num_vertices = int(L.ids.size());
  c.labels.assign(L.ids.size(), std::nullopt);
  if (j.contains("labels"))
    for (const auto& [k, v] : j.at("labels").items()) c.labels[std::size_t(L.at(std::stol(k)))] = v.get<Label>();
  for (const auto& s : need(j, "squares")) {
    if (!s.is_array() || s.size() != 4) throw Error(ErrorKind::InvalidComplex, "square must list 4 vertices");
    c.squares.push_back({L.at(s[0].get<long>()), L.at(s[1].get<long>()), L.at(s[2].get<long>()), L.at(s[3].get<long>())});
  }
  auto by_verts = square_index(c);
  for (const auto& e : need(j, "cubes")) {
    const json& vs = need(e, "verts");
    if (!vs.is_array() || vs.size() != 8) throw Error(ErrorKind::InvalidComplex, "cube must list 8 vertices");
    std::array<int, 8> raw;
    for (int m = 0; m < 8; ++m) raw[m] = L.at(vs[m].get<long>());
    int top = L.at(need(e, "top").get<long>());
    int pos = int(std::find(raw.begin(), raw.end(), top) - raw.begin());
    c.cubes.push_back(orient_cube(raw, pos == 8 ? -1 : pos, by_verts));
  }
  if (j.contains("interior"))
    for (const auto& e : j.at("interior")) c.interior.push_back(L.at(e.get<long>()));
  std::sort(c.interior.begin(), c.interior.end());
  validate_complex(c);
  return L;
}

inline json complex_json(const DirectedComplex& c) {
  json out;
  json vs = json::array(), labels = json::object(), sq = json::array(), cubes = json::array();
  for (int v = 0; v < c.num_vertices; ++v) {
    vs.push_back(v);
    if (c.labels[std::size_t(v)]) labels[std::to_string(v)] = *c.labels[std::size_t(v)];
  }
  for (const auto& s : c.squares) sq.push_back({s[0], s[1], s[2], s[3]});
  for (const auto& q : c.cubes) cubes.push_back({{"verts", q.verts}, {"top", q.top()}});
  out["vertices"] = vs;
  out["labels"] = labels;
  out["squares"] = sq;
  out["cubes"] = cubes;
  out["interior"] = c.interior;
  return out;
}

template <class T>
ComplexValues<T> complex_values(const json& j, const LoadedComplex& L) {
  ComplexValues<T> x(L.ids.size());
  for (const auto& [k, v] : need(j, "values").items()) x[std::size_t(L.at(std::stol(k)))] = scalar<T>(v);
  return x;
}

template <class T>
ComplexValues<T> complex_face_values(const json& j, const LoadedComplex& L) {
  const json& f = need(j, "face_values");
  if (!f.is_array() || f.size() != L.c.squares.size()) throw Error(ErrorKind::InvalidInput, "face_values must hold one value per square");
  ComplexValues<T> out;
  for (const auto& e : f) out.push_back(scalar<T>(e));
  return out;
}

template <class T>
json values_json(const ComplexValues<T>& x, const std::vector<long>& ids) {
  json out = json::object();
  for (std::size_t v = 0; v < x.size(); ++v)
    if (x[v]) out[std::to_string(ids.empty() ? long(v) : ids[v])] = emit(*x[v]);
  return out;
}

// ---------------------------------------------------------------------------
// minor tuples and matrices

template <class T>
MinorTuple<T> tuple(const json& j) {
  int n = need(j, "n").get<int>();
  if (n < 1 || n > 20) throw Error(ErrorKind::BadN, "tuple size out of range");
  std::size_t full = std::size_t(1) << n;
  MinorTuple<T> t{n, std::vector<T>(full)};
  std::vector<char> seen(full, 0);
  for (const auto& [k, v] : need(j, "entries").items()) {
    unsigned long I = std::stoul(k);
    if (I >= full) throw Error(ErrorKind::InvalidInput, "entry key " + k + " exceeds 2^n");
    t.x[I] = scalar<T>(v);
    seen[I] = 1;
  }
  for (std::size_t I = 0; I < full; ++I)
    if (!seen[I]) throw Error(ErrorKind::MissingValue, "tuple entry " + std::to_string(I) + " missing");
  return t;
}

template <class T>
json tuple_json(const MinorTuple<T>& t) {
  json e = json::object();
  for (std::size_t I = 0; I < t.x.size(); ++I) e[std::to_string(I)] = emit(t.x[I]);
  return {{"n", t.n}, {"entries", e}};
}

template <class T>
Mat<T> matrix(const json& j) {
  const json& rows = j.is_object() ? need(j, "matrix") : j;
  if (!rows.is_array() || rows.empty()) throw Error(ErrorKind::InvalidInput, "matrix must be a non-empty array of rows");
  Mat<T> m;
  for (const auto& r : rows) {
    if (!r.is_array() || r.size() != rows.size()) throw Error(ErrorKind::InvalidInput, "matrix must be square");
    std::vector<T> row;
    for (const auto& e : r) row.push_back(scalar<T>(e));
    m.push_back(std::move(row));
  }
  return m;
}

template <class T>
json matrix_json(const Mat<T>& m) {
  json out = json::array();
  for (const auto& r : m) {
    json row = json::array();
    for (const auto& e : r) row.push_back(emit(e));
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// grids of the general framework

inline gen::Idx idx(const json& j, int d) {
  if (!j.is_array() || int(j.size()) != d) throw Error(ErrorKind::InvalidInput, "expected " + std::to_string(d) + " coordinates, got " + j.dump());
  return j.get<gen::Idx>();
}

template <class T>
gen::GridField<T> grid(const json& j, const gen::BoxShape& shape) {
  int d = need(j, "d").get<int>();
  if (d != shape.d() || (j.contains("a") && j.at("a").get<gen::Idx>() != shape.a))
    throw Error(ErrorKind::InvalidInput, "grid header does not match the instance");
  const json& w = need(j, "window");
  if (!w.is_array() || w.size() != 2) throw Error(ErrorKind::InvalidInput, "window must be [[lo],[hi]]");
  gen::GridField<T> x(gen::Window{idx(w[0], d), idx(w[1], d)}, shape);
  for (const auto& e : need(j, "vertices")) x.set(idx(need(e, "p"), d), scalar<T>(need(e, "v")));
  if (j.contains("faces"))
    for (const auto& e : j.at("faces")) {
      int fam = need(e, "family").get<int>();
      if (fam < 1 || fam > d) throw Error(ErrorKind::InvalidInput, "face family out of range");
      x.set_face(fam - 1, idx(need(e, "base"), d), scalar<T>(need(e, "v")));
    }
  return x;
}

template <class T>
json grid_json(const gen::GridField<T>& x) {
  json vs = json::array(), fs = json::array();
  for (std::size_t f = 0; f < x.window.size(); ++f) {
    gen::Idx p = x.window.point(f);
    if (x.has[f]) vs.push_back({{"p", p}, {"v", emit(x.vals[f])}});
  }
  for (int i = 0; i < x.shape.d(); ++i)
    for (std::size_t f = 0; f < x.window.size(); ++f)
      if (x.has_face[std::size_t(i)][f]) fs.push_back({{"family", i + 1}, {"base", x.window.point(f)}, {"v", emit(x.faces[std::size_t(i)][f])}});
  return {{"d", x.shape.d()}, {"a", x.shape.a}, {"window", {x.window.lo, x.window.hi}}, {"vertices", vs}, {"faces", fs}};
}

// ---------------------------------------------------------------------------
// reports

template <class T>
void sort_findings(Report<T>& r) {
  std::stable_sort(r.begin(), r.end(), [](const Finding<T>& a, const Finding<T>& b) {
    return a.where != b.where ? a.where < b.where : a.kind < b.kind;
  });
}

inline const char* mode_name(Mode m) { return m == Mode::Exact ? "exact" : "float"; }

template <class T>
json report_json(Report<T> r, Mode mode) {
  sort_findings(r);
  json fs = json::array();
  for (const auto& f : r)
    fs.push_back({{"kind", f.kind}, {"location", f.where}, {"lhs", emit(f.lhs)}, {"rhs", emit(f.rhs)}, {"residual", emit(T(f.lhs - f.rhs))}});
  return {{"verdict", r.empty() ? "PASS" : "FAIL"}, {"mode", mode_name(mode)}, {"findings", fs}};
}

}  // namespace kashaev::io
