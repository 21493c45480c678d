#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kashaev/error.hpp"
#include "kashaev/kashaev3d.hpp"
#include "kashaev/report.hpp"
#include "kashaev/scalar.hpp"

namespace kashaev::gen {

using Idx = std::vector<int>;

// Integer box [a] = {0..a_1} x ... x {0..a_d}; points are flattened with the first coordinate fastest.
struct BoxShape {
  Idx a;

  BoxShape() = default;
  explicit BoxShape(Idx sizes) : a(std::move(sizes)) {
    if (a.empty()) throw Error(ErrorKind::BadParams, "box shape needs d >= 1");
    for (int s : a)
      if (s < 1) throw Error(ErrorKind::BadParams, "box sides must be >= 1");
  }
  int d() const { return int(a.size()); }
  std::size_t count() const {
    std::size_t n = 1;
    for (int s : a) n *= std::size_t(s + 1);
    return n;
  }
  std::size_t flat(const Idx& i) const {
    std::size_t f = 0, stride = 1;
    for (int k = 0; k < d(); ++k) {
      f += std::size_t(i[k]) * stride;
      stride *= std::size_t(a[k] + 1);
    }
    return f;
  }
  Idx point(std::size_t f) const {
    Idx i(a.size());
    for (int k = 0; k < d(); ++k) {
      i[k] = int(f % std::size_t(a[k] + 1));
      f /= std::size_t(a[k] + 1);
    }
    return i;
  }
  std::size_t top() const { return flat(a); }
  // point lies in the face box [a - 1_i]
  bool in_face(const Idx& p, int i) const { return p[i] <= a[i] - 1; }
};

template <class T>
struct Term {
  T coef;
  std::vector<std::pair<std::size_t, int>> powers;  // (flat index, exponent)
};

template <class T>
using Poly = std::vector<Term<T>>;

template <Numeric T>
T ipow(const T& x, int e) {
  T r(1);
  for (int i = 0; i < e; ++i) r = r * x;
  return r;
}

template <Numeric T>
T eval(const Poly<T>& p, const std::vector<T>& z) {
  T s(0);
  for (const auto& t : p) {
    T m = t.coef;
    for (auto [i, e] : t.powers) m = m * ipow(z[i], e);
    s = s + m;
  }
  return s;
}

// sum of the absolute values of the monomials; the natural size of a cancellation
template <Numeric T>
double eval_scale(const Poly<T>& p, const std::vector<T>& z) {
  double s = 0;
  for (const auto& t : p) {
    double m = std::fabs(to_double(t.coef));
    for (auto [i, e] : t.powers) m *= std::pow(std::fabs(to_double(z[i])), e);
    s += m;
  }
  return s;
}

// coefficient of z_v^k as a polynomial in the remaining variables
template <class T>
Poly<T> coefficient(const Poly<T>& p, std::size_t v, int k) {
  Poly<T> out;
  for (const auto& t : p) {
    int e = 0;
    std::vector<std::pair<std::size_t, int>> rest;
    for (auto pw : t.powers)
      if (pw.first == v) e += pw.second;
      else rest.push_back(pw);
    if (e == k) out.push_back({t.coef, rest});
  }
  return out;
}

template <class T>
Poly<T> derivative(const Poly<T>& p, std::size_t v) {
  Poly<T> out;
  for (const auto& t : p) {
    int e = 0;
    std::vector<std::pair<std::size_t, int>> rest;
    for (auto pw : t.powers)
      if (pw.first == v) e += pw.second;
      else rest.push_back(pw);
    if (e == 0) continue;
    if (e > 1) rest.push_back({v, e - 1});
    out.push_back({t.coef * T(e), rest});
  }
  return out;
}

template <class T>
using FaceRule = std::function<T(const std::vector<T>& z, const std::vector<T>& faces)>;

template <class T>
struct Instance {
  std::string id;
  BoxShape shape;
  std::vector<T> params;
  Poly<T> f, g, h, df;
  std::vector<Poly<T>> fi;
  std::vector<FaceRule<T>> r;
  std::vector<int> r_sign;  // +1, or -1 to use -r_i
  // product of the r_i denominators; zero means the step is undefined
  std::function<T(const std::vector<T>& z, const std::vector<T>& faces)> denominator;
  // gamma[mask], bit k of mask set when alpha_k = -1
  std::vector<int> gamma;

  int d() const { return shape.d(); }
  int gamma_product() const {
    int p = 1;
    for (int s : gamma) p *= s;
    return p;
  }
};

// gamma_alpha = +1 exactly on the listed masks
inline std::vector<int> gamma_table(int d, std::initializer_list<unsigned> plus) {
  std::vector<int> g(std::size_t(1) << d, -1);
  for (unsigned m : plus) g[m] = 1;
  return g;
}

template <Numeric T>
void finish_instance(Instance<T>& inst) {
  std::size_t top = inst.shape.top();
  inst.g = coefficient(inst.f, top, 2);
  inst.h = coefficient(inst.f, top, 1);
  inst.df = derivative(inst.f, top);
  inst.r_sign.assign(std::size_t(inst.d()), 1);
}

template <Numeric T>
Instance<T> make_instance(const std::string& id, const std::vector<T>& params) {
  Instance<T> inst;
  inst.id = id;
  inst.params = params;
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw Error(ErrorKind::BadParams, id + " takes " + std::to_string(n) + " parameters, got " + std::to_string(params.size()));
  };
  using P = std::vector<std::pair<std::size_t, int>>;
  if (id == "kashaev3d") {
    need(0);
    inst.shape = BoxShape({1, 1, 1});
    // corner index: bit 0 = first coordinate
    auto quad = [](std::size_t a, std::size_t b, std::size_t c, std::size_t d, long k) {
      return Term<T>{konst<T>(k), P{{a, 1}, {b, 1}, {c, 1}, {d, 1}}};
    };
    std::size_t pairs[4][2] = {{0, 7}, {1, 6}, {2, 5}, {4, 3}};
    for (int i = 0; i < 4; ++i) inst.f.push_back({T(1), P{{pairs[i][0], 2}, {pairs[i][1], 2}}});
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) inst.f.push_back(quad(pairs[i][0], pairs[i][1], pairs[j][0], pairs[j][1], -2));
    inst.f.push_back(quad(0, 3, 5, 6, -4));
    inst.f.push_back(quad(1, 2, 4, 7, -4));
    inst.fi = {Poly<T>{{konst<T>(16), P{{0, 1}, {6, 1}}}, {konst<T>(16), P{{2, 1}, {4, 1}}}},
               Poly<T>{{T(1), P{{0, 1}, {5, 1}}}, {T(1), P{{1, 1}, {4, 1}}}},
               Poly<T>{{T(1), P{{0, 1}, {3, 1}}}, {T(1), P{{1, 1}, {2, 1}}}}};
    inst.r = {[](const std::vector<T>& z, const std::vector<T>& w) -> T { return (T(4) * w[1] * w[2] + w[0] * z[1]) / z[0]; },
              [](const std::vector<T>& z, const std::vector<T>& w) -> T { return (w[0] * w[2] + T(4) * w[1] * z[2]) / (T(4) * z[0]); },
              [](const std::vector<T>& z, const std::vector<T>& w) -> T { return (w[0] * w[1] + T(4) * w[2] * z[4]) / (T(4) * z[0]); }};
    inst.gamma = gamma_table(3, {0u, 7u});
  } else if (id == "sholo2d") {
    need(0);
    inst.shape = BoxShape({1, 1});
    // z00 = 0, z10 = 1, z01 = 2, z11 = 3
    for (std::size_t i = 0; i < 4; ++i) inst.f.push_back({T(1), P{{i, 2}}});
    std::size_t edges[4][2] = {{0, 1}, {1, 3}, {3, 2}, {2, 0}};
    for (auto& e : edges) inst.f.push_back({konst<T>(-2), P{{e[0], 1}, {e[1], 1}}});
    inst.f.push_back({konst<T>(-6), P{{0, 1}, {3, 1}}});
    inst.f.push_back({konst<T>(-6), P{{1, 1}, {2, 1}}});
    inst.fi = {Poly<T>{{konst<T>(32), P{{0, 1}}}, {konst<T>(32), P{{2, 1}}}}, Poly<T>{{T(1), P{{0, 1}}}, {T(1), P{{1, 1}}}}};
    inst.r = {[](const std::vector<T>&, const std::vector<T>& w) -> T { return w[0] + T(8) * w[1]; },
              [](const std::vector<T>&, const std::vector<T>& w) -> T { return w[1] + w[0] / T(4); }};
    inst.denominator = [](const std::vector<T>&, const std::vector<T>&) -> T { return T(1); };
    inst.gamma = gamma_table(2, {0u});
  } else if (id == "cubic1d") {
    need(3);
    inst.shape = BoxShape({3});
    T a1 = params[0], a2 = params[1], a3 = params[2];
    inst.f = {{T(1), P{{0, 2}, {3, 2}}},
              {a1, P{{1, 2}, {2, 2}}},
              {a2, P{{0, 1}, {1, 1}, {2, 1}, {3, 1}}},
              {a3, P{{0, 1}, {2, 3}}},
              {a3, P{{1, 3}, {3, 1}}}};
    inst.fi = {Poly<T>{{a3 * a3, P{{1, 6}}},
                       {T(2) * a2 * a3, P{{0, 1}, {1, 4}, {2, 1}}},
                       {a2 * a2 - T(4) * a1, P{{0, 2}, {1, 2}, {2, 2}}},
                       {T(-4) * a3, P{{0, 3}, {2, 3}}}}};
    inst.r = {[a2, a3](const std::vector<T>& z, const std::vector<T>& w) -> T {
      T z1c = z[1] * z[1] * z[1];
      T num = a3 * a3 * z1c * z1c + a2 * a3 * z[0] * z1c * z[1] * z[2] + T(2) * a3 * z[0] * z[0] * z[0] * z[2] * z[2] * z[2] +
              w[0] * w[0] + (T(-2) * a3 * z1c - a2 * z[0] * z[1] * z[2]) * w[0];
      return num / (T(2) * z[0] * z[0] * z[0]);
    }};
    inst.gamma = {1, 1};
  } else if (id == "box2d") {
    need(2);
    inst.shape = BoxShape({1, 2});
    T a1 = params[0], a2 = params[1];
    // z00 = 0, z10 = 1, z01 = 2, z11 = 3, z02 = 4, z12 = 5
    inst.f = {{T(1), P{{0, 2}, {5, 2}}},
              {T(1), P{{1, 2}, {4, 2}}},
              {(a2 * a2 - a1 * a1) / T(4), P{{2, 2}, {3, 2}}},
              {-a1, P{{0, 1}, {4, 1}, {3, 2}}},
              {-a1, P{{1, 1}, {5, 1}, {2, 2}}},
              {T(-2), P{{0, 1}, {1, 1}, {4, 1}, {5, 1}}},
              {-a2, P{{0, 1}, {5, 1}, {2, 1}, {3, 1}}},
              {-a2, P{{1, 1}, {4, 1}, {2, 1}, {3, 1}}}};
    inst.fi = {Poly<T>{{a1, P{{2, 2}}}, {T(4), P{{0, 1}, {4, 1}}}},
               Poly<T>{{a1, P{{0, 2}, {3, 2}}}, {a1, P{{2, 2}, {1, 2}}}, {T(2) * a2, P{{0, 1}, {2, 1}, {1, 1}, {3, 1}}}}};
    inst.r = {[](const std::vector<T>& z, const std::vector<T>& w) -> T { return (z[1] * w[0] + w[1]) / z[0]; },
              [a1, a2](const std::vector<T>& z, const std::vector<T>& w) -> T {
                return (z[2] * (a1 * z[2] * z[1] + a2 * z[0] * z[3]) * w[0] + (a1 * z[2] * z[2] + T(2) * z[0] * z[4]) * w[1]) /
                       (T(2) * z[0] * z[0]);
              }};
    inst.gamma = gamma_table(2, {0u, 3u});
  } else {
    throw Error(ErrorKind::BadParams, "unknown instance '" + id + "'");
  }
  if (!inst.denominator) inst.denominator = [](const std::vector<T>& z, const std::vector<T>&) -> T { return z[0]; };
  finish_instance(inst);
  return inst;
}

// Same instance with r_i replaced by -r_i; the gamma table is left for the caller to re-derive.
template <Numeric T>
Instance<T> negate_rule(Instance<T> inst, int i) {
  inst.r_sign.at(std::size_t(i)) = -inst.r_sign.at(std::size_t(i));
  return inst;
}

// ---------------------------------------------------------------------------
// Grid fields on a window of Z^d, with one face family per coordinate.

struct Window {
  Idx lo, hi;
  int d() const { return int(lo.size()); }
  bool contains(const Idx& p) const {
    for (int k = 0; k < d(); ++k)
      if (p[k] < lo[k] || p[k] > hi[k]) return false;
    return true;
  }
  std::size_t size() const {
    std::size_t n = 1;
    for (int k = 0; k < d(); ++k) n *= std::size_t(hi[k] - lo[k] + 1);
    return n;
  }
  std::size_t index(const Idx& p) const {
    std::size_t f = 0, stride = 1;
    for (int k = 0; k < d(); ++k) {
      f += std::size_t(p[k] - lo[k]) * stride;
      stride *= std::size_t(hi[k] - lo[k] + 1);
    }
    return f;
  }
  Idx point(std::size_t f) const {
    Idx p(lo.size());
    for (int k = 0; k < d(); ++k) {
      std::size_t e = std::size_t(hi[k] - lo[k] + 1);
      p[k] = lo[k] + int(f % e);
      f /= e;
    }
    return p;
  }
};

inline Idx add(Idx a, const Idx& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  return a;
}

template <class T>
struct GridField {
  Window window;
  BoxShape shape;
  std::vector<T> vals;
  std::vector<char> has;
  std::vector<std::vector<T>> faces;  // per family, indexed by base point
  std::vector<std::vector<char>> has_face;

  GridField() = default;
  GridField(Window w, BoxShape s) : window(std::move(w)), shape(std::move(s)) {
    if (window.d() != shape.d() || int(window.hi.size()) != shape.d())
      throw Error(ErrorKind::InvalidInput, "window dimension does not match the box shape");
    for (int k = 0; k < window.d(); ++k)
      if (window.hi[k] < window.lo[k]) throw Error(ErrorKind::InvalidInput, "empty window");
    vals.resize(window.size());
    has.assign(window.size(), 0);
    faces.assign(std::size_t(shape.d()), std::vector<T>(window.size()));
    has_face.assign(std::size_t(shape.d()), std::vector<char>(window.size(), 0));
  }

  bool has_v(const Idx& p) const { return window.contains(p) && has[window.index(p)]; }
  const T& at(const Idx& p) const {
    if (!has_v(p)) throw Error(ErrorKind::MissingValue, "no value at " + idx_str(p));
    return vals[window.index(p)];
  }
  void set(const Idx& p, T v) {
    if (!window.contains(p)) throw Error(ErrorKind::InvalidInput, "point outside window " + idx_str(p));
    vals[window.index(p)] = std::move(v);
    has[window.index(p)] = 1;
  }
  // the face box base + [a - 1_i] lies in the window
  bool face_fits(int i, const Idx& base) const {
    Idx far = base;
    for (int k = 0; k < shape.d(); ++k) far[k] += shape.a[k] - (k == i ? 1 : 0);
    return window.contains(base) && window.contains(far);
  }
  bool has_f(int i, const Idx& base) const { return face_fits(i, base) && has_face[i][window.index(base)]; }
  const T& face(int i, const Idx& base) const {
    if (!has_f(i, base)) throw Error(ErrorKind::MissingValue, "no face " + std::to_string(i + 1) + " at " + idx_str(base));
    return faces[i][window.index(base)];
  }
  void set_face(int i, const Idx& base, T v) {
    if (!face_fits(i, base)) throw Error(ErrorKind::InvalidInput, "face outside window at " + idx_str(base));
    faces[i][window.index(base)] = std::move(v);
    has_face[i][window.index(base)] = 1;
  }

  static std::string idx_str(const Idx& p) {
    std::string s = "(";
    for (std::size_t k = 0; k < p.size(); ++k) s += (k ? "," : "") + std::to_string(p[k]);
    return s + ")";
  }
};

// Values x_{v + i (.) alpha} for i in [a]; empty optional when a point is missing.
template <class T>
std::optional<std::vector<T>> gather(const GridField<T>& x, const Idx& v, unsigned neg_mask = 0, bool skip_top = false) {
  const BoxShape& s = x.shape;
  std::vector<T> z(s.count(), T(0));
  for (std::size_t f = 0; f < s.count(); ++f) {
    if (skip_top && f == s.top()) continue;
    Idx p = s.point(f);
    for (int k = 0; k < s.d(); ++k) p[k] = v[k] + ((neg_mask >> k & 1) ? -p[k] : p[k]);
    if (!x.has_v(p)) return std::nullopt;
    z[f] = x.at(p);
  }
  return z;
}

// v + [alpha (.) (a - 1_i)] as a base point of family i
inline Idx oriented_face_base(const BoxShape& s, const Idx& v, unsigned neg_mask, int i) {
  Idx b = v;
  for (int k = 0; k < s.d(); ++k)
    if (neg_mask >> k & 1) b[k] -= s.a[k] - (k == i ? 1 : 0);
  return b;
}

template <class T>
struct StepOut {
  T top;
  std::vector<T> faces;
};

template <Numeric T>
StepOut<T> gen_step(const Instance<T>& inst, const std::vector<T>& z, const std::vector<T>& faces) {
  T g = eval(inst.g, z);
  if (is_zero(g)) throw Error(ErrorKind::ZeroG, "leading coefficient vanishes");
  if (is_zero(inst.denominator(z, faces))) throw Error(ErrorKind::ZeroDenominator, "face rule denominator vanishes");
  T prod(1);
  for (const T& w : faces) prod = prod * w;
  StepOut<T> out{(prod - eval(inst.h, z)) / (T(2) * g), {}};
  std::vector<T> zz = z;
  zz[inst.shape.top()] = out.top;
  for (int i = 0; i < inst.d(); ++i) {
    T r = inst.r[std::size_t(i)](zz, faces);
    out.faces.push_back(inst.r_sign[std::size_t(i)] < 0 ? T(-r) : r);
  }
  return out;
}

// Box bases v with v + [a] inside the window, in order of coordinate sum.
template <class T>
std::vector<Idx> sweep_order(const GridField<T>& x) {
  std::vector<Idx> out;
  for (std::size_t f = 0; f < x.window.size(); ++f) {
    Idx v = x.window.point(f);
    if (x.window.contains(add(v, x.shape.a))) out.push_back(v);
  }
  std::stable_sort(out.begin(), out.end(), [](const Idx& p, const Idx& q) {
    return std::accumulate(p.begin(), p.end(), 0) < std::accumulate(q.begin(), q.end(), 0);
  });
  return out;
}

// Initial data sits on vertices with some p_k < lo_k + a_k and on faces of family i with base_i = lo_i.
inline bool is_initial_vertex(const Window& w, const BoxShape& s, const Idx& p) {
  for (int k = 0; k < s.d(); ++k)
    if (p[k] < w.lo[k] + s.a[k]) return true;
  return false;
}

template <Numeric T>
T face_condition_value(const Instance<T>& inst, const GridField<T>& x, int i, const Idx& base) {
  const BoxShape& s = inst.shape;
  std::vector<T> z(s.count(), T(0));
  for (std::size_t f = 0; f < s.count(); ++f) {
    Idx p = s.point(f);
    if (!s.in_face(p, i)) continue;
    z[f] = x.at(add(base, p));
  }
  return eval(inst.fi[std::size_t(i)], z);
}

template <Numeric T>
double face_condition_scale(const Instance<T>& inst, const GridField<T>& x, int i, const Idx& base) {
  const BoxShape& s = inst.shape;
  std::vector<T> z(s.count(), T(0));
  for (std::size_t f = 0; f < s.count(); ++f) {
    Idx p = s.point(f);
    if (s.in_face(p, i)) z[f] = x.at(add(base, p));
  }
  return eval_scale(inst.fi[std::size_t(i)], z);
}

// Fills initial vertices with values from `draw`, initial faces with principal roots of f_i.
template <Numeric T, class Draw>
GridField<T> initial_field(const Instance<T>& inst, const Window& w, Draw&& draw) {
  GridField<T> x(w, inst.shape);
  for (std::size_t f = 0; f < w.size(); ++f) {
    Idx p = w.point(f);
    if (is_initial_vertex(w, inst.shape, p)) x.set(p, draw());
  }
  for (int i = 0; i < inst.d(); ++i)
    for (std::size_t f = 0; f < w.size(); ++f) {
      Idx b = w.point(f);
      if (b[i] != w.lo[i] || !x.face_fits(i, b)) continue;
      x.set_face(i, b, sqrt_principal(face_condition_value(inst, x, i, b)));
    }
  return x;
}

// Runs the step on every box of the window whose lower data is present.
template <Numeric T>
void gen_sweep(const Instance<T>& inst, GridField<T>& x) {
  for (const Idx& v : sweep_order(x)) {
    auto z = gather(x, v, 0, true);
    if (!z) continue;
    std::vector<T> w;
    bool ok = true;
    for (int i = 0; i < inst.d() && ok; ++i) {
      if (!x.has_f(i, v)) ok = false;
      else w.push_back(x.face(i, v));
    }
    if (!ok) continue;
    auto out = gen_step(inst, *z, w);
    x.set(add(v, inst.shape.a), out.top);
    for (int i = 0; i < inst.d(); ++i) {
      Idx b = v;
      b[i] += 1;
      x.set_face(i, b, out.faces[std::size_t(i)]);
    }
  }
}

template <class T>
Finding<T> finding(std::string kind, Idx where, T lhs, T rhs) {
  return {std::move(kind), std::move(where), std::move(lhs), std::move(rhs)};
}

// f per box, face squares, and the recurrence per box.
template <Numeric T>
Report<T> check_gen(const Instance<T>& inst, const GridField<T>& x, const Tolerance& tol = {}) {
  Report<T> rep;
  const BoxShape& s = inst.shape;
  for (const Idx& v : sweep_order(x)) {
    auto z = gather(x, v);
    if (!z) continue;
    T fv = eval(inst.f, *z);
    if (!residual_ok(fv, T(eval_scale(inst.f, *z)), tol)) rep.push_back(finding("f", v, fv, T(0)));
  }
  for (int i = 0; i < inst.d(); ++i)
    for (std::size_t f = 0; f < x.window.size(); ++f) {
      Idx b = x.window.point(f);
      if (!x.has_f(i, b)) continue;
      T rhs;
      double scale;
      try {
        rhs = face_condition_value(inst, x, i, b);
        scale = face_condition_scale(inst, x, i, b);
      } catch (const Error&) {
        continue;
      }
      T lhs = x.face(i, b) * x.face(i, b);
      Idx where = b;
      where.insert(where.begin(), i + 1);
      if (!residual_ok(T(lhs - rhs), T(std::max(scale, std::fabs(to_double(lhs)))), tol)) rep.push_back(finding("face-square", where, lhs, rhs));
    }
  for (const Idx& v : sweep_order(x)) {
    auto z = gather(x, v, 0, true);
    if (!z || !x.has_v(add(v, s.a))) continue;
    std::vector<T> w;
    bool ok = true;
    for (int i = 0; i < inst.d() && ok; ++i) {
      Idx b = v;
      b[i] += 1;
      if (!x.has_f(i, v) || !x.has_f(i, b)) ok = false;
      else w.push_back(x.face(i, v));
    }
    if (!ok) continue;
    StepOut<T> out;
    try {
      out = gen_step(inst, *z, w);
    } catch (const Error& e) {
      rep.push_back(finding(std::string(kind_name(e.kind())), v, T(0), T(0)));
      continue;
    }
    const T& top = x.at(add(v, s.a));
    if (!same_value(top, out.top, tol)) rep.push_back(finding("recurrence-top", v, top, out.top));
    for (int i = 0; i < inst.d(); ++i) {
      Idx b = v;
      b[i] += 1;
      const T& have = x.face(i, b);
      if (!same_value(have, out.faces[std::size_t(i)], tol)) {
        Idx where = v;
        where.insert(where.begin(), i + 1);
        rep.push_back(finding("recurrence-face", where, have, out.faces[std::size_t(i)]));
      }
    }
  }
  return rep;
}

template <class T>
struct GenCoherence {
  T lhs, rhs, even, odd;
  int sign = 1;           // product of the gamma table
  bool ok = false;        // lhs = sign * rhs
  bool split_ok = false;  // even = sign * odd
};

// Boxes containing v + [a - 1]: for alpha in {-1,0}^d, base v - (a-1) (.) alpha oriented by 1 + 2 alpha.
template <Numeric T>
GenCoherence<T> check_gen_coherence(const Instance<T>& inst, const GridField<T>& x, const Idx& v, const Tolerance& tol = {}) {
  const BoxShape& s = inst.shape;
  int d = s.d();
  GenCoherence<T> c{T(1), T(1), T(1), T(1), inst.gamma_product()};
  LogProduct L, R, E, O;
  bool exact = true;
  for (unsigned m = 0; m < (1u << d); ++m) {
    Idx base = v;
    int parity = 0;
    for (int k = 0; k < d; ++k)
      if (m >> k & 1) {
        base[k] += s.a[k] - 1;
        ++parity;
      }
    auto z = gather(x, base, m);
    if (!z) throw Error(ErrorKind::NeighborhoodIncomplete, "coherence neighborhood of " + GridField<T>::idx_str(v) + " is incomplete");
    T val = eval(inst.df, *z);
    double sc = eval_scale(inst.df, *z);
    exact = exact && is_exact(val);
    c.lhs = c.lhs * val;
    L.mul(to_double(val), sc);
    if (parity % 2 == 0) {
      c.even = c.even * val;
      E.mul(to_double(val), sc);
    } else {
      c.odd = c.odd * val;
      O.mul(to_double(val), sc);
    }
  }
  for (int i = 0; i < d; ++i)
    for (unsigned m = 0; m < (1u << d); ++m) {
      if (m >> i & 1) continue;
      Idx base = v;
      for (int k = 0; k < d; ++k)
        if (m >> k & 1) base[k] -= 1;
      std::vector<T> z(s.count(), T(0));
      for (std::size_t f = 0; f < s.count(); ++f) {
        Idx p = s.point(f);
        if (!s.in_face(p, i)) continue;
        Idx q = add(base, p);
        if (!x.has_v(q))
          throw Error(ErrorKind::NeighborhoodIncomplete, "coherence neighborhood of " + GridField<T>::idx_str(v) + " is incomplete");
        z[f] = x.at(q);
      }
      T val = eval(inst.fi[std::size_t(i)], z);
      exact = exact && is_exact(val);
      c.rhs = c.rhs * val;
      R.mul(to_double(val), eval_scale(inst.fi[std::size_t(i)], z));
    }
  if (c.sign < 0) c.rhs = -c.rhs;
  if (exact) {
    c.ok = is_zero(T(c.lhs - c.rhs));
    c.split_ok = is_zero(T(c.even - T(c.sign) * c.odd));
  } else {
    c.ok = log_close(L, R, c.sign, tol);
    c.split_ok = log_close(E, O, c.sign, tol);
  }
  return c;
}

// Vertices v whose whole coherence neighborhood [v - 1, v + a] lies in the window.
template <class T>
std::vector<Idx> coherence_points(const GridField<T>& x) {
  std::vector<Idx> out;
  for (std::size_t f = 0; f < x.window.size(); ++f) {
    Idx v = x.window.point(f);
    bool in = true;
    for (int k = 0; k < x.shape.d(); ++k)
      if (v[k] - 1 < x.window.lo[k] || v[k] + x.shape.a[k] > x.window.hi[k]) in = false;
    if (in) out.push_back(v);
  }
  return out;
}

template <Numeric T>
Report<T> check_gen_coherence_all(const Instance<T>& inst, const GridField<T>& x, const Tolerance& tol = {}) {
  Report<T> rep;
  for (const Idx& v : coherence_points(x)) {
    auto c = check_gen_coherence(inst, x, v, tol);
    if (!c.ok) rep.push_back(finding("coherence", v, c.lhs, c.rhs));
    if (c.ok != c.split_ok) rep.push_back(finding("split-form-disagrees", v, c.even, c.odd));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Algebraic identities at arbitrary points

// f_1 ... f_d = (df/dz_a)^2 - 4 f g
template <Numeric T>
bool discriminant_identity(const Instance<T>& inst, const std::vector<T>& z) {
  T prod(1);
  for (const auto& p : inst.fi) prod = prod * eval(p, z);
  T df = eval(inst.df, z);
  T rhs = df * df - T(4) * eval(inst.f, z) * eval(inst.g, z);
  return is_zero(T(prod - rhs));
}

// z with the i-th coordinate of every index reflected inside the box [b]
template <class T>
std::vector<T> reflect(const BoxShape& s, const Idx& b, const std::vector<T>& z, int i) {
  std::vector<T> out(z.size(), T(0));
  for (std::size_t f = 0; f < s.count(); ++f) {
    Idx p = s.point(f);
    bool inside = true;
    for (int k = 0; k < s.d(); ++k)
      if (p[k] > b[k]) inside = false;
    if (!inside) continue;
    Idx q = p;
    q[i] = b[i] - p[i];
    out[s.flat(q)] = z[f];
  }
  return out;
}

// f invariant under every pi_{a,i}; each f_j invariant under every pi_{a - 1_j, i}
template <Numeric T>
bool invariance_holds(const Instance<T>& inst, const std::vector<T>& z) {
  const BoxShape& s = inst.shape;
  for (int i = 0; i < s.d(); ++i)
    if (!is_zero(T(eval(inst.f, z) - eval(inst.f, reflect(s, s.a, z, i))))) return false;
  for (int j = 0; j < s.d(); ++j) {
    Idx b = s.a;
    b[j] -= 1;
    std::vector<T> zj = reflect(s, b, reflect(s, b, z, 0), 0);  // z restricted to [a - 1_j]
    for (int i = 0; i < s.d(); ++i)
      if (!is_zero(T(eval(inst.fi[std::size_t(j)], zj) - eval(inst.fi[std::size_t(j)], reflect(s, b, zj, i))))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Propagation signs

struct SignSurvey {
  std::vector<int> observed;  // per mask: +1, -1, 0 unseen, 2 inconsistent
  std::vector<unsigned> mismatches;
  std::size_t samples = 0;
};

// Records sign(df / prod faces) for every orientation of every box with complete data.
template <Numeric T>
void survey_signs(const Instance<T>& inst, const GridField<T>& x, SignSurvey& out, const Tolerance& tol = {}) {
  const BoxShape& s = inst.shape;
  int d = s.d();
  if (out.observed.empty()) out.observed.assign(std::size_t(1) << d, 0);
  for (std::size_t f = 0; f < x.window.size(); ++f) {
    Idx v = x.window.point(f);
    for (unsigned m = 0; m < (1u << d); ++m) {
      auto z = gather(x, v, m);
      if (!z) continue;
      T prod(1);
      bool ok = true;
      for (int i = 0; i < d && ok; ++i) {
        Idx b = oriented_face_base(s, v, m, i);
        if (!x.has_f(i, b)) ok = false;
        else prod = prod * x.face(i, b);
      }
      if (!ok) continue;
      T df = eval(inst.df, *z);
      double sc = std::max(eval_scale(inst.df, *z), std::fabs(to_double(prod)));
      int sign = 0;
      if (residual_ok(T(df - prod), T(sc), tol)) sign = 1;
      else if (residual_ok(T(df + prod), T(sc), tol)) sign = -1;
      int& slot = out.observed[m];
      if (sign == 0 || (slot != 0 && slot != sign)) slot = 2;
      else slot = sign;
      ++out.samples;
    }
  }
}

inline std::vector<unsigned> sign_mismatches(const std::vector<int>& table, const std::vector<int>& observed) {
  std::vector<unsigned> bad;
  for (unsigned m = 0; m < table.size(); ++m)
    if (observed.at(m) != table[m]) bad.push_back(m);
  return bad;
}

// Window sized so that every orientation of some box has complete data.
inline Window default_window(const BoxShape& s) {
  Window w;
  for (int k = 0; k < s.d(); ++k) {
    w.lo.push_back(0);
    int span = s.d() == 1 ? 12 : (s.d() == 2 ? 3 * s.a[k] + 2 : 2 * s.a[k] + 2);
    w.hi.push_back(span);
  }
  return w;
}

// Positive random sweeps in double precision, then a sign survey against the hardcoded table.
template <class Rng>
SignSurvey verify_propagation_signs(const Instance<double>& inst, int trials, Rng& rng, const Tolerance& tol = {}) {
  SignSurvey sv;
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int t = 0; t < trials; ++t) {
    auto x = initial_field(inst, default_window(inst.shape), [&] { return u(rng); });
    gen_sweep(inst, x);
    survey_signs(inst, x, sv, tol);
  }
  sv.mismatches = sign_mismatches(inst.gamma, sv.observed);
  return sv;
}

// ---------------------------------------------------------------------------
// Exact one-dimensional trajectories: the seed z_0, z_1, z_2 is searched so that D is a rational square.

template <class T>
std::optional<std::vector<T>> square_seed(const Instance<T>& inst, int limit = 16) {
  if (inst.d() != 1) throw Error(ErrorKind::BadParams, "square seeds exist only for one-dimensional instances");
  for (int s = 3; s <= 3 * limit; ++s)
    for (int a = 1; a <= limit; ++a)
      for (int b = 1; b <= limit; ++b) {
        int c = s - a - b;
        if (c < 1 || c > limit) continue;
        std::vector<T> z(inst.shape.count(), T(0));
        z[0] = T(a);
        z[1] = T(b);
        z[2] = T(c);
        T D = eval(inst.fi[0], z);
        if (sgn(D) <= 0) continue;
        try {
          sqrt_principal(D);
        } catch (const Error&) {
          continue;
        }
        if (is_zero(eval(inst.g, z))) continue;
        return std::vector<T>{z[0], z[1], z[2]};
      }
  return std::nullopt;
}

template <Numeric T>
GridField<T> trajectory_1d(const Instance<T>& inst, const std::vector<T>& seed, int length) {
  int a = inst.shape.a[0];
  if (int(seed.size()) != a) throw Error(ErrorKind::InvalidInput, "seed must hold a values");
  Window w{{0}, {length - 1}};
  std::size_t k = 0;
  auto x = initial_field(inst, w, [&] { return seed.at(k++); });
  gen_sweep(inst, x);
  return x;
}

// z_0^2 z_3 = z_{-1} z_2^2 at v (v is the position of z_0)
template <Numeric T>
std::pair<T, T> cubic1d_ratio_form(const GridField<T>& x, int v) {
  return {x.at({v}) * x.at({v}) * x.at({v + 3}), x.at({v - 1}) * x.at({v + 2}) * x.at({v + 2})};
}

}  // namespace kashaev::gen
