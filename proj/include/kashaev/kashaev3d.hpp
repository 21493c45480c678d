#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "kashaev/error.hpp"
#include "kashaev/lattice.hpp"
#include "kashaev/report.hpp"
#include "kashaev/scalar.hpp"

namespace kashaev {

// Corner values of a unit cube; index bit 0 is the x step, bit 1 the y step, bit 2 the z step.
template <class T>
using Corners = std::array<T, 8>;

// The cube seen from corner c: z'[m] = z[m ^ c].
template <class T>
Corners<T> relabel(const Corners<T>& z, int c) {
  Corners<T> r;
  for (int m = 0; m < 8; ++m) r[m] = z[m ^ c];
  return r;
}

template <Numeric T>
T kashaev_K(const Corners<T>& z) {
  T a = z[0] * z[7], b = z[1] * z[6], c = z[2] * z[5], d = z[4] * z[3];
  T s = z[0] * z[6] * z[5] * z[3];
  T t = z[7] * z[1] * z[2] * z[4];
  T sum = a + b + c + d;
  return T(2) * (a * a + b * b + c * c + d * d) - sum * sum - T(4) * (s + t);
}

// Magnitude of the terms of K, used to judge float residuals.
template <Numeric T>
T kashaev_K_scale(const Corners<T>& z) {
  Corners<T> y;
  for (int m = 0; m < 8; ++m) y[m] = abs_value(z[m]);
  T a = y[0] * y[7], b = y[1] * y[6], c = y[2] * y[5], d = y[4] * y[3];
  T sum = a + b + c + d;
  return T(2) * (a * a + b * b + c * c + d * d) + sum * sum + T(4) * (y[0] * y[6] * y[5] * y[3] + y[7] * y[1] * y[2] * y[4]);
}

// One quarter of dK/dz_w at the cube, where w is the corner opposite to `corner`.
template <Numeric T>
T kashaev_Kv(const Corners<T>& cube, int corner) {
  Corners<T> z = relabel(cube, corner);
  T pairs = z[1] * z[6] + z[2] * z[5] + z[4] * z[3];
  return konst<T>(1, 2) * (z[7] * z[0] * z[0] - z[0] * pairs) - z[1] * z[2] * z[4];
}

template <Numeric T>
T kashaev_Kv_scale(const Corners<T>& cube, int corner) {
  Corners<T> z = relabel(cube, corner);
  for (auto& v : z) v = abs_value(v);
  T pairs = z[1] * z[6] + z[2] * z[5] + z[4] * z[3];
  return konst<T>(1, 2) * (z[7] * z[0] * z[0] + z[0] * pairs) + z[1] * z[2] * z[4];
}

template <class T>
struct CubeRoots {
  T A, D, plus, minus;
};

// Both solutions for z111 given the other seven corners (indices 0..6).
template <Numeric T>
CubeRoots<T> cube_roots(const std::array<T, 7>& z) {
  if (is_zero(z[0])) throw Error(ErrorKind::ZeroBaseVertex, "z000 = 0");
  T A = T(2) * z[1] * z[2] * z[4] + z[0] * (z[1] * z[6] + z[2] * z[5] + z[4] * z[3]);
  T D = (z[0] * z[6] + z[2] * z[4]) * (z[0] * z[5] + z[1] * z[4]) * (z[0] * z[3] + z[1] * z[2]);
  T r = sqrt_principal(D);
  T den = z[0] * z[0];
  return {A, D, (A + T(2) * r) / den, (A - T(2) * r) / den};
}

template <Numeric T>
std::array<T, 7> lower_seven(const Corners<T>& z) {
  return {z[0], z[1], z[2], z[3], z[4], z[5], z[6]};
}

template <Numeric T>
bool residual_ok(const T& value, const T& scale, const Tolerance& tol) {
  return near_zero(value, scale, tol);
}

// ---------------------------------------------------------------------------
// positive recurrence and Kashaev checks

// Fills, in height order, every missing point whose cube below it lies in the window with
// all seven lower corners known, taking the + root. Heights above `max_height` stay empty.
template <Numeric T>
VertexField3<T> run_positive_kashaev(VertexField3<T> field, std::optional<int> max_height = std::nullopt) {
  const Box3& w = field.window();
  for (const Pt3& p : w.points_by_height()) {
    if (field.has(p)) continue;
    if (max_height && height(p) > *max_height) break;
    Pt3 base = p - Pt3{1, 1, 1};
    if (!w.has_cube(base)) continue;
    std::array<T, 7> seven;
    bool ready = true;
    for (int m = 0; m < 7 && ready; ++m) {
      Pt3 q = corner(base, m);
      if (!field.has(q)) ready = false;
      else seven[m] = field.at(q);
    }
    if (!ready) continue;
    field.set(p, cube_roots(seven).plus);
  }
  return field;
}

// Heights 3..2+steps above a slab whose lowest missing height is where filling starts.
template <Numeric T>
VertexField3<T> run_positive_kashaev_steps(const VertexField3<T>& init, int steps) {
  std::optional<int> first_missing;
  for (const Pt3& p : init.window().points_by_height())
    if (!init.has(p)) {
      first_missing = height(p);
      break;
    }
  if (!first_missing) return init;
  return run_positive_kashaev(init, std::optional<int>(*first_missing + steps - 1));
}

template <Numeric T>
std::vector<Pt3> cube_bases(const VertexField3<T>& field) {
  std::vector<Pt3> out;
  const Box3& w = field.window();
  for (std::size_t i = 0; i < w.size(); ++i) {
    Pt3 b = w.point(i);
    if (w.has_cube(b) && field.has_cube(b)) out.push_back(b);
  }
  return out;
}

template <Numeric T>
Report<T> check_kashaev(const VertexField3<T>& field, const Tolerance& tol = {}, unsigned jobs = 1) {
  auto bases = cube_bases(field);
  std::vector<std::optional<Finding<T>>> slots(bases.size());
  parallel_for(bases.size(), jobs, [&](std::size_t i) {
    Corners<T> z = field.cube(bases[i]);
    T k = kashaev_K(z);
    if (!residual_ok(k, kashaev_K_scale(z), tol))
      slots[i] = Finding<T>{"kashaev", {bases[i][0], bases[i][1], bases[i][2]}, k, T(0)};
  });
  Report<T> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// coherence

// Running product kept as sign and log magnitude, so long float products cannot overflow.
struct LogProduct {
  int sign = 1;
  double log_mag = 0, log_scale = 0;
  void mul(double value, double scale) {
    if (value == 0) sign = 0;
    else {
      if (value < 0) sign = -sign;
      log_mag += std::log(std::fabs(value));
    }
    log_scale += std::log(std::fabs(scale));
  }
};

// a = sign * b within tolerance, judged against the larger term scale
inline bool log_close(const LogProduct& a, const LogProduct& b, int sign, const Tolerance& tol) {
  if (a.sign == 0 || b.sign == 0) return a.sign == 0 && b.sign == 0;
  if (a.sign != sign * b.sign) return false;
  double top = std::max(a.log_mag, b.log_mag);
  double diff = std::fabs(std::exp(a.log_mag - top) - std::exp(b.log_mag - top));
  double scale = std::exp(std::max({a.log_scale, b.log_scale, top}) - top);
  return diff <= tol.abs * std::exp(-top) + tol.rel * scale;
}

template <class T>
struct Coherence {
  T lhs, rhs;      // product of the 8 K_v against product of the 12 square expressions
  T even, odd;     // split form: cubes with i1 i2 i3 = 1 against i1 i2 i3 = -1
  bool ok = false;        // lhs = rhs
  bool opposite = false;  // lhs = -rhs
  bool split_ok = false;  // even = odd
};

// The square through v spanned by s1 e_j and s2 e_k: x_v x_opp + x_{v+s1 e_j} x_{v+s2 e_k}.
template <Numeric T>
std::pair<T, T> corner_square(const VertexField3<T>& f, const Pt3& v, int j, int k, int s1, int s2) {
  Pt3 dj = unit(j), dk = unit(k);
  for (auto& c : dj) c *= s1;
  for (auto& c : dk) c *= s2;
  const T& xv = f.at(v);
  const T& xo = f.at(v + dj + dk);
  const T& x1 = f.at(v + dj);
  const T& x2 = f.at(v + dk);
  return {xv * xo + x1 * x2, abs_value(xv) * abs_value(xo) + abs_value(x1) * abs_value(x2)};
}

template <Numeric T>
Coherence<T> check_coherence(const VertexField3<T>& field, const Pt3& v, const Tolerance& tol = {}) {
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dz = -1; dz <= 1; ++dz)
        if (!field.has(v + Pt3{dx, dy, dz}))
          throw Error(ErrorKind::NeighborhoodIncomplete, "3x3x3 neighborhood of vertex is not in the field");
  Coherence<T> r{T(1), T(1), T(1), T(1)};
  LogProduct L, R, E, O;
  bool exact = true;
  for (int m = 0; m < 8; ++m) {
    // bit set = negative direction on that axis
    Pt3 base = v;
    int parity = 1;
    for (int a = 0; a < 3; ++a)
      if (m >> a & 1) {
        base[a] -= 1;
        parity = -parity;
      }
    Corners<T> z = field.cube(base);
    T kv = kashaev_Kv(z, m);
    double kd = to_double(kv), sd = to_double(kashaev_Kv_scale(z, m));
    exact = exact && is_exact(kv);
    r.lhs = r.lhs * kv;
    L.mul(kd, sd);
    if (parity == 1) {
      r.even = r.even * kv;
      E.mul(kd, sd);
    } else {
      r.odd = r.odd * kv;
      O.mul(kd, sd);
    }
  }
  for (int axis = 1; axis <= 3; ++axis) {
    auto [j, k] = other_axes(axis);
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1}) {
        auto [e, sc] = corner_square(field, v, j, k, s1, s2);
        exact = exact && is_exact(e);
        r.rhs = r.rhs * e;
        R.mul(to_double(e), to_double(sc));
      }
  }
  if (exact) {
    r.ok = is_zero(T(r.lhs - r.rhs));
    r.opposite = is_zero(T(r.lhs + r.rhs));
    r.split_ok = is_zero(T(r.even - r.odd));
  } else {
    r.ok = log_close(L, R, 1, tol);
    r.opposite = log_close(L, R, -1, tol);
    r.split_ok = log_close(E, O, 1, tol);
  }
  return r;
}

// Coherence at every interior vertex of the window; failures become findings.
template <Numeric T>
Report<T> check_coherence_all(const VertexField3<T>& field, const Tolerance& tol = {}, unsigned jobs = 1) {
  const Box3& w = field.window();
  std::vector<Pt3> pts;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w.is_interior(w.point(i))) pts.push_back(w.point(i));
  std::vector<std::optional<Finding<T>>> slots(pts.size());
  parallel_for(pts.size(), jobs, [&](std::size_t i) {
    auto c = check_coherence(field, pts[i], tol);
    if (!c.ok) slots[i] = Finding<T>{"coherence", {pts[i][0], pts[i][1], pts[i][2]}, c.lhs, c.rhs};
  });
  Report<T> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// K-hexahedron and hexahedron steps

template <class T>
struct KhexOut {
  std::array<T, 3> faces;  // z_{1½½}, z_{½1½}, z_{½½1}
  T top;
};

// lower: the eight corners (index 7 unused); faces: z_{0½½}, z_{½0½}, z_{½½0}
template <Numeric T>
KhexOut<T> khex_step(const Corners<T>& z, const std::array<T, 3>& f) {
  if (is_zero(z[0])) throw Error(ErrorKind::ZeroBaseVertex, "z000 = 0");
  KhexOut<T> out;
  out.faces[0] = (f[1] * f[2] + f[0] * z[1]) / z[0];
  out.faces[1] = (f[0] * f[2] + f[1] * z[2]) / z[0];
  out.faces[2] = (f[0] * f[1] + f[2] * z[4]) / z[0];
  T A = T(2) * z[1] * z[2] * z[4] + z[0] * (z[1] * z[6] + z[2] * z[5] + z[4] * z[3]);
  out.top = (A + T(2) * f[0] * f[1] * f[2]) / (z[0] * z[0]);
  return out;
}

// The birational hexahedron rule; agrees with khex_step whenever the faces satisfy the
// face condition and all denominators are nonzero.
template <Numeric T>
KhexOut<T> hex_step(const Corners<T>& z, const std::array<T, 3>& f) {
  if (is_zero(z[0])) throw Error(ErrorKind::ZeroBaseVertex, "z000 = 0");
  T F = f[0] * f[1] * f[2];
  if (is_zero(F)) throw Error(ErrorKind::ZeroDenominator, "product of lower faces is 0");
  T p = z[1] * z[2] * z[4];
  KhexOut<T> out;
  out.faces[0] = (F + p + z[0] * z[1] * z[6]) / (z[0] * f[0]);
  out.faces[1] = (F + p + z[0] * z[2] * z[5]) / (z[0] * f[1]);
  out.faces[2] = (F + p + z[0] * z[4] * z[3]) / (z[0] * f[2]);
  T A = T(2) * p + z[0] * (z[1] * z[6] + z[2] * z[5] + z[4] * z[3]);
  T D = (z[0] * z[6] + z[2] * z[4]) * (z[0] * z[5] + z[1] * z[4]) * (z[0] * z[3] + z[1] * z[2]);
  out.top = (F * F + A * F + D) / (z[0] * z[0] * F);
  return out;
}

template <Numeric T>
std::pair<T, T> face_expression(const VertexField3<T>& v, const FaceKey& f) {
  auto c = face_corners(f);
  const T &a = v.at(c[0]), &b = v.at(c[1]), &cc = v.at(c[2]), &d = v.at(c[3]);
  return {a * cc + b * d, abs_value(a) * abs_value(cc) + abs_value(b) * abs_value(d)};
}

inline std::array<FaceKey, 3> lower_faces(const Pt3& base) { return {FaceKey{1, base}, FaceKey{2, base}, FaceKey{3, base}}; }
inline std::array<FaceKey, 3> upper_faces(const Pt3& base) {
  return {FaceKey{1, base + unit(1)}, FaceKey{2, base + unit(2)}, FaceKey{3, base + unit(3)}};
}

// The three faces of the cube at base that meet corner c.
inline std::array<FaceKey, 3> corner_faces(const Pt3& base, int c) {
  auto lo = lower_faces(base), up = upper_faces(base);
  return {(c & 1) ? up[0] : lo[0], (c & 2) ? up[1] : lo[1], (c & 4) ? up[2] : lo[2]};
}

// Sign relating K_v to the product of the faces at v: +1 only at the two ends of the main diagonal.
inline int corner_sign(int c) { return c == 0 || c == 7 ? 1 : -1; }

template <Numeric T>
void require_nonzero_vertices(const VertexField3<T>& v) {
  v.for_each([](const Pt3& p, const T& x) {
    if (is_zero(x))
      throw Error(ErrorKind::ZeroVertexValue,
                  "zero at (" + std::to_string(p[0]) + "," + std::to_string(p[1]) + "," + std::to_string(p[2]) + ")");
  });
}

inline std::vector<int> face_where(const FaceKey& f) { return {f.axis, f.base[0], f.base[1], f.base[2]}; }

// Residuals of the K-hexahedron rule on one cube, division free.
template <Numeric T>
std::optional<Finding<T>> khex_residual(const Corners<T>& z, const std::array<T, 3>& lo, const std::array<T, 3>& up,
                                        std::vector<int> where, const Tolerance& tol) {
  const int nb[3] = {1, 2, 4};
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    T lhs = z[0] * up[i];
    T rhs = lo[j] * lo[k] + lo[i] * z[nb[i]];
    T scale = abs_value(lhs) + abs_value(T(lo[j] * lo[k])) + abs_value(T(lo[i] * z[nb[i]]));
    if (!residual_ok(T(lhs - rhs), scale, tol)) return Finding<T>{"khex-face-" + std::to_string(i + 1), where, lhs, rhs};
  }
  T A = T(2) * z[1] * z[2] * z[4] + z[0] * (z[1] * z[6] + z[2] * z[5] + z[4] * z[3]);
  T F = lo[0] * lo[1] * lo[2];
  T lhs = z[0] * z[0] * z[7];
  T rhs = A + T(2) * F;
  T scale = abs_value(lhs) + abs_value(z[0]) * kashaev_Kv_scale(z, 0) + T(2) * abs_value(T(z[1] * z[2] * z[4])) + T(2) * abs_value(F);
  if (!residual_ok(T(lhs - rhs), scale, tol)) return Finding<T>{"khex-top", where, lhs, rhs};
  return std::nullopt;
}

template <Numeric T>
std::optional<Finding<T>> khex_cube_finding(const KHexField3<T>& fld, const Pt3& base, const Tolerance& tol) {
  auto lf = lower_faces(base);
  auto uf = upper_faces(base);
  std::array<T, 3> lo{fld.faces.at(lf[0]), fld.faces.at(lf[1]), fld.faces.at(lf[2])};
  std::array<T, 3> up{fld.faces.at(uf[0]), fld.faces.at(uf[1]), fld.faces.at(uf[2])};
  return khex_residual(fld.vertices.cube(base), lo, up, {base[0], base[1], base[2]}, tol);
}

template <Numeric T>
Report<T> check_khex(const KHexField3<T>& fld, const Tolerance& tol = {}, unsigned jobs = 1) {
  require_nonzero_vertices(fld.vertices);
  Report<T> out;
  for (const FaceKey& f : fld.faces.all_faces()) {
    if (!fld.faces.has(f)) {
      out.push_back(Finding<T>{"missing-face", face_where(f), T(0), T(0)});
      continue;
    }
    auto [e, sc] = face_expression(fld.vertices, f);
    const T& x = fld.faces.at(f);
    T sq = x * x;
    if (!residual_ok(T(sq - e), T(sc + abs_value(sq)), tol)) out.push_back(Finding<T>{"face-condition", face_where(f), sq, e});
  }
  auto bases = cube_bases(fld.vertices);
  std::vector<std::optional<Finding<T>>> slots(bases.size());
  parallel_for(bases.size(), jobs, [&](std::size_t i) {
    for (const auto& f : lower_faces(bases[i]))
      if (!fld.faces.has(f)) return;
    for (const auto& f : upper_faces(bases[i]))
      if (!fld.faces.has(f)) return;
    slots[i] = khex_cube_finding(fld, bases[i], tol);
  });
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

// Fills every cube top and upper faces from its lower data, in height order.
template <Numeric T>
KHexField3<T> run_khex(KHexField3<T> fld) {
  const Box3& w = fld.window();
  std::vector<Pt3> cubes;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w.has_cube(w.point(i))) cubes.push_back(w.point(i));
  std::stable_sort(cubes.begin(), cubes.end(), [](const Pt3& a, const Pt3& b) { return height(a) < height(b); });
  for (const Pt3& base : cubes) {
    if (fld.vertices.has(corner(base, 7))) continue;
    Corners<T> z;
    bool ok = true;
    for (int m = 0; m < 7 && ok; ++m) {
      if (!fld.vertices.has(corner(base, m))) ok = false;
      else z[m] = fld.vertices.at(corner(base, m));
    }
    auto lf = lower_faces(base);
    for (const auto& f : lf)
      if (!fld.faces.has(f)) ok = false;
    if (!ok) continue;
    KhexOut<T> r = khex_step(z, {fld.faces.at(lf[0]), fld.faces.at(lf[1]), fld.faces.at(lf[2])});
    fld.vertices.set(corner(base, 7), r.top);
    auto uf = upper_faces(base);
    for (int i = 0; i < 3; ++i) fld.faces.set(uf[i], r.faces[i]);
  }
  return fld;
}

// ---------------------------------------------------------------------------
// face classes and the map psi

// A class of faces: all faces with this axis and these two transverse coordinates.
struct ClassKey {
  int axis;
  int u, v;  // coordinates along other_axes(axis)
  auto operator<=>(const ClassKey&) const = default;
};

inline ClassKey class_of(const FaceKey& f) {
  auto [j, k] = other_axes(f.axis);
  return {f.axis, f.base[j - 1], f.base[k - 1]};
}

using SignClassAssignment = std::map<ClassKey, int>;

inline std::vector<ClassKey> classes_of(const Box3& w) {
  std::vector<ClassKey> out;
  for (int axis = 1; axis <= 3; ++axis) {
    auto [j, k] = other_axes(axis);
    for (int u = w.lo[j - 1]; u < w.hi[j - 1]; ++u)
      for (int v = w.lo[k - 1]; v < w.hi[k - 1]; ++v) out.push_back({axis, u, v});
  }
  return out;
}

inline int class_sign(const SignClassAssignment& t, const ClassKey& k) {
  auto it = t.find(k);
  return it == t.end() ? 1 : it->second;
}

// psi(t) on the cube at base: product of the signs of its three face classes.
inline int psi(const SignClassAssignment& t, const Pt3& base) {
  int s = 1;
  for (const auto& f : lower_faces(base)) s *= class_sign(t, class_of(f));
  return s;
}

inline std::vector<Pt3> window_cubes(const Box3& w) {
  std::vector<Pt3> out;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w.has_cube(w.point(i))) out.push_back(w.point(i));
  return out;
}

// Interior vertices where the cube signs u fail the image condition (product over the
// 8 cubes at v equals +1). u maps cube bases to signs.
inline std::vector<Pt3> psi_image_violations(const Box3& w, const std::map<Pt3, int>& u) {
  std::vector<Pt3> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    Pt3 v = w.point(i);
    if (!w.is_interior(v)) continue;
    int s = 1;
    for (int m = 0; m < 8; ++m) {
      auto it = u.find(v - Pt3{m & 1, (m >> 1) & 1, (m >> 2) & 1});
      if (it != u.end()) s *= it->second;
    }
    if (s != 1) out.push_back(v);
  }
  return out;
}

template <Numeric T>
KHexField3<T> apply_class_signs(KHexField3<T> fld, const SignClassAssignment& t) {
  for (const FaceKey& f : fld.faces.all_faces())
    if (fld.faces.has(f) && class_sign(t, class_of(f)) < 0) fld.faces.set(f, T(-fld.faces.at(f)));
  return fld;
}

// ---------------------------------------------------------------------------
// extension of a coherent Kashaev solution

template <Numeric T>
KHexField3<T> extend_to_khex(const VertexField3<T>& field, const Tolerance& tol = {}) {
  const Box3& w = field.window();
  if (!field.complete()) throw Error(ErrorKind::MissingValue, "vertex field does not cover its window");
  require_nonzero_vertices(field);
  if (!check_kashaev(field, tol).empty()) throw Error(ErrorKind::NotCoherent, "field does not satisfy the Kashaev equation");
  for (std::size_t i = 0; i < w.size(); ++i) {
    Pt3 v = w.point(i);
    if (w.is_interior(v) && !check_coherence(field, v, tol).ok)
      throw Error(ErrorKind::NotCoherent, "coherence fails at (" + std::to_string(v[0]) + "," + std::to_string(v[1]) + "," +
                                              std::to_string(v[2]) + ")");
  }
  KHexField3<T> out(w);
  out.vertices = field;
  FaceField3<T> probe(w);
  for (const FaceKey& f : probe.all_faces()) {
    auto [e, sc] = face_expression(field, f);
    if (residual_ok(e, sc, tol)) throw Error(ErrorKind::ZeroFaceExpression, "face expression vanishes");
    if (f.base[f.axis - 1] == w.lo[f.axis - 1]) out.faces.set(f, sqrt_principal(e));
  }
  std::vector<Pt3> cubes = window_cubes(w);
  std::stable_sort(cubes.begin(), cubes.end(), [](const Pt3& a, const Pt3& b) { return height(a) < height(b); });
  for (const Pt3& base : cubes) {
    Corners<T> z = field.cube(base);
    auto lf = lower_faces(base);
    auto step = [&] {
      return khex_step(z, std::array<T, 3>{out.faces.at(lf[0]), out.faces.at(lf[1]), out.faces.at(lf[2])});
    };
    KhexOut<T> r = step();
    if (!approx_eq(r.top, z[7], tol)) {
      // flip the class of a lower face that starts on the initial boundary; that class meets
      // no cube processed so far
      std::optional<FaceKey> fresh;
      for (const auto& f : lf)
        if (f.base[f.axis - 1] == w.lo[f.axis - 1]) {
          fresh = f;
          break;
        }
      if (!fresh) throw Error(ErrorKind::NonConvergent, "top vertex mismatch that no sign flip explains");
      out.faces.set(*fresh, T(-out.faces.at(*fresh)));
      r = step();
      if (!approx_eq(r.top, z[7], tol)) throw Error(ErrorKind::NonConvergent, "top vertex mismatch persists after sign flip");
    }
    auto uf = upper_faces(base);
    for (int i = 0; i < 3; ++i) out.faces.set(uf[i], r.faces[i]);
  }
  // faces of degenerate windows (no cube above them) still need values
  for (const FaceKey& f : probe.all_faces())
    if (!out.faces.has(f)) out.faces.set(f, sqrt_principal(face_expression(field, f).first));
  return out;
}

// ---------------------------------------------------------------------------
// gauges

// alpha[a - lo.x] for a in [lo.x, hi.x), and likewise beta over y, gamma over z.
struct Gauge {
  std::vector<int> alpha, beta, gamma;
  friend bool operator==(const Gauge&, const Gauge&) = default;
};

inline Gauge identity_gauge(const Box3& w) {
  return {std::vector<int>(w.extent(0) - 1, 1), std::vector<int>(w.extent(1) - 1, 1), std::vector<int>(w.extent(2) - 1, 1)};
}

inline int gauge_factor(const Gauge& g, const Box3& w, const FaceKey& f) {
  auto idx = [&](int axis) { return f.base[axis - 1] - w.lo[axis - 1]; };
  switch (f.axis) {
    case 1: return g.beta.at(idx(2)) * g.gamma.at(idx(3));
    case 2: return g.alpha.at(idx(1)) * g.gamma.at(idx(3));
    default: return g.alpha.at(idx(1)) * g.beta.at(idx(2));
  }
}

template <Numeric T>
KHexField3<T> gauge_transform(KHexField3<T> fld, const Gauge& g) {
  const Box3& w = fld.window();
  if (int(g.alpha.size()) != w.extent(0) - 1 || int(g.beta.size()) != w.extent(1) - 1 || int(g.gamma.size()) != w.extent(2) - 1)
    throw Error(ErrorKind::InvalidInput, "gauge length does not match the window");
  for (const FaceKey& f : fld.faces.all_faces())
    if (fld.faces.has(f) && gauge_factor(g, w, f) < 0) fld.faces.set(f, T(-fld.faces.at(f)));
  return fld;
}

struct GaugeWitness {
  std::string kind;  // "face-ratio", "class", "cube"
  std::vector<int> where;
};

struct GaugeComparison {
  std::optional<Gauge> gauge;
  std::optional<GaugeWitness> witness;
};

template <Numeric T>
GaugeComparison gauge_compare(const KHexField3<T>& f1, const KHexField3<T>& f2, const Tolerance& tol = {}) {
  const Box3& w = f1.window();
  if (!(w == f2.window())) throw Error(ErrorKind::VertexMismatch, "windows differ");
  for (std::size_t i = 0; i < w.size(); ++i) {
    Pt3 p = w.point(i);
    if (f1.vertices.has(p) != f2.vertices.has(p) || (f1.vertices.has(p) && !approx_eq(f1.vertices.at(p), f2.vertices.at(p), tol)))
      throw Error(ErrorKind::VertexMismatch, "vertex values differ at (" + std::to_string(p[0]) + "," + std::to_string(p[1]) +
                                                 "," + std::to_string(p[2]) + ")");
  }
  // per-face ratio t = f2/f1 in {+1, -1}
  std::map<ClassKey, int> cls;
  std::map<std::pair<ClassKey, int>, int> ratio;  // (class, position along axis) -> sign
  for (const FaceKey& f : f1.faces.all_faces()) {
    const T& a = f1.faces.at(f);
    const T& b = f2.faces.at(f);
    int r;
    if (approx_eq(a, b, tol)) r = 1;
    else if (approx_eq(T(-a), b, tol)) r = -1;
    else return {std::nullopt, GaugeWitness{"face-ratio", face_where(f)}};
    ratio[{class_of(f), f.base[f.axis - 1]}] = r;
  }
  // constancy along each class; the witness is the cube between two disagreeing faces
  for (const auto& [key, r] : ratio) {
    auto [ck, pos] = key;
    auto it = cls.find(ck);
    if (it == cls.end()) {
      cls[ck] = r;
      continue;
    }
    if (it->second != r) {
      auto [j, k] = other_axes(ck.axis);
      Pt3 base{0, 0, 0};
      base[ck.axis - 1] = pos - 1;
      base[j - 1] = ck.u;
      base[k - 1] = ck.v;
      return {std::nullopt, GaugeWitness{"cube", {base[0], base[1], base[2]}}};
    }
  }
  SignClassAssignment t(cls.begin(), cls.end());
  for (const Pt3& c : window_cubes(w))
    if (psi(t, c) != 1) return {std::nullopt, GaugeWitness{"cube", {c[0], c[1], c[2]}}};
  // recover with alpha at lo.x fixed to +1
  Gauge g = identity_gauge(w);
  auto get = [&](int axis, int u, int v, int fallback) {
    auto it = t.find({axis, u, v});
    return it == t.end() ? fallback : it->second;
  };
  const Pt3& lo = w.lo;
  for (std::size_t b = 0; b < g.beta.size(); ++b) g.beta[b] = get(3, lo[0], lo[1] + int(b), 1);
  for (std::size_t c = 0; c < g.gamma.size(); ++c) g.gamma[c] = get(2, lo[0], lo[2] + int(c), 1);
  for (std::size_t a = 0; a < g.alpha.size(); ++a) {
    int ax = lo[0] + int(a);
    if (!g.beta.empty()) g.alpha[a] = get(3, ax, lo[1], 1) * g.beta[0];
    else if (!g.gamma.empty()) g.alpha[a] = get(2, ax, lo[2], 1) * g.gamma[0];
  }
  for (const FaceKey& f : f1.faces.all_faces())
    if (gauge_factor(g, w, f) != class_sign(t, class_of(f))) {
      ClassKey k = class_of(f);
      return {std::nullopt, GaugeWitness{"class", {k.axis, k.u, k.v}}};
    }
  return {g, std::nullopt};
}

// ---------------------------------------------------------------------------
// point reflection s -> -s

template <Numeric T>
VertexField3<T> reverse_vertices(const VertexField3<T>& f) {
  const Box3& w = f.window();
  Box3 r(Pt3{-w.hi[0], -w.hi[1], -w.hi[2]}, Pt3{-w.lo[0], -w.lo[1], -w.lo[2]});
  VertexField3<T> out(r);
  f.for_each([&](const Pt3& p, const T& x) { out.set(Pt3{-p[0], -p[1], -p[2]}, x); });
  return out;
}

// The face centred at base + (e_j + e_k)/2 reflects to the face with base -base - e_j - e_k.
template <Numeric T>
KHexField3<T> reverse_field(const KHexField3<T>& f) {
  KHexField3<T> out;
  out.vertices = reverse_vertices(f.vertices);
  out.faces = FaceField3<T>(out.vertices.window());
  for (const FaceKey& k : f.faces.all_faces()) {
    if (!f.faces.has(k)) continue;
    auto [j, kk] = other_axes(k.axis);
    Pt3 nb = Pt3{0, 0, 0} - k.base - unit(j) - unit(kk);
    out.faces.set(FaceKey{k.axis, nb}, f.faces.at(k));
  }
  return out;
}

}  // namespace kashaev
