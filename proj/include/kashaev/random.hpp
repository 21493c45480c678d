#pragma once

#include <gmpxx.h>

#include <random>

#include "kashaev/kashaev3d.hpp"
#include "kashaev/lattice.hpp"
#include "kashaev/minors.hpp"

namespace kashaev {

// Nonzero rational with a wide numerator range; small entries hit degenerate cases too often.
inline mpq_class random_rational(std::mt19937_64& rng, int span = 1000, int den = 97) {
  for (;;) {
    long p = static_cast<long>(rng() % (2 * span + 1)) - span;
    long q = static_cast<long>(rng() % den) + 1;
    if (p == 0) continue;
    mpq_class r(p, q);
    r.canonicalize();
    return r;
  }
}

// Values on every point with some coordinate at the window floor, drawn uniformly from [lo, hi].
inline VertexField3<double> random_positive_slab(const Box3& w, std::mt19937_64& rng, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  VertexField3<double> f(w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    Pt3 p = w.point(i);
    if (p[0] == w.lo[0] || p[1] == w.lo[1] || p[2] == w.lo[2]) f.set(p, u(rng));
  }
  return f;
}

namespace detail {

inline int floor_count(const Box3& w, const Pt3& p) {
  int n = 0;
  for (int k = 0; k < 3; ++k) n += p[k] == w.lo[k];
  return n;
}

}  // namespace detail

// An exact K-hexahedron solution on the whole window. The three floor planes get random vertex
// and face values tied by the face relation, and cubes are then swept upward. Draws that hit a
// zero are retried.
inline KHexField3<mpq_class> random_khex_exact(const Box3& w, std::mt19937_64& rng, int max_tries = 100) {
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    KHexField3<mpq_class> fld(w);
    bool bad = false;
    for (const Pt3& p : w.points_by_height())
      if (detail::floor_count(w, p) >= 2) fld.vertices.set(p, random_rational(rng, 9, 5));
    // a face in a floor plane fixes its far corner
    std::vector<FaceKey> plane;
    for (const FaceKey& f : fld.faces.all_faces())
      if (f.base[f.axis - 1] == w.lo[f.axis - 1]) plane.push_back(f);
    std::stable_sort(plane.begin(), plane.end(), [](const FaceKey& a, const FaceKey& b) { return height(a.base) < height(b.base); });
    for (const FaceKey& f : plane) {
      auto c = face_corners(f);
      mpq_class s = random_rational(rng, 9, 5);
      fld.faces.set(f, s);
      if (fld.vertices.has(c[2])) continue;
      const mpq_class& x0 = fld.vertices.at(c[0]);
      mpq_class x2 = (s * s - fld.vertices.at(c[1]) * fld.vertices.at(c[3])) / x0;
      if (x2 == 0) {
        bad = true;
        break;
      }
      fld.vertices.set(c[2], x2);
    }
    if (bad) continue;
    try {
      fld = run_khex(std::move(fld));
    } catch (const Error&) {
      continue;
    }
    bool zero = false;
    for (std::size_t i = 0; i < w.size() && !zero; ++i) zero = fld.vertices.at(w.point(i)) == 0;
    for (const FaceKey& f : fld.faces.all_faces())
      if (!zero && fld.faces.at(f) == 0) zero = true;
    if (!zero && fld.vertices.complete() && fld.faces.complete()) return fld;
  }
  throw Error(ErrorKind::NonConvergent, "no nonzero K-hexahedron draw found");
}

inline Gauge random_gauge(const Box3& w, std::mt19937_64& rng) {
  Gauge g = identity_gauge(w);
  for (auto* v : {&g.alpha, &g.beta, &g.gamma})
    for (int& s : *v) s = rng() % 2 ? 1 : -1;
  return g;
}

// Symmetric rational matrix whose minor data passes every genericity requirement.
inline Mat<mpq_class> random_generic_symmetric(int n, std::mt19937_64& rng, int max_tries = 200) {
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    Mat<mpq_class> m(n, std::vector<mpq_class>(n));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m[i][j] = m[j][i] = random_rational(rng);
    MinorTuple<mpq_class> t = signed_minor_tuple(m);
    bool zero = false;
    for (const auto& x : t.x) zero = zero || x == 0;
    if (zero) continue;
    try {
      if (realizability_test(t, Tolerance{}).pass) return m;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorKind::Ungeneric, "no generic symmetric matrix found");
}

}  // namespace kashaev
