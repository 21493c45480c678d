#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kashaev/complexes.hpp"
#include "kashaev/error.hpp"
#include "kashaev/kashaev3d.hpp"
#include "kashaev/report.hpp"
#include "kashaev/scalar.hpp"
#include "kashaev/tilings.hpp"

namespace kashaev {

template <class T>
using Mat = std::vector<std::vector<T>>;

template <Numeric T>
bool is_symmetric(const Mat<T>& m, const Tolerance& tol = {}) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (!approx_eq(m[i][j], m[j][i], tol)) return false;
  return true;
}

// Gaussian elimination; pivots on the largest magnitude so floats stay stable.
template <Numeric T>
T determinant(Mat<T> a) {
  std::size_t n = a.size();
  T det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = n;
    double best = 0;
    for (std::size_t r = c; r < n; ++r) {
      if (is_zero(a[r][c])) continue;
      double mag = std::fabs(to_double(a[r][c]));
      if (p == n || mag > best) {
        p = r;
        best = mag;
      }
    }
    if (p == n) return T(0);
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det = det * a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (is_zero(a[r][c])) continue;
      T f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] = a[r][k] - f * a[c][k];
    }
  }
  return det;
}

// det of the submatrix with the given row and column sets (same size)
template <Numeric T>
T minor_det(const Mat<T>& m, Label rows, Label cols) {
  std::vector<std::size_t> r, c;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (rows >> i & 1) r.push_back(i);
    if (cols >> i & 1) c.push_back(i);
  }
  if (r.size() != c.size()) throw Error(ErrorKind::InvalidInput, "minor with unequal row and column counts");
  Mat<T> s(r.size(), std::vector<T>(c.size()));
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) s[i][j] = m[r[i]][c[j]];
  return determinant(std::move(s));
}

inline int floor_half_sign(int size) { return (size / 2) % 2 ? -1 : 1; }

template <class T>
struct MinorTuple {
  int n = 0;
  std::vector<T> x;  // indexed by bitmask
  const T& operator[](Label I) const { return x.at(I); }
  T& operator[](Label I) { return x.at(I); }
};

template <Numeric T>
MinorTuple<T> signed_minor_tuple(const Mat<T>& m) {
  int n = int(m.size());
  if (n < 1 || n > 20) throw Error(ErrorKind::BadN, "matrix size out of range");
  MinorTuple<T> t{n, std::vector<T>(std::size_t(1) << n)};
  t.x[0] = T(1);
  for (Label I = 1; I < (Label(1) << n); ++I) {
    T d = minor_det(m, I, I);
    t.x[I] = floor_half_sign(label_size(I)) < 0 ? T(-d) : d;
  }
  return t;
}

template <Numeric T>
T L_term(const MinorTuple<T>& t, Label I, int i, int j) {
  if (i == j) throw Error(ErrorKind::InvalidInput, "L needs distinct indices");
  return t[I] * t[I ^ bit(i) ^ bit(j)] + t[I ^ bit(i)] * t[I ^ bit(j)];
}

// The cube with x_{I Δ S} at the corner whose steps are S, i.e. bit 0 toggles i and so on.
template <Numeric T>
Corners<T> minor_cube(const MinorTuple<T>& t, Label I, int i, int j, int k) {
  Corners<T> z;
  Label s[3] = {bit(i), bit(j), bit(k)};
  for (int m = 0; m < 8; ++m) {
    Label l = I;
    for (int a = 0; a < 3; ++a)
      if (m >> a & 1) l ^= s[a];
    z[m] = t[l];
  }
  return z;
}

template <class T>
struct KTerms {
  T K, Kv;
};

template <Numeric T>
KTerms<T> K_terms(const MinorTuple<T>& t, Label I, int i, int j, int k) {
  Corners<T> z = minor_cube(t, I, i, j, k);
  return {kashaev_K(z), kashaev_Kv(z, 0)};
}

struct RealizabilityVerdict {
  bool pass = true;
  std::string certificate;  // first violated identity, empty on PASS
};

inline std::string subset_name(Label I) { return "{" + (I ? label_str(I) : std::string()) + "}"; }

// Both families of identities, exact for rational tuples. Throws on a nongeneric tuple.
template <Numeric T>
RealizabilityVerdict realizability_test(const MinorTuple<T>& t, const Tolerance& tol = {}, bool only_full_set = false) {
  int n = t.n;
  Label all = Label(1) << n;
  if (!approx_eq(t[0], T(1), tol)) throw Error(ErrorKind::BadBase, "x of the empty set must be 1");
  for (Label I = 0; I < all; ++I)
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        T L = L_term(t, I, i, j);
        T scale = abs_value(T(t[I] * t[I ^ bit(i) ^ bit(j)])) + abs_value(T(t[I ^ bit(i)] * t[I ^ bit(j)]));
        if (residual_ok(L, scale, tol))
          throw Error(ErrorKind::Ungeneric, "L vanishes at I=" + subset_name(I) + ", pair " + std::to_string(i) + "," + std::to_string(j));
      }
  for (Label I = 0; I < all; ++I)
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k) {
          Corners<T> z = minor_cube(t, I, i, j, k);
          if (!residual_ok(kashaev_K(z), kashaev_K_scale(z), tol))
            return {false, "K at I=" + subset_name(I) + ", J={" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + "}"};
        }
  for (Label I = 0; I < all; ++I)
    for (int a = 1; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b)
        for (int c = b + 1; c <= n; ++c)
          for (int d = c + 1; d <= n; ++d) {
            if (only_full_set && !(a == 1 && b == 2 && c == 3 && d == 4)) continue;
            int A[4] = {a, b, c, d};
            T lhs(1), rhs(1);
            LogProduct lp, rp;
            bool exact = true;
            for (int skip = 3; skip >= 0; --skip) {
              int J[3], q = 0;
              for (int r = 0; r < 4; ++r)
                if (r != skip) J[q++] = A[r];
              Corners<T> z = minor_cube(t, I, J[0], J[1], J[2]);
              T kv = kashaev_Kv(z, 0);
              exact = exact && is_exact(kv);
              lhs = lhs * kv;
              lp.mul(to_double(kv), to_double(kashaev_Kv_scale(z, 0)));
            }
            for (int r = 0; r < 4; ++r)
              for (int s = r + 1; s < 4; ++s) {
                T L = L_term(t, I, A[r], A[s]);
                rhs = rhs * L;
                rp.mul(to_double(L), to_double(T(abs_value(T(t[I] * t[I ^ bit(A[r]) ^ bit(A[s])])) +
                                                 abs_value(T(t[I ^ bit(A[r])] * t[I ^ bit(A[s])])))));
              }
            bool ok = exact ? is_zero(T(lhs - rhs)) : log_close(lp, rp, 1, tol);
            if (!ok)
              return {false, "four-cube identity at I=" + subset_name(I) + ", A={" + std::to_string(a) + "," + std::to_string(b) + "," +
                                 std::to_string(c) + "," + std::to_string(d) + "}"};
          }
  return {};
}

// Symmetric matrix with the given signed minors, first row nonnegative off the diagonal.
template <Numeric T>
Mat<T> reconstruct_symmetric(const MinorTuple<T>& t, const Tolerance& tol = {}) {
  auto v = realizability_test(t, tol);
  if (!v.pass) throw Error(ErrorKind::NotRealizable, "tuple fails: " + v.certificate);
  int n = t.n;
  Mat<T> m(std::size_t(n), std::vector<T>(std::size_t(n), T(0)));
  for (int i = 1; i <= n; ++i) m[i - 1][i - 1] = t[bit(i)];
  for (int j = 2; j <= n; ++j) {
    T L = L_term(t, 0, 1, j);
    if (sgn(L) < 0 && !is_exact(L)) throw Error(ErrorKind::NegativeRadicand, "L for pair 1," + std::to_string(j) + " is negative");
    m[0][j - 1] = m[j - 1][0] = sqrt_principal(L);
    if (is_zero(m[0][j - 1])) throw Error(ErrorKind::DegenerateOffDiagonal, "first-row entry " + std::to_string(j) + " is zero");
  }
  for (int j = 2; j <= n; ++j)
    for (int k = j + 1; k <= n; ++k) {
      T det = -t[bit(1) | bit(j) | bit(k)];
      const T &a = m[0][0], &b = m[j - 1][j - 1], &c = m[k - 1][k - 1];
      T num = det - a * b * c + a * L_term(t, 0, j, k) + b * L_term(t, 0, 1, k) + c * L_term(t, 0, 1, j);
      m[j - 1][k - 1] = m[k - 1][j - 1] = num / (T(2) * m[0][j - 1] * m[0][k - 1]);
    }
  return m;
}

// Vertex values x_I on a complex whose vertices carry labels.
template <Numeric T>
ComplexValues<T> tuple_on_complex(const MinorTuple<T>& t, const DirectedComplex& c) {
  ComplexValues<T> out(std::size_t(c.num_vertices));
  for (int v = 0; v < c.num_vertices; ++v) {
    if (std::size_t(v) >= c.labels.size() || !c.labels[std::size_t(v)])
      throw Error(ErrorKind::UnlabeledVertex, "vertex " + std::to_string(v) + " has no label");
    Label l = *c.labels[std::size_t(v)];
    if (l >= (Label(1) << t.n)) throw Error(ErrorKind::UnlabeledVertex, "label outside [n] at vertex " + std::to_string(v));
    out[std::size_t(v)] = t[l];
  }
  return out;
}

struct TileKey {
  int i, j;
  Label base;
};

// The tile behind a square of a labeled complex.
inline TileKey square_tile(const DirectedComplex& c, int s) {
  const Square& q = c.squares.at(std::size_t(s));
  auto lab = [&](int v) {
    if (!c.labels.at(std::size_t(v))) throw Error(ErrorKind::UnlabeledVertex, "vertex " + std::to_string(v) + " has no label");
    return *c.labels[std::size_t(v)];
  };
  Label I = lab(q[0]), a = lab(q[1]) ^ I, b = lab(q[3]) ^ I;
  if (label_size(a) != 1 || label_size(b) != 1 || (lab(q[2]) ^ I) != (a | b))
    throw Error(ErrorKind::InvalidComplex, "square labels do not form a tile");
  int i = __builtin_ctz(a) + 1, j = __builtin_ctz(b) + 1;
  Label base = I & ~(a | b);
  if (i > j) std::swap(i, j);
  return {i, j, base};
}

// (-1)^floor((|I|+1)/2) det M_{I+r}^{I+c} with (r - c)(-1)^|I| > 0
template <Numeric T>
T tile_minor(const Mat<T>& m, const TileKey& k) {
  int sz = label_size(k.base);
  int r = k.j, c = k.i;  // r > c
  if (sz % 2) std::swap(r, c);
  T d = minor_det(m, k.base | bit(r), k.base | bit(c));
  return floor_half_sign(sz + 1) < 0 ? T(-d) : d;
}

template <class T>
struct ComplexKhex {
  ComplexValues<T> vertices;
  ComplexValues<T> faces;
};

template <Numeric T>
ComplexKhex<T> matrix_khex_field(const Mat<T>& m, const DirectedComplex& c) {
  int n = int(m.size());
  ComplexKhex<T> out;
  out.vertices.resize(std::size_t(c.num_vertices));
  for (int v = 0; v < c.num_vertices; ++v) {
    if (!c.labels.at(std::size_t(v))) throw Error(ErrorKind::UnlabeledVertex, "vertex " + std::to_string(v) + " has no label");
    Label l = *c.labels[std::size_t(v)];
    if (l >= (Label(1) << n)) throw Error(ErrorKind::MissingMinor, "label " + label_str(l) + " outside the matrix");
    T d = minor_det(m, l, l);
    if (is_zero(d)) throw Error(ErrorKind::ZeroMinor, "principal minor " + subset_name(l) + " vanishes");
    out.vertices[std::size_t(v)] = floor_half_sign(label_size(l)) < 0 ? T(-d) : d;
  }
  out.faces.resize(c.squares.size());
  for (std::size_t s = 0; s < c.squares.size(); ++s) {
    TileKey k = square_tile(c, int(s));
    T val = tile_minor(m, k);
    if (is_zero(val)) throw Error(ErrorKind::ZeroMinor, "almost-principal minor over " + subset_name(k.base) + " vanishes");
    out.faces[s] = val;
  }
  return out;
}

}  // namespace kashaev
