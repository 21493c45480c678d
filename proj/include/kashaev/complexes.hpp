#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kashaev/error.hpp"
#include "kashaev/gf2.hpp"
#include "kashaev/kashaev3d.hpp"
#include "kashaev/report.hpp"
#include "kashaev/scalar.hpp"
#include "kashaev/tilings.hpp"

namespace kashaev {

using Square = std::array<int, 4>;  // vertex ids in cyclic order

// A directed cube: verts[m] is the corner reached from the bottom by the steps in bit mask m,
// so verts[0] is the bottom and verts[7] the top. faces[a] is the square through the bottom
// spanned by the two steps other than a; faces[3 + a] is its opposite through the top.
struct DCube {
  std::array<int, 8> verts{};
  std::array<int, 6> faces{};
  int bottom() const { return verts[0]; }
  int top() const { return verts[7]; }
};

struct DirectedComplex {
  int num_vertices = 0;
  std::vector<std::optional<Label>> labels;
  std::vector<Square> squares;
  std::vector<DCube> cubes;
  std::vector<int> interior;  // sorted
};

// The square ids of a cube given its corners in bit order.
inline std::array<int, 6> locate_faces(const std::array<int, 8>& v, const std::map<std::set<int>, int>& by_verts) {
  std::array<int, 6> f{};
  for (int a = 0; a < 3; ++a) {
    int b1 = 1 << ((a + 1) % 3), b2 = 1 << ((a + 2) % 3);
    for (int side = 0; side < 2; ++side) {
      int o = side ? (1 << a) : 0;
      std::set<int> key{v[o], v[o | b1], v[o | b1 | b2], v[o | b2]};
      auto it = by_verts.find(key);
      if (it == by_verts.end()) throw Error(ErrorKind::InvalidComplex, "a cube face is not among the squares");
      f[side * 3 + a] = it->second;
    }
  }
  return f;
}

inline std::map<std::set<int>, int> square_index(const DirectedComplex& c) {
  std::map<std::set<int>, int> m;
  for (std::size_t s = 0; s < c.squares.size(); ++s) {
    std::set<int> key(c.squares[s].begin(), c.squares[s].end());
    if (key.size() != 4) throw Error(ErrorKind::InvalidComplex, "square with repeated vertex");
    m[key] = int(s);
  }
  return m;
}

// Cube from corners in bit order and the index of its top corner.
inline DCube orient_cube(const std::array<int, 8>& raw, int top_index, const std::map<std::set<int>, int>& by_verts) {
  if (top_index < 0 || top_index > 7) throw Error(ErrorKind::InvalidComplex, "top vertex is not a corner of its cube");
  DCube c;
  int shift = top_index ^ 7;
  for (int m = 0; m < 8; ++m) c.verts[m] = raw[m ^ shift];
  c.faces = locate_faces(c.verts, by_verts);
  return c;
}

inline void validate_complex(const DirectedComplex& c) {
  auto in_range = [&](int v) { return v >= 0 && v < c.num_vertices; };
  for (const auto& s : c.squares)
    for (int v : s)
      if (!in_range(v)) throw Error(ErrorKind::InvalidComplex, "square vertex out of range");
  auto idx = square_index(c);
  for (const auto& cube : c.cubes) {
    std::set<int> vs(cube.verts.begin(), cube.verts.end());
    if (vs.size() != 8) throw Error(ErrorKind::InvalidComplex, "cube with repeated vertex");
    for (int v : cube.verts)
      if (!in_range(v)) throw Error(ErrorKind::InvalidComplex, "cube vertex out of range");
    if (locate_faces(cube.verts, idx) != cube.faces) throw Error(ErrorKind::InvalidComplex, "cube faces inconsistent");
  }
  for (int v : c.interior)
    if (!in_range(v)) throw Error(ErrorKind::InvalidComplex, "interior vertex out of range");
}

inline DirectedComplex build_complex(const Pile& p) {
  DirectedComplex c;
  std::map<Label, int> vid;  // labels of the current tiling -> vertex ids
  auto new_vertex = [&](Label l) {
    c.labels.push_back(l);
    return c.num_vertices++;
  };
  for (Label l : p.start().labels()) vid[l] = new_vertex(l);
  std::map<std::pair<int, int>, int> sid;  // pair -> square id of the current tile
  auto new_square = [&](const Tile& t) {
    auto cn = t.corners();
    c.squares.push_back({vid.at(cn[0]), vid.at(cn[1]), vid.at(cn[2]), vid.at(cn[3])});
    return sid[{t.i, t.j}] = int(c.squares.size()) - 1;
  };
  for (const auto& t : p.start().tiles()) new_square(t);
  std::set<int> start_ids, final_ids;
  for (auto& [l, id] : vid) start_ids.insert(id);
  for (std::size_t s = 0; s < p.flips.size(); ++s) {
    const FlipInfo& f = p.flips[s];
    auto [i, j, k] = f.triple;
    Label steps[3] = {bit(i), bit(j), bit(k)};
    DCube cube;
    for (int m = 0; m < 7; ++m) {
      Label l = f.removed;
      for (int a = 0; a < 3; ++a)
        if (m >> a & 1) l ^= steps[a];
      auto it = vid.find(l);
      if (it == vid.end()) throw Error(ErrorKind::InvalidPile, "hexagon vertex missing at step " + std::to_string(s + 1));
      cube.verts[m] = it->second;
    }
    cube.faces[0] = sid.at({j, k});
    cube.faces[1] = sid.at({i, k});
    cube.faces[2] = sid.at({i, j});
    vid.erase(f.removed);
    cube.verts[7] = vid[f.added] = new_vertex(f.added);
    const DiamondTiling& next = p.tilings[s + 1];
    cube.faces[3] = new_square({j, k, next.base(j, k)});
    cube.faces[4] = new_square({i, k, next.base(i, k)});
    cube.faces[5] = new_square({i, j, next.base(i, j)});
    c.cubes.push_back(cube);
  }
  for (auto& [l, id] : vid) final_ids.insert(id);
  for (int v = 0; v < c.num_vertices; ++v)
    if (!start_ids.count(v) && !final_ids.count(v)) c.interior.push_back(v);
  return c;
}

// ---------------------------------------------------------------------------
// face classes, psi and comfortableness

struct FaceClassSystem {
  std::vector<int> class_of;  // square id -> class index
  int num_classes = 0;
  gf2::Matrix psi;            // cubes x classes
};

inline FaceClassSystem face_classes(const DirectedComplex& c) {
  std::vector<int> parent(c.squares.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& cube : c.cubes)
    for (int a = 0; a < 3; ++a) parent[find(cube.faces[a])] = find(cube.faces[3 + a]);
  FaceClassSystem fs;
  fs.class_of.assign(c.squares.size(), -1);
  std::map<int, int> root_id;
  for (std::size_t s = 0; s < c.squares.size(); ++s) {
    int r = find(int(s));
    auto it = root_id.find(r);
    if (it == root_id.end()) it = root_id.emplace(r, fs.num_classes++).first;
    fs.class_of[s] = it->second;
  }
  fs.psi = gf2::Matrix(c.cubes.size(), std::size_t(fs.num_classes));
  for (std::size_t q = 0; q < c.cubes.size(); ++q)
    for (int a = 0; a < 3; ++a) fs.psi.row[q].flip(std::size_t(fs.class_of[c.cubes[q].faces[a]]));
  return fs;
}

// interior vertices x cubes, entry 1 when the vertex is a corner of the cube
inline gf2::Matrix interior_incidence(const DirectedComplex& c) {
  gf2::Matrix m(c.interior.size(), c.cubes.size());
  std::map<int, std::size_t> row;
  for (std::size_t r = 0; r < c.interior.size(); ++r) row[c.interior[r]] = r;
  for (std::size_t q = 0; q < c.cubes.size(); ++q)
    for (int v : c.cubes[q].verts) {
      auto it = row.find(v);
      if (it != row.end()) m.row[it->second].set(q);
    }
  return m;
}

struct Comfort {
  bool comfortable = false;
  std::size_t dim_image_psi = 0;
  std::size_t dim_c2 = 0;
  bool image_in_c2 = false;
};

inline Comfort is_comfortable(const DirectedComplex& c) {
  FaceClassSystem fs = face_classes(c);
  gf2::Matrix inc = interior_incidence(c);
  Comfort r;
  r.dim_image_psi = gf2::rank(fs.psi);
  r.dim_c2 = c.cubes.size() - gf2::rank(inc);
  r.image_in_c2 = true;
  gf2::Matrix cols = fs.psi.transpose();
  for (const auto& col : cols.row)
    if (inc.apply(col).any()) r.image_in_c2 = false;
  r.comfortable = r.image_in_c2 && r.dim_image_psi == r.dim_c2;
  return r;
}

// ---------------------------------------------------------------------------
// checks on complexes

template <class T>
using ComplexValues = std::vector<std::optional<T>>;

template <Numeric T>
const T& value_at(const ComplexValues<T>& x, int v) {
  if (v < 0 || std::size_t(v) >= x.size() || !x[std::size_t(v)])
    throw Error(ErrorKind::MissingValue, "no value at vertex " + std::to_string(v));
  return *x[std::size_t(v)];
}

template <Numeric T>
Corners<T> cube_values(const ComplexValues<T>& x, const DCube& c) {
  Corners<T> z;
  for (int m = 0; m < 8; ++m) z[m] = value_at(x, c.verts[m]);
  return z;
}

template <Numeric T>
Report<T> check_complex_kashaev(const DirectedComplex& c, const ComplexValues<T>& x, const Tolerance& tol = {}, unsigned jobs = 1) {
  std::vector<std::optional<Finding<T>>> slots(c.cubes.size());
  parallel_for(c.cubes.size(), jobs, [&](std::size_t q) {
    Corners<T> z = cube_values(x, c.cubes[q]);
    T k = kashaev_K(z);
    if (!residual_ok(k, kashaev_K_scale(z), tol)) slots[q] = Finding<T>{"kashaev", {int(q)}, k, T(0)};
  });
  Report<T> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

template <class T>
struct ComplexCoherence {
  int vertex;
  T lhs, rhs;
  bool ok;
  bool degenerate;  // both sides vanish
};

template <Numeric T>
ComplexCoherence<T> complex_coherence_at(const DirectedComplex& c, const ComplexValues<T>& x, int v, const Tolerance& tol = {}) {
  T lhs(1), rhs(1);
  LogProduct L, R;
  bool exact = true;
  for (const auto& cube : c.cubes)
    for (int m = 0; m < 8; ++m)
      if (cube.verts[m] == v) {
        Corners<T> z = cube_values(x, cube);
        T kv = kashaev_Kv(z, m);
        exact = exact && is_exact(kv);
        lhs = lhs * kv;
        L.mul(to_double(kv), to_double(kashaev_Kv_scale(z, m)));
      }
  for (const auto& s : c.squares)
    for (int q = 0; q < 4; ++q)
      if (s[q] == v) {
        const T& a = value_at(x, s[q]);
        const T& b = value_at(x, s[(q + 1) % 4]);
        const T& o = value_at(x, s[(q + 2) % 4]);
        const T& d = value_at(x, s[(q + 3) % 4]);
        T e = a * o + b * d;
        exact = exact && is_exact(e);
        rhs = rhs * e;
        R.mul(to_double(e), to_double(T(abs_value(a) * abs_value(o) + abs_value(b) * abs_value(d))));
      }
  bool ok = exact ? is_zero(T(lhs - rhs)) : log_close(L, R, 1, tol);
  bool degenerate = exact ? (is_zero(lhs) && is_zero(rhs)) : (L.sign == 0 && R.sign == 0);
  return {v, lhs, rhs, ok, degenerate};
}

template <Numeric T>
Report<T> check_complex_coherence(const DirectedComplex& c, const ComplexValues<T>& x, const Tolerance& tol = {}, unsigned jobs = 1) {
  std::vector<std::optional<Finding<T>>> slots(c.interior.size());
  parallel_for(c.interior.size(), jobs, [&](std::size_t r) {
    auto h = complex_coherence_at(c, x, c.interior[r], tol);
    if (!h.ok) slots[r] = Finding<T>{"coherence", {h.vertex}, h.lhs, h.rhs};
    else if (h.degenerate) slots[r] = Finding<T>{"degenerate-coherence", {h.vertex}, h.lhs, h.rhs};
  });
  Report<T> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

template <Numeric T>
Report<T> check_complex_khex(const DirectedComplex& c, const ComplexValues<T>& x, const ComplexValues<T>& faces,
                             const Tolerance& tol = {}) {
  for (int v = 0; v < c.num_vertices; ++v)
    if (is_zero(value_at(x, v))) throw Error(ErrorKind::ZeroVertexValue, "zero at vertex " + std::to_string(v));
  auto face = [&](int s) -> const T& {
    if (s < 0 || std::size_t(s) >= faces.size() || !faces[std::size_t(s)])
      throw Error(ErrorKind::MissingValue, "no value on square " + std::to_string(s));
    return *faces[std::size_t(s)];
  };
  Report<T> out;
  for (std::size_t s = 0; s < c.squares.size(); ++s) {
    const auto& q = c.squares[s];
    const T &a = value_at(x, q[0]), &b = value_at(x, q[1]), &o = value_at(x, q[2]), &d = value_at(x, q[3]);
    T e = a * o + b * d;
    T sq = face(int(s)) * face(int(s));
    T scale = abs_value(sq) + abs_value(a) * abs_value(o) + abs_value(b) * abs_value(d);
    if (!residual_ok(T(sq - e), scale, tol)) out.push_back(Finding<T>{"face-condition", {int(s)}, sq, e});
  }
  for (std::size_t q = 0; q < c.cubes.size(); ++q) {
    const DCube& cube = c.cubes[q];
    std::array<T, 3> lo{face(cube.faces[0]), face(cube.faces[1]), face(cube.faces[2])};
    std::array<T, 3> up{face(cube.faces[3]), face(cube.faces[4]), face(cube.faces[5])};
    if (auto f = khex_residual(cube_values(x, cube), lo, up, {int(q)}, tol)) out.push_back(std::move(*f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// extension

// Squares that are not the upper face of any cube; the sweep starts from them.
inline std::vector<int> initial_squares(const DirectedComplex& c) {
  std::vector<char> upper(c.squares.size(), 0);
  for (const auto& cube : c.cubes)
    for (int a = 3; a < 6; ++a) upper[std::size_t(cube.faces[a])] = 1;
  std::vector<int> out;
  for (std::size_t s = 0; s < c.squares.size(); ++s)
    if (!upper[s]) out.push_back(int(s));
  return out;
}

template <Numeric T>
ComplexValues<T> extend_on_complex(const DirectedComplex& c, const ComplexValues<T>& x, const Tolerance& tol = {}) {
  for (int v = 0; v < c.num_vertices; ++v)
    if (is_zero(value_at(x, v))) throw Error(ErrorKind::ZeroVertexValue, "zero at vertex " + std::to_string(v));
  Comfort comfort = is_comfortable(c);
  if (!comfort.comfortable) throw Error(ErrorKind::NotComfortable, "complex is not comfortable");
  if (!check_complex_kashaev(c, x, tol).empty()) throw Error(ErrorKind::NotCoherent, "Kashaev equation fails on some cube");
  for (int v : c.interior)
    if (!complex_coherence_at(c, x, v, tol).ok) throw Error(ErrorKind::NotCoherent, "coherence fails at vertex " + std::to_string(v));
  std::vector<T> expr(c.squares.size());
  for (std::size_t s = 0; s < c.squares.size(); ++s) {
    const auto& q = c.squares[s];
    const T &a = value_at(x, q[0]), &b = value_at(x, q[1]), &o = value_at(x, q[2]), &d = value_at(x, q[3]);
    expr[s] = a * o + b * d;
    if (residual_ok(expr[s], T(abs_value(a) * abs_value(o) + abs_value(b) * abs_value(d)), tol))
      throw Error(ErrorKind::ZeroFaceExpression, "face expression vanishes on square " + std::to_string(s));
  }
  FaceClassSystem fs = face_classes(c);
  std::vector<int> init = initial_squares(c);
  std::vector<int> init_of_class(std::size_t(fs.num_classes), -1);
  for (int s : init) {
    int k = fs.class_of[std::size_t(s)];
    if (init_of_class[std::size_t(k)] != -1) throw Error(ErrorKind::InvalidComplex, "face class with two initial squares");
    init_of_class[std::size_t(k)] = s;
  }
  for (int k = 0; k < fs.num_classes; ++k)
    if (init_of_class[std::size_t(k)] == -1) throw Error(ErrorKind::InvalidComplex, "face class without an initial square");

  std::vector<int> init_sign(std::size_t(fs.num_classes), 1);
  ComplexValues<T> faces(c.squares.size());
  // sweeps cubes 0..upto; returns the first cube whose top disagrees, or -1
  auto sweep = [&](std::size_t upto) -> long {
    std::fill(faces.begin(), faces.end(), std::nullopt);
    for (int s : init) {
      T r = sqrt_principal(expr[std::size_t(s)]);
      faces[std::size_t(s)] = init_sign[std::size_t(fs.class_of[std::size_t(s)])] < 0 ? T(-r) : r;
    }
    for (std::size_t q = 0; q < upto; ++q) {
      const DCube& cube = c.cubes[q];
      std::array<T, 3> lo;
      for (int a = 0; a < 3; ++a) {
        auto& f = faces[std::size_t(cube.faces[a])];
        if (!f) throw Error(ErrorKind::InvalidComplex, "cube order is not a valid sweep order");
        lo[a] = *f;
      }
      Corners<T> z = cube_values(x, cube);
      KhexOut<T> out = khex_step(z, lo);
      if (!approx_eq(out.top, z[7], tol)) return long(q);
      for (int a = 0; a < 3; ++a) faces[std::size_t(cube.faces[3 + a])] = out.faces[a];
    }
    return -1;
  };
  for (;;) {
    long bad = sweep(c.cubes.size());
    if (bad < 0) break;
    // class signs t with psi(t) = 0 on earlier cubes and 1 on the offending one
    std::size_t rows = std::size_t(bad) + 1;
    gf2::Matrix m(rows, std::size_t(fs.num_classes));
    gf2::BitVec rhs(rows);
    for (std::size_t q = 0; q < rows; ++q) m.row[q] = fs.psi.row[q];
    rhs.set(rows - 1);
    auto t = gf2::solve(m, rhs);
    if (!t) throw Error(ErrorKind::NonConvergent, "no sign flip repairs cube " + std::to_string(bad));
    for (int k = 0; k < fs.num_classes; ++k)
      if (t->get(std::size_t(k))) init_sign[std::size_t(k)] = -init_sign[std::size_t(k)];
    if (sweep(rows) >= 0) throw Error(ErrorKind::NonConvergent, "sign flip did not repair cube " + std::to_string(bad));
  }
  for (std::size_t s = 0; s < faces.size(); ++s)
    if (!faces[s]) faces[s] = sqrt_principal(expr[s]);
  return faces;
}

}  // namespace kashaev
