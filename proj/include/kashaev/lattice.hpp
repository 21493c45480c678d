#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kashaev/error.hpp"

namespace kashaev {

using Pt3 = std::array<int, 3>;

inline Pt3 operator+(const Pt3& a, const Pt3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Pt3 operator-(const Pt3& a, const Pt3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Pt3 unit(int axis) {  // axis in 1..3
  Pt3 e{0, 0, 0};
  e[axis - 1] = 1;
  return e;
}
inline int height(const Pt3& p) { return p[0] + p[1] + p[2]; }

// corner of the unit cube at `base` with bit mask m (bit 0 = x, bit 1 = y, bit 2 = z)
inline Pt3 corner(const Pt3& base, int m) { return {base[0] + (m & 1), base[1] + ((m >> 1) & 1), base[2] + ((m >> 2) & 1)}; }

// the two axes other than `axis`, ascending
inline std::array<int, 2> other_axes(int axis) {
  switch (axis) {
    case 1: return {2, 3};
    case 2: return {1, 3};
    default: return {1, 2};
  }
}

struct Box3 {
  Pt3 lo{0, 0, 0};
  Pt3 hi{0, 0, 0};

  Box3() = default;
  Box3(Pt3 l, Pt3 h) : lo(l), hi(h) {
    for (int i = 0; i < 3; ++i)
      if (h[i] < l[i]) throw Error(ErrorKind::InvalidInput, "empty window");
  }

  int extent(int i) const { return hi[i] - lo[i] + 1; }
  std::size_t size() const { return std::size_t(extent(0)) * extent(1) * extent(2); }
  bool contains(const Pt3& p) const {
    for (int i = 0; i < 3; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
  std::size_t index(const Pt3& p) const {
    return (std::size_t(p[2] - lo[2]) * extent(1) + (p[1] - lo[1])) * extent(0) + (p[0] - lo[0]);
  }
  Pt3 point(std::size_t idx) const {
    Pt3 p;
    p[0] = lo[0] + int(idx % extent(0));
    idx /= extent(0);
    p[1] = lo[1] + int(idx % extent(1));
    p[2] = lo[2] + int(idx / extent(1));
    return p;
  }
  // all points, sorted by height then lexicographically (z, y, x)
  std::vector<Pt3> points_by_height() const {
    std::vector<Pt3> pts;
    pts.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) pts.push_back(point(i));
    std::stable_sort(pts.begin(), pts.end(), [](const Pt3& a, const Pt3& b) { return height(a) < height(b); });
    return pts;
  }
  // unit cubes fully inside, identified by their minimal corner
  bool has_cube(const Pt3& base) const { return contains(base) && contains(base + Pt3{1, 1, 1}); }
  bool is_interior(const Pt3& p) const {
    for (int i = 0; i < 3; ++i)
      if (p[i] <= lo[i] || p[i] >= hi[i]) return false;
    return true;
  }
  friend bool operator==(const Box3&, const Box3&) = default;
};

// A unit square perpendicular to `axis` (1..3) whose minimal corner is `base`.
struct FaceKey {
  int axis = 1;
  Pt3 base{0, 0, 0};
  friend bool operator==(const FaceKey&, const FaceKey&) = default;
};

// corners in cyclic order: base, base+e_j, base+e_j+e_k, base+e_k
inline std::array<Pt3, 4> face_corners(const FaceKey& f) {
  auto [j, k] = other_axes(f.axis);
  Pt3 ej = unit(j), ek = unit(k);
  return {f.base, f.base + ej, f.base + ej + ek, f.base + ek};
}

inline bool box_has_face(const Box3& w, const FaceKey& f) {
  auto c = face_corners(f);
  return w.contains(c[0]) && w.contains(c[2]);
}

template <class T>
class VertexField3 {
 public:
  VertexField3() = default;
  explicit VertexField3(Box3 window) : window_(window), vals_(window.size()), has_(window.size(), 0) {}

  const Box3& window() const { return window_; }
  bool has(const Pt3& p) const { return window_.contains(p) && has_[window_.index(p)]; }
  const T& at(const Pt3& p) const {
    if (!has(p))
      throw Error(ErrorKind::MissingValue,
                  "no value at (" + std::to_string(p[0]) + "," + std::to_string(p[1]) + "," + std::to_string(p[2]) + ")");
    return vals_[window_.index(p)];
  }
  void set(const Pt3& p, T v) {
    if (!window_.contains(p)) throw Error(ErrorKind::InvalidInput, "point outside window");
    auto i = window_.index(p);
    vals_[i] = std::move(v);
    has_[i] = 1;
  }
  void erase(const Pt3& p) {
    if (window_.contains(p)) has_[window_.index(p)] = 0;
  }
  bool complete() const { return std::all_of(has_.begin(), has_.end(), [](char c) { return c != 0; }); }
  std::size_t count() const { return std::size_t(std::count(has_.begin(), has_.end(), char(1))); }

  // all 8 corners of the cube at base are present
  bool has_cube(const Pt3& base) const {
    for (int m = 0; m < 8; ++m)
      if (!has(corner(base, m))) return false;
    return true;
  }
  std::array<T, 8> cube(const Pt3& base) const {
    std::array<T, 8> z;
    for (int m = 0; m < 8; ++m) z[m] = at(corner(base, m));
    return z;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < vals_.size(); ++i)
      if (has_[i]) f(window_.point(i), vals_[i]);
  }

 private:
  Box3 window_;
  std::vector<T> vals_;
  std::vector<char> has_;
};

// Face values stored densely per axis, indexed by the base point in the window.
template <class T>
class FaceField3 {
 public:
  FaceField3() = default;
  explicit FaceField3(Box3 window) : window_(window) {
    for (auto& v : vals_) v.resize(window.size());
    for (auto& h : has_) h.assign(window.size(), 0);
  }

  const Box3& window() const { return window_; }
  bool has(const FaceKey& f) const { return box_has_face(window_, f) && has_[f.axis - 1][window_.index(f.base)]; }
  const T& at(const FaceKey& f) const {
    if (!has(f))
      throw Error(ErrorKind::MissingValue, "no face value at axis " + std::to_string(f.axis) + " base (" +
                                               std::to_string(f.base[0]) + "," + std::to_string(f.base[1]) + "," +
                                               std::to_string(f.base[2]) + ")");
    return vals_[f.axis - 1][window_.index(f.base)];
  }
  void set(const FaceKey& f, T v) {
    if (!box_has_face(window_, f)) throw Error(ErrorKind::InvalidInput, "face outside window");
    auto i = window_.index(f.base);
    vals_[f.axis - 1][i] = std::move(v);
    has_[f.axis - 1][i] = 1;
  }

  // every unit square of the window
  std::vector<FaceKey> all_faces() const {
    std::vector<FaceKey> out;
    for (int axis = 1; axis <= 3; ++axis)
      for (std::size_t i = 0; i < window_.size(); ++i) {
        FaceKey f{axis, window_.point(i)};
        if (box_has_face(window_, f)) out.push_back(f);
      }
    return out;
  }
  bool complete() const {
    for (const auto& f : all_faces())
      if (!has(f)) return false;
    return true;
  }

 private:
  Box3 window_;
  std::array<std::vector<T>, 3> vals_;
  std::array<std::vector<char>, 3> has_;
};

template <class T>
struct KHexField3 {
  VertexField3<T> vertices;
  FaceField3<T> faces;

  KHexField3() = default;
  explicit KHexField3(Box3 w) : vertices(w), faces(w) {}
  const Box3& window() const { return vertices.window(); }
};

}  // namespace kashaev
