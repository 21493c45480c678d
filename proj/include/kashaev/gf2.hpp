#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace kashaev::gf2 {

// A vector over GF(2), packed 64 bits per word.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return w_[i / 64] >> (i % 64) & 1; }
  void set(std::size_t i, bool v = true) {
    if (v) w_[i / 64] |= std::uint64_t(1) << (i % 64);
    else w_[i / 64] &= ~(std::uint64_t(1) << (i % 64));
  }
  void flip(std::size_t i) { w_[i / 64] ^= std::uint64_t(1) << (i % 64); }
  BitVec& operator^=(const BitVec& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
    return *this;
  }
  bool any() const {
    for (auto x : w_)
      if (x) return true;
    return false;
  }
  bool dot(const BitVec& o) const {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < w_.size(); ++k) acc ^= w_[k] & o.w_[k];
    return __builtin_parityll(acc);
  }
  friend bool operator==(const BitVec&, const BitVec&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

// Row-major matrix over GF(2).
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<BitVec> row;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), row(r, BitVec(c)) {}

  Matrix transpose() const {
    Matrix t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (row[i].get(j)) t.row[j].set(i);
    return t;
  }
  BitVec apply(const BitVec& x) const {
    BitVec y(rows);
    for (std::size_t i = 0; i < rows; ++i) y.set(i, row[i].dot(x));
    return y;
  }
};

struct Echelon {
  Matrix m;                       // reduced row echelon form
  std::vector<std::size_t> pivot;  // pivot column of each nonzero row
};

// Gauss-Jordan elimination; `aug` rows ride along when given.
inline Echelon reduce(Matrix m, std::vector<BitVec>* aug = nullptr) {
  Echelon e;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t p = r;
    while (p < m.rows && !m.row[p].get(c)) ++p;
    if (p == m.rows) continue;
    std::swap(m.row[p], m.row[r]);
    if (aug) std::swap((*aug)[p], (*aug)[r]);
    for (std::size_t i = 0; i < m.rows; ++i)
      if (i != r && m.row[i].get(c)) {
        m.row[i] ^= m.row[r];
        if (aug) (*aug)[i] ^= (*aug)[r];
      }
    e.pivot.push_back(c);
    ++r;
  }
  e.m = std::move(m);
  return e;
}

inline std::size_t rank(const Matrix& m) { return reduce(m).pivot.size(); }

// Some x with m x = b, or nothing.
inline std::optional<BitVec> solve(const Matrix& m, const BitVec& b) {
  std::vector<BitVec> aug(m.rows, BitVec(1));
  for (std::size_t i = 0; i < m.rows; ++i) aug[i].set(0, b.get(i));
  Echelon e = reduce(m, &aug);
  for (std::size_t i = e.pivot.size(); i < m.rows; ++i)
    if (aug[i].get(0)) return std::nullopt;
  BitVec x(m.cols);
  for (std::size_t i = 0; i < e.pivot.size(); ++i) x.set(e.pivot[i], aug[i].get(0));
  return x;
}

// Basis of {x : m x = 0}.
inline std::vector<BitVec> nullspace(const Matrix& m) {
  Echelon e = reduce(m);
  std::vector<char> is_pivot(m.cols, 0);
  for (auto c : e.pivot) is_pivot[c] = 1;
  std::vector<BitVec> basis;
  for (std::size_t f = 0; f < m.cols; ++f) {
    if (is_pivot[f]) continue;
    BitVec x(m.cols);
    x.set(f);
    for (std::size_t i = 0; i < e.pivot.size(); ++i)
      if (e.m.row[i].get(f)) x.set(e.pivot[i]);
    basis.push_back(std::move(x));
  }
  return basis;
}

}  // namespace kashaev::gf2
