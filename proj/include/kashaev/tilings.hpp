#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kashaev/error.hpp"

namespace kashaev {

// Subsets of [n] as bitmasks; element i (1-based) is bit i-1.
using Label = std::uint32_t;

inline Label bit(int i) { return Label(1) << (i - 1); }
inline int label_size(Label s) { return __builtin_popcount(s); }
inline Label interval(int a, int b) {  // {a, ..., b}, empty when a > b
  Label s = 0;
  for (int i = a; i <= b; ++i) s |= bit(i);
  return s;
}
inline std::string label_str(Label s) {
  if (!s) return "{}";
  std::string out;
  for (int i = 1; i <= 30; ++i)
    if (s & bit(i)) {
      if (!out.empty() && i >= 10) out += ',';
      out += std::to_string(i);
    }
  return out;
}

using Triple = std::array<int, 3>;  // i < j < k

inline long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct Tile {
  int i, j;  // i < j
  Label base;
  // corners in cyclic order: I, I+i, I+ij, I+j
  std::array<Label, 4> corners() const { return {base, base | bit(i), base | bit(i) | bit(j), base | bit(j)}; }
};

class DiamondTiling {
 public:
  DiamondTiling() = default;
  explicit DiamondTiling(int n) : n_(n), base_(std::size_t(binom(n, 2)), 0) {
    if (n < 3 || n > 30) throw Error(ErrorKind::BadN, "n must lie in 3..30, got " + std::to_string(n));
  }

  int n() const { return n_; }
  std::size_t pair_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // pairs ordered lexicographically
    return std::size_t((i - 1) * (2 * n_ - i) / 2 + (j - i - 1));
  }
  Label base(int i, int j) const { return base_[pair_index(i, j)]; }
  void set_base(int i, int j, Label b) { base_[pair_index(i, j)] = b; }

  std::vector<Tile> tiles() const {
    std::vector<Tile> out;
    for (int i = 1; i <= n_; ++i)
      for (int j = i + 1; j <= n_; ++j) out.push_back({i, j, base(i, j)});
    return out;
  }
  std::set<Label> labels() const {
    std::set<Label> s;
    for (const auto& t : tiles())
      for (Label c : t.corners()) s.insert(c);
    return s;
  }
  // the 2n labels on the polygon boundary: prefixes and suffixes of [n]
  std::set<Label> boundary_labels() const {
    std::set<Label> s;
    for (int k = 0; k <= n_; ++k) {
      s.insert(interval(1, k));
      s.insert(interval(k + 1, n_));
    }
    return s;
  }
  std::vector<Label> interior_labels() const {
    auto b = boundary_labels();
    std::vector<Label> out;
    for (Label l : labels())
      if (!b.count(l)) out.push_back(l);
    return out;
  }

  friend bool operator==(const DiamondTiling&, const DiamondTiling&) = default;

 private:
  int n_ = 0;
  std::vector<Label> base_;
};

inline std::size_t count_edges(const DiamondTiling& t) {
  std::set<std::pair<Label, Label>> e;
  for (const auto& tile : t.tiles()) {
    auto c = tile.corners();
    for (int q = 0; q < 4; ++q) e.insert(std::minmax(c[q], c[(q + 1) % 4]));
  }
  return e.size();
}

// Structural validation: bases avoid their pair, boundary present, Euler count of a disk,
// and every edge is shared by at most two tiles (boundary edges by exactly one).
inline void validate_tiling(const DiamondTiling& t) {
  int n = t.n();
  Label full = interval(1, n);
  std::map<std::pair<Label, Label>, int> edge_use;
  for (const auto& tile : t.tiles()) {
    if (tile.base & (bit(tile.i) | bit(tile.j)) || tile.base & ~full)
      throw Error(ErrorKind::InvalidInput, "tile base for pair " + std::to_string(tile.i) + std::to_string(tile.j) + " is invalid");
    auto c = tile.corners();
    for (int q = 0; q < 4; ++q) ++edge_use[std::minmax(c[q], c[(q + 1) % 4])];
  }
  auto labels = t.labels();
  for (Label b : t.boundary_labels())
    if (!labels.count(b)) throw Error(ErrorKind::InvalidInput, "boundary label " + label_str(b) + " missing");
  long long v = labels.size(), e = edge_use.size(), f = binom(n, 2);
  if (v - e + f != 1) throw Error(ErrorKind::InvalidInput, "Euler count of the tiling is not 1");
  for (int k = 0; k < n; ++k) {
    for (auto [a, b] : {std::pair{interval(1, k), interval(1, k + 1)}, std::pair{interval(k + 2, n), interval(k + 1, n)}}) {
      auto it = edge_use.find(std::minmax(a, b));
      if (it == edge_use.end() || it->second != 1) throw Error(ErrorKind::InvalidInput, "boundary edge not covered once");
    }
  }
  for (auto& [edge, uses] : edge_use)
    if (uses > 2) throw Error(ErrorKind::InvalidInput, "edge shared by more than two tiles");
}

inline DiamondTiling min_tiling(int n) {
  DiamondTiling t(n);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) t.set_base(i, j, interval(i + 1, j - 1));
  return t;
}

inline DiamondTiling max_tiling(int n) {
  DiamondTiling t(n);
  Label full = interval(1, n);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) t.set_base(i, j, full & ~interval(i, j));
  return t;
}

enum class FlipDir { Up, Down };  // Up: Δ to ∇ (I+j replaced by I+ik); Down: the reverse

struct FlipInfo {
  Triple triple;
  FlipDir dir;
  Label base;     // I
  Label removed;  // vertex label leaving the tiling
  Label added;    // vertex label entering the tiling
};

inline std::optional<FlipInfo> flip_at(const DiamondTiling& t, const Triple& tr) {
  auto [i, j, k] = tr;
  Label bij = t.base(i, j), bjk = t.base(j, k), bik = t.base(i, k);
  if (bij == bjk && bik == (bij | bit(j)) && !(bij & bit(j)))
    return FlipInfo{tr, FlipDir::Up, bij, bij | bit(j), bij | bit(i) | bit(k)};
  Label I = bik;
  if (bij == (I | bit(k)) && bjk == (I | bit(i)) && !(I & (bit(i) | bit(k))))
    return FlipInfo{tr, FlipDir::Down, I, I | bit(i) | bit(k), I | bit(j)};
  return std::nullopt;
}

inline std::vector<FlipInfo> enumerate_flips(const DiamondTiling& t) {
  std::vector<FlipInfo> out;
  int n = t.n();
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k)
        if (auto f = flip_at(t, {i, j, k})) out.push_back(*f);
  return out;
}

inline DiamondTiling apply_flip(DiamondTiling t, const Triple& tr, FlipInfo* info = nullptr) {
  auto f = flip_at(t, tr);
  if (!f)
    throw Error(ErrorKind::NotFlippable,
                "triple " + std::to_string(tr[0]) + std::to_string(tr[1]) + std::to_string(tr[2]) + " is not flippable");
  auto [i, j, k] = tr;
  Label I = f->base;
  if (f->dir == FlipDir::Up) {
    t.set_base(i, j, I | bit(k));
    t.set_base(j, k, I | bit(i));
    t.set_base(i, k, I);
  } else {
    t.set_base(i, j, I);
    t.set_base(j, k, I);
    t.set_base(i, k, I | bit(j));
  }
  if (info) *info = *f;
  return t;
}

struct Pile {
  std::vector<DiamondTiling> tilings;  // T_0 .. T_l
  std::vector<FlipInfo> flips;         // flips[s] takes tilings[s] to tilings[s+1]
  const DiamondTiling& start() const { return tilings.front(); }
  const DiamondTiling& last() const { return tilings.back(); }
  int n() const { return start().n(); }
};

// Applies the triples in order; each step may go either direction.
inline Pile pile_from_flips(const DiamondTiling& start, const std::vector<Triple>& triples) {
  Pile p;
  p.tilings.push_back(start);
  for (const auto& tr : triples) {
    FlipInfo info;
    try {
      p.tilings.push_back(apply_flip(p.tilings.back(), tr, &info));
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidPile, std::string("pile step ") + std::to_string(p.flips.size() + 1) + ": " + e.what());
    }
    p.flips.push_back(info);
  }
  return p;
}

inline std::vector<Triple> all_triples_lex(int n) {
  std::vector<Triple> out;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) out.push_back({i, j, k});
  return out;
}

// The first 4-subset whose four triples occur neither in lexicographic nor in reversed order.
inline std::optional<std::array<int, 4>> admissibility_violation(int n, const std::vector<Triple>& sigma) {
  std::map<Triple, std::size_t> pos;
  for (std::size_t s = 0; s < sigma.size(); ++s) pos[sigma[s]] = s;
  auto all = all_triples_lex(n);
  if (sigma.size() != all.size() || pos.size() != all.size())
    throw Error(ErrorKind::NotAdmissible, "sequence is not a permutation of all triples");
  for (const auto& t : all)
    if (!pos.count(t)) throw Error(ErrorKind::NotAdmissible, "sequence is not a permutation of all triples");
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c)
        for (int d = c + 1; d <= n; ++d) {
          std::size_t p[4] = {pos[{a, b, c}], pos[{a, b, d}], pos[{a, c, d}], pos[{b, c, d}]};
          bool inc = p[0] < p[1] && p[1] < p[2] && p[2] < p[3];
          bool dec = p[0] > p[1] && p[1] > p[2] && p[2] > p[3];
          if (!inc && !dec) return std::array<int, 4>{a, b, c, d};
        }
  return std::nullopt;
}

// 4-subsets whose triples appear in reversed order.
inline std::set<std::array<int, 4>> inversion_set(int n, const std::vector<Triple>& sigma) {
  std::map<Triple, std::size_t> pos;
  for (std::size_t s = 0; s < sigma.size(); ++s) pos[sigma[s]] = s;
  std::set<std::array<int, 4>> out;
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c)
        for (int d = c + 1; d <= n; ++d)
          if (pos[{a, b, c}] > pos[{b, c, d}]) out.insert({a, b, c, d});
  return out;
}

inline Pile pile_from_admissible(int n, const std::vector<Triple>& sigma) {
  if (auto bad = admissibility_violation(n, sigma)) {
    auto [a, b, c, d] = *bad;
    throw Error(ErrorKind::NotAdmissible, "4-subset {" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) +
                                              "," + std::to_string(d) + "} is out of order");
  }
  Pile p = pile_from_flips(min_tiling(n), sigma);
  for (const auto& f : p.flips)
    if (f.dir != FlipDir::Up) throw Error(ErrorKind::InvalidPile, "admissible order produced a downward flip");
  if (!(p.last() == max_tiling(n))) throw Error(ErrorKind::InvalidPile, "admissible order does not end at the maximal tiling");
  return p;
}

// Every pile from the minimal to the maximal tiling using upward flips only.
inline std::vector<std::vector<Triple>> enumerate_piles(int n) {
  if (n < 3 || n > 5) throw Error(ErrorKind::BadN, "pile enumeration supports 3 <= n <= 5");
  std::vector<std::vector<Triple>> out;
  std::vector<Triple> path;
  DiamondTiling target = max_tiling(n);
  auto dfs = [&](auto&& self, const DiamondTiling& t) -> void {
    if (t == target) {
      out.push_back(path);
      return;
    }
    for (const auto& f : enumerate_flips(t)) {
      if (f.dir != FlipDir::Up) continue;
      path.push_back(f.triple);
      self(self, apply_flip(t, f.triple));
      path.pop_back();
    }
  };
  dfs(dfs, min_tiling(n));
  return out;
}

struct LexPile {
  Pile pile;
  // sigma_0 (lexicographic) followed by the permutations that bubble each later cube to the top
  std::vector<std::vector<Triple>> schedule;
};

inline LexPile lex_standard_pile(int n) {
  if (n < 3 || n > 8) throw Error(ErrorKind::BadN, "lex pile supports 3 <= n <= 8");
  LexPile out;
  std::vector<Triple> alpha = all_triples_lex(n);
  out.pile = pile_from_admissible(n, alpha);
  out.schedule.push_back(alpha);
  std::size_t head = std::size_t(binom(n - 1, 2));
  for (std::size_t step = 1; head + step <= alpha.size(); ++step) {
    const auto& beta = out.schedule.back();
    std::size_t p = head + step - 1;  // 0-based position of alpha_{head+step}
    auto [i1, i2, i3] = alpha[p];
    std::set<Triple> moved{{1, i1, i2}, {1, i1, i3}, {1, i2, i3}};
    // Reorder beta_1..beta_p by commutations (triples in no common 4-subset keep no
    // relative order) so that the four triples inside {1} + alpha_p become adjacent, then
    // reverse that block.
    std::vector<Triple> prefix(beta.begin(), beta.begin() + std::ptrdiff_t(p) + 1);
    moved.insert(alpha[p]);
    auto shares_quad = [](const Triple& x, const Triple& y) {
      std::set<int> u(x.begin(), x.end());
      u.insert(y.begin(), y.end());
      return u.size() == 4;
    };
    // node 0 is the glued block, nodes 1.. are the other prefix triples
    std::vector<Triple> others;
    for (const auto& t : prefix)
      if (!moved.count(t)) others.push_back(t);
    std::size_t m = others.size() + 1;
    auto node_of = [&](const Triple& t) -> std::size_t {
      if (moved.count(t)) return 0;
      return std::size_t(std::find(others.begin(), others.end(), t) - others.begin()) + 1;
    };
    std::vector<std::set<std::size_t>> succ(m);
    std::vector<int> indeg(m, 0);
    for (std::size_t x = 0; x < prefix.size(); ++x)
      for (std::size_t y = x + 1; y < prefix.size(); ++y)
        if (shares_quad(prefix[x], prefix[y])) {
          std::size_t a = node_of(prefix[x]), b = node_of(prefix[y]);
          if (a != b && succ[a].insert(b).second) ++indeg[b];
        }
    std::vector<Triple> next;
    std::set<std::size_t> ready;
    for (std::size_t v = 0; v < m; ++v)
      if (!indeg[v]) ready.insert(v);
    while (!ready.empty()) {
      std::size_t v = *ready.begin();
      ready.erase(ready.begin());
      if (v == 0) {
        next.push_back({i1, i2, i3});
        next.push_back({1, i2, i3});
        next.push_back({1, i1, i3});
        next.push_back({1, i1, i2});
      } else {
        next.push_back(others[v - 1]);
      }
      for (std::size_t w : succ[v])
        if (--indeg[w] == 0) ready.insert(w);
    }
    if (next.size() != prefix.size()) throw Error(ErrorKind::InvalidPile, "bubbling block cannot be made adjacent");
    for (std::size_t s = p + 1; s < beta.size(); ++s) next.push_back(beta[s]);
    out.schedule.push_back(std::move(next));
  }
  return out;
}

}  // namespace kashaev
