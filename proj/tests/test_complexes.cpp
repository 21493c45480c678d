#include <gtest/gtest.h>

#include <random>
#include <set>

#include "kashaev/complexes.hpp"
#include "kashaev/json_io.hpp"
#include "kashaev/minors.hpp"
#include "kashaev/random.hpp"

using namespace kashaev;
using Q = mpq_class;

namespace {

std::set<Label> complex_labels(const DirectedComplex& c) {
  std::set<Label> s;
  for (const auto& l : c.labels) s.insert(*l);
  return s;
}

DirectedComplex lex_complex(int n) { return build_complex(lex_standard_pile(n).pile); }

// Positive values on the starting tiling, then the + root cube by cube.
ComplexValues<double> positive_values(const DirectedComplex& c, const Pile& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  ComplexValues<double> x(std::size_t(c.num_vertices));
  std::size_t start = p.start().labels().size();
  for (std::size_t v = 0; v < start; ++v) x[v] = u(rng);
  for (const auto& cube : c.cubes) {
    std::array<double, 7> seven;
    for (int m = 0; m < 7; ++m) seven[std::size_t(m)] = *x[std::size_t(cube.verts[std::size_t(m)])];
    x[std::size_t(cube.top())] = cube_roots(seven).plus;
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(BuildComplex, LexPileFour) {
  auto p = lex_standard_pile(4).pile;
  auto c = build_complex(p);
  EXPECT_EQ(c.cubes.size(), 4u);
  EXPECT_EQ(c.num_vertices, 15);
  std::set<Label> all;
  for (Label l = 0; l < 16; ++l)
    if (l != (bit(2) | bit(4))) all.insert(l);
  EXPECT_EQ(complex_labels(c), all);
  std::set<Label> union_of_tilings;
  for (const auto& t : p.tilings)
    for (Label l : t.labels()) union_of_tilings.insert(l);
  EXPECT_EQ(complex_labels(c), union_of_tilings);
  EXPECT_EQ(c.interior.size(), 1u);
  EXPECT_NO_THROW(validate_complex(c));
}

TEST(BuildComplex, EmptyPile) {
  auto t = min_tiling(5);
  auto c = build_complex(pile_from_flips(t, {}));
  EXPECT_TRUE(c.cubes.empty());
  EXPECT_EQ(c.squares.size(), t.tiles().size());
  EXPECT_TRUE(c.interior.empty());
}

TEST(BuildComplex, ClosingCycle) {
  std::vector<Triple> up{{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}};
  std::vector<Triple> cycle = up;
  cycle.insert(cycle.end(), up.begin(), up.end());
  auto p = pile_from_flips(min_tiling(4), cycle);
  EXPECT_EQ(p.last(), min_tiling(4));
  auto c = build_complex(p);
  EXPECT_EQ(c.cubes.size(), 8u);
  EXPECT_EQ(complex_labels(c).size(), 16u);
}

TEST(BuildComplex, Sizes) {
  for (auto [n, cubes, interior] : {std::tuple{4, 4, 1}, {5, 10, 4}, {6, 20, 10}}) {
    auto c = lex_complex(n);
    EXPECT_EQ(int(c.cubes.size()), cubes) << n;
    EXPECT_EQ(int(c.interior.size()), interior) << n;
  }
}

TEST(BuildComplex, CubeTopsCarryFlipLabels) {
  auto p = lex_standard_pile(5).pile;
  auto c = build_complex(p);
  for (std::size_t s = 0; s < p.flips.size(); ++s) {
    EXPECT_EQ(*c.labels[std::size_t(c.cubes[s].top())], p.flips[s].added);
    const auto& f = p.flips[s];
    EXPECT_EQ(*c.labels[std::size_t(c.cubes[s].bottom())], f.removed);
    EXPECT_EQ(f.removed ^ bit(f.triple[0]) ^ bit(f.triple[1]) ^ bit(f.triple[2]), f.added);
  }
}

// ---------------------------------------------------------------------------

TEST(Comfortable, FourAndFive) {
  for (auto [n, dim] : {std::pair{4, 3u}, {5, 6u}}) {
    auto k = is_comfortable(lex_complex(n));
    EXPECT_TRUE(k.comfortable) << n;
    EXPECT_EQ(k.dim_image_psi, dim) << n;
    EXPECT_EQ(k.dim_c2, dim) << n;
  }
}

TEST(Comfortable, BothPilesOfFour) {
  for (const auto& sigma : enumerate_piles(4)) {
    auto k = is_comfortable(build_complex(pile_from_admissible(4, sigma)));
    EXPECT_TRUE(k.comfortable);
    EXPECT_EQ(k.dim_c2, 3u);
  }
}

TEST(Comfortable, FlipAndUnflip) {
  auto c = build_complex(pile_from_flips(min_tiling(3), {{1, 2, 3}, {1, 2, 3}}));
  ASSERT_EQ(c.interior.size(), 1u);
  auto k = is_comfortable(c);
  EXPECT_TRUE(k.comfortable);
  EXPECT_EQ(k.dim_image_psi, 1u);
  EXPECT_EQ(k.dim_c2, 1u);
}

TEST(Comfortable, SharedClassesWithoutInteriorFail) {
  // the same two cubes, but declared with no interior vertex
  auto c = build_complex(pile_from_flips(min_tiling(3), {{1, 2, 3}, {1, 2, 3}}));
  c.interior.clear();
  auto k = is_comfortable(c);
  EXPECT_FALSE(k.comfortable);
  EXPECT_EQ(k.dim_image_psi, 1u);
  EXPECT_EQ(k.dim_c2, 2u);
}

// ---------------------------------------------------------------------------

TEST(ComplexChecks, MinorValuesAreCoherent) {
  std::mt19937_64 rng(31);
  for (int n : {4, 5}) {
    auto c = lex_complex(n);
    auto t = signed_minor_tuple(random_generic_symmetric(n, rng));
    auto x = tuple_on_complex(t, c);
    EXPECT_TRUE(check_complex_kashaev(c, x).empty()) << n;
    EXPECT_TRUE(check_complex_coherence(c, x).empty()) << n;
  }
}

TEST(ComplexChecks, ConjugateTopBreaksCoherenceAtBottom) {
  std::mt19937_64 rng(32);
  auto c = lex_complex(5);
  auto x = tuple_on_complex(signed_minor_tuple(random_generic_symmetric(5, rng)), c);
  std::set<int> interior(c.interior.begin(), c.interior.end());
  bool tried = false;
  for (std::size_t q = 0; q < c.cubes.size() && !tried; ++q) {
    const DCube& cube = c.cubes[q];
    if (!interior.count(cube.bottom())) continue;
    tried = true;
    auto z = cube_values(x, cube);
    auto r = cube_roots(lower_seven(z));
    Q other = Q(2) * r.A / (z[0] * z[0]) - z[7];
    ASSERT_NE(other, z[7]);
    auto y = x;
    y[std::size_t(cube.top())] = other;
    EXPECT_EQ(kashaev_K(cube_values(y, cube)), 0);
    EXPECT_FALSE(complex_coherence_at(c, y, cube.bottom()).ok);
  }
  EXPECT_TRUE(tried);
}

TEST(ComplexChecks, ZeroFieldIsDegenerate) {
  auto c = lex_complex(4);
  ComplexValues<Q> x(std::size_t(c.num_vertices), Q(0));
  EXPECT_TRUE(check_complex_kashaev(c, x).empty());
  auto r = check_complex_coherence(c, x);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].kind, "degenerate-coherence");
}

TEST(ComplexChecks, MatrixKhexFieldIsClean) {
  std::mt19937_64 rng(33);
  for (int n : {4, 5}) {
    auto c = lex_complex(n);
    auto k = matrix_khex_field(random_generic_symmetric(n, rng), c);
    EXPECT_TRUE(check_complex_khex(c, k.vertices, k.faces).empty()) << n;
  }
}

TEST(ComplexChecks, NonSymmetricMatrixFailsFaceCondition) {
  std::mt19937_64 rng(34);
  auto c = lex_complex(4);
  auto m = random_generic_symmetric(4, rng);
  m[0][2] += 1;
  auto k = matrix_khex_field(m, c);
  auto r = check_complex_khex(c, k.vertices, k.faces);
  bool face = false;
  for (const auto& f : r) face = face || f.kind == "face-condition";
  EXPECT_TRUE(face);
}

// ---------------------------------------------------------------------------

TEST(ComplexExtend, MatchesMatrixFieldUpToGauge) {
  std::mt19937_64 rng(35);
  auto c = lex_complex(5);
  auto k = matrix_khex_field(random_generic_symmetric(5, rng), c);
  auto faces = extend_on_complex(c, k.vertices);
  EXPECT_TRUE(check_complex_khex(c, k.vertices, faces).empty());
  auto fs = face_classes(c);
  std::vector<int> cls(std::size_t(fs.num_classes), 0);
  for (std::size_t s = 0; s < c.squares.size(); ++s) {
    int r = *faces[s] == *k.faces[s] ? 1 : (*faces[s] == -*k.faces[s] ? -1 : 0);
    ASSERT_NE(r, 0) << "square " << s;
    int& slot = cls[std::size_t(fs.class_of[s])];
    if (slot == 0) slot = r;
    EXPECT_EQ(slot, r) << "class not constant at square " << s;
  }
  for (const auto& cube : c.cubes) {
    int prod = 1;
    for (int a = 0; a < 3; ++a) prod *= cls[std::size_t(fs.class_of[std::size_t(cube.faces[std::size_t(a)])])];
    EXPECT_EQ(prod, 1);
  }
}

TEST(ComplexExtend, PositiveFieldExtends) {
  std::mt19937_64 rng(36);
  auto p = lex_standard_pile(5).pile;
  auto c = build_complex(p);
  auto x = positive_values(c, p, rng);
  Tolerance tol{1e-9, 1e-12};
  auto faces = extend_on_complex(c, x, tol);
  EXPECT_TRUE(check_complex_khex(c, x, faces, tol).empty());
}

TEST(ComplexExtend, NotCoherentThrows) {
  std::mt19937_64 rng(37);
  auto c = lex_complex(4);
  auto x = tuple_on_complex(signed_minor_tuple(random_generic_symmetric(4, rng)), c);
  x[std::size_t(c.cubes.back().top())] = Q(*x[std::size_t(c.cubes.back().top())] + 1);
  try {
    extend_on_complex(c, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCoherent);
  }
}

// ---------------------------------------------------------------------------

TEST(ComplexJson, RoundTrip) {
  auto c = lex_complex(5);
  auto L = io::complex(io::complex_json(c));
  EXPECT_EQ(L.c.num_vertices, c.num_vertices);
  EXPECT_EQ(L.c.squares, c.squares);
  ASSERT_EQ(L.c.cubes.size(), c.cubes.size());
  for (std::size_t q = 0; q < c.cubes.size(); ++q) EXPECT_EQ(L.c.cubes[q].verts, c.cubes[q].verts);
  EXPECT_EQ(L.c.interior, c.interior);
}

TEST(ComplexJson, TopMustBeACorner) {
  auto j = io::complex_json(lex_complex(4));
  j["cubes"][0]["top"] = 999;
  EXPECT_THROW(io::complex(j), Error);
}
