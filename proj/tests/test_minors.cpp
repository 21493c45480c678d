#include <gtest/gtest.h>

#include <random>

#include "kashaev/complexes.hpp"
#include "kashaev/json_io.hpp"
#include "kashaev/minors.hpp"
#include "kashaev/random.hpp"

using namespace kashaev;
using Q = mpq_class;

namespace {

Mat<Q> fixture_m3() { return {{Q(2), Q(1), Q(1)}, {Q(1), Q(2), Q(1)}, {Q(1), Q(1), Q(2)}}; }

Mat<Q> diagonal(std::vector<long> d) {
  Mat<Q> m(d.size(), std::vector<Q>(d.size(), Q(0)));
  for (std::size_t i = 0; i < d.size(); ++i) m[i][i] = Q(d[i]);
  return m;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidInput;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(Determinant, CofactorAgreement) {
  Mat<Q> m{{Q(3), Q(1, 2), Q(-2)}, {Q(0), Q(4), Q(1)}, {Q(5), Q(-1), Q(2, 3)}};
  // cofactor expansion along the first row
  Q want = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  EXPECT_EQ(determinant(m), want);
}

TEST(Determinant, PivotingHandlesZeroLead) {
  Mat<Q> m{{Q(0), Q(1)}, {Q(1), Q(0)}};
  EXPECT_EQ(determinant(m), -1);
}

TEST(SignedMinors, Identity) {
  for (int n = 1; n <= 5; ++n) {
    Mat<Q> m = diagonal(std::vector<long>(std::size_t(n), 1));
    auto t = signed_minor_tuple(m);
    for (Label I = 0; I < (Label(1) << n); ++I) EXPECT_EQ(t[I], floor_half_sign(label_size(I)));
  }
}

TEST(SignedMinors, FixtureM3) {
  auto t = signed_minor_tuple(fixture_m3());
  EXPECT_EQ(t[0], 1);
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(t[bit(i)], 2);
  EXPECT_EQ(t[bit(1) | bit(2)], -3);
  EXPECT_EQ(t[bit(1) | bit(3)], -3);
  EXPECT_EQ(t[bit(2) | bit(3)], -3);
  EXPECT_EQ(t[bit(1) | bit(2) | bit(3)], -4);
}

TEST(SignedMinors, Diagonal) {
  std::vector<long> d{2, -3, 5, 7};
  auto t = signed_minor_tuple(diagonal(d));
  for (Label I = 0; I < 16; ++I) {
    Q p(1);
    for (int i = 1; i <= 4; ++i)
      if (I & bit(i)) p *= d[std::size_t(i - 1)];
    EXPECT_EQ(t[I], floor_half_sign(label_size(I)) * p);
  }
}

TEST(LTerm, Examples) {
  EXPECT_EQ(L_term(signed_minor_tuple(fixture_m3()), 0, 1, 2), 1);
  EXPECT_EQ(L_term(signed_minor_tuple(diagonal({1, 1, 1})), 0, 1, 2), 0);
  EXPECT_EQ(L_term(signed_minor_tuple(diagonal({2, 3, 5})), 0, 1, 3), 0);
}

TEST(LTerm, SquareOfTileMinor) {
  std::mt19937_64 rng(41);
  auto m = random_generic_symmetric(5, rng);
  auto t = signed_minor_tuple(m);
  for (Label I = 0; I < 32; ++I)
    for (int i = 1; i <= 5; ++i)
      for (int j = i + 1; j <= 5; ++j) {
        if (I & (bit(i) | bit(j))) continue;
        Q v = tile_minor(m, TileKey{i, j, I});
        EXPECT_EQ(L_term(t, I, i, j), v * v);
      }
}

TEST(KTerms, FixtureM3) {
  auto t = signed_minor_tuple(fixture_m3());
  auto k = K_terms(t, 0, 1, 2, 3);
  EXPECT_EQ(k.K, 0);
  EXPECT_EQ(k.Kv, -1);
  EXPECT_EQ(K_terms(t, bit(2), 1, 2, 3).Kv, 1);
}

TEST(KTerms, VanishOnSymmetricMatrices) {
  std::mt19937_64 rng(42);
  for (int n = 3; n <= 6; ++n) {
    auto t = signed_minor_tuple(random_generic_symmetric(n, rng));
    for (Label I = 0; I < (Label(1) << n); ++I)
      for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
          for (int k = j + 1; k <= n; ++k) ASSERT_EQ(K_terms(t, I, i, j, k).K, 0) << n;
  }
}

// ---------------------------------------------------------------------------

TEST(Realizability, SymmetricPasses) {
  std::mt19937_64 rng(43);
  for (int n : {4, 5}) EXPECT_TRUE(realizability_test(signed_minor_tuple(random_generic_symmetric(n, rng))).pass) << n;
}

TEST(Realizability, FullMinorPerturbationFails) {
  std::mt19937_64 rng(44);
  for (int n : {4, 5}) {
    auto t = signed_minor_tuple(random_generic_symmetric(n, rng));
    t[(Label(1) << n) - 1] += 1;
    auto v = realizability_test(t);
    EXPECT_FALSE(v.pass);
    EXPECT_NE(v.certificate.find("K"), std::string::npos) << v.certificate;
  }
}

TEST(Realizability, SmallTupleVacuousProducts) {
  EXPECT_TRUE(realizability_test(signed_minor_tuple(fixture_m3())).pass);
}

TEST(Realizability, BadBase) {
  auto t = signed_minor_tuple(fixture_m3());
  t[0] = 2;
  EXPECT_EQ(kind_of([&] { realizability_test(t); }), ErrorKind::BadBase);
}

TEST(Realizability, IdentityIsUngeneric) {
  EXPECT_EQ(kind_of([] { realizability_test(signed_minor_tuple(diagonal({1, 1, 1, 1}))); }), ErrorKind::Ungeneric);
}

TEST(Realizability, FullSetFormAgreesForFour) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    auto t = signed_minor_tuple(random_generic_symmetric(4, rng));
    if (trial % 2) t[Label(1 + rng() % 15)] += 1;
    bool general, full;
    try {
      general = realizability_test(t).pass;
      full = realizability_test(t, {}, true).pass;
    } catch (const Error&) {
      continue;
    }
    EXPECT_EQ(general, full);
  }
}

TEST(Realizability, FloatTupleWithinTolerance) {
  std::mt19937_64 rng(46);
  auto mq = random_generic_symmetric(4, rng);
  Mat<double> m(4, std::vector<double>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[std::size_t(i)][std::size_t(j)] = mq[std::size_t(i)][std::size_t(j)].get_d();
  EXPECT_TRUE(realizability_test(signed_minor_tuple(m), Tolerance{1e-8, 1e-10}).pass);
}

// ---------------------------------------------------------------------------

TEST(Reconstruct, FixtureRoundTrip) { EXPECT_EQ(reconstruct_symmetric(signed_minor_tuple(fixture_m3())), fixture_m3()); }

TEST(Reconstruct, NegativeFirstRowGivesSignConjugate) {
  std::mt19937_64 rng(47);
  auto m = random_generic_symmetric(5, rng);
  auto r = reconstruct_symmetric(signed_minor_tuple(m));
  EXPECT_EQ(signed_minor_tuple(r).x, signed_minor_tuple(m).x);
  // D = diag(1, sign m_1j) carries m to r
  std::vector<int> d(5, 1);
  for (int j = 1; j < 5; ++j) d[std::size_t(j)] = sgn(m[0][std::size_t(j)]);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_EQ(r[std::size_t(i)][std::size_t(j)], d[std::size_t(i)] * d[std::size_t(j)] * m[std::size_t(i)][std::size_t(j)]);
}

TEST(Reconstruct, DiagonalIsUngeneric) {
  EXPECT_EQ(kind_of([] { reconstruct_symmetric(signed_minor_tuple(diagonal({1, 2, 3}))); }), ErrorKind::Ungeneric);
}

TEST(Reconstruct, NotRealizable) {
  std::mt19937_64 rng(48);
  auto t = signed_minor_tuple(random_generic_symmetric(4, rng));
  t[15] += 1;
  EXPECT_EQ(kind_of([&] { reconstruct_symmetric(t); }), ErrorKind::NotRealizable);
}

// ---------------------------------------------------------------------------

TEST(TupleOnComplex, FixtureOnLexThree) {
  auto c = build_complex(lex_standard_pile(3).pile);
  auto x = tuple_on_complex(signed_minor_tuple(fixture_m3()), c);
  EXPECT_TRUE(check_complex_kashaev(c, x).empty());
  EXPECT_TRUE(check_complex_coherence(c, x).empty());
}

TEST(TupleOnComplex, BothPilesOfFour) {
  std::mt19937_64 rng(49);
  auto t = signed_minor_tuple(random_generic_symmetric(4, rng));
  for (const auto& sigma : enumerate_piles(4)) {
    auto c = build_complex(pile_from_admissible(4, sigma));
    auto x = tuple_on_complex(t, c);
    EXPECT_TRUE(check_complex_kashaev(c, x).empty());
    EXPECT_TRUE(check_complex_coherence(c, x).empty());
  }
}

TEST(TupleOnComplex, PerturbationSeenOnInteriorVertex) {
  std::mt19937_64 rng(50);
  auto t = signed_minor_tuple(random_generic_symmetric(4, rng));
  auto c = build_complex(lex_standard_pile(4).pile);
  int v = c.interior.at(0);
  t[*c.labels[std::size_t(v)]] += 1;
  auto x = tuple_on_complex(t, c);
  EXPECT_FALSE(check_complex_kashaev(c, x).empty() && check_complex_coherence(c, x).empty());
}

TEST(TupleOnComplex, UnlabeledVertex) {
  auto c = build_complex(lex_standard_pile(3).pile);
  c.labels[0].reset();
  EXPECT_EQ(kind_of([&] { tuple_on_complex(signed_minor_tuple(fixture_m3()), c); }), ErrorKind::UnlabeledVertex);
}

// ---------------------------------------------------------------------------

TEST(MatrixKhex, FixtureTileAndTop) {
  auto c = build_complex(lex_standard_pile(3).pile);
  auto k = matrix_khex_field(fixture_m3(), c);
  bool found = false;
  for (std::size_t s = 0; s < c.squares.size(); ++s) {
    TileKey key = square_tile(c, int(s));
    if (key.i == 2 && key.j == 3 && key.base == 0) {
      EXPECT_EQ(*k.faces[s], 1);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(*c.labels[std::size_t(c.cubes[0].top())], bit(1) | bit(3));
  EXPECT_TRUE(check_complex_khex(c, k.vertices, k.faces).empty());
}

TEST(MatrixKhex, BothPilesOfFour) {
  std::mt19937_64 rng(51);
  auto m = random_generic_symmetric(4, rng);
  for (const auto& sigma : enumerate_piles(4)) {
    auto c = build_complex(pile_from_admissible(4, sigma));
    auto k = matrix_khex_field(m, c);
    EXPECT_TRUE(check_complex_khex(c, k.vertices, k.faces).empty());
  }
}

TEST(MatrixKhex, ZeroMinorReported) {
  auto c = build_complex(lex_standard_pile(3).pile);
  EXPECT_EQ(kind_of([&] { matrix_khex_field(diagonal({1, 2, 3}), c); }), ErrorKind::ZeroMinor);
}

// ---------------------------------------------------------------------------

TEST(MinorJson, TupleAndMatrixRoundTrip) {
  auto m = fixture_m3();
  EXPECT_EQ(io::matrix<Q>(io::json{{"matrix", io::matrix_json(m)}}), m);
  auto t = signed_minor_tuple(m);
  EXPECT_EQ(io::tuple<Q>(io::tuple_json(t)).x, t.x);
}

TEST(MinorJson, MissingEntry) {
  auto j = io::tuple_json(signed_minor_tuple(fixture_m3()));
  j["entries"].erase("5");
  EXPECT_EQ(kind_of([&] { io::tuple<Q>(j); }), ErrorKind::MissingValue);
}
