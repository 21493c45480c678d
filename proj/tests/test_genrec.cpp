#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kashaev/genrec.hpp"
#include "kashaev/random.hpp"

using namespace kashaev;
using namespace kashaev::gen;
using Q = mpq_class;

namespace {

std::vector<Q> random_point(const BoxShape& s, std::mt19937_64& rng) {
  std::vector<Q> z;
  for (std::size_t f = 0; f < s.count(); ++f) z.push_back(random_rational(rng, 50, 13));
  return z;
}

struct Case {
  std::string id;
  std::vector<double> params;
};

std::vector<Case> all_cases() {
  return {{"kashaev3d", {}}, {"sholo2d", {}}, {"cubic1d", {0, 0, -4}}, {"cubic1d", {-3, -6, -4}}, {"box2d", {4, 4}}, {"box2d", {4, 0}}};
}

template <class T>
std::vector<T> as(const std::vector<double>& p) {
  std::vector<T> out;
  for (double v : p) out.push_back(T(v));
  return out;
}

GridField<double> positive_sweep(const Instance<double>& inst, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  auto x = initial_field(inst, default_window(inst.shape), [&] { return u(rng); });
  gen_sweep(inst, x);
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(Instance, DiscriminantFactorsEverywhere) {
  std::mt19937_64 rng(61);
  for (const auto& c : all_cases()) {
    auto inst = make_instance<Q>(c.id, as<Q>(c.params));
    for (int k = 0; k < 100; ++k) ASSERT_TRUE(discriminant_identity(inst, random_point(inst.shape, rng))) << c.id;
  }
}

TEST(Instance, ReflectionInvariance) {
  std::mt19937_64 rng(62);
  for (const auto& c : all_cases()) {
    auto inst = make_instance<Q>(c.id, as<Q>(c.params));
    for (int k = 0; k < 64; ++k) ASSERT_TRUE(invariance_holds(inst, random_point(inst.shape, rng))) << c.id;
  }
}

TEST(Instance, CubicDiscriminantExample) {
  auto inst = make_instance<Q>("cubic1d", {Q(0), Q(0), Q(-4)});
  std::mt19937_64 rng(63);
  for (int k = 0; k < 20; ++k) {
    auto z = random_point(inst.shape, rng);
    Q want = 16 * z[1] * z[1] * z[1] * z[1] * z[1] * z[1] + 16 * z[0] * z[0] * z[0] * z[2] * z[2] * z[2];
    EXPECT_EQ(eval(inst.fi[0], z), want);
  }
}

TEST(Instance, SholoFaceProduct) {
  auto inst = make_instance<Q>("sholo2d", {});
  std::mt19937_64 rng(64);
  auto z = random_point(inst.shape, rng);
  EXPECT_EQ(eval(inst.fi[0], z) * eval(inst.fi[1], z), 32 * (z[0] + z[2]) * (z[0] + z[1]));
}

TEST(Instance, KashaevPolynomialMatchesModule) {
  auto inst = make_instance<Q>("kashaev3d", {});
  std::mt19937_64 rng(65);
  for (int k = 0; k < 20; ++k) {
    auto z = random_point(inst.shape, rng);
    Corners<Q> c;
    for (int m = 0; m < 8; ++m) c[std::size_t(m)] = z[std::size_t(m)];
    EXPECT_EQ(eval(inst.f, z), kashaev_K(c));
  }
}

TEST(Instance, BadParams) {
  EXPECT_THROW(make_instance<Q>("cubic1d", {Q(1)}), Error);
  EXPECT_THROW(make_instance<Q>("sholo2d", {Q(1)}), Error);
  EXPECT_THROW(make_instance<Q>("nope", {}), Error);
  try {
    make_instance<Q>("box2d", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadParams);
  }
}

// ---------------------------------------------------------------------------

TEST(GenStep, SholoExample) {
  auto inst = make_instance<double>("sholo2d", {});
  std::vector<double> z{1, 1, 1, 0};
  auto out = gen_step(inst, z, {8.0, std::sqrt(2.0)});
  EXPECT_NEAR(out.top, 5 + 4 * std::sqrt(2.0), 1e-12);
}

TEST(GenStep, CubicExample) {
  auto inst = make_instance<double>("cubic1d", {0, 0, -4});
  std::vector<double> z{1, 1, 1, 0};
  auto out = gen_step(inst, z, {std::sqrt(32.0)});
  EXPECT_NEAR(out.top, 2 + 2 * std::sqrt(2.0), 1e-12);
}

TEST(GenStep, PairwiseFaceNegationKeepsTop) {
  std::mt19937_64 rng(66);
  auto inst = make_instance<double>("kashaev3d", {});
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::vector<double> z(8);
  for (auto& v : z) v = u(rng);
  std::vector<double> w{u(rng), u(rng), u(rng)};
  auto a = gen_step(inst, z, w);
  auto b = gen_step(inst, z, {-w[0], -w[1], w[2]});
  EXPECT_DOUBLE_EQ(a.top, b.top);
}

TEST(GenStep, AgreesWithKashaevModule) {
  std::mt19937_64 rng(67);
  auto inst = make_instance<Q>("kashaev3d", {});
  Box3 box({0, 0, 0}, {1, 1, 1});
  for (int k = 0; k < 10; ++k) {
    auto fld = random_khex_exact(box, rng);
    std::vector<Q> z(8);
    for (int m = 0; m < 8; ++m) z[std::size_t(m)] = fld.vertices.at(corner({0, 0, 0}, m));
    std::vector<Q> w{4 * fld.faces.at({1, {0, 0, 0}}), fld.faces.at({2, {0, 0, 0}}), fld.faces.at({3, {0, 0, 0}})};
    auto out = gen_step(inst, z, w);
    EXPECT_EQ(out.top, z[7]);
    EXPECT_EQ(out.faces[0], 4 * fld.faces.at({1, {1, 0, 0}}));
    EXPECT_EQ(out.faces[1], fld.faces.at({2, {0, 1, 0}}));
    EXPECT_EQ(out.faces[2], fld.faces.at({3, {0, 0, 1}}));
  }
}

TEST(GenStep, ZeroGRejected) {
  auto inst = make_instance<Q>("cubic1d", {Q(0), Q(0), Q(-4)});
  std::vector<Q> z{Q(0), Q(1), Q(1), Q(0)};
  EXPECT_THROW(gen_step(inst, z, {Q(4)}), Error);
}

// ---------------------------------------------------------------------------

TEST(CheckGen, SweepsAreClean) {
  std::mt19937_64 rng(68);
  Tolerance tol{1e-9, 1e-12};
  for (const auto& c : all_cases()) {
    auto inst = make_instance<double>(c.id, c.params);
    auto x = positive_sweep(inst, rng);
    EXPECT_TRUE(check_gen(inst, x, tol).empty()) << c.id;
  }
}

TEST(CheckGen, BrokenFaceSquareFlagged) {
  std::mt19937_64 rng(69);
  auto inst = make_instance<double>("sholo2d", {});
  auto x = positive_sweep(inst, rng);
  Idx b{2, 2};
  x.set_face(0, b, x.face(0, b) * 1.5);
  auto r = check_gen(inst, x, {1e-9, 1e-12});
  bool square = false;
  for (const auto& f : r) square = square || (f.kind == "face-square" && f.where == Idx{1, 2, 2});
  EXPECT_TRUE(square);
}

// ---------------------------------------------------------------------------

TEST(Coherence, PositiveSweepsAllInstances) {
  std::mt19937_64 rng(70);
  Tolerance tol{1e-9, 1e-12};
  for (const auto& c : all_cases()) {
    auto inst = make_instance<double>(c.id, c.params);
    for (int t = 0; t < 3; ++t) {
      auto x = positive_sweep(inst, rng);
      ASSERT_FALSE(coherence_points(x).empty()) << c.id;
      EXPECT_TRUE(check_gen_coherence_all(inst, x, tol).empty()) << c.id;
    }
  }
}

TEST(Coherence, SholoUsesMinusSign) {
  auto inst = make_instance<double>("sholo2d", {});
  EXPECT_EQ(inst.gamma_product(), -1);
  std::mt19937_64 rng(71);
  auto x = positive_sweep(inst, rng);
  auto c = check_gen_coherence(inst, x, coherence_points(x).front(), {1e-9, 1e-12});
  EXPECT_TRUE(c.ok);
  EXPECT_TRUE(c.split_ok);
  EXPECT_LT(c.rhs, 0);
}

TEST(Coherence, CubicExactTrajectory) {
  auto inst = make_instance<Q>("cubic1d", {Q(-3), Q(-6), Q(-4)});
  auto seed = square_seed(inst);
  ASSERT_TRUE(seed.has_value());
  auto x = trajectory_1d(inst, *seed, 10);
  EXPECT_TRUE(check_gen(inst, x).empty());
  for (int v = 1; v + 3 <= 9; ++v) {
    auto [l, r] = cubic1d_ratio_form(x, v);
    EXPECT_EQ(l, r) << v;
    EXPECT_TRUE(check_gen_coherence(inst, x, {v}).ok) << v;
  }
}

TEST(Coherence, PerturbedVertexFails) {
  std::mt19937_64 rng(72);
  auto inst = make_instance<double>("box2d", {4, 4});
  auto x = positive_sweep(inst, rng);
  Idx v = coherence_points(x).front();
  x.set(v, x.at(v) * 1.01);
  EXPECT_FALSE(check_gen_coherence_all(inst, x, {1e-9, 1e-12}).empty());
}

TEST(Coherence, IncompleteNeighbourhood) {
  auto inst = make_instance<double>("cubic1d", {0, 0, -4});
  GridField<double> x(Window{{0}, {4}}, inst.shape);
  try {
    check_gen_coherence(inst, x, {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NeighborhoodIncomplete);
  }
}

// ---------------------------------------------------------------------------

TEST(Signs, TablesConfirmed) {
  std::mt19937_64 rng(73);
  for (const auto& c : all_cases()) {
    auto inst = make_instance<double>(c.id, c.params);
    auto sv = verify_propagation_signs(inst, 20, rng, {1e-9, 1e-12});
    EXPECT_TRUE(sv.mismatches.empty()) << c.id;
    EXPECT_GT(sv.samples, 0u);
  }
}

TEST(Signs, CubicBothPositive) {
  auto inst = make_instance<double>("cubic1d", {0, 0, -4});
  EXPECT_EQ(inst.gamma, (std::vector<int>{1, 1}));
}

// One box only: every face is either initial or produced by a single step.
TEST(Signs, NegatedRuleFlipsHalfTheTable) {
  std::mt19937_64 rng(74);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Tolerance tol{1e-9, 1e-12};
  auto survey = [&](const Instance<double>& inst) {
    SignSurvey sv;
    for (int t = 0; t < 10; ++t) {
      auto x = initial_field(inst, Window{Idx(std::size_t(inst.d()), 0), inst.shape.a}, [&] { return u(rng); });
      gen_sweep(inst, x);
      survey_signs(inst, x, sv, tol);
    }
    return sv.observed;
  };
  for (const auto& c : all_cases()) {
    auto base = make_instance<double>(c.id, c.params);
    if (base.d() < 2) continue;
    EXPECT_EQ(survey(base), base.gamma) << c.id;
    for (int i = 0; i < base.d(); ++i) {
      std::vector<int> want = base.gamma;
      for (unsigned m = 0; m < want.size(); ++m)
        if (m >> i & 1) want[m] = -want[m];
      EXPECT_EQ(survey(negate_rule(base, i)), want) << c.id << " rule " << i;
      int prod = 1;
      for (int s : want) prod *= s;
      EXPECT_EQ(prod, base.gamma_product());
    }
  }
}
