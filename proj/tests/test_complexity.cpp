#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "braidnav/complexity.hpp"
#include "oracle.hpp"

using namespace braidnav;

namespace {
BraidWord W(int n, std::vector<int> l) { return make_word(n, std::move(l)); }
long long as_ll(const BigInt& x) { return x.convert_to<long long>(); }
}  // namespace

TEST(Complexity, CanonicalDiagram) {
  auto e3 = canonical_diagram(3);
  EXPECT_EQ(e3.n_punctures, 4);
  EXPECT_EQ(e3.coords.size(), 4u);
  EXPECT_EQ(as_ll(norm(e3)), 4);
  EXPECT_EQ(as_ll(norm(canonical_diagram(4))), 6);
  EXPECT_EQ(canonical_diagram(3), canonical_diagram(3));
  for (int n = 2; n <= 8; ++n) EXPECT_EQ(as_ll(norm(canonical_diagram(n))), 2 * (n - 1));
  EXPECT_THROW(canonical_diagram(1), std::invalid_argument);
}

TEST(Complexity, LetterActionIsInvertible) {
  for (int n = 2; n <= 6; ++n) {
    auto e = canonical_diagram(n);
    for (int i = 1; i < n; ++i) {
      EXPECT_EQ(apply_letter(apply_letter(e, i), -i), e);
      EXPECT_EQ(apply_letter(apply_letter(e, -i), i), e);
    }
    EXPECT_EQ(apply_word(e, {}), e);
  }
  EXPECT_THROW(apply_letter(canonical_diagram(3), 4), std::invalid_argument);
}

TEST(Complexity, TwoStrandCountsMatchArcCounting) {
  // on the 2-punctured disk the arc of E wraps k times around the pair
  for (int k = 0; k <= 6; ++k) {
    std::vector<int> up(k, 1), down(k, -1);
    EXPECT_NEAR(topological_complexity(W(2, up)).tc, std::log2(2 * k + 1), 1e-9);
    EXPECT_NEAR(topological_complexity(W(2, down)).tc, std::log2(2 * k + 1), 1e-9);
  }
}

TEST(Complexity, NormsAgainstOracle) {
  EXPECT_EQ(as_ll(norm(apply_word(canonical_diagram(3), {-1, 2}))), 16);
  EXPECT_EQ(oracle::diagram_norm(W(3, {-1, 2})), 16);
  // sigma_1^-1 on three strands moves only the first arc
  EXPECT_EQ(oracle::diagram_norm(W(3, {-1})), 8);
  EXPECT_EQ(as_ll(norm(apply_word(canonical_diagram(3), {-1}))), 8);
}

TEST(Complexity, TcExamples) {
  EXPECT_EQ(topological_complexity(identity(3)).tc, 0.0);
  EXPECT_NEAR(topological_complexity(W(3, {-1, 2})).tc, 2.0, 1e-9);
  EXPECT_NEAR(topological_complexity(W(3, {-1})).tc, oracle::tc(W(3, {-1})), 1e-12);
  EXPECT_NEAR(topological_complexity(W(4, {1, 3})).tc, oracle::tc(W(4, {1, 3})), 1e-12);
  EXPECT_EQ(topological_complexity(identity(1)).tc, 0.0);
}

TEST(ComplexityProperty, NormMatchesOracleOnRandomWords) {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 500; ++it) {
    int n = 2 + static_cast<int>(rng() % 5);
    auto w = oracle::random_word(rng, n, 12);
    auto d = apply_word(canonical_diagram(n), w.letters);
    ASSERT_EQ(as_ll(norm(d)), oracle::diagram_norm(w)) << to_string(w);
  }
}

TEST(ComplexityProperty, TcIsAClassFunction) {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 300; ++it) {
    int n = 2 + static_cast<int>(rng() % 5);
    auto w = oracle::random_word(rng, n, 15);
    auto s = relation_simplify(w);
    EXPECT_EQ(topological_complexity(w).norm_after, topological_complexity(s).norm_after);
    EXPECT_GE(topological_complexity(w).tc, 0.0);
  }
}

TEST(ComplexityProperty, ActionsDifferForDifferentPermutations) {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 300; ++it) {
    int n = 3 + static_cast<int>(rng() % 3);
    auto a = oracle::random_word(rng, n, 6), b = oracle::random_word(rng, n, 6);
    if (permutation_of(a) == permutation_of(b)) continue;
    bool differ = false;
    for (const auto& p : probe_loops(n)) differ |= apply_word(p, a.letters) != apply_word(p, b.letters);
    EXPECT_TRUE(differ);
    EXPECT_NE(apply_word(canonical_diagram(n), a.letters), apply_word(canonical_diagram(n), b.letters));
  }
}

TEST(ComplexityProperty, GrowthUnderPowers) {
  auto w = W(3, {1, -2});
  double prev = 0.0;
  BraidWord p = identity(3);
  for (int k = 1; k <= 12; ++k) {
    p = compose(p, w);
    double tc = topological_complexity(p).tc;
    EXPECT_GE(tc, prev);
    prev = tc;
  }
  EXPECT_GT(prev, 10.0);
}

TEST(ComplexityProperty, LongWordsDoNotOverflow) {
  BraidWord p = identity(4);
  for (int k = 0; k < 80; ++k) p = compose(p, W(4, {1, -2, 3}));
  auto s = topological_complexity(p);
  EXPECT_GT(s.norm_after, BigInt(1) << 64);
  EXPECT_TRUE(std::isfinite(s.tc));
  EXPECT_GT(s.tc, 64.0);
}
