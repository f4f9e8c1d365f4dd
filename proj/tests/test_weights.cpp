// Weight combinatorics: the interval DP against the partition-enumeration
// oracle, the exact N selection rule, and the R thresholds.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "utbreaks/gen.hpp"
#include "utbreaks/weights.hpp"

using namespace utbreaks;

TEST_CASE("interval DP on hand examples") {
  WeightMap m(3, std::nullopt);
  m.at(1, 2) = 3;
  m.at(2, 3) = 5;
  CHECK(mu_dp(m, 3).at(1, 3) == 8);  // only chain 3 + 5

  m.at(1, 3) = 7;
  CHECK(mu_dp(m, 3).at(1, 3) == 8);  // max(7, 8)

  WeightMap m4(4, std::nullopt);
  m4.at(1, 2) = 1;
  m4.at(2, 3) = 1;
  m4.at(3, 4) = 1;
  CHECK(mu_dp(m4, 4).at(1, 4) == 3);

  WeightMap bad(3, std::nullopt);
  bad.at(1, 2) = 3;  // (2,3) missing: no finite chain to (1,3)
  CHECK_THROWS_AS(mu_dp(bad, 3), hypothesis_error);
}

TEST_CASE("enumeration oracle agrees with the DP") {
  WeightMap m(3, std::nullopt);
  m.at(1, 2) = 3;
  m.at(2, 3) = 5;
  CHECK(mu_enum_oracle(m, 3).at(1, 3) == 8);

  Rng rng(0x417);
  for (int n = 3; n <= 6; ++n) {
    for (int t = 0; t < 100; ++t) {
      WeightMap w = random_weight_map(rng, n, 20);
      auto dp = mu_dp(w, n);
      auto oracle = mu_enum_oracle(w, n);
      for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) CHECK(dp.at(i, j) == oracle.at(i, j));
    }
  }
  CHECK_THROWS_AS(mu_enum_oracle(WeightMap(13, std::nullopt), 13), std::invalid_argument);
}

TEST_CASE("superadditivity of mu") {
  Rng rng(0x418);
  for (int t = 0; t < 200; ++t) {
    int n = static_cast<int>(rng.range(3, 6));
    WeightMap w = random_weight_map(rng, n, 25);
    auto mu = mu_dp(w, n);
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        if (w.at(i, j)) CHECK(mu.at(i, j) >= *w.at(i, j));
        for (int l = i + 1; l < j; ++l) CHECK(mu.at(i, j) >= mu.at(i, l) + mu.at(l, j));
      }
    }
  }
}

TEST_CASE("N selection by exact integer comparison") {
  {
    auto [N, q] = choose_N(2, 3, Rational(5));
    CHECK(N == 11);  // bound 3(2^3+1)5 + 2 = 137; 2^(N-3) > 137
    CHECK(q == 2048);
  }
  {
    auto [N, q] = choose_N(2, 2, Rational(3));
    CHECK(N == 6);  // 2(2+1)3 + 2 = 20; 2^(N-1) > 20
    CHECK(q == 64);
  }
  {
    auto [N, q] = choose_N(3, 3, Rational(1));
    CHECK(N == 8);  // 3(27+1) + 3 = 87; 3^(N-3) > 87
    CHECK(q == 6561);
  }
  // minimality: the strict inequality holds at N and fails at N-1
  Rng rng(0x419);
  for (int t = 0; t < 60; ++t) {
    int64_t p = std::vector<int64_t>{2, 3, 5}[rng.below(3)];
    int n = static_cast<int>(rng.range(2, 4));
    Rational mA(rng.range(1, 40), rng.range(1, 3));
    auto [N, q] = choose_N(p, n, mA);
    int64_t h = static_cast<int64_t>(n) * (n - 1) / 2;
    auto powi = [](int64_t b, int64_t e) {
      int64_t r = 1;
      for (int64_t i = 0; i < e; ++i) r *= b;
      return r;
    };
    Rational bound = Rational(n) * Rational(powi(p, h) + 1) * mA + Rational(p);
    CHECK(Rational(powi(p, N - h)) > bound);
    CHECK_FALSE(Rational(powi(p, N - 1 - h)) > bound);
    CHECK(q == powi(p, N));
  }
  CHECK_THROWS_AS(choose_N(2, 3, Rational(0)), std::invalid_argument);
}

TEST_CASE("R thresholds") {
  PairTable<Rational> r(3, Rational(0));
  r.at(1, 2) = Rational(3);
  r.at(2, 3) = Rational(5);
  PairTable<Rational> blocks(3, Rational(0));
  blocks.at(1, 2) = Rational(3);
  blocks.at(2, 3) = Rational(5);
  blocks.at(1, 3) = Rational(5);
  CHECK(r_threshold(1, 3, 2048, r, blocks) == Rational(10250));  // 2048*5 + 2*5
  // adjacent pairs use the convention r_{i,i} = -1
  CHECK(r_threshold(1, 2, 2048, r, blocks) == Rational(-2048 + 3));
  CHECK(r_threshold(1, 3, 2048, r, blocks) > r_threshold(1, 2, 2048, r, blocks));
}

TEST_CASE("R selection") {
  CHECK(choose_R(Rational(10250), 2) == 10251);
  CHECK(choose_R(Rational(10), 3) == 11);
  CHECK(choose_R(Rational(11), 3) == 13);  // 12 divisible by 3
  CHECK(choose_R(Rational(-5000), 2) == 1);
  CHECK(choose_R(Rational(5, 2), 3) == 4);
}

TEST_CASE("weights from a normalized matrix") {
  auto ctx = FieldCtx::make_prime(2);
  TriMatrix a = TriMatrix::identity(ctx, 3);
  a.set_entry(1, 2, LaurentSeries::monomial(ctx, -3, FieldElement::one(ctx)));
  a.set_entry(2, 3, LaurentSeries::monomial(ctx, -5, FieldElement::one(ctx)));
  WeightTable wt = weights_from_matrix(a);
  CHECK(*wt.m.at(1, 2) == 3);
  CHECK(*wt.m.at(2, 3) == 5);
  CHECK_FALSE(wt.m.at(1, 3).has_value());
  CHECK(wt.mu.at(1, 3) == 8);
  CHECK(wt.mA == Rational(5));
  CHECK(wt.mA_block.at(1, 3) == Rational(5));
  CHECK(wt.mu_partition(1, 3) == std::vector<int>{1, 2, 3});
  CHECK_FALSE(wt.dominant_weight_premise(1, 3));

  a.set_entry(1, 3, LaurentSeries::monomial(ctx, -9, FieldElement::one(ctx)));
  WeightTable wt2 = weights_from_matrix(a);
  CHECK(wt2.mu.at(1, 3) == 9);
  CHECK(wt2.mu_partition(1, 3) == std::vector<int>{1, 3});
  CHECK(wt2.dominant_weight_premise(1, 3));
}
