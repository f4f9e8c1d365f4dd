// The auxiliary field K_R: p-adic binomials via Lucas, the t^l expansion,
// the embedding, iota, and the defect operator eta.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "utbreaks/gen.hpp"
#include "utbreaks/kr.hpp"

using namespace utbreaks;

namespace {

FieldRef f2() { return FieldCtx::make_prime(2); }

int64_t binom_int(int64_t n, int64_t k) {
  __int128 r = 1;
  for (int64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return static_cast<int64_t>(r);
}

}  // namespace

TEST_CASE("p-adic binomial coefficients") {
  CHECK(padic_binom(7, 0, 2, 5) == 1);
  // m = 1: binom(3/5, 1) = 3 * 5^{-1} = 1 mod 2
  CHECK(padic_binom(3, 1, 2, 5) == 1);
  // m = 2, l = 1, R = 5, p = 2: 1/5 = 13 mod 16 = 1101_2, Lucas digit a1 = 0
  CHECK(padic_binom(1, 2, 2, 5) == 0);
  // cross-check: binom(13, 2) = 78 is even
  CHECK(binom_int(13, 2) == 78);
  CHECK(binom_int(13, 2) % 2 == 0);

  CHECK_THROWS_AS(padic_binom(1, 1, 2, 6), std::invalid_argument);  // p | R
  CHECK_THROWS_AS(padic_binom(1, -1, 2, 5), std::invalid_argument);

  // integer z: must match the ordinary binomial mod p
  for (int64_t z = 0; z <= 12; ++z)
    for (int64_t m = 0; m <= 12; ++m) {
      CHECK(padic_binom(5 * z, m, 2, 5) == binom_int(z, m) % 2);
      CHECK(padic_binom(7 * z, m, 3, 7) == binom_int(z, m) % 3);
    }
}

TEST_CASE("binomials against the falling-factorial evaluation for m < p") {
  Rng rng(0xb10b);
  for (int t = 0; t < 500; ++t) {
    int64_t p = std::vector<int64_t>{2, 3, 5}[rng.below(3)];
    int64_t R = rng.range(1, 60);
    if (R % p == 0) continue;
    int64_t l = rng.range(-80, 80);
    int64_t m = rng.range(0, p - 1);
    uint32_t z = static_cast<uint32_t>(
        ((l % p + p) % p) * fp::inv(static_cast<uint32_t>(((R % p) + p) % p), p) % p);
    uint32_t ff = 1;
    for (int64_t i = 0; i < m; ++i)
      ff = fp::mul(ff, static_cast<uint32_t>(((static_cast<int64_t>(z) - i) % p + p) % p), p);
    for (int64_t i = 1; i <= m; ++i)
      ff = fp::mul(ff, fp::inv(static_cast<uint32_t>(i % p), p), p);
    CHECK(padic_binom(l, m, p, R) == ff);
  }
}

TEST_CASE("t^l expansion") {
  auto ctx = f2();
  KRContext kr = KRContext::make(ctx, 2, 2, 5, 40);  // q = 4, R = 5
  CHECK(t_power(kr, 0).coef_at(0) == FieldElement::one(ctx));
  CHECK(t_power(kr, 0).terms().size() == 1);

  LaurentSeries t1 = t_power(kr, 1);
  // terms at -4 (coeff 1), 1 (binom(1/5,1) = 1), 16 (binom(1/5,4) = 1);
  // 6 and 11 vanish
  CHECK(t1.coef_at(-4) == FieldElement::one(ctx));
  CHECK(t1.coef_at(1) == FieldElement::one(ctx));
  CHECK(t1.coef_at(6) == FieldElement::zero(ctx));
  CHECK(t1.coef_at(11) == FieldElement::zero(ctx));
  CHECK(t1.coef_at(16) == FieldElement::one(ctx));

  for (int64_t l : {-7, -2, 3, 9}) CHECK(t_power(kr, l).valuation() == -kr.q() * l);
}

TEST_CASE("t^l is multiplicative") {
  for (int64_t p : {2, 3}) {
    FieldRef ctx = FieldCtx::make_prime(p);
    KRContext kr = KRContext::make(ctx, 2, 2, p == 2 ? 5 : 7, 140);
    Rng rng(0x7990 + static_cast<uint64_t>(p));
    for (int t = 0; t < 50; ++t) {
      int64_t l1 = rng.range(-8, 8), l2 = rng.range(-8, 8);
      CHECK(t_power(kr, l1).mul(t_power(kr, l2)).agrees_with(t_power(kr, l1 + l2)));
    }
  }
}

TEST_CASE("defining relation holds on every context build") {
  for (auto [p, N, R] : std::vector<std::tuple<int64_t, int64_t, int64_t>>{
           {2, 2, 5}, {2, 5, 3}, {3, 3, 4}, {5, 2, 7}, {2, 11, 10251}}) {
    FieldRef ctx = FieldCtx::make_prime(p);
    CHECK_NOTHROW(KRContext::make(ctx, 3, N, R));
  }
  CHECK_THROWS_AS(KRContext::make(f2(), 2, 2, 4), std::invalid_argument);  // p | R
  CHECK_THROWS_AS(KRContext::make(f2(), 2, 0, 5), std::invalid_argument);
}

TEST_CASE("embedding") {
  auto ctx = f2();
  KRContext kr = KRContext::make(ctx, 2, 3, 5, 120);  // q = 8
  LaurentSeries t3 = LaurentSeries::monomial(ctx, -3, FieldElement::one(ctx));
  CHECK(embed(kr, t3).valuation() == -3 * kr.q());

  Rng rng(0xe3bed);
  for (int t = 0; t < 40; ++t) {
    LaurentSeries x = random_series(rng, ctx, -4, 4, 3, 9);
    LaurentSeries y = random_series(rng, ctx, -4, 4, 3, 9);
    CHECK(embed(kr, x.mul(y)).agrees_with(embed(kr, x).mul(embed(kr, y))));
    CHECK(embed(kr, x + y).agrees_with(embed(kr, x) + embed(kr, y)));
  }

  // embed(t)^R agrees with the expansion of t^R
  LaurentSeries t = LaurentSeries::monomial(ctx, -1, FieldElement::one(ctx));
  LaurentSeries et = embed(kr, t);
  LaurentSeries pw = LaurentSeries::constant(ctx, FieldElement::one(ctx), kr.prec_cap());
  for (int64_t i = 0; i < kr.R(); ++i) pw = pw.mul(et);
  CHECK(pw.agrees_with(t_power(kr, kr.R())));
}

TEST_CASE("iota preserves indices and twists coefficients") {
  auto ctx = f2();
  KRContext kr = KRContext::make(ctx, 2, 3, 5);
  LaurentSeries t3 = LaurentSeries::monomial(ctx, -3, FieldElement::one(ctx));
  CHECK(iota(kr, t3) == t3);  // Frobenius is trivial on F_2, index kept

  auto c4 = FieldCtx::make(2, FpPoly{1, 1, 1});
  KRContext kr4 = KRContext::make(c4, 2, 3, 5);
  FieldElement g = FieldElement::gen(c4);
  LaurentSeries s = LaurentSeries::monomial(c4, -3, g);
  CHECK(iota(kr4, s).coef_at(-3) == g.proot(3));
  CHECK(iota(kr4, s).valuation() == s.valuation());
  CHECK(iota_pow_q(kr4, s).agrees_with(iota(kr4, s).p_power(3)));

  Rng rng(0x107a);
  for (int t = 0; t < 60; ++t) {
    LaurentSeries x = random_series(rng, c4, -6, 6, 4, 11);
    CHECK(iota(kr4, x).prec() == x.prec());
    CHECK(iota_pow_q(kr4, x).agrees_with(iota(kr4, x).p_power(3)));
  }
}

TEST_CASE("eta: leading term and vanishing on constants") {
  auto ctx = f2();
  KRContext kr = KRContext::make(ctx, 2, 4, 7);  // q = 16, R = 7
  // eta(t^3): leading valuation -3q + R, coefficient 3/R mod p
  LaurentSeries t3 = LaurentSeries::monomial(ctx, -3, FieldElement::one(ctx));
  LaurentSeries e = eta(kr, t3);
  CHECK(e.valuation() == -3 * kr.q() + kr.R());
  CHECK(e.coef_at(-3 * kr.q() + kr.R()) ==
        FieldElement::from_int(ctx, 3 * fp::inv(static_cast<uint32_t>(kr.R() % 2), 2)));

  CHECK(eta(kr, LaurentSeries::constant(ctx, FieldElement::one(ctx))).has_terms() == false);

  // eta = embed - iota^q on random series
  Rng rng(0xe7a);
  for (int t = 0; t < 60; ++t) {
    LaurentSeries x = random_series(rng, ctx, -4, 4, 4, 9);
    LaurentSeries lhs = eta(kr, x);
    LaurentSeries rhs = embed(kr, x) - iota_pow_q(kr, x);
    CHECK(lhs.agrees_with(rhs));
  }

  // leading coefficient of eta(t^{-l}) is -l/R, nonzero for p coprime l
  for (int64_t p : {3, 5}) {
    FieldRef c = FieldCtx::make_prime(p);
    KRContext k2 = KRContext::make(c, 2, 2, 7);
    for (int64_t l = 1; l <= 11; ++l) {
      if (l % p == 0) continue;
      int64_t lead = k2.q() * l + k2.R();
      LaurentSeries em = eta(k2, LaurentSeries::monomial(c, l, FieldElement::one(c)),
                             lead + 3 * k2.R());
      uint32_t want = static_cast<uint32_t>(
          ((-l % p + p) % p) * fp::inv(static_cast<uint32_t>(k2.R() % p), p) % p);
      CHECK(em.valuation_or_throw() == lead);
      CHECK(em.coef_at(lead) == FieldElement::from_int(c, want));
      CHECK(want != 0);
    }
  }
}
