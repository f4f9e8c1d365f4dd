// Sparse truncated Laurent series: valuations, ring ops, precision
// propagation, inversion, Frobenius twists.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "utbreaks/gen.hpp"
#include "utbreaks/laurent.hpp"

using namespace utbreaks;

namespace {

FieldRef f2() { return FieldCtx::make_prime(2); }
FieldRef f3() { return FieldCtx::make_prime(3); }

LaurentSeries mono(const FieldRef& c, int64_t idx, int64_t coef = 1,
                   int64_t prec = kPrecExact) {
  return LaurentSeries::monomial(c, idx, FieldElement::from_int(c, coef), prec);
}

}  // namespace

TEST_CASE("valuation") {
  auto c = f2();
  CHECK(mono(c, -3).valuation() == -3);            // t^3 has v = -3
  CHECK_FALSE(LaurentSeries::zero(c, 100).valuation().has_value());
  CHECK(LaurentSeries::zero(c, 100).prec() == 100);  // Undetermined(100)
  CHECK((mono(c, 0) + mono(c, 1)).valuation() == 0);  // 1 + t^{-1}
}

TEST_CASE("ring ops") {
  auto c = f2();
  LaurentSeries t3 = mono(c, -3), t5 = mono(c, -5);
  CHECK((t3 * t5).valuation() == -8);
  CHECK((t3 * t5).terms().size() == 1);
  CHECK(((t3 + t5) - t5) == t3);

  // prec rule: mul of (prec 50, val -3) by (prec 60, val -5) -> 45
  LaurentSeries a = mono(c, -3, 1, 50);
  LaurentSeries b = mono(c, -5, 1, 60);
  CHECK(a.mul(b).prec() == 45);
}

TEST_CASE("coefficient access beyond precision is an error") {
  auto c = f2();
  LaurentSeries s = mono(c, -3, 1, 10);
  CHECK(s.coef_at(9) == FieldElement::zero(c));
  CHECK_THROWS_AS(s.coef_at(10), precision_error);
  CHECK_THROWS_AS(s.coef_at(11), precision_error);
}

TEST_CASE("inverse") {
  auto c = f2();
  // (1 + t^{-1})^{-1} = 1 + t^{-1} + t^{-2} + ... in characteristic 2
  LaurentSeries u = mono(c, 0) + mono(c, 1);
  LaurentSeries inv = u.invert(12);
  for (int64_t l = 0; l < 12; ++l) CHECK(inv.coef_at(l) == FieldElement::one(c));
  CHECK(u.mul(inv).agrees_with(LaurentSeries::constant(c, FieldElement::one(c), 12)));

  CHECK(mono(c, -3).invert() == mono(c, 3));
  CHECK_THROWS_AS(LaurentSeries::zero(c, 7).invert(), precision_error);
  CHECK_THROWS_AS(LaurentSeries::zero(c).invert(), std::invalid_argument);
}

TEST_CASE("p_power and as_image") {
  auto c2 = f2();
  CHECK(mono(c2, -3).p_power(1) == mono(c2, -6));  // Frobenius on t^3
  LaurentSeries x = mono(c2, 0) + mono(c2, -3);    // 1 + t^3
  LaurentSeries xp = x.p_power(1);                 // 1 + t^6
  CHECK(xp == mono(c2, 0) + mono(c2, -6));
  CHECK(mono(c2, -3, 1, 10).p_power(1).prec() == 20);

  // P(t^3) = t^6 + t^3 in characteristic 2
  CHECK(mono(c2, -3).as_image() == mono(c2, -6) + mono(c2, -3));
  CHECK(LaurentSeries::zero(c2).as_image().is_exact_zero());
  auto c3 = f3();
  for (int64_t v = 0; v < 3; ++v)
    CHECK(LaurentSeries::constant(c3, FieldElement::from_int(c3, v)).as_image().is_exact_zero());
}

TEST_CASE("valuation is additive on products, min rule on sums") {
  for (const auto& ctx : {FieldCtx::make_prime(2), FieldCtx::make_prime(5)}) {
    Rng rng(0x11aabbu + static_cast<uint64_t>(ctx->p()));
    for (int t = 0; t < 400; ++t) {
      LaurentSeries x = random_unit_series(rng, ctx, rng.range(-9, 0), 9, 4);
      LaurentSeries y = random_unit_series(rng, ctx, rng.range(-9, 0), 9, 4);
      CHECK((x * y).valuation_or_throw() ==
            x.valuation_or_throw() + y.valuation_or_throw());
      int64_t lb = std::min(x.valuation_or_throw(), y.valuation_or_throw());
      LaurentSeries s = x + y;
      CHECK(s.valuation_lower_bound() >= lb);
      if (x.valuation_or_throw() != y.valuation_or_throw())
        CHECK(s.valuation_or_throw() == lb);
    }
  }
}

TEST_CASE("inverse roundtrip on random units") {
  auto c = FieldCtx::make_prime(3);
  Rng rng(0xdecafu);
  for (int t = 0; t < 1000; ++t) {
    LaurentSeries u = random_unit_series(rng, c, rng.range(-6, 4), 14, 5, 18);
    LaurentSeries round = u.invert().invert();
    CHECK(round.agrees_with(u));
  }
}

TEST_CASE("p_power composes") {
  auto c = FieldCtx::make(2, FpPoly{1, 1, 1});
  Rng rng(0xf00du);
  for (int t = 0; t < 300; ++t) {
    LaurentSeries x = random_series(rng, c, -8, 8, 5, 25);
    CHECK(x.p_power(3) == x.p_power(1).p_power(1).p_power(1));
    CHECK(x.p_power(2) == x.p_power(1).p_power(1));
  }
}

TEST_CASE("exactness bookkeeping") {
  auto c = f2();
  CHECK(mono(c, -3).is_exact());
  CHECK(mono(c, -3).scale_int(0).is_exact_zero());
  CHECK((mono(c, -3, 1, 10) + mono(c, -3)).prec() == 10);
  // shifted moves indices and precision together
  LaurentSeries s = mono(c, 4, 1, 9).shifted(3);
  CHECK(s.valuation() == 7);
  CHECK(s.prec() == 12);
}
