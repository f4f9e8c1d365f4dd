// The break pipeline: normalization, the W sequence, S_R, brackets,
// per-pair extraction, and the closed forms.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "utbreaks/engine.hpp"
#include "utbreaks/gen.hpp"

using namespace utbreaks;

namespace {

FieldRef f2() { return FieldCtx::make_prime(2); }
FieldRef f3() { return FieldCtx::make_prime(3); }

LaurentSeries mono(const FieldRef& c, int64_t idx, int64_t coef = 1) {
  return LaurentSeries::monomial(c, idx, FieldElement::from_int(c, coef));
}

TriMatrix worked_n3(const FieldRef& c) {
  TriMatrix a = TriMatrix::identity(c, 3);
  a.set_entry(1, 2, mono(c, -3));
  a.set_entry(2, 3, mono(c, -5));
  return a;
}

}  // namespace

TEST_CASE("normalization") {
  auto c = f2();
  // already normalized: unchanged
  TriMatrix a = worked_n3(c);
  DefiningMatrix d = normalize_auto(a);
  CHECK(d.A.agrees_with(a));
  CHECK_FALSE(d.field_extended);

  // a12 = t^6: x = t^3 kills the even index, leaving t^3
  TriMatrix b = TriMatrix::identity(c, 2);
  b.set_entry(1, 2, mono(c, -6));
  DefiningMatrix db = normalize_auto(b);
  CHECK(db.A.entry(1, 2) == mono(c, -3));

  // a12 = t^3 + 1: the constant needs a root of x^2 + x = 1, so the field
  // grows to F_4 and the entry becomes t^3
  TriMatrix e = TriMatrix::identity(c, 2);
  e.set_entry(1, 2, mono(c, -3) + mono(c, 0));
  DefiningMatrix de = normalize_auto(e);
  CHECK(de.field_extended);
  CHECK(de.ctx->k() == 2);
  CHECK(de.A.entry(1, 2).valuation() == -3);
  CHECK(de.A.entry(1, 2).terms().size() == 1);

  // positive indices cascade upward and vanish in the limit
  TriMatrix g = TriMatrix::identity(c, 2);
  g.set_entry(1, 2, mono(c, -3) + mono(c, 2));
  DefiningMatrix dg = normalize_auto(g);
  CHECK(dg.A.entry(1, 2) == mono(c, -3));
  CHECK(dg.A.entry(1, 2).is_exact());

  // superdiagonal vanishing is a hard reject (t^2 + t normalizes to zero)
  TriMatrix h = TriMatrix::identity(c, 2);
  h.set_entry(1, 2, mono(c, -2) + mono(c, -1));
  CHECK_THROWS_AS(normalize_auto(h), hypothesis_error);
}

TEST_CASE("normalization touches only higher levels") {
  auto c = f2();
  TriMatrix a = TriMatrix::identity(c, 3);
  a.set_entry(1, 2, mono(c, -6));          // normalizes to t^3
  a.set_entry(2, 3, mono(c, -5));
  a.set_entry(1, 3, mono(c, -10));         // interacts with the (1,2) fix
  DefiningMatrix d = normalize_auto(a);
  assert_normal_form(d.A);
  CHECK(d.A.entry(1, 2) == mono(c, -3));
  CHECK(d.A.entry(2, 3) == mono(c, -5));
  // the (1,3) entry got the x^p a_{2,3} side effect: t^10 + t^6 t^5, then
  // index -11 survives normalization and -10 reduces to -5
  WeightTable wt = weights_from_matrix(d.A);
  CHECK(*wt.m.at(1, 2) == 3);
  CHECK(*wt.m.at(2, 3) == 5);
  CHECK(wt.m.at(1, 3).has_value());
}

TEST_CASE("W sequence: closed form for n = 2 and valuation bounds") {
  auto c = f2();
  TriMatrix a = TriMatrix::identity(c, 2);
  a.set_entry(1, 2, mono(c, -3));
  DefiningMatrix d = normalize_auto(a);
  int64_t N = 6;
  WSystem ws = build_w_system(d.ctx, 2, N, d.A);
  CHECK(ws.W[1].agrees_with(ws.A_R));
  for (int64_t e = 1; e <= N; ++e) {
    // w_{R,e,1,2} = sum_{u=0}^{e-1} a_{R,1,2}^(p^u)
    LaurentSeries want = LaurentSeries::zero(d.ctx);
    for (int64_t u = 0; u < e; ++u) want = want + ws.A_R.entry(1, 2).p_power(u);
    CHECK(ws.W[static_cast<size_t>(e)].entry(1, 2) == want);
  }
}

TEST_CASE("W entries respect the chain-weight lower bound") {
  auto c = f3();
  Rng rng(0x151);
  TriMatrix a = random_defining_matrix(rng, c, 3);
  DefiningMatrix d = normalize_auto(a);
  WeightTable wt = weights_from_matrix(d.A);
  auto [N, q] = choose_N(3, 3, wt.mA);
  WSystem ws = build_w_system(d.ctx, 3, N, d.A);
  for (int64_t e = 1; e <= N; ++e) {
    int64_t pe = 1;
    for (int64_t u = 0; u + 1 < e; ++u) pe *= 3;
    for (int i = 1; i <= 3; ++i) {
      for (int j = i + 1; j <= 3; ++j) {
        int64_t bound = -pe * wt.mu.at(i, j);
        CHECK(ws.W[static_cast<size_t>(e)].entry(i, j).valuation_lower_bound() >= bound);
        bool eq = ws.W[static_cast<size_t>(e)].entry(i, j).valuation() == bound;
        bool premise = wt.m.at(i, j) && *wt.m.at(i, j) == wt.mu.at(i, j);
        CHECK(eq == premise);
      }
    }
  }
}

TEST_CASE("S matrix identities for n = 2") {
  auto c = f2();
  TriMatrix a = TriMatrix::identity(c, 2);
  a.set_entry(1, 2, mono(c, -3));
  DefiningMatrix d = normalize_auto(a);
  WeightTable wt = weights_from_matrix(d.A);
  auto [N, q] = choose_N(2, 2, wt.mA);
  WSystem ws = build_w_system(d.ctx, 2, N, d.A);
  KRContext kr = KRContext::make(d.ctx, 2, N, 1);
  SMatrix sm = build_s_matrix(kr, ws, d.A, wt, 2 * 1 + 1);
  // s_{R,1,2} = eta(a_{1,2}) with leading valuation -q m + R
  CHECK(sm.S.entry(1, 2).agrees_with(sm.EtaA.entry(1, 2)));
  CHECK(sm.S.entry(1, 2).valuation_or_throw() == -q * 3 + 1);
}

TEST_CASE("S entries of a block depend only on that block") {
  auto c = f2();
  auto s_entry_23 = [&](const TriMatrix& m) {
    DefiningMatrix d = normalize_auto(m);
    WeightTable wt = weights_from_matrix(d.A);
    auto [N, q] = choose_N(2, 3, wt.mA);
    WSystem ws = build_w_system(d.ctx, 3, N, d.A);
    KRContext kr = KRContext::make(d.ctx, 3, N, 11);
    SMatrix sm = build_s_matrix(kr, ws, d.A, wt, 2 * 11 + 1);
    return sm.S.entry(2, 3);
  };
  TriMatrix a = worked_n3(c);
  TriMatrix b = worked_n3(c);
  b.set_entry(1, 3, mono(c, -7));  // differs outside the (2..3) block only
  CHECK(s_entry_23(a).agrees_with(s_entry_23(b)));
}

TEST_CASE("bracket decomposition") {
  auto c = f3();
  TriMatrix a = TriMatrix::identity(c, 3);
  a.set_entry(1, 2, mono(c, -1));
  a.set_entry(2, 3, mono(c, -2));
  DefiningMatrix d = normalize_auto(a);
  WeightTable wt = weights_from_matrix(d.A);
  auto [N, q] = choose_N(3, 3, wt.mA);
  WSystem ws = build_w_system(d.ctx, 3, N, d.A);
  Rational thr = r_threshold(1, 3, q, [] {
    PairTable<Rational> r(3, Rational(0));
    r.at(1, 2) = Rational(1);
    r.at(2, 3) = Rational(2);
    return r;
  }(), wt.mA_block);
  int64_t R = choose_R(thr, 3);
  KRContext kr = KRContext::make(d.ctx, 3, N, R);
  int64_t slack = 3 * R + 1;
  SMatrix sm = build_s_matrix(kr, ws, d.A, wt, slack);

  for (int i = 1; i <= 3; ++i) {
    for (int j = i + 1; j <= 3; ++j) {
      const LaurentSeries& entry = d.A.entry(i, j);
      // a^[0] = a_R^q as an index-scaled copy
      CHECK(a_bracket(kr, entry, 0).agrees_with(iota_pow(entry, N, 0)));
      if (entry.has_terms()) {
        int64_t m_ij = -entry.valuation_or_throw();
        CHECK(a_bracket(kr, entry, 1).valuation_or_throw() == -q * m_ij + R);
        // support lies in the residue class mR mod q
        for (int64_t m = 1; m <= 2; ++m) {
          LaurentSeries br = a_bracket(kr, entry, m);
          for (const auto& t : br.terms()) CHECK(mod_pos(t.first - m * R, q) == 0);
        }
      }
      // sum of brackets reproduces S below the omitted-tail bound
      LaurentSeries sum = LaurentSeries::zero(d.ctx);
      for (int64_t m = 1; m <= 3; ++m) sum = sum + s_bracket(kr, ws, d.A, i, j, m);
      int64_t tail = -q * wt.mu.at(i, j) + 4 * R;
      CHECK(sum.truncated(tail).agrees_with(sm.S.entry(i, j).truncated(tail)));
    }
  }
}

TEST_CASE("termwise derivative and the a^[1] identity") {
  auto c2 = f2();
  // a = t^3: a' = -3 t^3 = t^3 in characteristic 2
  CHECK(a_derivative(mono(c2, -3)) == mono(c2, -3));
  auto c3 = f3();
  // p = 3: a = t^4 -> a' = -4 t^4 = 2 t^4
  CHECK(a_derivative(mono(c3, -4)) == mono(c3, -4, 2));
  // v(a') = -m for normalized entries (p coprime to m)
  Rng rng(0xad1);
  for (int t = 0; t < 50; ++t) {
    LaurentSeries a = random_normalized_entry(rng, c3, random_coprime_weight(rng, 3, 17), 3);
    CHECK(a_derivative(a).valuation_or_throw() == a.valuation_or_throw());
    KRContext kr = KRContext::make(c3, 2, 3, 7);
    CHECK_NOTHROW(assert_bracket_derivative_identity(kr, a));
  }
}

TEST_CASE("break pipeline on pinned instances") {
  auto c = f2();
  {
    TriMatrix a = TriMatrix::identity(c, 2);
    a.set_entry(1, 2, mono(c, -3));
    BreakReport rep = compute_breaks(a);
    REQUIRE(rep.pairs.size() == 1);
    CHECK(rep.pairs[0].r == Rational(3));
    CHECK(rep.pairs[0].status == PairStatus::kVerified);
  }
  {
    BreakReport rep = compute_breaks(worked_n3(c));
    REQUIRE(rep.pairs.size() == 3);
    CHECK(rep.N == 11);
    CHECK(rep.q == 2048);
    CHECK(rep.pairs[0].r == Rational(3));
    CHECK(rep.pairs[1].r == Rational(5));
    CHECK(rep.pairs[2].r == Rational(8));
    CHECK(rep.pairs[2].R == 10251);
    CHECK(rep.pairs[2].v_s == -2048 * 8 + 10251);
    for (const auto& rec : rep.pairs) CHECK(rec.status == PairStatus::kVerified);
    // monotone under nesting
    CHECK(rep.pairs[2].r > rep.pairs[1].r);
    CHECK(rep.pairs[1].r > rep.pairs[0].r);
  }
  {
    auto c3 = f3();
    TriMatrix a = TriMatrix::identity(c3, 3);
    a.set_entry(1, 2, mono(c3, -1));
    a.set_entry(2, 3, mono(c3, -2));
    BreakReport rep = compute_breaks(a);
    REQUIRE(rep.pairs.size() == 3);
    CHECK(rep.pairs[2].r == Rational(3));  // r_{1,3} = mu_{1,3}
  }
}

TEST_CASE("closed form for n = 3") {
  auto c = f2();
  {
    DefiningMatrix d = normalize_auto(worked_n3(c));
    WeightTable wt = weights_from_matrix(d.A);
    auto [N, q] = choose_N(2, 3, wt.mA);
    ClosedForm cf = closed_n3(d, wt, N, q);
    REQUIRE(cf.applicable);
    CHECK(cf.r == Rational(8));
  }
  {
    auto c3 = f3();
    TriMatrix a = TriMatrix::identity(c3, 3);
    a.set_entry(1, 2, mono(c3, -1));
    a.set_entry(2, 3, mono(c3, -2));
    DefiningMatrix d = normalize_auto(a);
    WeightTable wt = weights_from_matrix(d.A);
    auto [N, q] = choose_N(3, 3, wt.mA);
    ClosedForm cf = closed_n3(d, wt, N, q);
    REQUIRE(cf.applicable);
    CHECK(cf.r == Rational(3));
  }
  {
    // equal weights with proportional leading coefficients: not applicable
    auto c3 = f3();
    TriMatrix a = TriMatrix::identity(c3, 3);
    a.set_entry(1, 2, mono(c3, -1));
    a.set_entry(2, 3, mono(c3, -1));
    DefiningMatrix d = normalize_auto(a);
    WeightTable wt = weights_from_matrix(d.A);
    auto [N, q] = choose_N(3, 3, wt.mA);
    CHECK_FALSE(closed_n3(d, wt, N, q).applicable);
  }
}

TEST_CASE("fractional break through corner cancellation") {
  // Over F_3 with a12 = t^2, a23 = t^5, the corner entry 2 t^7 cancels the
  // leading term of the (1,3) bracket exactly, so the break drops to
  // m12/p + m23 = 17/3: a denominator-p break.
  auto c3 = f3();
  TriMatrix a = TriMatrix::identity(c3, 3);
  a.set_entry(1, 2, mono(c3, -2));
  a.set_entry(2, 3, mono(c3, -5));
  a.set_entry(1, 3, mono(c3, -7, 2));
  BreakReport rep = compute_breaks(a);
  REQUIRE(rep.pairs.size() == 3);
  CHECK(rep.pairs[2].r == Rational(17, 3));
  CHECK(rep.pairs[2].status == PairStatus::kVerified);
  DefiningMatrix d = normalize_auto(a);
  WeightTable wt = weights_from_matrix(d.A);
  ClosedForm cf = closed_n3(d, wt, rep.N, rep.q);
  REQUIRE(cf.applicable);
  CHECK(cf.r == Rational(17, 3));
  // without the cancellation the break is the full chain weight
  a.set_entry(1, 3, mono(c3, -7, 1));
  CHECK(compute_breaks(a).pairs[2].r == Rational(7));
}

TEST_CASE("dominant corner weight: the shortcut valuation applies") {
  auto c = f2();
  TriMatrix a = worked_n3(c);
  a.set_entry(1, 3, mono(c, -9));  // mu(1,3) = m(1,3) = 9 > 3 + 5
  DefiningMatrix d = normalize_auto(a);
  WeightTable wt = weights_from_matrix(d.A);
  CHECK(wt.dominant_weight_premise(1, 3));
  BreakReport rep = compute_breaks(a);
  REQUIRE(rep.pairs.size() == 3);
  CHECK(rep.pairs[2].r == Rational(9));
  CHECK(rep.pairs[2].v_s == -rep.q * 9 + rep.pairs[2].R);
  CHECK(rep.pairs[2].status == PairStatus::kVerified);
  ClosedForm cf = closed_n3(d, wt, rep.N, rep.q);
  REQUIRE(cf.applicable);
  CHECK(cf.r == Rational(9));
}

TEST_CASE("R-independence of the computed break") {
  auto c = f2();
  DefiningMatrix d = normalize_auto(worked_n3(c));
  WeightTable wt = weights_from_matrix(d.A);
  auto [N, q] = choose_N(2, 3, wt.mA);
  WSystem ws = build_w_system(d.ctx, 3, N, d.A);
  Rational expected(8);
  for (int64_t R : {10251, 10253, 10257}) {
    KRContext kr = KRContext::make(d.ctx, 3, N, R);
    SMatrix sm = build_s_matrix(kr, ws, d.A, wt, 2 * R + 1);
    auto rec = eval_pair(sm, ws, d.A, wt, 1, 3);
    REQUIRE(rec.has_value());
    CHECK(rec->r == expected);
    CHECK(rec->failed_checks.empty());
  }
}

TEST_CASE("closed form for n = 4 agrees with the pipeline") {
  auto c3 = f3();
  TriMatrix a = TriMatrix::identity(c3, 4);
  a.set_entry(1, 2, mono(c3, -1));
  a.set_entry(2, 3, mono(c3, -2));
  a.set_entry(3, 4, mono(c3, -4, 2));
  BreakReport rep = compute_breaks(a);
  REQUIRE(rep.pairs.size() == 6);
  DefiningMatrix d = normalize_auto(a);
  WeightTable wt = weights_from_matrix(d.A);
  ClosedForm cf = closed_n4(d, wt, rep.N, rep.q);
  REQUIRE(cf.applicable);
  CHECK(cf.r == rep.pairs.back().r);
}

TEST_CASE("mu' is mu_{1,4} at e = 0 and strictly decreasing") {
  auto c3 = f3();
  Rng rng(0x414);
  for (int t = 0; t < 25; ++t) {
    RandomInstanceOptions opt;
    opt.max_m = 7;
    opt.distinct_superdiag = true;
    TriMatrix a = random_defining_matrix(rng, c3, 4, opt);
    DefiningMatrix d = normalize_auto(a);
    WeightTable wt = weights_from_matrix(d.A);
    CHECK(mu_prime_n4(wt, 3, 0) == Rational(wt.mu.at(1, 4)));
    for (int64_t e = 0; e < 8; ++e) CHECK(mu_prime_n4(wt, 3, e + 1) < mu_prime_n4(wt, 3, e));
  }
}

TEST_CASE("out-of-range pairs are skipped or range-marked") {
  auto c = f2();
  TriMatrix a = TriMatrix::identity(c, 5);
  a.set_entry(1, 2, mono(c, -3));
  a.set_entry(2, 3, mono(c, -5));
  a.set_entry(3, 4, mono(c, -1));
  a.set_entry(4, 5, mono(c, -7));
  BreakReport rep = compute_breaks(a);
  CHECK(rep.pairs.size() == 9);
  REQUIRE(rep.skipped.size() == 1);
  CHECK(rep.skipped[0] == std::pair<int, int>(1, 5));

  EngineOptions opt;
  opt.allow_unverified = true;
  BreakReport rep2 = compute_breaks(a, opt);
  CHECK(rep2.pairs.size() == 10);
  CHECK(rep2.pairs.back().status == PairStatus::kUnverifiedRange);
  // the in-range prefix agrees
  for (size_t u = 0; u < rep.pairs.size(); ++u) CHECK(rep.pairs[u].r == rep2.pairs[u].r);
}
