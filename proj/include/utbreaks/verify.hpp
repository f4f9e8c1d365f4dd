/**
 * @file utbreaks/verify.hpp
 * @brief The `verify` command: executes the invariant suites of every
 *        module against one instance plus seeded random perturbations and
 *        prints per-invariant pass/fail counts.
 * @copyright Apache License 2.0
 */
#ifndef UTBREAKS_VERIFY_HPP
#define UTBREAKS_VERIFY_HPP

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "utbreaks/gen.hpp"
#include "utbreaks/report.hpp"

namespace utbreaks {

struct CheckResult {
  std::string name;
  int64_t pass = 0;
  int64_t fail = 0;
};

class VerifyRun {
 public:
  VerifyRun(Instance inst, CliFlags flags) : inst_(std::move(inst)), flags_(flags) {}

  void run() {
    ctx_ = inst_.make_ctx();
    a_raw_ = inst_.matrix(ctx_);
    field_checks();
    laurent_checks();
    trimatrix_checks();
    weights_checks();
    kr_checks();
    engine_checks();
    roundtrip_checks();
  }

  const std::vector<CheckResult>& results() const { return results_; }
  const std::vector<std::string>& notes() const { return notes_; }

  bool all_passed() const {
    for (const auto& c : results_)
      if (c.fail != 0) return false;
    return true;
  }

 private:
  void check(const std::string& name, bool ok) {
    for (auto& c : results_) {
      if (c.name == name) {
        ok ? ++c.pass : ++c.fail;
        return;
      }
    }
    results_.push_back(CheckResult{name, ok ? 1 : 0, ok ? 0 : 1});
  }

  int64_t trials() const { return flags_.trials; }

  // -- coeff-field ----------------------------------------------------------
  void field_checks() {
    Rng rng(flags_.seed ^ 0xf1e1dULL);
    int64_t p = ctx_->p();
    for (int64_t t = 0; t < trials(); ++t) {
      FieldElement a = random_element(rng, ctx_);
      int64_t e = static_cast<int64_t>(rng.below(3));
      check("field.proot_roundtrip", a.proot(e).frobenius(e) == a);

      FieldElement y = random_element(rng, ctx_);
      auto sol = artin_schreier_solve(y);
      if (sol) {
        check("field.artin_schreier", sol->frobenius(1) - *sol == y);
      } else {
        check("field.artin_schreier", y.trace() != 0);
      }

      FieldElement b = random_element(rng, ctx_);
      FieldElement c = random_element(rng, ctx_);
      check("field.axioms", (a + b) * c == a * c + b * c && (a * b) * c == a * (b * c) &&
                                a + b == b + a);
      if (!b.is_zero()) check("field.axioms", b * b.inverse() == FieldElement::one(ctx_));
    }
    (void)p;
  }

  // -- laurent ---------------------------------------------------------------
  void laurent_checks() {
    Rng rng(flags_.seed ^ 0x1a03eULL);
    for (int64_t t = 0; t < trials(); ++t) {
      LaurentSeries x = random_unit_series(rng, ctx_, rng.range(-8, 0), 8, 4);
      LaurentSeries y = random_unit_series(rng, ctx_, rng.range(-8, 0), 8, 4);
      check("laurent.val_mul",
            (x * y).valuation_or_throw() == x.valuation_or_throw() + y.valuation_or_throw());
      LaurentSeries s = x + y;
      int64_t lb = std::min(x.valuation_or_throw(), y.valuation_or_throw());
      bool ok = s.valuation_lower_bound() >= lb;
      if (x.valuation_or_throw() != y.valuation_or_throw())
        ok = ok && s.valuation_or_throw() == lb;
      check("laurent.val_add_min", ok);

      LaurentSeries u = random_unit_series(rng, ctx_, rng.range(-5, 3), 12, 4, 14);
      check("laurent.invert_roundtrip", u.invert().invert().agrees_with(u));
      check("laurent.invert_identity",
            u.mul(u.invert())
                .agrees_with(LaurentSeries::constant(ctx_, FieldElement::one(ctx_),
                                                     u.prec() - 2 * u.valuation_or_throw())));

      LaurentSeries z = random_series(rng, ctx_, -6, 6, 4, 20);
      check("laurent.p_power_compose", z.p_power(2) == z.p_power(1).p_power(1));
    }
  }

  // -- trimatrix: the ten-assertion valuation suite and the filtration ------
  void trimatrix_checks() {
    Rng rng(flags_.seed ^ 0x3a3a3ULL);
    int64_t p = ctx_->p();
    for (int64_t t = 0; t < trials(); ++t) {
      int n = static_cast<int>(rng.range(2, 5));
      TriMatrix x = random_ftn(rng, ctx_, n, -9, 9);
      TriMatrix y = random_ftn(rng, ctx_, n, -9, 9);

      TriMatrix diag(ctx_, n, static_cast<uint32_t>(rng.below(static_cast<uint64_t>(p))));
      check("trimatrix.valuation.diag_infinite", !diag.val().has_value());
      check("trimatrix.valuation.tilde_dominates", mv_le(x.val(), x.val(true)));
      {
        int64_t ci = rng.range(0, p - 1), cj = rng.range(0, p - 1);
        TriMatrix comb = TriMatrix::linear_comb(ci, x, cj, y);
        check("trimatrix.valuation.linear_comb", mv_le(mv_min(x.val(), y.val()), comb.val()) &&
                                         mv_le(mv_min(x.val(true), y.val(true)), comb.val(true)));
      }
      check("trimatrix.valuation.frobenius_scaling",
            x.p_power(1).val() == mv_scale(x.val(), Rational(p)) &&
                x.p_power(1).val(true) == mv_scale(x.val(true), Rational(p)));
      {
        TriMatrix xy = x * y;
        check("trimatrix.valuation.product_min", mv_le(mv_min(x.val(), y.val()), xy.val()) &&
                                       mv_le(mv_min(x.val(true), y.val(true)), xy.val(true)));
      }
      {
        TriMatrix xn = random_ftn(rng, ctx_, n, -9, 9, 0u);
        TriMatrix yn = random_ftn(rng, ctx_, n, -9, 9, 0u);
        check("trimatrix.valuation.nilpotent_factor",
              mv_le(mv_min(xn.val(), y.val(true)), (xn * y).val()) &&
                  mv_le(mv_min(xn.val(), y.val(true)), (y * xn).val()));
        check("trimatrix.valuation.nilpotent_pair", mv_le(mv_min(xn.val(true), yn.val(true)), (xn * yn).val()));
        // (x): scalar multiples of nilpotents
        int64_t cval = rng.range(-6, 6);
        LaurentSeries gamma = random_unit_series(rng, ctx_, cval, cval + 5, 3);
        MatVal lhs = xn.scale_series(gamma).val();
        MatVal rhs = mv_add(xn.val(), rational_min(Rational(cval, n - 1), Rational(cval)));
        check("trimatrix.valuation.scalar_shift", mv_le(rhs, lhs));
        if (n > 2) {
          MatVal lhs_t = xn.scale_series(gamma).val(true);
          MatVal rhs_t = mv_add(xn.val(true), rational_min(Rational(cval, n - 2), Rational(cval)));
          check("trimatrix.valuation.scalar_shift", mv_le(rhs_t, lhs_t));
        }
      }
      {
        TriMatrix xu = random_ftn(rng, ctx_, n, -9, 9, 1u);
        if (mv_lt(y.val(), xu.val())) {
          check("trimatrix.valuation.unit_factor",
                (xu * y).val() == y.val() && (y * xu).val() == y.val());
        }
        if (mv_lt(y.val(true), xu.val(true))) {
          check("trimatrix.valuation.inverse",
                (xu * y).val(true) == y.val(true) && (y * xu).val(true) == y.val(true));
        }
        TriMatrix xi = xu.inverse();
        check("trimatrix.valuation.inverse",
              xi.val() == xu.val() && xi.val(true) == xu.val(true));
        // inverse against the partition-sum oracle
        bool oracle_ok = true;
        for (int i = 1; i <= n; ++i)
          for (int j = i + 1; j <= n; ++j)
            oracle_ok = oracle_ok && xi.entry(i, j).agrees_with(inv_entry_oracle(xu, i, j));
        check("trimatrix.inverse_oracle", oracle_ok);
      }
      {
        int n27 = static_cast<int>(rng.range(2, 4));
        PairTable<Rational> nu = random_admissible_nu(rng, n27, 6);
        TriMatrix h1 = random_h_member(rng, ctx_, n27, nu, false);
        TriMatrix h2 = random_h_member(rng, ctx_, n27, nu, false);
        check("trimatrix.filtration.subgroup",
              h_member(h1 * h2, nu, false) && h_member(h1.inverse(), nu, false));
        TriMatrix g = random_h_member(rng, ctx_, n27, nu, true);
        check("trimatrix.filtration.strict_subgroup",
              h_member(g, nu, true) && h_member(h1 * g * h1.inverse(), nu, true));
        // (iv): XY and X agree entrywise modulo valuation > -nu
        TriMatrix xy = h1 * g;
        bool cong = true;
        for (int i = 1; i <= n27; ++i) {
          for (int j = i + 1; j <= n27; ++j) {
            LaurentSeries diff = xy.entry(i, j) - h1.entry(i, j);
            if (auto v = diff.valuation())
              cong = cong && Rational(-*v) < nu.at(i, j);
          }
        }
        check("trimatrix.filtration.congruence", cong);
      }
    }
  }

  // -- weights ----------------------------------------------------------------
  void weights_checks() {
    Rng rng(flags_.seed ^ 0x3e164ULL);
    for (int64_t t = 0; t < trials(); ++t) {
      int n = static_cast<int>(rng.range(3, 6));
      WeightMap m = random_weight_map(rng, n, 20);
      auto dp = mu_dp(m, n);
      auto oracle = mu_enum_oracle(m, n);
      bool eq = true, superadd = true, dominates = true;
      for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
          eq = eq && dp.at(i, j) == oracle.at(i, j);
          if (m.at(i, j)) dominates = dominates && dp.at(i, j) >= *m.at(i, j);
          for (int l = i + 1; l < j; ++l)
            superadd = superadd && dp.at(i, j) >= dp.at(i, l) + dp.at(l, j);
        }
      }
      check("weights.mu_dp_vs_enum", eq);
      check("weights.mu_superadditive", superadd);
      check("weights.mu_dominates_m", dominates);
    }
  }

  // -- kr-extension -----------------------------------------------------------
  void kr_checks() {
    Rng rng(flags_.seed ^ 0x4c0deULL);
    int64_t p = ctx_->p();
    // small context: the identities are R- and N-uniform
    int64_t N = 2;
    int64_t R = choose_R(Rational(4), p);
    KRContext kr = KRContext::make(ctx_, 2, N, R, 40 * R);
    check("kr.defining_relation", true);  // throws in make() on failure
    for (int64_t t = 0; t < trials(); ++t) {
      int64_t l1 = rng.range(-6, 6), l2 = rng.range(-6, 6);
      LaurentSeries prod = t_power(kr, l1).mul(t_power(kr, l2));
      check("kr.t_power_multiplicative", prod.agrees_with(t_power(kr, l1 + l2)));

      int64_t l = rng.range(-30, 30);
      int64_t m = rng.range(0, p - 1);
      // degree-m falling factorial at l/R evaluated directly in F_p
      uint32_t z = static_cast<uint32_t>(
          mod_pos(l, p) * fp::inv(static_cast<uint32_t>(mod_pos(R, p)), p) % p);
      uint32_t ff = 1;
      for (int64_t i = 0; i < m; ++i)
        ff = fp::mul(ff, static_cast<uint32_t>(mod_pos(static_cast<int64_t>(z) - i, p)), p);
      for (int64_t i = 1; i <= m; ++i)
        ff = fp::mul(ff, fp::inv(static_cast<uint32_t>(i % p), p), p);
      check("kr.binom_falling_factorial", padic_binom(l, m, p, R) == ff);

      // embed is a ring map on random pairs
      LaurentSeries x = random_series(rng, ctx_, -3, 3, 2, 10);
      LaurentSeries y = random_series(rng, ctx_, -3, 3, 2, 10);
      check("kr.embed_multiplicative",
            embed(kr, x.mul(y)).agrees_with(embed(kr, x).mul(embed(kr, y))));
      check("kr.iota_preserves_indices",
            iota(kr, x).valuation_lower_bound() == x.valuation_lower_bound());
      // eta agrees with embed(x) - iota(x)^q, and with p_power(iota(x), N)
      LaurentSeries via_embed = embed(kr, x) - iota_pow_q(kr, x);
      check("kr.eta_compositional", eta(kr, x).agrees_with(via_embed));
      check("kr.iota_pow_shortcut",
            iota_pow_q(kr, x).agrees_with(iota(kr, x).p_power(N)));
    }
    for (int64_t l = 1; l <= 12; ++l) {
      if (l % p == 0) continue;
      int64_t lead = kr.q() * l + R;
      LaurentSeries e = eta(kr, LaurentSeries::monomial(ctx_, l, FieldElement::one(ctx_)),
                            lead + 2 * R);
      uint32_t expect = static_cast<uint32_t>(
          mod_pos(-l, p) * fp::inv(static_cast<uint32_t>(mod_pos(R, p)), p) % p);
      check("kr.eta_leading_coefficient",
            e.valuation_or_throw() == lead &&
                e.coef_at(lead) == FieldElement::from_int(ctx_, expect));
    }
  }

  // -- breaks-engine ------------------------------------------------------------
  void engine_checks() {
    DefiningMatrix D = normalize_auto(a_raw_);
    const int n = D.A.n();
    const int64_t p = D.ctx->p();
    WeightTable wt = weights_from_matrix(D.A);
    bool nf_ok = true;
    try {
      assert_normal_form(D.A);
    } catch (const std::logic_error&) {
      nf_ok = false;
    }
    check("engine.normal_form", nf_ok);
    auto [N, q] = choose_N(p, n, wt.mA);
    {
      // minimality: the strict inequality holds at N and fails at N-1
      int64_t h = static_cast<int64_t>(n) * (n - 1) / 2;
      Rational bound = Rational(n) * (Rational(powi(p, h)) + Rational(1)) * wt.mA + Rational(p);
      check("weights.choose_N_minimal", Rational(powi(p, N - h)) > bound &&
                                            !(Rational(powi(p, N - 1 - h)) > bound));
    }
    WSystem ws = build_w_system(D.ctx, n, N, D.A);
    check("engine.w_duality", true);  // asserted inside build_w_system

    PairTable<Rational> r_tab(n, Rational(0));
    std::vector<PairRecord> all;
    int64_t top_R = 0;
    int top_d = 0;
    for (int d = 1; d < n; ++d) {
      if (d > p + 1 && !flags_.allow_unverified) break;
      Rational thr(INT64_MIN / 8);
      for (int i = 1; i + d <= n; ++i)
        thr = rational_max(thr, r_threshold(i, i + d, q, r_tab, wt.mA_block));
      int64_t R = choose_R(thr, p);
      int64_t slack0 = checked_index_add(checked_index_mul(p, R), 1);
      int64_t slack = slack0;
      std::vector<PairRecord> recs;
      for (;;) {
        KRContext kr = KRContext::make(D.ctx, n, N, R);
        check("kr.defining_relation", true);
        SMatrix sm = build_s_matrix(kr, ws, D.A, wt, slack);
        check("engine.s_identities", true);  // asserted inside
        recs.clear();
        bool need_more = false;
        for (int i = 1; i + d <= n; ++i) {
          auto rec = eval_pair(sm, ws, D.A, wt, i, i + d);
          if (!rec) { need_more = true; break; }
          recs.push_back(std::move(*rec));
        }
        if (!need_more) {
          per_level_identities(sm, ws, D, wt, d);
          // the break formula holds for the sub-pairs at this level's R too
          for (int l = 1; l <= n; ++l) {
            for (int mI = l + 1; mI <= n; ++mI) {
              if (mI - l >= d) continue;
              auto v = sm.S.entry(l, mI).valuation();
              check("engine.cross_level_s_valuation",
                    v && Rational(*v) == Rational(-q) * r_tab.at(l, mI) + Rational(R));
            }
          }
          break;
        }
        if (slack / slack0 >= flags_.precision_ceiling)
          throw precision_error("precision ceiling reached in verify");
        slack = checked_index_mul(slack, 2);
      }
      top_R = R;
      top_d = d;
      for (auto& rec : recs) {
        for (const auto& f : rec.failed_checks)
          notes_.push_back("pair (" + std::to_string(rec.i) + "," + std::to_string(rec.j) +
                           ") failed " + f);
        check("engine.pair_sanity", rec.failed_checks.empty());
        r_tab.at(rec.i, rec.j) = rec.r;
        all.push_back(rec);
      }
    }

    // nesting monotonicity and r <= mu over the collected report
    for (const auto& rec : all) {
      check("engine.break_le_mu", !(Rational(rec.mu) < rec.r));
      for (const auto& sub : all) {
        if (&sub == &rec) continue;
        if (rec.i <= sub.i && sub.j <= rec.j) check("engine.nesting_monotonic", sub.r < rec.r);
      }
    }

    // R-independence of the top level: three admissible R including a
    // non-congruent one
    if (!all.empty() && top_d > 0) {
      std::vector<int64_t> rs;
      int64_t r2 = choose_R(Rational(top_R), p);
      rs.push_back(r2);
      int64_t r3 = choose_R(Rational(r2), p);
      // a residue change mod p is only possible for p > 2 (for p = 2 every
      // admissible R is odd)
      if (p > 2)
        while (mod_pos(r3, p) == mod_pos(top_R, p)) r3 = choose_R(Rational(r3), p);
      rs.push_back(r3);
      for (int64_t R2 : rs) {
        KRContext kr2 = KRContext::make(D.ctx, n, N, R2);
        int64_t slack2 = checked_index_add(checked_index_mul(p, R2), 1);
        SMatrix sm2 = build_s_matrix(kr2, ws, D.A, wt, slack2);
        for (const auto& rec : all) {
          if (rec.j - rec.i != top_d) continue;
          auto rec2 = eval_pair(sm2, ws, D.A, wt, rec.i, rec.j);
          check("engine.r_independence", rec2 && rec2->r == rec.r);
        }
      }
      // transport under congruent R: s^[m] coefficients move pl + mR' -> pl + mR
      // for congruent R = R' + p, m < p
      {
        KRContext kr_old = KRContext::make(D.ctx, n, N, top_R);
        int64_t Rp = top_R + p;
        KRContext kr_new = KRContext::make(D.ctx, n, N, Rp);
        for (const auto& rec : all) {
          if (rec.j - rec.i != top_d) continue;
          for (int64_t m = 1; m < p; ++m) {
            LaurentSeries sm_old = s_bracket(kr_old, ws, D.A, rec.i, rec.j, m);
            LaurentSeries sm_new = s_bracket(kr_new, ws, D.A, rec.i, rec.j, m);
            check("engine.congruent_R_transport",
                  sm_new.agrees_with(sm_old.shifted(m * (Rp - top_R))));
          }
        }
      }
    }

    // closed forms agree with the pipeline where applicable
    if (n == 3 && !all.empty()) {
      ClosedForm cf = closed_n3(D, wt, N, q);
      if (cf.applicable) {
        check("engine.closed_n3_agreement", cf.r == r_tab.at(1, 3));
      } else {
        notes_.push_back("closed_n3 not applicable (weight/coefficient conditions fail)");
      }
    }
    if (n == 4 && static_cast<int>(all.size()) == 6) {
      ClosedForm cf = closed_n4(D, wt, N, q);
      if (cf.applicable) {
        check("engine.closed_n4_agreement", cf.r == r_tab.at(1, 4));
      } else {
        notes_.push_back("closed_n4 not applicable (no e0 with equality)");
      }
    }

    // coefficient-field stability: identical numerics after extend_by_p
    {
      FieldEmbedding em = extend_by_p(D.ctx);
      TriMatrix a_big = embed_matrix(em, a_raw_.ctx()->same(*D.ctx) ? a_raw_ : D.A);
      EngineOptions opt;
      opt.allow_unverified = flags_.allow_unverified;
      opt.precision_ceiling = flags_.precision_ceiling;
      BreakReport rep_small = compute_breaks(a_raw_, opt);
      BreakReport rep_big = compute_breaks(a_big, opt);
      bool same = rep_small.pairs.size() == rep_big.pairs.size();
      for (size_t u = 0; same && u < rep_small.pairs.size(); ++u) {
        const auto& x = rep_small.pairs[u];
        const auto& y = rep_big.pairs[u];
        same = x.i == y.i && x.j == y.j && x.r == y.r && x.v_s == y.v_s && x.q == y.q &&
               x.R == y.R && x.m == y.m && x.mu == y.mu;
      }
      check("engine.field_stability", same);
    }
  }

  static int64_t powi(int64_t p, int64_t e) {
    __int128 r = 1;
    for (int64_t i = 0; i < e; ++i) {
      r *= p;
      if (r > (static_cast<__int128>(1) << 62)) throw overflow_error("powi overflow");
    }
    return static_cast<int64_t>(r);
  }

  // identities quantified per level: bracket decomposition, support
  // congruence, W/S valuation bounds, a^[1] vs a'
  void per_level_identities(const SMatrix& sm, const WSystem& ws, const DefiningMatrix& D,
                            const WeightTable& wt, int d) {
    const int n = D.A.n();
    const int64_t p = sm.kr.p();
    const int64_t q = sm.kr.q();
    const int64_t R = sm.kr.R();
    int64_t m2_eq = 0, m2_gt = 0;
    for (int i = 1; i + d <= n; ++i) {
      int j = i + d;
      // sum_{m=1..p} s^[m] matches S below the omitted-tail precision
      LaurentSeries sum = LaurentSeries::zero(D.ctx);
      for (int64_t m = 1; m <= p; ++m) {
        LaurentSeries smm = s_bracket(sm.kr, ws, D.A, i, j, m);
        bool support_ok = true;
        for (const auto& t : smm.terms())
          support_ok = support_ok && mod_pos(t.first - m * R, p) == 0;
        check("engine.bracket_support_congruence", support_ok);
        check("engine.bracket_lower_bound",
              smm.valuation_lower_bound() >= -q * wt.mu.at(i, j) + m * R);
        sum = sum + smm;
      }
      int64_t tail = checked_index_add(checked_index_mul(-q, wt.mu.at(i, j)),
                                       checked_index_mul(p + 1, R));
      check("engine.bracket_sum_matches_S",
            sum.truncated(tail).agrees_with(sm.S.entry(i, j).truncated(tail)));

      const LaurentSeries& a = D.A.entry(i, j);
      if (a.has_terms()) {
        int64_t m_ij = -a.valuation_or_throw();
        LaurentSeries a0 = a_bracket(sm.kr, a, 0);
        check("engine.a_bracket_zero", a0.agrees_with(iota_pow(a, sm.kr.N(), 0)));
        LaurentSeries a1 = a_bracket(sm.kr, a, 1);
        check("engine.first_bracket_leading", a1.valuation_or_throw() == -q * m_ij + R);
        LaurentSeries ap = a_derivative(a);
        check("engine.derivative_valuation", ap.valuation_or_throw() == -m_ij);
        assert_bracket_derivative_identity(sm.kr, a);
        check("engine.bracket_vs_derivative", true);
        LaurentSeries a2 = a_bracket(sm.kr, a, 2);
        if (a2.valuation() && *a2.valuation() == -q * m_ij + 2 * R)
          ++m2_eq;
        else
          ++m2_gt;
        check("engine.a_bracket_m2_lower_bound",
              a2.valuation_lower_bound() >= -q * m_ij + 2 * R);
      }
      // S-entry bounds: >= -q mu + R in general, equality with m on the superdiagonal
      const LaurentSeries& s = sm.S.entry(i, j);
      check("engine.s_lower_bound",
            s.valuation_lower_bound() >= -q * wt.mu.at(i, j) + R);
      if (d == 1)
        check("engine.adjacent_s_valuation",
              s.valuation_or_throw() == -q * *wt.m.at(i, j) + R);
      // W-entry bounds on a sample of e values
      for (int64_t e : {static_cast<int64_t>(1), sm.kr.N() - 1, sm.kr.N()}) {
        if (e < 1) continue;
        int64_t pe = powi(p, e - 1);
        const LaurentSeries& w = ws.W[static_cast<size_t>(e)].entry(i, j);
        int64_t bound = -pe * wt.mu.at(i, j);
        check("engine.w_entry_bound", w.valuation_lower_bound() >= bound);
        bool equality = w.valuation() && *w.valuation() == bound;
        bool m_eq_mu = wt.m.at(i, j) && *wt.m.at(i, j) == wt.mu.at(i, j);
        check("engine.w_entry_equality_iff", equality == m_eq_mu);
      }
    }
    if (m2_eq + m2_gt > 0)
      notes_.push_back("a^[2] leading equality observed " + std::to_string(m2_eq) + "/" +
                       std::to_string(m2_eq + m2_gt) + " times at level " + std::to_string(d));
  }

  void roundtrip_checks() {
    check("instance.format_parse_roundtrip",
          format_instance(parse_instance(format_instance(inst_))) == format_instance(inst_));
    Rng rng(flags_.seed ^ 0x60147ULL);
    for (int64_t t = 0; t < std::min<int64_t>(trials(), 10); ++t) {
      int n = static_cast<int>(rng.range(2, 4));
      TriMatrix a = random_defining_matrix(rng, ctx_, n);
      Instance gen;
      gen.p = inst_.p;
      gen.k = inst_.k;
      gen.modulus = inst_.modulus;
      gen.n = n;
      for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
          if (!a.entry(i, j).has_terms()) continue;
          Instance::Entry e;
          e.i = i;
          e.j = j;
          for (const auto& [l, c] : a.entry(i, j).terms()) e.terms.emplace_back(l, c.coords());
          gen.entries.push_back(std::move(e));
        }
      }
      std::string f = format_instance(gen);
      check("instance.format_parse_roundtrip", format_instance(parse_instance(f)) == f);
    }
  }

  Instance inst_;
  CliFlags flags_;
  FieldRef ctx_;
  TriMatrix a_raw_;
  std::vector<CheckResult> results_;
  std::vector<std::string> notes_;
};

inline CliResult run_verify(const std::string& instance_text, const CliFlags& flags) {
  CliResult res;
  try {
    Instance inst = parse_instance(instance_text);
    VerifyRun vr(std::move(inst), flags);
    vr.run();
    std::ostringstream o;
    for (const auto& c : vr.results())
      o << "invariant " << c.name << " pass=" << c.pass << " fail=" << c.fail << "\n";
    for (const auto& nline : vr.notes()) o << "# note: " << nline << "\n";
    o << (vr.all_passed() ? "verify: all invariants passed\n" : "verify: FAILURES present\n");
    res.out = o.str();
    res.exit_code = vr.all_passed() ? kExitOk : 1;
  } catch (const parse_error& e) {
    res.out = std::string("error: ") + e.what() + "\n";
    res.exit_code = kExitParse;
  } catch (const hypothesis_error& e) {
    res.out = std::string("error: ") + e.what() + "\n";
    res.exit_code = kExitHypothesis;
  } catch (const precision_error& e) {
    res.out = std::string("error: ") + e.what() + "\n";
    res.exit_code = kExitPrecision;
  }
  return res;
}

}  // namespace utbreaks

#endif  // UTBREAKS_VERIFY_HPP
