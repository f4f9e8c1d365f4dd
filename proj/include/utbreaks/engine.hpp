/**
 * @file utbreaks/engine.hpp
 * @brief The break pipeline: normalization of the defining matrix, the
 *        W-sequence, S_R and its bracket decomposition, per-pair break
 *        extraction, and the n=3 / n=4 closed forms.
 * @copyright Apache License 2.0
 *
 * For a totally wildly ramified extension with group UT_n(F_p) defined by
 * X^(p) A = X, the largest upper ramification break of each nested block
 * (i..j) is read off the auxiliary matrix
 *     S_R = (W_{R,N}^(p))^{-1} eta_R(A) W_{R,N-1}^(p)
 * through v(s_{R,i,j}) = -q r_{i,j} + R, valid for any admissible R and
 * j - i <= p + 1.
 */
#ifndef UTBREAKS_ENGINE_HPP
#define UTBREAKS_ENGINE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "utbreaks/kr.hpp"
#include "utbreaks/weights.hpp"

namespace utbreaks {

inline int64_t mod_pos(int64_t a, int64_t p) {
  int64_t r = a % p;
  return r < 0 ? r + p : r;
}

// ---------------------------------------------------------------------------
// Normalization (replace A by (I + xE_{i,j})^(p) A (I + xE_{i,j})^{-1} until
// every entry has only negative indices prime to p).
// ---------------------------------------------------------------------------

struct DefiningMatrix {
  TriMatrix A;       // normalized; entries are exact Laurent polynomials
  FieldRef ctx;      // coefficient field, possibly enlarged by degree p
  bool field_extended = false;
};

namespace detail {

inline std::optional<std::pair<int64_t, FieldElement>> smallest_offender(
    const LaurentSeries& a, int64_t p) {
  for (const auto& t : a.terms())
    if (t.first >= 0 || t.first % p == 0) return t;
  return std::nullopt;
}

}  // namespace detail

// One normalization pass at working precision `target_prec`. Within each
// entry, offending coefficients move strictly upward (index l < 0 with p|l
// is replaced at l/p, index l > 0 cascades to pl, index 0 is solved in the
// residue field, enlarging it when the trace obstruction is nonzero), so
// the loop terminates. Entries at smaller j-i are never touched by later
// steps. Throws precision_error if the tracked precision of some entry
// drops below 0; then a larger target_prec is needed.
//
// In the completion the cascade eliminates every index >= 0 exactly, so an
// entry whose tracked precision stays >= 0 is exact: its unknown tail lies
// inside the provably-zero range. Such entries are promoted to exact.
inline DefiningMatrix normalize(const TriMatrix& A_raw, int64_t target_prec) {
  if (!A_raw.is_unipotent()) throw std::invalid_argument("defining matrix must be unipotent");
  FieldRef ctx = A_raw.ctx();
  const int n = A_raw.n();
  const int64_t p = ctx->p();
  TriMatrix A(ctx, n, 1);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) A.set_entry(i, j, A_raw.entry(i, j).truncated(target_prec));
  bool extended = false;

  for (int d = 1; d < n; ++d) {
    for (int i = 1; i + d <= n; ++i) {
      int j = i + d;
      LaurentSeries a = A.entry(i, j);
      LaurentSeries x_acc = LaurentSeries::zero(ctx);
      int guard = 0;
      while (auto off = detail::smallest_offender(a, p)) {
        if (++guard > (1 << 22)) throw precision_error("normalization does not settle");
        auto [l, c] = *off;
        LaurentSeries x = LaurentSeries::zero(ctx);
        if (l < 0) {
          // x^p cancels c t^(-l); the residue -x reappears at l/p
          x = LaurentSeries::monomial(ctx, l / p, (-c).proot(1));
        } else if (l > 0) {
          // -x cancels; x^p cascades to pl and is eventually truncated
          x = LaurentSeries::monomial(ctx, l, c);
        } else {
          auto sol = artin_schreier_solve(-c);
          if (!sol) {
            FieldEmbedding em = extend_by_p(ctx);
            ctx = em.to;
            extended = true;
            A = embed_matrix(em, A);
            a = embed_series(em, a);
            x_acc = embed_series(em, x_acc);
            continue;  // re-read the offender over the enlarged field
          }
          x = LaurentSeries::constant(ctx, *sol);
        }
        x_acc = x_acc + x;
        a = a + x.as_image();
      }
      A.set_entry(i, j, a);
      if (x_acc.has_terms()) {
        LaurentSeries xp = x_acc.p_power(1);
        for (int m = j + 1; m <= n; ++m)
          A.set_entry(i, m, A.entry(i, m) + xp.mul(A.entry(j, m)));
        for (int l = 1; l < i; ++l)
          A.set_entry(l, j, A.entry(l, j) - x_acc.mul(A.entry(l, i)));
      }
    }
  }

  // Promote to exact (see above), or report insufficient working precision.
  // Truncated cascades leave unknown coefficients only at indices >= the
  // tracked precision, and products of those with any entry stay at index
  // >= prec - m_max; requiring every precision > m_max keeps the whole
  // negative range certified before the promotion.
  int64_t m_max = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (auto v = A.entry(i, j).valuation()) m_max = std::max(m_max, -*v);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const LaurentSeries& s = A.entry(i, j);
      if (!s.is_exact() && s.prec() <= m_max)
        throw precision_error("normalization precision exhausted at entry (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      A.set_entry(i, j, LaurentSeries::from_terms(ctx, s.terms()));
    }
  }

  // necessary condition: every superdiagonal entry survives with p nmid m
  // (indices are p-coprime by the normal form, so only vanishing can fail)
  for (int i = 1; i < n; ++i) {
    if (!A.entry(i, i + 1).has_terms())
      throw hypothesis_error("superdiagonal entry (" + std::to_string(i) + "," +
                             std::to_string(i + 1) +
                             ") vanishes under normalization; the equation cannot define a "
                             "UT_n(F_p)-extension");
  }
  return DefiningMatrix{std::move(A), ctx, extended};
}

inline void assert_normal_form(const TriMatrix& A) {
  int64_t p = A.ctx()->p();
  for (int i = 1; i <= A.n(); ++i)
    for (int j = i + 1; j <= A.n(); ++j)
      for (const auto& t : A.entry(i, j).terms())
        if (t.first >= 0 || t.first % p == 0)
          throw std::logic_error("normal form violated at (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") index " + std::to_string(t.first));
}

inline DefiningMatrix normalize_auto(const TriMatrix& A_raw) {
  int64_t span = 0;
  for (int i = 1; i <= A_raw.n(); ++i) {
    for (int j = i + 1; j <= A_raw.n(); ++j) {
      const auto& t = A_raw.entry(i, j).terms();
      if (t.empty()) continue;
      span += std::max<int64_t>(0, -t.front().first) + std::max<int64_t>(0, t.back().first);
    }
  }
  int64_t prec = 64 + A_raw.ctx()->p() * (span + 1);
  for (int attempt = 0; attempt < 12; ++attempt) {
    try {
      DefiningMatrix d = normalize(A_raw, prec);
      assert_normal_form(d.A);
      return d;
    } catch (const precision_error&) {
      prec = checked_index_mul(prec, 2);
    }
  }
  throw precision_error("normalization failed to stabilize");
}

// ---------------------------------------------------------------------------
// W sequence and S_R
// ---------------------------------------------------------------------------

inline TriMatrix iota_matrix(const TriMatrix& A, int64_t N) {
  TriMatrix r(A.ctx(), A.n(), A.diag());
  for (int i = 1; i <= A.n(); ++i) {
    for (int j = i + 1; j <= A.n(); ++j) {
      std::vector<LaurentSeries::Term> terms;
      for (const auto& [l, c] : A.entry(i, j).terms()) terms.emplace_back(l, c.proot(N));
      r.set_entry(i, j, LaurentSeries::from_terms(A.ctx(), std::move(terms),
                                                  A.entry(i, j).prec()));
    }
  }
  return r;
}

// a_R^(q/p^e) entrywise on a single series: (l, c) -> (p^(N-e) l, c^(1/p^e)).
inline LaurentSeries iota_pow(const LaurentSeries& a, int64_t N, int64_t e) {
  int64_t p = a.ctx()->p();
  int64_t scale = 1;
  for (int64_t i = 0; i < N - e; ++i) scale = checked_index_mul(scale, p);
  std::vector<LaurentSeries::Term> terms;
  terms.reserve(a.terms().size());
  for (const auto& [l, c] : a.terms())
    terms.emplace_back(checked_index_mul(scale, l), c.proot(e));
  return LaurentSeries::from_terms(a.ctx(), std::move(terms), prec_mul(a.prec(), scale));
}

// W_{R,0} = I, W_{R,e} = A_R^(p^(e-1)) W_{R,e-1}. The twist iota only takes
// p-power roots of coefficients, so the whole sequence is independent of R
// and is shared by every level. The alternative recursion
// W_{R,e} = W_{R,e-1}^(p) A_R is asserted entrywise.
struct WSystem {
  TriMatrix A_R;
  std::vector<TriMatrix> W;  // indices 0..N
  TriMatrix WpN;             // W_N^(p)
  TriMatrix WpN_inv;
  TriMatrix WpNm1;           // W_{N-1}^(p)
};

inline WSystem build_w_system(const FieldRef& ctx, int n, int64_t N, const TriMatrix& A) {
  WSystem ws;
  ws.A_R = iota_matrix(A, N);
  ws.W.reserve(static_cast<size_t>(N) + 1);
  ws.W.push_back(TriMatrix::identity(ctx, n));
  for (int64_t e = 1; e <= N; ++e) {
    TriMatrix next = ws.A_R.p_power(e - 1).mul(ws.W.back());
    TriMatrix alt = ws.W.back().p_power(1).mul(ws.A_R);
    if (!next.agrees_with(alt)) throw std::logic_error("W recursion duality violated");
    ws.W.push_back(std::move(next));
  }
  ws.WpN = ws.W[static_cast<size_t>(N)].p_power(1);
  ws.WpN_inv = ws.WpN.inverse();
  ws.WpNm1 = ws.W[static_cast<size_t>(N) - 1].p_power(1);
  return ws;
}

// ---------------------------------------------------------------------------
// Brackets a^[m], s^[m] and the derivative-like weight a'
// ---------------------------------------------------------------------------

// a^[m] = sum_l coef_l(a) binom(-l/R, m) t_R^(-ql - mR): one term per stored
// coefficient, exact whenever a is exact.
inline LaurentSeries a_bracket(const KRContext& kr, const LaurentSeries& a, int64_t m) {
  const FieldRef& f = kr.field();
  std::vector<LaurentSeries::Term> terms;
  terms.reserve(a.terms().size());
  for (const auto& [l, c] : a.terms()) {
    uint32_t b = kr.binom(-l, m);
    if (b == 0) continue;
    int64_t idx = checked_index_add(checked_index_mul(kr.q(), l),
                                    checked_index_mul(m, kr.R()));
    terms.emplace_back(idx, c * FieldElement::from_int(f, b));
  }
  int64_t prec = prec_add(prec_mul(a.prec(), kr.q()), checked_index_mul(m, kr.R()));
  return LaurentSeries::from_terms(f, std::move(terms), prec);
}

struct SMatrix {
  KRContext kr;
  TriMatrix EtaA;           // eta entrywise, per-entry caps -q mu + slack
  TriMatrix S;
  PairTable<int64_t> caps;  // eta caps used
  int64_t slack = 0;
};

// Per-entry caps keep every intermediate as sparse as the answer: by
// superadditivity of mu, the product chain loses at most q mu_{i,j}, so
// capping eta(a_{i',j'}) at -q mu_{i',j'} + slack certifies every S entry
// to precision at least -q mu_{i,j} + slack.
inline PairTable<int64_t> eta_caps(const WeightTable& wt, int64_t q, int64_t slack) {
  PairTable<int64_t> caps(wt.n, 0);
  for (int i = 1; i <= wt.n; ++i)
    for (int j = i + 1; j <= wt.n; ++j)
      caps.at(i, j) = checked_index_add(checked_index_mul(-q, wt.mu.at(i, j)), slack);
  return caps;
}

inline SMatrix build_s_matrix(const KRContext& kr, const WSystem& ws, const TriMatrix& A,
                              const WeightTable& wt, int64_t slack) {
  const FieldRef& ctx = kr.field();
  const int n = A.n();
  PairTable<int64_t> caps = eta_caps(wt, kr.q(), slack);
  auto capfn = [&caps](int i, int j) { return std::optional<int64_t>(caps.at(i, j)); };

  TriMatrix etaA(ctx, n, 0);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      etaA.set_entry(i, j, eta(kr, A.entry(i, j), caps.at(i, j)));

  TriMatrix S = ws.WpN_inv.mul(etaA.mul(ws.WpNm1, capfn), capfn);
  if (!S.is_nilpotent()) throw std::logic_error("S_R must be nilpotent");

  // entrywise identity: s_{i,j} + sum_l w^p_{N,i,l} s_{l,j}
  //                   = eta(a_{i,j}) + sum_l eta(a_{i,l}) w^p_{N-1,l,j}
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      LaurentSeries lhs = S.entry(i, j);
      LaurentSeries rhs = etaA.entry(i, j);
      for (int l = i + 1; l < j; ++l) {
        lhs = lhs + ws.WpN.entry(i, l).mul(S.entry(l, j), caps.at(i, j));
        rhs = rhs + etaA.entry(i, l).mul(ws.WpNm1.entry(l, j), caps.at(i, j));
      }
      if (!lhs.agrees_with(rhs)) throw std::logic_error("entrywise S identity violated");
    }
  }

  // second form: S = (W_N^(p))^{-1} A W_{N-1}^(p) - I with A embedded in K_R
  TriMatrix embA(ctx, n, 1);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      LaurentSeries full = iota_pow(A.entry(i, j), kr.N(), 0).truncated(caps.at(i, j)) +
                           etaA.entry(i, j);
      embA.set_entry(i, j, full);
    }
  TriMatrix S2 = TriMatrix::linear_comb(
      1, ws.WpN_inv.mul(embA.mul(ws.WpNm1, capfn), capfn), -1,
      TriMatrix::identity(ctx, n));
  if (!S2.agrees_with(S)) throw std::logic_error("second form of S_R violated");

  return SMatrix{kr, std::move(etaA), std::move(S), std::move(caps), slack};
}

// s^[m]_{i,j} = sum over i <= i' < j' <= j of
//   w*^p_{N,i,i'} a^[m]_{i',j'} w^p_{N-1,j',j};
// exact (each a^[m] is a finite sum).
inline LaurentSeries s_bracket(const KRContext& kr, const WSystem& ws, const TriMatrix& A,
                               int i, int j, int64_t m) {
  const FieldRef& ctx = kr.field();
  LaurentSeries acc = LaurentSeries::zero(ctx);
  for (int ip = i; ip < j; ++ip) {
    for (int jp = ip + 1; jp <= j; ++jp) {
      LaurentSeries term = a_bracket(kr, A.entry(ip, jp), m);
      if (ip > i) term = ws.WpN_inv.entry(i, ip).mul(term);
      if (jp < j) term = term.mul(ws.WpNm1.entry(jp, j));
      acc = acc + term;
    }
  }
  return acc;
}

// The first bracket is a twisted derivative: a^[1] = -(1/R) t_R^(-R)
// iota(a')^q; asserted for every entry during the pipeline (exact).
inline LaurentSeries a_derivative(const LaurentSeries& a) {
  std::vector<LaurentSeries::Term> terms;
  terms.reserve(a.terms().size());
  for (const auto& [l, c] : a.terms()) {
    FieldElement lc = c.ctx() ? (c * FieldElement::from_int(c.ctx(), l)) : c;
    if (!lc.is_zero()) terms.emplace_back(l, std::move(lc));
  }
  return LaurentSeries::from_terms(a.ctx(), std::move(terms), a.prec());
}

inline void assert_bracket_derivative_identity(const KRContext& kr, const LaurentSeries& a) {
  LaurentSeries lhs = a_bracket(kr, a, 1);
  int64_t p = kr.p();
  uint32_t rinv = fp::inv(static_cast<uint32_t>(mod_pos(kr.R(), p)), p);
  LaurentSeries rhs = iota_pow(a_derivative(a), kr.N(), 0)
                          .shifted(kr.R())
                          .scale_int(-static_cast<int64_t>(rinv));
  if (!lhs.agrees_with(rhs)) throw std::logic_error("a^[1] vs a' identity violated");
}

// ---------------------------------------------------------------------------
// Per-pair break extraction and the full pipeline
// ---------------------------------------------------------------------------

enum class PairStatus { kVerified, kUnverifiedRange, kHypothesisSuspect };

inline const char* status_name(PairStatus s) {
  switch (s) {
    case PairStatus::kVerified: return "verified";
    case PairStatus::kUnverifiedRange: return "unverified-range";
    case PairStatus::kHypothesisSuspect: return "hypothesis-suspect";
  }
  return "?";
}

struct PairRecord {
  int i = 0, j = 0;
  std::optional<int64_t> m;
  int64_t mu = 0;
  Rational r;
  int64_t v_s = 0;
  int64_t N = 0, q = 0, R = 0;
  PairStatus status = PairStatus::kVerified;
  std::vector<std::string> failed_checks;
};

struct BreakReport {
  int64_t p = 0;
  int k = 0;
  int n = 0;
  int64_t N = 0, q = 0;
  Rational mA;
  bool field_extended = false;
  std::vector<std::pair<int, int64_t>> level_R;       // (level d, R_d)
  std::vector<std::pair<int, int>> skipped;           // out-of-range pairs
  std::vector<PairRecord> pairs;                      // sorted by (j-i, i)
};

struct EngineOptions {
  bool allow_unverified = false;
  int64_t precision_ceiling = 64;  // max slack growth factor over p R + 1
};

// Evaluates one pair at an already-built S_R. Returns nullopt when the
// entry's precision cannot certify the detection bound -q mu + pR yet (caller doubles
// the slack); throws hypothesis_error when absence of a break term is
// certified.
inline std::optional<PairRecord> eval_pair(const SMatrix& sm, const WSystem& ws,
                                           const TriMatrix& A, const WeightTable& wt,
                                           int i, int j) {
  const int64_t q = sm.kr.q();
  const int64_t R = sm.kr.R();
  const int64_t p = sm.kr.p();
  const int d = j - i;
  const int64_t mu = wt.mu.at(i, j);
  const int64_t bound = checked_index_add(checked_index_mul(-q, mu),
                                          checked_index_mul(p, R));  // -q mu + p R
  const LaurentSeries& s = sm.S.entry(i, j);
  auto v_opt = s.valuation();
  if (!v_opt) {
    if (s.is_exact() || s.prec() >= bound)
      throw hypothesis_error("s_{R," + std::to_string(i) + "," + std::to_string(j) +
                             "} certified zero below -q mu + pR; input likely fails the "
                             "Galois-group hypothesis");
    return std::nullopt;
  }
  PairRecord rec;
  rec.i = i;
  rec.j = j;
  rec.m = wt.m.at(i, j);
  rec.mu = mu;
  rec.v_s = *v_opt;
  rec.N = sm.kr.N();
  rec.q = q;
  rec.R = R;
  rec.r = Rational(R - rec.v_s, q);

  // leading-term bound: strictly below -q mu + min(p, d) R for d >= 2,
  // equality at -q m + R for adjacent pairs
  if (d == 1) {
    int64_t want = checked_index_add(checked_index_mul(-q, *rec.m), R);
    if (rec.v_s != want) rec.failed_checks.push_back("adjacent-leading-equality");
  } else {
    int64_t lead_bound = checked_index_add(checked_index_mul(-q, mu),
                                           checked_index_mul(std::min<int64_t>(p, d), R));
    if (!(rec.v_s < lead_bound)) rec.failed_checks.push_back("leading-bound");
  }
  // below -q mu + pR the valuation must be prime to p
  if (rec.v_s < bound && mod_pos(rec.v_s, p) == 0)
    rec.failed_checks.push_back("valuation-parity");
  // the leading term comes from the first bracket: v(s) = v(s^[1])
  {
    LaurentSeries s1 = s_bracket(sm.kr, ws, A, i, j, 1);
    auto v1 = s1.valuation();
    if (!v1 || *v1 != rec.v_s) rec.failed_checks.push_back("first-bracket-valuation");
  }
  // shortcut valuation when the dominant corner weight premise holds
  if (wt.dominant_weight_premise(i, j)) {
    int64_t want = checked_index_add(checked_index_mul(-q, *wt.m.at(i, j)), R);
    if (rec.v_s != want) rec.failed_checks.push_back("dominant-weight-shortcut");
  }
  // denominator of r divides p^(d(d-1)/2)
  {
    int64_t e = static_cast<int64_t>(d) * (d - 1) / 2;
    __int128 pe = 1;
    bool fits = true;
    for (int64_t t = 0; t < e; ++t) {
      pe *= p;
      if (pe > (static_cast<__int128>(1) << 62)) { fits = false; break; }
    }
    if (fits && static_cast<__int128>(rec.r.den()) != 0 &&
        pe % static_cast<__int128>(rec.r.den()) != 0)
      rec.failed_checks.push_back("denominator");
  }

  rec.status = rec.failed_checks.empty() ? PairStatus::kVerified : PairStatus::kHypothesisSuspect;
  if (d > p + 1) rec.status = PairStatus::kUnverifiedRange;
  return rec;
}

inline BreakReport compute_breaks(const TriMatrix& A_raw, const EngineOptions& opt = {}) {
  DefiningMatrix D = normalize_auto(A_raw);
  const int n = D.A.n();
  const int64_t p = D.ctx->p();
  WeightTable wt = weights_from_matrix(D.A);
  auto [N, q] = choose_N(p, n, wt.mA);
  WSystem ws = build_w_system(D.ctx, n, N, D.A);

  BreakReport rep;
  rep.p = p;
  rep.k = D.ctx->k();
  rep.n = n;
  rep.N = N;
  rep.q = q;
  rep.mA = wt.mA;
  rep.field_extended = D.field_extended;

  PairTable<Rational> r_tab(n, Rational(0));
  for (int d = 1; d < n; ++d) {
    if (d > p + 1 && !opt.allow_unverified) {
      for (int dd = d; dd < n; ++dd)
        for (int i = 1; i + dd <= n; ++i) rep.skipped.emplace_back(i, i + dd);
      break;
    }
    Rational thr(INT64_MIN / 8);
    for (int i = 1; i + d <= n; ++i)
      thr = rational_max(thr, r_threshold(i, i + d, q, r_tab, wt.mA_block));
    int64_t R = choose_R(thr, p);
    int64_t slack0 = checked_index_add(checked_index_mul(p, R), 1);
    int64_t slack = slack0;
    std::vector<PairRecord> recs;
    while (true) {
      KRContext kr = KRContext::make(D.ctx, n, N, R);
      SMatrix sm = build_s_matrix(kr, ws, D.A, wt, slack);
      for (int i = 1; i + d <= n; ++i)
        assert_bracket_derivative_identity(kr, D.A.entry(i, i + d));
      recs.clear();
      bool need_more = false;
      for (int i = 1; i + d <= n; ++i) {
        auto rec = eval_pair(sm, ws, D.A, wt, i, i + d);
        if (!rec) {
          need_more = true;
          break;
        }
        recs.push_back(std::move(*rec));
      }
      if (!need_more) break;
      if (slack / slack0 >= opt.precision_ceiling)
        throw precision_error("precision ceiling reached at level " + std::to_string(d));
      slack = checked_index_mul(slack, 2);
    }
    rep.level_R.emplace_back(d, R);
    for (auto& rec : recs) {
      r_tab.at(rec.i, rec.j) = rec.r;
      rep.pairs.push_back(std::move(rec));
    }
  }

  // report invariants: r strictly increasing under block nesting, r <= mu
  for (auto& rec : rep.pairs) {
    if (Rational(rec.mu) < rec.r) {
      rec.failed_checks.push_back("break-exceeds-mu");
      if (rec.status == PairStatus::kVerified) rec.status = PairStatus::kHypothesisSuspect;
    }
    for (const auto& sub : rep.pairs) {
      if (&sub == &rec) continue;
      if (rec.i <= sub.i && sub.j <= rec.j) {
        if (!(sub.r < rec.r)) {
          rec.failed_checks.push_back("nesting-monotonicity");
          if (rec.status == PairStatus::kVerified) rec.status = PairStatus::kHypothesisSuspect;
          break;
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Closed forms for n = 3 and n = 4 (independent verification paths)
// ---------------------------------------------------------------------------

struct ClosedForm {
  bool applicable = false;
  Rational r;
};

// r_{1,3} = max( -(v(a^[1]_{1,3} - a_{R,1,2}^q a^[1]_{2,3}) - R)/q,
//                m12 + m23/p, m12/p + m23 ),
// valid when m12 != m23, or the leading-coefficient ratio lies outside F_p.
inline ClosedForm closed_n3(const DefiningMatrix& D, const WeightTable& wt, int64_t N,
                            int64_t q) {
  if (D.A.n() != 3) return {};
  const int64_t p = D.ctx->p();
  int64_t m12 = *wt.m.at(1, 2);
  int64_t m23 = *wt.m.at(2, 3);
  if (m12 == m23) {
    FieldElement c12 = D.A.entry(1, 2).coef_at(-m12);
    FieldElement c23 = D.A.entry(2, 3).coef_at(-m23);
    bool ratio_in_fp = false;
    for (int64_t lam = 0; lam < p; ++lam)
      if (c12 == c23 * FieldElement::from_int(D.ctx, lam)) { ratio_in_fp = true; break; }
    if (ratio_in_fp) return {};
  }
  // any admissible R works; the adjacent breaks are exactly m12, m23
  PairTable<Rational> r_tab(3, Rational(0));
  r_tab.at(1, 2) = Rational(m12);
  r_tab.at(2, 3) = Rational(m23);
  int64_t R = choose_R(r_threshold(1, 3, q, r_tab, wt.mA_block), p);
  KRContext kr = KRContext::make(D.ctx, 3, N, R);

  LaurentSeries g = a_bracket(kr, D.A.entry(1, 3), 1) -
                    iota_pow(D.A.entry(1, 2), N, 0).mul(a_bracket(kr, D.A.entry(2, 3), 1));
  Rational best = rational_max(Rational(m12) + Rational(m23, p),
                               Rational(m12, p) + Rational(m23));
  if (auto v = g.valuation()) best = rational_max(best, Rational(R - *v, q));
  return {true, best};
}

// The n=4 weight bound mu'_e: the best chain weight through the block with
// exactly one factor damped by p^e. mu'_0 equals mu_{1,4} and the sequence
// is strictly decreasing in e.
inline Rational mu_prime_n4(const WeightTable& wt, int64_t p, int64_t e) {
  if (wt.n != 4) throw std::invalid_argument("mu_prime_n4 needs n = 4");
  __int128 pe128 = 1;
  for (int64_t t = 0; t < e; ++t) pe128 *= p;
  Rational inv_pe(1, static_cast<int64_t>(pe128));
  auto madd = [&](std::initializer_list<std::pair<std::optional<int64_t>, Rational>> parts)
      -> std::optional<Rational> {
    Rational s(0);
    for (const auto& [mv, scale] : parts) {
      if (!mv) return std::nullopt;
      s = s + Rational(*mv) * scale;
    }
    return s;
  };
  std::optional<Rational> cands[7] = {
      e == 0 ? madd({{wt.m.at(1, 4), Rational(1)}}) : std::nullopt,
      madd({{wt.m.at(1, 2), Rational(1)}, {wt.m.at(2, 4), inv_pe}}),
      madd({{wt.m.at(1, 2), inv_pe}, {wt.m.at(2, 4), Rational(1)}}),
      madd({{wt.m.at(1, 3), Rational(1)}, {wt.m.at(3, 4), inv_pe}}),
      madd({{wt.m.at(1, 3), inv_pe}, {wt.m.at(3, 4), Rational(1)}}),
      madd({{wt.m.at(1, 2), inv_pe}, {wt.m.at(2, 3), Rational(1)}, {wt.m.at(3, 4), Rational(1)}}),
      madd({{wt.m.at(1, 2), Rational(1)}, {wt.m.at(2, 3), Rational(1)}, {wt.m.at(3, 4), inv_pe}})};
  std::optional<Rational> best;
  for (const auto& c : cands)
    if (c && (!best || *best < *c)) best = c;
  return *best;  // the full superdiagonal chain is always finite
}

// r_{1,4} = max( -(v(sum_{e<e0} a'_e + sum_{e<e0} a''_e) - R)/q, mu'_{e0} ),
// where e0 is the least e >= 1 with v(a'_e) = -q mu'_e + R.
inline ClosedForm closed_n4(const DefiningMatrix& D, const WeightTable& wt, int64_t N,
                            int64_t q) {
  if (D.A.n() != 4) return {};
  const int64_t p = D.ctx->p();
  // admissible R from mu upper bounds on the level-2 breaks
  PairTable<Rational> r_ub(4, Rational(0));
  r_ub.at(1, 2) = Rational(*wt.m.at(1, 2));
  r_ub.at(2, 3) = Rational(*wt.m.at(2, 3));
  r_ub.at(3, 4) = Rational(*wt.m.at(3, 4));
  r_ub.at(1, 3) = Rational(wt.mu.at(1, 3));
  r_ub.at(2, 4) = Rational(wt.mu.at(2, 4));
  int64_t R = choose_R(r_threshold(1, 4, q, r_ub, wt.mA_block), p);
  KRContext kr = KRContext::make(D.ctx, 4, N, R);

  auto br = [&](int i, int j) { return a_bracket(kr, D.A.entry(i, j), 1); };
  auto aR = [&](int i, int j, int64_t e) { return iota_pow(D.A.entry(i, j), N, e); };

  // running sums of a'_e and a''_e for e < e0
  LaurentSeries sum_prior = LaurentSeries::zero(D.ctx);
  {
    LaurentSeries a0 = br(1, 4) - aR(1, 2, 0).mul(br(2, 4)) -
                       (aR(1, 3, 0) - aR(1, 2, 0).mul(aR(2, 3, 0))).mul(br(3, 4));
    sum_prior = a0;  // a''_0 = 0
  }
  LaurentSeries sum12 = LaurentSeries::zero(D.ctx);  // sum_{e'=1..e} aR(1,2,e')
  LaurentSeries sum23 = LaurentSeries::zero(D.ctx);
  LaurentSeries sum34_prev = LaurentSeries::zero(D.ctx);  // sum_{e'=1..e-1} aR(3,4,e')

  for (int64_t e = 1; e <= N - 1; ++e) {
    sum12 = sum12 + aR(1, 2, e);
    sum23 = sum23 + aR(2, 3, e);
    LaurentSeries ape = br(1, 3).mul(aR(3, 4, e)) + br(1, 2).mul(aR(2, 4, e)) -
                        aR(1, 3, e).mul(br(3, 4)) +
                        aR(1, 2, e).mul(aR(2, 3, 0).mul(br(3, 4)) - br(2, 4)) -
                        aR(1, 2, 0).mul(br(2, 3)).mul(aR(3, 4, e));
    LaurentSeries appe = aR(1, 2, e).mul(sum23).mul(br(3, 4)) -
                         sum12.mul(br(2, 3)).mul(aR(3, 4, e)) -
                         aR(1, 2, e).mul(br(2, 3)).mul(sum34_prev);
    Rational mp = mu_prime_n4(wt, p, e);
    if (auto v = ape.valuation()) {
      if (Rational(*v) == Rational(-q) * mp + Rational(R)) {
        // e0 found
        Rational best = mp;
        if (auto vs = sum_prior.valuation()) best = rational_max(best, Rational(R - *vs, q));
        return {true, best};
      }
    }
    sum_prior = sum_prior + ape + appe;
    sum34_prev = sum34_prev + aR(3, 4, e);
  }
  return {};
}

}  // namespace utbreaks

#endif  // UTBREAKS_ENGINE_HPP
