/**
 * @file utbreaks/kr.hpp
 * @brief The auxiliary field K_R = K(t_R) with T = t_R^R satisfying
 *        T^q + T^(q-1) = t^R: the embedding K -> K_R, the twist iota, the
 *        defect operator eta(x) = x - iota(x)^q, and p-adic binomial
 *        coefficients mod p.
 * @copyright Apache License 2.0
 *
 * t_R is treated as a formal uniformizer-inverse (v(t_R) = -1, so
 * v(t) = -q in K_R); the expansion
 *   t^l = t_R^(ql) (1 + sum_{i>=1} binom(l/R, i) t_R^(-iR))
 * is taken as the definition of the embedding, and every identity about
 * t_R becomes a series identity checked to the precision cap.
 */
#ifndef UTBREAKS_KR_HPP
#define UTBREAKS_KR_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "utbreaks/laurent.hpp"

namespace utbreaks {

// binom(l * R^{-1}, m) mod p, where l * R^{-1} is a p-adic integer
// (gcd(R, p) = 1). Lucas' theorem needs only the first ceil(log_p(m+1))
// base-p digits, obtained from l * R^{-1} mod p^D by exact modular
// inversion.
inline uint32_t padic_binom(int64_t l, int64_t m, int64_t p, int64_t R) {
  if (m < 0) throw std::invalid_argument("padic_binom needs m >= 0");
  if (R % p == 0) throw std::invalid_argument("padic_binom needs gcd(R, p) = 1");
  if (m == 0) return 1;
  // digit count of m in base p
  __int128 pD = 1;
  int64_t mm = m;
  while (mm > 0) {
    pD *= p;
    mm /= p;
    if (pD > (static_cast<__int128>(1) << 100)) throw overflow_error("padic_binom m too large");
  }
  // R^{-1} mod p^D by extended Euclid
  __int128 t = 0, newt = 1, r = pD, newr = ((static_cast<__int128>(R) % pD) + pD) % pD;
  while (newr != 0) {
    __int128 qq = r / newr;
    __int128 tmp = t - qq * newt;
    t = newt;
    newt = tmp;
    tmp = r - qq * newr;
    r = newr;
    newr = tmp;
  }
  if (t < 0) t += pD;
  __int128 z = ((static_cast<__int128>(l) % pD) * t) % pD;
  if (z < 0) z += pD;
  // Lucas: product of digitwise small binomials
  auto binom_small = [p](uint32_t a, uint32_t b) -> uint32_t {
    if (b > a) return 0;
    uint64_t num = 1, den = 1;
    for (uint32_t i = 0; i < b; ++i) {
      num = num * ((a - i) % p) % static_cast<uint64_t>(p);
      den = den * ((i + 1) % p) % static_cast<uint64_t>(p);
    }
    return fp::mul(static_cast<uint32_t>(num), fp::inv(static_cast<uint32_t>(den), p), p);
  };
  uint32_t res = 1;
  int64_t mdig = m;
  __int128 zdig = z;
  while (mdig > 0) {
    uint32_t mb = static_cast<uint32_t>(mdig % p);
    uint32_t zb = static_cast<uint32_t>(zdig % p);
    res = fp::mul(res, binom_small(zb, mb), p);
    if (res == 0) return 0;
    mdig /= p;
    zdig /= p;
  }
  return res;
}

class KRContext {
 public:
  static KRContext make(FieldRef field, int n, int64_t N, int64_t R,
                        std::optional<int64_t> prec_cap = std::nullopt) {
    KRContext c;
    c.field_ = std::move(field);
    c.n_ = n;
    c.N_ = N;
    c.R_ = R;
    int64_t p = c.field_->p();
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (R < 1 || R % p == 0) throw std::invalid_argument("R must be positive and prime to p");
    __int128 q = 1;
    for (int64_t i = 0; i < N; ++i) {
      q *= p;
      if (q > (static_cast<__int128>(1) << 61)) throw overflow_error("q = p^N too large");
    }
    c.q_ = static_cast<int64_t>(q);
    c.prec_cap_ = prec_cap ? *prec_cap : checked_index_add(checked_index_mul(p, R), 1);
    c.check_defining_relation();
    return c;
  }

  const FieldRef& field() const { return field_; }
  int n() const { return n_; }
  int64_t p() const { return field_->p(); }
  int64_t N() const { return N_; }
  int64_t q() const { return q_; }
  int64_t R() const { return R_; }
  int64_t prec_cap() const { return prec_cap_; }

  uint32_t binom(int64_t l, int64_t m) const { return padic_binom(l, m, p(), R_); }

 private:
  void check_defining_relation() const;

  FieldRef field_;
  int n_ = 0;
  int64_t N_ = 0;
  int64_t q_ = 0;
  int64_t R_ = 0;
  int64_t prec_cap_ = 0;
};

// Expansion of t^l as a series in t_R: terms at indices -q l + i R for
// i >= 0 with coefficients binom(l/R, i), truncated below `cap`.
inline LaurentSeries t_power(const KRContext& ctx, int64_t l,
                             std::optional<int64_t> cap_opt = std::nullopt) {
  int64_t cap = cap_opt ? *cap_opt : ctx.prec_cap();
  const FieldRef& f = ctx.field();
  if (l == 0) return LaurentSeries::constant(f, FieldElement::one(f), cap);
  std::vector<LaurentSeries::Term> terms;
  int64_t base = checked_index_mul(-ctx.q(), l);
  // when l/R is a nonnegative integer the expansion is a genuine binomial:
  // all coefficients beyond index l/R vanish
  std::optional<int64_t> i_max;
  if (l > 0 && l % ctx.R() == 0) i_max = l / ctx.R();
  int64_t guard = 0;
  for (int64_t i = 0;; ++i) {
    if (i_max && i > *i_max) break;
    int64_t idx = checked_index_add(base, checked_index_mul(i, ctx.R()));
    if (idx >= cap) break;
    if (++guard > (1 << 24)) throw precision_error("t_power: cap too wide for R");
    uint32_t c = ctx.binom(l, i);
    if (c != 0) terms.emplace_back(idx, FieldElement::from_int(f, c));
  }
  return LaurentSeries::from_terms(f, std::move(terms), cap);
}

// The unique continuous ring embedding K -> K_R with t mapsto its
// expansion: the term c t^(-l) (index l) maps monomial-wise through
// t_power(-l).
inline LaurentSeries embed(const KRContext& ctx, const LaurentSeries& x,
                           std::optional<int64_t> cap_opt = std::nullopt) {
  int64_t cap = cap_opt ? *cap_opt : ctx.prec_cap();
  const FieldRef& f = ctx.field();
  if (!f->same(*x.ctx())) throw std::invalid_argument("embed: wrong coefficient field");
  int64_t prec = prec_min(cap, prec_mul(x.prec(), ctx.q()));
  std::vector<LaurentSeries::Term> terms;
  int64_t guard = 0;
  for (const auto& [l, c] : x.terms()) {
    int64_t base = checked_index_mul(ctx.q(), l);
    std::optional<int64_t> i_max;
    if (l == 0) i_max = 0;  // t^0 = 1 exactly
    if (l < 0 && (-l) % ctx.R() == 0) i_max = (-l) / ctx.R();
    for (int64_t i = 0;; ++i) {
      if (i_max && i > *i_max) break;
      int64_t idx = checked_index_add(base, checked_index_mul(i, ctx.R()));
      if (idx >= prec) break;
      if (++guard > (1 << 24)) throw precision_error("embed: cap too wide for R");
      uint32_t b = ctx.binom(-l, i);
      if (b != 0) terms.emplace_back(idx, c * FieldElement::from_int(f, b));
    }
  }
  LaurentSeries r = LaurentSeries::from_terms(f, std::move(terms), prec);
  return r;
}

// iota: t -> t_R, u -> u^(1/q) on coefficients; indices are preserved and
// the indeterminate is reinterpreted as t_R.
inline LaurentSeries iota(const KRContext& ctx, const LaurentSeries& x) {
  std::vector<LaurentSeries::Term> terms;
  terms.reserve(x.terms().size());
  for (const auto& [l, c] : x.terms()) terms.emplace_back(l, c.proot(ctx.N()));
  return LaurentSeries::from_terms(x.ctx(), std::move(terms), x.prec());
}

// iota(x)^q computed directly from x as an index-scaling: since the
// coefficients of iota(x) are q-th roots, (l, c) -> (q l, c). Identical to
// p_power(iota(x), N) but without N Frobenius round-trips per term.
inline LaurentSeries iota_pow_q(const KRContext& ctx, const LaurentSeries& x) {
  std::vector<LaurentSeries::Term> terms;
  terms.reserve(x.terms().size());
  for (const auto& [l, c] : x.terms()) terms.emplace_back(checked_index_mul(ctx.q(), l), c);
  return LaurentSeries::from_terms(x.ctx(), std::move(terms), prec_mul(x.prec(), ctx.q()));
}

// eta(x) = x - iota(x)^q in K_R: the term c t^(-l) contributes
// c binom(-l/R, i) at index q l + i R for i >= 1.
inline LaurentSeries eta(const KRContext& ctx, const LaurentSeries& x,
                         std::optional<int64_t> cap_opt = std::nullopt) {
  int64_t cap = cap_opt ? *cap_opt : ctx.prec_cap();
  const FieldRef& f = ctx.field();
  if (!f->same(*x.ctx())) throw std::invalid_argument("eta: wrong coefficient field");
  int64_t prec = prec_min(cap, prec_add(prec_mul(x.prec(), ctx.q()), ctx.R()));
  std::vector<LaurentSeries::Term> terms;
  int64_t guard = 0;
  for (const auto& [l, c] : x.terms()) {
    if (l == 0) continue;  // constants are q-th powers of their roots
    int64_t base = checked_index_mul(ctx.q(), l);
    std::optional<int64_t> i_max;
    if (l < 0 && (-l) % ctx.R() == 0) i_max = (-l) / ctx.R();
    for (int64_t i = 1;; ++i) {
      if (i_max && i > *i_max) break;
      int64_t idx = checked_index_add(base, checked_index_mul(i, ctx.R()));
      if (idx >= prec) break;
      if (++guard > (1 << 24)) throw precision_error("eta: cap too wide for R");
      uint32_t b = ctx.binom(-l, i);
      if (b != 0) terms.emplace_back(idx, c * FieldElement::from_int(f, b));
    }
  }
  return LaurentSeries::from_terms(f, std::move(terms), prec);
}

// T = t_R^R must satisfy T^q + T^(q-1) - t^R = 0 to the precision cap;
// asserted on every context build.
inline void KRContext::check_defining_relation() const {
  const FieldRef& f = field_;
  FieldElement one = FieldElement::one(f);
  LaurentSeries tq = LaurentSeries::monomial(f, checked_index_mul(-q_, R_), one);
  LaurentSeries tqm1 = LaurentSeries::monomial(f, checked_index_mul(-(q_ - 1), R_), one);
  LaurentSeries rhs = t_power(*this, R_, prec_cap_);
  LaurentSeries residual = (tq + tqm1) - rhs;
  if (residual.has_terms())
    throw std::logic_error("K_R defining relation residual nonzero");
}

}  // namespace utbreaks

#endif  // UTBREAKS_KR_HPP
