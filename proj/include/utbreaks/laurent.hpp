/**
 * @file utbreaks/laurent.hpp
 * @brief Sparse truncated Laurent series with rigorous precision tracking.
 * @copyright Apache License 2.0
 *
 * Convention: the ambient field fixes t with v(t) = -1, and a series is
 * x = sum of c_l * t^(-l); the stored index of a term IS its valuation.
 * `prec = P` means the coefficients at indices >= P are unknown, so a
 * series distinguishes "coefficient is zero" from "coefficient unknown".
 * prec == kPrecExact marks an exact series (a Laurent polynomial).
 */
#ifndef UTBREAKS_LAURENT_HPP
#define UTBREAKS_LAURENT_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "utbreaks/errors.hpp"
#include "utbreaks/field.hpp"

namespace utbreaks {

inline constexpr int64_t kPrecExact = INT64_MAX;
// Finite precisions are kept inside (±kPrecHuge); saturating math clamps
// downward only, which claims less knowledge and is always sound.
inline constexpr int64_t kPrecHuge = INT64_MAX / 4;

inline int64_t prec_min(int64_t a, int64_t b) { return a < b ? a : b; }

// prec + valuation-shift, saturating; exact stays exact.
inline int64_t prec_add(int64_t p, int64_t shift) {
  if (p == kPrecExact) return kPrecExact;
  __int128 s = static_cast<__int128>(p) + shift;
  if (s > kPrecHuge) return kPrecHuge;
  if (s < -static_cast<__int128>(kPrecHuge)) throw overflow_error("precision underflow");
  return static_cast<int64_t>(s);
}

inline int64_t prec_mul(int64_t p, int64_t factor) {
  if (p == kPrecExact) return kPrecExact;
  __int128 s = static_cast<__int128>(p) * factor;
  if (s > kPrecHuge) return kPrecHuge;
  if (s < -static_cast<__int128>(kPrecHuge)) throw overflow_error("precision underflow");
  return static_cast<int64_t>(s);
}

inline int64_t checked_index_add(int64_t a, int64_t b) {
  __int128 s = static_cast<__int128>(a) + b;
  if (s > kPrecHuge || s < -static_cast<__int128>(kPrecHuge))
    throw overflow_error("series index overflow");
  return static_cast<int64_t>(s);
}

inline int64_t checked_index_mul(int64_t a, int64_t b) {
  __int128 s = static_cast<__int128>(a) * b;
  if (s > kPrecHuge || s < -static_cast<__int128>(kPrecHuge))
    throw overflow_error("series index overflow");
  return static_cast<int64_t>(s);
}

class LaurentSeries {
 public:
  using Term = std::pair<int64_t, FieldElement>;

  LaurentSeries() = default;

  static LaurentSeries zero(const FieldRef& ctx, int64_t prec = kPrecExact) {
    LaurentSeries s;
    s.ctx_ = ctx;
    s.prec_ = prec;
    return s;
  }

  static LaurentSeries monomial(const FieldRef& ctx, int64_t idx, FieldElement c,
                                int64_t prec = kPrecExact) {
    LaurentSeries s = zero(ctx, prec);
    if (!c.is_zero() && idx < prec) s.t_.emplace_back(idx, std::move(c));
    return s;
  }

  static LaurentSeries constant(const FieldRef& ctx, FieldElement c,
                                int64_t prec = kPrecExact) {
    return monomial(ctx, 0, std::move(c), prec);
  }

  static LaurentSeries from_terms(const FieldRef& ctx, std::vector<Term> terms,
                                  int64_t prec = kPrecExact) {
    LaurentSeries s = zero(ctx, prec);
    s.t_ = std::move(terms);
    s.normalize();
    return s;
  }

  const FieldRef& ctx() const { return ctx_; }
  const std::vector<Term>& terms() const { return t_; }
  int64_t prec() const { return prec_; }
  bool is_exact() const { return prec_ == kPrecExact; }
  bool is_exact_zero() const { return t_.empty() && is_exact(); }
  bool has_terms() const { return !t_.empty(); }

  std::optional<int64_t> valuation() const {
    if (t_.empty()) return std::nullopt;
    return t_.front().first;
  }

  // Valuation when determined, otherwise the precision bound: in both cases
  // a certified lower bound on the true valuation.
  int64_t valuation_lower_bound() const { return t_.empty() ? prec_ : t_.front().first; }

  int64_t valuation_or_throw() const {
    if (t_.empty())
      throw precision_error("valuation undetermined (zero to precision " +
                            (is_exact() ? std::string("exact") : std::to_string(prec_)) + ")");
    return t_.front().first;
  }

  FieldElement coef_at(int64_t l) const {
    if (l >= prec_)
      throw precision_error("coefficient at index " + std::to_string(l) +
                            " beyond precision " + std::to_string(prec_));
    auto it = std::lower_bound(t_.begin(), t_.end(), l,
                               [](const Term& t, int64_t v) { return t.first < v; });
    if (it != t_.end() && it->first == l) return it->second;
    return FieldElement::zero(ctx_);
  }

  LaurentSeries operator+(const LaurentSeries& o) const { return add_sub(o, false); }
  LaurentSeries operator-(const LaurentSeries& o) const { return add_sub(o, true); }

  LaurentSeries operator-() const {
    LaurentSeries r = *this;
    for (auto& t : r.t_) t.second = -t.second;
    return r;
  }

  LaurentSeries scale(const FieldElement& c) const {
    if (c.is_zero()) return zero(ctx_);  // 0 * unknown tail is exactly 0
    LaurentSeries r = *this;
    for (auto& t : r.t_) t.second = t.second * c;
    r.normalize();
    return r;
  }

  LaurentSeries scale_int(int64_t c) const { return scale(FieldElement::from_int(ctx_, c)); }

  // Product. Result precision is min(P_x + v(y), P_y + v(x)), using each
  // operand's prec as the valuation lower bound when undetermined; `cap`
  // additionally truncates the result (terms at >= cap discarded).
  LaurentSeries mul(const LaurentSeries& o, std::optional<int64_t> cap = std::nullopt) const {
    check_ctx(o);
    if (is_exact_zero() || o.is_exact_zero()) return zero(ctx_);
    int64_t rp;
    if (is_exact() && o.is_exact()) {
      rp = kPrecExact;
    } else {
      rp = prec_min(prec_add(prec_, o.valuation_lower_bound()),
                    prec_add(o.prec_, valuation_lower_bound()));
    }
    if (cap) rp = prec_min(rp, *cap);
    std::vector<Term> acc;
    acc.reserve(t_.size() * o.t_.size());
    for (const auto& a : t_) {
      for (const auto& b : o.t_) {
        int64_t idx = checked_index_add(a.first, b.first);
        if (idx >= rp) continue;
        acc.emplace_back(idx, a.second * b.second);
      }
    }
    LaurentSeries r = zero(ctx_, rp);
    r.t_ = std::move(acc);
    r.normalize();
    return r;
  }

  LaurentSeries operator*(const LaurentSeries& o) const { return mul(o); }

  // Entrywise Frobenius twist: (l, c) -> (p^e * l, c^(p^e)). Valid in
  // characteristic p because (a + O(t^P))^(p^e) = a^(p^e) + O(t^(p^e P)).
  LaurentSeries p_power(int64_t e) const {
    int64_t pe = 1;
    for (int64_t i = 0; i < e; ++i) pe = checked_index_mul(pe, ctx_->p());
    LaurentSeries r = zero(ctx_, prec_mul(prec_, pe));
    r.t_.reserve(t_.size());
    for (const auto& t : t_)
      r.t_.emplace_back(checked_index_mul(t.first, pe), t.second.frobenius(e));
    r.normalize();
    return r;
  }

  // P(x) = x^p - x.
  LaurentSeries as_image() const { return p_power(1) - *this; }

  // Multiplication by the monomial of index `delta` and coefficient 1
  // (indices and precision shift by delta).
  LaurentSeries shifted(int64_t delta) const {
    LaurentSeries r = zero(ctx_, prec_add(prec_, delta));
    r.t_.reserve(t_.size());
    for (const auto& t : t_) r.t_.emplace_back(checked_index_add(t.first, delta), t.second);
    return r;
  }

  LaurentSeries truncated(int64_t cap) const {
    LaurentSeries r = *this;
    r.prec_ = prec_min(r.prec_, cap);
    r.normalize();
    return r;
  }

  // Multiplicative inverse by geometric expansion of the unit part, to
  // propagated precision P - 2 v(x). Exact inputs with more than one term
  // need an explicit cap (their inverse has infinitely many terms).
  LaurentSeries invert(std::optional<int64_t> cap = std::nullopt) const {
    if (t_.empty()) {
      if (is_exact()) throw std::invalid_argument("inverse of exact zero series");
      throw precision_error("inverse of series with undetermined valuation");
    }
    int64_t v = t_.front().first;
    FieldElement lead_inv = t_.front().second.inverse();
    if (t_.size() == 1) {
      int64_t rp = is_exact() ? kPrecExact : prec_add(prec_, -2 * v);
      if (cap) rp = prec_min(rp, *cap);
      return monomial(ctx_, -v, lead_inv, rp);
    }
    int64_t target;
    if (is_exact()) {
      if (!cap) throw std::invalid_argument("inverse of exact multi-term series needs a cap");
      target = *cap;
    } else {
      target = prec_add(prec_, -2 * v);
      if (cap) target = prec_min(target, *cap);
    }
    // r = x * lead^{-1} t^{..}: unit with constant term 1
    LaurentSeries y0 = monomial(ctx_, -v, lead_inv);
    LaurentSeries r = mul(y0, prec_add(target, v));
    LaurentSeries u = r - constant(ctx_, FieldElement::one(ctx_), r.prec());
    int64_t target_r = checked_index_add(target, v);
    LaurentSeries sum = constant(ctx_, FieldElement::one(ctx_), target_r);
    LaurentSeries term = sum;
    int guard = 0;
    while (term.has_terms()) {
      if (++guard > (1 << 22)) throw precision_error("inverse expansion too long");
      term = -term.mul(u, target_r);
      sum = sum + term;
    }
    return y0.mul(sum, target);
  }

  // Strict equality: same precision and identical stored terms.
  bool operator==(const LaurentSeries& o) const {
    check_ctx(o);
    return prec_ == o.prec_ && t_ == o.t_;
  }
  bool operator!=(const LaurentSeries& o) const { return !(*this == o); }

  // Agreement below the joint precision bound.
  bool agrees_with(const LaurentSeries& o) const {
    check_ctx(o);
    int64_t bound = prec_min(prec_, o.prec_);
    size_t i = 0, j = 0;
    while (true) {
      while (i < t_.size() && t_[i].first >= bound) ++i;
      while (j < o.t_.size() && o.t_[j].first >= bound) ++j;
      bool ei = i == t_.size(), ej = j == o.t_.size();
      if (ei && ej) return true;
      if (ei != ej) return false;
      if (t_[i].first != o.t_[j].first || t_[i].second != o.t_[j].second) return false;
      ++i;
      ++j;
    }
  }

 private:
  LaurentSeries add_sub(const LaurentSeries& o, bool negate) const {
    check_ctx(o);
    LaurentSeries r = zero(ctx_, prec_min(prec_, o.prec_));
    r.t_.reserve(t_.size() + o.t_.size());
    size_t i = 0, j = 0;
    while (i < t_.size() || j < o.t_.size()) {
      if (j == o.t_.size() || (i < t_.size() && t_[i].first < o.t_[j].first)) {
        r.t_.push_back(t_[i++]);
      } else if (i == t_.size() || o.t_[j].first < t_[i].first) {
        r.t_.emplace_back(o.t_[j].first, negate ? -o.t_[j].second : o.t_[j].second);
        ++j;
      } else {
        FieldElement c = negate ? t_[i].second - o.t_[j].second : t_[i].second + o.t_[j].second;
        if (!c.is_zero()) r.t_.emplace_back(t_[i].first, std::move(c));
        ++i;
        ++j;
      }
    }
    r.normalize();
    return r;
  }

  void normalize() {
    if (!std::is_sorted(t_.begin(), t_.end(),
                        [](const Term& a, const Term& b) { return a.first < b.first; })) {
      std::stable_sort(t_.begin(), t_.end(),
                       [](const Term& a, const Term& b) { return a.first < b.first; });
    }
    std::vector<Term> out;
    out.reserve(t_.size());
    for (auto& t : t_) {
      if (t.first >= prec_) continue;
      if (!out.empty() && out.back().first == t.first) {
        out.back().second = out.back().second + t.second;
      } else {
        out.push_back(std::move(t));
      }
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const Term& t) { return t.second.is_zero(); }),
              out.end());
    t_ = std::move(out);
  }

  void check_ctx(const LaurentSeries& o) const {
    if (!ctx_ || !o.ctx_ || !ctx_->same(*o.ctx_))
      throw std::invalid_argument("mismatched series contexts");
  }

  FieldRef ctx_;
  std::vector<Term> t_;
  int64_t prec_ = kPrecExact;
};

}  // namespace utbreaks

#endif  // UTBREAKS_LAURENT_HPP
