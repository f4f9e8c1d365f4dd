/**
 * @file utbreaks/trimatrix.hpp
 * @brief The ring FT_n(M) = F_p I + NT_n(M) over a series field: products,
 *        inverses, entrywise Frobenius, matrix valuations, filtration
 *        subgroup predicates.
 * @copyright Apache License 2.0
 */
#ifndef UTBREAKS_TRIMATRIX_HPP
#define UTBREAKS_TRIMATRIX_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "utbreaks/laurent.hpp"
#include "utbreaks/rational.hpp"

namespace utbreaks {

// Storage indexed by pairs 1 <= i < j <= n.
template <typename T>
class PairTable {
 public:
  PairTable() : n_(0) {}
  explicit PairTable(int n, T init = T()) : n_(n), v_(static_cast<size_t>(n * (n - 1) / 2), init) {}

  int n() const { return n_; }
  T& at(int i, int j) { return v_[idx(i, j)]; }
  const T& at(int i, int j) const { return v_[idx(i, j)]; }

 private:
  size_t idx(int i, int j) const {
    if (!(1 <= i && i < j && j <= n_)) throw std::invalid_argument("pair index out of range");
    // row-major over the strict upper triangle
    int row = i - 1;
    int off = j - i - 1;
    int before = row * (2 * n_ - row - 1) / 2;
    return static_cast<size_t>(before + off);
  }

  int n_;
  std::vector<T> v_;
};

// Matrix valuation value: exact rational, or +infinity (nullopt).
using MatVal = std::optional<Rational>;

inline bool mv_lt(const MatVal& a, const MatVal& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}
inline bool mv_le(const MatVal& a, const MatVal& b) { return !mv_lt(b, a); }
inline MatVal mv_min(const MatVal& a, const MatVal& b) { return mv_lt(a, b) ? a : b; }
inline MatVal mv_add(const MatVal& a, const Rational& c) {
  if (!a) return std::nullopt;
  return *a + c;
}
inline MatVal mv_scale(const MatVal& a, const Rational& c) {
  if (!a) return std::nullopt;
  return *a * c;
}

class TriMatrix {
 public:
  TriMatrix() = default;

  TriMatrix(FieldRef ctx, int n, uint32_t diag)
      : ctx_(std::move(ctx)), n_(n), diag_(diag % static_cast<uint32_t>(ctx_->p())),
        e_(static_cast<size_t>(n * (n - 1) / 2)) {
    if (n < 1) throw std::invalid_argument("matrix size must be >= 1");
    for (auto& s : e_) s = LaurentSeries::zero(ctx_);
  }

  static TriMatrix identity(const FieldRef& ctx, int n) { return TriMatrix(ctx, n, 1); }

  const FieldRef& ctx() const { return ctx_; }
  int n() const { return n_; }
  uint32_t diag() const { return diag_; }
  int64_t p() const { return ctx_->p(); }

  bool is_unipotent() const { return diag_ == 1; }
  bool is_nilpotent() const { return diag_ == 0; }
  bool is_invertible() const { return diag_ != 0; }

  const LaurentSeries& entry(int i, int j) const { return e_[idx(i, j)]; }
  void set_entry(int i, int j, LaurentSeries s) {
    if (!s.ctx()->same(*ctx_)) throw std::invalid_argument("entry from wrong field");
    e_[idx(i, j)] = std::move(s);
  }

  // i X + j Y with i, j in F_p (FT_n is closed under these).
  static TriMatrix linear_comb(int64_t a, const TriMatrix& x, int64_t b, const TriMatrix& y) {
    x.check_compat(y);
    int64_t p = x.p();
    auto am = ((a % p) + p) % p;
    auto bm = ((b % p) + p) % p;
    TriMatrix r(x.ctx_, x.n_, static_cast<uint32_t>((am * x.diag_ + bm * y.diag_) % p));
    for (int i = 1; i <= x.n_; ++i)
      for (int j = i + 1; j <= x.n_; ++j)
        r.set_entry(i, j, x.entry(i, j).scale_int(am) + y.entry(i, j).scale_int(bm));
    return r;
  }

  TriMatrix operator+(const TriMatrix& o) const { return linear_comb(1, *this, 1, o); }
  TriMatrix operator-(const TriMatrix& o) const { return linear_comb(1, *this, -1, o); }

  // Entrywise product formula z_{i,j} = sum_{l=i..j} x_{i,l} y_{l,j}, with
  // the common diagonal scalars included; optional per-entry caps truncate
  // each product entry (used to keep sparse intermediates bounded).
  using CapFn = std::function<std::optional<int64_t>(int, int)>;

  TriMatrix mul(const TriMatrix& o, const CapFn& caps = nullptr) const {
    check_compat(o);
    int64_t p = this->p();
    TriMatrix r(ctx_, n_,
                static_cast<uint32_t>((static_cast<uint64_t>(diag_) * o.diag_) % static_cast<uint64_t>(p)));
    for (int i = 1; i <= n_; ++i) {
      for (int j = i + 1; j <= n_; ++j) {
        std::optional<int64_t> cap = caps ? caps(i, j) : std::nullopt;
        LaurentSeries acc = o.entry(i, j).scale_int(diag_);
        acc = acc + entry(i, j).scale_int(o.diag_);
        for (int l = i + 1; l < j; ++l) acc = acc + entry(i, l).mul(o.entry(l, j), cap);
        if (cap) acc = acc.truncated(*cap);
        r.set_entry(i, j, std::move(acc));
      }
    }
    return r;
  }

  TriMatrix operator*(const TriMatrix& o) const { return mul(o); }

  // Entrywise p^e-th power; the diagonal is fixed by Fermat.
  TriMatrix p_power(int64_t e) const {
    TriMatrix r(ctx_, n_, diag_);
    for (int i = 1; i <= n_; ++i)
      for (int j = i + 1; j <= n_; ++j) r.set_entry(i, j, entry(i, j).p_power(e));
    return r;
  }

  // gamma * X for a scalar series gamma; leaves FT_n only when X is
  // nilpotent, which is the only case the valuation lemma needs.
  TriMatrix scale_series(const LaurentSeries& gamma) const {
    if (!is_nilpotent()) throw std::invalid_argument("scale_series requires a nilpotent matrix");
    TriMatrix r(ctx_, n_, 0);
    for (int i = 1; i <= n_; ++i)
      for (int j = i + 1; j <= n_; ++j) r.set_entry(i, j, entry(i, j).mul(gamma));
    return r;
  }

  // X^{-1} = d^{-1} sum_{l<n} (I - d^{-1} X)^l, the nilpotent-tail Taylor
  // expansion; for unipotent X this is sum (-1)^s (X - I)^s.
  TriMatrix inverse(const CapFn& caps = nullptr) const {
    if (diag_ == 0) throw std::invalid_argument("nilpotent matrix is not invertible");
    int64_t p = this->p();
    uint32_t u = fp::inv(diag_, p);
    TriMatrix y(ctx_, n_, 0);  // I - u X  (diagonal: 1 - u d = 0)
    for (int i = 1; i <= n_; ++i)
      for (int j = i + 1; j <= n_; ++j)
        y.set_entry(i, j, -entry(i, j).scale_int(u));
    TriMatrix acc = identity(ctx_, n_);
    TriMatrix pw = identity(ctx_, n_);
    for (int l = 1; l < n_; ++l) {
      pw = pw.mul(y, caps);
      acc = acc + pw;
    }
    TriMatrix r(ctx_, n_, u);
    for (int i = 1; i <= n_; ++i)
      for (int j = i + 1; j <= n_; ++j) r.set_entry(i, j, acc.entry(i, j).scale_int(u));
    return r;
  }

  // v_M (variant_tilde = false) or the corner-blind variant (true), as the
  // exact rational min of v(x_{i,j})/(j-i); +infinity iff diagonal.
  // Throws precision_error when an undetermined entry could be the minimum.
  MatVal val(bool variant_tilde = false) const {
    MatVal best = std::nullopt;
    std::vector<std::pair<int64_t, int>> pending;  // (prec, j-i)
    for (int i = 1; i <= n_; ++i) {
      for (int j = i + 1; j <= n_; ++j) {
        if (variant_tilde && i == 1 && j == n_) continue;
        const LaurentSeries& s = entry(i, j);
        auto v = s.valuation();
        if (v) {
          best = mv_min(best, Rational(*v, j - i));
        } else if (!s.is_exact()) {
          pending.emplace_back(s.prec(), j - i);
        }
      }
    }
    for (const auto& [prec, d] : pending) {
      Rational lb(prec, d);
      if (!best || mv_lt(MatVal(lb), best))
        throw precision_error("matrix valuation undetermined at precision " + std::to_string(prec));
    }
    return best;
  }

  void check_compat(const TriMatrix& o) const {
    if (n_ != o.n_ || !ctx_->same(*o.ctx_))
      throw std::invalid_argument("incompatible matrices");
  }

  bool agrees_with(const TriMatrix& o) const {
    check_compat(o);
    if (diag_ != o.diag_) return false;
    for (int i = 1; i <= n_; ++i)
      for (int j = i + 1; j <= n_; ++j)
        if (!entry(i, j).agrees_with(o.entry(i, j))) return false;
    return true;
  }

 private:
  size_t idx(int i, int j) const {
    if (!(1 <= i && i < j && j <= n_)) throw std::invalid_argument("matrix index out of range");
    int row = i - 1;
    int before = row * (2 * n_ - row - 1) / 2;
    return static_cast<size_t>(before + (j - i - 1));
  }

  FieldRef ctx_;
  int n_ = 0;
  uint32_t diag_ = 0;
  std::vector<LaurentSeries> e_;
};

// Independent partition-sum formula for the inverse of a unipotent matrix:
// x*_{i,j} = sum over partitions i = l_0 < ... < l_s = j of
// (-1)^s prod x_{l_u, l_{u+1}}. Used as a test oracle against inverse().
inline LaurentSeries inv_entry_oracle(const TriMatrix& x, int i, int j) {
  if (!x.is_unipotent()) throw std::invalid_argument("oracle requires a unipotent matrix");
  std::vector<int> interior;
  for (int l = i + 1; l < j; ++l) interior.push_back(l);
  LaurentSeries acc = LaurentSeries::zero(x.ctx());
  size_t subsets = static_cast<size_t>(1) << interior.size();
  for (size_t mask = 0; mask < subsets; ++mask) {
    std::vector<int> chain{i};
    for (size_t b = 0; b < interior.size(); ++b)
      if (mask & (static_cast<size_t>(1) << b)) chain.push_back(interior[b]);
    chain.push_back(j);
    LaurentSeries prod =
        LaurentSeries::constant(x.ctx(), FieldElement::one(x.ctx()));
    for (size_t u = 0; u + 1 < chain.size(); ++u) prod = prod * x.entry(chain[u], chain[u + 1]);
    int s = static_cast<int>(chain.size()) - 1;  // |lambda|
    acc = (s % 2 == 1) ? acc - prod : acc + prod;
  }
  return acc;
}

// Membership in the filtration subgroups H_{<=nu} / H_{<nu} of UT_n(M):
// -v(x_{i,j}) <= nu_{i,j} (resp. <) for all i < j. nu must satisfy
// nu_{i,j} >= nu_{i,l} + nu_{l,j}.
inline bool h_member(const TriMatrix& x, const PairTable<Rational>& nu, bool strict) {
  if (!x.is_unipotent()) throw std::invalid_argument("h_member requires a unipotent matrix");
  if (nu.n() != x.n()) throw std::invalid_argument("nu table size mismatch");
  for (int i = 1; i <= x.n(); ++i)
    for (int l = i + 1; l < x.n() + 1; ++l)
      for (int j = l + 1; j <= x.n(); ++j)
        if (nu.at(i, j) < nu.at(i, l) + nu.at(l, j))
          throw std::invalid_argument("malformed nu: superadditivity fails");
  for (int i = 1; i <= x.n(); ++i) {
    for (int j = i + 1; j <= x.n(); ++j) {
      const LaurentSeries& s = x.entry(i, j);
      const Rational& bound = nu.at(i, j);
      auto v = s.valuation();
      if (v) {
        Rational neg_v(-*v);
        if (strict ? !(neg_v < bound) : !(neg_v <= bound)) return false;
      } else if (!s.is_exact()) {
        Rational neg_lb(-s.prec());  // -v(x) <= -prec for any completion
        if (strict ? !(neg_lb < bound) : !(neg_lb <= bound))
          throw precision_error("h_member undetermined at entry precision");
      }
      // exact zero: -v = -infinity, always inside
    }
  }
  return true;
}

// Coefficientwise application of a field embedding.
inline LaurentSeries embed_series(const FieldEmbedding& em, const LaurentSeries& s) {
  std::vector<LaurentSeries::Term> terms;
  terms.reserve(s.terms().size());
  for (const auto& t : s.terms()) terms.emplace_back(t.first, em.map(t.second));
  return LaurentSeries::from_terms(em.to, std::move(terms), s.prec());
}

inline TriMatrix embed_matrix(const FieldEmbedding& em, const TriMatrix& m) {
  TriMatrix r(em.to, m.n(), m.diag());
  for (int i = 1; i <= m.n(); ++i)
    for (int j = i + 1; j <= m.n(); ++j) r.set_entry(i, j, embed_series(em, m.entry(i, j)));
  return r;
}

}  // namespace utbreaks

#endif  // UTBREAKS_TRIMATRIX_HPP
