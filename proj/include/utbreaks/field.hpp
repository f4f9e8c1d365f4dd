/**
 * @file utbreaks/field.hpp
 * @brief Exact arithmetic in GF(p^k): Frobenius roots, Artin-Schreier
 *        solving, and on-demand degree-p enlargement.
 * @copyright Apache License 2.0
 *
 * The residue field of the ambient local field is algebraically closed in
 * the underlying theory; computationally we work over a finite GF(p^k) and
 * enlarge it by degree p exactly when an Artin-Schreier equation has no
 * root in the current field. All valuations computed downstream are
 * insensitive to such enlargements.
 */
#ifndef UTBREAKS_FIELD_HPP
#define UTBREAKS_FIELD_HPP

#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "utbreaks/errors.hpp"
#include "utbreaks/rng.hpp"

namespace utbreaks {

// Polynomial over F_p, coefficients ascending, not necessarily trimmed.
using FpPoly = std::vector<uint32_t>;

namespace fp {

inline uint32_t add(uint32_t a, uint32_t b, int64_t p) {
  uint64_t s = static_cast<uint64_t>(a) + b;
  return static_cast<uint32_t>(s % static_cast<uint64_t>(p));
}

inline uint32_t sub(uint32_t a, uint32_t b, int64_t p) {
  int64_t s = static_cast<int64_t>(a) - static_cast<int64_t>(b);
  s %= p;
  if (s < 0) s += p;
  return static_cast<uint32_t>(s);
}

inline uint32_t mul(uint32_t a, uint32_t b, int64_t p) {
  return static_cast<uint32_t>(static_cast<uint64_t>(a) * b % static_cast<uint64_t>(p));
}

inline uint32_t pow(uint32_t a, uint64_t e, int64_t p) {
  uint32_t r = 1 % static_cast<uint32_t>(p);
  uint32_t base = a;
  while (e > 0) {
    if (e & 1) r = mul(r, base, p);
    base = mul(base, base, p);
    e >>= 1;
  }
  return r;
}

inline uint32_t inv(uint32_t a, int64_t p) {
  if (a == 0) throw std::invalid_argument("inverse of zero in F_p");
  // extended Euclid
  int64_t t = 0, newt = 1, r = p, newr = a;
  while (newr != 0) {
    int64_t q = r / newr;
    int64_t tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  if (t < 0) t += p;
  return static_cast<uint32_t>(t);
}

inline uint32_t neg(uint32_t a, int64_t p) { return a == 0 ? 0 : static_cast<uint32_t>(p - a); }

inline bool is_prime(int64_t p) {
  if (p < 2) return false;
  for (int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline void poly_trim(FpPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline int poly_deg(const FpPoly& f) {
  for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
    if (f[static_cast<size_t>(i)] != 0) return i;
  return -1;
}

inline FpPoly poly_mul(const FpPoly& a, const FpPoly& b, int64_t p) {
  if (a.empty() || b.empty()) return {};
  FpPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = add(r[i + j], mul(a[i], b[j], p), p);
  }
  poly_trim(r);
  return r;
}

// Remainder of a modulo monic f.
inline FpPoly poly_mod(FpPoly a, const FpPoly& f, int64_t p) {
  int df = poly_deg(f);
  assert(df >= 0 && f[static_cast<size_t>(df)] == 1);
  poly_trim(a);
  while (poly_deg(a) >= df) {
    int da = poly_deg(a);
    uint32_t c = a[static_cast<size_t>(da)];
    for (int i = 0; i <= df; ++i)
      a[static_cast<size_t>(da - df + i)] =
          sub(a[static_cast<size_t>(da - df + i)], mul(c, f[static_cast<size_t>(i)], p), p);
    poly_trim(a);
  }
  return a;
}

inline FpPoly poly_sub(FpPoly a, const FpPoly& b, int64_t p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] = sub(a[i], b[i], p);
  poly_trim(a);
  return a;
}

inline FpPoly poly_gcd(FpPoly a, FpPoly b, int64_t p) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    // reduce a mod b (make b monic on the fly)
    uint32_t lead = b.back();
    FpPoly bm = b;
    if (lead != 1) {
      uint32_t li = inv(lead, p);
      for (auto& c : bm) c = mul(c, li, p);
    }
    FpPoly r = poly_mod(a, bm, p);
    a = b;
    b = r;
  }
  return a;
}

inline FpPoly poly_powmod(FpPoly base, uint64_t e, const FpPoly& f, int64_t p) {
  FpPoly r{1};
  base = poly_mod(std::move(base), f, p);
  while (e > 0) {
    if (e & 1) r = poly_mod(poly_mul(r, base, p), f, p);
    base = poly_mod(poly_mul(base, base, p), f, p);
    e >>= 1;
  }
  return r;
}

// x^(p^j) mod f by iterated p-th powering.
inline FpPoly poly_frob(const FpPoly& f, int64_t p, int j) {
  FpPoly g{0, 1};  // x
  for (int i = 0; i < j; ++i) g = poly_powmod(g, static_cast<uint64_t>(p), f, p);
  return g;
}

// Rabin irreducibility test for monic f of degree k over F_p.
inline bool poly_irreducible(const FpPoly& f, int64_t p) {
  int k = poly_deg(f);
  if (k <= 0) return false;
  if (f[static_cast<size_t>(k)] != 1) return false;
  if (k == 1) return true;
  FpPoly xpk = poly_frob(f, p, k);
  FpPoly x{0, 1};
  if (poly_sub(xpk, x, p) != FpPoly{}) return false;
  int kk = k;
  for (int ell = 2; ell * ell <= kk; ++ell) {
    if (k % ell != 0) continue;
    while (kk % ell == 0) kk /= ell;
    FpPoly g = poly_sub(poly_frob(f, p, k / ell), x, p);
    FpPoly d = poly_gcd(g, f, p);
    if (poly_deg(d) != 0) return false;
  }
  if (kk > 1 && kk < k) {
    FpPoly g = poly_sub(poly_frob(f, p, k / kk), x, p);
    FpPoly d = poly_gcd(g, f, p);
    if (poly_deg(d) != 0) return false;
  }
  return true;
}

}  // namespace fp

class FieldCtx;
using FieldRef = std::shared_ptr<const FieldCtx>;

/// Finite coefficient field F_{p^k} = F_p[x]/(modulus), modulus monic
/// irreducible of degree k. Immutable and shareable across threads.
class FieldCtx {
 public:
  static FieldRef make(int64_t p, FpPoly modulus) {
    return FieldRef(new FieldCtx(p, std::move(modulus)));
  }

  static FieldRef make_prime(int64_t p) { return make(p, FpPoly{0, 1}); }

  int64_t p() const { return p_; }
  int k() const { return k_; }
  const FpPoly& modulus() const { return modulus_; }

  bool same(const FieldCtx& o) const { return p_ == o.p_ && modulus_ == o.modulus_; }

 private:
  FieldCtx(int64_t p, FpPoly modulus) : p_(p), modulus_(std::move(modulus)) {
    if (!fp::is_prime(p_)) throw parse_error("p = " + std::to_string(p_) + " is not prime");
    fp::poly_trim(modulus_);
    k_ = fp::poly_deg(modulus_);
    if (k_ < 1) throw parse_error("modulus must have degree >= 1");
    if (modulus_[static_cast<size_t>(k_)] != 1) throw parse_error("modulus must be monic");
    for (auto c : modulus_)
      if (c >= static_cast<uint64_t>(p_)) throw parse_error("modulus coefficient out of range");
    if (!fp::poly_irreducible(modulus_, p_))
      throw parse_error("modulus is reducible over F_" + std::to_string(p_));
  }

  int64_t p_;
  int k_;
  FpPoly modulus_;
};

class FieldElement {
 public:
  FieldElement() = default;

  FieldElement(FieldRef ctx, std::vector<uint32_t> coords)
      : ctx_(std::move(ctx)), c_(std::move(coords)) {
    c_.resize(static_cast<size_t>(ctx_->k()), 0);
    for (auto& x : c_) x %= static_cast<uint32_t>(ctx_->p());
  }

  static FieldElement zero(const FieldRef& ctx) {
    return FieldElement(ctx, std::vector<uint32_t>(static_cast<size_t>(ctx->k()), 0));
  }

  static FieldElement one(const FieldRef& ctx) { return from_int(ctx, 1); }

  static FieldElement from_int(const FieldRef& ctx, int64_t v) {
    v %= ctx->p();
    if (v < 0) v += ctx->p();
    std::vector<uint32_t> c(static_cast<size_t>(ctx->k()), 0);
    c[0] = static_cast<uint32_t>(v);
    return FieldElement(ctx, std::move(c));
  }

  // The residue class of x in F_p[x]/(modulus); requires k > 1.
  static FieldElement gen(const FieldRef& ctx) {
    if (ctx->k() < 2) throw std::invalid_argument("gen requires k > 1");
    std::vector<uint32_t> c(static_cast<size_t>(ctx->k()), 0);
    c[1] = 1;
    return FieldElement(ctx, std::move(c));
  }

  const FieldRef& ctx() const { return ctx_; }
  const std::vector<uint32_t>& coords() const { return c_; }

  bool is_zero() const {
    for (auto x : c_)
      if (x != 0) return false;
    return true;
  }

  bool operator==(const FieldElement& o) const {
    check_ctx(o);
    return c_ == o.c_;
  }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

  // Coordinatewise lexicographic order; used to pick canonical roots.
  bool lex_less(const FieldElement& o) const {
    check_ctx(o);
    return c_ < o.c_;
  }

  FieldElement operator+(const FieldElement& o) const {
    check_ctx(o);
    std::vector<uint32_t> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = fp::add(c_[i], o.c_[i], p());
    return with(std::move(r));
  }

  FieldElement operator-(const FieldElement& o) const {
    check_ctx(o);
    std::vector<uint32_t> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = fp::sub(c_[i], o.c_[i], p());
    return with(std::move(r));
  }

  FieldElement operator-() const {
    std::vector<uint32_t> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = fp::neg(c_[i], p());
    return with(std::move(r));
  }

  FieldElement operator*(const FieldElement& o) const {
    check_ctx(o);
    FpPoly prod = fp::poly_mul(FpPoly(c_.begin(), c_.end()), FpPoly(o.c_.begin(), o.c_.end()), p());
    return from_poly(ctx_, std::move(prod));
  }

  FieldElement operator/(const FieldElement& o) const {
    check_ctx(o);
    return *this * o.inverse();
  }

  FieldElement inverse() const {
    if (is_zero()) throw std::invalid_argument("division by zero in F_{p^k}");
    // extended Euclid over F_p[x]
    FpPoly r0 = ctx_->modulus();
    FpPoly r1(c_.begin(), c_.end());
    fp::poly_trim(r1);
    FpPoly t0{}, t1{1};
    while (fp::poly_deg(r1) > 0) {
      // divide r0 by r1
      FpPoly q{};
      FpPoly rem = r0;
      int d1 = fp::poly_deg(r1);
      uint32_t li = fp::inv(r1[static_cast<size_t>(d1)], p());
      while (fp::poly_deg(rem) >= d1) {
        int dr = fp::poly_deg(rem);
        uint32_t c = fp::mul(rem[static_cast<size_t>(dr)], li, p());
        if (static_cast<int>(q.size()) < dr - d1 + 1) q.resize(static_cast<size_t>(dr - d1 + 1), 0);
        q[static_cast<size_t>(dr - d1)] = fp::add(q[static_cast<size_t>(dr - d1)], c, p());
        for (int i = 0; i <= d1; ++i)
          rem[static_cast<size_t>(dr - d1 + i)] = fp::sub(
              rem[static_cast<size_t>(dr - d1 + i)], fp::mul(c, r1[static_cast<size_t>(i)], p()), p());
        fp::poly_trim(rem);
      }
      FpPoly t2 = fp::poly_sub(t0, fp::poly_mul(q, t1, p()), p());
      r0 = r1;
      r1 = rem;
      t0 = t1;
      t1 = t2;
    }
    // r1 is a nonzero constant
    assert(fp::poly_deg(r1) == 0);
    uint32_t ci = fp::inv(r1[0], p());
    for (auto& c : t1) c = fp::mul(c, ci, p());
    return from_poly(ctx_, std::move(t1));
  }

  FieldElement pow(uint64_t e) const {
    FieldElement r = one(ctx_);
    FieldElement b = *this;
    while (e > 0) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  // x ^ (p^e), e >= 0.
  FieldElement frobenius(int64_t e) const {
    FieldElement r = *this;
    for (int64_t i = 0; i < e; ++i) r = r.pow(static_cast<uint64_t>(p()));
    return r;
  }

  // The unique b with b^(p^e) = a. Frobenius has order dividing k, so
  // b = a^(p^((-e) mod k)).
  FieldElement proot(int64_t e) const {
    int64_t k = ctx_->k();
    int64_t shift = ((-e) % k + k) % k;
    return frobenius(shift);
  }

  // Absolute trace to F_p.
  uint32_t trace() const {
    FieldElement s = *this;
    FieldElement f = *this;
    for (int i = 1; i < ctx_->k(); ++i) {
      f = f.frobenius(1);
      s = s + f;
    }
    for (size_t i = 1; i < s.c_.size(); ++i) assert(s.c_[i] == 0);
    return s.c_[0];
  }

 private:
  int64_t p() const { return ctx_->p(); }

  FieldElement with(std::vector<uint32_t> c) const {
    FieldElement r;
    r.ctx_ = ctx_;
    r.c_ = std::move(c);
    return r;
  }

  static FieldElement from_poly(const FieldRef& ctx, FpPoly f) {
    f = fp::poly_mod(std::move(f), ctx->modulus(), ctx->p());
    f.resize(static_cast<size_t>(ctx->k()), 0);
    FieldElement r;
    r.ctx_ = ctx;
    r.c_.assign(f.begin(), f.end());
    return r;
  }

  void check_ctx(const FieldElement& o) const {
    if (!ctx_ || !o.ctx_ || !ctx_->same(*o.ctx_))
      throw std::invalid_argument("mismatched field contexts");
  }

  FieldRef ctx_;
  std::vector<uint32_t> c_;
};

// Solves x^p - x = y in the current field. Returns the canonical root
// (lexicographically least coordinate vector; the p roots differ by F_p
// constants, so the canonical one has first coordinate 0), or nullopt when
// the absolute trace of y is nonzero.
inline std::optional<FieldElement> artin_schreier_solve(const FieldElement& y) {
  const FieldRef& ctx = y.ctx();
  int64_t p = ctx->p();
  int k = ctx->k();
  // columns: coords of b^p - b for basis b = x^j
  std::vector<std::vector<uint32_t>> col(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    std::vector<uint32_t> e(static_cast<size_t>(k), 0);
    e[static_cast<size_t>(j)] = 1;
    FieldElement b(ctx, std::move(e));
    col[static_cast<size_t>(j)] = (b.frobenius(1) - b).coords();
  }
  // Gaussian elimination on the augmented k x (k+1) system
  std::vector<std::vector<uint32_t>> m(static_cast<size_t>(k),
                                       std::vector<uint32_t>(static_cast<size_t>(k) + 1, 0));
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) m[static_cast<size_t>(r)][static_cast<size_t>(c)] =
        col[static_cast<size_t>(c)][static_cast<size_t>(r)];
    m[static_cast<size_t>(r)][static_cast<size_t>(k)] = y.coords()[static_cast<size_t>(r)];
  }
  std::vector<int> pivot_col(static_cast<size_t>(k), -1);
  int row = 0;
  for (int c = 0; c < k && row < k; ++c) {
    int pr = -1;
    for (int r = row; r < k; ++r)
      if (m[static_cast<size_t>(r)][static_cast<size_t>(c)] != 0) { pr = r; break; }
    if (pr < 0) continue;
    std::swap(m[static_cast<size_t>(pr)], m[static_cast<size_t>(row)]);
    uint32_t li = fp::inv(m[static_cast<size_t>(row)][static_cast<size_t>(c)], p);
    for (int cc = c; cc <= k; ++cc)
      m[static_cast<size_t>(row)][static_cast<size_t>(cc)] =
          fp::mul(m[static_cast<size_t>(row)][static_cast<size_t>(cc)], li, p);
    for (int r = 0; r < k; ++r) {
      if (r == row) continue;
      uint32_t f = m[static_cast<size_t>(r)][static_cast<size_t>(c)];
      if (f == 0) continue;
      for (int cc = c; cc <= k; ++cc)
        m[static_cast<size_t>(r)][static_cast<size_t>(cc)] =
            fp::sub(m[static_cast<size_t>(r)][static_cast<size_t>(cc)],
                    fp::mul(f, m[static_cast<size_t>(row)][static_cast<size_t>(cc)], p), p);
    }
    pivot_col[static_cast<size_t>(row)] = c;
    ++row;
  }
  for (int r = row; r < k; ++r)
    if (m[static_cast<size_t>(r)][static_cast<size_t>(k)] != 0) return std::nullopt;
  std::vector<uint32_t> x(static_cast<size_t>(k), 0);
  for (int r = 0; r < row; ++r)
    x[static_cast<size_t>(pivot_col[static_cast<size_t>(r)])] =
        m[static_cast<size_t>(r)][static_cast<size_t>(k)];
  FieldElement sol(ctx, std::move(x));
  // shift by the F_p constant that zeroes the first coordinate
  FieldElement canon = sol - FieldElement::from_int(ctx, sol.coords()[0]);
  assert(canon.frobenius(1) - canon == y);
  return canon;
}

/// Injective field map F_{p^k} -> F_{p^(k*p)} (commutes with arithmetic
/// and Frobenius; verified by the modulus-root assertion at construction).
struct FieldEmbedding {
  FieldRef from;
  FieldRef to;
  FieldElement gen_image;  // image of the residue class of x in `from`

  FieldElement map(const FieldElement& a) const {
    if (!a.ctx()->same(*from)) throw std::invalid_argument("embedding applied to wrong field");
    FieldElement acc = FieldElement::zero(to);
    const auto& c = a.coords();
    for (size_t i = c.size(); i-- > 0;) {
      acc = acc * gen_image + FieldElement::from_int(to, c[i]);
    }
    return acc;
  }
};

namespace detail {

// Arithmetic in the tower F_{p^k}[Z]/(Z^p - Z - c), used only while
// constructing the degree-kp modulus over F_p.
struct Tower {
  FieldRef base;
  FieldElement c;  // Tr(c) != 0, so Z^p - Z - c is irreducible

  using Elem = std::vector<FieldElement>;  // coefficients of Z^0..Z^(p-1)

  Elem make_zero() const {
    return Elem(static_cast<size_t>(base->p()), FieldElement::zero(base));
  }

  Elem mul(const Elem& a, const Elem& b) const {
    size_t pz = static_cast<size_t>(base->p());
    std::vector<FieldElement> prod(2 * pz - 1, FieldElement::zero(base));
    for (size_t i = 0; i < pz; ++i) {
      if (a[i].is_zero()) continue;
      for (size_t j = 0; j < pz; ++j) prod[i + j] = prod[i + j] + a[i] * b[j];
    }
    // reduce with Z^(p+i) = Z^(i+1) + c Z^i
    for (size_t d = prod.size(); d-- > pz;) {
      FieldElement top = prod[d];
      if (top.is_zero()) continue;
      prod[d] = FieldElement::zero(base);
      prod[d - pz + 1] = prod[d - pz + 1] + top;
      prod[d - pz] = prod[d - pz] + top * c;
    }
    prod.resize(pz, FieldElement::zero(base));
    return prod;
  }

  std::vector<uint32_t> flatten(const Elem& a) const {
    std::vector<uint32_t> v;
    v.reserve(a.size() * static_cast<size_t>(base->k()));
    for (const auto& e : a)
      for (auto x : e.coords()) v.push_back(x);
    return v;
  }
};

// Minimal polynomial of gamma over F_p inside the kp-dimensional tower,
// by incremental echelon reduction of its powers. Returns monic poly.
inline std::optional<FpPoly> tower_min_poly(const Tower& tw, const Tower::Elem& gamma,
                                            int dim) {
  int64_t p = tw.base->p();
  struct Row {
    std::vector<uint32_t> vec;
    std::vector<uint32_t> expr;  // combination of gamma powers
    int lead;
  };
  std::vector<Row> rows;
  Tower::Elem pw = tw.make_zero();
  pw[0] = FieldElement::one(tw.base);
  for (int d = 0; d <= dim; ++d) {
    std::vector<uint32_t> vec = tw.flatten(pw);
    std::vector<uint32_t> expr(static_cast<size_t>(dim) + 1, 0);
    expr[static_cast<size_t>(d)] = 1;
    // reduce against existing rows
    for (const auto& row : rows) {
      uint32_t f = vec[static_cast<size_t>(row.lead)];
      if (f == 0) continue;
      for (size_t i = 0; i < vec.size(); ++i) vec[i] = fp::sub(vec[i], fp::mul(f, row.vec[i], p), p);
      for (size_t i = 0; i < expr.size(); ++i)
        expr[i] = fp::sub(expr[i], fp::mul(f, row.expr[i], p), p);
    }
    int lead = -1;
    for (size_t i = 0; i < vec.size(); ++i)
      if (vec[i] != 0) { lead = static_cast<int>(i); break; }
    if (lead < 0) {
      // dependency found: expr gives the min poly of degree d
      FpPoly f(expr.begin(), expr.begin() + d + 1);
      uint32_t li = fp::inv(f[static_cast<size_t>(d)], p);
      for (auto& x : f) x = fp::mul(x, li, p);
      return f;
    }
    uint32_t li = fp::inv(vec[static_cast<size_t>(lead)], p);
    for (auto& x : vec) x = fp::mul(x, li, p);
    for (auto& x : expr) x = fp::mul(x, li, p);
    rows.push_back(Row{std::move(vec), std::move(expr), lead});
    pw = tw.mul(pw, gamma);
  }
  return std::nullopt;  // cannot happen: dim+1 vectors in dim-space
}

}  // namespace detail

// Enlarges F_{p^k} to F_{p^(k*p)}. The new field is presented by a monic
// degree-kp modulus over F_p (no external polynomial tables), constructed
// from the Artin-Schreier tower F_{p^k}[Z]/(Z^p - Z - c) with Tr(c) != 0.
// Every Artin-Schreier equation over the old field becomes solvable in the
// new one.
inline FieldEmbedding extend_by_p(const FieldRef& ctx) {
  int64_t p = ctx->p();
  int k = ctx->k();
  int dim = k * static_cast<int>(p);

  // basis element with nonzero trace (the trace form is nondegenerate)
  FieldElement c = FieldElement::zero(ctx);
  for (int j = 0; j < k; ++j) {
    std::vector<uint32_t> e(static_cast<size_t>(k), 0);
    e[static_cast<size_t>(j)] = 1;
    FieldElement b(ctx, std::move(e));
    if (b.trace() != 0) { c = b; break; }
  }
  if (c.is_zero()) throw overflow_error("no basis element of nonzero trace");

  detail::Tower tw{ctx, c};

  // candidate generators: Z + w for deterministic w, then seeded randoms
  auto candidate = [&](int idx) {
    detail::Tower::Elem g = tw.make_zero();
    g[1] = FieldElement::one(ctx);  // Z
    if (idx == 0) return g;
    if (idx <= k) {
      std::vector<uint32_t> e(static_cast<size_t>(k), 0);
      e[static_cast<size_t>(idx - 1)] = 1;
      g[0] = FieldElement(ctx, std::move(e));
      return g;
    }
    Rng rng(0x7a11eeULL + static_cast<uint64_t>(idx));
    std::vector<uint32_t> e(static_cast<size_t>(k), 0);
    for (auto& x : e) x = static_cast<uint32_t>(rng.below(static_cast<uint64_t>(p)));
    g[0] = FieldElement(ctx, std::move(e));
    std::vector<uint32_t> e1(static_cast<size_t>(k), 0);
    for (auto& x : e1) x = static_cast<uint32_t>(rng.below(static_cast<uint64_t>(p)));
    if (FieldElement(ctx, e1).is_zero()) e1[0] = 1;
    g[1] = FieldElement(ctx, std::move(e1));
    return g;
  };

  for (int attempt = 0; attempt < 256; ++attempt) {
    detail::Tower::Elem gamma = candidate(attempt);
    auto mp = detail::tower_min_poly(tw, gamma, dim);
    if (!mp || fp::poly_deg(*mp) != dim) continue;

    FieldRef bigger = FieldCtx::make(p, *mp);

    // express the old generator in the gamma-power basis
    std::vector<std::vector<uint32_t>> mat(static_cast<size_t>(dim),
                                           std::vector<uint32_t>(static_cast<size_t>(dim) + 1, 0));
    detail::Tower::Elem pw = tw.make_zero();
    pw[0] = FieldElement::one(ctx);
    for (int d = 0; d < dim; ++d) {
      auto v = tw.flatten(pw);
      for (int r = 0; r < dim; ++r)
        mat[static_cast<size_t>(r)][static_cast<size_t>(d)] = v[static_cast<size_t>(r)];
      pw = tw.mul(pw, gamma);
    }
    // the old generator is the class of x; for k = 1 (modulus x) that is 0
    detail::Tower::Elem gold = tw.make_zero();
    if (k > 1) gold[0] = FieldElement::gen(ctx);
    auto gv = tw.flatten(gold);
    for (int r = 0; r < dim; ++r) mat[static_cast<size_t>(r)][static_cast<size_t>(dim)] = gv[static_cast<size_t>(r)];
    // solve (matrix is invertible since gamma has full degree)
    int row = 0;
    std::vector<int> pivot(static_cast<size_t>(dim), -1);
    for (int col = 0; col < dim && row < dim; ++col) {
      int pr = -1;
      for (int r = row; r < dim; ++r)
        if (mat[static_cast<size_t>(r)][static_cast<size_t>(col)] != 0) { pr = r; break; }
      if (pr < 0) continue;
      std::swap(mat[static_cast<size_t>(pr)], mat[static_cast<size_t>(row)]);
      uint32_t li = fp::inv(mat[static_cast<size_t>(row)][static_cast<size_t>(col)], p);
      for (int cc = col; cc <= dim; ++cc)
        mat[static_cast<size_t>(row)][static_cast<size_t>(cc)] =
            fp::mul(mat[static_cast<size_t>(row)][static_cast<size_t>(cc)], li, p);
      for (int r = 0; r < dim; ++r) {
        if (r == row) continue;
        uint32_t f = mat[static_cast<size_t>(r)][static_cast<size_t>(col)];
        if (f == 0) continue;
        for (int cc = col; cc <= dim; ++cc)
          mat[static_cast<size_t>(r)][static_cast<size_t>(cc)] =
              fp::sub(mat[static_cast<size_t>(r)][static_cast<size_t>(cc)],
                      fp::mul(f, mat[static_cast<size_t>(row)][static_cast<size_t>(cc)], p), p);
      }
      pivot[static_cast<size_t>(row)] = col;
      ++row;
    }
    std::vector<uint32_t> sol(static_cast<size_t>(dim), 0);
    for (int r = 0; r < row; ++r)
      sol[static_cast<size_t>(pivot[static_cast<size_t>(r)])] =
          mat[static_cast<size_t>(r)][static_cast<size_t>(dim)];
    FieldElement gimg(bigger, std::move(sol));

    // a ring hom must send the old generator to a root of the old modulus
    FieldElement check = FieldElement::zero(bigger);
    const FpPoly& om = ctx->modulus();
    for (size_t i = om.size(); i-- > 0;)
      check = check * gimg + FieldElement::from_int(bigger, om[i]);
    if (!check.is_zero()) throw overflow_error("embedding construction failed");

    return FieldEmbedding{ctx, bigger, gimg};
  }
  throw overflow_error("could not construct degree-kp modulus");
}

// Coefficient text encoding: k = 1 -> decimal in [0,p); k > 1 -> coordinates
// joined by ';' with c0 first. Used by the CLI instance format.
inline std::string coeff_to_string(const FieldElement& a) {
  const auto& c = a.coords();
  if (c.size() == 1) return std::to_string(c[0]);
  std::string s;
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(c[i]);
  }
  return s;
}

}  // namespace utbreaks

#endif  // UTBREAKS_FIELD_HPP
