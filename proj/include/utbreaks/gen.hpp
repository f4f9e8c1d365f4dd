/**
 * @file utbreaks/gen.hpp
 * @brief Seeded random generators for fields, series, matrices and
 *        normalized instances (verify diagnostics and tests).
 * @copyright Apache License 2.0
 */
#ifndef UTBREAKS_GEN_HPP
#define UTBREAKS_GEN_HPP

#include <cstdint>
#include <vector>

#include "utbreaks/rng.hpp"
#include "utbreaks/trimatrix.hpp"
#include "utbreaks/weights.hpp"

namespace utbreaks {

inline FieldElement random_element(Rng& rng, const FieldRef& ctx) {
  std::vector<uint32_t> c(static_cast<size_t>(ctx->k()));
  for (auto& x : c) x = static_cast<uint32_t>(rng.below(static_cast<uint64_t>(ctx->p())));
  return FieldElement(ctx, std::move(c));
}

inline FieldElement random_nonzero(Rng& rng, const FieldRef& ctx) {
  for (;;) {
    FieldElement e = random_element(rng, ctx);
    if (!e.is_zero()) return e;
  }
}

// Sparse series with indices in [lo, hi) and the given precision.
inline LaurentSeries random_series(Rng& rng, const FieldRef& ctx, int64_t lo, int64_t hi,
                                   int max_terms, int64_t prec = kPrecExact) {
  std::vector<LaurentSeries::Term> terms;
  int count = static_cast<int>(rng.below(static_cast<uint64_t>(max_terms) + 1));
  for (int t = 0; t < count; ++t)
    terms.emplace_back(rng.range(lo, hi - 1), random_element(rng, ctx));
  return LaurentSeries::from_terms(ctx, std::move(terms), prec);
}

// Series with determined valuation lo (nonzero leading coefficient).
inline LaurentSeries random_unit_series(Rng& rng, const FieldRef& ctx, int64_t lo, int64_t hi,
                                        int max_terms, int64_t prec = kPrecExact) {
  LaurentSeries s = random_series(rng, ctx, lo + 1, hi, max_terms - 1, prec);
  return s + LaurentSeries::monomial(ctx, lo, random_nonzero(rng, ctx), prec);
}

// Random element of FT_n with sparse exact entries.
inline TriMatrix random_ftn(Rng& rng, const FieldRef& ctx, int n, int64_t idx_lo,
                            int64_t idx_hi, std::optional<uint32_t> diag = std::nullopt) {
  uint32_t d = diag ? *diag
                    : static_cast<uint32_t>(rng.below(static_cast<uint64_t>(ctx->p())));
  TriMatrix m(ctx, n, d);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (rng.chance(4, 5)) m.set_entry(i, j, random_series(rng, ctx, idx_lo, idx_hi, 3));
  return m;
}

// Entry in normal form: indices in [-m, 0), prime to p, leading index -m
// with nonzero coefficient.
inline LaurentSeries random_normalized_entry(Rng& rng, const FieldRef& ctx, int64_t m,
                                             int extra_terms) {
  int64_t p = ctx->p();
  std::vector<LaurentSeries::Term> terms;
  terms.emplace_back(-m, random_nonzero(rng, ctx));
  for (int t = 0; m >= 2 && t < extra_terms; ++t) {
    int64_t l = rng.range(-m + 1, -1);
    if (l >= 0 || l % p == 0) continue;
    terms.emplace_back(l, random_element(rng, ctx));
  }
  return LaurentSeries::from_terms(ctx, std::move(terms));
}

inline int64_t random_coprime_weight(Rng& rng, int64_t p, int64_t max_m) {
  for (;;) {
    int64_t m = rng.range(1, max_m);
    if (m % p != 0) return m;
  }
}

struct RandomInstanceOptions {
  int64_t max_m = 9;
  bool distinct_superdiag = false;  // the n=3 closed form needs distinct weights
  uint32_t offdiag_fill_num = 1;    // probability num/den that a non-adjacent
  uint32_t offdiag_fill_den = 2;    // entry is nonzero
};

// Random already-normalized defining matrix (unipotent, entries with
// negative p-coprime indices, superdiagonal nonzero).
inline TriMatrix random_defining_matrix(Rng& rng, const FieldRef& ctx, int n,
                                        const RandomInstanceOptions& opt = {}) {
  int64_t p = ctx->p();
  TriMatrix a(ctx, n, 1);
  std::vector<int64_t> sup(static_cast<size_t>(n));
  for (int i = 1; i < n; ++i) {
    int64_t m;
    for (;;) {
      m = random_coprime_weight(rng, p, opt.max_m);
      if (!opt.distinct_superdiag) break;
      bool clash = false;
      for (int u = 1; u < i; ++u)
        if (sup[static_cast<size_t>(u)] == m) clash = true;
      if (!clash) break;
    }
    sup[static_cast<size_t>(i)] = m;
    a.set_entry(i, i + 1, random_normalized_entry(rng, ctx, m, 2));
  }
  for (int d = 2; d < n; ++d)
    for (int i = 1; i + d <= n; ++i)
      if (rng.chance(opt.offdiag_fill_num, opt.offdiag_fill_den))
        a.set_entry(i, i + d,
                    random_normalized_entry(rng, ctx, random_coprime_weight(rng, p, opt.max_m),
                                            2));
  return a;
}

// Random weight map with all superdiagonal entries present.
inline WeightMap random_weight_map(Rng& rng, int n, int64_t max_m) {
  WeightMap m(n, std::nullopt);
  for (int i = 1; i < n; ++i) m.at(i, i + 1) = rng.range(1, max_m);
  for (int d = 2; d < n; ++d)
    for (int i = 1; i + d <= n; ++i)
      if (rng.chance(2, 3)) m.at(i, i + d) = rng.range(1, max_m);
  return m;
}

// Superadditive rational table (max-plus closure of random seed weights).
inline PairTable<Rational> random_admissible_nu(Rng& rng, int n, int64_t max_w) {
  PairTable<Rational> nu(n, Rational(0));
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) nu.at(i, j) = Rational(rng.range(1, max_w), rng.range(1, 2));
  for (int d = 2; d < n; ++d)
    for (int i = 1; i + d <= n; ++i) {
      int j = i + d;
      for (int l = i + 1; l < j; ++l)
        nu.at(i, j) = rational_max(nu.at(i, j), nu.at(i, l) + nu.at(l, j));
    }
  return nu;
}

// Unipotent matrix inside H_{<=nu} (entry valuations >= -nu).
inline TriMatrix random_h_member(Rng& rng, const FieldRef& ctx, int n,
                                 const PairTable<Rational>& nu, bool strict) {
  TriMatrix m(ctx, n, 1);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (rng.chance(1, 4)) continue;
      int64_t min_idx = -nu.at(i, j).floor() + (strict ? 1 : 0);
      // -v <= nu means v >= -floor(nu) when v is an integer
      if (Rational(-min_idx) > nu.at(i, j)) ++min_idx;
      m.set_entry(i, j, random_series(rng, ctx, min_idx, min_idx + 4, 2) +
                            LaurentSeries::monomial(ctx, min_idx + rng.range(0, 2),
                                                    random_element(rng, ctx)));
    }
  }
  return m;
}

}  // namespace utbreaks

#endif  // UTBREAKS_GEN_HPP
