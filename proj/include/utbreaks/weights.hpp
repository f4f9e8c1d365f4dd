/**
 * @file utbreaks/weights.hpp
 * @brief Entry weights m_{i,j}, chain-partition weights mu_{i,j} (interval
 *        DP plus a brute-force oracle), block weights, and the N/q/R
 *        selection rules.
 * @copyright Apache License 2.0
 */
#ifndef UTBREAKS_WEIGHTS_HPP
#define UTBREAKS_WEIGHTS_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "utbreaks/rational.hpp"
#include "utbreaks/trimatrix.hpp"

namespace utbreaks {

using WeightMap = PairTable<std::optional<int64_t>>;  // nullopt = entry is zero

// mu_{i,j} = max over chains i = l_0 < ... < l_s = j of sum m_{l_u,l_{u+1}},
// interval DP: mu_{i,j} = max(m_{i,j}, max_l (mu_{i,l} + mu_{l,j})).
inline PairTable<int64_t> mu_dp(const WeightMap& m, int n) {
  constexpr int64_t kNegInf = INT64_MIN / 4;
  PairTable<int64_t> mu(n, kNegInf);
  for (int d = 1; d < n; ++d) {
    for (int i = 1; i + d <= n; ++i) {
      int j = i + d;
      int64_t best = m.at(i, j) ? *m.at(i, j) : kNegInf;
      for (int l = i + 1; l < j; ++l) {
        int64_t via = mu.at(i, l) + mu.at(l, j);
        if (mu.at(i, l) <= kNegInf / 2 || mu.at(l, j) <= kNegInf / 2) via = kNegInf;
        if (via > best) best = via;
      }
      if (best <= kNegInf / 2)
        throw hypothesis_error("no finite chain for pair (" + std::to_string(i) + "," +
                               std::to_string(j) + "): superdiagonal entry missing");
      mu.at(i, j) = best;
    }
  }
  return mu;
}

// Brute-force enumeration of all 2^(j-i-1) partitions per pair; the test
// oracle for mu_dp.
inline PairTable<int64_t> mu_enum_oracle(const WeightMap& m, int n) {
  if (n > 12) throw std::invalid_argument("mu_enum_oracle guarded to n <= 12");
  constexpr int64_t kNegInf = INT64_MIN / 4;
  PairTable<int64_t> mu(n, kNegInf);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      int len = j - i - 1;
      int64_t best = kNegInf;
      for (size_t mask = 0; mask < (static_cast<size_t>(1) << len); ++mask) {
        std::vector<int> chain{i};
        for (int b = 0; b < len; ++b)
          if (mask & (static_cast<size_t>(1) << b)) chain.push_back(i + 1 + b);
        chain.push_back(j);
        int64_t s = 0;
        bool ok = true;
        for (size_t u = 0; u + 1 < chain.size(); ++u) {
          auto mw = m.at(chain[u], chain[u + 1]);
          if (!mw) { ok = false; break; }
          s += *mw;
        }
        if (ok && s > best) best = s;
      }
      if (best <= kNegInf / 2)
        throw hypothesis_error("no finite chain in mu_enum_oracle");
      mu.at(i, j) = best;
    }
  }
  return mu;
}

struct WeightTable {
  int n = 0;
  WeightMap m;
  PairTable<int64_t> mu;
  Rational mA;                   // -v_K(A) = max over pairs of m_{i,j}/(j-i)
  PairTable<Rational> mA_block;  // m_{A,i,j}, same max over the (i..j) block

  bool dominant_weight_premise(int i, int j) const {
    if (j - i < 2) return false;
    if (!m.at(i, j) || *m.at(i, j) != mu.at(i, j)) return false;
    for (int l = i + 1; l < j; ++l)
      if (!(mu.at(i, j) > mu.at(i, l) + mu.at(l, j))) return false;
    return true;
  }

  // One chain achieving mu_{i,j}; the direct edge is preferred, then the
  // smallest split point. Used by the explain command.
  std::vector<int> mu_partition(int i, int j) const {
    if (m.at(i, j) && *m.at(i, j) == mu.at(i, j)) return {i, j};
    for (int l = i + 1; l < j; ++l) {
      if (mu.at(i, l) + mu.at(l, j) == mu.at(i, j)) {
        auto left = mu_partition(i, l);
        auto right = mu_partition(l, j);
        left.insert(left.end(), right.begin() + 1, right.end());
        return left;
      }
    }
    throw std::logic_error("mu table inconsistent");
  }
};

// Weights read off a (normalized) defining matrix: m_{i,j} = -v(a_{i,j}).
// An entry that is zero to nonnegative precision is exactly zero in normal
// form, hence Absent.
inline WeightTable weights_from_matrix(const TriMatrix& a) {
  int n = a.n();
  WeightTable wt;
  wt.n = n;
  wt.m = WeightMap(n, std::nullopt);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const LaurentSeries& s = a.entry(i, j);
      auto v = s.valuation();
      if (v) {
        wt.m.at(i, j) = -*v;
      } else if (!s.is_exact() && s.prec() < 0) {
        throw precision_error("entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") zero to negative precision; cannot certify weight");
      }
    }
  }
  wt.mu = mu_dp(wt.m, n);
  wt.mA_block = PairTable<Rational>(n, Rational(0));
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      Rational best(INT64_MIN / 8);
      for (int l = i; l < j; ++l)
        for (int mm = l + 1; mm <= j; ++mm)
          if (wt.m.at(l, mm)) best = rational_max(best, Rational(*wt.m.at(l, mm), mm - l));
      wt.mA_block.at(i, j) = best;
    }
  }
  wt.mA = wt.mA_block.at(1, n);
  return wt;
}

// Least N with p^(N - n(n-1)/2) > n (p^(n(n-1)/2) + 1) mA + p, by exact
// integer/rational comparison (no floating logs; an off-by-one in N
// invalidates the break formula). Returns (N, q = p^N).
inline std::pair<int64_t, int64_t> choose_N(int64_t p, int n, const Rational& mA) {
  if (!(mA > Rational(0))) throw std::invalid_argument("choose_N requires mA > 0");
  int64_t h = static_cast<int64_t>(n) * (n - 1) / 2;
  __int128 ph = 1;
  for (int64_t i = 0; i < h; ++i) {
    ph *= p;
    if (ph > (static_cast<__int128>(1) << 62)) throw overflow_error("p^(n(n-1)/2) too large");
  }
  Rational bound = Rational(n) * (Rational(static_cast<int64_t>(ph)) + Rational(1)) * mA +
                   Rational(p);
  __int128 pe = 1;
  int64_t e = 0;
  while (true) {
    ++e;
    pe *= p;
    if (pe > (static_cast<__int128>(1) << 61)) throw overflow_error("N selection exceeds range");
    if (Rational(static_cast<int64_t>(pe)) > bound) break;
  }
  int64_t N = e + h;
  __int128 q = 1;
  for (int64_t i = 0; i < N; ++i) {
    q *= p;
    if (q > (static_cast<__int128>(1) << 61)) throw overflow_error("q = p^N too large");
  }
  return {N, static_cast<int64_t>(q)};
}

// R_{i,j} = q max(r_{i,j-1}, r_{i+1,j}) + (j-i) m_{A,i,j}, with the
// convention r_{i,i} = -1.
inline Rational r_threshold(int i, int j, int64_t q, const PairTable<Rational>& r,
                            const PairTable<Rational>& mA_block) {
  Rational left = (j - 1 > i) ? r.at(i, j - 1) : Rational(-1);
  Rational right = (j > i + 1) ? r.at(i + 1, j) : Rational(-1);
  return Rational(q) * rational_max(left, right) + Rational(j - i) * mA_block.at(i, j);
}

// Least integer > threshold with gcd(R, p) = 1 and R >= 1.
inline int64_t choose_R(const Rational& threshold, int64_t p) {
  int64_t r = threshold.floor() + 1;
  if (r < 1) r = 1;
  if (r % p == 0) ++r;
  return r;
}

}  // namespace utbreaks

#endif  // UTBREAKS_WEIGHTS_HPP
