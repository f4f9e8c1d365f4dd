/**
 * @file utbreaks/instance.hpp
 * @brief Line-oriented plain-text instance format (bit-exact):
 *
 *   # comment
 *   p <prime>
 *   k <int>
 *   modulus <c0>,<c1>,...,<ck>      # required iff k>1; monic: ck=1
 *   n <int>
 *   entry <i> <j> : <l>:<coeff>[,<l>:<coeff>...]
 *
 * Coefficients: k = 1 -> decimal in [0,p); k > 1 -> coordinates joined by
 * ';' (c0 = constant term). Undeclared entries are zero.
 * @copyright Apache License 2.0
 */
#ifndef UTBREAKS_INSTANCE_HPP
#define UTBREAKS_INSTANCE_HPP

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "utbreaks/trimatrix.hpp"

namespace utbreaks {

struct Instance {
  int64_t p = 0;
  int k = 1;
  std::optional<FpPoly> modulus;
  int n = 0;
  struct Entry {
    int i = 0, j = 0;
    std::vector<std::pair<int64_t, std::vector<uint32_t>>> terms;  // ascending l
  };
  std::vector<Entry> entries;

  FieldRef make_ctx() const {
    if (k == 1) return FieldCtx::make_prime(p);
    return FieldCtx::make(p, *modulus);
  }

  TriMatrix matrix(const FieldRef& ctx) const {
    TriMatrix a(ctx, n, 1);
    for (const auto& e : entries) {
      std::vector<LaurentSeries::Term> terms;
      terms.reserve(e.terms.size());
      for (const auto& [l, coords] : e.terms) terms.emplace_back(l, FieldElement(ctx, coords));
      a.set_entry(e.i, e.j, LaurentSeries::from_terms(ctx, std::move(terms)));
    }
    return a;
  }
};

namespace detail {

inline int64_t parse_int(const std::string& tok, int line, const char* what) {
  try {
    size_t pos = 0;
    int64_t v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw parse_error(std::string("bad ") + what + " '" + tok + "'", line);
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<uint32_t> parse_coeff(const std::string& tok, int64_t p, int k, int line) {
  std::vector<std::string> parts = split(tok, ';');
  if (k == 1 && parts.size() != 1)
    throw parse_error("coefficient must be a single residue when k=1", line);
  if (k > 1 && static_cast<int>(parts.size()) != k)
    throw parse_error("coefficient needs exactly " + std::to_string(k) + " coordinates", line);
  std::vector<uint32_t> coords;
  for (const auto& s : parts) {
    int64_t v = parse_int(s, line, "coefficient coordinate");
    if (v < 0 || v >= p) throw parse_error("coefficient coordinate out of [0,p)", line);
    coords.push_back(static_cast<uint32_t>(v));
  }
  return coords;
}

}  // namespace detail

inline Instance parse_instance(const std::string& text) {
  Instance inst;
  enum Stage { kNeedP, kNeedK, kNeedModOrN, kNeedN, kEntries } stage = kNeedP;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  PairTable<char> seen;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
    std::istringstream ls(s);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    if (key == "p") {
      if (stage != kNeedP) throw parse_error("unexpected 'p' line", line);
      if (tok.size() != 2) throw parse_error("usage: p <prime>", line);
      inst.p = detail::parse_int(tok[1], line, "p");
      if (!fp::is_prime(inst.p)) throw parse_error("p = " + tok[1] + " is not prime", line);
      stage = kNeedK;
    } else if (key == "k") {
      if (stage != kNeedK) throw parse_error("unexpected 'k' line", line);
      if (tok.size() != 2) throw parse_error("usage: k <int>", line);
      int64_t k = detail::parse_int(tok[1], line, "k");
      if (k < 1 || k > 64) throw parse_error("k out of range", line);
      inst.k = static_cast<int>(k);
      stage = inst.k > 1 ? kNeedModOrN : kNeedN;
    } else if (key == "modulus") {
      if (stage != kNeedModOrN) throw parse_error("modulus line only allowed when k > 1", line);
      if (tok.size() != 2) throw parse_error("usage: modulus <c0>,...,<ck>", line);
      FpPoly mod;
      for (const auto& c : detail::split(tok[1], ',')) {
        int64_t v = detail::parse_int(c, line, "modulus coefficient");
        if (v < 0 || v >= inst.p) throw parse_error("modulus coefficient out of [0,p)", line);
        mod.push_back(static_cast<uint32_t>(v));
      }
      if (static_cast<int>(mod.size()) != inst.k + 1)
        throw parse_error("modulus needs k+1 coefficients", line);
      if (mod.back() != 1) throw parse_error("modulus must be monic (ck = 1)", line);
      inst.modulus = std::move(mod);
      stage = kNeedN;
    } else if (key == "n") {
      if (stage != kNeedN && stage != kNeedModOrN)
        throw parse_error("unexpected 'n' line", line);
      if (stage == kNeedModOrN) throw parse_error("modulus line required before n when k > 1", line);
      if (tok.size() != 2) throw parse_error("usage: n <int>", line);
      int64_t n = detail::parse_int(tok[1], line, "n");
      if (n < 2 || n > 16) throw parse_error("n out of range [2,16]", line);
      inst.n = static_cast<int>(n);
      seen = PairTable<char>(inst.n, 0);
      stage = kEntries;
    } else if (key == "entry") {
      if (stage != kEntries) throw parse_error("entry line before header complete", line);
      if (tok.size() != 5 || tok[3] != ":")
        throw parse_error("usage: entry <i> <j> : <l>:<coeff>[,...]", line);
      int64_t i = detail::parse_int(tok[1], line, "row index");
      int64_t j = detail::parse_int(tok[2], line, "column index");
      if (i < 1 || j <= i || j > inst.n)
        throw parse_error("entry indices must satisfy 1 <= i < j <= n", line);
      if (seen.at(static_cast<int>(i), static_cast<int>(j)) != 0)
        throw parse_error("duplicate entry " + std::to_string(i) + " " + std::to_string(j), line);
      seen.at(static_cast<int>(i), static_cast<int>(j)) = 1;
      Instance::Entry ent;
      ent.i = static_cast<int>(i);
      ent.j = static_cast<int>(j);
      std::optional<int64_t> prev;
      for (const auto& term : detail::split(tok[4], ',')) {
        auto colon = term.find(':');
        if (colon == std::string::npos) throw parse_error("term needs the form l:coeff", line);
        int64_t l = detail::parse_int(term.substr(0, colon), line, "term index");
        auto coords = detail::parse_coeff(term.substr(colon + 1), inst.p, inst.k, line);
        bool all_zero = true;
        for (auto c : coords)
          if (c) all_zero = false;
        if (all_zero) throw parse_error("zero coefficient term", line);
        if (prev && !(l > *prev)) throw parse_error("term indices must strictly increase", line);
        prev = l;
        ent.terms.emplace_back(l, std::move(coords));
      }
      if (ent.terms.empty()) throw parse_error("entry without terms", line);
      inst.entries.push_back(std::move(ent));
    } else {
      throw parse_error("unknown directive '" + key + "'", line);
    }
  }
  if (stage != kEntries) throw parse_error("incomplete instance header", line);
  inst.make_ctx();  // rejects non-prime p and reducible moduli at parse time
  return inst;
}

// Canonical form: header, then entries sorted by (i, j).
inline std::string format_instance(const Instance& inst) {
  std::ostringstream out;
  out << "p " << inst.p << "\n";
  out << "k " << inst.k << "\n";
  if (inst.k > 1) {
    out << "modulus ";
    for (size_t i = 0; i < inst.modulus->size(); ++i) {
      if (i) out << ',';
      out << (*inst.modulus)[i];
    }
    out << "\n";
  }
  out << "n " << inst.n << "\n";
  std::vector<const Instance::Entry*> es;
  for (const auto& e : inst.entries) es.push_back(&e);
  std::sort(es.begin(), es.end(), [](const Instance::Entry* a, const Instance::Entry* b) {
    return std::pair(a->i, a->j) < std::pair(b->i, b->j);
  });
  for (const auto* e : es) {
    out << "entry " << e->i << " " << e->j << " : ";
    for (size_t t = 0; t < e->terms.size(); ++t) {
      if (t) out << ',';
      out << e->terms[t].first << ':';
      const auto& coords = e->terms[t].second;
      for (size_t c = 0; c < coords.size(); ++c) {
        if (c) out << ';';
        out << coords[c];
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace utbreaks

#endif  // UTBREAKS_INSTANCE_HPP
