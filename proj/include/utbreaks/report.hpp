/**
 * @file utbreaks/report.hpp
 * @brief Deterministic report text for the compute and explain commands,
 *        plus the exit-code mapping shared with the CLI.
 * @copyright Apache License 2.0
 */
#ifndef UTBREAKS_REPORT_HPP
#define UTBREAKS_REPORT_HPP

#include <sstream>
#include <string>

#include "utbreaks/engine.hpp"
#include "utbreaks/instance.hpp"

namespace utbreaks {

struct CliFlags {
  bool allow_unverified = false;
  bool strict = false;
  int64_t precision_ceiling = 64;
  int64_t trials = 25;
  uint64_t seed = 1;
};

struct CliResult {
  std::string out;
  int exit_code = 0;
};

// exit codes: 0 ok; 2 parse; 3 normalization extended the field (--strict);
// 4 precision ceiling; 5 hypothesis violation
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitExtendedStrict = 3;
inline constexpr int kExitPrecision = 4;
inline constexpr int kExitHypothesis = 5;

inline std::string format_pair_line(const PairRecord& rec) {
  std::ostringstream o;
  o << "break " << rec.i << " " << rec.j << " r=" << rec.r.num() << "/" << rec.r.den()
    << " m=" << (rec.m ? std::to_string(*rec.m) : std::string("-")) << " mu=" << rec.mu
    << " v=" << rec.v_s << " N=" << rec.N << " q=" << rec.q << " R=" << rec.R
    << " status=" << status_name(rec.status);
  return o.str();
}

inline std::string format_break_report(const BreakReport& rep) {
  std::ostringstream o;
  if (rep.field_extended)
    o << "# warning: coefficient field extended (degree p) during normalization\n";
  for (const auto& rec : rep.pairs) o << format_pair_line(rec) << "\n";
  for (const auto& [i, j] : rep.skipped)
    o << "# notice: pair " << i << " " << j << " omitted: j-i=" << (j - i) << " exceeds p+1="
      << (rep.p + 1) << "; rerun with --allow-unverified\n";
  return o.str();
}

inline CliResult run_compute(const std::string& instance_text, const CliFlags& flags) {
  CliResult res;
  try {
    Instance inst = parse_instance(instance_text);
    FieldRef ctx = inst.make_ctx();
    TriMatrix a = inst.matrix(ctx);
    EngineOptions opt;
    opt.allow_unverified = flags.allow_unverified;
    opt.precision_ceiling = flags.precision_ceiling;
    BreakReport rep = compute_breaks(a, opt);
    res.out = format_break_report(rep);
    res.exit_code = (rep.field_extended && flags.strict) ? kExitExtendedStrict : kExitOk;
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

// Human-readable derivation trace: the weight tables with the optimal
// partitions, the N/q selection, per-level R and starting precision caps,
// and the resulting breaks. No side effects.
inline CliResult run_explain(const std::string& instance_text, const CliFlags& flags) {
  CliResult res;
  try {
    Instance inst = parse_instance(instance_text);
    FieldRef ctx = inst.make_ctx();
    TriMatrix a = inst.matrix(ctx);

    DefiningMatrix D = normalize_auto(a);
    WeightTable wt = weights_from_matrix(D.A);
    auto [N, q] = choose_N(D.ctx->p(), D.A.n(), wt.mA);

    std::ostringstream o;
    o << "instance p=" << inst.p << " k=" << inst.k << " n=" << inst.n << "\n";
    if (D.field_extended) o << "# field extended during normalization\n";
    for (int d = 1; d < inst.n; ++d) {
      for (int i = 1; i + d <= inst.n; ++i) {
        int j = i + d;
        o << "m " << i << " " << j << " = "
          << (wt.m.at(i, j) ? std::to_string(*wt.m.at(i, j)) : std::string("-")) << "\n";
      }
    }
    for (int d = 1; d < inst.n; ++d) {
      for (int i = 1; i + d <= inst.n; ++i) {
        int j = i + d;
        auto chain = wt.mu_partition(i, j);
        o << "mu(" << i << "," << j << ")=" << wt.mu.at(i, j) << " via ";
        for (size_t u = 0; u < chain.size(); ++u) {
          if (u) o << '<';
          o << chain[u];
        }
        if (chain.size() > 2) {
          o << " (";
          for (size_t u = 0; u + 1 < chain.size(); ++u) {
            if (u) o << '+';
            o << *wt.m.at(chain[u], chain[u + 1]);
          }
          o << ")";
        }
        o << "\n";
      }
    }
    o << "mA=" << wt.mA.str() << "\n";
    o << "N=" << N << " q=" << q << "\n";

    EngineOptions opt;
    opt.allow_unverified = flags.allow_unverified;
    opt.precision_ceiling = flags.precision_ceiling;
    BreakReport rep = compute_breaks(a, opt);
    for (const auto& [d, R] : rep.level_R) {
      int64_t cap = checked_index_add(checked_index_mul(rep.p, R), 1);
      o << "level " << d << " R=" << R << " cap=" << cap << "\n";
    }
    for (const auto& rec : rep.pairs)
      o << "r(" << rec.i << "," << rec.j << ")=" << rec.r.num() << "/" << rec.r.den() << "\n";
    res.out = o.str();
    res.exit_code = (rep.field_extended && flags.strict) ? kExitExtendedStrict : kExitOk;
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

#endif  // UTBREAKS_REPORT_HPP
