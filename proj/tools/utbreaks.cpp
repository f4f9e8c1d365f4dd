/**
 * @file tools/utbreaks.cpp
 * @brief Batch CLI: compute | verify | explain on a plain-text instance.
 * @copyright Apache License 2.0
 */
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "utbreaks/report.hpp"
#include "utbreaks/verify.hpp"

namespace {

constexpr int kExitUsage = 64;

void usage(std::ostream& o) {
  o << "usage: utbreaks <compute|verify|explain> <instance-file> [flags]\n"
       "\n"
       "flags:\n"
       "  --allow-unverified        compute pairs with j-i > p+1 (marked unverified-range)\n"
       "  --strict                  exit 3 when normalization enlarges the field\n"
       "  --precision-ceiling <int> max growth factor of the precision cap (default 64)\n"
       "  --trials <int>            trials per randomized invariant in verify (default 25)\n"
       "  --seed <int>              RNG seed for verify (default 1)\n"
       "\n"
       "exit codes: 0 ok; 2 parse error; 3 field extended under --strict;\n"
       "            4 precision ceiling; 5 hypothesis violation\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() < 2) {
    usage(std::cerr);
    return kExitUsage;
  }
  std::string cmd = args[0];
  std::string path = args[1];
  utbreaks::CliFlags flags;
  for (size_t i = 2; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto next_int = [&](int64_t& out) {
      if (i + 1 >= args.size()) {
        usage(std::cerr);
        exit(kExitUsage);
      }
      out = std::stoll(args[++i]);
    };
    if (a == "--allow-unverified") {
      flags.allow_unverified = true;
    } else if (a == "--strict") {
      flags.strict = true;
    } else if (a == "--precision-ceiling") {
      next_int(flags.precision_ceiling);
    } else if (a == "--trials") {
      next_int(flags.trials);
    } else if (a == "--seed") {
      int64_t s = 0;
      next_int(s);
      flags.seed = static_cast<uint64_t>(s);
    } else {
      std::cerr << "unknown flag: " << a << "\n";
      usage(std::cerr);
      return kExitUsage;
    }
  }

  std::ifstream f(path);
  if (!f) {
    std::cerr << "error: cannot open " << path << "\n";
    return utbreaks::kExitParse;
  }
  std::stringstream buf;
  buf << f.rdbuf();
  std::string text = buf.str();

  utbreaks::CliResult res;
  if (cmd == "compute") {
    res = utbreaks::run_compute(text, flags);
  } else if (cmd == "verify") {
    res = utbreaks::run_verify(text, flags);
  } else if (cmd == "explain") {
    res = utbreaks::run_explain(text, flags);
  } else {
    usage(std::cerr);
    return kExitUsage;
  }
  std::cout << res.out;
  return res.exit_code;
}
