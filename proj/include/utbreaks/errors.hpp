/**
 * @file utbreaks/errors.hpp
 * @brief Exception taxonomy shared by all modules.
 * @copyright Apache License 2.0
 */
#ifndef UTBREAKS_ERRORS_HPP
#define UTBREAKS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace utbreaks {

// Instance file is syntactically or semantically malformed (CLI exit 2).
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A required coefficient or valuation lies at or beyond the tracked
// precision and the adaptive protocol has hit its ceiling (CLI exit 4).
class precision_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The input provably cannot define a UT_n(F_p)-extension: a superdiagonal
// entry vanishes under normalization, or an S_R entry is certified zero
// below the break-detection bound (CLI exit 5).
class hypothesis_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact-arithmetic range exceeded (indices or q beyond guarded bounds).
class overflow_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace utbreaks

#endif  // UTBREAKS_ERRORS_HPP
