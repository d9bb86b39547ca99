#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "error.hpp"

namespace walras {

// Exact rational. mpq_class keeps values canonical after every arithmetic
// operation; values built from raw numerator/denominator pairs go through
// make_scalar, which canonicalizes.
using Scalar = mpq_class;

inline Scalar make_scalar(long num, long den = 1) {
  require(den != 0, ErrorKind::precondition, "zero denominator");
  Scalar r{mpz_class(num), mpz_class(den)};
  r.canonicalize();
  return r;
}

inline Scalar pow_scalar(const Scalar& base, unsigned e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Scalar r{num, den};
  r.canonicalize();
  return r;
}

inline Scalar pow2(int e) {
  Scalar r{1};
  if (e >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned>(e));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned>(-e));
  }
  return r;
}

// Serialized form is always "p/q", including integers ("9/1").
inline std::string to_string(const Scalar& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

inline double to_double(const Scalar& x) { return x.get_d(); }

inline bool is_integer(const Scalar& x) { return x.get_den() == 1; }

// Accepts "p/q", "-p/q" and plain integers.
inline Scalar parse_scalar(std::string_view text) {
  auto digits = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
  };
  std::string_view num = text, den = "1";
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  if (!digits(num, true) || !digits(den, false)) {
    fail(ErrorKind::parse, "malformed rational '" + std::string(text) + "'");
  }
  std::string n(num);
  if (!n.empty() && n[0] == '+') n.erase(0, 1);
  mpz_class zn(n), zd{std::string(den)};
  if (zd == 0) fail(ErrorKind::parse, "zero denominator in '" + std::string(text) + "'");
  Scalar r{zn, zd};
  r.canonicalize();
  return r;
}

}  // namespace walras
