#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace moldsched {

using Rat = mpq_class;
using Int = mpz_class;

#define MOLD_CHECK(cond, msg)                                  \
  do {                                                         \
    if (!(cond)) throw std::logic_error(std::string("internal check failed: ") + (msg)); \
  } while (0)

/// Signals that a component broke its stated contract (e.g. a dual
/// algorithm rejecting a target it must accept).
struct contract_violation : std::logic_error {
  explicit contract_violation(const std::string& what) : std::logic_error(what) {}
};

inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat make_rat(long num, long den = 1) { return make_rat(Int(num), Int(den)); }

// gmpxx has no long long overloads; on this LP64 target long carries 64 bits.
static_assert(sizeof(long) == 8, "moldsched requires an LP64 platform");

inline Int int_of(long long v) { return Int(static_cast<long>(v)); }
inline Rat rat_of(long long v) { return Rat(static_cast<long>(v)); }

inline long long to_ll(const Int& v) {
  MOLD_CHECK(v.fits_slong_p(), "integer out of 64-bit range");
  return v.get_si();
}

/// Parses "p/q" or a plain integer string.
inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    return make_rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed rational: \"" + s + "\"");
  }
}

inline std::string rat_str(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Decimal rendering with the given number of significant digits (round to nearest).
inline std::string rat_decimal(const Rat& r, int sig_digits = 12) {
  if (r == 0) return "0";
  std::string sign = r < 0 ? "-" : "";
  Rat a = abs(r);
  // find e with 10^e <= a < 10^(e+1)
  int e = 0;
  Rat p(1);
  if (a >= 1) {
    while (p * 10 <= a) { p *= 10; ++e; }
  } else {
    while (p > a) { p /= 10; --e; }
  }
  Int scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned>(sig_digits - 1));
  // digits = round(a / 10^e * 10^(sig-1))
  Rat scaled = a * scale;
  for (int i = 0; i < e; ++i) scaled /= 10;
  for (int i = 0; i > e; --i) scaled *= 10;
  Int digits = Int((scaled.get_num() * 2 + scaled.get_den()) / (scaled.get_den() * 2));
  std::string ds = digits.get_str();
  if (static_cast<int>(ds.size()) > sig_digits) { ds.pop_back(); ++e; }  // rounding carried over
  std::string mantissa = ds.substr(0, 1) + (ds.size() > 1 ? "." + ds.substr(1) : "");
  // trim trailing zeros
  if (mantissa.find('.') != std::string::npos) {
    while (mantissa.back() == '0') mantissa.pop_back();
    if (mantissa.back() == '.') mantissa.pop_back();
  }
  if (e == 0) return sign + mantissa;
  return sign + mantissa + "e" + (e > 0 ? "+" : "") + std::to_string(e);
}

inline Int rat_floor(const Rat& r) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return q;
}

inline Int rat_ceil(const Rat& r) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return q;
}

inline Rat rat_pow(Rat base, unsigned long e) {
  Rat out(1);
  while (e) {
    if (e & 1) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

inline Int int_pow(Int base, unsigned long e) {
  Int out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

/// floor(sqrt(v)) for v >= 0.
inline Int isqrt(const Int& v) {
  MOLD_CHECK(v >= 0, "isqrt of negative");
  Int r;
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  return r;
}

/// floor(v^(1/k)) for v >= 0, k >= 1.
inline Int iroot(const Int& v, unsigned long k) {
  MOLD_CHECK(v >= 0 && k >= 1, "iroot domain");
  Int r;
  mpz_root(r.get_mpz_t(), v.get_mpz_t(), k);
  return r;
}

/// Rational lower bound for sqrt(x), x >= 0, with absolute error < 2^-bits relative-ish
/// (the bound is floor(sqrt(x * S^2)) / S scaled by the denominator, S = 2^bits).
inline Rat sqrt_lower(const Rat& x, unsigned bits = 30) {
  MOLD_CHECK(x >= 0, "sqrt of negative");
  Int s = Int(1) << bits;
  // sqrt(a/b) = sqrt(a*b)/b
  Int v = x.get_num() * x.get_den() * s * s;
  return make_rat(isqrt(v), x.get_den() * s);
}

/// Rational upper bound for sqrt(x); exact when x*S^2 is a perfect square.
inline Rat sqrt_upper(const Rat& x, unsigned bits = 30) {
  MOLD_CHECK(x >= 0, "sqrt of negative");
  Int s = Int(1) << bits;
  Int v = x.get_num() * x.get_den() * s * s;
  Int r = isqrt(v);
  if (r * r != v) r += 1;
  return make_rat(r, x.get_den() * s);
}

inline double rat_double(const Rat& r) { return r.get_d(); }

}  // namespace moldsched
