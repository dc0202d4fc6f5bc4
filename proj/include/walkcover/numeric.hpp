#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <mpfr.h>

#include <cmath>
#include <string_view>

#include "walkcover/rational.hpp"

namespace walkcover {

// Variable-precision binary float; precision is a process-wide setting
// (see set_float_precision_bits).
using Mpfr = boost::multiprecision::mpfr_float;

enum class Backend { rational, float64, mpfr };

inline std::string_view backend_name(Backend b) {
  return b == Backend::rational ? "rational" : "float";
}

// Sets the working precision used by newly constructed Mpfr values.
inline void set_float_precision_bits(unsigned bits) {
  const unsigned digits10 = static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
  Mpfr::default_precision(digits10);
}

template <class S>
struct Numeric;

template <>
struct Numeric<Rational> {
  static constexpr bool exact = true;
  static constexpr Backend backend = Backend::rational;
  static Rational from(const Rational& r) { return r; }
  static Rational to_rational(const Rational& r) { return r; }
};

template <>
struct Numeric<double> {
  static constexpr bool exact = false;
  static constexpr Backend backend = Backend::float64;
  static double from(const Rational& r) { return r.get_d(); }
  static Rational to_rational(double d) { return Rational(d); }
};

template <>
struct Numeric<Mpfr> {
  static constexpr bool exact = false;
  static constexpr Backend backend = Backend::mpfr;
  static Mpfr from(const Rational& r) {
    Mpfr x;
    mpfr_set_q(x.backend().data(), r.get_mpq_t(), MPFR_RNDN);
    return x;
  }
  static Rational to_rational(const Mpfr& x) {
    Rational r;
    mpfr_get_q(r.get_mpq_t(), x.backend().data());
    return r;
  }
};

template <class S>
concept Scalar = requires { Numeric<S>::exact; };

}  // namespace walkcover
