#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "walkcover/errors.hpp"

namespace walkcover {

using Integer = mpz_class;
using Rational = mpq_class;

inline Integer binomial(unsigned long n, unsigned long k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

inline Integer pow10(long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

inline Rational rational_pow(const Rational& base, unsigned long e) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
  return r;
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

// Accepts "3", "-2", "1.25", "2.5e-4", "7/3".
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  if (s.empty()) throw InputError("empty number");
  auto bad = [&] { return InputError("not a number: '" + std::string(text) + "'"); };

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash), den = s.substr(slash + 1);
    bool neg = false;
    if (!num.empty() && (num[0] == '-' || num[0] == '+')) {
      neg = num[0] == '-';
      num.remove_prefix(1);
    }
    if (!detail::all_digits(num) || !detail::all_digits(den)) throw bad();
    Integer n(std::string(num), 10), d(std::string(den), 10);
    if (d == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    Rational r(neg ? Integer(-n) : n, d);
    r.canonicalize();
    return r;
  }

  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view ex = s.substr(e + 1);
    bool eneg = false;
    if (!ex.empty() && (ex[0] == '-' || ex[0] == '+')) {
      eneg = ex[0] == '-';
      ex.remove_prefix(1);
    }
    if (!detail::all_digits(ex) || ex.size() > 6) throw bad();
    exponent = std::stol(std::string(ex));
    if (eneg) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (ip.empty() && fp.empty()) throw bad();
    if ((!ip.empty() && !detail::all_digits(ip)) || (!fp.empty() && !detail::all_digits(fp)))
      throw bad();
    digits = std::string(ip) + std::string(fp);
    exponent -= static_cast<long>(fp.size());
  } else {
    if (!detail::all_digits(s)) throw bad();
    digits = std::string(s);
  }
  Rational r{Integer(digits, 10)};
  if (exponent > 0) r *= Rational(pow10(exponent));
  if (exponent < 0) r /= Rational(pow10(-exponent));
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

enum class Rounding { nearest, down, up };

// Decimal rendering with `significant` digits. `down`/`up` round toward
// -inf/+inf so that a printed lower (upper) bound remains a lower (upper)
// bound of the exact value.
inline std::string to_decimal(const Rational& value, int significant = 24,
                              Rounding mode = Rounding::nearest) {
  if (value == 0) return "0";
  const bool neg = value < 0;
  Rational mag = neg ? Rational(-value) : value;

  long e = static_cast<long>(mpz_sizeinbase(mag.get_num_mpz_t(), 10)) -
           static_cast<long>(mpz_sizeinbase(mag.get_den_mpz_t(), 10));
  auto ten_pow = [](long k) {
    return k >= 0 ? Rational(pow10(k)) : Rational(Integer(1), pow10(-k));
  };
  while (ten_pow(e) > mag) --e;
  while (ten_pow(e + 1) <= mag) ++e;

  // Rounding direction in magnitude space.
  Rounding mag_mode = mode;
  if (neg && mode == Rounding::down) mag_mode = Rounding::up;
  else if (neg && mode == Rounding::up) mag_mode = Rounding::down;

  Integer scaled;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Rational q = mag * ten_pow(significant - 1 - e);
    Integer fl = q.get_num() / q.get_den();  // floor, q > 0
    Rational frac = q - Rational(fl);
    scaled = fl;
    if (mag_mode == Rounding::up && frac != 0) scaled += 1;
    if (mag_mode == Rounding::nearest && frac * 2 >= 1) scaled += 1;
    if (mpz_sizeinbase(scaled.get_mpz_t(), 10) > static_cast<std::size_t>(significant) &&
        scaled >= pow10(significant)) {
      ++e;
      continue;
    }
    break;
  }

  std::string d = scaled.get_str();
  std::string out;
  if (e >= -6 && e < 21) {
    const long point = e + 1;
    if (point <= 0) {
      out = "0." + std::string(static_cast<std::size_t>(-point), '0') + d;
    } else if (point >= static_cast<long>(d.size())) {
      out = d + std::string(static_cast<std::size_t>(point - static_cast<long>(d.size())), '0');
    } else {
      out = d.substr(0, static_cast<std::size_t>(point)) + "." +
            d.substr(static_cast<std::size_t>(point));
    }
  } else {
    out = d.substr(0, 1) + "." + d.substr(1) + "e" + std::to_string(e);
    auto epos = out.find('e');
    std::string mant = out.substr(0, epos), ex = out.substr(epos);
    while (!mant.empty() && mant.back() == '0') mant.pop_back();
    if (!mant.empty() && mant.back() == '.') mant.pop_back();
    return (neg ? "-" : "") + mant + ex;
  }
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return (neg ? "-" : "") + out;
}

}  // namespace walkcover
