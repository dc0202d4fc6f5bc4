#pragma once

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "walkcover/estimate.hpp"
#include "walkcover/rational.hpp"

namespace walkcover {

namespace detail {

// mpq_get_d truncates toward zero; nudge when rounding up is required.
inline double to_double(const Rational& r, Rounding mode) {
  double d = r.get_d();
  if (mode == Rounding::up && Rational(d) < r) d = std::nextafter(d, std::numeric_limits<double>::infinity());
  if (mode == Rounding::down && Rational(d) > r) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
  return d;
}

}  // namespace detail

// Rational reports carry decimal strings (lower rounded down, upper up);
// float reports carry JSON numbers.
inline nlohmann::ordered_json report_json(const EstimateReport& r) {
  nlohmann::ordered_json j;
  auto value = [&](const Rational& x, Rounding mode) -> nlohmann::ordered_json {
    if (r.exact) return to_decimal(x, 24, mode);
    return detail::to_double(x, mode);
  };
  j["mode"] = r.mode;
  j["n"] = r.n;
  j["start"] = r.start;
  j["estimate"] = value(r.estimate, Rounding::nearest);
  j["lower"] = value(r.lower, Rounding::down);
  j["upper"] = value(r.upper, Rounding::up);
  j["trunc_n"] = r.trunc_n;
  j["delta_apriori"] = r.delta_apriori;
  j["delta_empirical"] = value(r.delta_empirical, Rounding::up);
  j["backend"] = std::string(backend_name(r.backend));
  j["exact"] = r.exact;
  j["wallclock_ms"] = std::round(r.wallclock_ms * 1000.0) / 1000.0;
  return j;
}

inline std::string report_text(const EstimateReport& r) {
  std::ostringstream os;
  auto line = [&](const char* key, const std::string& v) { os << std::left << std::setw(16) << key << v << '\n'; };
  auto num = [&](const Rational& x, Rounding mode) {
    if (r.exact) return to_decimal(x, 24, mode);
    std::ostringstream s;
    s << std::setprecision(17) << detail::to_double(x, mode);
    return s.str();
  };
  line("mode", r.mode);
  line("n", std::to_string(r.n));
  line("start", r.start);
  line("estimate", num(r.estimate, Rounding::nearest));
  line("lower", num(r.lower, Rounding::down));
  line("upper", num(r.upper, Rounding::up));
  line("E1", num(r.e_lower, Rounding::nearest));
  line("additive_bound", num(r.additive_bound, Rounding::up));
  line("trunc_n", std::to_string(r.trunc_n));
  {
    std::ostringstream s;
    s << std::setprecision(6) << r.delta_apriori;
    line("delta_apriori", s.str());
  }
  line("delta_empirical", num(r.delta_empirical, Rounding::up));
  std::string backend(backend_name(r.backend));
  if (!r.exact) backend += " (" + std::to_string(r.precision_bits) + " bits)";
  line("backend", backend);
  {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << r.wallclock_ms;
    line("wallclock_ms", s.str());
  }
  return os.str();
}

}  // namespace walkcover
