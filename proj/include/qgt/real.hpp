#pragma once

// Real number tiers. Verification paths run on MPFR-backed floats with a
// fixed decimal precision chosen at compile time (25/50/100 digit tiers);
// sampling paths run on plain double. Everything downstream is templated
// on the Real type, so adding a tier is a one-line typedef.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>

namespace qgt {

namespace bmp = boost::multiprecision;

template <unsigned Digits>
using static_real = bmp::number<bmp::mpfr_float_backend<Digits>, bmp::et_off>;

using real25 = static_real<25>;
using real50 = static_real<50>;
using real100 = static_real<100>;

template <class Real>
constexpr int digits10_of() {
  return std::numeric_limits<Real>::digits10;
}

// Parse a decimal string straight into Real, never through a binary-float
// intermediate (doubles would corrupt t = q^tau constructions).
template <class Real>
Real parse_real(const std::string& s) {
  if constexpr (std::is_same_v<Real, double>) {
    return std::stod(s);
  } else {
    return Real(s);
  }
}

// Deterministic decimal rendering used by all serializers.
template <class Real>
std::string to_decimal_string(const Real& x, int digits = 0) {
  std::ostringstream os;
  if (digits <= 0) digits = digits10_of<Real>() + 3;
  os.precision(digits);
  os << std::scientific << x;
  return os.str();
}

template <class Real>
Real pow10(int e) {
  Real r(10);
  using std::pow;
  return pow(r, e);
}

// Integer power by squaring; exponent may be negative.
template <class Real>
Real ipow(Real base, long long e) {
  if (e < 0) return Real(1) / ipow(base, -e);
  Real acc(1);
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

}  // namespace qgt
