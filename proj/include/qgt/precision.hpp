#pragma once

#include "qgt/real.hpp"

#include <stdexcept>

namespace qgt {

// Target precision for a computation: sig_digits drives series cutoffs,
// eps is the absolute truncation tolerance (defaults to 10^-sig_digits but
// can be relaxed when a caller only needs, say, 1e-12 tails).
template <class Real>
struct Precision {
  int sig_digits;
  Real eps;

  Precision(int sig, Real e) : sig_digits(sig), eps(e) {
    if (sig < 15) throw std::invalid_argument("Precision: sig_digits must be >= 15");
    if (!(eps > 0)) throw std::invalid_argument("Precision: eps must be > 0");
  }

  explicit Precision(int sig) : Precision(sig, pow10<Real>(-sig)) {}

  // Full precision of the Real tier in use.
  static Precision standard() {
    int d = digits10_of<Real>();
    if (d < 15) d = 15;
    return Precision(d);
  }

  // Same working digits, relaxed truncation tolerance.
  Precision with_eps(Real e) const { return Precision(sig_digits, e); }
};

}  // namespace qgt
