#pragma once

// q-calculus primitives: finite and infinite q-Pochhammer symbols, the
// generalized (q,t)-Pochhammer over a Young diagram, the Jackson q-integral,
// and the normalizing constants C_N, C~_N.

#include "qgt/precision.hpp"
#include "qgt/real.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace qgt::qcalc {

template <class Real>
void require_q(const Real& q) {
  if (!(q > 0 && q < 1)) throw std::domain_error("q must lie in (0,1)");
}

template <class Real>
struct QPair {
  Real q;
  Real t;

  QPair(Real q_, Real t_) : q(std::move(q_)), t(std::move(t_)) {
    require_q(q);
    if (!(t > 0 && t < 1)) throw std::domain_error("t must lie in (0,1)");
  }

  // t = q^tau constructed exactly (same bits every time).
  static QPair with_tau(Real q_, int tau) {
    require_q(q_);
    if (tau < 1) throw std::domain_error("tau must be a positive integer");
    Real t_ = ipow(q_, tau);
    return QPair(std::move(q_), std::move(t_));
  }
};

// (z;q)_m = prod_{n=0}^{m-1} (1 - z q^n). Exact product of m factors.
template <class Real>
Real qpoch_finite(const Real& z, const Real& q, std::int64_t m) {
  require_q(q);
  if (m < 0) throw std::domain_error("qpoch_finite: m must be >= 0");
  Real acc(1), zq = z;
  for (std::int64_t n = 0; n < m; ++n) {
    acc *= Real(1) - zq;
    if (acc == 0) return acc;
    zq *= q;
  }
  return acc;
}

// (z;q)_inf = prod_{n>=0} (1 - z q^n), truncated once the geometric tail
// bound |log prod_{n>=M}| <= 2|z|q^M/(1-q) certifies the requested relative
// accuracy. Exact zeros (z in {1, q^-1, ...}) short-circuit to 0.
template <class Real>
Real qpoch_infinite(const Real& z, const Real& q, const Precision<Real>& prec) {
  require_q(q);
  if (z == 0) return Real(1);
  using std::abs;
  using std::ceil;
  using std::log;
  const Real tol = pow10<Real>(-prec.sig_digits);
  // smallest M with |z| q^M <= min(1/2, tol*(1-q)/2)
  Real thresh = tol * (1 - q) / 2;
  if (thresh > Real(1) / 2) thresh = Real(1) / 2;
  Real m_est = (log(thresh) - log(abs(z))) / log(q);
  std::int64_t M = m_est <= 0 ? 0 : static_cast<std::int64_t>(ceil(m_est));
  Real acc(1), zq = z;
  for (std::int64_t n = 0; n <= M; ++n) {
    const Real f = Real(1) - zq;
    if (f == 0) return Real(0);
    acc *= f;
    zq *= q;
  }
  return acc;
}

// (z;q,t)_nu = prod over boxes (i,j) of nu of (1 - z q^{j-1} t^{1-i}).
// Shape is any type exposing length() and part(i) (1-based row lengths).
template <class Real, class Shape>
Real gen_pochhammer(const Real& z, const QPair<Real>& qp, const Shape& nu) {
  Real acc(1);
  for (int i = 1; i <= nu.length(); ++i) {
    Real base = z * ipow(qp.t, static_cast<long long>(1 - i));
    for (std::int64_t j = 1; j <= nu.part(i); ++j) {
      acc *= Real(1) - base;
      if (acc == 0) return acc;
      base *= qp.q;
    }
  }
  return acc;
}

template <class Real>
struct QIntegralResult {
  Real value;
  bool converged;
};

// Jackson q-integral over [0, z]: (1-q) sum_{n>=0} f(z q^n) z q^n.
// Terms are cut once |f(zq^n) z q^n| stays below eps*(1-q) for a few
// consecutive n (f may pass through zero on the grid).
template <class Real, class F>
QIntegralResult<Real> qintegral_zero(F&& f, const Real& z, const Real& q,
                                     const Precision<Real>& prec,
                                     std::int64_t max_terms = 2'000'000) {
  require_q(q);
  using std::abs;
  Real sum(0), w = z;
  const Real cut = prec.eps * (1 - q);
  int below = 0;
  for (std::int64_t n = 0; n < max_terms; ++n) {
    const Real term = f(w) * w;
    sum += term;
    below = (abs(term) < cut) ? below + 1 : 0;
    if (below >= 4) return {(1 - q) * sum, true};
    w *= q;
  }
  return {(1 - q) * sum, false};
}

// Jackson q-integral over [z_lo, z_hi], as the difference of two one-sided
// integrals. Linear in f and antisymmetric under endpoint swap.
template <class Real, class F>
QIntegralResult<Real> qintegral(F&& f, const Real& z_lo, const Real& z_hi, const Real& q,
                                const Precision<Real>& prec,
                                std::int64_t max_terms = 2'000'000) {
  auto hi = qintegral_zero(f, z_hi, q, prec, max_terms);
  auto lo = qintegral_zero(f, z_lo, q, prec, max_terms);
  return {hi.value - lo.value, hi.converged && lo.converged};
}

// Normalizing constants:
//   C~_N = (t;q)_inf^N / ( (t^N;q)_inf (q;q)_inf^{N-1} ),  C_N = C~_N / (1-q)^{N-1}.
// Both strictly positive for q,t in (0,1).
template <class Real>
struct NormConstants {
  Real c;        // C_N
  Real c_tilde;  // C~_N
};

template <class Real>
NormConstants<Real> norm_constants(int N, const QPair<Real>& qp, const Precision<Real>& prec) {
  if (N < 1) throw std::domain_error("norm_constants: N must be >= 1");
  const Real pt = qpoch_infinite(qp.t, qp.q, prec);
  const Real ptN = qpoch_infinite(ipow(qp.t, N), qp.q, prec);
  const Real pq = qpoch_infinite(qp.q, qp.q, prec);
  const Real c_tilde = ipow(pt, N) / (ptN * ipow(pq, N - 1));
  const Real c = c_tilde / ipow(Real(1) - qp.q, N - 1);
  return {c, c_tilde};
}

}  // namespace qgt::qcalc
