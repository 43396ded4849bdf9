#pragma once

// Macdonald polynomial evaluation at real points via the branching
// recursion P_{nu|N}(x_1..x_N) = sum_{mu interlacing nu} psi_{nu/mu}
// x_N^{|nu|-|mu|} P_{mu|N-1}(x_1..x_{N-1}), monic-monomial normalization.
// Also: the symmetric-function value on infinite configurations, principal
// specializations, the one-row Q function, and the Laurent (signature)
// extension via coordinate shifts.

#include "qgt/lattice.hpp"
#include "qgt/precision.hpp"
#include "qgt/qcalc.hpp"
#include "qgt/shapes.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qgt::macdonald {

using shapes::coord_t;
using shapes::Partition;
using shapes::Signature;

template <class Real>
struct MacdonaldValue {
  Real value;
  Real cert;  // absolute error bound; 0 for finite exact-input evaluation
};

// Evaluation context with per-call memoization. Gelfand-Tsetlin pattern
// counts grow quickly, so a node guard caps runaway instances.
template <class Real>
class Evaluator {
 public:
  Evaluator(qcalc::QPair<Real> qp, std::uint64_t max_nodes = 50'000'000)
      : qp_(std::move(qp)), max_nodes_(max_nodes) {}

  // P_{nu|N} at (xs[0], ..., xs[N-1]).
  Real eval(const Partition& nu, const std::vector<Real>& xs) {
    if (nu.length() > static_cast<int>(xs.size()))
      throw std::invalid_argument("macdonald::eval: length(nu) exceeds number of variables");
    xs_ = &xs;
    memo_.clear();
    return eval_rec(nu, static_cast<int>(xs.size()));
  }

  // Shared-memo batch evaluation at one point set.
  std::vector<Real> eval_set(const std::vector<Partition>& nus, const std::vector<Real>& xs) {
    xs_ = &xs;
    memo_.clear();
    std::vector<Real> out;
    out.reserve(nus.size());
    for (const Partition& nu : nus) {
      if (nu.length() > static_cast<int>(xs.size()))
        throw std::invalid_argument("macdonald::eval_set: length(nu) exceeds number of variables");
      out.push_back(eval_rec(nu, static_cast<int>(xs.size())));
    }
    return out;
  }

 private:
  Real eval_rec(const Partition& nu, int n) {
    if (nu.length() > n) return Real(0);
    if (n == 0) return Real(1);
    if (nu.length() == 0) return Real(1);
    const auto key = std::make_pair(nu, n);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (++nodes_ > max_nodes_)
      throw std::runtime_error("macdonald::eval: pattern-count guard exceeded");
    const Real& xn = (*xs_)[static_cast<std::size_t>(n - 1)];
    Real acc(0);
    for (const Partition& mu : shapes::sub_interlacing(nu)) {
      const Real p = eval_rec(mu, n - 1);
      if (p == 0 && xn == 0) continue;
      acc += psi(nu, mu) * ipow(xn, nu.weight() - mu.weight()) * p;
    }
    memo_.emplace(key, acc);
    return acc;
  }

  Real psi(const Partition& la, const Partition& mu) {
    const auto key = std::make_pair(la, mu);
    if (auto it = psi_memo_.find(key); it != psi_memo_.end()) return it->second;
    Real v = shapes::branching_psi(la, mu, qp_);
    psi_memo_.emplace(key, v);
    return v;
  }

  qcalc::QPair<Real> qp_;
  const std::vector<Real>* xs_ = nullptr;
  std::map<std::pair<Partition, int>, Real> memo_;
  std::map<std::pair<Partition, Partition>, Real> psi_memo_;
  std::uint64_t nodes_ = 0;
  std::uint64_t max_nodes_;
};

template <class Real>
Real eval(const Partition& nu, const std::vector<Real>& xs, const qcalc::QPair<Real>& qp) {
  return Evaluator<Real>(qp).eval(nu, xs);
}

template <class Real>
std::vector<Real> eval_set(const std::vector<Partition>& nus, const std::vector<Real>& xs,
                           const qcalc::QPair<Real>& qp) {
  return Evaluator<Real>(qp).eval_set(nus, xs);
}

// Value on a lattice configuration (independent of point enumeration).
template <class Real>
Real eval_config(const Partition& nu, const lattice::Configuration& x,
                 const lattice::Params<Real>& par) {
  return eval(nu, lattice::config_values(x, par), par.qp);
}

// Laurent extension: P_{a|N} for a signature label, via the shift
// P_{a|N}(xs) = (prod xs)^{a_N} P_{(a - a_N)|N}(xs).
template <class Real>
Real eval_signature(const Signature& a, const std::vector<Real>& xs,
                    const qcalc::QPair<Real>& qp) {
  if (a.length() != static_cast<int>(xs.size()))
    throw std::invalid_argument("eval_signature: label length must equal variable count");
  if (a.length() == 0) return Real(1);
  const coord_t c = a.coords.back();
  Real prod(1);
  for (const Real& x : xs) prod *= x;
  if (prod == 0 && c != 0)
    throw std::domain_error("eval_signature: zero variable with negative shift");
  const Partition la = a.shifted(-c).to_partition();
  return ipow(prod, c) * eval(la, xs, qp);
}

// P_{nu|N}(1, t, ..., t^{N-1}).
template <class Real>
Real principal_spec(const Partition& nu, int N, const qcalc::QPair<Real>& qp) {
  if (N < 0) throw std::invalid_argument("principal_spec: N must be >= 0");
  std::vector<Real> xs;
  Real v(1);
  for (int i = 0; i < N; ++i) {
    xs.push_back(v);
    v *= qp.t;
  }
  return eval(nu, xs, qp);
}

// One-row Macdonald Q: Q_{(n)|1}(z) = ((t;q)_n / (q;q)_n) z^n.
template <class Real>
Real one_row_Q(std::int64_t n, const Real& z, const qcalc::QPair<Real>& qp) {
  if (n < 0) throw std::invalid_argument("one_row_Q: n must be >= 0");
  return qcalc::qpoch_finite(qp.t, qp.q, n) / qcalc::qpoch_finite(qp.q, qp.q, n) * ipow(z, n);
}

// Macdonald symmetric function on an infinite configuration, approximated on
// the delta-truncated prefix. The certificate comes from a stabilization
// check across two truncation levels: per extra row the new points shrink by
// a factor t, so the remaining tail is dominated by the last increment times
// t/(1-t).
template <class Real>
MacdonaldValue<Real> eval_infinite(const Partition& nu, const lattice::InfiniteConfiguration<Real>& xi,
                                   const Precision<Real>& prec) {
  using std::abs;
  const Real t = xi.params.qp.t;
  const lattice::Configuration c1 = xi.truncate(xi.delta);
  const Real delta2 = xi.delta * ipow(t, 4);
  const lattice::Configuration c2 = xi.truncate(delta2);
  const Real v1 = eval_config(nu, c1, xi.params);
  if (c2.level() == c1.level()) return {v1, Real(0)};  // tails exhausted: exact
  const Real v2 = eval_config(nu, c2, xi.params);
  const Real cert = abs(v2 - v1) * t / (1 - t) + abs(v2) * pow10<Real>(-(prec.sig_digits - 2));
  return {v2, cert};
}

}  // namespace qgt::macdonald
