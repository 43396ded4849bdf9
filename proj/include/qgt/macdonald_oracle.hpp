#pragma once

// Independent cross-check for the Macdonald engine. P_nu is pinned down by
// the first Macdonald difference operator
//   D f(x) = sum_i [ prod_{j != i} (t x_i - x_j)/(x_i - x_j) ] f(..., q x_i, ...)
// with eigenvalue e_nu = sum_i q^{nu_i} t^{N-i} and unit leading monomial
// coefficient. The oracle solves for the monomial-basis coefficients from
// pointwise evaluations of (D - e_nu) and never touches the branching
// recursion. Small instances only.

#include "qgt/qcalc.hpp"
#include "qgt/rng.hpp"
#include "qgt/shapes.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace qgt::macdonald_oracle {

using shapes::coord_t;
using shapes::Partition;

// Monomial symmetric polynomial m_mu at a point, as a sum over the distinct
// permutations of the padded exponent vector.
template <class Real>
Real monomial_sym(const Partition& mu, const std::vector<Real>& xs) {
  const int n = static_cast<int>(xs.size());
  if (mu.length() > n) return Real(0);
  std::vector<coord_t> e;
  for (int i = 1; i <= n; ++i) e.push_back(mu.part(i));
  std::sort(e.begin(), e.end());
  Real acc(0);
  do {
    Real term(1);
    for (int i = 0; i < n; ++i) term *= ipow(xs[static_cast<std::size_t>(i)], e[static_cast<std::size_t>(i)]);
    acc += term;
  } while (std::next_permutation(e.begin(), e.end()));
  return acc;
}

inline bool dominance_leq(const Partition& mu, const Partition& nu) {
  if (mu.weight() != nu.weight()) return false;
  coord_t sm = 0, sn = 0;
  const int len = std::max(mu.length(), nu.length());
  for (int i = 1; i <= len; ++i) {
    sm += mu.part(i);
    sn += nu.part(i);
    if (sm > sn) return false;
  }
  return true;
}

// Partitions mu <= nu in dominance with length <= N (the support of P_nu in
// the monomial basis).
inline std::vector<Partition> dominance_ideal(const Partition& nu, int N) {
  std::vector<Partition> out;
  if (nu.weight() == 0) return {Partition::empty()};
  for (const Partition& mu : shapes::partitions_up_to(nu.weight(), N))
    if (mu.weight() == nu.weight() && dominance_leq(mu, nu)) out.push_back(mu);
  return out;
}

template <class Real>
struct MonomialTable {
  std::vector<std::pair<Partition, Real>> coeffs;  // leading coefficient is 1

  Real evaluate(const std::vector<Real>& xs) const {
    Real acc(0);
    for (const auto& [mu, c] : coeffs) acc += c * monomial_sym(mu, xs);
    return acc;
  }

  Real coefficient(const Partition& mu) const {
    for (const auto& [m, c] : coeffs)
      if (m == mu) return c;
    return Real(0);
  }
};

namespace detail {

// Gaussian elimination with partial pivoting; returns false on a numerically
// degenerate pivot.
template <class Real>
bool solve_dense(std::vector<std::vector<Real>>& a, std::vector<Real>& b) {
  using std::abs;
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
          abs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]))
        piv = r;
    if (a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)] == 0) return false;
    std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(c)]);
    std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(c)]);
    for (int r = c + 1; r < n; ++r) {
      const Real f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /
                     a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
      if (f == 0) continue;
      for (int cc = c; cc < n; ++cc)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
            f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
      b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(c)];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    Real s = b[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < n; ++c)
      s -= a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * b[static_cast<std::size_t>(c)];
    b[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
  }
  return true;
}

// (D f)(xs) evaluated pointwise for f given as monomial coefficients over basis.
template <class Real, class F>
Real apply_operator(F&& f, const std::vector<Real>& xs, const qcalc::QPair<Real>& qp) {
  const int n = static_cast<int>(xs.size());
  Real acc(0);
  for (int i = 0; i < n; ++i) {
    Real coef(1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      coef *= (qp.t * xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)]) /
              (xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)]);
    }
    std::vector<Real> shifted = xs;
    shifted[static_cast<std::size_t>(i)] *= qp.q;
    acc += coef * f(shifted);
  }
  return acc;
}

}  // namespace detail

// Coefficient table of P_{nu|N} in the monomial basis. The linear system is
// assembled and solved at twice the working precision (elimination on the
// dominance-ideal basis can cost several digits), then rounded back.
template <class Real>
MonomialTable<Real> macdonald_oracle(const Partition& nu, int N, const qcalc::QPair<Real>& qp,
                                     std::uint64_t seed = 1) {
  if (nu.weight() > 6 || N > 4)
    throw std::invalid_argument("macdonald_oracle: instance too large (|nu| <= 6, N <= 4)");
  if (nu.length() > N) throw std::invalid_argument("macdonald_oracle: length(nu) > N");
  using Wide = static_real<2 * static_cast<unsigned>(std::numeric_limits<Real>::digits10)>;
  const qcalc::QPair<Wide> wqp(Wide(qp.q), Wide(qp.t));
  const std::vector<Partition> basis = dominance_ideal(nu, N);
  const int b = static_cast<int>(basis.size());
  Wide e_nu(0);
  for (int i = 1; i <= N; ++i) e_nu += ipow(wqp.q, nu.part(i)) * ipow(wqp.t, N - i);

  for (int attempt = 0; attempt < 4; ++attempt) {
    CounterRng rng(seed + static_cast<std::uint64_t>(attempt) * 7919);
    // Rows: c_nu = 1, then (D - e_nu) f = 0 at b-1 random points.
    std::vector<std::vector<Wide>> a(static_cast<std::size_t>(b),
                                     std::vector<Wide>(static_cast<std::size_t>(b), Wide(0)));
    std::vector<Wide> rhs(static_cast<std::size_t>(b), Wide(0));
    for (int c = 0; c < b; ++c)
      if (basis[static_cast<std::size_t>(c)] == nu) a[0][static_cast<std::size_t>(c)] = Wide(1);
    rhs[0] = Wide(1);
    for (int r = 1; r < b; ++r) {
      std::vector<Wide> pt;
      for (int i = 0; i < N; ++i) pt.push_back(Wide(1) / 2 + Wide(rng.next_double()));
      for (int c = 0; c < b; ++c) {
        const Partition& mu = basis[static_cast<std::size_t>(c)];
        auto f = [&](const std::vector<Wide>& xs) { return monomial_sym(mu, xs); };
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            detail::apply_operator<Wide>(f, pt, wqp) - e_nu * monomial_sym(mu, pt);
      }
    }
    if (detail::solve_dense(a, rhs)) {
      MonomialTable<Real> table;
      for (int c = 0; c < b; ++c)
        table.coeffs.emplace_back(basis[static_cast<std::size_t>(c)],
                                  static_cast<Real>(rhs[static_cast<std::size_t>(c)]));
      return table;
    }
  }
  throw std::runtime_error("macdonald_oracle: singular system after retries");
}

// Schur polynomial via the bialternant determinant ratio; the t = q oracle.
template <class Real>
Real schur_bialternant(const Partition& nu, const std::vector<Real>& xs) {
  using std::abs;
  const int n = static_cast<int>(xs.size());
  if (nu.length() > n) return Real(0);
  auto det = [&](const std::vector<coord_t>& exps) -> Real {
    std::vector<std::vector<Real>> m(static_cast<std::size_t>(n),
                                     std::vector<Real>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            ipow(xs[static_cast<std::size_t>(i)], exps[static_cast<std::size_t>(j)]);
    // LU with partial pivoting.
    Real d(1);
    for (int c = 0; c < n; ++c) {
      int piv = c;
      for (int r = c + 1; r < n; ++r)
        if (abs(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
            abs(m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]))
          piv = r;
      if (m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)] == 0) return Real(0);
      if (piv != c) {
        std::swap(m[static_cast<std::size_t>(piv)], m[static_cast<std::size_t>(c)]);
        d = -d;
      }
      d *= m[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
      for (int r = c + 1; r < n; ++r) {
        const Real f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /
                       m[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        for (int cc = c; cc < n; ++cc)
          m[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
              f * m[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
      }
    }
    return d;
  };
  std::vector<coord_t> num_exps, den_exps;
  for (int j = 1; j <= n; ++j) {
    num_exps.push_back(nu.part(j) + n - j);
    den_exps.push_back(n - j);
  }
  return det(num_exps) / det(den_exps);
}

}  // namespace qgt::macdonald_oracle
