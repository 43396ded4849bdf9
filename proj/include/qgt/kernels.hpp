#pragma once

// The stochastic links between adjacent levels of the extended chain:
// single-step kernels in both the integer-tau product form and the general
// (q,t) form, truncated full rows with certified tail mass, composed and
// extended rows, and the Dixon-Anderson continuum kernel.

#include "qgt/lattice.hpp"
#include "qgt/macdonald.hpp"
#include "qgt/precision.hpp"
#include "qgt/qcalc.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qgt::kernels {

using lattice::Configuration;
using lattice::Params;
using shapes::coord_t;
using shapes::Partition;

// ---------------------------------------------------------------------------
// Row container
// ---------------------------------------------------------------------------

template <class Real>
struct KernelAtom {
  Configuration target;
  Real weight;
};

template <class Real>
struct KernelRow {
  Configuration source;
  int level_to = 0;
  std::vector<KernelAtom<Real>> atoms;  // descending by target
  Real tail_bound = Real(0);            // certified unenumerated mass

  Real total_weight() const {
    Real s(0);
    for (const auto& a : atoms) s += a.weight;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Vandermonde helpers
// ---------------------------------------------------------------------------

template <class Real>
Real vandermonde(const std::vector<Real>& xs) {
  Real v(1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) v *= xs[i] - xs[j];
  return v;
}

// ---------------------------------------------------------------------------
// kernel_special: the t = q^tau product formula
// ---------------------------------------------------------------------------

// Lambda(X,Y) = C~_N * V(Y)/V(X) * prod|y| *
//   prod_{y,x} (yq/x;q)_{tau-1} / prod_{x!=x'} (xq/x';q)_{tau-1},
// zero unless Y interlaces X; strictly positive on interlacing pairs.
template <class Real>
Real kernel_special(const Configuration& X, const Configuration& Y, int tau,
                    const Params<Real>& p, const Precision<Real>& prec) {
  if (p.qp.t != ipow(p.qp.q, tau))
    throw std::domain_error("kernel_special: t is not q^tau for the given tau");
  if (!lattice::interlace_config(X, Y)) return Real(0);
  const int N = X.level();
  const auto xs = lattice::config_values(X, p);
  const auto ys = lattice::config_values(Y, p);
  const Real ctilde = qcalc::norm_constants(N, p.qp, prec).c_tilde;
  using std::abs;
  Real w = ctilde * vandermonde(ys) / vandermonde(xs);
  for (const Real& y : ys) w *= abs(y);
  Real ratio(1);
  for (const Real& y : ys)
    for (const Real& x : xs) ratio *= qcalc::qpoch_finite(y * p.qp.q / x, p.qp.q, tau - 1);
  for (const Real& x : xs)
    for (const Real& x2 : xs) {
      if (x == x2) continue;
      ratio /= qcalc::qpoch_finite(x * p.qp.q / x2, p.qp.q, tau - 1);
    }
  return w * ratio;
}

// ---------------------------------------------------------------------------
// R_{eps,m}(X; q,t): the entry kernel of the general formula
// ---------------------------------------------------------------------------

enum class RFormula {
  production,  // grouped resonance-free products; valid for every t in (0,1)
  direct,      // straight specialization of the meromorphic kernel; generic t only
  psi_rewrite  // direct form with vanishing-prone pairs transformed away
};

namespace detail {

// Anchor index a_r = r + eps(r) for each row, and the unique non-anchor i0.
inline std::vector<int> anchors(int N, const std::vector<std::uint8_t>& eps) {
  std::vector<int> a(static_cast<std::size_t>(N - 1));
  for (int r = 1; r <= N - 1; ++r)
    a[static_cast<std::size_t>(r - 1)] = r + static_cast<int>(eps[static_cast<std::size_t>(r - 1)]);
  return a;
}

inline int non_anchor_index(int N, int k, const std::vector<std::uint8_t>& eps) {
  if (k == 0) return 1;
  if (k == N) return N;
  return k + 1 - static_cast<int>(eps[static_cast<std::size_t>(k - 1)]);
}

// Validates that eps is k-adapted and m is within the gap bounds.
inline void require_admissible(const Configuration& X, const std::vector<std::uint8_t>& eps,
                               const std::vector<coord_t>& m) {
  const int n = X.level(), k = X.k();
  if (static_cast<int>(eps.size()) != n - 1 || static_cast<int>(m.size()) != n - 1)
    throw std::invalid_argument("r_function: eps/m must have length N-1");
  const auto g = lattice::gaps(X);
  for (int r = 1; r <= n - 1; ++r) {
    const auto i = static_cast<std::size_t>(r - 1);
    if (m[i] < 0) throw std::invalid_argument("r_function: m must be nonnegative");
    if (r < k && eps[i] != 0) throw std::invalid_argument("r_function: eps not k-adapted");
    if (r > k && eps[i] != 1) throw std::invalid_argument("r_function: eps not k-adapted");
    if (r != k && m[i] > g[i]) throw std::invalid_argument("r_function: m exceeds gap bound");
  }
}

}  // namespace detail

// Smallest-margin test for the genericity constraint t^j not in q^Z,
// j = 1..N-1 (required by the direct formula).
template <class Real>
bool t_generic(const qcalc::QPair<Real>& qp, int N, const Real& margin) {
  using std::abs;
  using std::floor;
  using std::log;
  Real tj(1);
  for (int j = 1; j <= N - 1; ++j) {
    tj *= qp.t;
    const Real mf = log(tj) / log(qp.q);
    const auto m0 = static_cast<long long>(floor(mf));
    for (long long m = m0 - 1; m <= m0 + 2; ++m) {
      if (m < 0) continue;
      if (abs(tj - ipow(qp.q, m)) <= margin) return false;
    }
  }
  return true;
}

// R_{eps,m}(X;q,t) for an X-admissible pair. The production route groups the
// factors so that every denominator is bounded away from zero for all
// t in (0,1); the direct route needs t in generic position; the psi route
// transforms the direct form pairwise until its denominators cannot vanish.
template <class Real>
Real r_function(const Configuration& X, const std::vector<std::uint8_t>& eps,
                const std::vector<coord_t>& m, const Params<Real>& p,
                const Precision<Real>& prec, RFormula formula = RFormula::production) {
  detail::require_admissible(X, eps, m);
  const int N = X.level(), k = X.k();
  const auto xs = lattice::config_values(X, p);
  const Real& q = p.qp.q;
  const Real& t = p.qp.t;
  const auto anchors = detail::anchors(N, eps);
  const int i0 = detail::non_anchor_index(N, k, eps);
  auto xv = [&](int i) -> const Real& { return xs[static_cast<std::size_t>(i - 1)]; };

  const Real pq_inf = qcalc::qpoch_infinite(q, q, prec);
  const Real pt_inf = qcalc::qpoch_infinite(t, q, prec);

  if (formula == RFormula::production || formula == RFormula::psi_rewrite) {
    Real acc(1);
    for (int r = 1; r <= N - 1; ++r) {
      const coord_t mr = m[static_cast<std::size_t>(r - 1)];
      const int a = anchors[static_cast<std::size_t>(r - 1)];
      // self factor (q^{m+1};q)_inf / (q^m t;q)_inf
      acc *= pq_inf * qcalc::qpoch_finite(t, q, mr) /
             (qcalc::qpoch_finite(q, q, mr) * pt_inf);
      for (int s = 1; s <= N; ++s) {
        if (s == a) continue;
        const Real ratio = xv(a) / xv(s);
        // |x_s| < |x_anchor| on the same side is where the direct form's
        // denominators can vanish; those pairs take the transformed shape.
        const bool rewrite_pair = (ratio > 1);
        if (formula == RFormula::psi_rewrite && rewrite_pair) {
          // (t/q)^m * (x_s q/(y t);q)_inf (x_s/x_a;q)_inf /
          //           [(x_s/y;q)_inf (x_s q/(x_a t);q)_inf],  y = x_a q^m
          const Real y = xv(a) * ipow(q, mr);
          acc *= ipow(t / q, mr) * qcalc::qpoch_infinite(xv(s) * q / (y * t), q, prec) *
                 qcalc::qpoch_infinite(xv(s) / xv(a), q, prec) /
                 (qcalc::qpoch_infinite(xv(s) / y, q, prec) *
                  qcalc::qpoch_infinite(xv(s) * q / (xv(a) * t), q, prec));
        } else {
          acc *= qcalc::qpoch_finite(ratio * t, q, mr) / qcalc::qpoch_finite(ratio * q, q, mr);
        }
      }
    }
    for (int j = 1; j <= N; ++j) {
      if (j == i0) continue;
      const Real ratio = xv(i0) / xv(j);
      acc *= qcalc::qpoch_infinite(ratio * t, q, prec) / qcalc::qpoch_infinite(ratio * q, q, prec);
    }
    return acc;
  }

  // Direct specialization. Besides the genericity constraint on t there is an
  // unconditional degeneracy: whenever x_s sits one row below the anchor on
  // the same side, the literal quotient is 0/0 (the row-factor denominator
  // and its matching pair-factor numerator both vanish, for every t). Those
  // pairs are evaluated by their finite limit; everything else stays literal.
  if (!t_generic(p.qp, N, pow10<Real>(-6)))
    throw std::domain_error("r_function: direct formula requires t in generic position");
  auto row_adjacent = [&](int a, int s) {
    const lattice::LatticePoint pa = X.point(a), ps = X.point(s);
    return pa.side == ps.side && ps.row == pa.row + 1;
  };
  Real acc(1);
  for (int r = 1; r <= N - 1; ++r) {
    const int a = anchors[static_cast<std::size_t>(r - 1)];
    const coord_t mr = m[static_cast<std::size_t>(r - 1)];
    const Real y = xv(a) * ipow(q, mr);
    for (int s = 1; s <= N; ++s) {
      if (s != a && row_adjacent(a, s)) {
        // combined with the pair factor (a, s): finite limit value
        acc *= qcalc::qpoch_finite(xv(a) * t / xv(s), q, mr) /
               qcalc::qpoch_finite(xv(a) * q / xv(s), q, mr);
      } else {
        acc *= qcalc::qpoch_infinite(y * q / xv(s), q, prec) /
               qcalc::qpoch_infinite(y * t / xv(s), q, prec);
      }
    }
  }
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) {
      if (i == j) continue;
      bool consumed = false;
      for (int r = 1; r <= N - 1; ++r)
        if (anchors[static_cast<std::size_t>(r - 1)] == i && row_adjacent(i, j)) consumed = true;
      if (consumed) continue;
      acc *= qcalc::qpoch_infinite(xv(i) * t / xv(j), q, prec) /
             qcalc::qpoch_infinite(xv(i) * q / xv(j), q, prec);
    }
  return acc;
}

// ---------------------------------------------------------------------------
// kernel_general: single entry, any q,t in (0,1)
// ---------------------------------------------------------------------------

template <class Real>
Real kernel_general(const Configuration& X, const Configuration& Y, const Params<Real>& p,
                    const Precision<Real>& prec, RFormula formula = RFormula::production) {
  const auto pair = lattice::admissible_pair_for(X, Y);
  if (!pair) return Real(0);
  const int N = X.level();
  const auto xs = lattice::config_values(X, p);
  const auto ys = lattice::config_values(Y, p);
  const Real ctilde = qcalc::norm_constants(N, p.qp, prec).c_tilde;
  using std::abs;
  Real w = ctilde * vandermonde(ys) / vandermonde(xs);
  for (const Real& y : ys) w *= abs(y);
  return w * r_function(X, pair->eps, pair->m, p, prec, formula);
}

// ---------------------------------------------------------------------------
// kernel_row: the full truncated row with certified tail
// ---------------------------------------------------------------------------

namespace detail {

// Per-row factor tables. The grouped form of R factorizes over the rows r,
// so each row contributes an independent table T_r(m) and the straddle row
// extends incrementally.
template <class Real>
struct RowEngine {
  const Configuration& X;
  const Params<Real>& p;
  const Precision<Real>& prec;
  int N, k, l;
  bool straddle;
  std::vector<Real> xs;
  std::vector<coord_t> g;
  Real pref;  // C~_N / V(X)
  Real pq_inf, pt_inf;

  // T_r(m) = self(m) * prod_{s != a_r} (x_a t/x_s;q)_m / (x_a q/x_s;q)_m,
  // tabulated for m = 0..l_r on regular rows.
  std::vector<std::vector<Real>> table;      // per regular row r-1
  std::vector<std::vector<Real>> y_values;   // signed y_r(m)
  // Straddle streams, one per eps(k) in {0,1}: incremental state.
  struct Stream {
    int anchor = 0;
    Real i0_factor{1};
    std::vector<Real> t_of_m;  // T_k(m), extended on demand
    std::vector<Real> y_of_m;
  };
  Stream streams[2];

  RowEngine(const Configuration& X_, const Params<Real>& p_, const Precision<Real>& prec_)
      : X(X_), p(p_), prec(prec_) {
    N = X.level();
    k = X.k();
    l = X.l();
    straddle = (k > 0 && k < N);
    xs = lattice::config_values(X, p);
    g = lattice::gaps(X);
    pq_inf = qcalc::qpoch_infinite(p.qp.q, p.qp.q, prec);
    pt_inf = qcalc::qpoch_infinite(p.qp.t, p.qp.q, prec);
    pref = qcalc::norm_constants(N, p.qp, prec).c_tilde / vandermonde(xs);
    table.resize(static_cast<std::size_t>(N - 1));
    y_values.resize(static_cast<std::size_t>(N - 1));
    for (int r = 1; r <= N - 1; ++r) {
      if (straddle && r == k) continue;
      fill_regular(r);
    }
    if (straddle) {
      init_stream(0, k);
      init_stream(1, k + 1);
    } else if (N >= 1) {
      // Only the i0 factor matters; fold it into pref.
      pref *= i0_product(k == N ? N : 1);
    }
  }

  const Real& xv(int i) const { return xs[static_cast<std::size_t>(i - 1)]; }

  Real i0_product(int i0) const {
    Real acc(1);
    for (int j = 1; j <= N; ++j) {
      if (j == i0) continue;
      const Real ratio = xv(i0) / xv(j);
      acc *= qcalc::qpoch_infinite(ratio * p.qp.t, p.qp.q, prec) /
             qcalc::qpoch_infinite(ratio * p.qp.q, p.qp.q, prec);
    }
    return acc;
  }

  Real self_factor(coord_t m0) const {
    return pq_inf * qcalc::qpoch_finite(p.qp.t, p.qp.q, m0) /
           (qcalc::qpoch_finite(p.qp.q, p.qp.q, m0) * pt_inf);
  }

  void fill_regular(int r) {
    const int a = r + (r > k ? 1 : 0);
    auto& tab = table[static_cast<std::size_t>(r - 1)];
    auto& yv = y_values[static_cast<std::size_t>(r - 1)];
    const coord_t cap = g[static_cast<std::size_t>(r - 1)];
    Real finite(1);       // grouped product at current m
    Real self = self_factor(0);
    Real y = xv(a);
    Real qm(1);  // q^m
    for (coord_t m0 = 0; m0 <= cap; ++m0) {
      if (m0 > 0) {
        // advance self and the grouped product from m0-1 to m0
        self *= (Real(1) - p.qp.t * qm / p.qp.q) / (Real(1) - qm);
        for (int s = 1; s <= N; ++s) {
          if (s == a) continue;
          const Real ratio = xv(a) / xv(s);
          finite *= (Real(1) - ratio * p.qp.t * qm / p.qp.q) / (Real(1) - ratio * qm);
        }
        y *= p.qp.q;
      }
      tab.push_back(self * finite);
      yv.push_back(y);
      qm *= p.qp.q;
    }
  }

  void init_stream(int e, int anchor) {
    auto& st = streams[e];
    st.anchor = anchor;
    st.i0_factor = i0_product(k + 1 - e);
    extend_stream(e, 0);
  }

  // Ensure T_k and y_k are tabulated through index m_hi.
  void extend_stream(int e, coord_t m_hi) {
    auto& st = streams[e];
    const int a = st.anchor;
    if (st.t_of_m.empty()) {
      st.t_of_m.push_back(self_factor(0));
      st.y_of_m.push_back(xv(a));
    }
    while (static_cast<coord_t>(st.t_of_m.size()) <= m_hi) {
      const auto mprev = static_cast<coord_t>(st.t_of_m.size()) - 1;
      const Real qm = ipow(p.qp.q, mprev);
      Real f = st.t_of_m.back() * (Real(1) - p.qp.t * qm) / (Real(1) - qm * p.qp.q);
      for (int s = 1; s <= N; ++s) {
        if (s == a) continue;
        const Real ratio = xv(a) / xv(s);
        f *= (Real(1) - ratio * p.qp.t * qm) / (Real(1) - ratio * qm * p.qp.q);
      }
      st.t_of_m.push_back(f);
      st.y_of_m.push_back(st.y_of_m.back() * p.qp.q);
    }
  }

  // Weight of the atom given regular m-values and, when straddling, (eps, m_k).
  // ys is scratch space of size N-1.
  Real weight(const std::vector<coord_t>& m, int e, coord_t mk, std::vector<Real>& ys) {
    using std::abs;
    Real tprod(1);
    for (int r = 1; r <= N - 1; ++r) {
      const auto i = static_cast<std::size_t>(r - 1);
      if (straddle && r == k) {
        extend_stream(e, mk);
        tprod *= streams[e].t_of_m[static_cast<std::size_t>(mk)];
        ys[i] = streams[e].y_of_m[static_cast<std::size_t>(mk)];
      } else {
        tprod *= table[i][static_cast<std::size_t>(m[i])];
        ys[i] = y_values[i][static_cast<std::size_t>(m[i])];
      }
    }
    if (straddle) tprod *= streams[e].i0_factor;
    Real w = pref * tprod * vandermonde(ys);
    for (const Real& y : ys) w *= abs(y);
    return w;
  }
};

}  // namespace detail

// The full row at X, enumerated to a certified depth. Straddle atoms past the
// cutoff are covered by tail_bound = 2 * (last weight) * rho/(1-rho) per
// branch, rho = max(q,t). One-sided sources have finitely many targets and
// tail_bound = 0 exactly. With m_max_override the cutoff is taken literally
// (the stated bound may then be unreliable; used by the negative tests).
template <class Real>
KernelRow<Real> kernel_row(const Configuration& X, const Params<Real>& p,
                           const Precision<Real>& prec,
                           std::optional<coord_t> m_max_override = std::nullopt) {
  const int N = X.level(), k = X.k();
  if (N < 2) throw std::invalid_argument("kernel_row: level must be >= 2");
  detail::RowEngine<Real> eng(X, p, prec);
  const bool straddle = eng.straddle;
  KernelRow<Real> row;
  row.source = X;
  row.level_to = N - 1;

  const Real rho = p.qp.q > p.qp.t ? p.qp.q : p.qp.t;
  const coord_t policy = lattice::default_straddle_m_max(p.qp, prec);
  const coord_t hard_cap = 4 * policy + 64;

  std::vector<coord_t> m(static_cast<std::size_t>(N - 1), 0);
  std::vector<Real> ys(static_cast<std::size_t>(N - 1));
  std::vector<std::uint8_t> eps(static_cast<std::size_t>(N - 1), 0);
  for (int r = k + 1; r <= N - 1; ++r) eps[static_cast<std::size_t>(r - 1)] = 1;

  Real tail(0);
  auto emit_plain = [&]() {
    row.atoms.push_back(
        {lattice::detail::cotransition_target(X, eps, m), eng.weight(m, 0, 0, ys)});
  };
  auto emit_straddle = [&]() {
    for (int e = 0; e < 2; ++e) {
      eps[static_cast<std::size_t>(k - 1)] = static_cast<std::uint8_t>(e);
      Real w_prev(-1);
      for (coord_t mk = 0;; ++mk) {
        const Real w = eng.weight(m, e, mk, ys);
        m[static_cast<std::size_t>(k - 1)] = mk;
        row.atoms.push_back({lattice::detail::cotransition_target(X, eps, m), w});
        const bool stop = m_max_override
                              ? (mk >= *m_max_override)
                              : ((mk >= policy && w <= w_prev && w < prec.eps) || mk >= hard_cap);
        if (stop) {
          tail += 2 * w * rho / (1 - rho);
          break;
        }
        w_prev = w;
      }
    }
    eps[static_cast<std::size_t>(k - 1)] = 0;
    m[static_cast<std::size_t>(k - 1)] = 0;
  };
  // Regular rows nest outermost, the straddle streams run innermost.
  auto rec = [&](auto&& self, int r) -> void {
    if (straddle && r == k) ++r;
    if (r > N - 1) {
      if (straddle) {
        emit_straddle();
      } else {
        emit_plain();
      }
      return;
    }
    for (coord_t v = 0; v <= eng.g[static_cast<std::size_t>(r - 1)]; ++v) {
      m[static_cast<std::size_t>(r - 1)] = v;
      self(self, r + 1);
    }
    m[static_cast<std::size_t>(r - 1)] = 0;
  };
  rec(rec, 1);

  row.tail_bound = tail;
  std::sort(row.atoms.begin(), row.atoms.end(),
            [](const KernelAtom<Real>& a, const KernelAtom<Real>& b) {
              return lattice::compare_configs_desc(a.target, b.target) < 0;
            });
  return row;
}

// ---------------------------------------------------------------------------
// Composition Lambda^N_K
// ---------------------------------------------------------------------------

// Row-by-row composition with per-level truncation; deficits (tails plus
// pruned mass) accumulate additively. Pruning happens before each expansion,
// never after the last one, so K = N-1 reproduces kernel_row exactly.
template <class Real>
KernelRow<Real> kernel_compose(const Configuration& X, int K, const Params<Real>& p,
                               const Precision<Real>& prec,
                               std::optional<coord_t> m_max_override = std::nullopt) {
  const int N = X.level();
  if (K < 1 || K >= N) throw std::invalid_argument("kernel_compose: need 1 <= K < N");
  std::map<shapes::DoubleSignature, Real> current;
  current.emplace(X.dsig(), Real(1));
  Real deficit(0);
  for (int level = N; level > K; --level) {
    if (level < N) {
      // prune negligible mass before expanding
      const Real cut = prec.eps / Real(4 * (level - K) * std::max<std::size_t>(current.size(), 1));
      for (auto it = current.begin(); it != current.end();) {
        if (it->second < cut) {
          deficit += it->second;
          it = current.erase(it);
        } else {
          ++it;
        }
      }
    }
    std::map<shapes::DoubleSignature, Real> next;
    for (const auto& [dsig, w] : current) {
      const KernelRow<Real> row = kernel_row(Configuration(dsig), p, prec, m_max_override);
      deficit += w * row.tail_bound;
      for (const auto& atom : row.atoms) {
        auto [it, inserted] = next.emplace(atom.target.dsig(), w * atom.weight);
        if (!inserted) it->second += w * atom.weight;
      }
    }
    current = std::move(next);
  }
  KernelRow<Real> out;
  out.source = X;
  out.level_to = K;
  out.atoms.reserve(current.size());
  for (const auto& [dsig, w] : current) out.atoms.push_back({Configuration(dsig), w});
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const KernelAtom<Real>& a, const KernelAtom<Real>& b) {
              return lattice::compare_configs_desc(a.target, b.target) < 0;
            });
  out.tail_bound = deficit;
  return out;
}

// ---------------------------------------------------------------------------
// Extended rows on degenerate configurations
// ---------------------------------------------------------------------------

template <class Real>
struct ExtendedRow {
  KernelRow<Real> row;  // stripped atoms, level n, all satisfying the sparse relation
  Real violating_mass = Real(0);  // mass that stayed on the wrong side of zero
};

// Approximates the extended kernel at a degenerate point X* in Omega_n viewed
// at level N > n: inserts d = N - n auxiliary points x q^A t^i next to zero,
// takes the plain row, strips the forced descendants of the insertion, and
// reports the mass whose straddle descendant failed to cross back as
// violating_mass. Increasing A refines the approximation.
template <class Real>
ExtendedRow<Real> extended_kernel_row(const Configuration& Xstar, int N, coord_t A,
                                      const Params<Real>& p, const Precision<Real>& prec,
                                      std::optional<coord_t> m_max_override = std::nullopt) {
  const int n = Xstar.level(), k = Xstar.k(), l = Xstar.l();
  if (n >= N)
    throw std::invalid_argument("extended_kernel_row: requires n < N (use kernel_row at n == N)");
  if (n == 0) throw std::invalid_argument("extended_kernel_row: X* must be nonempty");
  if (A < 1) throw std::invalid_argument("extended_kernel_row: A must be >= 1");
  const int d = N - n;
  const bool on_plus = (k > 0);
  std::vector<coord_t> ap = Xstar.dsig().plus.coords;
  std::vector<coord_t> am = Xstar.dsig().minus.coords;
  if (on_plus) {
    const coord_t c = ap.back();
    ap.insert(ap.end(), static_cast<std::size_t>(d), c - A);
  } else {
    const coord_t c = am.back();
    am.insert(am.end(), static_cast<std::size_t>(d), c - A);
  }
  const Configuration XA{shapes::DoubleSignature(shapes::Signature(ap), shapes::Signature(am))};
  const KernelRow<Real> full = kernel_row(XA, p, prec, m_max_override);

  ExtendedRow<Real> out;
  out.row.source = Xstar;
  out.row.level_to = n;
  out.row.tail_bound = full.tail_bound;
  const coord_t forced = (on_plus ? ap.back() : am.back());
  std::map<shapes::DoubleSignature, Real> merged;
  for (const auto& atom : full.atoms) {
    const auto& bp = atom.target.dsig().plus.coords;
    const auto& bm = atom.target.dsig().minus.coords;
    // The insert block forces d-1 copies of its coordinate; a straddle
    // descendant that stays on the insertion side makes the stripped set
    // fall outside Omega_n.
    const bool violating = on_plus ? (l > 0 && static_cast<int>(bp.size()) == k + d)
                                   : false;
    if (violating) {
      out.violating_mass += atom.weight;
      continue;
    }
    std::vector<coord_t> sp(bp.begin(), bp.end());
    std::vector<coord_t> sm(bm.begin(), bm.end());
    auto& host = on_plus ? sp : sm;
    // strip the forced rows (positions k+1 .. k+d-1 on the host side)
    const int base = on_plus ? k : l;
    for (int i = 0; i < d - 1; ++i) {
      if (host[static_cast<std::size_t>(base)] != forced)
        throw std::logic_error("extended_kernel_row: unexpected stripped coordinate");
      host.erase(host.begin() + base);
    }
    shapes::DoubleSignature stripped{shapes::Signature(std::move(sp)), shapes::Signature(std::move(sm))};
    auto [it, inserted] = merged.emplace(std::move(stripped), atom.weight);
    if (!inserted) it->second += atom.weight;
  }
  for (const auto& [dsig, w] : merged) out.row.atoms.push_back({Configuration(dsig), w});
  std::sort(out.row.atoms.begin(), out.row.atoms.end(),
            [](const KernelAtom<Real>& a, const KernelAtom<Real>& b) {
              return lattice::compare_configs_desc(a.target, b.target) < 0;
            });
  return out;
}

// ---------------------------------------------------------------------------
// Dixon-Anderson continuum kernel
// ---------------------------------------------------------------------------

// Density of the interlacing probability measure on {y : x_{i+1} < y_i < x_i}:
//   Gamma(N tau)/Gamma(tau)^N * V(Y) / V(X)^{2 tau - 1} * V(X;Y)^{tau - 1}.
template <class Real>
Real dixon_anderson(const std::vector<Real>& xx, const std::vector<Real>& yy, const Real& tau) {
  using std::abs;
  using std::pow;
  const int N = static_cast<int>(xx.size());
  if (static_cast<int>(yy.size()) != N - 1)
    throw std::invalid_argument("dixon_anderson: need |Y| = |X| - 1");
  if (!(tau > 0)) throw std::domain_error("dixon_anderson: tau must be > 0");
  for (int i = 0; i + 1 < N; ++i) {
    if (!(xx[static_cast<std::size_t>(i)] > yy[static_cast<std::size_t>(i)] &&
          yy[static_cast<std::size_t>(i)] > xx[static_cast<std::size_t>(i + 1)]))
      throw std::invalid_argument("dixon_anderson: Y must strictly interlace X");
  }
  const Real gamma_pref =
      boost::math::tgamma(Real(N) * tau) / pow(boost::math::tgamma(tau), Real(N));
  Real vx = vandermonde(xx);
  Real vy = vandermonde(yy);
  Real vxy(1);
  for (const Real& x : xx)
    for (const Real& y : yy) vxy *= abs(x - y);
  return gamma_pref * vy * pow(vxy, tau - 1) / pow(vx, 2 * tau - 1);
}

// ---------------------------------------------------------------------------
// Okounkov multiple series (generic real points)
// ---------------------------------------------------------------------------

// Left-hand side of the q-integral representation, written as the multiple
// series over binary words and m-tuples, truncated at m_r <= M:
//   C~_N/V(Z) sum_{eps,m} V(Z~) R_{eps,m}(Z) prod_r (-1)^{eps(r)} z~_r
//       P_{nu|N-1}(Z~) / (t^{N-1};q,t)_nu .
// Z must be in generic position (no lattice resonances on the q-grids).
template <class Real>
Real okounkov_series(const std::vector<Real>& zs, const Partition& nu,
                     const qcalc::QPair<Real>& qp, const Precision<Real>& prec, coord_t M) {
  const int N = static_cast<int>(zs.size());
  if (N < 2) throw std::invalid_argument("okounkov_series: need N >= 2");
  if (nu.length() > N - 1) throw std::invalid_argument("okounkov_series: length(nu) > N-1");
  const Real& q = qp.q;
  const Real& t = qp.t;
  // pair product, independent of (eps, m)
  Real pair_prod(1);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      const Real ratio = zs[static_cast<std::size_t>(i)] / zs[static_cast<std::size_t>(j)];
      pair_prod *= qcalc::qpoch_infinite(ratio * t, q, prec) /
                   qcalc::qpoch_infinite(ratio * q, q, prec);
    }
  const Real denom = qcalc::gen_pochhammer(ipow(t, N - 1), qp, nu);
  macdonald::Evaluator<Real> ev(qp);

  Real total(0);
  std::vector<std::uint8_t> eps(static_cast<std::size_t>(N - 1), 0);
  std::vector<coord_t> m(static_cast<std::size_t>(N - 1), 0);
  std::vector<Real> ztil(static_cast<std::size_t>(N - 1));
  for (int mask = 0; mask < (1 << (N - 1)); ++mask) {
    for (int r = 0; r < N - 1; ++r) eps[static_cast<std::size_t>(r)] = (mask >> r) & 1;
    // G_r(m) tables for this word
    std::vector<std::vector<Real>> G(static_cast<std::size_t>(N - 1));
    for (int r = 1; r <= N - 1; ++r) {
      const int a = r - 1 + static_cast<int>(eps[static_cast<std::size_t>(r - 1)]);
      const Real& za = zs[static_cast<std::size_t>(a)];
      Real g0(1);
      for (int s = 0; s < N; ++s)
        g0 *= qcalc::qpoch_infinite(za * q / zs[static_cast<std::size_t>(s)], q, prec) /
              qcalc::qpoch_infinite(za * t / zs[static_cast<std::size_t>(s)], q, prec);
      auto& col = G[static_cast<std::size_t>(r - 1)];
      col.push_back(g0);
      Real qm(1);  // q^{v-1} during iteration v
      for (coord_t v = 1; v <= M; ++v) {
        Real f = col.back();
        for (int s = 0; s < N; ++s) {
          const Real ratio = za / zs[static_cast<std::size_t>(s)];
          f *= (Real(1) - ratio * t * qm) / (Real(1) - ratio * q * qm);
        }
        col.push_back(f);
        qm *= q;
      }
    }
    // iterate m-tuples
    auto rec = [&](auto&& self, int r, Real gprod, Real sign_z) -> void {
      if (r > N - 1) {
        const Real v = vandermonde(ztil);
        if (v == 0) return;
        const Real pval = ev.eval(nu, ztil);
        total += v * gprod * pair_prod * sign_z * pval / denom;
        return;
      }
      const int a = r - 1 + static_cast<int>(eps[static_cast<std::size_t>(r - 1)]);
      Real z = zs[static_cast<std::size_t>(a)];
      const Real sgn = eps[static_cast<std::size_t>(r - 1)] ? Real(-1) : Real(1);
      for (coord_t v = 0; v <= M; ++v) {
        ztil[static_cast<std::size_t>(r - 1)] = z;
        self(self, r + 1, gprod * G[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(v)],
             sign_z * sgn * z);
        z *= q;
      }
    };
    rec(rec, 1, Real(1), Real(1));
  }
  const Real ctilde = qcalc::norm_constants(N, qp, prec).c_tilde;
  return ctilde * total / vandermonde(zs);
}

}  // namespace qgt::kernels
