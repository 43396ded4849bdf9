#pragma once

// The extended Markov chain: sampling down-trajectories, Gibbs path weights,
// kernel moments, and boundary-kernel approximation.

#include "qgt/kernels.hpp"
#include "qgt/lattice.hpp"
#include "qgt/macdonald.hpp"
#include "qgt/rng.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qgt::chain {

using kernels::KernelRow;
using lattice::Configuration;
using lattice::Params;
using shapes::coord_t;
using shapes::Partition;

template <class Real>
struct PathSample {
  std::vector<Configuration> levels;  // level N down to 1
  std::uint64_t seed = 0;
  int truncation_events = 0;
};

// ---------------------------------------------------------------------------
// Row sampling
// ---------------------------------------------------------------------------

// Inverse-CDF sampler over a fixed enumeration of the row. The enumeration
// is append-only in the straddle depth (depth-0 block first, then depth-1,
// ...), so deepening the cutoff never reorders already-walked atoms and the
// cumulative walk stays exact. Within a block: eps(k) = 0 then 1, regular
// m-vectors in lexicographic order.
template <class Real>
class RowSampler {
 public:
  RowSampler(const Configuration& X, const Params<Real>& p, const Precision<Real>& prec)
      : X_(X), p_(p), prec_(prec), eng_(X, p, prec) {
    const int N = X.level(), k = X.k();
    straddle_ = (k > 0 && k < N);
    policy_ = lattice::default_straddle_m_max(p.qp, prec);
    std::vector<coord_t> m(static_cast<std::size_t>(N - 1), 0);
    // regular m-vectors, lexicographic
    auto rec = [&](auto&& self, int r) -> void {
      if (straddle_ && r == k) ++r;
      if (r > N - 1) {
        combos_.push_back(m);
        return;
      }
      for (coord_t v = 0; v <= eng_.g[static_cast<std::size_t>(r - 1)]; ++v) {
        m[static_cast<std::size_t>(r - 1)] = v;
        self(self, r + 1);
      }
      m[static_cast<std::size_t>(r - 1)] = 0;
    };
    rec(rec, 1);
  }

  Configuration sample(CounterRng& rng, int* truncation_events = nullptr) {
    Real u(rng.next_double());
    const int N = X_.level(), k = X_.k();
    std::vector<Real> ys(static_cast<std::size_t>(N - 1));
    std::vector<std::uint8_t> eps(static_cast<std::size_t>(N - 1), 0);
    for (int r = k + 1; r <= N - 1; ++r) eps[static_cast<std::size_t>(r - 1)] = 1;

    if (!straddle_) {
      Configuration last;
      for (const auto& m : combos_) {
        Configuration y = lattice::detail::cotransition_target(X_, eps, m);
        u -= eng_.weight(m, 0, 0, ys);
        if (u < 0) return y;
        last = y;
      }
      // roundoff leak past a finitely supported row: return the last target
      if (truncation_events) ++(*truncation_events);
      return last;
    }

    for (coord_t mk = 0;; ++mk) {
      if (mk > 0 && truncation_events && mk == policy_ + 1) ++(*truncation_events);
      for (int e = 0; e < 2; ++e) {
        eps[static_cast<std::size_t>(k - 1)] = static_cast<std::uint8_t>(e);
        for (const auto& m0 : combos_) {
          auto m = m0;
          m[static_cast<std::size_t>(k - 1)] = mk;
          u -= eng_.weight(m, e, mk, ys);
          if (u < 0) return lattice::detail::cotransition_target(X_, eps, m);
        }
      }
      if (mk > policy_ * 8 + 1024)
        throw std::runtime_error("RowSampler: draw failed to terminate");
    }
  }

 private:
  Configuration X_;
  Params<Real> p_;
  Precision<Real> prec_;
  kernels::detail::RowEngine<Real> eng_;
  bool straddle_ = false;
  coord_t policy_ = 0;
  std::vector<std::vector<coord_t>> combos_;
};

template <class Real>
Configuration sample_cotransition(const Configuration& X, CounterRng& rng, const Params<Real>& p,
                                  const Precision<Real>& prec, int* truncation_events = nullptr) {
  if (X.level() < 2) throw std::invalid_argument("sample_cotransition: level must be >= 2");
  RowSampler<Real> sampler(X, p, prec);
  return sampler.sample(rng, truncation_events);
}

template <class Real>
PathSample<Real> sample_path(const Configuration& X_N, CounterRng& rng, const Params<Real>& p,
                             const Precision<Real>& prec) {
  if (X_N.level() < 1) throw std::invalid_argument("sample_path: level must be >= 1");
  PathSample<Real> out;
  out.seed = rng.seed();
  out.levels.push_back(X_N);
  Configuration cur = X_N;
  while (cur.level() >= 2) {
    cur = sample_cotransition(cur, rng, p, prec, &out.truncation_events);
    out.levels.push_back(cur);
  }
  return out;
}

// Gibbs weight of a cylinder: m_top times the product of the traversed
// kernel entries.
template <class Real>
Real gibbs_weight(const PathSample<Real>& path, const Real& m_top, const Params<Real>& p,
                  const Precision<Real>& prec) {
  Real w = m_top;
  for (std::size_t i = 0; i + 1 < path.levels.size(); ++i)
    w *= kernels::kernel_general(path.levels[i], path.levels[i + 1], p, prec);
  return w;
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

template <class Real>
struct Moment {
  Real value;
  Real band;  // tail mass times the largest attained normalized |P|
};

// sum_atoms w * P_{nu|K}(Y) / (t^K;q,t)_nu, plus an error band for the
// unenumerated tail.
template <class Real>
Moment<Real> moment(const KernelRow<Real>& row, const Partition& nu, const Params<Real>& p,
                    const Precision<Real>& prec) {
  const int K = row.level_to;
  if (nu.length() > K) throw std::invalid_argument("moment: length(nu) > K");
  using std::abs;
  const Real denom = qcalc::gen_pochhammer(ipow(p.qp.t, K), p.qp, nu);
  Real acc(0), peak(0);
  macdonald::Evaluator<Real> ev(p.qp);
  for (const auto& atom : row.atoms) {
    const Real v = ev.eval(nu, lattice::config_values(atom.target, p)) / denom;
    acc += atom.weight * v;
    if (abs(v) > peak) peak = abs(v);
  }
  Real band = row.tail_bound * peak;
  using std::abs;
  const Real floor = abs(acc) * prec.eps;
  if (band < floor) band = floor;
  return {acc, band};
}

// ---------------------------------------------------------------------------
// Coherent systems (per-level measures)
// ---------------------------------------------------------------------------

template <class Real>
struct DiscreteMeasure {
  std::vector<std::pair<Configuration, Real>> atoms;
  Real deficit = Real(0);
};

// One step of M_N -> M_N Lambda^N_{N-1}.
template <class Real>
DiscreteMeasure<Real> push_forward(const DiscreteMeasure<Real>& m, const Params<Real>& p,
                                   const Precision<Real>& prec) {
  std::map<shapes::DoubleSignature, Real> merged;
  Real deficit = m.deficit;
  for (const auto& [cfg, w] : m.atoms) {
    const KernelRow<Real> row = kernels::kernel_row(cfg, p, prec);
    deficit += w * row.tail_bound;
    for (const auto& atom : row.atoms) {
      auto [it, inserted] = merged.emplace(atom.target.dsig(), w * atom.weight);
      if (!inserted) it->second += w * atom.weight;
    }
  }
  DiscreteMeasure<Real> out;
  out.deficit = deficit;
  for (auto& [dsig, w] : merged) out.atoms.emplace_back(Configuration(dsig), w);
  return out;
}

// ---------------------------------------------------------------------------
// Boundary approximation
// ---------------------------------------------------------------------------

// Lambda^{N_approx}_K row started from the N_approx-point truncation of an
// infinite configuration; its nu-moments approximate the Macdonald symmetric
// function at the boundary point.
template <class Real>
KernelRow<Real> boundary_row(const lattice::InfiniteConfiguration<Real>& xi, int K, int N_approx,
                             const Params<Real>& p, const Precision<Real>& prec) {
  if (K < 1) throw std::invalid_argument("boundary_row: K must be >= 1");
  if (N_approx <= K) throw std::invalid_argument("boundary_row: N_approx must exceed K");
  const Configuration xn = xi.truncate_level(N_approx);
  return kernels::kernel_compose(xn, K, p, prec);
}

}  // namespace qgt::chain
