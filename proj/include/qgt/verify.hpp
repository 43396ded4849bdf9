#pragma once

// Identity-verification harness. Each check computes both sides of one
// identity independently, reports |residual| against a pinned tolerance,
// and serializes to a JSON line. Checks are pure given (inputs, Precision)
// and safe to run concurrently.

#include "qgt/chain.hpp"
#include "qgt/json_io.hpp"
#include "qgt/kernels.hpp"
#include "qgt/lattice.hpp"
#include "qgt/macdonald.hpp"
#include "qgt/parallel.hpp"
#include "qgt/rng.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qgt::verify {

using kernels::KernelRow;
using lattice::Configuration;
using lattice::Params;
using shapes::coord_t;
using shapes::Partition;
using shapes::Signature;

struct CheckReport {
  std::string name;
  io::json inputs;
  double residual = 0;
  double tolerance = 0;
  bool passed = false;
  double runtime_s = 0;
};

// CSV form of a report: the numeric payload without the inputs blob.
inline std::string report_csv_header() { return "name,residual,tolerance,passed"; }

inline std::string report_csv_line(const CheckReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.name << "," << r.residual << "," << r.tolerance << "," << (r.passed ? 1 : 0);
  return os.str();
}

// runtime is variable by nature; machine outputs meant to be byte-stable
// leave it out.
inline io::json to_json(const CheckReport& r, bool include_runtime = false) {
  io::json j{{"name", r.name},
             {"inputs", r.inputs},
             {"residual", r.residual},
             {"tolerance", r.tolerance},
             {"passed", r.passed}};
  if (include_runtime) j["runtime_s"] = r.runtime_s;
  return j;
}

namespace detail {

template <class Real>
double to_d(const Real& x) {
  return static_cast<double>(x);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

template <class Real>
CheckReport finish(std::string name, io::json inputs, const Real& residual, double tol,
                   const Stopwatch& sw, bool extra_ok = true) {
  CheckReport r;
  r.name = std::move(name);
  r.inputs = std::move(inputs);
  r.residual = to_d(residual);
  r.tolerance = tol;
  r.passed = extra_ok && r.residual <= tol;
  r.runtime_s = sw.seconds();
  return r;
}

// All signatures b interlacing a (coordinates b_i in [a_{i+1}, a_i]).
inline std::vector<Signature> interlacing_signatures(const Signature& a) {
  std::vector<Signature> out;
  const int n = a.length();
  std::vector<coord_t> b(static_cast<std::size_t>(n - 1), 0);
  auto rec = [&](auto&& self, int i) -> void {
    if (i > n - 1) {
      out.push_back(Signature(b));
      return;
    }
    for (coord_t v = a.coords[static_cast<std::size_t>(i)]; v <= a.coords[static_cast<std::size_t>(i - 1)]; ++v) {
      b[static_cast<std::size_t>(i - 1)] = v;
      self(self, i + 1);
    }
  };
  rec(rec, 1);
  return out;
}

}  // namespace detail

// Deterministic random double signature with level N and coordinates in
// [lo, hi]; two_sided forces both components nonempty when N >= 2.
inline shapes::DoubleSignature random_dsig(CounterRng& rng, int N, coord_t lo, coord_t hi,
                                           bool two_sided = false) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  int k = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N + 1)));
  if (two_sided && N >= 2) k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N - 1)));
  auto draw_side = [&](int len) {
    std::vector<coord_t> c;
    for (int i = 0; i < len; ++i) c.push_back(lo + static_cast<coord_t>(rng.next_below(span)));
    std::sort(c.rbegin(), c.rend());
    return Signature(std::move(c));
  };
  return {draw_side(k), draw_side(N - k)};
}

// ---------------------------------------------------------------------------
// check_stochastic: row sum + tail vs 1
// ---------------------------------------------------------------------------

template <class Real>
CheckReport check_stochastic(const Configuration& X, const Params<Real>& p,
                             const Precision<Real>& prec,
                             std::optional<coord_t> m_max_override = std::nullopt,
                             double tol = 1e-8) {
  detail::Stopwatch sw;
  const KernelRow<Real> row = kernels::kernel_row(X, p, prec, m_max_override);
  using std::abs;
  const Real residual = abs(row.total_weight() + row.tail_bound - 1);
  io::json inputs{{"X", io::to_json(X.dsig())}, {"params", io::to_json(p)}};
  if (m_max_override) inputs["m_max"] = *m_max_override;
  return detail::finish("stochastic", inputs, residual, tol, sw);
}

// ---------------------------------------------------------------------------
// check_coherency: kernel moments against the normalized polynomial
// ---------------------------------------------------------------------------

template <class Real>
CheckReport check_coherency(const Configuration& X, const Partition& nu, const Params<Real>& p,
                            const Precision<Real>& prec, double tol = 1e-8) {
  detail::Stopwatch sw;
  const int N = X.level();
  const KernelRow<Real> row = kernels::kernel_row(X, p, prec);
  const auto lhs = chain::moment(row, nu, p, prec);
  const Real rhs = macdonald::eval_config(nu, X, p) /
                   qcalc::gen_pochhammer(ipow(p.qp.t, N), p.qp, nu);
  using std::abs;
  const Real residual = abs(lhs.value - rhs);
  io::json inputs{{"X", io::to_json(X.dsig())},
                  {"nu", io::to_json(nu)},
                  {"params", io::to_json(p)},
                  {"band", detail::to_d(lhs.band)}};
  return detail::finish("coherency", inputs, residual, tol, sw);
}

// ---------------------------------------------------------------------------
// check_okounkov: the q-integral representation as a multiple series
// ---------------------------------------------------------------------------

// Min distance of the pairwise ratios from the grids q^Z and t q^Z.
template <class Real>
Real okounkov_margin(const std::vector<Real>& zs, const qcalc::QPair<Real>& qp) {
  using std::abs;
  using std::floor;
  using std::log;
  Real best(1);
  auto probe = [&](const Real& r, const Real& scale) {
    if (!(r > 0)) return;
    const Real mf = log(r / scale) / log(qp.q);
    const auto m0 = static_cast<long long>(floor(mf));
    for (long long m = m0 - 1; m <= m0 + 2; ++m) {
      const Real d = abs(r - scale * ipow(qp.q, m));
      if (d < best) best = d;
    }
  };
  for (std::size_t i = 0; i < zs.size(); ++i)
    for (std::size_t j = 0; j < zs.size(); ++j) {
      if (i == j) continue;
      const Real r = zs[i] / zs[j];
      probe(r, Real(1));
      probe(r, qp.t);
    }
  return best;
}

// Redraws positive points until the resonance margin holds.
template <class Real>
std::vector<Real> generic_points(int N, const qcalc::QPair<Real>& qp, CounterRng& rng,
                                 double margin = 1e-4) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::vector<Real> zs;
    for (int i = 0; i < N; ++i) zs.push_back(Real(4) / 10 + Real(26) / 10 * Real(rng.next_double()));
    std::sort(zs.rbegin(), zs.rend());
    bool distinct = true;
    for (int i = 0; i + 1 < N; ++i)
      if (zs[static_cast<std::size_t>(i)] == zs[static_cast<std::size_t>(i + 1)]) distinct = false;
    if (distinct && okounkov_margin(zs, qp) > Real(margin)) return zs;
  }
  throw std::runtime_error("generic_points: could not reach resonance margin");
}

template <class Real>
CheckReport check_okounkov(const std::vector<Real>& zs, const Partition& nu,
                           const qcalc::QPair<Real>& qp, const Precision<Real>& prec,
                           double tol = 1e-10) {
  detail::Stopwatch sw;
  using std::abs;
  using std::ceil;
  using std::log;
  const int N = static_cast<int>(zs.size());
  if (detail::to_d(okounkov_margin(zs, qp)) < 1e-4)
    throw std::invalid_argument("check_okounkov: points fail the resonance margin");
  // depth: geometric decay rate q per index, margin included
  const Real m_est = log(Real(tol) / 100) / log(qp.q);
  const coord_t M = static_cast<coord_t>(ceil(detail::to_d(m_est))) + 8;
  const Real lhs = kernels::okounkov_series(zs, nu, qp, prec, M);
  const Real rhs = macdonald::eval(nu, zs, qp) /
                   qcalc::gen_pochhammer(ipow(qp.t, N), qp, nu);
  const Real residual = abs(lhs / rhs - 1);
  io::json zj = io::json::array();
  for (const Real& z : zs) zj.push_back(to_decimal_string(z));
  io::json inputs{{"Z", zj}, {"nu", io::to_json(nu)},
                  {"q", to_decimal_string(qp.q)}, {"t", to_decimal_string(qp.t)},
                  {"M", M}};
  return detail::finish("okounkov", inputs, residual, tol, sw);
}

// ---------------------------------------------------------------------------
// check_branching_link: branching-rule coefficients against the kernel
// ---------------------------------------------------------------------------

// Coefficients L^N_{N-1}(a,b) of the specialized branching expansion:
//   L(a,b) = psi_{a/b} * t^{(1-N)(|a|-|b|)} * PS_{N-1}(b) / PS_N(a),
// where PS_N(c) = P_{c|N}(1, t^{-1}, ..., t^{1-N}).
template <class Real>
Real branching_coefficient(const Signature& a, const Signature& b, const qcalc::QPair<Real>& qp) {
  const int N = a.length();
  auto ps = [&](const Signature& c, int n) {
    std::vector<Real> xs;
    Real v(1);
    for (int i = 0; i < n; ++i) {
      xs.push_back(v);
      v /= qp.t;
    }
    return macdonald::eval_signature(c, xs, qp);
  };
  return shapes::branching_psi_sig(a, b, qp) *
         ipow(qp.t, static_cast<long long>(1 - N) * (a.weight() - b.weight())) * ps(b, N - 1) /
         ps(a, N);
}

// Asserts both halves of the link: the coherency form of the branching
// coefficients (summing over b interlacing a), and entry-wise agreement of
// L(a*, b*) with the kernel on one-sided configurations.
template <class Real>
CheckReport check_branching_link(const Signature& a, const Partition& nu,
                                 const qcalc::QPair<Real>& qp, const Precision<Real>& prec,
                                 double tol = 1e-8) {
  detail::Stopwatch sw;
  using std::abs;
  const int N = a.length();
  const Params<Real> p(qp, Real(1), Real(-1));
  auto config_of = [](const Signature& s) {
    return Configuration(shapes::DoubleSignature(s, Signature{}));
  };
  const Configuration Xa = config_of(a);
  Real lhs(0);
  Real max_block_diff(0);
  const Real denom_lo = qcalc::gen_pochhammer(ipow(qp.t, N - 1), qp, nu);
  macdonald::Evaluator<Real> ev(qp);
  for (const Signature& b : detail::interlacing_signatures(a)) {
    const Real coeff = branching_coefficient(a.star(), b.star(), qp);
    const Configuration Xb = config_of(b);
    lhs += coeff * ev.eval(nu, lattice::config_values(Xb, p)) / denom_lo;
    const Real kernel_entry = kernels::kernel_general(Xa, Xb, p, prec);
    const Real d = abs(coeff - kernel_entry);
    if (d > max_block_diff) max_block_diff = d;
  }
  const Real rhs = macdonald::eval_config(nu, Xa, p) /
                   qcalc::gen_pochhammer(ipow(qp.t, N), qp, nu);
  Real residual = abs(lhs - rhs);
  if (max_block_diff > residual) residual = max_block_diff;
  io::json inputs{{"a", io::to_json(a)}, {"nu", io::to_json(nu)},
                  {"q", to_decimal_string(qp.q)}, {"t", to_decimal_string(qp.t)}};
  return detail::finish("branching_link", inputs, residual, tol, sw);
}

// ---------------------------------------------------------------------------
// check_symmetry: the label-argument symmetry of normalized polynomials
// ---------------------------------------------------------------------------

template <class Real>
CheckReport check_symmetry(const Partition& la, const Partition& mu, int N,
                           const qcalc::QPair<Real>& qp, const Precision<Real>&,
                           double tol = 1e-8) {
  detail::Stopwatch sw;
  using std::abs;
  auto spec_point = [&](const Partition& c) {
    std::vector<Real> xs;
    for (int i = 1; i <= N; ++i) xs.push_back(ipow(qp.q, c.part(i)) * ipow(qp.t, N - i));
    return xs;
  };
  const Real denom_la = macdonald::principal_spec(la, N, qp);
  const Real denom_mu = macdonald::principal_spec(mu, N, qp);
  const Real lhs = macdonald::eval(mu, spec_point(la), qp) / denom_mu;
  const Real rhs = macdonald::eval(la, spec_point(mu), qp) / denom_la;
  Real scale = abs(lhs);
  if (scale < 1) scale = 1;
  const Real residual = abs(lhs - rhs) / scale;
  io::json inputs{{"lambda", io::to_json(la)}, {"mu", io::to_json(mu)}, {"N", N},
                  {"q", to_decimal_string(qp.q)}, {"t", to_decimal_string(qp.t)}};
  return detail::finish("symmetry", inputs, residual, tol, sw);
}

// ---------------------------------------------------------------------------
// check_atom_bound: the extreme atom of the level-1 row
// ---------------------------------------------------------------------------

// Universal lower bound for the extreme atom:
//   c = prod_{m>=1} (t^m;q)_inf / [ (-1;q)_inf prod_{m>=1} (-t^m;q)_inf ].
template <class Real>
Real atom_lower_constant(const qcalc::QPair<Real>& qp, const Precision<Real>& prec) {
  using std::ceil;
  using std::log;
  const Real cut = prec.eps * (1 - qp.q) * (1 - qp.t) / 4;
  const auto M = static_cast<coord_t>(ceil(detail::to_d(log(cut) / log(qp.t)))) + 2;
  Real num(1), den = qcalc::qpoch_infinite(Real(-1), qp.q, prec);
  Real tm(1);
  for (coord_t m = 1; m <= M; ++m) {
    tm *= qp.t;
    num *= qcalc::qpoch_infinite(tm, qp.q, prec);
    den *= qcalc::qpoch_infinite(-tm, qp.q, prec);
  }
  return num / den;
}

// The point of maximal absolute value (either endpoint on a tie).
template <class Real>
std::size_t extreme_point_index(const Configuration& X, const Params<Real>& p) {
  const auto xs = lattice::config_values(X, p);
  using std::abs;
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (abs(xs[i]) > abs(xs[i0])) i0 = i;
  return i0;
}

// Closed form for the extreme atom of Lambda^N_1(X, .):
//   (t;q)_inf/(t^N;q)_inf * prod_{x != x0} (x/x0 t;q)_inf / (x/x0;q)_inf .
template <class Real>
Real extreme_atom_closed_form(const Configuration& X, const Params<Real>& p,
                              const Precision<Real>& prec) {
  const int N = X.level();
  const auto xs = lattice::config_values(X, p);
  const std::size_t i0 = extreme_point_index(X, p);
  Real acc = qcalc::qpoch_infinite(p.qp.t, p.qp.q, prec) /
             qcalc::qpoch_infinite(ipow(p.qp.t, N), p.qp.q, prec);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i == i0) continue;
    const Real r = xs[i] / xs[i0];
    acc *= qcalc::qpoch_infinite(r * p.qp.t, p.qp.q, prec) /
           qcalc::qpoch_infinite(r, p.qp.q, prec);
  }
  return acc;
}

template <class Real>
CheckReport check_atom_bound(const Configuration& X, const Params<Real>& p,
                             const Precision<Real>& prec, double tol = 1e-8,
                             int gen_func_samples = 5) {
  detail::Stopwatch sw;
  using std::abs;
  const int N = X.level();
  const KernelRow<Real> row1 = N >= 2 ? kernels::kernel_compose(X, 1, p, prec)
                                      : KernelRow<Real>{X, 1, {{X, Real(1)}}, Real(0)};
  const auto xs = lattice::config_values(X, p);
  Real xmax(0);
  for (const Real& x : xs)
    if (abs(x) > xmax) xmax = abs(x);
  // locate the extreme atom structurally (a tie across zero is two distinct
  // atoms; the closed form describes one of them)
  const std::size_t i0 = extreme_point_index(X, p);
  const lattice::LatticePoint px = X.point(static_cast<int>(i0) + 1);
  const Configuration extreme =
      px.side == lattice::Side::plus
          ? Configuration{{Signature({px.coord}), Signature{}}}
          : Configuration{{Signature{}, Signature({px.coord})}};
  Real atom_weight(0);
  for (const auto& a : row1.atoms)
    if (a.target == extreme) atom_weight += a.weight;
  const Real closed = extreme_atom_closed_form(X, p, prec);
  const Real c_bound = atom_lower_constant(p.qp, prec);
  Real residual = abs(atom_weight - closed);
  const Real bound_violation = c_bound - atom_weight;
  if (bound_violation > residual) residual = bound_violation;
  // generating-function identity at sample z beyond the support
  Real gen_residual(0);
  for (int s = 0; s < gen_func_samples; ++s) {
    const Real z = xmax * (Real(137) / 100 + Real(61) / 100 * s);
    Real lhs(0);
    for (const auto& a : row1.atoms) {
      const Real y = lattice::config_values(a.target, p)[0];
      lhs += a.weight * qcalc::qpoch_infinite(y / z * ipow(p.qp.t, N), p.qp.q, prec) /
             qcalc::qpoch_infinite(y / z, p.qp.q, prec);
    }
    Real rhs(1);
    for (const Real& x : xs)
      rhs *= qcalc::qpoch_infinite(x / z * p.qp.t, p.qp.q, prec) /
             qcalc::qpoch_infinite(x / z, p.qp.q, prec);
    const Real d = abs(lhs - rhs);
    if (d > gen_residual) gen_residual = d;
  }
  // the generating-function sum is short by the composed tail at most
  const Real slack = row1.tail_bound * 4;
  if (gen_residual > slack && gen_residual - slack > residual) residual = gen_residual - slack;
  io::json inputs{{"X", io::to_json(X.dsig())},
                  {"params", io::to_json(p)},
                  {"atom", detail::to_d(atom_weight)},
                  {"closed_form", detail::to_d(closed)},
                  {"lower_constant", detail::to_d(c_bound)}};
  return detail::finish("atom_bound", inputs, residual, tol, sw);
}

// ---------------------------------------------------------------------------
// check_q1_degeneration: lattice kernels against the continuum kernel
// ---------------------------------------------------------------------------

namespace detail {

// Composite-Simpson integral of a smooth density on an open cell.
inline double simpson_cell(const std::function<double(double)>& f, double a, double b,
                           int steps = 512) {
  double acc = 0;
  for (int s = 0; s < steps; ++s) {
    const double u0 = a + (b - a) * s / steps;
    const double u1 = a + (b - a) * (s + 1) / steps;
    acc += (u1 - u0) / 6 * (f(u0) + 4 * f((u0 + u1) / 2) + f(u1));
  }
  return acc;
}

}  // namespace detail

// Cell-mass comparison of the one-step row (from a lattice approximation of
// fixed real targets c_1 > ... > c_N > 0) against the Dixon-Anderson density
// integrated over the same cells, along a list of q values increasing to 1.
// N = 2 compares the single-gap masses; N = 3 compares both marginals
// (the interlacing region factorizes into independent gap ranges).
template <class Real>
CheckReport check_q1_degeneration(int tau, std::vector<double> targets,
                                  const std::vector<double>& q_list,
                                  const Precision<Real>& prec, double tol = 0.05) {
  detail::Stopwatch sw;
  using std::abs;
  using std::log;
  const int N = static_cast<int>(targets.size());
  if (N != 2 && N != 3)
    throw std::invalid_argument("check_q1_degeneration: two or three targets");
  for (int i = 0; i + 1 < N; ++i)
    if (!(targets[static_cast<std::size_t>(i)] > targets[static_cast<std::size_t>(i + 1)] &&
          targets.back() > 0))
      throw std::invalid_argument("check_q1_degeneration: targets must be descending positive");
  std::vector<double> residuals;
  for (double qd : q_list) {
    const Real q = parse_real<Real>(std::to_string(qd));
    const auto qp = qcalc::QPair<Real>::with_tau(q, tau);
    const Params<Real> p(qp, Real(1), Real(-1));
    const double lq = detail::to_d(log(q));
    std::vector<coord_t> coords;
    for (int row = 1; row <= N; ++row)
      coords.push_back(static_cast<coord_t>(
          std::llround(tau * (row - 1) - std::log(targets[static_cast<std::size_t>(row - 1)]) / lq)));
    for (int i = 0; i + 1 < N; ++i)
      if (coords[static_cast<std::size_t>(i + 1)] > coords[static_cast<std::size_t>(i)])
        throw std::runtime_error("check_q1_degeneration: targets too close for lattice");
    const Configuration X{shapes::DoubleSignature(Signature(coords), Signature{})};
    std::vector<double> xd;
    for (const Real& v : lattice::config_values(X, p)) xd.push_back(detail::to_d(v));
    const KernelRow<Real> row = kernels::kernel_row(X, p, prec);
    const double dtau = static_cast<double>(tau);
    // quadrature touches the cell edges; keep samples strictly interlacing
    auto inward = [&](double y, int gap) {
      const double lo = xd[static_cast<std::size_t>(gap + 1)];
      const double hi = xd[static_cast<std::size_t>(gap)];
      const double nudge = (hi - lo) * 1e-12;
      return std::min(hi - nudge, std::max(lo + nudge, y));
    };
    // marginal continuum density of the i-th descendant (0-based gap index)
    auto marginal = [&](int i, double y) -> double {
      y = inward(y, i);
      if (N == 2) return kernels::dixon_anderson<double>(xd, {y}, dtau);
      const int other = 1 - i;
      const double lo = xd[static_cast<std::size_t>(other + 1)];
      const double hi = xd[static_cast<std::size_t>(other)];
      auto slice = [&](double u) {
        std::vector<double> yy(2);
        yy[static_cast<std::size_t>(i)] = y;
        yy[static_cast<std::size_t>(other)] = inward(u, other);
        return kernels::dixon_anderson<double>(xd, yy, dtau);
      };
      return detail::simpson_cell(slice, lo, hi, 64);
    };
    double worst = 0;
    for (int gap = 0; gap + 1 < N; ++gap) {
      const double lo = xd[static_cast<std::size_t>(gap + 1)];
      const double hi = xd[static_cast<std::size_t>(gap)];
      for (int cell = 0; cell < 4; ++cell) {
        const double a = lo + (hi - lo) * cell / 4.0;
        const double b = lo + (hi - lo) * (cell + 1) / 4.0;
        Real mass(0);
        for (const auto& atom : row.atoms) {
          const double y =
              detail::to_d(lattice::config_values(atom.target, p)[static_cast<std::size_t>(gap)]);
          if (y > a && y <= b) mass += atom.weight;
        }
        const double cont =
            (tau == 1 && N == 2)
                ? (b - a) / (hi - lo)  // uniform gap density
                : detail::simpson_cell([&](double y) { return marginal(gap, y); }, a, b, 256);
        worst = std::max(worst, std::abs(detail::to_d(mass) - cont));
      }
    }
    residuals.push_back(worst);
  }
  double residual = residuals.back();
  for (std::size_t i = 0; i + 1 < residuals.size(); ++i)
    if (residuals[i + 1] > residuals[i])
      residual = std::max(residual, tol + (residuals[i + 1] - residuals[i]));
  io::json inputs{{"tau", tau}, {"targets", targets}, {"q_list", q_list},
                  {"residuals", residuals}};
  return detail::finish("q1_degeneration", inputs, Real(residual), tol, sw);
}

// Two-point convenience overload.
template <class Real>
CheckReport check_q1_degeneration(int tau, double c1, double c2,
                                  const std::vector<double>& q_list,
                                  const Precision<Real>& prec, double tol = 0.05) {
  return check_q1_degeneration(tau, std::vector<double>{c1, c2}, q_list, prec, tol);
}

// ---------------------------------------------------------------------------
// check_boundary_convergence: boundary-moment convergence diagnostics
// ---------------------------------------------------------------------------

template <class Real>
CheckReport check_boundary_convergence(const lattice::InfiniteConfiguration<Real>& xi,
                           const std::vector<Partition>& nu_list, int K,
                           const std::vector<int>& n_list, const Params<Real>& p,
                           const Precision<Real>& prec, double tol = 1e-10) {
  detail::Stopwatch sw;
  using std::abs;
  double violation = 0;  // worst increase of the drift along n_list
  io::json drift_table = io::json::array();
  for (const Partition& nu : nu_list) {
    const Real target = macdonald::eval_infinite(nu, xi, prec).value;
    std::vector<double> drifts;
    for (int n : n_list) {
      const KernelRow<Real> row = chain::boundary_row(xi, K, n, p, prec);
      const auto m = chain::moment(row, nu, p, prec);
      drifts.push_back(detail::to_d(abs(m.value - target)));
    }
    for (std::size_t i = 0; i + 1 < drifts.size(); ++i)
      violation = std::max(violation, drifts[i + 1] - drifts[i]);
    drift_table.push_back(io::json{{"nu", io::to_json(nu)}, {"drifts", drifts}});
  }
  io::json inputs{{"K", K}, {"N_list", n_list}, {"drifts", drift_table}};
  return detail::finish("boundary_convergence", inputs, Real(violation), tol, sw);
}

// ---------------------------------------------------------------------------
// Suite runner and manifest
// ---------------------------------------------------------------------------

struct SuiteItem {
  std::string label;
  std::function<CheckReport()> run;
};

inline std::vector<CheckReport> run_suite(const std::vector<SuiteItem>& items, unsigned jobs) {
  return parallel_map<CheckReport>(items.size(), jobs,
                                   [&](std::size_t i) { return items[i].run(); });
}

// Desk-scale default suite.
template <class Real>
std::vector<SuiteItem> default_suite() {
  std::vector<SuiteItem> items;
  const Precision<Real> full = Precision<Real>::standard();
  const Precision<Real> rowp = full.with_eps(pow10<Real>(-14));
  auto add = [&](std::string label, std::function<CheckReport()> f) {
    items.push_back({std::move(label), std::move(f)});
  };

  add("stochastic tau=1 two-point", [=] {
    const auto qp = qcalc::QPair<Real>::with_tau(parse_real<Real>("0.5"), 1);
    const Params<Real> p(qp, Real(1), Real(-1));
    return check_stochastic(Configuration({Signature({0, 0}), Signature{}}), p, rowp);
  });
  add("stochastic straddle", [=] {
    const qcalc::QPair<Real> qp(parse_real<Real>("0.5"), parse_real<Real>("0.25"));
    const Params<Real> p(qp, Real(1), Real(-1));
    return check_stochastic(Configuration({Signature({0}), Signature({0})}), p, rowp);
  });
  add("stochastic random N=4", [=] {
    CounterRng rng(12);
    const qcalc::QPair<Real> qp(parse_real<Real>("0.7"), parse_real<Real>("0.3"));
    const Params<Real> p(qp, Real(1), Real(-1));
    return check_stochastic(Configuration(random_dsig(rng, 4, -2, 2, true)), p, rowp);
  });
  add("coherency tau=2 N=3", [=] {
    const auto qp = qcalc::QPair<Real>::with_tau(parse_real<Real>("0.4"), 2);
    const Params<Real> p(qp, Real(1), Real(-1));
    return check_coherency(Configuration({Signature({2, 0}), Signature({1})}),
                           Partition({2}), p, rowp);
  });
  add("coherency generic N=3", [=] {
    const qcalc::QPair<Real> qp(parse_real<Real>("0.55"), parse_real<Real>("0.3"));
    const Params<Real> p(qp, Real(1), Real(-1));
    return check_coherency(Configuration({Signature({1, -1}), Signature({0})}),
                           Partition({1, 1}), p, rowp);
  });
  add("okounkov N=2", [=] {
    const qcalc::QPair<Real> qp(parse_real<Real>("0.3"), parse_real<Real>("0.45"));
    return check_okounkov(std::vector<Real>{Real(2), parse_real<Real>("0.7")}, Partition({1}),
                          qp, full);
  });
  add("okounkov N=3", [=] {
    const qcalc::QPair<Real> qp(parse_real<Real>("0.35"), parse_real<Real>("0.5"));
    CounterRng rng(77);
    return check_okounkov(generic_points(3, qp, rng), Partition({2, 1}), qp, full);
  });
  add("branching link N=3", [=] {
    const qcalc::QPair<Real> qp(parse_real<Real>("0.5"), parse_real<Real>("0.35"));
    return check_branching_link(Signature({2, 1, 0}), Partition({2}), qp, rowp);
  });
  add("symmetry N=3", [=] {
    const qcalc::QPair<Real> qp(parse_real<Real>("0.45"), parse_real<Real>("0.6"));
    return check_symmetry(Partition({2, 1}), Partition({1, 1}), 3, qp, full);
  });
  add("atom bound tau=1", [=] {
    const auto qp = qcalc::QPair<Real>::with_tau(parse_real<Real>("0.5"), 1);
    const Params<Real> p(qp, Real(1), Real(-1));
    return check_atom_bound(Configuration({Signature({0, -1}), Signature{}}), p, rowp);
  });
  add("atom bound straddle N=3", [=] {
    const qcalc::QPair<Real> qp(parse_real<Real>("0.5"), parse_real<Real>("0.35"));
    const Params<Real> p(qp, Real(1), Real(-1));
    return check_atom_bound(Configuration({Signature({1, 0}), Signature({0})}), p, rowp);
  });
  add("q->1 Dixon-Anderson tau=1", [=] {
    return check_q1_degeneration<Real>(1, 1.0, 0.45, {0.9, 0.95, 0.99}, rowp);
  });
  add("boundary convergence constant tail", [=] {
    const qcalc::QPair<Real> qp(parse_real<Real>("0.5"), parse_real<Real>("0.4"));
    const Params<Real> p(qp, Real(1), Real(-1));
    lattice::InfiniteSignature plus({2, 1}, {lattice::TailRule::Kind::constant, 0});
    lattice::InfiniteConfiguration<Real> xi({plus, lattice::InfiniteSignature{}}, p,
                                            lattice::default_delta(p, rowp));
    return check_boundary_convergence(xi, {Partition({1}), Partition({2})}, 2, {5, 7}, p, rowp);
  });
  return items;
}

// Manifest: one check per line, "name key=value ...", '#' comments.
struct ManifestEntry {
  std::string name;
  std::map<std::string, std::string> kv;
};

inline std::vector<ManifestEntry> parse_manifest(std::istream& in) {
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    ManifestEntry e;
    if (!(ls >> e.name)) continue;
    std::string tok;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("manifest: expected key=value, got '" + tok + "'");
      e.kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace detail {

inline std::vector<coord_t> parse_int_list(const std::string& s) {
  std::vector<coord_t> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stoll(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

}  // namespace detail

// Builds runnable items from manifest entries. All arguments are parsed
// eagerly (errors surface at build time) and the stored closures hold them
// by value. Unknown names throw.
template <class Real>
std::vector<SuiteItem> suite_from_manifest(const std::vector<ManifestEntry>& entries) {
  std::vector<SuiteItem> items;
  const Precision<Real> full = Precision<Real>::standard();
  const Precision<Real> rowp = full.with_eps(pow10<Real>(-14));
  for (const ManifestEntry& e : entries) {
    auto get = [&](const std::string& key, const std::string& fallback) {
      auto it = e.kv.find(key);
      return it == e.kv.end() ? fallback : it->second;
    };
    const Real q = parse_real<Real>(get("q", "0.5"));
    const qcalc::QPair<Real> qp =
        e.kv.count("tau") ? qcalc::QPair<Real>::with_tau(q, std::stoi(e.kv.at("tau")))
                          : qcalc::QPair<Real>(q, parse_real<Real>(get("t", "0.25")));
    const Params<Real> par(qp, parse_real<Real>(get("zeta_plus", "1")),
                           parse_real<Real>(get("zeta_minus", "-1")));
    const Configuration cfg({Signature(detail::parse_int_list(get("plus", ""))),
                             Signature(detail::parse_int_list(get("minus", "")))});
    const Partition nu(detail::parse_int_list(get("nu", "")));
    const std::string name = e.name;
    if (name == "stochastic") {
      std::optional<coord_t> mm;
      if (e.kv.count("m_max")) mm = std::stoll(e.kv.at("m_max"));
      items.push_back({name, [=] { return check_stochastic(cfg, par, rowp, mm); }});
    } else if (name == "coherency") {
      items.push_back({name, [=] { return check_coherency(cfg, nu, par, rowp); }});
    } else if (name == "okounkov") {
      const auto seed = std::stoull(get("seed", "1"));
      const int n = std::stoi(get("n", "2"));
      items.push_back({name, [=] {
        CounterRng rng(seed);
        return check_okounkov(generic_points(n, qp, rng), nu, qp, full);
      }});
    } else if (name == "branching") {
      const Signature a(detail::parse_int_list(get("a", "2,1,0")));
      items.push_back({name, [=] { return check_branching_link(a, nu, qp, rowp); }});
    } else if (name == "symmetry") {
      const Partition la(detail::parse_int_list(get("lambda", "")));
      const Partition mu(detail::parse_int_list(get("mu", "")));
      const int n = std::stoi(get("N", "3"));
      items.push_back({name, [=] { return check_symmetry(la, mu, n, qp, full); }});
    } else if (name == "atom-bound") {
      items.push_back({name, [=] { return check_atom_bound(cfg, par, rowp); }});
    } else if (name == "q1-dixon") {
      const int tau = std::stoi(get("tau", "1"));
      const double c1 = std::stod(get("c1", "1.0"));
      const double c2 = std::stod(get("c2", "0.45"));
      items.push_back({name, [=] {
        return check_q1_degeneration<Real>(tau, c1, c2, {0.9, 0.95, 0.99}, rowp);
      }});
    } else {
      throw std::runtime_error("manifest: unknown check '" + name + "'");
    }
  }
  return items;
}

}  // namespace qgt::verify
