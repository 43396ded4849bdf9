#include "qgt/kernels.hpp"
#include "qgt/rng.hpp"
#include "qgt/verify.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

using namespace qgt;
using kernels::RFormula;
using lattice::Configuration;
using lattice::Params;
using shapes::coord_t;
using shapes::Partition;
using shapes::Signature;
using R = real50;
using qcalc::QPair;

namespace {

const Precision<R> prec = Precision<R>::standard().with_eps(pow10<R>(-14));

R rel_diff(const R& a, const R& b) {
  using std::abs;
  R scale = abs(b);
  if (scale < 1) scale = 1;
  return abs(a - b) / scale;
}

Params<R> params(const std::string& q, const std::string& t) {
  return {QPair<R>(parse_real<R>(q), parse_real<R>(t)), R(1), R(-1)};
}

Params<R> params_tau(const std::string& q, int tau) {
  return {QPair<R>::with_tau(parse_real<R>(q), tau), R(1), R(-1)};
}

}  // namespace

TEST_CASE("special kernel closed cases") {
  {
    // tau=1, X={1,q}: the single interlacing target carries mass 1
    const auto p = params_tau("0.5", 1);
    const Configuration X{{Signature({0, 0}), Signature{}}};
    const Configuration Y{{Signature({0}), Signature{}}};
    CHECK(rel_diff(kernels::kernel_special(X, Y, 1, p, prec), R(1)) < pow10<R>(-46));
    CHECK(kernels::kernel_special(X, Configuration{{Signature({-3}), Signature{}}}, 1, p,
                                  prec) == 0);
  }
  {
    // tau=1, X={1,q^2}: weights 1/(1+q) and q/(1+q)
    const auto p = params_tau("0.5", 1);
    const R q = p.qp.q;
    const Configuration X{{Signature({0, -1}), Signature{}}};  // {1, q^2} since x2 = q^{-(-1)} t = q^2
    const Configuration Y1{{Signature({0}), Signature{}}};
    const Configuration Yq{{Signature({-1}), Signature{}}};
    CHECK(rel_diff(kernels::kernel_special(X, Y1, 1, p, prec), 1 / (1 + q)) < pow10<R>(-46));
    CHECK(rel_diff(kernels::kernel_special(X, Yq, 1, p, prec), q / (1 + q)) < pow10<R>(-46));
  }
  {
    // tau=2, N=2, a+=(3,1): three weights summing to 1
    const auto p = params_tau("0.45", 2);
    const Configuration X{{Signature({3, 1}), Signature{}}};
    const auto cts = lattice::cotransitions(X, 0);
    REQUIRE(cts.size() == 3);
    R sum(0);
    for (const auto& ct : cts) {
      const R w = kernels::kernel_special(X, ct.target, 2, p, prec);
      CHECK(w > 0);
      sum += w;
    }
    CHECK(rel_diff(sum, R(1)) < pow10<R>(-45));
  }
  // wrong tau rejected
  const auto p = params("0.5", "0.3");
  CHECK_THROWS_AS(kernels::kernel_special(Configuration{{Signature({0, 0}), Signature{}}},
                                          Configuration{{Signature({0}), Signature{}}}, 2, p,
                                          prec),
                  std::domain_error);
}

TEST_CASE("tau=1 closed form") {
  // entries reduce to (q;q)_{N-1} prod|y| V(Y)/V(X)
  CounterRng rng(40);
  const auto p = params_tau("0.6", 1);
  using std::abs;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(3));
    const Configuration X(verify::random_dsig(rng, n, -2, 2));
    for (const auto& ct : lattice::cotransitions(X, 3)) {
      const auto xs = lattice::config_values(X, p);
      const auto ys = lattice::config_values(ct.target, p);
      R closed = qcalc::qpoch_finite(p.qp.q, p.qp.q, n - 1) * kernels::vandermonde(ys) /
                 kernels::vandermonde(xs);
      for (const R& y : ys) closed *= abs(y);
      CHECK(rel_diff(kernels::kernel_special(X, ct.target, 1, p, prec), closed) <
            pow10<R>(-44));
      CHECK(rel_diff(kernels::kernel_general(X, ct.target, p, prec), closed) < pow10<R>(-44));
    }
  }
}

TEST_CASE("special and general kernels agree at t = q^tau") {
  CounterRng rng(41);
  using std::abs;
  for (int tau : {1, 2, 3}) {
    for (const char* q : {"0.35", "0.6"}) {
      const auto p = params_tau(q, tau);
      for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(3));
        const Configuration X(verify::random_dsig(rng, n, -2, 2));
        R maxdiff(0);
        for (const auto& ct : lattice::cotransitions(X, 6)) {
          const R s = kernels::kernel_special(X, ct.target, tau, p, prec);
          const R g = kernels::kernel_general(X, ct.target, p, prec);
          if (abs(s - g) > maxdiff) maxdiff = abs(s - g);
        }
        CHECK(maxdiff < pow10<R>(-44));
      }
    }
  }
}

TEST_CASE("r_function routes agree") {
  using std::abs;
  CounterRng rng(42);
  // generic t: all three routes
  {
    const auto p = params("0.52", "0.337");
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 2 + static_cast<int>(rng.next_below(3));
      const Configuration X(verify::random_dsig(rng, n, -2, 2));
      for (const auto& ct : lattice::cotransitions(X, 3)) {
        const R a = kernels::r_function(X, ct.eps, ct.m, p, prec, RFormula::production);
        const R b = kernels::r_function(X, ct.eps, ct.m, p, prec, RFormula::direct);
        const R c = kernels::r_function(X, ct.eps, ct.m, p, prec, RFormula::psi_rewrite);
        CHECK(a > 0);
        CHECK(rel_diff(a, b) < pow10<R>(-43));
        CHECK(rel_diff(a, c) < pow10<R>(-43));
      }
    }
  }
  // resonant t = q^2: direct refuses, psi route still matches production
  {
    const auto p = params_tau("0.52", 2);
    const Configuration X{{Signature({2, 0}), Signature({1})}};
    const auto cts = lattice::cotransitions(X, 2);
    REQUIRE(!cts.empty());
    CHECK_THROWS_AS(
        kernels::r_function(X, cts[0].eps, cts[0].m, p, prec, RFormula::direct),
        std::domain_error);
    for (const auto& ct : cts) {
      const R a = kernels::r_function(X, ct.eps, ct.m, p, prec, RFormula::production);
      const R c = kernels::r_function(X, ct.eps, ct.m, p, prec, RFormula::psi_rewrite);
      CHECK(rel_diff(a, c) < pow10<R>(-43));
    }
  }
  // inadmissible pairs rejected
  {
    const auto p = params("0.52", "0.337");
    const Configuration X{{Signature({1, 0}), Signature{}}};
    CHECK_THROWS_AS(kernels::r_function(X, {1}, {0}, p, prec), std::invalid_argument);
    CHECK_THROWS_AS(kernels::r_function(X, {0}, {5}, p, prec), std::invalid_argument);
  }
}

TEST_CASE("two-point straddle closed form") {
  // x2 < 0 < x1:
  //   eps=0: (q^{m+1};q)_inf/(q^m t;q)_inf (x1 t/x2;q)_m (x2 t/x1;q)_inf
  //                                        / [(x1 q/x2;q)_m (x2 q/x1;q)_inf]
  const auto p = params("0.47", "0.305");
  const Configuration X{{Signature({1}), Signature({0})}};
  const auto xs = lattice::config_values(X, p);
  const R q = p.qp.q, t = p.qp.t;
  for (coord_t m : {0, 1, 2, 7}) {
    for (int e : {0, 1}) {
      const R anchor_ratio = e == 0 ? xs[0] / xs[1] : xs[1] / xs[0];
      const R other_ratio = e == 0 ? xs[1] / xs[0] : xs[0] / xs[1];
      const R closed = qcalc::qpoch_infinite(ipow(q, m + 1), q, prec) /
                       qcalc::qpoch_infinite(ipow(q, m) * t, q, prec) *
                       qcalc::qpoch_finite(anchor_ratio * t, q, m) *
                       qcalc::qpoch_infinite(other_ratio * t, q, prec) /
                       (qcalc::qpoch_finite(anchor_ratio * q, q, m) *
                        qcalc::qpoch_infinite(other_ratio * q, q, prec));
      const R got = kernels::r_function(X, {static_cast<std::uint8_t>(e)}, {m}, p, prec);
      CHECK(rel_diff(got, closed) < pow10<R>(-44));
      CHECK(got > 0);
    }
  }
}

TEST_CASE("split-off recurrence") {
  // Splitting off the top point x1 (k >= 2) factors R as
  //   self(m1) * prod_{s>=2} (x1 t/x_s;q)_{m1}/(x1 q/x_s;q)_{m1}     [middle line]
  //   * prod_{r>=2} (x_{a_r} t/x1;q)_{m_r}/(x_{a_r} q/x1;q)_{m_r}
  //   * (x_{i0} t/x1;q)_inf/(x_{i0} q/x1;q)_inf
  // times R of the remaining configuration.
  const auto p = params("0.43", "0.29");
  const Configuration X{{Signature({2, 1, 0}), Signature({0})}};  // k = 3, straddle at r=3
  const int n = X.level(), k = X.k();
  const auto xs = lattice::config_values(X, p);
  const R q = p.qp.q, t = p.qp.t;
  // grouped evaluation of the entry kernel at a raw value tuple (the
  // split-off remainder is not an integer-coordinate configuration for
  // generic t, so it cannot go through r_function)
  auto r_flat = [&](const std::vector<R>& zs, int kk, const std::vector<std::uint8_t>& eps,
                    const std::vector<coord_t>& ms) {
    const int nn = static_cast<int>(zs.size());
    R acc(1);
    for (int r = 1; r <= nn - 1; ++r) {
      const int a = r + static_cast<int>(eps[static_cast<std::size_t>(r - 1)]);
      const coord_t mr = ms[static_cast<std::size_t>(r - 1)];
      acc *= qcalc::qpoch_infinite(ipow(q, mr + 1), q, prec) /
             qcalc::qpoch_infinite(ipow(q, mr) * t, q, prec);
      for (int s = 1; s <= nn; ++s) {
        if (s == a) continue;
        const R ratio = zs[static_cast<std::size_t>(a - 1)] / zs[static_cast<std::size_t>(s - 1)];
        acc *= qcalc::qpoch_finite(ratio * t, q, mr) / qcalc::qpoch_finite(ratio * q, q, mr);
      }
    }
    const int i0 = kk == 0 ? 1
                           : (kk == nn ? nn
                                       : kk + 1 - static_cast<int>(
                                                      eps[static_cast<std::size_t>(kk - 1)]));
    for (int j = 1; j <= nn; ++j) {
      if (j == i0) continue;
      const R ratio = zs[static_cast<std::size_t>(i0 - 1)] / zs[static_cast<std::size_t>(j - 1)];
      acc *= qcalc::qpoch_infinite(ratio * t, q, prec) /
             qcalc::qpoch_infinite(ratio * q, q, prec);
    }
    return acc;
  };
  for (const auto& ct : lattice::cotransitions(X, 2)) {
    const R whole = kernels::r_function(X, ct.eps, ct.m, p, prec);
    const std::vector<R> rest_vals(xs.begin() + 1, xs.end());
    std::vector<std::uint8_t> eps_rest(ct.eps.begin() + 1, ct.eps.end());
    std::vector<coord_t> m_rest(ct.m.begin() + 1, ct.m.end());
    const R rest = r_flat(rest_vals, k - 1, eps_rest, m_rest);
    const coord_t m1 = ct.m[0];
    R factor = qcalc::qpoch_infinite(ipow(q, m1 + 1), q, prec) /
               qcalc::qpoch_infinite(ipow(q, m1) * t, q, prec);
    for (int s = 2; s <= n; ++s) {
      const R ratio = xs[0] / xs[static_cast<std::size_t>(s - 1)];
      factor *= qcalc::qpoch_finite(ratio * t, q, m1) / qcalc::qpoch_finite(ratio * q, q, m1);
    }
    for (int r = 2; r <= n - 1; ++r) {
      const int a = r + static_cast<int>(ct.eps[static_cast<std::size_t>(r - 1)]);
      const R ratio = xs[static_cast<std::size_t>(a - 1)] / xs[0];
      factor *= qcalc::qpoch_finite(ratio * t, q, ct.m[static_cast<std::size_t>(r - 1)]) /
                qcalc::qpoch_finite(ratio * q, q, ct.m[static_cast<std::size_t>(r - 1)]);
    }
    const int i0 = k + 1 - static_cast<int>(ct.eps[static_cast<std::size_t>(k - 1)]);
    const R ratio0 = xs[static_cast<std::size_t>(i0 - 1)] / xs[0];
    factor *= qcalc::qpoch_infinite(ratio0 * t, q, prec) /
              qcalc::qpoch_infinite(ratio0 * q, q, prec);
    CHECK(rel_diff(whole, factor * rest) < pow10<R>(-43));
  }
}

TEST_CASE("special-form rows satisfy the coherency identity") {
  // row assembled purely from the t = q^tau product formula
  const auto p = params_tau("0.45", 2);
  const Configuration X{{Signature({2, 0}), Signature({1})}};
  const coord_t M = 160;
  const auto cts = lattice::cotransitions(X, M);
  using std::abs;
  macdonald::Evaluator<R> ev(p.qp);
  for (const auto& nu : shapes::partitions_up_to(2, 2, true)) {
    const R denom = qcalc::gen_pochhammer(ipow(p.qp.t, 2), p.qp, nu);
    R lhs(0);
    for (const auto& ct : cts)
      lhs += kernels::kernel_special(X, ct.target, 2, p, prec) *
             ev.eval(nu, lattice::config_values(ct.target, p)) / denom;
    const R rhs = macdonald::eval_config(nu, X, p) /
                  qcalc::gen_pochhammer(ipow(p.qp.t, 3), p.qp, nu);
    CHECK(abs(lhs - rhs) < pow10<R>(-10));
  }
}

TEST_CASE("kernel_general vanishes off the interlacing pairs") {
  const auto p = params("0.5", "0.3");
  const Configuration X{{Signature({1, 0}), Signature({0})}};
  const Configuration far{{Signature({9, 8}), Signature{}}};
  CHECK(kernels::kernel_general(X, far, p, prec) == 0);
  const Configuration wrong_level{{Signature({1}), Signature{}}};
  CHECK(kernels::kernel_general(X, wrong_level, p, prec) == 0);
}

TEST_CASE("kernel rows are stochastic") {
  CounterRng rng(44);
  using std::abs;
  for (const char* qs : {"0.3", "0.6"}) {
    for (const char* ts : {"0.25", "0.55"}) {
      const auto p = params(qs, ts);
      for (int trial = 0; trial < 4; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(4));
        const Configuration X(verify::random_dsig(rng, n, -2, 2));
        const auto row = kernels::kernel_row(X, p, prec);
        for (const auto& a : row.atoms) CHECK(a.weight > 0);
        CHECK(abs(row.total_weight() + row.tail_bound - 1) < pow10<R>(-8));
        if (X.k() == 0 || X.k() == n) CHECK(row.tail_bound == 0);
      }
    }
  }
}

TEST_CASE("under-truncated straddle row fails honestly") {
  using std::abs;
  const auto p = params("0.6", "0.4");
  const Configuration X{{Signature({0}), Signature({0})}};
  const auto row = kernels::kernel_row(X, p, prec, coord_t{1});
  CHECK(row.atoms.size() == 4);
  CHECK(row.tail_bound > 0);
  CHECK(abs(row.total_weight() + row.tail_bound - 1) > pow10<R>(-8));
  // the refined row recovers the missing mass
  const auto deep = kernels::kernel_row(X, p, prec, coord_t{200});
  CHECK(abs(deep.total_weight() + deep.tail_bound - 1) < pow10<R>(-8));
}

TEST_CASE("composition reduces to the single step at K = N-1") {
  const auto p = params("0.5", "0.3");
  const Configuration X{{Signature({1, 0}), Signature({0})}};
  const auto row = kernels::kernel_row(X, p, prec);
  const auto comp = kernels::kernel_compose(X, 2, p, prec);
  REQUIRE(row.atoms.size() == comp.atoms.size());
  for (std::size_t i = 0; i < row.atoms.size(); ++i) {
    CHECK(row.atoms[i].target == comp.atoms[i].target);
    CHECK(rel_diff(row.atoms[i].weight, comp.atoms[i].weight) == 0);
  }
  CHECK_THROWS_AS(kernels::kernel_compose(X, 3, p, prec), std::invalid_argument);
  CHECK_THROWS_AS(kernels::kernel_compose(X, 0, p, prec), std::invalid_argument);
}

TEST_CASE("composed rows satisfy the level-K coherency") {
  using std::abs;
  const auto p = params("0.45", "0.3");
  const Configuration X{{Signature({2, 0}), Signature({1})}};  // N = 3
  const int K = 1;
  const auto comp = kernels::kernel_compose(X, K, p, prec);
  CHECK(abs(comp.total_weight() + comp.tail_bound - 1) < pow10<R>(-8));
  macdonald::Evaluator<R> ev(p.qp);
  for (const auto& nu : shapes::partitions_up_to(3, K, true)) {
    const R denom = qcalc::gen_pochhammer(ipow(p.qp.t, K), p.qp, nu);
    R lhs(0);
    for (const auto& a : comp.atoms)
      lhs += a.weight * ev.eval(nu, lattice::config_values(a.target, p)) / denom;
    const R rhs = macdonald::eval_config(nu, X, p) /
                  qcalc::gen_pochhammer(ipow(p.qp.t, 3), p.qp, nu);
    CHECK(abs(lhs - rhs) < pow10<R>(-8));
  }
}

TEST_CASE("extended rows concentrate on the sparse relation") {
  const auto p = params("0.5", "0.45");
  const Configuration Xstar{{Signature({1}), Signature({0})}};  // n = 2, both sides
  CHECK_THROWS_AS(kernels::extended_kernel_row(Xstar, 2, 20, p, prec), std::invalid_argument);
  const auto e20 = kernels::extended_kernel_row(Xstar, 3, 20, p, prec);
  const auto e40 = kernels::extended_kernel_row(Xstar, 3, 40, p, prec);
  using std::abs;
  CHECK(abs(e20.row.total_weight() + e20.violating_mass + e20.row.tail_bound - 1) <
        pow10<R>(-8));
  CHECK(abs(e40.row.total_weight() + e40.violating_mass + e40.row.tail_bound - 1) <
        pow10<R>(-8));
  CHECK(e40.violating_mass < e20.violating_mass);
  CHECK(e40.violating_mass < pow10<R>(-6));
  for (const auto& a : e40.row.atoms) {
    CHECK(a.target.level() == 2);
    CHECK(lattice::sparse_interlace(Xstar, a.target));
  }
  // one-sided degenerate point: no violating branch at all
  const Configuration Xplus{{Signature({2, 0}), Signature{}}};
  const auto eo = kernels::extended_kernel_row(Xplus, 4, 12, p, prec);
  CHECK(eo.violating_mass == 0);
  CHECK(abs(eo.row.total_weight() - 1) < pow10<R>(-8));
  for (const auto& a : eo.row.atoms) CHECK(lattice::sparse_interlace(Xplus, a.target));
}

TEST_CASE("extended rows stabilize as the insertion deepens") {
  const auto p = params("0.4", "0.35");
  const Configuration Xstar{{Signature({1}), Signature({1})}};
  const auto e1 = kernels::extended_kernel_row(Xstar, 3, 25, p, prec);
  const auto e2 = kernels::extended_kernel_row(Xstar, 3, 50, p, prec);
  using std::abs;
  // common atoms drift by less than the coarser violating mass
  R drift(0);
  for (const auto& a : e1.row.atoms) {
    for (const auto& b : e2.row.atoms) {
      if (a.target == b.target) {
        if (abs(a.weight - b.weight) > drift) drift = abs(a.weight - b.weight);
      }
    }
  }
  CHECK(drift < pow10<R>(-6));
}

TEST_CASE("Dixon-Anderson kernel") {
  using std::abs;
  // N=2, tau=1: uniform density 1/(x1-x2)
  const std::vector<R> xx{parse_real<R>("1.5"), parse_real<R>("0.25")};
  const std::vector<R> yy{parse_real<R>("0.8")};
  CHECK(rel_diff(kernels::dixon_anderson(xx, yy, R(1)), 1 / (xx[0] - xx[1])) < pow10<R>(-46));
  CHECK_THROWS_AS(kernels::dixon_anderson(xx, {R(2)}, R(1)), std::invalid_argument);
  CHECK_THROWS_AS(kernels::dixon_anderson(xx, yy, R(0)), std::domain_error);
  // vanishing at the upper edge for tau > 1
  const R near = kernels::dixon_anderson(xx, {xx[0] - pow10<R>(-9)}, R(2));
  CHECK(near < pow10<R>(-7));
  // integrates to 1 for tau = 2 (independent quadrature)
  const double x1 = 1.5, x2 = 0.25;
  auto dens = [&](double y) {
    return kernels::dixon_anderson<double>({x1, x2}, {y}, 2.0);
  };
  const double total = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      dens, x2, x1, 12, 1e-12);
  CHECK(std::abs(total - 1.0) < 1e-9);
}

TEST_CASE("okounkov series identity at generic points") {
  const QPair<R> qp(parse_real<R>("0.3"), parse_real<R>("0.45"));
  const std::vector<R> zs{R(2), parse_real<R>("0.7")};
  using std::abs;
  for (const auto& nu : shapes::partitions_up_to(2, 1, true)) {
    const R lhs = kernels::okounkov_series(zs, nu, qp, Precision<R>::standard(), 60);
    const R rhs = macdonald::eval(nu, zs, qp) /
                  qcalc::gen_pochhammer(ipow(qp.t, 2), qp, nu);
    CHECK(abs(lhs / rhs - 1) < pow10<R>(-12));
  }
}
