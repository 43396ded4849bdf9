#pragma once

// Point configurations on the two-sided q-lattice. A configuration is the
// point set { zeta_+ q^{-a+_i} t^{i-1} } u { zeta_- q^{-a-_j} t^{j-1} }
// attached to a double signature. Points are stored and compared in exact
// integer lattice coordinates; real values are materialized only for
// polynomial and kernel evaluation.

#include "qgt/precision.hpp"
#include "qgt/qcalc.hpp"
#include "qgt/shapes.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qgt::lattice {

using shapes::coord_t;
using shapes::DoubleSignature;
using shapes::Signature;

template <class Real>
struct Params {
  qcalc::QPair<Real> qp;
  Real zeta_plus;
  Real zeta_minus;

  Params(qcalc::QPair<Real> qp_, Real zp, Real zm)
      : qp(std::move(qp_)), zeta_plus(std::move(zp)), zeta_minus(std::move(zm)) {
    if (!(zeta_plus > 0)) throw std::domain_error("Params: zeta_plus must be > 0");
    if (!(zeta_minus < 0)) throw std::domain_error("Params: zeta_minus must be < 0");
  }
};

enum class Side : std::uint8_t { plus, minus };

// One lattice point: value = zeta_side * q^{-coord} * t^{row-1}.
struct LatticePoint {
  Side side;
  int row;  // 1-based within its side
  coord_t coord;

  bool operator==(const LatticePoint& o) const {
    return side == o.side && row == o.row && coord == o.coord;
  }
};

template <class Real>
Real point_value(const LatticePoint& p, const Params<Real>& par) {
  const Real& zeta = (p.side == Side::plus) ? par.zeta_plus : par.zeta_minus;
  return zeta * ipow(par.qp.q, -p.coord) * ipow(par.qp.t, p.row - 1);
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(DoubleSignature d) : dsig_(std::move(d)) {}

  int level() const { return dsig_.level(); }
  int k() const { return dsig_.k(); }  // number of positive points
  int l() const { return dsig_.l(); }
  bool empty() const { return level() == 0; }
  const DoubleSignature& dsig() const { return dsig_; }

  // Points in descending real value: plus rows 1..k, then minus rows l..1.
  // The order is forced by weak decrease of the signatures, so no real
  // comparison is involved.
  LatticePoint point(int i) const {  // 1-based sorted position
    const int kk = k();
    if (i < 1 || i > level()) throw std::out_of_range("Configuration::point");
    if (i <= kk) return {Side::plus, i, dsig_.plus.coords[static_cast<std::size_t>(i - 1)]};
    const int row = level() - i + 1;  // minus row
    return {Side::minus, row, dsig_.minus.coords[static_cast<std::size_t>(row - 1)]};
  }

  std::vector<LatticePoint> points() const {
    std::vector<LatticePoint> v;
    v.reserve(static_cast<std::size_t>(level()));
    for (int i = 1; i <= level(); ++i) v.push_back(point(i));
    return v;
  }

  bool operator==(const Configuration& o) const { return dsig_ == o.dsig_; }
  bool operator!=(const Configuration& o) const { return !(dsig_ == o.dsig_); }

 private:
  DoubleSignature dsig_;
};

inline Configuration config_from_dsig(const DoubleSignature& a) { return Configuration(a); }
inline const DoubleSignature& dsig_from_config(const Configuration& x) { return x.dsig(); }

template <class Real>
std::vector<Real> config_values(const Configuration& x, const Params<Real>& par) {
  std::vector<Real> v;
  v.reserve(static_cast<std::size_t>(x.level()));
  for (int i = 1; i <= x.level(); ++i) v.push_back(point_value(x.point(i), par));
  return v;
}

// Exact total order on same-level configurations, descending-lexicographic in
// the sorted point lists. At each position the two points are either on
// different sides (plus wins) or share (side,row) and compare by coordinate.
inline int compare_configs_desc(const Configuration& a, const Configuration& b) {
  if (a.level() != b.level())
    return a.level() < b.level() ? 1 : -1;
  for (int i = 1; i <= a.level(); ++i) {
    const LatticePoint pa = a.point(i), pb = b.point(i);
    if (pa.side != pb.side) return pa.side == Side::plus ? -1 : 1;
    if (pa.coord != pb.coord) {
      const bool a_bigger = (pa.side == Side::plus) ? (pa.coord > pb.coord) : (pa.coord < pb.coord);
      return a_bigger ? -1 : 1;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Gap structure and interlacement
// ---------------------------------------------------------------------------

// Gaps l_r, r = 1..N-1, defined by x_{r+1} = x_r t q^{l_r} on the positive
// block and x_r = x_{r+1} t q^{l_r} on the negative block; the straddling gap
// r = k (present iff 0 < k < N) has no constraint and is reported as -1.
inline std::vector<coord_t> gaps(const Configuration& x) {
  const int n = x.level(), k = x.k();
  std::vector<coord_t> g;
  if (n < 2) return g;
  g.assign(static_cast<std::size_t>(n - 1), -1);
  const auto& ap = x.dsig().plus.coords;
  const auto& am = x.dsig().minus.coords;
  for (int r = 1; r <= k - 1; ++r)
    g[static_cast<std::size_t>(r - 1)] = ap[static_cast<std::size_t>(r - 1)] - ap[static_cast<std::size_t>(r)];
  for (int r = k + 1; r <= n - 1; ++r) {
    const int u = n - r;  // minus rows u, u+1 sit at sorted positions r+1, r
    g[static_cast<std::size_t>(r - 1)] = am[static_cast<std::size_t>(u - 1)] - am[static_cast<std::size_t>(u)];
  }
  return g;
}

// Adjacent-level interlacement evaluated on exact integer coordinates.
// Regular rows obey a_r >= b_r >= a_{r+1} on each side; when X straddles
// zero, the descendant of the straddling pair sits on exactly one side and
// is unbounded below there.
inline bool interlace_config(const Configuration& X, const Configuration& Y) {
  const int n = X.level(), k = X.k(), l = X.l();
  if (Y.level() != n - 1)
    throw std::invalid_argument("interlace_config: levels must be N and N-1");
  if (n == 1) return true;  // Y is empty
  const bool straddle = (k > 0 && k < n);
  bool plus_extra, minus_extra;  // which side hosts the straddle descendant
  if (straddle) {
    if (Y.k() == k && Y.l() == l - 1) {
      plus_extra = true;
      minus_extra = false;
    } else if (Y.k() == k - 1 && Y.l() == l) {
      plus_extra = false;
      minus_extra = true;
    } else {
      return false;
    }
  } else {
    plus_extra = minus_extra = false;
    if (k == n && !(Y.k() == n - 1 && Y.l() == 0)) return false;
    if (k == 0 && !(Y.k() == 0 && Y.l() == n - 1)) return false;
  }
  auto side_ok = [](const std::vector<coord_t>& a, const std::vector<coord_t>& b, bool extra) {
    // b has a.size()-1 regular rows, plus one unbounded-below row if extra.
    const int regular = static_cast<int>(a.size()) - 1;
    for (int i = 0; i < regular; ++i) {
      if (!(a[static_cast<std::size_t>(i)] >= b[static_cast<std::size_t>(i)] &&
            b[static_cast<std::size_t>(i)] >= a[static_cast<std::size_t>(i + 1)]))
        return false;
    }
    if (extra && !(b.back() <= a.back())) return false;
    return true;
  };
  if (k >= 1 && !side_ok(X.dsig().plus.coords, Y.dsig().plus.coords, plus_extra)) return false;
  if (l >= 1 && !side_ok(X.dsig().minus.coords, Y.dsig().minus.coords, minus_extra)) return false;
  return true;
}

// Equal-level sparse interlacement (the support relation for degenerate
// extended rows): both sides interlace coordinate-wise with the last
// coordinate of each side unbounded below.
inline bool sparse_interlace(const Configuration& X, const Configuration& Y) {
  if (X.level() != Y.level())
    throw std::invalid_argument("sparse_interlace: levels must be equal");
  if (Y.k() != X.k()) return false;
  auto side_ok = [](const std::vector<coord_t>& a, const std::vector<coord_t>& b) {
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i) {
      if (b[static_cast<std::size_t>(i)] > a[static_cast<std::size_t>(i)]) return false;
      if (i + 1 < n && b[static_cast<std::size_t>(i)] < a[static_cast<std::size_t>(i + 1)]) return false;
    }
    return true;
  };
  return side_ok(X.dsig().plus.coords, Y.dsig().plus.coords) &&
         side_ok(X.dsig().minus.coords, Y.dsig().minus.coords);
}

// ---------------------------------------------------------------------------
// q-intervals on the two-sided lattice (case t = q^tau, tau integer)
// ---------------------------------------------------------------------------

// A bare lattice node: value = zeta_side * q^n, n in Z.
struct LNode {
  Side side;
  coord_t n;
  bool operator==(const LNode& o) const { return side == o.side && n == o.n; }
};

template <class Real>
Real node_value(const LNode& x, const Params<Real>& par) {
  const Real& zeta = (x.side == Side::plus) ? par.zeta_plus : par.zeta_minus;
  return zeta * ipow(par.qp.q, x.n);
}

// LatticePoint -> node exponent, valid when t = q^tau.
inline LNode node_of(const LatticePoint& p, int tau) {
  return {p.side, static_cast<coord_t>(tau) * (p.row - 1) - p.coord};
}

inline bool node_less(const LNode& a, const LNode& b) {
  if (a.side != b.side) return a.side == Side::minus;
  return (a.side == Side::plus) ? a.n > b.n : a.n < b.n;  // larger exponent = closer to 0
}

struct QIntervalSet {
  bool infinite = false;
  // Finite case: the complete node list, descending in value.
  // Infinite case: nodes within m_max steps of each endpoint (see enumerate).
  std::vector<LNode> nodes;
};

// The q-interval between nodes lo < hi, both on the lattice:
//   0 < lo < hi : plus nodes y with lo q^-tau <= y <= hi
//   lo < hi < 0 : minus nodes y with lo <= y <= hi q^-tau
//   lo < 0 < hi : every node in [lo, hi] (infinitely many)
// For the infinite case, enumeration lists nodes within m_max q-steps of each
// endpoint, descending in value.
inline QIntervalSet q_interval(const LNode& lo, const LNode& hi, int tau,
                               std::int64_t m_max = 0) {
  if (tau < 1) throw std::domain_error("q_interval: tau must be >= 1");
  if (!node_less(lo, hi)) throw std::invalid_argument("q_interval: need lo < hi");
  QIntervalSet out;
  if (lo.side == Side::plus && hi.side == Side::plus) {
    // y = zeta_+ q^n with hi.n <= n <= lo.n - tau
    if (lo.n - hi.n < tau)
      throw std::invalid_argument("q_interval: endpoints not tau-separated");
    for (coord_t n = hi.n; n <= lo.n - tau; ++n) out.nodes.push_back({Side::plus, n});
  } else if (lo.side == Side::minus && hi.side == Side::minus) {
    // y = zeta_- q^n with hi.n - tau >= n >= lo.n
    if (hi.n - lo.n < tau)
      throw std::invalid_argument("q_interval: endpoints not tau-separated");
    for (coord_t n = hi.n - tau; n >= lo.n; --n) out.nodes.push_back({Side::minus, n});
  } else {
    out.infinite = true;
    for (coord_t d = 0; d <= m_max; ++d) out.nodes.push_back({Side::plus, hi.n + d});
    for (coord_t d = m_max; d >= 0; --d) out.nodes.push_back({Side::minus, lo.n + d});
  }
  return out;
}

// Locate a real value on the lattice (used when interval endpoints arrive as
// plain reals). Returns nothing if v is not a node to within a few ulps.
template <class Real>
std::optional<LNode> locate_node(const Real& v, const Params<Real>& par) {
  using std::abs;
  using std::log;
  using std::floor;
  if (v == 0) return std::nullopt;
  const Side side = v > 0 ? Side::plus : Side::minus;
  const Real& zeta = side == Side::plus ? par.zeta_plus : par.zeta_minus;
  const Real ratio = v / zeta;
  const Real nf = log(ratio) / log(par.qp.q);
  const auto n = static_cast<coord_t>(floor(nf + Real(1) / 2));
  const Real exact = zeta * ipow(par.qp.q, n);
  const Real tol = abs(v) * pow10<Real>(-(digits10_of<Real>() - 6));
  if (abs(exact - v) <= tol) return LNode{side, n};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Cotransition enumeration
// ---------------------------------------------------------------------------

struct Cotransition {
  Configuration target;
  std::vector<std::uint8_t> eps;  // the k-adapted binary word
  std::vector<coord_t> m;         // m_r >= 0, m_r <= l_r except at the straddle
};

// Default straddle depth: smallest M with rho^M < eps/(1-rho), rho = max(q,t).
template <class Real>
coord_t default_straddle_m_max(const qcalc::QPair<Real>& qp, const Precision<Real>& prec) {
  using std::ceil;
  using std::log;
  const Real rho = qp.q > qp.t ? qp.q : qp.t;
  const Real bound = prec.eps / (1 - rho);
  Real m = log(bound) / log(rho);
  if (m < 1) m = 1;
  return static_cast<coord_t>(ceil(m)) + 1;
}

namespace detail {

// Build the target configuration for an admissible pair (eps, m).
// Regular rows: y on plus row r (r < k) has coord a+_r - m_r; y on minus row
// u (u < l) has coord a-_u - m_{n-u}. The straddle descendant (0 < k < n)
// lands on plus row k (eps(k)=0) or minus row l (eps(k)=1).
inline Configuration cotransition_target(const Configuration& X,
                                         const std::vector<std::uint8_t>& eps,
                                         const std::vector<coord_t>& m) {
  const int n = X.level(), k = X.k(), l = X.l();
  const auto& ap = X.dsig().plus.coords;
  const auto& am = X.dsig().minus.coords;
  std::vector<coord_t> bp, bm;
  const bool straddle = (k > 0 && k < n);
  for (int r = 1; r <= k - 1; ++r)
    bp.push_back(ap[static_cast<std::size_t>(r - 1)] - m[static_cast<std::size_t>(r - 1)]);
  bm.assign(static_cast<std::size_t>(l > 0 ? l - 1 : 0), 0);
  for (int u = 1; u <= l - 1; ++u) {
    const int r = n - u;
    bm[static_cast<std::size_t>(u - 1)] =
        am[static_cast<std::size_t>(u - 1)] - m[static_cast<std::size_t>(r - 1)];
  }
  if (straddle) {
    const coord_t mk = m[static_cast<std::size_t>(k - 1)];
    if (eps[static_cast<std::size_t>(k - 1)] == 0) {
      bp.push_back(ap[static_cast<std::size_t>(k - 1)] - mk);
    } else {
      bm.push_back(am[static_cast<std::size_t>(l - 1)] - mk);
    }
  }
  return Configuration(DoubleSignature(Signature(std::move(bp)), Signature(std::move(bm))));
}

}  // namespace detail

// All Y with Y interlacing X, one per admissible pair (eps, m); complete
// except that the straddle index m_k is capped at m_max. Output sorted
// descending by target.
inline std::vector<Cotransition> cotransitions(const Configuration& X, coord_t m_max) {
  const int n = X.level(), k = X.k();
  if (n < 2) throw std::invalid_argument("cotransitions: level must be >= 2");
  const auto g = gaps(X);
  const bool straddle = (k > 0 && k < n);
  std::vector<Cotransition> out;
  std::vector<coord_t> m(static_cast<std::size_t>(n - 1), 0);
  std::vector<std::uint8_t> eps(static_cast<std::size_t>(n - 1), 0);
  for (int r = k + 1; r <= n - 1; ++r) eps[static_cast<std::size_t>(r - 1)] = 1;

  auto emit = [&]() { out.push_back({detail::cotransition_target(X, eps, m), eps, m}); };

  auto loop_finite = [&](auto&& self, int r) -> void {
    if (r > n - 1) {
      emit();
      return;
    }
    if (straddle && r == k) {
      for (std::uint8_t e : {std::uint8_t{0}, std::uint8_t{1}}) {
        eps[static_cast<std::size_t>(k - 1)] = e;
        for (coord_t v = 0; v <= m_max; ++v) {
          m[static_cast<std::size_t>(k - 1)] = v;
          self(self, r + 1);
        }
      }
      eps[static_cast<std::size_t>(k - 1)] = 0;
      return;
    }
    for (coord_t v = 0; v <= g[static_cast<std::size_t>(r - 1)]; ++v) {
      m[static_cast<std::size_t>(r - 1)] = v;
      self(self, r + 1);
    }
  };
  loop_finite(loop_finite, 1);

  std::sort(out.begin(), out.end(), [](const Cotransition& a, const Cotransition& b) {
    return compare_configs_desc(a.target, b.target) < 0;
  });
  return out;
}

// Recover the admissible pair (eps, m) for a given interlacing target.
inline std::optional<Cotransition> admissible_pair_for(const Configuration& X,
                                                       const Configuration& Y) {
  const int n = X.level(), k = X.k(), l = X.l();
  if (Y.level() != n - 1) return std::nullopt;
  if (!interlace_config(X, Y)) return std::nullopt;
  std::vector<coord_t> m(static_cast<std::size_t>(n - 1), 0);
  std::vector<std::uint8_t> eps(static_cast<std::size_t>(n - 1), 0);
  for (int r = k + 1; r <= n - 1; ++r) eps[static_cast<std::size_t>(r - 1)] = 1;
  const bool straddle = (k > 0 && k < n);
  const auto& ap = X.dsig().plus.coords;
  const auto& am = X.dsig().minus.coords;
  const auto& bp = Y.dsig().plus.coords;
  const auto& bm = Y.dsig().minus.coords;
  for (int r = 1; r <= k - 1; ++r)
    m[static_cast<std::size_t>(r - 1)] =
        ap[static_cast<std::size_t>(r - 1)] - bp[static_cast<std::size_t>(r - 1)];
  for (int u = 1; u <= l - 1; ++u)
    m[static_cast<std::size_t>(n - u - 1)] =
        am[static_cast<std::size_t>(u - 1)] - bm[static_cast<std::size_t>(u - 1)];
  if (straddle) {
    if (Y.k() == k) {  // descendant on the plus side
      eps[static_cast<std::size_t>(k - 1)] = 0;
      m[static_cast<std::size_t>(k - 1)] =
          ap[static_cast<std::size_t>(k - 1)] - bp[static_cast<std::size_t>(k - 1)];
    } else {
      eps[static_cast<std::size_t>(k - 1)] = 1;
      m[static_cast<std::size_t>(k - 1)] =
          am[static_cast<std::size_t>(l - 1)] - bm[static_cast<std::size_t>(l - 1)];
    }
  }
  return Cotransition{Y, std::move(eps), std::move(m)};
}

// ---------------------------------------------------------------------------
// Infinite configurations
// ---------------------------------------------------------------------------

struct TailRule {
  enum class Kind { none, constant, arithmetic };
  Kind kind = Kind::none;
  coord_t step = 0;  // arithmetic tails must step down (step < 0)
};

// Eventually-explicit signature: finite head plus a declared continuation.
struct InfiniteSignature {
  std::vector<coord_t> head;
  TailRule tail;

  InfiniteSignature() = default;
  InfiniteSignature(std::vector<coord_t> h, TailRule t) : head(std::move(h)), tail(t) {
    for (std::size_t i = 0; i + 1 < head.size(); ++i)
      if (head[i] < head[i + 1])
        throw std::invalid_argument("InfiniteSignature: head must be weakly decreasing");
    if (tail.kind != TailRule::Kind::none && head.empty())
      throw std::invalid_argument("InfiniteSignature: infinite side needs a nonempty head");
    if (tail.kind == TailRule::Kind::arithmetic && tail.step >= 0)
      throw std::invalid_argument("InfiniteSignature: arithmetic tail must have negative step");
  }

  bool infinite() const { return tail.kind != TailRule::Kind::none; }
  // 1-based coordinate access; valid for i <= length() when finite.
  coord_t coord(std::int64_t i) const {
    const auto h = static_cast<std::int64_t>(head.size());
    if (i <= h) return head[static_cast<std::size_t>(i - 1)];
    if (tail.kind == TailRule::Kind::constant) return head.back();
    if (tail.kind == TailRule::Kind::arithmetic) return head.back() + tail.step * (i - h);
    throw std::out_of_range("InfiniteSignature: finite side exhausted");
  }
  std::int64_t finite_length() const {
    return infinite() ? -1 : static_cast<std::int64_t>(head.size());
  }
};

struct InfiniteDoubleSignature {
  InfiniteSignature plus;
  InfiniteSignature minus;

  InfiniteDoubleSignature() = default;
  InfiniteDoubleSignature(InfiniteSignature p, InfiniteSignature m)
      : plus(std::move(p)), minus(std::move(m)) {
    if (!plus.infinite() && !minus.infinite())
      throw std::invalid_argument("InfiniteDoubleSignature: at least one side must be infinite");
  }
};

// An infinite configuration with its evaluation parameters and truncation
// threshold: points with |x| < delta are dropped when materializing.
template <class Real>
struct InfiniteConfiguration {
  InfiniteDoubleSignature source;
  Params<Real> params;
  Real delta;

  InfiniteConfiguration(InfiniteDoubleSignature s, Params<Real> p, Real d)
      : source(std::move(s)), params(std::move(p)), delta(std::move(d)) {
    if (!(delta > 0)) throw std::invalid_argument("InfiniteConfiguration: delta must be > 0");
  }

  // Rows of one side with |value| >= cutoff. Magnitudes decay at least
  // geometrically (ratio t), so a forward scan terminates.
  std::int64_t rows_above(Side side, const Real& cutoff) const {
    const InfiniteSignature& s = (side == Side::plus) ? source.plus : source.minus;
    const Real zeta = (side == Side::plus) ? params.zeta_plus : -params.zeta_minus;
    std::int64_t i = 0;
    for (;;) {
      if (!s.infinite() && i >= s.finite_length()) return i;
      const Real v = zeta * ipow(params.qp.q, -s.coord(i + 1)) * ipow(params.qp.t, i);
      if (v < cutoff) return i;
      ++i;
      if (i > 100000) throw std::runtime_error("InfiniteConfiguration: tail does not decay");
    }
  }

  Configuration truncate(const Real& cutoff) const {
    const std::int64_t kp = rows_above(Side::plus, cutoff);
    const std::int64_t km = rows_above(Side::minus, cutoff);
    std::vector<coord_t> p, m;
    for (std::int64_t i = 1; i <= kp; ++i) p.push_back(source.plus.coord(i));
    for (std::int64_t i = 1; i <= km; ++i) m.push_back(source.minus.coord(i));
    return Configuration(DoubleSignature(Signature(std::move(p)), Signature(std::move(m))));
  }

  Configuration truncate_default() const { return truncate(delta); }

  // The N largest-magnitude points, as a valid level-N configuration.
  Configuration truncate_level(int N) const {
    std::vector<coord_t> p, m;
    std::int64_t ip = 0, im = 0;
    auto mag = [&](Side side, std::int64_t i) -> Real {
      const InfiniteSignature& s = (side == Side::plus) ? source.plus : source.minus;
      const Real zeta = (side == Side::plus) ? params.zeta_plus : -params.zeta_minus;
      return zeta * ipow(params.qp.q, -s.coord(i + 1)) * ipow(params.qp.t, i);
    };
    auto has = [&](Side side, std::int64_t i) {
      const InfiniteSignature& s = (side == Side::plus) ? source.plus : source.minus;
      return s.infinite() || i < s.finite_length();
    };
    for (int n = 0; n < N; ++n) {
      const bool cp = has(Side::plus, ip), cm = has(Side::minus, im);
      if (!cp && !cm) throw std::invalid_argument("truncate_level: fewer than N points");
      bool take_plus = cp && (!cm || mag(Side::plus, ip) >= mag(Side::minus, im));
      if (take_plus) {
        p.push_back(source.plus.coord(++ip));
      } else {
        m.push_back(source.minus.coord(++im));
      }
    }
    return Configuration(DoubleSignature(Signature(std::move(p)), Signature(std::move(m))));
  }
};

// Default truncation threshold: total dropped mass sum|x| below eps scaled by
// a crude degree factor, so every P_nu with |nu| <= deg_cap moves by < eps.
template <class Real>
Real default_delta(const Params<Real>& par, const Precision<Real>& prec, int deg_cap = 6) {
  using std::abs;
  Real scale = (par.zeta_plus > abs(par.zeta_minus) ? par.zeta_plus : abs(par.zeta_minus));
  if (scale < 1) scale = 1;
  const Real one_minus_t = 1 - par.qp.t;
  return prec.eps * one_minus_t / (Real(4 * deg_cap) * ipow(scale + 1, deg_cap));
}

}  // namespace qgt::lattice
