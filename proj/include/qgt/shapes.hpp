#pragma once

// Integer shape combinatorics: partitions, signatures, double signatures,
// interlacement predicates, and the single-variable Macdonald branching
// coefficient psi.

#include "qgt/qcalc.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgt::shapes {

using coord_t = std::int64_t;

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

class Partition {
 public:
  Partition() = default;

  explicit Partition(std::vector<coord_t> parts) : parts_(std::move(parts)) {
    while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] < 1) throw std::invalid_argument("Partition: parts must be positive");
      if (i + 1 < parts_.size() && parts_[i] < parts_[i + 1])
        throw std::invalid_argument("Partition: parts must be weakly decreasing");
    }
  }

  static Partition empty() { return Partition(); }

  int length() const { return static_cast<int>(parts_.size()); }
  coord_t weight() const {
    coord_t w = 0;
    for (coord_t p : parts_) w += p;
    return w;
  }
  // Row i (1-based); zero beyond the last row.
  coord_t part(int i) const {
    return (i >= 1 && i <= length()) ? parts_[i - 1] : 0;
  }
  const std::vector<coord_t>& parts() const { return parts_; }

  Partition conjugate() const {
    std::vector<coord_t> c;
    if (!parts_.empty()) {
      c.assign(static_cast<std::size_t>(parts_[0]), 0);
      for (coord_t p : parts_)
        for (coord_t j = 0; j < p; ++j) c[static_cast<std::size_t>(j)]++;
    }
    return Partition(std::move(c));
  }

  bool operator==(const Partition& o) const { return parts_ == o.parts_; }
  bool operator!=(const Partition& o) const { return parts_ != o.parts_; }
  bool operator<(const Partition& o) const { return parts_ < o.parts_; }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(parts_[i]);
    }
    return s + ")";
  }

 private:
  std::vector<coord_t> parts_;
};

// mu interlaces la as partitions: la_i >= mu_i >= la_{i+1} (missing rows = 0).
inline bool interlace_partitions(const Partition& la, const Partition& mu) {
  if (mu.length() > la.length()) return false;
  for (int i = 1; i <= la.length(); ++i)
    if (!(la.part(i) >= mu.part(i) && mu.part(i) >= la.part(i + 1))) return false;
  return true;
}

// All mu with mu interlacing la.
inline std::vector<Partition> sub_interlacing(const Partition& la) {
  std::vector<Partition> out;
  std::vector<coord_t> mu(static_cast<std::size_t>(la.length()), 0);
  // Depth-first over rows; row i ranges over [la_{i+1}, la_i].
  auto rec = [&](auto&& self, int i) -> void {
    if (i > la.length()) {
      out.push_back(Partition(mu));
      return;
    }
    for (coord_t v = la.part(i + 1); v <= la.part(i); ++v) {
      mu[static_cast<std::size_t>(i - 1)] = v;
      self(self, i + 1);
    }
    mu[static_cast<std::size_t>(i - 1)] = 0;
  };
  rec(rec, 1);
  return out;
}

// All partitions with weight in [1, max_weight] and length <= max_length,
// plus the empty one if include_empty.
inline std::vector<Partition> partitions_up_to(coord_t max_weight, int max_length,
                                               bool include_empty = false) {
  std::vector<Partition> out;
  if (include_empty) out.push_back(Partition::empty());
  std::vector<coord_t> cur;
  auto rec = [&](auto&& self, coord_t remaining, coord_t cap) -> void {
    if (!cur.empty()) out.push_back(Partition(cur));
    if (remaining == 0 || static_cast<int>(cur.size()) >= max_length) return;
    for (coord_t v = std::min(cap, remaining); v >= 1; --v) {
      cur.push_back(v);
      self(self, remaining - v, v);
      cur.pop_back();
    }
  };
  rec(rec, max_weight, max_weight);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Signatures
// ---------------------------------------------------------------------------

struct Signature {
  std::vector<coord_t> coords;

  Signature() = default;
  explicit Signature(std::vector<coord_t> c) : coords(std::move(c)) {
    for (std::size_t i = 0; i + 1 < coords.size(); ++i)
      if (coords[i] < coords[i + 1])
        throw std::invalid_argument("Signature: coordinates must be weakly decreasing");
  }

  int length() const { return static_cast<int>(coords.size()); }
  coord_t weight() const {
    coord_t w = 0;
    for (coord_t c : coords) w += c;
    return w;
  }

  // The involution (a_1,...,a_N) -> (-a_N,...,-a_1).
  Signature star() const {
    std::vector<coord_t> c(coords.rbegin(), coords.rend());
    for (coord_t& v : c) v = -v;
    return Signature(std::move(c));
  }

  // Shift every coordinate by the same amount.
  Signature shifted(coord_t c) const {
    std::vector<coord_t> v = coords;
    for (coord_t& x : v) x += c;
    return Signature(std::move(v));
  }

  // Nonnegative signatures convert to partitions (trailing zeros dropped).
  Partition to_partition() const {
    if (!coords.empty() && coords.back() < 0)
      throw std::invalid_argument("Signature::to_partition: negative coordinate");
    return Partition(coords);
  }

  bool operator==(const Signature& o) const { return coords == o.coords; }
  bool operator<(const Signature& o) const { return coords < o.coords; }
};

inline Signature sig_of(const Partition& p, int length) {
  if (length < p.length()) throw std::invalid_argument("sig_of: length too small");
  std::vector<coord_t> c;
  for (int i = 1; i <= length; ++i) c.push_back(p.part(i));
  return Signature(std::move(c));
}

// a_i >= b_i >= a_{i+1}; lengths must be N and N-1.
inline bool interlace_sig(const Signature& a, const Signature& b) {
  if (b.length() != a.length() - 1)
    throw std::invalid_argument("interlace_sig: lengths must be N and N-1");
  for (int i = 0; i < b.length(); ++i)
    if (!(a.coords[i] >= b.coords[i] && b.coords[i] >= a.coords[i + 1])) return false;
  return true;
}

// Interlacement with the shorter-side padding convention: len(b) equals
// len(a) or len(a)-1; when equal, the last coordinate of b is unbounded below.
inline bool interlace_sig_padded(const Signature& a, const Signature& b) {
  const int n = a.length(), m = b.length();
  if (m != n && m != n - 1) return false;
  for (int i = 0; i < m; ++i) {
    if (!(a.coords[i] >= b.coords[i])) return false;
    if (i + 1 < n && !(b.coords[i] >= a.coords[i + 1])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Double signatures
// ---------------------------------------------------------------------------

struct DoubleSignature {
  Signature plus;
  Signature minus;

  DoubleSignature() = default;
  DoubleSignature(Signature p, Signature m) : plus(std::move(p)), minus(std::move(m)) {}

  int level() const { return plus.length() + minus.length(); }
  int k() const { return plus.length(); }
  int l() const { return minus.length(); }

  bool operator==(const DoubleSignature& o) const {
    return plus == o.plus && minus == o.minus;
  }
  bool operator<(const DoubleSignature& o) const {
    if (plus.coords != o.plus.coords) return plus.coords < o.plus.coords;
    return minus.coords < o.minus.coords;
  }
};

// Both cases of the adjacent-level interlacement for double signatures:
// exactly one side loses a coordinate, and each side interlaces with the
// padding convention.
inline bool interlace_double(const DoubleSignature& a, const DoubleSignature& b) {
  if (b.level() != a.level() - 1)
    throw std::invalid_argument("interlace_double: levels must be N and N-1");
  const bool case_i = (b.k() == a.k() - 1 && b.l() == a.l());
  const bool case_ii = (b.k() == a.k() && b.l() == a.l() - 1);
  if (!case_i && !case_ii) return false;
  return interlace_sig_padded(a.plus, b.plus) && interlace_sig_padded(a.minus, b.minus);
}

// ---------------------------------------------------------------------------
// Branching coefficient psi_{la/mu}(q,t)
// ---------------------------------------------------------------------------

// psi_{la/mu} = prod over boxes s of mu lying in a row that meets la-mu but
// in no column that meets la-mu, of b_mu(s)/b_la(s), where
// b_nu(s) = (1 - q^{arm} t^{leg+1}) / (1 - q^{arm+1} t^{leg}).
// Strictly positive for q,t in (0,1); equals 1 identically at t = q.
template <class Real>
Real branching_psi(const Partition& la, const Partition& mu, const qcalc::QPair<Real>& qp) {
  if (!interlace_partitions(la, mu))
    throw std::invalid_argument("branching_psi: mu must interlace la");
  const Partition lac = la.conjugate();
  const Partition muc = mu.conjugate();
  auto bfac = [&](const Partition& nu, const Partition& nuc, int i, coord_t j) -> Real {
    const coord_t arm = nu.part(i) - j;
    const coord_t leg = nuc.part(static_cast<int>(j)) - i;
    return (Real(1) - ipow(qp.q, arm) * ipow(qp.t, leg + 1)) /
           (Real(1) - ipow(qp.q, arm + 1) * ipow(qp.t, leg));
  };
  Real psi(1);
  for (int i = 1; i <= mu.length(); ++i) {
    if (la.part(i) == mu.part(i)) continue;  // row i does not meet la-mu
    for (coord_t j = 1; j <= mu.part(i); ++j) {
      if (lac.part(static_cast<int>(j)) != muc.part(static_cast<int>(j)))
        continue;  // column j meets la-mu
      psi *= bfac(mu, muc, i, j) / bfac(la, lac, i, j);
    }
  }
  return psi;
}

// psi for signatures: shift both labels into partition range. The branching
// rule is shift-invariant, which the tests assert.
template <class Real>
Real branching_psi_sig(const Signature& a, const Signature& b, const qcalc::QPair<Real>& qp) {
  coord_t lo = 0;
  if (!a.coords.empty()) lo = std::min(lo, a.coords.back());
  if (!b.coords.empty()) lo = std::min(lo, b.coords.back());
  const coord_t shift = -lo;
  return branching_psi(a.shifted(shift).to_partition(), b.shifted(shift).to_partition(), qp);
}

}  // namespace qgt::shapes
