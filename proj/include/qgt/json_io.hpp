#pragma once

// JSON / CSV serialization. Field order is fixed and numerics go out as
// decimal strings, so identical inputs produce byte-identical files.

#include "qgt/chain.hpp"
#include "qgt/kernels.hpp"
#include "qgt/lattice.hpp"
#include "qgt/shapes.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace qgt::io {

using json = nlohmann::ordered_json;

inline json to_json(const shapes::Partition& p) { return json(p.parts()); }
inline json to_json(const shapes::Signature& s) { return json(s.coords); }

inline json to_json(const shapes::DoubleSignature& d) {
  return json{{"plus", d.plus.coords}, {"minus", d.minus.coords}};
}

inline shapes::DoubleSignature dsig_from_json(const json& j) {
  return {shapes::Signature(j.at("plus").get<std::vector<shapes::coord_t>>()),
          shapes::Signature(j.at("minus").get<std::vector<shapes::coord_t>>())};
}

template <class Real>
json to_json(const lattice::Params<Real>& p) {
  return json{{"q", to_decimal_string(p.qp.q)},
              {"t", to_decimal_string(p.qp.t)},
              {"zeta_plus", to_decimal_string(p.zeta_plus)},
              {"zeta_minus", to_decimal_string(p.zeta_minus)}};
}

// Configuration with parameters and derived real values (the values are
// read-only convenience output; the integer coordinates are authoritative).
template <class Real>
json to_json(const lattice::Configuration& x, const lattice::Params<Real>& p) {
  json values = json::array();
  for (const Real& v : lattice::config_values(x, p)) values.push_back(to_decimal_string(v));
  return json{{"params", to_json(p)},
              {"plus", x.dsig().plus.coords},
              {"minus", x.dsig().minus.coords},
              {"values", values}};
}

template <class Real>
json to_json(const kernels::KernelRow<Real>& row, const lattice::Params<Real>& p) {
  json atoms = json::array();
  for (const auto& a : row.atoms)
    atoms.push_back(json{{"target", to_json(a.target, p)},
                         {"weight", to_decimal_string(a.weight)}});
  return json{{"source", to_json(row.source, p)},
              {"level_to", row.level_to},
              {"atoms", atoms},
              {"tail_bound", to_decimal_string(row.tail_bound)}};
}

template <class Real>
json to_json(const chain::PathSample<Real>& path, const lattice::Params<Real>& p) {
  json levels = json::array();
  for (const auto& cfg : path.levels) levels.push_back(to_json(cfg, p));
  return json{{"seed", path.seed},
              {"truncation_events", path.truncation_events},
              {"levels", levels}};
}

// CSV moment table: nu,K,N_approx,moment,error_band
inline std::string moment_csv_header() { return "nu,K,N_approx,moment,error_band"; }

template <class Real>
std::string moment_csv_line(const shapes::Partition& nu, int K, int N_approx, const Real& value,
                            const Real& band) {
  std::string nu_s;
  for (std::size_t i = 0; i < nu.parts().size(); ++i) {
    if (i) nu_s += " ";
    nu_s += std::to_string(nu.parts()[i]);
  }
  return nu_s + "," + std::to_string(K) + "," + std::to_string(N_approx) + "," +
         to_decimal_string(value) + "," + to_decimal_string(band);
}

}  // namespace qgt::io
