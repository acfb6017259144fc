// field_io.hpp
// JSON serialization of spectral fields: {xi_max, grid, t, re[], im[]} with
// coefficients listed in ascending ξ.

#ifndef NFR_FIELD_IO_HPP_
#define NFR_FIELD_IO_HPP_

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nfr/core.hpp"

namespace nfr {

inline nlohmann::json field_to_json(const SpectralField& f) {
  nlohmann::json j;
  j["xi_max"] = f.lat.xi_max;
  j["grid"] = f.lat.grid_points;
  j["t"] = f.t;
  std::vector<double> re, im;
  re.reserve(f.c.size());
  im.reserve(f.c.size());
  for (const auto& v : f.c) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline SpectralField field_from_json(const nlohmann::json& j) {
  FrequencyLattice lat(j.at("xi_max").get<int>(),
                       j.value("grid", 0));
  SpectralField f(lat, j.value("t", 0.0));
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if ((int)re.size() != lat.n_modes() || (int)im.size() != lat.n_modes())
    throw std::invalid_argument("field_from_json: coefficient count mismatch");
  for (int i = 0; i < lat.n_modes(); ++i)
    f.c[i] = cplx(re[i].get<double>(), im[i].get<double>());
  return f;
}

inline void write_field(const std::string& path, const SpectralField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_field: cannot open " + path);
  os << field_to_json(f).dump(2) << "\n";
}

inline SpectralField read_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_field: cannot open " + path);
  nlohmann::json j;
  is >> j;
  return field_from_json(j);
}

}  // namespace nfr

#endif  // NFR_FIELD_IO_HPP_
