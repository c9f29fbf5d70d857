// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dscat/boundary.hpp"
#include "dscat/core.hpp"
#include "dscat/farfield.hpp"
#include "dscat/harness.hpp"

namespace dscat {

using json = nlohmann::ordered_json;

/// Sign and normalization conventions embedded in every output file.
inline json convention_block() {
  return json{
      {"incident_wave", "exp(+i k d.x)"},
      {"kernel", "exp(+i k |x-y|) / (4 pi |x-y|), outgoing"},
      {"time_dependence", "exp(-i omega t)"},
      {"farfield", "psi_sc(x) = exp(i k |x|)/|x| psi_inf(x_hat) + O(|x|^-2)"},
      {"scattering_amplitude", "s = (2 pi)^{3/2} psi_inf"},
      {"amplitude_factor", kAmplitudeFactor},
      {"acoustic_field", "u = sqrt(rho) psi"},
  };
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json report_to_json(const ExperimentReport& r) {
  json inputs = json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = std::isfinite(v) ? json(v) : json(fmt17(v));
  json thresholds = json::array();
  for (const auto& t : r.thresholds)
    thresholds.push_back({{"metric", t.metric}, {"relation", t.relation}, {"bound", t.bound}, {"pass", t.pass}});
  return json{{"name", r.name},
              {"inputs", {{"digest", r.inputs_digest}, {"values", inputs}}},
              {"metrics", metrics},
              {"thresholds", thresholds},
              {"notes", r.notes},
              {"pass", r.pass},
              {"seconds", r.seconds}};
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + path + " for writing");
  return f;
}

inline void write_header(std::ostream& os, const json& meta) { os << "# " << meta.dump() << "\n"; }

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace detail

/// Far field as rows (incidence i, observation j). The first line is a
/// "# " JSON metadata header.
inline void write_farfield_csv(const std::string& path, const FarFieldPattern& ff, const json& meta) {
  auto f = detail::open_out(path);
  json m = meta;
  m["conventions"] = convention_block();
  m["k"] = ff.k;
  m["n_incidence"] = ff.incidence.size();
  m["n_observation"] = ff.observations.size();
  detail::write_header(f, m);
  f << "inc,obs,rho_re_x,rho_re_y,rho_re_z,rho_im_x,rho_im_y,rho_im_z,obs_x,obs_y,obs_z,re,im\n";
  for (std::size_t i = 0; i < ff.incidence.size(); ++i) {
    const auto& rho = ff.incidence[i].rho;
    for (std::size_t o = 0; o < ff.observations.size(); ++o) {
      const auto& x = ff.observations[o];
      const cplx v = ff.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o));
      f << i << ',' << o;
      for (int a = 0; a < 3; ++a) f << ',' << fmt17(rho(a).real());
      for (int a = 0; a < 3; ++a) f << ',' << fmt17(rho(a).imag());
      for (int a = 0; a < 3; ++a) f << ',' << fmt17(x(a));
      f << ',' << fmt17(v.real()) << ',' << fmt17(v.imag()) << '\n';
    }
  }
}

/// Reads a far-field CSV written by write_farfield_csv.
inline FarFieldPattern read_farfield_csv(const std::string& path, json* meta = nullptr) {
  std::ifstream f(path);
  if (!f) throw ValidationError("missing file " + path);
  std::string line;
  json m;
  if (!std::getline(f, line) || line.rfind("# ", 0) != 0) throw ParseError(path + ": missing metadata header");
  try {
    m = json::parse(line.substr(2));
  } catch (const std::exception& e) {
    throw ParseError(path + ": bad metadata header: " + e.what());
  }
  if (!std::getline(f, line) || line.rfind("inc,obs,", 0) != 0) throw ParseError(path + ": missing column header");
  const double k = m.value("k", 1.0);
  const auto ni = m.value("n_incidence", std::size_t{0});
  const auto no = m.value("n_observation", std::size_t{0});
  FarFieldPattern ff;
  ff.k = k;
  ff.incidence.resize(ni);
  ff.observations.resize(no);
  ff.values = CMatrix::Zero(static_cast<Eigen::Index>(ni), static_cast<Eigen::Index>(no));
  std::size_t rows = 0, lineno = 2;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c = detail::split_csv(line);
    if (c.size() != 13) throw ParseError(path + ":" + std::to_string(lineno) + ": expected 13 columns");
    std::size_t i = 0, o = 0;
    double v[11];
    try {
      i = std::stoul(c[0]);
      o = std::stoul(c[1]);
      for (int a = 0; a < 11; ++a) v[a] = std::stod(c[static_cast<std::size_t>(a) + 2]);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
    if (i >= ni || o >= no) throw ParseError(path + ":" + std::to_string(lineno) + ": index out of range");
    const CVec3 rho(cplx(v[0], v[3]), cplx(v[1], v[4]), cplx(v[2], v[5]));
    ff.incidence[i] = direction_from_rho(rho, k);
    ff.observations[o] = Vec3(v[6], v[7], v[8]);
    ff.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o)) = cplx(v[9], v[10]);
    ++rows;
  }
  if (rows != ni * no) throw ParseError(path + ": expected " + std::to_string(ni * no) + " rows, found " + std::to_string(rows));
  if (meta) *meta = m;
  return ff;
}

/// Panel densities: centroid, area, alpha, eta and the trace.
inline void write_density_csv(const std::string& path, const DeltaSolution& sol, const json& meta) {
  auto f = detail::open_out(path);
  json m = meta;
  m["conventions"] = convention_block();
  m["panels"] = sol.mesh().size();
  detail::write_header(f, m);
  f << "panel,cx,cy,cz,area,alpha,eta_re,eta_im,trace_re,trace_im\n";
  const auto& mesh = sol.mesh();
  const auto& alpha = sol.scatterer->delta.alpha;
  for (std::size_t q = 0; q < mesh.size(); ++q) {
    f << q;
    for (int a = 0; a < 3; ++a) f << ',' << fmt17(mesh.centroid[q](a));
    f << ',' << fmt17(mesh.area[q]) << ',' << fmt17(alpha[q]) << ',' << fmt17(sol.density.eta[q].real()) << ','
      << fmt17(sol.density.eta[q].imag()) << ',' << fmt17(sol.density.trace[q].real()) << ','
      << fmt17(sol.density.trace[q].imag()) << '\n';
  }
}

/// Total field at every cell center together with V and the incident wave.
inline void write_field_csv(const std::string& path, const DeltaSolution& sol, const json& meta) {
  auto f = detail::open_out(path);
  json m = meta;
  m["conventions"] = convention_block();
  const auto& g = sol.volume_field.grid;
  m["grid"] = {{"lo", {g.bbox.lo(0), g.bbox.lo(1), g.bbox.lo(2)}},
               {"hi", {g.bbox.hi(0), g.bbox.hi(1), g.bbox.hi(2)}},
               {"n", g.n}};
  detail::write_header(f, m);
  f << "cell,x,y,z,V,psi_re,psi_im,incident_re,incident_im\n";
  const auto& v = sol.potential().values;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 c = g.cell_center(i);
    const cplx inc = eval_incident(sol.incident, sol.k, c);
    const cplx psi = sol.volume_field.values[i];
    f << i;
    for (int a = 0; a < 3; ++a) f << ',' << fmt17(c(a));
    f << ',' << fmt17(v[i]) << ',' << fmt17(psi.real()) << ',' << fmt17(psi.imag()) << ',' << fmt17(inc.real()) << ','
      << fmt17(inc.imag()) << '\n';
  }
}

inline void write_json(const std::string& path, const json& j) {
  auto f = detail::open_out(path);
  f << j.dump(2) << "\n";
}

}  // namespace dscat
