// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dscat/acoustic.hpp"
#include "dscat/boundary.hpp"
#include "dscat/core.hpp"
#include "dscat/farfield.hpp"
#include "dscat/geometry.hpp"
#include "dscat/io.hpp"
#include "dscat/kernels.hpp"
#include "dscat/mie.hpp"
#include "dscat/volume.hpp"

namespace dscat {

/// Malformed configuration; `pointer()` is the JSON pointer of the culprit.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& pointer, const std::string& what)
      : Error("config", (pointer.empty() ? "/" : pointer) + ": " + what), pointer_(pointer.empty() ? "/" : pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

/// Read-once view of a JSON object that remembers which keys were consumed,
/// so unknown keys can be rejected with their location.
class ConfigNode {
 public:
  ConfigNode(const json& j, std::string pointer) : j_(&j), ptr_(std::move(pointer)) {
    if (!j.is_object()) throw ConfigError(ptr_, "expected an object");
  }

  const std::string& pointer() const { return ptr_; }
  std::string at(const std::string& key) const { return ptr_ + "/" + key; }
  bool has(const std::string& key) const { return j_->contains(key); }

  double number(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(at(key), "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key) const {
    const double d = number(key);
    if (!(d > 0.0)) throw ConfigError(at(key), "must be positive");
    return d;
  }
  double positive(const std::string& key, double fallback) const { return has(key) ? positive(key) : fallback; }

  int integer(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = get(key);
    if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  Vec3 vec3(const std::string& key) const { return to_vec3(get(key), at(key)); }
  Vec3 vec3(const std::string& key, const Vec3& fallback) const { return has(key) ? vec3(key) : fallback; }

  std::vector<double> numbers(const std::string& key) const {
    const auto& v = get(key);
    std::vector<double> out;
    if (v.is_number()) return {number(key)};
    if (!v.is_array()) throw ConfigError(at(key), "expected a number or an array of numbers");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(at(key) + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  ConfigNode object(const std::string& key) const { return ConfigNode(get(key), at(key)); }

  std::vector<ConfigNode> objects(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array");
    std::vector<ConfigNode> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], at(key) + "/" + std::to_string(i));
    return out;
  }

  const json& raw(const std::string& key) const { return get(key); }

  /// Rejects every key that was never read.
  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
  }

  static Vec3 to_vec3(const json& v, const std::string& ptr) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(ptr, "expected an array of 3 numbers");
    Vec3 out;
    for (int a = 0; a < 3; ++a) {
      if (!v[static_cast<std::size_t>(a)].is_number()) throw ConfigError(ptr + "/" + std::to_string(a), "expected a number");
      out(a) = v[static_cast<std::size_t>(a)].get<double>();
    }
    return out;
  }

 private:
  const json& get(const std::string& key) const {
    if (!j_->contains(key)) throw ConfigError(at(key), "missing required key");
    used_.insert(key);
    return (*j_)[key];
  }

  const json* j_;
  std::string ptr_;
  mutable std::set<std::string> used_;
};

inline json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot read config file " + path);
  try {
    return json::parse(f);
  } catch (const std::exception& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
}

/// FNV-1a of the canonical (key-sorted) dump.
inline std::string config_digest(const json& j) {
  const std::string s = nlohmann::json(j).dump();
  return hex64(fnv1a(s.data(), s.size()));
}

/// {"sphere": {"radius", "subdivisions", "center"}} or {"off": path}.
inline SurfaceMesh parse_surface(const ConfigNode& n, std::optional<int> level_override = std::nullopt) {
  SurfaceMesh m;
  if (n.has("sphere") == n.has("off")) throw ConfigError(n.pointer(), "give exactly one of \"sphere\" or \"off\"");
  if (n.has("sphere")) {
    const auto s = n.object("sphere");
    const double r = s.positive("radius", 1.0);
    int level = s.integer("subdivisions", 3);
    if (level < 0 || level > 5) throw ConfigError(s.at("subdivisions"), "must be in 0..5");
    if (level_override) level = *level_override;
    const Vec3 c = s.vec3("center", Vec3::Zero());
    s.finish();
    m = make_sphere_mesh(r, level, c);
  } else {
    const std::string path = n.string("off");
    try {
      m = load_mesh(path);
    } catch (const Error& e) {
      throw ConfigError(n.at("off"), e.what());
    }
  }
  n.finish();
  return m;
}

inline GaussianBump parse_bump(const ConfigNode& n) {
  GaussianBump b{n.number("amplitude"), n.vec3("center", Vec3::Zero()), n.positive("width")};
  n.finish();
  return b;
}

/// {"half_width", "n"} around the origin.
inline VolumeGrid parse_grid(const ConfigNode& n, double default_half) {
  const double h = n.positive("half_width", default_half);
  const int cells = n.integer("n", 12);
  if (cells < 2 || cells > 64) throw ConfigError(n.at("n"), "must be in 2..64");
  n.finish();
  return make_volume_grid(Box{Vec3::Constant(-h), Vec3::Constant(h)}, cells);
}

/// {"grid": {...}, "balls": [{"radius", "value", "center"}], "bumps": [...]}.
inline PotentialSample parse_potential(const ConfigNode& n) {
  const auto grid = parse_grid(n.object("grid"), 1.2);
  struct Ball {
    double r, v;
    Vec3 c;
  };
  std::vector<Ball> balls;
  if (n.has("balls"))
    for (const auto& b : n.objects("balls")) {
      balls.push_back({b.positive("radius"), b.number("value"), b.vec3("center", Vec3::Zero())});
      b.finish();
    }
  std::vector<GaussianBump> bumps;
  if (n.has("bumps"))
    for (const auto& b : n.objects("bumps")) bumps.push_back(parse_bump(b));
  n.finish();
  return sample_potential(grid, [&](const Vec3& x) {
    double v = 0.0;
    for (const auto& b : balls)
      if ((x - b.c).norm() < b.r) v += b.v;
    for (const auto& b : bumps) v += b.value(x);
    return v;
  });
}

/// {"type": "plane", "direction"} or {"type": "exponential", "w", "zeta", "xi"}.
inline IncidentField parse_incident(const ConfigNode& n, double k) {
  const std::string type = n.string("type", "plane");
  IncidentField inc;
  if (type == "plane") {
    const Vec3 d = n.vec3("direction", Vec3::UnitZ());
    if (!(d.norm() > 0)) throw ConfigError(n.at("direction"), "must be nonzero");
    inc = PlaneWave{d.normalized()};
  } else if (type == "exponential") {
    try {
      inc = Exponential{make_sigma_k(n.number("w"), n.vec3("zeta").normalized(), n.vec3("xi").normalized(), k)};
    } catch (const ValidationError& e) {
      throw ConfigError(n.pointer(), e.what());
    }
  } else {
    throw ConfigError(n.at("type"), "expected \"plane\" or \"exponential\"");
  }
  n.finish();
  return inc;
}

/// {"n_theta", "n_phi"} equiangular grid or {"list": [[x, y, z], ...]}.
inline std::vector<Vec3> parse_directions(const ConfigNode& n, int nt, int np) {
  std::vector<Vec3> out;
  if (n.has("list")) {
    const auto& l = n.raw("list");
    if (!l.is_array() || l.empty()) throw ConfigError(n.at("list"), "expected a nonempty array of directions");
    for (std::size_t i = 0; i < l.size(); ++i) {
      const Vec3 d = ConfigNode::to_vec3(l[i], n.at("list") + "/" + std::to_string(i));
      if (!(d.norm() > 0)) throw ConfigError(n.at("list") + "/" + std::to_string(i), "must be nonzero");
      out.push_back(d.normalized());
    }
  } else {
    const int a = n.integer("n_theta", nt), b = n.integer("n_phi", np);
    if (a < 1 || b < 1 || a * b > 4096) throw ConfigError(n.pointer(), "need n_theta, n_phi >= 1 and at most 4096 directions");
    out = observation_grid(a, b);
  }
  n.finish();
  return out;
}

inline SolverOptions parse_solver(const ConfigNode& n) {
  SolverOptions o;
  o.max_cells = static_cast<std::size_t>(n.integer("max_cells", static_cast<int>(o.max_cells)));
  o.max_panels = static_cast<std::size_t>(n.integer("max_panels", static_cast<int>(o.max_panels)));
  o.rcond_floor = n.number("rcond_floor", o.rcond_floor);
  o.centroid_rule = n.boolean("centroid_rule", o.centroid_rule);
  o.near_factor = n.number("near_factor", o.near_factor);
  o.potential_subcells = n.integer("potential_subcells", o.potential_subcells);
  if (o.near_factor < 0) throw ConfigError(n.at("near_factor"), "must be >= 0");
  if (o.potential_subcells < 1 || o.potential_subcells > 8) throw ConfigError(n.at("potential_subcells"), "must be in 1..8");
  n.finish();
  return o;
}

/// Scatterer of the forward and farfield commands: optional surface with a
/// constant alpha and optional cellwise potential.
struct ScattererConfig {
  PotentialSample potential = empty_potential();
  DeltaSpec delta;
};

inline ScattererConfig parse_scatterer(const ConfigNode& n) {
  ScattererConfig s;
  if (n.has("surface")) {
    auto mesh = parse_surface(n.object("surface"));
    s.delta = constant_delta(std::move(mesh), n.number("alpha", 0.0));
  } else if (n.has("alpha")) {
    throw ConfigError(n.at("alpha"), "alpha needs a surface");
  }
  if (n.has("potential")) s.potential = parse_potential(n.object("potential"));
  return s;
}

/// Acoustic medium; a sphere surface may be re-leveled for refinement studies.
inline MediumSpec parse_medium(const ConfigNode& n, std::optional<int> level = std::nullopt) {
  MediumSpec m;
  m.gamma = parse_surface(n.object("surface"), level);
  const double xi = n.number("shell_density", 0.0);
  m.shell_density.assign(m.gamma.size(), xi);
  if (n.has("cutoff")) {
    const auto c = n.object("cutoff");
    m.cutoff = RadialCutoff{c.positive("radius", 3.0), c.positive("width", 1.0)};
    c.finish();
  }
  if (n.has("rho_bumps"))
    for (const auto& b : n.objects("rho_bumps")) m.rho_bumps.push_back(parse_bump(b));
  if (n.has("v_bumps"))
    for (const auto& b : n.objects("v_bumps")) m.v_bumps.push_back(parse_bump(b));
  n.finish();
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(n.pointer(), e.what());
  }
  return m;
}

inline RadialMedium parse_radial_medium(const ConfigNode& n) {
  RadialMedium m;
  m.a = n.positive("radius", 1.0);
  m.alpha = n.number("alpha", 0.0);
  if (n.has("shells")) {
    const auto& s = n.raw("shells");
    if (!s.is_array()) throw ConfigError(n.at("shells"), "expected an array of [outer_radius, V] pairs");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string p = n.at("shells") + "/" + std::to_string(i);
      if (!s[i].is_array() || s[i].size() != 2 || !s[i][0].is_number() || !s[i][1].is_number())
        throw ConfigError(p, "expected [outer_radius, V]");
      m.shells.emplace_back(s[i][0].get<double>(), s[i][1].get<double>());
    }
  }
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(n.pointer(), e.what());
  }
  return m;
}

}  // namespace dscat
