// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dscat/core.hpp"
#include "dscat/quadrature.hpp"

namespace dscat {

/// Closed triangulated surface with per-panel geometry. Panels are flat;
/// curvature enters only through refinement.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> centroid;
  std::vector<double> area;
  std::vector<Vec3> normal;    ///< unit, from the vertex winding
  std::vector<double> diameter;  ///< longest edge
  std::vector<std::string> warnings;

  std::size_t size() const { return triangles.size(); }

  const Vec3& vertex(std::size_t panel, int corner) const {
    return vertices[static_cast<std::size_t>(triangles[panel][static_cast<std::size_t>(corner)])];
  }

  std::array<Vec3, 3> quad_points(std::size_t panel) const {
    return triangle_points(vertex(panel, 0), vertex(panel, 1), vertex(panel, 2));
  }

  double total_area() const {
    double s = 0.0;
    for (double a : area) s += a;
    return s;
  }

  double max_diameter() const {
    double m = 0.0;
    for (double d : diameter) m = std::max(m, d);
    return m;
  }

  /// Digest of vertex coordinates and connectivity.
  std::uint64_t digest() const {
    std::uint64_t h = fnv1a(vertices.data(), vertices.size() * sizeof(Vec3));
    return fnv1a(triangles.data(), triangles.size() * sizeof(std::array<int, 3>), h);
  }

  /// Fills centroid/area/normal/diameter from vertices and triangles.
  void compute_panels() {
    const std::size_t n = triangles.size();
    centroid.resize(n);
    area.resize(n);
    normal.resize(n);
    diameter.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& a = vertex(i, 0);
      const Vec3& b = vertex(i, 1);
      const Vec3& c = vertex(i, 2);
      const Vec3 cr = (b - a).cross(c - a);
      const double twice = cr.norm();
      if (!(twice > 0.0)) throw ValidationError("degenerate panel " + std::to_string(i));
      centroid[i] = (a + b + c) / 3.0;
      area[i] = 0.5 * twice;
      normal[i] = cr / twice;
      diameter[i] = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    }
  }

  /// Number of undirected edges not shared by exactly two panels.
  struct EdgeReport {
    std::size_t edges = 0;
    std::size_t open_edges = 0;
    std::size_t inconsistent = 0;  ///< directed edges used twice in the same direction
  };

  EdgeReport edge_report() const {
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : triangles)
      for (int e = 0; e < 3; ++e)
        ++directed[{t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)]}];
    EdgeReport r;
    std::map<std::pair<int, int>, int> undirected;
    for (const auto& [key, count] : directed) {
      if (count > 1) r.inconsistent += static_cast<std::size_t>(count - 1);
      undirected[{std::min(key.first, key.second), std::max(key.first, key.second)}] += count;
    }
    r.edges = undirected.size();
    for (const auto& [key, count] : undirected)
      if (count != 2) ++r.open_edges;
    return r;
  }
};

/// Icosphere: icosahedron with midpoint subdivision, vertices projected to
/// the sphere. 20 * 4^subdivisions outward-wound panels.
inline SurfaceMesh make_sphere_mesh(double radius, int subdivisions, const Vec3& center = Vec3::Zero()) {
  if (!(radius > 0.0)) throw ValidationError("make_sphere_mesh: radius must be positive");
  if (subdivisions < 0) throw ValidationError("make_sphere_mesh: subdivisions must be >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      if (auto it = mid.find(key); it != mid.end()) return it->second;
      Vec3 m = 0.5 * (v[static_cast<std::size_t>(a)] + v[static_cast<std::size_t>(b)]);
      m.normalize();
      v.push_back(m);
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int a = tri[0], b = tri[1], c = tri[2];
      const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  SurfaceMesh m;
  m.vertices.reserve(v.size());
  for (const auto& p : v) m.vertices.push_back(center + radius * p);
  m.triangles = std::move(f);
  m.compute_panels();
  return m;
}

namespace detail {

inline void finish_loaded_mesh(SurfaceMesh& m) {
  m.compute_panels();
  const auto rep = m.edge_report();
  if (rep.inconsistent > 0)
    throw ValidationError("inconsistent triangle winding: " + std::to_string(rep.inconsistent) +
                          " directed edge(s) repeated; fix the orientation in the file");
  if (rep.open_edges > 0)
    m.warnings.push_back("mesh is not closed: " + std::to_string(rep.open_edges) + " open edge(s)");
}

}  // namespace detail

/// Parses OFF text. Comments (#) and blank lines are skipped; errors carry
/// the 1-based line number.
inline SurfaceMesh parse_off(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&](std::istringstream& ss) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ss = std::istringstream(line);
      return true;
    }
    return false;
  };
  std::istringstream ss;
  if (!next_line(ss)) throw ParseError("empty OFF file");
  std::string magic;
  ss >> magic;
  if (magic != "OFF") throw ParseError("missing OFF header at line " + std::to_string(lineno));
  long nv = -1, nf = -1, ne = 0;
  if (!(ss >> nv)) {
    if (!next_line(ss)) throw ParseError("missing counts line");
    ss >> nv;
  }
  if (!(ss >> nf)) throw ParseError("bad counts at line " + std::to_string(lineno));
  ss >> ne;
  if (nv < 3 || nf < 1) throw ParseError("bad counts at line " + std::to_string(lineno));
  SurfaceMesh m;
  m.vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next_line(ss)) throw ParseError("unexpected end of file reading vertices");
    Vec3 p;
    if (!(ss >> p(0) >> p(1) >> p(2)))
      throw ParseError("bad vertex at line " + std::to_string(lineno));
    m.vertices.push_back(p);
  }
  for (long i = 0; i < nf; ++i) {
    if (!next_line(ss)) throw ParseError("unexpected end of file reading faces");
    int count = 0;
    if (!(ss >> count)) throw ParseError("bad face at line " + std::to_string(lineno));
    if (count != 3) throw ParseError("non-triangular face at line " + std::to_string(lineno));
    std::array<int, 3> t{};
    for (auto& idx : t) {
      if (!(ss >> idx) || idx < 0 || idx >= nv)
        throw ParseError("bad vertex index at line " + std::to_string(lineno));
    }
    m.triangles.push_back(t);
  }
  detail::finish_loaded_mesh(m);
  return m;
}

inline SurfaceMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file " + path);
  try {
    return parse_off(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_off(std::ostream& out, const SurfaceMesh& m) {
  out << "OFF\n" << m.vertices.size() << ' ' << m.triangles.size() << " 0\n";
  out << std::setprecision(17);
  for (const auto& p : m.vertices) out << p(0) << ' ' << p(1) << ' ' << p(2) << '\n';
  for (const auto& t : m.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

/// Product rule on a sphere: Gauss-Legendre in cos(theta), uniform in phi.
struct SphereGrid {
  double radius = 1.0;
  Vec3 center = Vec3::Zero();
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  std::vector<Vec3> normals;

  std::size_t size() const { return nodes.size(); }
};

inline SphereGrid make_sphere_grid(double radius, int n_theta, int n_phi, const Vec3& center = Vec3::Zero()) {
  if (!(radius > 0.0)) throw ValidationError("make_sphere_grid: radius must be positive");
  if (n_theta < 2 || n_phi < 4) throw ValidationError("make_sphere_grid: need n_theta >= 2, n_phi >= 4");
  const auto [x, w] = gauss_legendre(n_theta);
  SphereGrid g;
  g.radius = radius;
  g.center = center;
  const double dphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double ct = x[static_cast<std::size_t>(i)];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = j * dphi;
      const Vec3 nrm(st * std::cos(phi), st * std::sin(phi), ct);
      g.normals.push_back(nrm);
      g.nodes.push_back(center + radius * nrm);
      g.weights.push_back(radius * radius * w[static_cast<std::size_t>(i)] * dphi);
    }
  }
  return g;
}

/// 26-point Lebedev rule on the unit sphere (exact to degree 7): axes,
/// edge midpoints and cube corners.
inline SphereGrid lebedev26() {
  SphereGrid g;
  auto push = [&g](const Vec3& d, double w) {
    g.normals.push_back(d.normalized());
    g.nodes.push_back(d.normalized());
    g.weights.push_back(4.0 * kPi * w);
  };
  for (int a = 0; a < 3; ++a)
    for (double s : {1.0, -1.0}) push(s * Vec3::Unit(a), 1.0 / 21.0);
  for (int a = 0; a < 3; ++a)
    for (double s1 : {1.0, -1.0})
      for (double s2 : {1.0, -1.0}) {
        Vec3 d = Vec3::Zero();
        d((a + 1) % 3) = s1;
        d((a + 2) % 3) = s2;
        push(d, 4.0 / 105.0);
      }
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0})
      for (double sz : {1.0, -1.0}) push(Vec3(sx, sy, sz), 9.0 / 280.0);
  return g;
}

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
};

/// Uniform Cartesian cell grid over a box; cell index i + n*(j + n*l).
struct VolumeGrid {
  Box bbox;
  int n = 2;
  Vec3 step = Vec3::Ones();
  double cell_volume = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }

  Vec3 cell_center(std::size_t idx) const {
    const auto nn = static_cast<std::size_t>(n);
    const std::size_t i = idx % nn, j = (idx / nn) % nn, l = idx / (nn * nn);
    return bbox.lo + Vec3((i + 0.5) * step(0), (j + 0.5) * step(1), (l + 0.5) * step(2));
  }

  /// Radius of the ball with the cell's volume.
  double equivalent_radius() const { return std::cbrt(3.0 * cell_volume / (4.0 * kPi)); }

  bool operator==(const VolumeGrid& o) const {
    return n == o.n && bbox.lo == o.bbox.lo && bbox.hi == o.bbox.hi;
  }
};

inline VolumeGrid make_volume_grid(const Box& bbox, int n) {
  if (n < 2) throw ValidationError("make_volume_grid: n must be >= 2");
  const Vec3 side = bbox.hi - bbox.lo;
  if (!(side.minCoeff() > 0.0)) throw ValidationError("make_volume_grid: degenerate box");
  VolumeGrid g;
  g.bbox = bbox;
  g.n = n;
  g.step = side / n;
  g.cell_volume = g.step.prod();
  return g;
}

}  // namespace dscat
