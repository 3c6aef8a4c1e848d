#include "slosh/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Geometry>

#include "slosh/errors.hpp"

namespace slosh {

ContainerSpec ContainerSpec::disk(double radius, double depth, int resolution) {
  ContainerSpec spec;
  spec.shape = Shape::Disk;
  spec.radius = radius;
  spec.depth = depth;
  spec.resolution = resolution;
  return spec;
}

ContainerSpec ContainerSpec::rectangle(double lx, double ly, double depth, int resolution) {
  ContainerSpec spec;
  spec.shape = Shape::Rectangle;
  spec.lx = lx;
  spec.ly = ly;
  spec.depth = depth;
  spec.resolution = resolution;
  return spec;
}

void ContainerSpec::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(depth)) throw InvalidSpec("depth must be positive");
  if (resolution < 2) throw InvalidSpec("resolution must be at least 2");
  if (shape == Shape::Disk) {
    if (!positive(radius)) throw InvalidSpec("disk radius must be positive");
  } else if (!positive(lx) || !positive(ly)) {
    throw InvalidSpec("rectangle side lengths must be positive");
  }
}

double ContainerSpec::surface_area() const {
  return shape == Shape::Disk ? std::numbers::pi * radius * radius : lx * ly;
}

double SurfaceMesh::total_area() const {
  double sum = 0.0;
  for (double a : areas) sum += a;
  return sum;
}

std::vector<bool> SurfaceMesh::boundary_flags() const {
  std::vector<bool> flags(nodes.size(), false);
  for (const auto& e : boundary_edges) {
    flags[e[0]] = true;
    flags[e[1]] = true;
  }
  return flags;
}

double VolumeMesh::total_volume() const {
  double sum = 0.0;
  for (double v : volumes) sum += v;
  return sum;
}

namespace {

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double signed_volume(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                     const Eigen::Vector3d& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

// Orients every triangle counter-clockwise and fills areas and boundary edges.
void finalize_surface(SurfaceMesh& mesh) {
  mesh.areas.clear();
  mesh.areas.reserve(mesh.triangles.size());
  for (auto& t : mesh.triangles) {
    double a = signed_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
    if (a < 0.0) {
      std::swap(t[1], t[2]);
      a = -a;
    }
    if (!(a > 0.0)) throw DegenerateMesh("surface triangle with zero area");
    mesh.areas.push_back(a);
  }
  mesh.boundary_edges = find_boundary_edges(mesh.triangles);
}

SurfaceMesh mesh_disk(const ContainerSpec& spec) {
  const int n = spec.resolution;
  const double a = spec.radius;
  SurfaceMesh mesh;
  // ring_start[i] is the index of node (ring i, k = 0); ring i has 6i nodes.
  std::vector<int> ring_start(n + 1);
  mesh.nodes.emplace_back(0.0, 0.0);
  ring_start[0] = 0;
  for (int i = 1; i <= n; ++i) {
    ring_start[i] = static_cast<int>(mesh.nodes.size());
    const double r = (i == n) ? a : a * i / n;
    for (int k = 0; k < 6 * i; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / (6.0 * i);
      mesh.nodes.emplace_back(r * std::cos(theta), r * std::sin(theta));
    }
  }
  auto node = [&](int ring, int sector, int j) {
    if (ring == 0) return 0;
    const int count = 6 * ring;
    return ring_start[ring] + (sector * ring + j) % count;
  };
  for (int i = 1; i <= n; ++i) {
    for (int s = 0; s < 6; ++s) {
      for (int j = 0; j < i; ++j) {
        mesh.triangles.push_back({node(i, s, j), node(i, s, j + 1), node(i - 1, s, j)});
      }
      for (int j = 0; j + 1 < i; ++j) {
        mesh.triangles.push_back({node(i - 1, s, j), node(i, s, j + 1), node(i - 1, s, j + 1)});
      }
    }
  }
  finalize_surface(mesh);
  return mesh;
}

SurfaceMesh mesh_rectangle(const ContainerSpec& spec) {
  const double extent = std::max(spec.lx, spec.ly);
  const int nx = std::max(1, static_cast<int>(std::lround(spec.resolution * spec.lx / extent)));
  const int ny = std::max(1, static_cast<int>(std::lround(spec.resolution * spec.ly / extent)));
  SurfaceMesh mesh;
  for (int j = 0; j <= ny; ++j) {
    const double y = (j == ny) ? spec.ly : spec.ly * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? spec.lx : spec.lx * i / nx;
      mesh.nodes.emplace_back(x, y);
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  finalize_surface(mesh);
  return mesh;
}

}  // namespace

std::vector<std::array<int, 2>> find_boundary_edges(const std::vector<std::array<int, 3>>& triangles) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  }
  std::vector<std::array<int, 2>> boundary;
  for (const auto& [edge, c] : count) {
    if (c > 2) throw DegenerateMesh("non-manifold edge shared by more than two triangles");
    if (c == 1) boundary.push_back({edge.first, edge.second});
  }
  return boundary;
}

SurfaceMesh mesh_surface(const ContainerSpec& spec) {
  spec.validate();
  return spec.shape == Shape::Disk ? mesh_disk(spec) : mesh_rectangle(spec);
}

VolumeMesh extrude(const SurfaceMesh& surface, double depth, int layers) {
  if (layers < 1) throw InvalidArgument("extrusion needs at least one layer");
  if (!(depth > 0.0)) throw InvalidSpec("depth must be positive");
  const int nf = surface.node_count();
  VolumeMesh mesh;
  mesh.nodes.reserve(static_cast<std::size_t>(nf) * (layers + 1));
  for (int l = 0; l <= layers; ++l) {
    double z = 0.0;
    if (l == layers) {
      z = -depth;
    } else if (l > 0) {
      z = -(depth * l) / layers;
    }
    for (const auto& p : surface.nodes) mesh.nodes.emplace_back(p.x(), p.y(), z);
  }
  mesh.surface_trace.resize(nf);
  for (int i = 0; i < nf; ++i) mesh.surface_trace[i] = i;

  auto at = [nf](int layer, int i) { return layer * nf + i; };
  mesh.tets.reserve(3 * surface.triangles.size() * layers);
  for (int l = 0; l < layers; ++l) {
    for (auto tri : surface.triangles) {
      std::sort(tri.begin(), tri.end());
      // Top layer l has the lower volume indices, so every side quad is cut
      // from top(min) to bottom(max).
      const int t0 = at(l, tri[0]), t1 = at(l, tri[1]), t2 = at(l, tri[2]);
      const int b0 = at(l + 1, tri[0]), b1 = at(l + 1, tri[1]), b2 = at(l + 1, tri[2]);
      mesh.tets.push_back({t0, t1, t2, b2});
      mesh.tets.push_back({t0, t1, b1, b2});
      mesh.tets.push_back({t0, b0, b1, b2});
    }
  }
  mesh.volumes.reserve(mesh.tets.size());
  for (auto& t : mesh.tets) {
    const auto& p = mesh.nodes;
    double v = signed_volume(p[t[0]], p[t[1]], p[t[2]], p[t[3]]);
    if (v < 0.0) {
      std::swap(t[2], t[3]);
      v = -v;
    }
    double edge = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) edge = std::max(edge, (p[t[a]] - p[t[b]]).norm());
    if (!(v > 1e-12 * edge * edge * edge)) {
      throw DegenerateMesh("tetrahedron with non-positive volume " + std::to_string(v));
    }
    mesh.volumes.push_back(v);
  }

  for (const auto& tri : surface.triangles) {
    mesh.facets.push_back({{at(0, tri[0]), at(0, tri[1]), at(0, tri[2])}, FacetTag::FreeSurface});
    mesh.facets.push_back({{at(layers, tri[0]), at(layers, tri[2]), at(layers, tri[1])}, FacetTag::Bottom});
  }
  for (auto edge : surface.boundary_edges) {
    std::sort(edge.begin(), edge.end());
    for (int l = 0; l < layers; ++l) {
      const int ti = at(l, edge[0]), tj = at(l, edge[1]);
      const int bi = at(l + 1, edge[0]), bj = at(l + 1, edge[1]);
      mesh.facets.push_back({{ti, tj, bj}, FacetTag::Wall});
      mesh.facets.push_back({{ti, bj, bi}, FacetTag::Wall});
    }
  }
  return mesh;
}

ContainerMesh build_mesh(const ContainerSpec& spec, int layers) {
  spec.validate();
  ContainerMesh mesh;
  mesh.spec = spec;
  mesh.layers = layers;
  mesh.surface = mesh_surface(spec);
  mesh.volume = extrude(mesh.surface, spec.depth, layers);
  return mesh;
}

SurfaceMesh refine_surface(const SurfaceMesh& surface, const ContainerSpec& spec) {
  SurfaceMesh fine;
  fine.nodes = surface.nodes;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(fine.nodes.size());
    fine.nodes.push_back(0.5 * (surface.nodes[a] + surface.nodes[b]));
    midpoint.emplace(key, id);
    return id;
  };
  fine.triangles.reserve(4 * surface.triangles.size());
  for (const auto& t : surface.triangles) {
    const int ab = mid(t[0], t[1]);
    const int bc = mid(t[1], t[2]);
    const int ca = mid(t[2], t[0]);
    fine.triangles.push_back({t[0], ab, ca});
    fine.triangles.push_back({ab, t[1], bc});
    fine.triangles.push_back({ca, bc, t[2]});
    fine.triangles.push_back({ab, bc, ca});
  }
  if (spec.shape == Shape::Disk) {
    for (const auto& e : surface.boundary_edges) {
      auto& p = fine.nodes[midpoint.at(std::minmax(e[0], e[1]))];
      p *= spec.radius / p.norm();
    }
  }
  finalize_surface(fine);
  return fine;
}

ContainerMesh refine(const ContainerMesh& mesh) {
  ContainerMesh fine;
  fine.spec = mesh.spec;
  fine.layers = 2 * mesh.layers;
  fine.surface = refine_surface(mesh.surface, mesh.spec);
  fine.volume = extrude(fine.surface, mesh.spec.depth, fine.layers);
  return fine;
}

std::uint64_t fingerprint(const VolumeMesh& mesh) {
  std::uint64_t hash = 1469598103934665603ull;
  for (const auto& p : mesh.nodes) {
    for (int k = 0; k < 3; ++k) {
      unsigned char bytes[sizeof(double)];
      const double v = p[k];
      std::memcpy(bytes, &v, sizeof v);
      for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 1099511628211ull;
      }
    }
  }
  return hash;
}

}  // namespace slosh
