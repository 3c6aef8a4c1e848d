#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace slosh {

enum class Shape { Disk, Rectangle };

/// Nondimensional vertical-walled container D = F x (-depth, 0).
///
/// F is either a disk of the given radius centred at the origin or the
/// rectangle [0, lx] x [0, ly]. `resolution` is the number of edge
/// subdivisions along the largest in-plane extent (radius for the disk).
struct ContainerSpec {
  Shape shape = Shape::Disk;
  double radius = 1.0;
  double lx = 1.0;
  double ly = 1.0;
  double depth = 1.0;
  int resolution = 4;

  static ContainerSpec disk(double radius, double depth, int resolution);
  static ContainerSpec rectangle(double lx, double ly, double depth, int resolution);

  /// Throws InvalidSpec when a length is not positive or resolution < 2.
  void validate() const;
  /// Exact area of F.
  double surface_area() const;
};

/// Conforming triangulation of the free surface F (plane z = 0).
struct SurfaceMesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;      // counter-clockwise
  std::vector<std::array<int, 2>> boundary_edges;  // edges on the contact line
  std::vector<double> areas;

  int node_count() const { return static_cast<int>(nodes.size()); }
  double total_area() const;
  /// Per-node flag: true when the node lies on the contact line.
  std::vector<bool> boundary_flags() const;
};

enum class FacetTag { FreeSurface, Wall, Bottom };

struct BoundaryFacet {
  std::array<int, 3> nodes;
  FacetTag tag;
};

/// Tetrahedral mesh of D with the free-surface trace.
struct VolumeMesh {
  std::vector<Eigen::Vector3d> nodes;
  std::vector<std::array<int, 4>> tets;  // positively oriented
  std::vector<int> surface_trace;        // surface node -> volume node on z = 0
  std::vector<BoundaryFacet> facets;
  std::vector<double> volumes;

  int node_count() const { return static_cast<int>(nodes.size()); }
  double total_volume() const;
};

/// Surface mesh, its extrusion, and the data needed to refine both.
struct ContainerMesh {
  ContainerSpec spec;
  int layers = 1;
  SurfaceMesh surface;
  VolumeMesh volume;
};

/// Structured triangulation of F. Disk: concentric rings of 6i nodes on
/// radius i*a/n. Rectangle: grid cells split along the (0,0)-(1,1) diagonal.
SurfaceMesh mesh_surface(const ContainerSpec& spec);

/// Extrude F down to z = -depth in `layers` prism layers, each prism split
/// into three tets. Quad side faces are cut along the diagonal through their
/// lowest-numbered vertex, which keeps neighbouring prisms conforming.
VolumeMesh extrude(const SurfaceMesh& surface, double depth, int layers);

ContainerMesh build_mesh(const ContainerSpec& spec, int layers);

/// Uniform 1-to-4 split of every surface triangle (new disk boundary nodes are
/// projected back onto the circle) followed by re-extrusion with twice as
/// many layers.
ContainerMesh refine(const ContainerMesh& mesh);
SurfaceMesh refine_surface(const SurfaceMesh& surface, const ContainerSpec& spec);

/// Edges used by exactly one triangle. Throws DegenerateMesh when an edge is
/// shared by more than two triangles.
std::vector<std::array<int, 2>> find_boundary_edges(const std::vector<std::array<int, 3>>& triangles);

/// FNV-1a hash of the node coordinate bytes.
std::uint64_t fingerprint(const VolumeMesh& mesh);

}  // namespace slosh
