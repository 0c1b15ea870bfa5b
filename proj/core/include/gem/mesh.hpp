#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "gem/random.hpp"

namespace gem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VertexId = int;
using Face = std::array<VertexId, 3>;

/// Embedded triangle mesh. Faces are counter-clockwise with respect to the
/// outward normal. The struct itself enforces nothing; run validate() on
/// untrusted input.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
};

/// Undirected edge with first < second.
using Edge = std::pair<VertexId, VertexId>;

/// Sorted list of unique undirected edges.
std::vector<Edge> unique_edges(const Mesh& mesh);

/// One-ring neighbours of every vertex, ascending by id.
std::vector<std::vector<VertexId>> vertex_neighbors(const Mesh& mesh);

/// Indices of faces incident to every vertex, ascending.
std::vector<std::vector<int>> vertex_faces(const Mesh& mesh);

double mean_edge_length(const Mesh& mesh);

enum class DefectKind {
  kIndexOutOfRange,   // element = {face}
  kDegenerateFace,    // element = {face}
  kNonManifoldEdge,   // element = {a, b}: edge with more than two faces
  kWinding,           // element = {a, b}: both faces traverse the edge the same way
  kNonManifoldVertex, // element = {v}: face fan is not a single disk or half-disk
  kIsolatedVertex,    // element = {v}
};

std::string to_string(DefectKind kind);

struct Defect {
  DefectKind kind;
  std::vector<VertexId> element;

  bool operator==(const Defect&) const = default;
};

struct ValidationReport {
  bool is_manifold = true;
  std::size_t boundary_vertex_count = 0;
  std::vector<Defect> defects;
};

/// Reports every violation of the mesh invariants. Boundary edges (one
/// incident face) are counted, not rejected.
ValidationReport validate(const Mesh& mesh);

/// Regular icosahedron: 12 vertices at unit circumradius, 20 CCW faces.
Mesh icosahedron();

struct GridOptions {
  int rows = 28;
  int cols = 28;
  /// When false the grid stays exactly planar (z = 0).
  bool displace = false;
  /// Width of the Gaussian smoothing of the displacement field, in grid
  /// spacings. Roughness is reported as 3 - sigma.
  double smoothing_sigma = 1.0;
  /// Half-width of the uniform displacement before smoothing.
  double amplitude = 1.0;
  std::uint64_t seed = 0;
};

/// Roughness label used for a smoothing width.
inline double roughness_from_sigma(double sigma) { return 3.0 - sigma; }

/// rows x cols vertex grid in the XY-plane, every cell split along the
/// (i, j) -> (i+1, j+1) diagonal, optional smoothed random Z displacement,
/// then rescaled so the mean edge length is 1.
Mesh grid_mesh(const GridOptions& options);

/// Scales each vertex by an independent factor drawn from N(1, stddev^2).
Mesh deform_radial(const Mesh& mesh, double stddev, std::uint64_t seed);

/// v -> R v + t for every vertex. R must be special orthogonal.
Mesh apply_rigid(const Mesh& mesh, const Mat3& rotation, const Vec3& translation);

/// Uniformly distributed rotation (unit quaternion from four normals).
Mat3 random_rotation(Rng& rng);

}  // namespace gem
