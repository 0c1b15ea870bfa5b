#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gem/mesh.hpp"

namespace gem {

using Frame = Eigen::Matrix<double, 3, 2>;

/// Per-neighbour angles at a vertex p. `theta` is the polar angle of
/// log_p(q) in p's frame; `transport` is g_{q->p}, the angle by which
/// coefficients expressed in q's frame rotate when carried to p's frame.
/// Both lie in [0, 2pi).
struct NeighborAngles {
  VertexId id;
  double theta;
  double transport;
};

struct VertexGauge {
  Vec3 normal;
  /// Neighbour defining the frame's first axis. Empty after a gauge change.
  std::optional<VertexId> reference;
  Vec3 e1;
  Vec3 e2;
  /// Ascending by neighbour id; every reduction over neighbours uses this order.
  std::vector<NeighborAngles> neighbors;
};

/// Immutable precomputed gauge data for a mesh. The id is a content hash;
/// feature fields carry it to record which gauge they are expressed in.
class GaugeAtlas {
 public:
  GaugeAtlas() = default;
  explicit GaugeAtlas(std::vector<VertexGauge> vertices);

  std::size_t size() const { return vertices_.size(); }
  std::uint64_t id() const { return id_; }
  const VertexGauge& operator[](VertexId p) const { return vertices_[static_cast<std::size_t>(p)]; }
  const std::vector<VertexGauge>& vertices() const { return vertices_; }

  Frame frame(VertexId p) const;
  /// Position of q in p's neighbour list, if q is a neighbour.
  std::optional<std::size_t> slot(VertexId p, VertexId q) const;
  double theta(VertexId p, VertexId q) const;
  double transport(VertexId p, VertexId q) const;
  std::vector<std::vector<VertexId>> adjacency() const;

 private:
  std::vector<VertexGauge> vertices_;
  std::uint64_t id_ = 0;
};

/// How the reference neighbour of every vertex is chosen.
struct ReferencePolicy {
  enum class Kind { kSmallestId, kSeededRandom, kExplicit };
  Kind kind = Kind::kSmallestId;
  std::uint64_t seed = 0;
  std::vector<VertexId> references;

  static ReferencePolicy smallest_id() { return {}; }
  static ReferencePolicy seeded_random(std::uint64_t seed) {
    return {Kind::kSeededRandom, seed, {}};
  }
  static ReferencePolicy explicit_references(std::vector<VertexId> refs) {
    return {Kind::kExplicit, 0, std::move(refs)};
  }
};

/// Area-weighted average of incident face normals, normalised.
/// Throws DegenerateGeometry for isolated vertices and cancelling fans.
Vec3 vertex_normal(const Mesh& mesh, VertexId p);
std::vector<Vec3> vertex_normals(const Mesh& mesh, int threads = 1);

/// Projects q - p onto the plane orthogonal to `normal` and rescales it to
/// length |q - p|. Throws DegenerateGeometry when the edge is (nearly)
/// parallel to the normal.
Vec3 log_map(const Vec3& normal, const Vec3& p, const Vec3& q);
Vec3 log_map(const Mesh& mesh, const Vec3& normal, VertexId p, VertexId q);

/// Rotation about n_from x n_to taking n_from onto n_to. Throws
/// DegenerateGeometry for antiparallel normals.
Mat3 align_normals(const Vec3& n_from, const Vec3& n_to);

/// g_{q->p}: rotate q's tangent plane onto p's, then read the polar angle of
/// q's first frame axis in p's frame. Result in [0, 2pi).
double transporter(const Vec3& normal_p, const Vec3& e1_p, const Vec3& e2_p,
                   const Vec3& normal_q, const Vec3& e1_q);
/// Recomputes g_{q->p} from the normals and frames stored in an atlas.
double transporter(const GaugeAtlas& atlas, VertexId p, VertexId q);

/// Completes an atlas from given normals and frames: neighbour angles and
/// transporters are recomputed from scratch. `references` may be empty.
GaugeAtlas atlas_from_frames(const Mesh& mesh, const std::vector<Vec3>& normals,
                             const std::vector<Vec3>& e1, const std::vector<Vec3>& e2,
                             const std::vector<std::optional<VertexId>>& references = {},
                             int threads = 1);

/// Normals, reference frames, neighbour angles and transporters for every
/// vertex. Requires a manifold mesh (boundaries allowed).
GaugeAtlas build_atlas(const Mesh& mesh, const ReferencePolicy& policy = ReferencePolicy::smallest_id(),
                       int threads = 1);

/// Per-vertex rotation of the reference frame.
struct GaugeChange {
  std::vector<double> angles;
};

GaugeChange random_gauge_change(std::size_t vertex_count, Rng& rng);

/// Frames rotate by +g_p in their tangent planes; theta -> theta - g_p;
/// g_{q->p} -> g_{q->p} - g_p + g_q. Reference neighbours are cleared.
GaugeAtlas apply_gauge_change(const GaugeAtlas& atlas, const GaugeChange& change);

}  // namespace gem
