#include "gem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gem/checksum.hpp"
#include "gem/error.hpp"
#include "gem/numeric.hpp"
#include "gem/parallel.hpp"

namespace gem {

GaugeAtlas::GaugeAtlas(std::vector<VertexGauge> vertices) : vertices_(std::move(vertices)) {
  std::vector<double> flat;
  for (const VertexGauge& v : vertices_) {
    flat.insert(flat.end(), {v.normal.x(), v.normal.y(), v.normal.z(), v.e1.x(), v.e1.y(), v.e1.z(),
                             v.e2.x(), v.e2.y(), v.e2.z(),
                             v.reference ? static_cast<double>(*v.reference) : -1.0,
                             static_cast<double>(v.neighbors.size())});
    for (const NeighborAngles& nb : v.neighbors)
      flat.insert(flat.end(), {static_cast<double>(nb.id), nb.theta, nb.transport});
  }
  id_ = fnv1a_doubles(flat);
}

Frame GaugeAtlas::frame(VertexId p) const {
  Frame f;
  f.col(0) = (*this)[p].e1;
  f.col(1) = (*this)[p].e2;
  return f;
}

std::optional<std::size_t> GaugeAtlas::slot(VertexId p, VertexId q) const {
  const auto& nbrs = (*this)[p].neighbors;
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), q,
                                   [](const NeighborAngles& a, VertexId id) { return a.id < id; });
  if (it == nbrs.end() || it->id != q) return std::nullopt;
  return static_cast<std::size_t>(it - nbrs.begin());
}

double GaugeAtlas::theta(VertexId p, VertexId q) const {
  const auto s = slot(p, q);
  if (!s) throw InvalidArgument("vertex " + std::to_string(q) + " is not a neighbour of " + std::to_string(p));
  return (*this)[p].neighbors[*s].theta;
}

double GaugeAtlas::transport(VertexId p, VertexId q) const {
  const auto s = slot(p, q);
  if (!s) throw InvalidArgument("vertex " + std::to_string(q) + " is not a neighbour of " + std::to_string(p));
  return (*this)[p].neighbors[*s].transport;
}

std::vector<std::vector<VertexId>> GaugeAtlas::adjacency() const {
  std::vector<std::vector<VertexId>> out(size());
  for (std::size_t p = 0; p < size(); ++p)
    for (const auto& nb : vertices_[p].neighbors) out[p].push_back(nb.id);
  return out;
}

Vec3 vertex_normal(const Mesh& mesh, VertexId p) {
  Vec3 sum = Vec3::Zero();
  bool any = false;
  for (const Face& f : mesh.faces) {
    if (f[0] != p && f[1] != p && f[2] != p) continue;
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    // |cross| is twice the face area, so the sum is area weighted.
    sum += (b - a).cross(c - a);
    any = true;
  }
  if (!any) throw DegenerateGeometry("vertex " + std::to_string(p) + " has no incident face");
  const double norm = sum.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw DegenerateGeometry("vertex " + std::to_string(p) + ": incident face normals cancel");
  return sum / norm;
}

std::vector<Vec3> vertex_normals(const Mesh& mesh, int threads) {
  const auto faces_of = vertex_faces(mesh);
  std::vector<Vec3> normals(mesh.vertices.size());
  parallel_for(mesh.vertices.size(), threads, [&](std::size_t p) {
    if (faces_of[p].empty())
      throw DegenerateGeometry("vertex " + std::to_string(p) + " has no incident face");
    Vec3 sum = Vec3::Zero();
    for (int fi : faces_of[p]) {
      const Face& f = mesh.faces[fi];
      const Vec3& a = mesh.vertices[f[0]];
      sum += (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a);
    }
    const double norm = sum.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw DegenerateGeometry("vertex " + std::to_string(p) + ": incident face normals cancel");
    normals[p] = sum / norm;
  });
  return normals;
}

Vec3 log_map(const Vec3& normal, const Vec3& p, const Vec3& q) {
  const Vec3 edge = q - p;
  const Vec3 projected = edge - normal * normal.dot(edge);
  const double length = edge.norm();
  const double plen = projected.norm();
  if (!(plen >= tol::kDegenerateEdge * length) || plen == 0.0)
    throw DegenerateGeometry("edge is parallel to the vertex normal");
  return projected * (length / plen);
}

Vec3 log_map(const Mesh& mesh, const Vec3& normal, VertexId p, VertexId q) {
  try {
    return log_map(normal, mesh.vertices[p], mesh.vertices[q]);
  } catch (const DegenerateGeometry&) {
    throw DegenerateGeometry("degenerate edge " + std::to_string(p) + "-" + std::to_string(q) +
                             ": parallel to the normal at " + std::to_string(p));
  }
}

Mat3 align_normals(const Vec3& n_from, const Vec3& n_to) {
  const double c = n_from.dot(n_to);
  if (c < -1.0 + tol::kAntiparallel) throw DegenerateGeometry("antiparallel normals: transport axis undefined");
  const Vec3 v = n_from.cross(n_to);
  Mat3 vx;
  vx << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return Mat3::Identity() + vx + vx * vx / (1.0 + c);
}

double transporter(const Vec3& normal_p, const Vec3& e1_p, const Vec3& e2_p, const Vec3& normal_q,
                   const Vec3& e1_q) {
  const Vec3 moved = align_normals(normal_q, normal_p) * e1_q;
  return wrap_angle(std::atan2(moved.dot(e2_p), moved.dot(e1_p)));
}

double transporter(const GaugeAtlas& atlas, VertexId p, VertexId q) {
  const VertexGauge& gp = atlas[p];
  const VertexGauge& gq = atlas[q];
  try {
    return transporter(gp.normal, gp.e1, gp.e2, gq.normal, gq.e1);
  } catch (const DegenerateGeometry&) {
    throw DegenerateGeometry("edge " + std::to_string(q) + "->" + std::to_string(p) +
                             ": antiparallel normals");
  }
}

GaugeAtlas atlas_from_frames(const Mesh& mesh, const std::vector<Vec3>& normals, const std::vector<Vec3>& e1,
                             const std::vector<Vec3>& e2,
                             const std::vector<std::optional<VertexId>>& references, int threads) {
  const std::size_t n = mesh.vertices.size();
  if (normals.size() != n || e1.size() != n || e2.size() != n || (!references.empty() && references.size() != n))
    throw InvalidArgument("atlas_from_frames: per-vertex arrays must match the vertex count");
  const auto nbrs = vertex_neighbors(mesh);
  std::vector<VertexGauge> gauges(n);
  parallel_for(n, threads, [&](std::size_t pi) {
    const VertexId p = static_cast<VertexId>(pi);
    VertexGauge& g = gauges[pi];
    g.normal = normals[pi];
    g.e1 = e1[pi];
    g.e2 = e2[pi];
    g.reference = references.empty() ? std::nullopt : references[pi];
    g.neighbors.reserve(nbrs[pi].size());
    for (VertexId q : nbrs[pi]) {
      double theta = 0.0;
      if (!(g.reference && *g.reference == q)) {
        const Vec3 l = log_map(mesh, g.normal, p, q);
        theta = wrap_angle(std::atan2(l.dot(g.e2), l.dot(g.e1)));
      }
      double transport = 0.0;
      try {
        transport = transporter(g.normal, g.e1, g.e2, normals[q], e1[q]);
      } catch (const DegenerateGeometry&) {
        throw DegenerateGeometry("edge " + std::to_string(q) + "->" + std::to_string(p) +
                                 ": antiparallel normals");
      }
      g.neighbors.push_back({q, theta, transport});
    }
  });
  return GaugeAtlas(std::move(gauges));
}

GaugeAtlas build_atlas(const Mesh& mesh, const ReferencePolicy& policy, int threads) {
  const ValidationReport report = validate(mesh);
  if (!report.is_manifold) {
    const Defect& d = report.defects.front();
    std::string ids;
    for (VertexId v : d.element) ids += (ids.empty() ? "" : ",") + std::to_string(v);
    throw InvalidArgument("build_atlas: mesh is not manifold (" + to_string(d.kind) + " at " + ids + ")");
  }
  const std::size_t n = mesh.vertices.size();
  if (policy.kind == ReferencePolicy::Kind::kExplicit && policy.references.size() != n)
    throw InvalidArgument("build_atlas: explicit reference list must have one entry per vertex");

  const auto nbrs = vertex_neighbors(mesh);
  const std::vector<Vec3> normals = vertex_normals(mesh, threads);
  std::vector<Vec3> e1(n), e2(n);
  std::vector<std::optional<VertexId>> refs(n);
  parallel_for(n, threads, [&](std::size_t p) {
    VertexId q0 = nbrs[p].front();
    switch (policy.kind) {
      case ReferencePolicy::Kind::kSmallestId:
        break;
      case ReferencePolicy::Kind::kSeededRandom: {
        Rng rng(derive_seed(policy.seed, p));
        q0 = nbrs[p][rng.below(nbrs[p].size())];
        break;
      }
      case ReferencePolicy::Kind::kExplicit:
        q0 = policy.references[p];
        if (!std::binary_search(nbrs[p].begin(), nbrs[p].end(), q0))
          throw InvalidArgument("build_atlas: reference " + std::to_string(q0) + " is not a neighbour of " +
                                std::to_string(p));
        break;
    }
    const Vec3 l = log_map(mesh, normals[p], static_cast<VertexId>(p), q0);
    e1[p] = l.normalized();
    e2[p] = normals[p].cross(e1[p]);
    refs[p] = q0;
  });
  return atlas_from_frames(mesh, normals, e1, e2, refs, threads);
}

GaugeChange random_gauge_change(std::size_t vertex_count, Rng& rng) {
  GaugeChange change;
  change.angles.resize(vertex_count);
  for (double& a : change.angles) a = rng.uniform(0.0, kTwoPi);
  return change;
}

GaugeAtlas apply_gauge_change(const GaugeAtlas& atlas, const GaugeChange& change) {
  if (change.angles.size() != atlas.size())
    throw InvalidArgument("apply_gauge_change: one angle per vertex required");
  std::vector<VertexGauge> out = atlas.vertices();
  for (std::size_t p = 0; p < out.size(); ++p) {
    VertexGauge& g = out[p];
    const double gp = change.angles[p];
    const double c = std::cos(gp), s = std::sin(gp);
    const Vec3 e1 = c * g.e1 + s * g.e2;
    const Vec3 e2 = -s * g.e1 + c * g.e2;
    g.e1 = e1;
    g.e2 = e2;
    g.reference.reset();
    for (NeighborAngles& nb : g.neighbors) {
      nb.theta = wrap_angle(nb.theta - gp);
      nb.transport = wrap_angle(nb.transport - gp + change.angles[static_cast<std::size_t>(nb.id)]);
    }
  }
  return GaugeAtlas(std::move(out));
}

}  // namespace gem
