#include "gem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Geometry>

#include "gem/error.hpp"
#include "gem/numeric.hpp"
#include "gem/random.hpp"

namespace gem {

namespace {

bool face_in_range(const Face& f, std::size_t n) {
  return std::all_of(f.begin(), f.end(),
                     [n](VertexId v) { return v >= 0 && static_cast<std::size_t>(v) < n; });
}

bool face_degenerate(const Face& f) { return f[0] == f[1] || f[1] == f[2] || f[2] == f[0]; }

bool face_usable(const Face& f, std::size_t n) { return face_in_range(f, n) && !face_degenerate(f); }

Edge make_edge(VertexId a, VertexId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

}  // namespace

std::string to_string(DefectKind kind) {
  switch (kind) {
    case DefectKind::kIndexOutOfRange: return "index_out_of_range";
    case DefectKind::kDegenerateFace: return "degenerate_face";
    case DefectKind::kNonManifoldEdge: return "non_manifold_edge";
    case DefectKind::kWinding: return "winding";
    case DefectKind::kNonManifoldVertex: return "non_manifold_vertex";
    case DefectKind::kIsolatedVertex: return "isolated_vertex";
  }
  return "unknown";
}

std::vector<Edge> unique_edges(const Mesh& mesh) {
  std::vector<Edge> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const Face& f : mesh.faces) {
    if (!face_usable(f, mesh.vertices.size())) continue;
    for (int k = 0; k < 3; ++k) edges.push_back(make_edge(f[k], f[(k + 1) % 3]));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::vector<VertexId>> vertex_neighbors(const Mesh& mesh) {
  std::vector<std::vector<VertexId>> nbrs(mesh.vertices.size());
  for (const auto& [a, b] : unique_edges(mesh)) {
    nbrs[a].push_back(b);
    nbrs[b].push_back(a);
  }
  for (auto& list : nbrs) std::sort(list.begin(), list.end());
  return nbrs;
}

std::vector<std::vector<int>> vertex_faces(const Mesh& mesh) {
  std::vector<std::vector<int>> out(mesh.vertices.size());
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    if (!face_usable(f, mesh.vertices.size())) continue;
    for (VertexId v : f) out[v].push_back(static_cast<int>(fi));
  }
  return out;
}

double mean_edge_length(const Mesh& mesh) {
  const auto edges = unique_edges(mesh);
  if (edges.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [a, b] : edges) sum += (mesh.vertices[a] - mesh.vertices[b]).norm();
  return sum / static_cast<double>(edges.size());
}

ValidationReport validate(const Mesh& mesh) {
  ValidationReport report;
  const std::size_t n = mesh.vertices.size();

  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    if (!face_in_range(f, n)) {
      report.defects.push_back({DefectKind::kIndexOutOfRange, {static_cast<VertexId>(fi)}});
    } else if (face_degenerate(f)) {
      report.defects.push_back({DefectKind::kDegenerateFace, {static_cast<VertexId>(fi)}});
    }
  }

  // Edge -> directions in which incident faces traverse it (+1: low -> high).
  std::map<Edge, std::vector<int>> edge_dirs;
  for (const Face& f : mesh.faces) {
    if (!face_usable(f, n)) continue;
    for (int k = 0; k < 3; ++k) {
      const VertexId a = f[k], b = f[(k + 1) % 3];
      edge_dirs[make_edge(a, b)].push_back(a < b ? 1 : -1);
    }
  }
  std::vector<bool> on_boundary(n, false);
  for (const auto& [edge, dirs] : edge_dirs) {
    if (dirs.size() == 1) {
      on_boundary[edge.first] = on_boundary[edge.second] = true;
    } else if (dirs.size() > 2) {
      report.defects.push_back({DefectKind::kNonManifoldEdge, {edge.first, edge.second}});
    } else if (dirs[0] == dirs[1]) {
      report.defects.push_back({DefectKind::kWinding, {edge.first, edge.second}});
    }
  }
  report.boundary_vertex_count =
      static_cast<std::size_t>(std::count(on_boundary.begin(), on_boundary.end(), true));

  // The link of a vertex (opposite edges of its incident faces) must be a
  // single path or a single cycle.
  const auto faces_of = vertex_faces(mesh);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& incident = faces_of[v];
    if (incident.empty()) {
      report.defects.push_back({DefectKind::kIsolatedVertex, {static_cast<VertexId>(v)}});
      continue;
    }
    std::map<VertexId, std::vector<VertexId>> link;
    for (int fi : incident) {
      const Face& f = mesh.faces[fi];
      std::vector<VertexId> others;
      for (VertexId u : f)
        if (u != static_cast<VertexId>(v)) others.push_back(u);
      link[others[0]].push_back(others[1]);
      link[others[1]].push_back(others[0]);
    }
    bool ok = std::all_of(link.begin(), link.end(),
                          [](const auto& kv) { return kv.second.size() <= 2; });
    if (ok) {
      // Connectivity by flood fill from the smallest link vertex.
      std::map<VertexId, bool> seen;
      std::vector<VertexId> stack{link.begin()->first};
      seen[stack.back()] = true;
      while (!stack.empty()) {
        const VertexId u = stack.back();
        stack.pop_back();
        for (VertexId w : link[u])
          if (!seen[w]) {
            seen[w] = true;
            stack.push_back(w);
          }
      }
      ok = seen.size() == link.size() &&
           std::all_of(seen.begin(), seen.end(), [](const auto& kv) { return kv.second; });
    }
    if (!ok) report.defects.push_back({DefectKind::kNonManifoldVertex, {static_cast<VertexId>(v)}});
  }

  report.is_manifold = report.defects.empty();
  return report;
}

Mesh icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh mesh;
  const double s[2] = {-1.0, 1.0};
  for (double a : s)
    for (double b : s) mesh.vertices.emplace_back(0.0, a, b * phi);
  for (double a : s)
    for (double b : s) mesh.vertices.emplace_back(a, b * phi, 0.0);
  for (double a : s)
    for (double b : s) mesh.vertices.emplace_back(b * phi, 0.0, a);
  const double edge = 2.0;
  const double radius = std::sqrt(1.0 + phi * phi);

  const int n = static_cast<int>(mesh.vertices.size());
  auto adjacent = [&](int i, int j) {
    return std::abs((mesh.vertices[i] - mesh.vertices[j]).norm() - edge) < 1e-9;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        if (!adjacent(i, j) || !adjacent(j, k) || !adjacent(i, k)) continue;
        const Vec3& a = mesh.vertices[i];
        const Vec3& b = mesh.vertices[j];
        const Vec3& c = mesh.vertices[k];
        const double orient = (b - a).cross(c - a).dot(a + b + c);
        mesh.faces.push_back(orient > 0.0 ? Face{i, j, k} : Face{i, k, j});
      }
  for (Vec3& v : mesh.vertices) v /= radius;
  return mesh;
}

Mesh grid_mesh(const GridOptions& options) {
  if (options.rows < 2 || options.cols < 2)
    throw InvalidArgument("grid_mesh: rows and cols must be at least 2");
  if (options.displace && !(options.smoothing_sigma > 0.0))
    throw InvalidArgument("grid_mesh: smoothing sigma must be positive when displacement is on");

  const int rows = options.rows;
  const int cols = options.cols;
  auto index = [cols](int i, int j) { return i * cols + j; };

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(rows * cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) mesh.vertices.emplace_back(double(j), double(i), 0.0);
  for (int i = 0; i + 1 < rows; ++i)
    for (int j = 0; j + 1 < cols; ++j) {
      const int v00 = index(i, j), v01 = index(i, j + 1);
      const int v10 = index(i + 1, j), v11 = index(i + 1, j + 1);
      mesh.faces.push_back({v00, v01, v11});
      mesh.faces.push_back({v00, v11, v10});
    }

  if (options.displace) {
    Rng rng(options.seed);
    std::vector<double> raw(mesh.vertices.size());
    for (double& d : raw) d = rng.uniform(-options.amplitude, options.amplitude);

    const double sigma = options.smoothing_sigma;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> weights(static_cast<std::size_t>(radius + 1));
    for (int d = 0; d <= radius; ++d) weights[d] = std::exp(-0.5 * d * d / (sigma * sigma));

    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        double acc = 0.0, norm = 0.0;
        for (int di = -radius; di <= radius; ++di) {
          const int ii = i + di;
          if (ii < 0 || ii >= rows) continue;
          for (int dj = -radius; dj <= radius; ++dj) {
            const int jj = j + dj;
            if (jj < 0 || jj >= cols) continue;
            const double w = weights[std::abs(di)] * weights[std::abs(dj)];
            acc += w * raw[index(ii, jj)];
            norm += w;
          }
        }
        mesh.vertices[index(i, j)].z() = acc / norm;
      }
  }

  const double scale = 1.0 / mean_edge_length(mesh);
  for (Vec3& v : mesh.vertices) v *= scale;
  return mesh;
}

Mesh deform_radial(const Mesh& mesh, double stddev, std::uint64_t seed) {
  if (stddev < 0.0) throw InvalidArgument("deform_radial: stddev must be non-negative");
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    if (mesh.vertices[i].squaredNorm() == 0.0)
      throw InvalidArgument("deform_radial: vertex " + std::to_string(i) + " lies at the origin");
  Mesh out = mesh;
  if (stddev == 0.0) return out;
  Rng rng(seed);
  for (Vec3& v : out.vertices) v *= rng.normal(1.0, stddev);
  return out;
}

Mesh apply_rigid(const Mesh& mesh, const Mat3& rotation, const Vec3& translation) {
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = rotation.determinant();
  if (ortho > tol::kRotation || std::abs(det - 1.0) > tol::kRotation)
    throw InvalidArgument("apply_rigid: rotation is not special orthogonal");
  Mesh out = mesh;
  for (Vec3& v : out.vertices) v = rotation * v + translation;
  return out;
}

Mat3 random_rotation(Rng& rng) {
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  } while (q.norm() < 1e-12);
  return q.normalized().toRotationMatrix();
}

}  // namespace gem
