#pragma once

#include <cstdint>
#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gem/geometry.hpp"
#include "gem/layers.hpp"
#include "gem/mesh.hpp"
#include "gem/network.hpp"

namespace gem {

/// Orientation-preserving vertex bijection together with the frame offset
/// at every source vertex: g_p is the angle, in the frame of perm[p], of the
/// image of p's reference neighbour.
struct IsometryMap {
  std::vector<VertexId> perm;
  std::vector<double> offsets;

  bool is_identity() const;
};

/// a after b, as permutations.
std::vector<VertexId> compose(const std::vector<VertexId>& a, const std::vector<VertexId>& b);

/// Offsets of a combinatorial map measured on `atlas`, which must carry
/// reference neighbours. Works for meshes where the map is not metric.
IsometryMap isometry_from_permutation(const GaugeAtlas& atlas, std::vector<VertexId> perm);

/// Rotations about the centroid mapping the vertex set onto itself within
/// `tolerance` and the face set onto itself. Found by aligning one vertex
/// and one of its neighbours with every candidate pair and verifying.
std::vector<IsometryMap> find_rigid_isometries(const Mesh& mesh, const GaugeAtlas& atlas, double tolerance = 1e-6);

/// All 60 rotations of an icosahedral mesh. Throws InvalidArgument when the
/// search finds a different number.
std::vector<IsometryMap> icosahedron_isometries(const Mesh& mesh, const GaugeAtlas& atlas);

/// (phi_* f) at perm[p] = rho(g_p) f_p.
FeatureField pushforward(const FeatureField& field, const IsometryMap& iso);

/// Anything mapping a field on a mesh to a field on the same mesh.
class Model {
 public:
  virtual ~Model() = default;
  virtual ReprType input_type() const = 0;
  virtual ReprType output_type() const = 0;
  virtual FeatureField forward(const Mesh& mesh, const GaugeAtlas& atlas, const FeatureField& input) const = 0;
};

/// Produces the model for one draw; the argument is the draw's seed.
using ModelFactory = std::function<std::unique_ptr<Model>(std::uint64_t)>;

class NetworkModel : public Model {
 public:
  explicit NetworkModel(Network network, int threads = 1);
  ReprType input_type() const override { return network_.input_type; }
  ReprType output_type() const override { return output_type_; }
  FeatureField forward(const Mesh& mesh, const GaugeAtlas& atlas, const FeatureField& input) const override;

 private:
  Network network_;
  ReprType output_type_;
  int threads_;
};

/// Redraws every seeded conv layer of `network` per draw.
ModelFactory network_factory(Network network, int threads = 1);

class IdentityModel : public Model {
 public:
  explicit IdentityModel(ReprType type) : type_(std::move(type)) {}
  ReprType input_type() const override { return type_; }
  ReprType output_type() const override { return type_; }
  FeatureField forward(const Mesh& mesh, const GaugeAtlas& atlas, const FeatureField& input) const override;

 private:
  ReprType type_;
};

/// Adds the vertex z-coordinate to every scalar channel. Gauge invariant but
/// not invariant to ambient motions.
class ZCoordinateModel : public Model {
 public:
  explicit ZCoordinateModel(int channels) : type_(ReprType::scalars(channels)) {}
  ReprType input_type() const override { return type_; }
  ReprType output_type() const override { return type_; }
  FeatureField forward(const Mesh& mesh, const GaugeAtlas& atlas, const FeatureField& input) const override;

 private:
  ReprType type_;
};

/// Scalar-to-scalar neighbour kernel a + b cos(theta) + c sin(theta) per
/// channel. A scalar kernel must not depend on theta, so this violates the
/// kernel constraint.
class AnisotropicScalarModel : public Model {
 public:
  AnisotropicScalarModel(int channels, std::uint64_t seed);
  ReprType input_type() const override { return type_; }
  ReprType output_type() const override { return type_; }
  FeatureField forward(const Mesh& mesh, const GaugeAtlas& atlas, const FeatureField& input) const override;

 private:
  ReprType type_;
  std::vector<std::array<double, 3>> coefficients_;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  double error = 0.0;
};

struct AuditReport {
  std::string metric;
  double error = 0.0;
  std::map<std::string, std::size_t> counts;
  std::uint64_t seed = 0;
  /// One entry per model draw.
  std::vector<TrialRecord> trials;
};

/// sqrt(mean_{draw,p,c} Var_g out / Var_{draw,p,c} out_{g0}), g over random
/// per-vertex gauge changes, g0 the atlas built from `mesh` with smallest-id
/// references. Throws DegenerateGeometry when the denominator vanishes.
AuditReport gauge_equivariance_error(const ModelFactory& factory, const Mesh& mesh, std::size_t n_models,
                                     std::size_t n_gauges, std::uint64_t seed, int threads = 1);

/// Same ratio with g ranging over random rigid motions of the embedding;
/// every transformed atlas keeps the original reference neighbours.
AuditReport ambient_invariance_error(const ModelFactory& factory, const Mesh& mesh, std::size_t n_models,
                                     std::size_t n_transforms, std::uint64_t seed, int threads = 1);

/// sqrt(mean (Phi(phi_* f) - phi_* Phi(f))^2 / Var Phi(f)), averaged over
/// the supplied maps, whose offsets must refer to build_atlas(mesh).
AuditReport isometry_equivariance_error(const ModelFactory& factory, const Mesh& mesh,
                                        const std::vector<IsometryMap>& isometries, std::size_t n_models,
                                        std::uint64_t seed, int threads = 1);

struct NonlinearityError {
  double measured = 0.0;
  double bound = 0.0;
};

/// Rotates the input of a regular nonlinearity by delta sample spacings
/// before (FT) and after (TF) the nonlinearity and compares the first
/// output_band modes in the 1-norm. The bound is the analytic one.
NonlinearityError nonlinearity_error_and_bound(const Vector& modes, const RegularNonlinSpec& spec, double delta,
                                               int output_band);

struct NonlinearitySweepRow {
  int samples = 0;
  double mean_measured = 0.0;
  double median_measured = 0.0;
  double mean_bound = 0.0;
  double max_ratio = 0.0;
  std::size_t violations = 0;
};

/// The same `trials` random (x, delta) pairs, x ~ N(0, 1) per mode, are used
/// for every sample count.
std::vector<NonlinearitySweepRow> nonlinearity_sweep(const std::vector<int>& sample_counts, std::size_t trials,
                                                     int band_limit, int output_band, Pointwise pointwise,
                                                     std::uint64_t seed, int threads = 1);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gem
