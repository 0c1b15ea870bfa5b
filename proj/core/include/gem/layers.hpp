#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gem/algebra.hpp"
#include "gem/geometry.hpp"

namespace gem {

using FieldValues = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-vertex coefficients of a declared type, expressed in the gauge of the
/// atlas whose id is recorded. Row p holds the coefficients at vertex p.
struct FeatureField {
  ReprType type;
  FieldValues values;
  std::uint64_t atlas_id = 0;

  std::size_t vertex_count() const { return static_cast<std::size_t>(values.rows()); }
  /// Throws InvalidArgument when the column count differs from dim(type).
  void check() const;
};

/// Expresses a field in the gauge obtained by apply_gauge_change: every
/// coefficient vector f_p becomes rho(-g_p) f_p. The result is bound to
/// `new_atlas_id`.
FeatureField transform_field(const FeatureField& field, const GaugeChange& change, std::uint64_t new_atlas_id);

/// f'_p = K_self f_p + sum_{q in N_p} K_neigh(theta_pq) rho_in(g_{q->p}) f_q,
/// neighbours reduced in the atlas's canonical order.
FeatureField gem_conv(const GaugeAtlas& atlas, const LayerWeights& weights, const FeatureField& field,
                      int threads = 1);

/// Isotropic baseline: f'_p = K_self f_p + sum_q K_neigh f_q. Output is
/// typed as plain scalar channels.
FeatureField graph_conv(const Matrix& k_self, const Matrix& k_neigh, const FeatureField& field,
                        const std::vector<std::vector<VertexId>>& adjacency);

/// Pointwise functions admitted by the regular nonlinearity; each has a
/// known Lipschitz constant.
enum class Pointwise { kRelu, kIdentity, kTanh };

double apply_pointwise(Pointwise f, double x);
double lipschitz_constant(Pointwise f);
std::string to_string(Pointwise f);
Pointwise pointwise_from_string(const std::string& name);

struct DftMatrices {
  Matrix synthesis;  // N x (2b+1): modes -> samples at angles 2 pi t / N
  Matrix analysis;   // (2b+1) x N: samples -> modes
};

/// Mode layout is [x_0, a_1, b_1, ..., a_b, b_b], matching the coefficient
/// layout of rho_0 + rho_1 + ... + rho_b. Throws InvalidArgument when
/// samples < 2 * band_limit + 1.
DftMatrices dft_matrices(int band_limit, int samples);

struct RegularNonlinSpec {
  int band_limit = 0;
  int samples = 1;
  Pointwise pointwise = Pointwise::kRelu;

  void check() const;
};

/// True when `type` is one or more copies of [0, 1, ..., band_limit].
bool is_regular_type(const ReprType& type, int band_limit);

/// Synthesises N samples per copy, applies the pointwise function and
/// analyses back. The type is unchanged.
class RegularNonlinearity {
 public:
  explicit RegularNonlinearity(const RegularNonlinSpec& spec);

  const RegularNonlinSpec& spec() const { return spec_; }
  const DftMatrices& dft() const { return dft_; }

  /// Single band-limited mode vector of length 2b+1.
  Vector apply_modes(const Vector& modes) const;
  FeatureField operator()(const FeatureField& field, int threads = 1) const;

 private:
  RegularNonlinSpec spec_;
  DftMatrices dft_;
};

FeatureField regular_nonlinearity(const RegularNonlinSpec& spec, const FeatureField& field, int threads = 1);

}  // namespace gem
