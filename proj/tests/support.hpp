#pragma once

#include <cmath>
#include <cstdint>

#include <gem/geometry.hpp>
#include <gem/layers.hpp>
#include <gem/mesh.hpp>
#include <gem/random.hpp>

namespace gem::testing {

inline FeatureField random_field(const ReprType& type, const GaugeAtlas& atlas, Rng& rng) {
  FeatureField f{type, FieldValues(static_cast<Eigen::Index>(atlas.size()), type.dim()), atlas.id()};
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = rng.normal();
  return f;
}

inline double max_abs_diff(const FieldValues& a, const FieldValues& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Displaced grid of the given roughness (3 - smoothing sigma).
inline Mesh rough_grid(int rows, int cols, double roughness, std::uint64_t seed) {
  GridOptions o;
  o.rows = rows;
  o.cols = cols;
  o.displace = true;
  o.smoothing_sigma = 3.0 - roughness;
  o.seed = seed;
  return grid_mesh(o);
}

inline ReprType random_type(Rng& rng, int max_size, int max_order) {
  std::vector<int> orders(1 + rng.below(static_cast<std::uint64_t>(max_size)));
  for (int& o : orders) o = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_order) + 1));
  return ReprType(orders);
}

}  // namespace gem::testing
