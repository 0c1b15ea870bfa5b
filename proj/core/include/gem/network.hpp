#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gem/algebra.hpp"
#include "gem/geometry.hpp"
#include "gem/layers.hpp"

namespace gem {

/// A gem_conv layer. When `seed` is set the weights were drawn by
/// init_weights from it and can be redrawn by Network::reseeded.
struct ConvLayer {
  LayerWeights weights;
  std::optional<std::uint64_t> seed;
};

ConvLayer conv_layer(const ReprType& type_in, const ReprType& type_out, std::uint64_t seed);

/// Weights that make a [0]^c -> [0]^c layer the identity map.
ConvLayer identity_conv_layer(const ReprType& type);

using Layer = std::variant<ConvLayer, RegularNonlinSpec>;

struct Network {
  ReprType input_type;
  std::vector<Layer> layers;

  /// Walks the type chain. Throws InvalidArgument naming the index of the
  /// first layer whose input does not match.
  ReprType output_type() const;
  void check() const { output_type(); }

  /// Copy whose seeded conv layers are redrawn from derive_seed(layer seed, draw).
  Network reseeded(std::uint64_t draw) const;
};

/// depth conv layers: scalars(channels) -> regular(channels, b), then
/// [nonlinearity, conv regular -> regular] repeated depth - 2 times, then a
/// nonlinearity and conv regular -> scalars(channels). depth >= 2.
Network regular_network(int depth, int channels, const RegularNonlinSpec& nonlinearity, std::uint64_t seed);

/// Order-sensitive FNV-1a hash of the field values.
std::uint64_t field_checksum(const FeatureField& field);

struct ForwardTrace {
  FeatureField output;
  /// One checksum per layer output, in layer order.
  std::vector<std::uint64_t> checksums;
};

ForwardTrace sequential(const Network& network, const GaugeAtlas& atlas, const FeatureField& input,
                        int threads = 1);

}  // namespace gem
