#include "gem/network.hpp"

#include <span>

#include "gem/checksum.hpp"
#include "gem/error.hpp"
#include "gem/random.hpp"

namespace gem {

ConvLayer conv_layer(const ReprType& type_in, const ReprType& type_out, std::uint64_t seed) {
  return {init_weights(type_in, type_out, seed), seed};
}

ConvLayer identity_conv_layer(const ReprType& type) {
  if (!type.all_scalar()) throw InvalidArgument("identity conv layer is defined for scalar types only");
  const ParamCount count = param_count(type, type);
  LayerWeights w{type, type, Vector::Zero(count.n_self), Vector::Zero(count.n_neigh)};
  // Self weights are ordered (output, input); the diagonal is every (c+1)-th.
  const int c = static_cast<int>(type.size());
  for (int j = 0; j < c; ++j) w.w_self[j * c + j] = 1.0;
  return {w, std::nullopt};
}

ReprType Network::output_type() const {
  ReprType current = input_type;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const std::string where = "layer " + std::to_string(k) + ": ";
    if (const auto* conv = std::get_if<ConvLayer>(&layers[k])) {
      try {
        conv->weights.check();
      } catch (const InvalidArgument& e) {
        throw InvalidArgument(where + e.what());
      }
      if (!(conv->weights.type_in == current))
        throw InvalidArgument(where + "conv expects " + conv->weights.type_in.to_string() + " but receives " +
                              current.to_string());
      current = conv->weights.type_out;
    } else {
      const auto& nl = std::get<RegularNonlinSpec>(layers[k]);
      try {
        nl.check();
      } catch (const InvalidArgument& e) {
        throw InvalidArgument(where + e.what());
      }
      if (!is_regular_type(current, nl.band_limit))
        throw InvalidArgument(where + "regular nonlinearity with band limit " + std::to_string(nl.band_limit) +
                              " cannot act on " + current.to_string());
    }
  }
  return current;
}

Network Network::reseeded(std::uint64_t draw) const {
  Network out = *this;
  for (Layer& layer : out.layers)
    if (auto* conv = std::get_if<ConvLayer>(&layer); conv && conv->seed) {
      const std::uint64_t s = derive_seed(*conv->seed, draw);
      *conv = conv_layer(conv->weights.type_in, conv->weights.type_out, s);
    }
  return out;
}

Network regular_network(int depth, int channels, const RegularNonlinSpec& nonlinearity, std::uint64_t seed) {
  if (depth < 2) throw InvalidArgument("regular_network: depth must be at least 2");
  if (channels < 1) throw InvalidArgument("regular_network: at least one channel required");
  nonlinearity.check();
  const ReprType scalars = ReprType::scalars(channels);
  const ReprType regular = ReprType::regular(channels, nonlinearity.band_limit);
  Network net{scalars, {}};
  int index = 0;
  net.layers.emplace_back(conv_layer(scalars, regular, derive_seed(seed, index++)));
  for (int k = 0; k < depth - 2; ++k) {
    net.layers.emplace_back(nonlinearity);
    net.layers.emplace_back(conv_layer(regular, regular, derive_seed(seed, index++)));
  }
  net.layers.emplace_back(nonlinearity);
  net.layers.emplace_back(conv_layer(regular, scalars, derive_seed(seed, index++)));
  return net;
}

std::uint64_t field_checksum(const FeatureField& field) {
  return fnv1a_doubles(std::span<const double>(field.values.data(), static_cast<std::size_t>(field.values.size())));
}

ForwardTrace sequential(const Network& network, const GaugeAtlas& atlas, const FeatureField& input, int threads) {
  network.check();
  if (!(input.type == network.input_type))
    throw InvalidArgument("input field type " + input.type.to_string() + " does not match network input " +
                          network.input_type.to_string());
  ForwardTrace trace{input, {}};
  for (const Layer& layer : network.layers) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer))
      trace.output = gem_conv(atlas, conv->weights, trace.output, threads);
    else
      trace.output = regular_nonlinearity(std::get<RegularNonlinSpec>(layer), trace.output, threads);
    trace.checksums.push_back(field_checksum(trace.output));
  }
  return trace;
}

}  // namespace gem
