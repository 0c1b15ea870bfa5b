#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "gem/layers.hpp"
#include "gem/network.hpp"

namespace gem {

/// { "format": "gem-field", "version": 1, "type": [orders...],
///   "atlas_id": "<16 hex>", "values": [[...], ...] }   one row per vertex.
std::string field_to_json(const FeatureField& field, int indent = 1);
/// A document without "atlas_id" is bound to `default_atlas_id`; if that is
/// empty too, InvalidArgument is thrown.
FeatureField field_from_json(const std::string& text, std::optional<std::uint64_t> default_atlas_id = std::nullopt);

/// Header comment with type and atlas id, then "vertex,c0,c1,..." rows.
std::string field_to_csv(const FeatureField& field);

/// Types are written as order arrays; on input {"copies": c, "orders": [...]}
/// is accepted as shorthand for c repetitions of the orders.
///
/// { "format": "gem-network", "version": 1, "input_type": [...],
///   "layers": [ { "kind": "conv", "type_in": [...], "type_out": [...],
///                 "seed": s } | ... "w_self": [...], "w_neigh": [...] },
///               { "kind": "regular_nonlinearity", "band_limit": b,
///                 "samples": n, "pointwise": "relu" } ] }
std::string network_to_json(const Network& network, int indent = 1);
Network network_from_json(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gem
