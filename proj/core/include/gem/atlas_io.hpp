#pragma once

#include <filesystem>
#include <string>

#include "gem/geometry.hpp"

namespace gem {

/// JSON document describing an atlas:
///
///   { "format": "gem-atlas", "version": 1, "atlas_id": "<16 hex>",
///     "vertices": [ { "id": p, "normal": [x,y,z], "reference": q0 | null,
///                     "frame": [[e1x,e1y,e1z],[e2x,e2y,e2z]],
///                     "neighbors": [ {"id": q, "theta": t, "transport": g}, ... ] },
///                   ... ] }
///
/// Doubles are written in shortest round-trip form, so export/import is
/// lossless and the atlas id survives.
std::string atlas_to_json(const GaugeAtlas& atlas, int indent = 1);
GaugeAtlas atlas_from_json(const std::string& text);

void save_atlas(const std::filesystem::path& path, const GaugeAtlas& atlas);
GaugeAtlas load_atlas(const std::filesystem::path& path);

}  // namespace gem
