#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gem/mesh.hpp"

namespace gem {

/// Reads the OBJ subset `v x y z` / `f i j k` (1-based, triangles only).
/// Blank lines and `#` comments are skipped; any other record raises a
/// ParseError carrying its line number.
Mesh read_obj(std::istream& in);
Mesh read_obj(const std::filesystem::path& path);

/// Writes vertices with 17 significant digits so read_obj round-trips exactly.
void write_obj(std::ostream& out, const Mesh& mesh);
void write_obj(const std::filesystem::path& path, const Mesh& mesh);

}  // namespace gem
