#include "gem/obj_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "gem/error.hpp"

namespace gem {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_real(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "malformed coordinate '" + tok + "'");
  }
}

int parse_index(const std::string& tok, std::size_t line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "malformed face index '" + tok + "' (only plain 1-based indices are supported)");
  if (v < 1) throw ParseError(line, "face index must be 1-based and positive, got " + tok);
  return v - 1;
}

}  // namespace

Mesh read_obj(std::istream& in) {
  Mesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens[0] == "v") {
      if (tokens.size() != 4) throw ParseError(line_no, "vertex record needs exactly 3 coordinates");
      mesh.vertices.emplace_back(parse_real(tokens[1], line_no), parse_real(tokens[2], line_no),
                                 parse_real(tokens[3], line_no));
    } else if (tokens[0] == "f") {
      if (tokens.size() != 4) throw ParseError(line_no, "face record must be a triangle");
      mesh.faces.push_back({parse_index(tokens[1], line_no), parse_index(tokens[2], line_no),
                            parse_index(tokens[3], line_no)});
    } else {
      throw ParseError(line_no, "unsupported record '" + tokens[0] + "'");
    }
  }
  return mesh;
}

Mesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open mesh file " + path.string());
  return read_obj(in);
}

void write_obj(std::ostream& out, const Mesh& mesh) {
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const Face& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void write_obj(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write mesh file " + path.string());
  write_obj(out, mesh);
}

}  // namespace gem
