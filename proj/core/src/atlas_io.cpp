#include "gem/atlas_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gem/checksum.hpp"
#include "gem/error.hpp"

namespace gem {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidArgument("atlas json: expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string atlas_to_json(const GaugeAtlas& atlas, int indent) {
  json doc;
  doc["format"] = "gem-atlas";
  doc["version"] = 1;
  doc["atlas_id"] = to_hex(atlas.id());
  json verts = json::array();
  for (std::size_t p = 0; p < atlas.size(); ++p) {
    const VertexGauge& g = atlas[static_cast<VertexId>(p)];
    json v;
    v["id"] = p;
    v["normal"] = vec_json(g.normal);
    v["reference"] = g.reference ? json(*g.reference) : json(nullptr);
    v["frame"] = json::array({vec_json(g.e1), vec_json(g.e2)});
    json nb = json::array();
    for (const NeighborAngles& a : g.neighbors)
      nb.push_back({{"id", a.id}, {"theta", a.theta}, {"transport", a.transport}});
    v["neighbors"] = std::move(nb);
    verts.push_back(std::move(v));
  }
  doc["vertices"] = std::move(verts);
  return doc.dump(indent) + "\n";
}

GaugeAtlas atlas_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("atlas json: ") + e.what());
  }
  try {
    if (doc.at("format") != "gem-atlas") throw InvalidArgument("atlas json: wrong format tag");
    std::vector<VertexGauge> gauges;
    const json& verts = doc.at("vertices");
    gauges.reserve(verts.size());
    for (std::size_t p = 0; p < verts.size(); ++p) {
      const json& v = verts[p];
      if (v.at("id").get<std::size_t>() != p) throw InvalidArgument("atlas json: vertices must be listed in id order");
      VertexGauge g;
      g.normal = json_vec(v.at("normal"));
      if (!v.at("reference").is_null()) g.reference = v.at("reference").get<VertexId>();
      g.e1 = json_vec(v.at("frame").at(0));
      g.e2 = json_vec(v.at("frame").at(1));
      for (const json& nb : v.at("neighbors"))
        g.neighbors.push_back({nb.at("id").get<VertexId>(), nb.at("theta").get<double>(),
                               nb.at("transport").get<double>()});
      for (std::size_t k = 1; k < g.neighbors.size(); ++k)
        if (g.neighbors[k - 1].id >= g.neighbors[k].id)
          throw InvalidArgument("atlas json: neighbours of vertex " + std::to_string(p) + " must be ascending");
      gauges.push_back(std::move(g));
    }
    for (const VertexGauge& g : gauges)
      for (const NeighborAngles& nb : g.neighbors)
        if (nb.id < 0 || static_cast<std::size_t>(nb.id) >= gauges.size())
          throw InvalidArgument("atlas json: neighbour id out of range");
    GaugeAtlas atlas(std::move(gauges));
    if (doc.contains("atlas_id") && doc["atlas_id"].get<std::string>() != to_hex(atlas.id()))
      throw InvalidArgument("atlas json: atlas_id does not match contents");
    return atlas;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("atlas json: ") + e.what());
  }
}

void save_atlas(const std::filesystem::path& path, const GaugeAtlas& atlas) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write atlas file " + path.string());
  out << atlas_to_json(atlas);
}

GaugeAtlas load_atlas(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open atlas file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return atlas_from_json(ss.str());
}

}  // namespace gem
