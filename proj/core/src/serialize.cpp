#include "gem/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gem/checksum.hpp"
#include "gem/error.hpp"

namespace gem {

using nlohmann::json;

namespace {

json type_json(const ReprType& t) { return json(t.orders()); }

ReprType json_type(const json& j) {
  if (j.is_array()) return ReprType(j.get<std::vector<int>>());
  if (j.is_object()) {
    const int copies = j.at("copies").get<int>();
    if (copies < 0) throw InvalidArgument("type: copies must be non-negative");
    const auto orders = j.at("orders").get<std::vector<int>>();
    std::vector<int> all;
    for (int c = 0; c < copies; ++c) all.insert(all.end(), orders.begin(), orders.end());
    return ReprType(std::move(all));
  }
  throw InvalidArgument("type: expected an array of orders or {\"copies\", \"orders\"}");
}

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector json_vector(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::uint64_t parse_hex(const std::string& s) {
  if (s.size() != 16 || s.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw InvalidArgument("atlas_id must be 16 lowercase hex digits");
  return std::stoull(s, nullptr, 16);
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string(what) + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string field_to_json(const FeatureField& field, int indent) {
  field.check();
  json doc;
  doc["format"] = "gem-field";
  doc["version"] = 1;
  doc["type"] = type_json(field.type);
  doc["atlas_id"] = to_hex(field.atlas_id);
  json rows = json::array();
  for (Eigen::Index p = 0; p < field.values.rows(); ++p) {
    json row = json::array();
    for (Eigen::Index c = 0; c < field.values.cols(); ++c) row.push_back(field.values(p, c));
    rows.push_back(std::move(row));
  }
  doc["values"] = std::move(rows);
  return doc.dump(indent) + "\n";
}

FeatureField field_from_json(const std::string& text, std::optional<std::uint64_t> default_atlas_id) {
  const json doc = parse(text, "field json");
  try {
    if (doc.at("format") != "gem-field") throw InvalidArgument("field json: wrong format tag");
    FeatureField f;
    f.type = json_type(doc.at("type"));
    if (doc.contains("atlas_id"))
      f.atlas_id = parse_hex(doc.at("atlas_id").get<std::string>());
    else if (default_atlas_id)
      f.atlas_id = *default_atlas_id;
    else
      throw InvalidArgument("field json: no atlas_id and no atlas to bind to");
    const json& rows = doc.at("values");
    f.values.resize(static_cast<Eigen::Index>(rows.size()), f.type.dim());
    for (std::size_t p = 0; p < rows.size(); ++p) {
      const auto row = rows[p].get<std::vector<double>>();
      if (static_cast<int>(row.size()) != f.type.dim())
        throw InvalidArgument("field json: vertex " + std::to_string(p) + " has " + std::to_string(row.size()) +
                              " values, type " + f.type.to_string() + " needs " + std::to_string(f.type.dim()));
      for (std::size_t c = 0; c < row.size(); ++c)
        f.values(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)) = row[c];
    }
    return f;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("field json: ") + e.what());
  }
}

std::string field_to_csv(const FeatureField& field) {
  field.check();
  std::string out = "# type=" + field.type.to_string() + " atlas_id=" + to_hex(field.atlas_id) + "\nvertex";
  for (Eigen::Index c = 0; c < field.values.cols(); ++c) out += ",c" + std::to_string(c);
  out += "\n";
  for (Eigen::Index p = 0; p < field.values.rows(); ++p) {
    out += std::to_string(p);
    for (Eigen::Index c = 0; c < field.values.cols(); ++c) out += "," + format_double(field.values(p, c));
    out += "\n";
  }
  return out;
}

std::string network_to_json(const Network& network, int indent) {
  json doc;
  doc["format"] = "gem-network";
  doc["version"] = 1;
  doc["input_type"] = type_json(network.input_type);
  json layers = json::array();
  for (const Layer& layer : network.layers) {
    json l;
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      l["kind"] = "conv";
      l["type_in"] = type_json(conv->weights.type_in);
      l["type_out"] = type_json(conv->weights.type_out);
      if (conv->seed) {
        l["seed"] = *conv->seed;
      } else {
        l["w_self"] = vector_json(conv->weights.w_self);
        l["w_neigh"] = vector_json(conv->weights.w_neigh);
      }
    } else {
      const auto& nl = std::get<RegularNonlinSpec>(layer);
      l["kind"] = "regular_nonlinearity";
      l["band_limit"] = nl.band_limit;
      l["samples"] = nl.samples;
      l["pointwise"] = to_string(nl.pointwise);
    }
    layers.push_back(std::move(l));
  }
  doc["layers"] = std::move(layers);
  return doc.dump(indent) + "\n";
}

Network network_from_json(const std::string& text) {
  const json doc = parse(text, "network json");
  Network net;
  std::size_t k = 0;
  try {
    if (doc.at("format") != "gem-network") throw InvalidArgument("network json: wrong format tag");
    net.input_type = json_type(doc.at("input_type"));
    for (const json& l : doc.at("layers")) {
      const std::string kind = l.at("kind").get<std::string>();
      if (kind == "conv") {
        const ReprType in = json_type(l.at("type_in"));
        const ReprType out = json_type(l.at("type_out"));
        if (l.contains("seed")) {
          net.layers.emplace_back(conv_layer(in, out, l.at("seed").get<std::uint64_t>()));
        } else {
          LayerWeights w{in, out, json_vector(l.at("w_self")), json_vector(l.at("w_neigh"))};
          w.check();
          net.layers.emplace_back(ConvLayer{std::move(w), std::nullopt});
        }
      } else if (kind == "regular_nonlinearity") {
        RegularNonlinSpec spec{l.at("band_limit").get<int>(), l.at("samples").get<int>(),
                               pointwise_from_string(l.value("pointwise", std::string("relu")))};
        spec.check();
        net.layers.emplace_back(spec);
      } else {
        throw InvalidArgument("unknown layer kind '" + kind + "'");
      }
      ++k;
    }
  } catch (const json::exception& e) {
    throw InvalidArgument("network json: layer " + std::to_string(k) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument("network json: layer " + std::to_string(k) + ": " + e.what());
  }
  net.check();
  return net;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidArgument("failed writing " + path.string());
}

}  // namespace gem
