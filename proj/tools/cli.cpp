#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <gem/atlas_io.hpp>
#include <gem/audit.hpp>
#include <gem/checksum.hpp>
#include <gem/error.hpp>
#include <gem/geometry.hpp>
#include <gem/mesh.hpp>
#include <gem/numeric.hpp>
#include <gem/obj_io.hpp>
#include <gem/serialize.hpp>
#include <gem/version.hpp>

namespace gem::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string mesh;
  std::string out;
  std::string net;
  std::string atlas;
  std::string input;
  std::string audit;
  std::string reference = "smallest";
  std::string model = "network";
  std::string type_in;
  std::string type_out;
  std::string pointwise = "relu";
  std::string n_samples;
  std::string depth = "7";
  std::uint64_t seed = 0;
  int threads = 1;
  std::size_t models = 10;
  std::size_t gauges = 16;
  std::size_t transforms = 300;
  std::size_t trials = 1000;
  int channels = 4;
  int band_limit = 2;
  int output_band = 2;
  int angles = 16;
  std::optional<double> tolerance;
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

long parse_integer(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError(what + ": '" + text + "' is not an integer");
  return v;
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError(what + ": '" + text + "' is not a number");
  return v;
}

std::vector<int> parse_int_list(std::string text, const std::string& what) {
  if (!text.empty() && text.front() == '[') text.erase(0, 1);
  if (!text.empty() && text.back() == ']') text.pop_back();
  std::vector<int> values;
  for (const std::string& part : split(text, ',')) values.push_back(static_cast<int>(parse_integer(part, what)));
  if (values.empty()) throw UsageError(what + ": empty list");
  return values;
}

ReprType parse_type(const std::string& text, const std::string& what) {
  const auto orders = parse_int_list(text, what);
  for (int o : orders)
    if (o < 0) throw UsageError(what + ": irrep orders must be non-negative, got " + std::to_string(o));
  return ReprType(orders);
}

struct MeshSource {
  Mesh mesh;
  /// Undeformed mesh whose symmetries are audited, for generated meshes.
  std::optional<Mesh> symmetric_base;
};

std::map<std::string, std::string> generator_params(const std::vector<std::string>& parts, std::size_t first) {
  std::map<std::string, std::string> params;
  for (std::size_t i = first; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw UsageError("mesh generator parameter '" + parts[i] + "' is not key=value");
    params[parts[i].substr(0, eq)] = parts[i].substr(eq + 1);
  }
  return params;
}

MeshSource load_mesh(const std::string& spec, std::uint64_t seed) {
  if (spec.empty()) throw UsageError("--mesh is required");
  if (spec.rfind("gen:", 0) != 0) {
    if (!fs::exists(spec)) throw UsageError("mesh file not found: " + spec);
    return {read_obj(fs::path(spec)), std::nullopt};
  }
  const auto parts = split(spec, ':');
  if (parts.size() >= 2 && parts[1] == "icosahedron") {
    const auto params = generator_params(parts, 2);
    MeshSource src{icosahedron(), icosahedron()};
    for (const auto& [key, value] : params) {
      if (key != "deform") throw UsageError("unknown icosahedron parameter '" + key + "'");
      const double sd = parse_real(value, "deform");
      if (sd < 0) throw UsageError("deform must be non-negative");
      src.mesh = deform_radial(src.mesh, sd, seed);
    }
    return src;
  }
  if (parts.size() >= 3 && parts[1] == "grid") {
    const auto dims = split(parts[2], 'x');
    if (dims.size() != 2) throw UsageError("grid size must be RxC, got '" + parts[2] + "'");
    GridOptions o;
    o.rows = static_cast<int>(parse_integer(dims[0], "grid rows"));
    o.cols = static_cast<int>(parse_integer(dims[1], "grid cols"));
    o.seed = seed;
    for (const auto& [key, value] : generator_params(parts, 3)) {
      if (key != "sigma") throw UsageError("unknown grid parameter '" + key + "'");
      o.displace = true;
      o.smoothing_sigma = parse_real(value, "sigma");
    }
    if (o.rows < 2 || o.cols < 2) throw UsageError("grid needs at least 2 rows and 2 columns");
    if (o.displace && !(o.smoothing_sigma > 0)) throw UsageError("sigma must be positive");
    return {grid_mesh(o), std::nullopt};
  }
  throw UsageError("unknown mesh generator '" + spec + "' (expected gen:icosahedron or gen:grid:RxC)");
}

ReferencePolicy reference_policy(const Options& o) {
  if (o.reference == "smallest") return ReferencePolicy::smallest_id();
  if (o.reference == "random") return ReferencePolicy::seeded_random(o.seed);
  throw UsageError("--reference must be 'smallest' or 'random'");
}

Pointwise pointwise(const Options& o) {
  try {
    return pointwise_from_string(o.pointwise);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

// Everything that determines the artifacts; the output directory and the
// thread count are deliberately left out.
json config_json(const std::string& command, const Options& o) {
  json c;
  c["command"] = command;
  c["seed"] = o.seed;
  if (!o.mesh.empty()) c["mesh"] = o.mesh;
  if (command == "precompute" || command == "forward") c["reference"] = o.reference;
  if (command == "kernels") {
    c["type_in"] = o.type_in;
    c["type_out"] = o.type_out;
    c["angles"] = o.angles;
  }
  if (command == "forward") {
    if (!o.atlas.empty()) c["atlas"] = fnv1a(read_text_file(o.atlas));
    if (!o.input.empty()) c["input"] = fnv1a(read_text_file(o.input));
  }
  if (!o.net.empty()) c["net"] = fnv1a(read_text_file(o.net));
  if (command == "audit") {
    c["audit"] = o.audit;
    c["model"] = o.model;
    c["models"] = o.models;
    c["gauges"] = o.gauges;
    c["transforms"] = o.transforms;
    c["trials"] = o.trials;
    c["channels"] = o.channels;
    c["band_limit"] = o.band_limit;
    c["output_band"] = o.output_band;
    c["pointwise"] = o.pointwise;
    c["n_samples"] = o.n_samples;
    c["depth"] = o.depth;
    if (o.tolerance) c["tolerance"] = *o.tolerance;
  }
  return c;
}

json report_header(const std::string& command, const Options& o) {
  const json config = config_json(command, o);
  json h;
  h["tool"] = "gemcnn";
  h["version"] = version();
  h["command"] = command;
  h["seed"] = o.seed;
  h["config"] = config;
  h["config_hash"] = to_hex(fnv1a(config.dump()));
  return h;
}

fs::path output_dir(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  fs::create_directories(o.out);
  return o.out;
}

void write(const fs::path& path, const std::string& text) { write_text_file(path, text); }

std::string dump(const json& j) { return j.dump(1) + "\n"; }

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_precompute(const Options& o, std::ostream& out, std::ostream& err) {
  const fs::path dir = output_dir(o);
  const MeshSource src = load_mesh(o.mesh, o.seed);
  const ValidationReport report = validate(src.mesh);

  json v = report_header("precompute", o);
  v["vertex_count"] = src.mesh.vertex_count();
  v["face_count"] = src.mesh.face_count();
  v["is_manifold"] = report.is_manifold;
  v["boundary_vertex_count"] = report.boundary_vertex_count;
  json defects = json::array();
  for (const Defect& d : report.defects) defects.push_back({{"kind", to_string(d.kind)}, {"element", d.element}});
  v["defects"] = defects;
  write(dir / "validation.json", dump(v));

  if (!report.is_manifold) {
    err << "invalid mesh: " << report.defects.size() << " defect(s)\n";
    for (const Defect& d : report.defects) {
      err << "  " << to_string(d.kind);
      for (VertexId id : d.element) err << ' ' << id;
      err << '\n';
    }
    return kValidationFailure;
  }
  const GaugeAtlas atlas = build_atlas(src.mesh, reference_policy(o), o.threads);
  save_atlas(dir / "atlas.json", atlas);
  std::size_t edges = 0;
  for (const auto& g : atlas.vertices()) edges += g.neighbors.size();
  out << "atlas " << to_hex(atlas.id()) << ": " << atlas.size() << " vertices, " << edges << " directed edges, "
      << report.boundary_vertex_count << " boundary vertices\n";
  return kSuccess;
}

int cmd_kernels(const Options& o, std::ostream& out) {
  const ReprType in = parse_type(o.type_in, "--type-in");
  const ReprType outt = parse_type(o.type_out, "--type-out");
  if (o.angles < 1) throw UsageError("--angles must be positive");
  const ParamCount count = param_count(in, outt);
  out << "self=" << count.n_self << " neigh=" << count.n_neigh << " total=" << count.total() << "\n";
  if (o.out.empty()) return kSuccess;

  json doc = report_header("kernels", o);
  doc["type_in"] = in.orders();
  doc["type_out"] = outt.orders();
  doc["n_self"] = count.n_self;
  doc["n_neigh"] = count.n_neigh;
  doc["total"] = count.total();
  std::vector<double> angles;
  for (int k = 0; k < o.angles; ++k) angles.push_back(kTwoPi * k / o.angles);
  doc["angles"] = angles;
  json blocks = json::array();
  for (std::size_t j = 0; j < outt.size(); ++j)
    for (std::size_t i = 0; i < in.size(); ++i) {
      const int n = in.order(i), m = outt.order(j);
      json b{{"out_entry", j}, {"in_entry", i}, {"out_order", m}, {"in_order", n}};
      json self = json::array();
      for (const Matrix& k : basis_self(n, m)) self.push_back(matrix_json(k));
      b["self"] = self;
      json neigh = json::array();
      for (const auto& k : basis_neigh(n, m)) {
        json samples = json::array();
        for (double t : angles) samples.push_back(matrix_json(k(t)));
        neigh.push_back(samples);
      }
      b["neigh"] = neigh;
      blocks.push_back(std::move(b));
    }
  doc["blocks"] = blocks;
  const LayerWeights w = init_weights(in, outt, o.seed);
  json assembled;
  assembled["w_self"] = std::vector<double>(w.w_self.data(), w.w_self.data() + w.w_self.size());
  assembled["w_neigh"] = std::vector<double>(w.w_neigh.data(), w.w_neigh.data() + w.w_neigh.size());
  assembled["self"] = matrix_json(assemble_kernels(w, 0.0).self);
  json neigh = json::array();
  for (double t : angles) neigh.push_back(matrix_json(assemble_kernels(w, t).neigh));
  assembled["neigh"] = neigh;
  doc["assembled"] = assembled;
  write(output_dir(o) / "kernels.json", dump(doc));
  return kSuccess;
}

Network load_network(const Options& o) {
  if (o.net.empty()) throw UsageError("--net is required");
  if (!fs::exists(o.net)) throw UsageError("network file not found: " + o.net);
  return network_from_json(read_text_file(o.net));
}

int cmd_forward(const Options& o, std::ostream& out) {
  const fs::path dir = output_dir(o);
  const Network net = load_network(o);
  std::optional<GaugeAtlas> atlas;
  if (!o.atlas.empty()) {
    if (!fs::exists(o.atlas)) throw UsageError("atlas file not found: " + o.atlas);
    atlas = load_atlas(o.atlas);
  }
  if (!o.mesh.empty()) {
    const MeshSource src = load_mesh(o.mesh, o.seed);
    if (atlas && atlas->size() != src.mesh.vertex_count())
      throw InvalidArgument("atlas has " + std::to_string(atlas->size()) + " vertices but the mesh has " +
                            std::to_string(src.mesh.vertex_count()));
    if (!atlas) atlas = build_atlas(src.mesh, reference_policy(o), o.threads);
  }
  if (!atlas) throw UsageError("forward needs --atlas or --mesh");

  FeatureField input;
  if (!o.input.empty()) {
    if (!fs::exists(o.input)) throw UsageError("input file not found: " + o.input);
    input = field_from_json(read_text_file(o.input), atlas->id());
  } else {
    Rng rng(derive_seed(o.seed, 0));
    input = {net.input_type, FieldValues(static_cast<Eigen::Index>(atlas->size()), net.input_type.dim()),
             atlas->id()};
    for (Eigen::Index i = 0; i < input.values.size(); ++i) input.values.data()[i] = rng.normal();
    write(dir / "input.json", field_to_json(input));
  }
  if (input.vertex_count() != atlas->size())
    throw InvalidArgument("input field has " + std::to_string(input.vertex_count()) + " vertices, atlas has " +
                          std::to_string(atlas->size()));

  const ForwardTrace trace = sequential(net, *atlas, input, o.threads);
  write(dir / "output.json", field_to_json(trace.output));
  write(dir / "output.csv", field_to_csv(trace.output));

  json r = report_header("forward", o);
  r["atlas_id"] = to_hex(atlas->id());
  r["input_checksum"] = to_hex(field_checksum(input));
  json layers = json::array();
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const bool conv = std::holds_alternative<ConvLayer>(net.layers[k]);
    layers.push_back({{"index", k}, {"kind", conv ? "conv" : "regular_nonlinearity"},
                      {"checksum", to_hex(trace.checksums[k])}});
  }
  r["layers"] = layers;
  r["output_type"] = trace.output.type.orders();
  r["output_checksum"] = to_hex(field_checksum(trace.output));
  write(dir / "forward.json", dump(r));
  out << "output " << trace.output.values.rows() << "x" << trace.output.values.cols() << " checksum "
      << to_hex(field_checksum(trace.output)) << "\n";
  return kSuccess;
}

json trials_json(const AuditReport& r) {
  json t = json::array();
  for (const TrialRecord& rec : r.trials) t.push_back({{"seed", rec.seed}, {"error", rec.error}});
  return t;
}

int cmd_audit_nonlinearity(const Options& o, const fs::path& dir, std::ostream& out) {
  const std::vector<int> ns = parse_int_list(o.n_samples.empty() ? "5,10,20,40,80,160,320" : o.n_samples, "--n-samples");
  if (o.trials == 0) throw UsageError("--trials must be positive");
  const auto rows = nonlinearity_sweep(ns, o.trials, o.band_limit, o.output_band, pointwise(o), o.seed, o.threads);

  std::string csv = "N,measured,bound,ratio,median,violations\n";
  json jrows = json::array();
  std::size_t violations = 0;
  std::vector<double> xs, medians;
  for (const auto& r : rows) {
    csv += std::to_string(r.samples) + "," + fmt(r.mean_measured, "%.17g") + "," + fmt(r.mean_bound, "%.17g") + "," +
           fmt(r.max_ratio, "%.17g") + "," + fmt(r.median_measured, "%.17g") + "," + std::to_string(r.violations) +
           "\n";
    jrows.push_back({{"samples", r.samples}, {"mean_measured", r.mean_measured}, {"median_measured", r.median_measured},
                     {"mean_bound", r.mean_bound}, {"max_ratio", r.max_ratio}, {"violations", r.violations}});
    violations += r.violations;
    if (r.median_measured > 0) {
      xs.push_back(r.samples);
      medians.push_back(r.median_measured);
    }
    out << "N=" << r.samples << " measured=" << fmt(r.mean_measured) << " bound=" << fmt(r.mean_bound)
        << " max_ratio=" << fmt(r.max_ratio) << " violations=" << r.violations << "\n";
  }
  json doc = report_header("audit", o);
  doc["metric"] = "nonlinearity_bound";
  doc["rows"] = jrows;
  doc["trials"] = o.trials;
  doc["violations"] = violations;
  if (xs.size() >= 2) {
    const double slope = loglog_slope(xs, medians);
    doc["median_loglog_slope"] = slope;
    out << "median log-log slope " << fmt(slope) << "\n";
  }
  write(dir / "nonlinearity_audit.json", dump(doc));
  write(dir / "nonlinearity_audit.csv", csv);
  return violations == 0 ? kSuccess : kValidationFailure;
}

struct ModelConfig {
  std::optional<int> depth;
  std::optional<int> samples;
  ModelFactory factory;
};

std::vector<ModelConfig> audit_models(const Options& o) {
  const int c = o.channels;
  if (c < 1) throw UsageError("--channels must be positive");
  if (o.model == "identity")
    return {{std::nullopt, std::nullopt, [c](std::uint64_t) { return std::make_unique<IdentityModel>(ReprType::scalars(c)); }}};
  if (o.model == "zcoord")
    return {{std::nullopt, std::nullopt, [c](std::uint64_t) { return std::make_unique<ZCoordinateModel>(c); }}};
  if (o.model == "anisotropic")
    return {{std::nullopt, std::nullopt, [c](std::uint64_t s) { return std::make_unique<AnisotropicScalarModel>(c, s); }}};
  if (o.model != "network") throw UsageError("--model must be network, identity, zcoord or anisotropic");
  if (!o.net.empty()) return {{std::nullopt, std::nullopt, network_factory(load_network(o))}};
  std::vector<ModelConfig> configs;
  const Pointwise f = pointwise(o);
  for (int depth : parse_int_list(o.depth, "--depth"))
    for (int n : parse_int_list(o.n_samples.empty() ? "101" : o.n_samples, "--n-samples")) {
      if (depth < 2) throw UsageError("--depth must be at least 2");
      const RegularNonlinSpec spec{o.band_limit, n, f};
      try {
        spec.check();
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
      configs.push_back({depth, n, network_factory(regular_network(depth, c, spec, o.seed))});
    }
  return configs;
}

std::vector<IsometryMap> audit_isometries(const MeshSource& src) {
  const GaugeAtlas atlas = build_atlas(src.mesh);
  if (src.symmetric_base) {
    const auto maps = icosahedron_isometries(*src.symmetric_base, build_atlas(*src.symmetric_base));
    std::vector<IsometryMap> moved;
    for (const auto& m : maps) moved.push_back(isometry_from_permutation(atlas, m.perm));
    return moved;
  }
  return find_rigid_isometries(src.mesh, atlas, tol::kIsometryMatch);
}

int cmd_audit(const Options& o, std::ostream& out) {
  const fs::path dir = output_dir(o);
  if (o.audit == "nonlinearity") return cmd_audit_nonlinearity(o, dir, out);
  if (o.audit != "gauge" && o.audit != "ambient" && o.audit != "isometry")
    throw UsageError("--audit must be gauge, ambient, isometry or nonlinearity");
  if (o.models == 0 || o.gauges == 0 || o.transforms == 0) throw UsageError("audit counts must be positive");
  const MeshSource src = load_mesh(o.mesh, o.seed);
  const auto configs = audit_models(o);
  std::vector<IsometryMap> isometries;
  if (o.audit == "isometry") isometries = audit_isometries(src);

  std::string csv = "depth,samples,error\n";
  json rows = json::array();
  bool within = true;
  std::string metric;
  for (const ModelConfig& cfg : configs) {
    AuditReport r;
    if (o.audit == "gauge")
      r = gauge_equivariance_error(cfg.factory, src.mesh, o.models, o.gauges, o.seed, o.threads);
    else if (o.audit == "ambient")
      r = ambient_invariance_error(cfg.factory, src.mesh, o.models, o.transforms, o.seed, o.threads);
    else
      r = isometry_equivariance_error(cfg.factory, src.mesh, isometries, o.models, o.seed, o.threads);
    metric = r.metric;
    const std::string depth = cfg.depth ? std::to_string(*cfg.depth) : "";
    const std::string samples = cfg.samples ? std::to_string(*cfg.samples) : "";
    csv += depth + "," + samples + "," + fmt(r.error, "%.17g") + "\n";
    json row{{"error", r.error}, {"counts", r.counts}, {"trials", trials_json(r)}};
    row["depth"] = cfg.depth ? json(*cfg.depth) : json(nullptr);
    row["samples"] = cfg.samples ? json(*cfg.samples) : json(nullptr);
    rows.push_back(std::move(row));
    if (o.tolerance && !(r.error <= *o.tolerance)) within = false;
    out << r.metric;
    if (cfg.depth) out << " depth=" << *cfg.depth << " N=" << *cfg.samples;
    out << " error=" << fmt(r.error) << "\n";
  }

  json doc = report_header("audit", o);
  doc["metric"] = metric;
  doc["rows"] = rows;
  doc["tolerances"] = {{"isometry_match", tol::kIsometryMatch}, {"rotation", tol::kRotation},
                       {"degenerate_edge", tol::kDegenerateEdge}};
  if (o.audit == "isometry") doc["isometries"] = isometries.size();
  if (o.tolerance) {
    doc["tolerance"] = *o.tolerance;
    doc["within_tolerance"] = within;
  }
  write(dir / (o.audit + "_audit.json"), dump(doc));
  write(dir / (o.audit + "_audit.csv"), csv);
  return within ? kSuccess : kValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Gauge equivariant mesh convolution: precompute, kernels, forward, audit", "gemcnn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Master seed (64-bit)");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--threads", o.threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  };
  auto* precompute = app.add_subcommand("precompute", "Validate a mesh and write its gauge atlas");
  common(precompute);
  precompute->add_option("--mesh", o.mesh, "OBJ path, gen:icosahedron[:deform=S] or gen:grid:RxC[:sigma=S]")
      ->required();
  precompute->add_option("--reference", o.reference, "Reference neighbour policy: smallest | random");

  auto* kernels = app.add_subcommand("kernels", "Parameter counts and sampled kernel bases for a layer");
  common(kernels);
  kernels->add_option("--type-in", o.type_in, "Input irrep orders, e.g. 0,1,1")->required();
  kernels->add_option("--type-out", o.type_out, "Output irrep orders, e.g. 1,3")->required();
  kernels->add_option("--angles", o.angles, "Number of sampled angles in the dump");

  auto* forward = app.add_subcommand("forward", "Run a network on a field");
  common(forward);
  forward->add_option("--net", o.net, "Network JSON")->required();
  forward->add_option("--mesh", o.mesh, "Mesh source (builds the atlas unless --atlas is given)");
  forward->add_option("--atlas", o.atlas, "Atlas JSON from precompute");
  forward->add_option("--input", o.input, "Input field JSON (default: seeded normal noise)");
  forward->add_option("--reference", o.reference, "Reference neighbour policy when building the atlas");

  auto* audit = app.add_subcommand("audit", "Measure equivariance errors");
  common(audit);
  audit->add_option("--audit", o.audit, "gauge | ambient | isometry | nonlinearity")->required();
  audit->add_option("--mesh", o.mesh, "Mesh source");
  audit->add_option("--net", o.net, "Network JSON (default: generated regular network)");
  audit->add_option("--model", o.model, "network | identity | zcoord | anisotropic");
  audit->add_option("--n-samples", o.n_samples, "Sample counts N, comma separated");
  audit->add_option("--depth", o.depth, "Conv layers of the generated network, comma separated");
  audit->add_option("--channels", o.channels, "Scalar channels of generated models");
  audit->add_option("--band-limit", o.band_limit, "Band limit of regular features");
  audit->add_option("--output-band", o.output_band, "Output band limit for the nonlinearity audit");
  audit->add_option("--pointwise", o.pointwise, "relu | tanh | identity");
  audit->add_option("--models", o.models, "Model and input draws");
  audit->add_option("--gauges", o.gauges, "Gauge draws per model");
  audit->add_option("--transforms", o.transforms, "Rigid motions per model");
  audit->add_option("--trials", o.trials, "Random (x, delta) trials for the nonlinearity audit");
  audit->add_option("--tolerance", o.tolerance, "Fail (exit 1) when an error exceeds this");

  std::vector<const char*> argv{"gemcnn"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (precompute->parsed()) return cmd_precompute(o, out, err);
    if (kernels->parsed()) return cmd_kernels(o, out);
    if (forward->parsed()) return cmd_forward(o, out);
    return cmd_audit(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DegenerateGeometry& e) {
    err << "degenerate: " << e.what() << "\n";
    return kDegenerate;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace gem::cli
