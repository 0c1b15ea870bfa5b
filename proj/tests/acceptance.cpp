// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gem/algebra.hpp>
#include <gem/audit.hpp>
#include <gem/geometry.hpp>
#include <gem/layers.hpp>
#include <gem/mesh.hpp>
#include <gem/network.hpp>
#include <gem/numeric.hpp>
#include <gem/random.hpp>
#include <gem/serialize.hpp>

#ifdef GEM_HAVE_CLI
#include <cli.hpp>
#endif

namespace {

using namespace gem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

FeatureField random_field(const ReprType& type, const GaugeAtlas& atlas, Rng& rng) {
  FeatureField f{type, FieldValues(static_cast<Eigen::Index>(atlas.size()), type.dim()), atlas.id()};
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = rng.normal();
  return f;
}

ReprType random_type(Rng& rng) {
  std::vector<int> orders(1 + rng.below(3));
  for (int& o : orders) o = static_cast<int>(rng.below(4));
  return ReprType(orders);
}

Mesh rough_grid(int rows, int cols, std::uint64_t seed) {
  GridOptions o;
  o.rows = rows;
  o.cols = cols;
  o.displace = true;
  o.smoothing_sigma = 1.0;  // roughness 2
  o.seed = seed;
  return grid_mesh(o);
}

Outcome param_counts() {
  Outcome r;
  const ParamCount c = param_count(ReprType{0, 1, 1}, ReprType{1, 3});
  const ParamCount scalar = param_count(ReprType{0}, ReprType{0});
  r.pass = c.n_self == 4 && c.n_neigh == 20 && c.total() == 24 && scalar.n_self == 1 && scalar.n_neigh == 1;
  r.detail = "([0,1,1],[1,3]) -> self=" + std::to_string(c.n_self) + " neigh=" + std::to_string(c.n_neigh) +
             " total=" + std::to_string(c.total());
  return r;
}

Outcome kernel_constraint() {
  Rng rng(2);
  double worst = 0.0, worst_span = 0.0;
  bool dims = true;
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 4; ++m) {
      for (const auto& k : basis_neigh(n, m))
        for (int s = 0; s < 100; ++s) {
          const double theta = rng.uniform(0, kTwoPi), g = rng.uniform(0, kTwoPi);
          worst = std::max(worst, max_abs(k(theta - g) - irrep(m, -g) * k(theta) * irrep(n, g)));
        }
      for (const Matrix& k : basis_self(n, m))
        for (int s = 0; s < 100; ++s) {
          const double g = rng.uniform(0, kTwoPi);
          worst = std::max(worst, max_abs(k - irrep(m, -g) * k * irrep(n, g)));
        }
      const NumericKernelBasis numeric = numeric_kernel_basis(n, m, 64);
      const auto analytic = basis_neigh(n, m);
      dims = dims && numeric.size() == analytic.size();
      worst_span = std::max(worst_span, span_residual(analytic, numeric));
    }
  return {worst < 1e-10 && dims && worst_span < 1e-8, "constraint deviation " + fmt(worst) + ", null-space dims " +
                                                          (dims ? "match" : "differ") + ", span residual " +
                                                          fmt(worst_span)};
}

Outcome gauge_equivariance() {
  double worst = 0.0;
  const Mesh meshes[] = {icosahedron(), rough_grid(8, 8, 17)};
  Rng rng(100);
  for (const Mesh& mesh : meshes) {
    const GaugeAtlas atlas = build_atlas(mesh);
    for (int draw = 0; draw < 20; ++draw) {
      const ReprType in = random_type(rng), out = random_type(rng);
      const LayerWeights w = init_weights(in, out, rng.next_u64());
      const FeatureField f = random_field(in, atlas, rng);
      const GaugeChange change = random_gauge_change(atlas.size(), rng);
      const GaugeAtlas moved = apply_gauge_change(atlas, change);
      const FeatureField lhs = gem_conv(moved, w, transform_field(f, change, moved.id()));
      const FeatureField rhs = transform_field(gem_conv(atlas, w, f), change, moved.id());
      worst = std::max(worst, max_abs(lhs.values - rhs.values));
    }
  }
  return {worst < 1e-9, "max deviation " + fmt(worst) + " over 2 meshes x 20 draws"};
}

Outcome ambient_invariance() {
  double worst = 0.0;
  const Network net = regular_network(5, 3, {2, 9, Pointwise::kRelu}, 31);
  Rng rng(7);
  const Mesh meshes[] = {icosahedron(), rough_grid(8, 8, 5)};
  for (const Mesh& mesh : meshes) {
    const GaugeAtlas atlas = build_atlas(mesh);
    const FeatureField f = random_field(net.input_type, atlas, rng);
    const FieldValues base = sequential(net, atlas, f).output.values;
    for (int t = 0; t < 100; ++t) {
      const Mat3 rot = random_rotation(rng);
      const Vec3 shift(rng.normal(), rng.normal(), rng.normal());
      const GaugeAtlas moved = build_atlas(apply_rigid(mesh, rot, shift));
      FeatureField g = f;
      g.atlas_id = moved.id();
      worst = std::max(worst, max_abs(sequential(net, moved, g).output.values - base));
    }
  }
  return {worst < 1e-9, "max output change " + fmt(worst) + " over 2 meshes x 100 rigid motions"};
}

Outcome isometries() {
  Outcome r;
  const Mesh mesh = icosahedron();
  const GaugeAtlas atlas = build_atlas(mesh);
  const auto maps = icosahedron_isometries(mesh, atlas);

  std::set<std::vector<VertexId>> perms;
  for (const auto& m : maps) perms.insert(m.perm);
  std::vector<VertexId> id(mesh.vertex_count());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<VertexId>(i);
  bool group = perms.size() == 60 && perms.count(id) == 1;
  for (const auto& a : maps) {
    bool inverse = false;
    for (const auto& b : maps) {
      const auto ab = compose(a.perm, b.perm);
      group = group && perms.count(ab) == 1;
      inverse = inverse || ab == id;
    }
    group = group && inverse;
  }

  Rng rng(3);
  double theorem = 0.0;
  for (int draw = 0; draw < 10; ++draw) {
    const ReprType in = random_type(rng), out = random_type(rng);
    const LayerWeights w = init_weights(in, out, rng.next_u64());
    const FeatureField f = random_field(in, atlas, rng);
    const FeatureField conv = gem_conv(atlas, w, f);
    for (const auto& m : maps)
      theorem = std::max(theorem, max_abs(gem_conv(atlas, w, pushforward(f, m)).values - pushforward(conv, m).values));
  }

  std::ostringstream split;
  bool split_ok = true;
  for (int n : {5, 10, 15, 20, 6, 7, 8, 9}) {
    const Network net = regular_network(4, 3, {2, n, Pointwise::kRelu}, 21);
    const double err = isometry_equivariance_error(network_factory(net), mesh, maps, 2, 8).error;
    const bool ok = n % 5 == 0 ? err < 1e-9 : err > 1e-3;
    split_ok = split_ok && ok;
    split << " N=" << n << ":" << fmt(err);
  }
  r.pass = maps.size() == 60 && group && theorem < 1e-9 && split_ok;
  r.detail = std::to_string(maps.size()) + " maps, group " + (group ? "yes" : "no") + ", conv theorem deviation " +
             fmt(theorem) + ", network error" + split.str();
  return r;
}

Outcome nonlinearity() {
  const std::vector<int> ns{5, 10, 20, 40, 80, 160, 320};
  const auto rows = nonlinearity_sweep(ns, 1000, 2, 2, Pointwise::kRelu, 2024);
  std::size_t violations = 0;
  std::vector<double> xs, medians;
  for (const auto& row : rows) {
    violations += row.violations;
    xs.push_back(row.samples);
    medians.push_back(row.median_measured);
  }
  const double slope = loglog_slope(xs, medians);

  // Exact cases: whole-sample rotations and the identity nonlinearity.
  const ReprType modes_type = ReprType::regular(1, 2);
  Rng rng(9);
  double shift_err = 0.0, identity_err = 0.0;
  for (int n : {5, 7, 12, 33}) {
    const RegularNonlinearity relu({2, n, Pointwise::kRelu});
    const RegularNonlinearity ident({2, n, Pointwise::kIdentity});
    for (int trial = 0; trial < 20; ++trial) {
      Vector x(modes_type.dim());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
      identity_err = std::max(identity_err, (ident.apply_modes(x) - x).cwiseAbs().maxCoeff());
      for (int k = 1; k < n; ++k) {
        const Matrix r = rep(modes_type, kTwoPi * k / n);
        shift_err = std::max(shift_err, (relu.apply_modes(r * x) - r * relu.apply_modes(x)).cwiseAbs().maxCoeff());
      }
    }
  }

  const bool in_window = slope >= -1.3 && slope <= -0.7;
  Outcome r;
  r.pass = violations == 0 && in_window && shift_err < 1e-12 && identity_err < 1e-12;
  r.detail = "bound violations " + std::to_string(violations) + "/" + std::to_string(1000 * ns.size()) +
             ", median slope " + fmt(slope) + (in_window ? " in" : " outside") + " [-1.3,-0.7]" +
             (slope <= -0.7 ? " (decays at least as fast as 1/N)" : "") + ", sample-shift error " + fmt(shift_err) +
             ", identity error " + fmt(identity_err);
  return r;
}

// Centre vertex 0 with scalar neighbours 1, 2, 3 at the given angles.
GaugeAtlas one_ring(const std::array<double, 3>& angles) {
  std::vector<VertexGauge> v(4);
  v[0] = {Vec3::UnitZ(), 1, Vec3::UnitX(), Vec3::UnitY(),
          {{1, angles[0], 0.0}, {2, angles[1], 0.0}, {3, angles[2], 0.0}}};
  for (std::size_t q = 1; q <= 3; ++q) v[q] = {Vec3::UnitZ(), 0, Vec3::UnitX(), Vec3::UnitY(), {{0, 0.0, 0.0}}};
  return GaugeAtlas(std::move(v));
}

Outcome isotropy_control() {
  const GaugeAtlas even = one_ring({0.0, kTwoPi / 3.0, 2.0 * kTwoPi / 3.0});
  const GaugeAtlas skewed = one_ring({0.0, kPi / 6.0, 2.0 * kTwoPi / 3.0});
  auto features = [](const GaugeAtlas& atlas) {
    FeatureField f{ReprType{0}, FieldValues(4, 1), atlas.id()};
    f.values << 0.0, 1.0, 2.0, 3.0;
    return f;
  };
  const Matrix zero = Matrix::Zero(1, 1), one = Matrix::Ones(1, 1);
  const double ga = graph_conv(zero, one, features(even), even.adjacency()).values(0, 0);
  const double gb = graph_conv(zero, one, features(skewed), skewed.adjacency()).values(0, 0);

  const LayerWeights w{ReprType{0}, ReprType{1}, Vector(0), (Vector(2) << 1.0, 0.0).finished()};
  const Vector a = gem_conv(even, w, features(even)).values.row(0).transpose();
  const Vector b = gem_conv(skewed, w, features(skewed)).values.row(0).transpose();
  // Hand-computed centre outputs: (-3/2, -sqrt3/2) and (sqrt3 - 1/2, 1 - 3 sqrt3/2).
  const double r3 = std::sqrt(3.0);
  const double derived = std::max(std::abs(a[0] + 1.5) + std::abs(a[1] + r3 / 2.0),
                                  std::abs(b[0] - (r3 - 0.5)) + std::abs(b[1] - (1.0 - 1.5 * r3)));
  const double margin = (a - b).norm();
  return {ga == gb && margin > 0.1 && derived < 1e-12,
          "graph_conv " + fmt(ga) + " vs " + fmt(gb) + ", gem_conv margin " + fmt(margin) +
              ", deviation from hand values " + fmt(derived)};
}

#ifdef GEM_HAVE_CLI
namespace fs = std::filesystem;

std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.emplace_back(fs::relative(e.path(), dir).string(), read_text_file(e.path()));
  std::sort(files.begin(), files.end());
  return files;
}

Outcome cli_determinism() {
  const fs::path root = fs::path(GEM_TEST_SCRATCH);
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path net = root / "net.json";
  write_text_file(net, network_to_json(regular_network(4, 2, {2, 7, Pointwise::kRelu}, 5)));
  const fs::path atlas_dir = root / "atlas";
  {
    std::ostringstream o, e;
    if (cli::run({"precompute", "--mesh", "gen:icosahedron", "--out", atlas_dir.string()}, o, e) != 0)
      return {false, "precompute failed: " + e.str()};
  }
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"precompute", {"precompute", "--mesh", "gen:grid:9x8:sigma=1", "--reference", "random"}},
      {"kernels", {"kernels", "--type-in", "0,1,1", "--type-out", "1,3"}},
      {"forward", {"forward", "--net", net.string(), "--atlas", (atlas_dir / "atlas.json").string()}},
      {"forward-mesh", {"forward", "--net", net.string(), "--mesh", "gen:grid:7x7:sigma=1.5"}},
      {"audit-gauge", {"audit", "--audit", "gauge", "--mesh", "gen:icosahedron", "--n-samples", "7", "--depth", "3",
                       "--channels", "2", "--models", "3", "--gauges", "3"}},
      {"audit-ambient", {"audit", "--audit", "ambient", "--mesh", "gen:grid:6x6:sigma=1", "--n-samples", "7",
                         "--depth", "3", "--channels", "2", "--models", "2", "--transforms", "4"}},
      {"audit-isometry", {"audit", "--audit", "isometry", "--mesh", "gen:icosahedron:deform=0.05", "--n-samples",
                          "5", "--depth", "3", "--channels", "2", "--models", "2"}},
      {"audit-nonlinearity", {"audit", "--audit", "nonlinearity", "--n-samples", "5,10,20", "--trials", "100"}},
  };
  std::vector<std::string> broken;
  for (const auto& [name, base] : commands) {
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    int k = 0;
    for (const char* threads : {"1", "1", "4"}) {
      const fs::path dir = root / (name + "_" + std::to_string(k++));
      auto args = base;
      args.insert(args.end(), {"--seed", "42", "--threads", threads, "--out", dir.string()});
      std::ostringstream o, e;
      if (cli::run(args, o, e) != 0) {
        broken.push_back(name + " (exit nonzero: " + e.str() + ")");
        break;
      }
      runs.push_back(snapshot(dir));
    }
    if (runs.size() == 3 && (runs[0].empty() || runs[0] != runs[1] || runs[0] != runs[2])) broken.push_back(name);
  }
  std::string detail = std::to_string(commands.size()) + " command configurations x 3 runs (threads 1, 1, 4)";
  for (const auto& b : broken) detail += "; differs: " + b;
  return {broken.empty(), detail};
}
#else
Outcome cli_determinism() { return {false, "command-line tool not built"}; }
#endif

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "parameter counts", 1.0, param_counts},
      {2, "kernel constraint and null-space oracle", 10.0, kernel_constraint},
      {3, "gauge equivariance of gem_conv", 30.0, gauge_equivariance},
      {4, "ambient invariance", 60.0, ambient_invariance},
      {5, "icosahedral isometries", 120.0, isometries},
      {6, "regular nonlinearity bound", 60.0, nonlinearity},
      {7, "isotropy negative control", 1.0, isotropy_control},
      {8, "command-line determinism", 600.0, cli_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds >= c.limit_seconds) {
      r.pass = false;
      r.detail += "; runtime limit " + fmt(c.limit_seconds) + " s exceeded";
    }
    failures += r.pass ? 0 : 1;
    std::printf("criterion %d: %s  %s: %s [%.2f s]\n", c.number, r.pass ? "PASS" : "FAIL", c.name, r.detail.c_str(),
                seconds);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
