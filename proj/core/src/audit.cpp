#include "gem/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gem/error.hpp"
#include "gem/numeric.hpp"
#include "gem/parallel.hpp"
#include "gem/random.hpp"

namespace gem {

bool IsometryMap::is_identity() const {
  for (std::size_t p = 0; p < perm.size(); ++p)
    if (perm[p] != static_cast<VertexId>(p)) return false;
  return true;
}

std::vector<VertexId> compose(const std::vector<VertexId>& a, const std::vector<VertexId>& b) {
  if (a.size() != b.size()) throw InvalidArgument("compose: permutations of different sizes");
  std::vector<VertexId> out(b.size());
  for (std::size_t p = 0; p < b.size(); ++p) out[p] = a[static_cast<std::size_t>(b[p])];
  return out;
}

IsometryMap isometry_from_permutation(const GaugeAtlas& atlas, std::vector<VertexId> perm) {
  const std::size_t n = atlas.size();
  if (perm.size() != n) throw InvalidArgument("isometry: permutation size does not match the atlas");
  std::vector<bool> hit(n, false);
  for (VertexId v : perm) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || hit[static_cast<std::size_t>(v)])
      throw InvalidArgument("isometry: map is not a bijection of the vertices");
    hit[static_cast<std::size_t>(v)] = true;
  }
  IsometryMap iso{std::move(perm), std::vector<double>(n)};
  for (std::size_t p = 0; p < n; ++p) {
    const auto& ref = atlas[static_cast<VertexId>(p)].reference;
    if (!ref) throw InvalidArgument("isometry: atlas has no reference neighbour at vertex " + std::to_string(p));
    const VertexId image = iso.perm[p];
    const VertexId ref_image = iso.perm[static_cast<std::size_t>(*ref)];
    if (!atlas.slot(image, ref_image))
      throw InvalidArgument("isometry: map does not preserve adjacency at vertex " + std::to_string(p));
    iso.offsets[p] = atlas.theta(image, ref_image);
  }
  return iso;
}

namespace {

std::optional<Mat3> orthonormal_frame(const Vec3& u, const Vec3& v) {
  if (u.norm() < tol::kGeometric) return std::nullopt;
  const Vec3 e1 = u.normalized();
  const Vec3 w = v - v.dot(e1) * e1;
  if (w.norm() < tol::kGeometric) return std::nullopt;
  const Vec3 e2 = w.normalized();
  Mat3 f;
  f.col(0) = e1;
  f.col(1) = e2;
  f.col(2) = e1.cross(e2);
  return f;
}

Face canonical_face(const Face& f) {
  const auto smallest = std::min_element(f.begin(), f.end()) - f.begin();
  return {f[static_cast<std::size_t>(smallest)], f[static_cast<std::size_t>((smallest + 1) % 3)],
          f[static_cast<std::size_t>((smallest + 2) % 3)]};
}

}  // namespace

std::vector<IsometryMap> find_rigid_isometries(const Mesh& mesh, const GaugeAtlas& atlas, double tolerance) {
  const std::size_t n = mesh.vertex_count();
  if (n == 0 || atlas.size() != n) throw InvalidArgument("isometry search: mesh and atlas disagree");
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& v : mesh.vertices) centroid += v;
  centroid /= static_cast<double>(n);
  std::vector<Vec3> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = mesh.vertices[i] - centroid;

  const auto adjacency = atlas.adjacency();
  const VertexId a = 0;
  if (adjacency[0].empty()) throw InvalidArgument("isometry search: vertex 0 has no neighbours");
  const VertexId b = adjacency[0][0];
  const auto source = orthonormal_frame(x[0], x[static_cast<std::size_t>(b)]);
  if (!source) throw DegenerateGeometry("isometry search: anchor edge is collinear with the centroid");

  std::set<Face> faces;
  for (const Face& f : mesh.faces) faces.insert(canonical_face(f));

  const double ra = x[static_cast<std::size_t>(a)].norm();
  const double rb = x[static_cast<std::size_t>(b)].norm();
  const double dab = x[static_cast<std::size_t>(a)].dot(x[static_cast<std::size_t>(b)]);

  std::vector<IsometryMap> found;
  for (std::size_t ai = 0; ai < n; ++ai) {
    if (std::abs(x[ai].norm() - ra) > tolerance) continue;
    for (VertexId bi : adjacency[ai]) {
      const Vec3& xb = x[static_cast<std::size_t>(bi)];
      if (std::abs(xb.norm() - rb) > tolerance || std::abs(x[ai].dot(xb) - dab) > tolerance * (ra + rb)) continue;
      const auto target = orthonormal_frame(x[ai], xb);
      if (!target) continue;
      const Mat3 rotation = *target * source->transpose();

      std::vector<VertexId> perm(n, -1);
      std::vector<bool> used(n, false);
      bool ok = true;
      for (std::size_t v = 0; v < n && ok; ++v) {
        const Vec3 image = rotation * x[v];
        ok = false;
        for (std::size_t w = 0; w < n; ++w)
          if (!used[w] && (image - x[w]).norm() <= tolerance) {
            perm[v] = static_cast<VertexId>(w);
            used[w] = true;
            ok = true;
            break;
          }
      }
      if (!ok) continue;
      for (const Face& f : mesh.faces) {
        const Face mapped{perm[static_cast<std::size_t>(f[0])], perm[static_cast<std::size_t>(f[1])],
                          perm[static_cast<std::size_t>(f[2])]};
        if (!faces.count(canonical_face(mapped))) {
          ok = false;
          break;
        }
      }
      if (ok) found.push_back(isometry_from_permutation(atlas, std::move(perm)));
    }
  }
  return found;
}

std::vector<IsometryMap> icosahedron_isometries(const Mesh& mesh, const GaugeAtlas& atlas) {
  if (mesh.vertex_count() != 12 || mesh.face_count() != 20)
    throw InvalidArgument("mesh is not an icosahedron: expected 12 vertices and 20 faces");
  auto maps = find_rigid_isometries(mesh, atlas, tol::kIsometryMatch);
  if (maps.size() != 60)
    throw InvalidArgument("mesh is not icosahedral: found " + std::to_string(maps.size()) +
                          " orientation-preserving isometries instead of 60");
  return maps;
}

FeatureField pushforward(const FeatureField& field, const IsometryMap& iso) {
  field.check();
  if (iso.perm.size() != field.vertex_count() || iso.offsets.size() != field.vertex_count())
    throw InvalidArgument("pushforward: isometry and field disagree on the vertex count");
  FeatureField out{field.type, FieldValues(field.values.rows(), field.values.cols()), field.atlas_id};
  for (std::size_t p = 0; p < iso.perm.size(); ++p) {
    Vector v = field.values.row(static_cast<Eigen::Index>(p)).transpose();
    apply_rep(field.type, iso.offsets[p], v);
    out.values.row(iso.perm[p]) = v.transpose();
  }
  return out;
}

NetworkModel::NetworkModel(Network network, int threads)
    : network_(std::move(network)), output_type_(network_.output_type()), threads_(threads) {}

FeatureField NetworkModel::forward(const Mesh&, const GaugeAtlas& atlas, const FeatureField& input) const {
  return sequential(network_, atlas, input, threads_).output;
}

ModelFactory network_factory(Network network, int threads) {
  network.check();
  return [network = std::move(network), threads](std::uint64_t draw) -> std::unique_ptr<Model> {
    return std::make_unique<NetworkModel>(network.reseeded(draw), threads);
  };
}

FeatureField IdentityModel::forward(const Mesh&, const GaugeAtlas& atlas, const FeatureField& input) const {
  FeatureField out = input;
  out.atlas_id = atlas.id();
  return out;
}

FeatureField ZCoordinateModel::forward(const Mesh& mesh, const GaugeAtlas& atlas, const FeatureField& input) const {
  input.check();
  FeatureField out{type_, input.values, atlas.id()};
  for (Eigen::Index p = 0; p < out.values.rows(); ++p)
    out.values.row(p).array() += mesh.vertices[static_cast<std::size_t>(p)].z();
  return out;
}

AnisotropicScalarModel::AnisotropicScalarModel(int channels, std::uint64_t seed)
    : type_(ReprType::scalars(channels)) {
  Rng rng(seed);
  for (int c = 0; c < channels; ++c)
    coefficients_.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
}

FeatureField AnisotropicScalarModel::forward(const Mesh&, const GaugeAtlas& atlas, const FeatureField& input) const {
  input.check();
  FeatureField out{type_, FieldValues::Zero(input.values.rows(), input.values.cols()), atlas.id()};
  for (std::size_t p = 0; p < atlas.size(); ++p)
    for (const NeighborAngles& nb : atlas[static_cast<VertexId>(p)].neighbors)
      for (std::size_t c = 0; c < coefficients_.size(); ++c) {
        const auto& k = coefficients_[c];
        const double w = k[0] + k[1] * std::cos(nb.theta) + k[2] * std::sin(nb.theta);
        out.values(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)) +=
            w * input.values(nb.id, static_cast<Eigen::Index>(c));
      }
  return out;
}

namespace {

FeatureField random_scalar_field(const ReprType& type, std::size_t vertices, std::uint64_t atlas_id, Rng& rng) {
  FeatureField f{type, FieldValues(static_cast<Eigen::Index>(vertices), type.dim()), atlas_id};
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = rng.normal();
  return f;
}

void require_scalar(const Model& model) {
  if (!model.input_type().all_scalar() || !model.output_type().all_scalar())
    throw InvalidArgument("audit requires a model with scalar input and output types, got " +
                          model.input_type().to_string() + " -> " + model.output_type().to_string());
}

double population_variance(const std::vector<const FieldValues*>& fields) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto* f : fields) {
    sum += f->sum();
    count += static_cast<std::size_t>(f->size());
  }
  if (count == 0) return 0.0;
  const double mean = sum / static_cast<double>(count);
  double sq = 0.0;
  for (const auto* f : fields) sq += (f->array() - mean).square().sum();
  return sq / static_cast<double>(count);
}

// Mean over entries of the population variance across `samples`.
double mean_entry_variance(const std::vector<FieldValues>& samples) {
  if (samples.empty()) return 0.0;
  FieldValues mean = FieldValues::Zero(samples[0].rows(), samples[0].cols());
  for (const auto& s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double sq = 0.0;
  for (const auto& s : samples) sq += (s - mean).array().square().sum();
  return sq / static_cast<double>(samples.size()) / static_cast<double>(mean.size());
}

double safe_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

struct Scene {
  Mesh mesh;
  GaugeAtlas atlas;
  FieldValues input;
  std::uint64_t input_atlas_id;
};

struct DrawResult {
  std::uint64_t seed = 0;
  FieldValues base;
  double numerator = 0.0;
};

// Shared driver for the variance-ratio audits. `transform(draw_seed, t,
// input)` returns the transformed scene for transform t.
template <typename Transform>
AuditReport variance_audit(const std::string& metric, const ModelFactory& factory, const Mesh& mesh,
                           std::size_t n_models, std::size_t n_transforms, std::uint64_t seed, int threads,
                           const std::string& transform_label, Transform&& transform) {
  if (n_models == 0 || n_transforms == 0) throw InvalidArgument(metric + ": counts must be positive");
  const GaugeAtlas atlas = build_atlas(mesh);
  std::vector<DrawResult> draws(n_models);
  parallel_for(n_models, threads, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    const auto model = factory(derive_seed(s, 0));
    require_scalar(*model);
    Rng rng(derive_seed(s, 1));
    const FeatureField input = random_scalar_field(model->input_type(), mesh.vertex_count(), atlas.id(), rng);
    DrawResult& r = draws[i];
    r.seed = s;
    r.base = model->forward(mesh, atlas, input).values;
    std::vector<FieldValues> outs;
    for (std::size_t t = 0; t < n_transforms; ++t) {
      const Scene scene = transform(s, t, input, atlas);
      outs.push_back(model->forward(scene.mesh, scene.atlas, {input.type, scene.input, scene.input_atlas_id}).values);
    }
    r.numerator = mean_entry_variance(outs);
  });

  AuditReport report{metric, 0.0, {{"models", n_models}, {transform_label, n_transforms}}, seed, {}};
  std::vector<const FieldValues*> bases;
  double numerator = 0.0;
  for (const DrawResult& r : draws) {
    bases.push_back(&r.base);
    numerator += r.numerator;
    report.trials.push_back({r.seed, safe_ratio(r.numerator, population_variance({&r.base}))});
  }
  numerator /= static_cast<double>(draws.size());
  const double denominator = population_variance(bases);
  if (denominator == 0.0) throw DegenerateGeometry(metric + ": model outputs have zero variance");
  report.error = safe_ratio(numerator, denominator);
  return report;
}

}  // namespace

AuditReport gauge_equivariance_error(const ModelFactory& factory, const Mesh& mesh, std::size_t n_models,
                                     std::size_t n_gauges, std::uint64_t seed, int threads) {
  return variance_audit("gauge_equivariance", factory, mesh, n_models, n_gauges, seed, threads, "gauges",
                        [&](std::uint64_t s, std::size_t t, const FeatureField& input, const GaugeAtlas& atlas) {
                          Rng rng(derive_seed(s, 2 + t));
                          const GaugeChange change = random_gauge_change(atlas.size(), rng);
                          GaugeAtlas changed = apply_gauge_change(atlas, change);
                          const std::uint64_t id = changed.id();
                          return Scene{mesh, std::move(changed), transform_field(input, change, id).values, id};
                        });
}

AuditReport ambient_invariance_error(const ModelFactory& factory, const Mesh& mesh, std::size_t n_models,
                                     std::size_t n_transforms, std::uint64_t seed, int threads) {
  return variance_audit(
      "ambient_invariance", factory, mesh, n_models, n_transforms, seed, threads, "transforms",
      [&](std::uint64_t s, std::size_t t, const FeatureField& input, const GaugeAtlas& atlas) {
        Rng rng(derive_seed(s, 2 + t));
        const Mat3 rotation = random_rotation(rng);
        const Vec3 translation(rng.normal(), rng.normal(), rng.normal());
        Mesh moved = apply_rigid(mesh, rotation, translation);
        std::vector<VertexId> refs;
        for (const auto& v : atlas.vertices()) refs.push_back(v.reference.value());
        GaugeAtlas moved_atlas = build_atlas(moved, ReferencePolicy::explicit_references(std::move(refs)));
        const std::uint64_t id = moved_atlas.id();
        return Scene{std::move(moved), std::move(moved_atlas), input.values, id};
      });
}

AuditReport isometry_equivariance_error(const ModelFactory& factory, const Mesh& mesh,
                                        const std::vector<IsometryMap>& isometries, std::size_t n_models,
                                        std::uint64_t seed, int threads) {
  if (n_models == 0 || isometries.empty()) throw InvalidArgument("isometry_equivariance: counts must be positive");
  const GaugeAtlas atlas = build_atlas(mesh);
  std::vector<DrawResult> draws(n_models);
  parallel_for(n_models, threads, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    const auto model = factory(derive_seed(s, 0));
    Rng rng(derive_seed(s, 1));
    const FeatureField input = random_scalar_field(model->input_type(), mesh.vertex_count(), atlas.id(), rng);
    DrawResult& r = draws[i];
    r.seed = s;
    const FeatureField base = model->forward(mesh, atlas, input);
    r.base = base.values;
    double sq = 0.0;
    for (const IsometryMap& iso : isometries) {
      const FieldValues moved = model->forward(mesh, atlas, pushforward(input, iso)).values;
      sq += (moved - pushforward(base, iso).values).array().square().sum();
    }
    r.numerator = sq / static_cast<double>(isometries.size()) / static_cast<double>(base.values.size());
  });

  AuditReport report{"isometry_equivariance", 0.0, {{"models", n_models}, {"isometries", isometries.size()}}, seed,
                     {}};
  std::vector<const FieldValues*> bases;
  double numerator = 0.0;
  for (const DrawResult& r : draws) {
    bases.push_back(&r.base);
    numerator += r.numerator;
    report.trials.push_back({r.seed, safe_ratio(r.numerator, population_variance({&r.base}))});
  }
  numerator /= static_cast<double>(draws.size());
  const double denominator = population_variance(bases);
  if (denominator == 0.0) throw DegenerateGeometry("isometry_equivariance: model outputs have zero variance");
  report.error = safe_ratio(numerator, denominator);
  return report;
}

NonlinearityError nonlinearity_error_and_bound(const Vector& modes, const RegularNonlinSpec& spec, double delta,
                                               int output_band) {
  spec.check();
  const int b = spec.band_limit;
  if (modes.size() != 2 * b + 1)
    throw InvalidArgument("nonlinearity error: expected " + std::to_string(2 * b + 1) + " modes");
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("nonlinearity error: delta must lie in [0, 1)");
  if (output_band < 0) throw InvalidArgument("nonlinearity error: output band must be non-negative");

  const int n = spec.samples;
  auto signal = [&](double angle) {
    double v = modes[0];
    for (int m = 1; m <= b; ++m) v += modes[2 * m - 1] * std::cos(m * angle) + modes[2 * m] * std::sin(m * angle);
    return v;
  };
  std::vector<double> shifted(static_cast<std::size_t>(n)), plain(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    shifted[static_cast<std::size_t>(t)] = apply_pointwise(spec.pointwise, signal(kTwoPi * (t + delta) / n));
    plain[static_cast<std::size_t>(t)] = apply_pointwise(spec.pointwise, signal(kTwoPi * t / n));
  }

  double measured = 0.0;
  {
    double ft = 0.0, tf = 0.0;
    for (int t = 0; t < n; ++t) {
      ft += shifted[static_cast<std::size_t>(t)];
      tf += plain[static_cast<std::size_t>(t)];
    }
    measured += std::abs(ft - tf) / n;
  }
  for (int m = 1; m <= output_band; ++m) {
    double fa = 0.0, fb = 0.0, ta = 0.0, tb = 0.0;
    for (int t = 0; t < n; ++t) {
      const double y_shift = shifted[static_cast<std::size_t>(t)], y = plain[static_cast<std::size_t>(t)];
      fa += std::cos(kTwoPi * m * t / n) * y_shift;
      fb += std::sin(kTwoPi * m * t / n) * y_shift;
      ta += std::cos(kTwoPi * m * (t - delta) / n) * y;
      tb += std::sin(kTwoPi * m * (t - delta) / n) * y;
    }
    measured += 2.0 / n * (std::abs(fa - ta) + std::abs(fb - tb));
  }

  double norm = std::abs(modes[0]), dnorm = 0.0;
  for (int m = 1; m <= b; ++m) {
    const double pair = std::abs(modes[2 * m - 1]) + std::abs(modes[2 * m]);
    norm += pair;
    dnorm += m * pair;
  }
  const double bp = output_band;
  const double bound =
      4.0 * kPi * lipschitz_constant(spec.pointwise) / n * ((2.0 * bp + 0.5) * dnorm + bp * (bp + 1.0) * norm);
  return {measured, bound};
}

std::vector<NonlinearitySweepRow> nonlinearity_sweep(const std::vector<int>& sample_counts, std::size_t trials,
                                                     int band_limit, int output_band, Pointwise pointwise,
                                                     std::uint64_t seed, int threads) {
  if (trials == 0) throw InvalidArgument("nonlinearity sweep: at least one trial required");
  for (int n : sample_counts) RegularNonlinSpec{band_limit, n, pointwise}.check();
  const std::size_t k = sample_counts.size();
  std::vector<std::vector<NonlinearityError>> results(trials, std::vector<NonlinearityError>(k));
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    Vector x(2 * band_limit + 1);
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = rng.normal();
    const double delta = rng.uniform();
    for (std::size_t c = 0; c < k; ++c)
      results[i][c] =
          nonlinearity_error_and_bound(x, RegularNonlinSpec{band_limit, sample_counts[c], pointwise}, delta,
                                       output_band);
  });

  std::vector<NonlinearitySweepRow> rows;
  for (std::size_t c = 0; c < k; ++c) {
    NonlinearitySweepRow row;
    row.samples = sample_counts[c];
    std::vector<double> measured;
    for (std::size_t i = 0; i < trials; ++i) {
      const auto& r = results[i][c];
      measured.push_back(r.measured);
      row.mean_measured += r.measured;
      row.mean_bound += r.bound;
      if (r.bound > 0.0) row.max_ratio = std::max(row.max_ratio, r.measured / r.bound);
      if (r.measured > r.bound) ++row.violations;
    }
    row.mean_measured /= static_cast<double>(trials);
    row.mean_bound /= static_cast<double>(trials);
    std::sort(measured.begin(), measured.end());
    const std::size_t mid = trials / 2;
    row.median_measured = trials % 2 ? measured[mid] : 0.5 * (measured[mid - 1] + measured[mid]);
    rows.push_back(row);
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) throw InvalidArgument("loglog_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw InvalidArgument("loglog_slope: x values must not all be equal");
  return sxy / sxx;
}

}  // namespace gem
