#include "gem/layers.hpp"

#include <algorithm>
#include <cmath>

#include "gem/error.hpp"
#include "gem/numeric.hpp"
#include "gem/parallel.hpp"

namespace gem {

void FeatureField::check() const {
  if (values.cols() != type.dim())
    throw InvalidArgument("feature field: " + std::to_string(values.cols()) + " columns for type " +
                          type.to_string() + " of dimension " + std::to_string(type.dim()));
}

FeatureField transform_field(const FeatureField& field, const GaugeChange& change, std::uint64_t new_atlas_id) {
  field.check();
  if (change.angles.size() != field.vertex_count())
    throw InvalidArgument("transform_field: one gauge angle per vertex required");
  FeatureField out{field.type, field.values, new_atlas_id};
  for (Eigen::Index p = 0; p < out.values.rows(); ++p) {
    Vector row = out.values.row(p).transpose();
    apply_rep(out.type, -change.angles[static_cast<std::size_t>(p)], row);
    out.values.row(p) = row.transpose();
  }
  return out;
}

namespace {

// One (output entry, input entry) block of a layer with the offsets of its
// weights; weights are laid out in (output, input, basis) order.
struct BlockTerm {
  int out_offset;
  int in_offset;
  int in_order;
  int out_order;
  Eigen::Index self_weight;
  Eigen::Index neigh_weight;
};

std::vector<BlockTerm> plan_blocks(const LayerWeights& w) {
  std::vector<BlockTerm> terms;
  Eigen::Index ws = 0, wn = 0;
  for (std::size_t j = 0; j < w.type_out.size(); ++j)
    for (std::size_t i = 0; i < w.type_in.size(); ++i) {
      const int n = w.type_in.order(i), m = w.type_out.order(j);
      terms.push_back({w.type_out.offset(j), w.type_in.offset(i), n, m, ws, wn});
      ws += self_basis_count(n, m);
      wn += neigh_basis_count(n, m);
    }
  return terms;
}

// out += K_self x for one block.
void add_self(const BlockTerm& t, const Vector& w, const double* x, double* out) {
  const int n = t.in_order, m = t.out_order;
  if (n != m) return;
  const double* in = x + t.in_offset;
  double* o = out + t.out_offset;
  if (n == 0) {
    o[0] += w[t.self_weight] * in[0];
    return;
  }
  const double a = w[t.self_weight], b = w[t.self_weight + 1];
  // a * I + b * [[0, 1], [-1, 0]]
  o[0] += a * in[0] + b * in[1];
  o[1] += -b * in[0] + a * in[1];
}

// out += K_neigh(theta) x for one block, using cos/sin(k theta) tables.
void add_neigh(const BlockTerm& t, const Vector& w, const std::vector<double>& cs, const std::vector<double>& sn,
               const double* x, double* out) {
  const int n = t.in_order, m = t.out_order;
  const double* in = x + t.in_offset;
  double* o = out + t.out_offset;
  const double* wk = w.data() + t.neigh_weight;
  if (n == 0 && m == 0) {
    o[0] += wk[0] * in[0];
  } else if (m == 0) {
    const double c = cs[n], s = sn[n];
    o[0] += (wk[0] * c + wk[1] * s) * in[0] + (wk[0] * s - wk[1] * c) * in[1];
  } else if (n == 0) {
    const double c = cs[m], s = sn[m];
    o[0] += (wk[0] * c + wk[1] * s) * in[0];
    o[1] += (wk[0] * s - wk[1] * c) * in[0];
  } else {
    const int dminus = m - n;
    const double cm = cs[std::abs(dminus)];
    const double sm = dminus < 0 ? -sn[-dminus] : sn[dminus];
    const double cp = cs[m + n], sp = sn[m + n];
    const double k00 = wk[0] * cm + wk[1] * sm + wk[2] * cp - wk[3] * sp;
    const double k01 = -wk[0] * sm + wk[1] * cm + wk[2] * sp + wk[3] * cp;
    const double k10 = wk[0] * sm - wk[1] * cm + wk[2] * sp + wk[3] * cp;
    const double k11 = wk[0] * cm + wk[1] * sm - wk[2] * cp + wk[3] * sp;
    o[0] += k00 * in[0] + k01 * in[1];
    o[1] += k10 * in[0] + k11 * in[1];
  }
}

int max_order(const ReprType& t) {
  int best = 0;
  for (int o : t.orders()) best = std::max(best, o);
  return best;
}

}  // namespace

FeatureField gem_conv(const GaugeAtlas& atlas, const LayerWeights& weights, const FeatureField& field,
                      int threads) {
  weights.check();
  field.check();
  if (field.atlas_id != atlas.id())
    throw InvalidArgument("gem_conv: field is expressed in a different gauge than the atlas");
  if (!(field.type == weights.type_in))
    throw InvalidArgument("gem_conv: field type " + field.type.to_string() + " does not match layer input " +
                          weights.type_in.to_string());
  if (field.vertex_count() != atlas.size())
    throw InvalidArgument("gem_conv: field and atlas disagree on the vertex count");

  const auto terms = plan_blocks(weights);
  const int kmax = max_order(weights.type_in) + max_order(weights.type_out);
  FeatureField out{weights.type_out, FieldValues::Zero(field.values.rows(), weights.type_out.dim()), atlas.id()};

  parallel_for(atlas.size(), threads, [&](std::size_t p) {
    std::vector<double> cs(static_cast<std::size_t>(kmax + 1)), sn(static_cast<std::size_t>(kmax + 1));
    Vector moved(weights.type_in.dim());
    Vector acc = Vector::Zero(weights.type_out.dim());
    const Vector fp = field.values.row(static_cast<Eigen::Index>(p)).transpose();
    for (const BlockTerm& t : terms) add_self(t, weights.w_self, fp.data(), acc.data());
    for (const NeighborAngles& nb : atlas[static_cast<VertexId>(p)].neighbors) {
      moved = field.values.row(nb.id).transpose();
      apply_rep(weights.type_in, nb.transport, moved);
      for (int k = 0; k <= kmax; ++k) {
        cs[static_cast<std::size_t>(k)] = std::cos(k * nb.theta);
        sn[static_cast<std::size_t>(k)] = std::sin(k * nb.theta);
      }
      for (const BlockTerm& t : terms) add_neigh(t, weights.w_neigh, cs, sn, moved.data(), acc.data());
    }
    out.values.row(static_cast<Eigen::Index>(p)) = acc.transpose();
  });
  return out;
}

FeatureField graph_conv(const Matrix& k_self, const Matrix& k_neigh, const FeatureField& field,
                        const std::vector<std::vector<VertexId>>& adjacency) {
  field.check();
  if (k_self.cols() != field.type.dim() || k_neigh.cols() != field.type.dim() || k_self.rows() != k_neigh.rows())
    throw InvalidArgument("graph_conv: kernel shapes do not match the field's channel count");
  if (adjacency.size() != field.vertex_count())
    throw InvalidArgument("graph_conv: adjacency and field disagree on the vertex count");
  FeatureField out{ReprType::scalars(static_cast<int>(k_self.rows())),
                   FieldValues::Zero(field.values.rows(), k_self.rows()), field.atlas_id};
  for (std::size_t p = 0; p < adjacency.size(); ++p) {
    Vector sum = Vector::Zero(field.type.dim());
    for (VertexId q : adjacency[p]) sum += field.values.row(q).transpose();
    out.values.row(static_cast<Eigen::Index>(p)) =
        (k_self * field.values.row(static_cast<Eigen::Index>(p)).transpose() + k_neigh * sum).transpose();
  }
  return out;
}

double apply_pointwise(Pointwise f, double x) {
  switch (f) {
    case Pointwise::kRelu: return x > 0.0 ? x : 0.0;
    case Pointwise::kIdentity: return x;
    case Pointwise::kTanh: return std::tanh(x);
  }
  return x;
}

double lipschitz_constant(Pointwise) { return 1.0; }

std::string to_string(Pointwise f) {
  switch (f) {
    case Pointwise::kRelu: return "relu";
    case Pointwise::kIdentity: return "identity";
    case Pointwise::kTanh: return "tanh";
  }
  return "unknown";
}

Pointwise pointwise_from_string(const std::string& name) {
  if (name == "relu") return Pointwise::kRelu;
  if (name == "identity") return Pointwise::kIdentity;
  if (name == "tanh") return Pointwise::kTanh;
  throw InvalidArgument("unknown pointwise function '" + name + "' (expected relu, identity or tanh)");
}

DftMatrices dft_matrices(int band_limit, int samples) {
  if (band_limit < 0) throw InvalidArgument("band limit must be non-negative");
  if (samples < 2 * band_limit + 1)
    throw InvalidArgument("Nyquist violation: " + std::to_string(samples) + " samples cannot resolve band limit " +
                          std::to_string(band_limit) + " (need at least " + std::to_string(2 * band_limit + 1) + ")");
  const int modes = 2 * band_limit + 1;
  DftMatrices d{Matrix(samples, modes), Matrix(modes, samples)};
  const double n = samples;
  for (int t = 0; t < samples; ++t) {
    d.synthesis(t, 0) = 1.0;
    d.analysis(0, t) = 1.0 / n;
    for (int m = 1; m <= band_limit; ++m) {
      const double angle = kTwoPi * m * t / n;
      d.synthesis(t, 2 * m - 1) = std::cos(angle);
      d.synthesis(t, 2 * m) = std::sin(angle);
      d.analysis(2 * m - 1, t) = 2.0 / n * std::cos(angle);
      d.analysis(2 * m, t) = 2.0 / n * std::sin(angle);
    }
  }
  return d;
}

void RegularNonlinSpec::check() const {
  if (band_limit < 0) throw InvalidArgument("regular nonlinearity: band limit must be non-negative");
  if (samples < 2 * band_limit + 1)
    throw InvalidArgument("Nyquist violation: regular nonlinearity with band limit " + std::to_string(band_limit) +
                          " needs at least " + std::to_string(2 * band_limit + 1) + " samples, got " +
                          std::to_string(samples));
}

bool is_regular_type(const ReprType& type, int band_limit) {
  const std::size_t period = static_cast<std::size_t>(band_limit) + 1;
  if (type.size() == 0 || type.size() % period != 0) return false;
  for (std::size_t i = 0; i < type.size(); ++i)
    if (type.order(i) != static_cast<int>(i % period)) return false;
  return true;
}

RegularNonlinearity::RegularNonlinearity(const RegularNonlinSpec& spec)
    : spec_(spec), dft_((spec.check(), dft_matrices(spec.band_limit, spec.samples))) {}

Vector RegularNonlinearity::apply_modes(const Vector& modes) const {
  Vector samples = dft_.synthesis * modes;
  for (Eigen::Index t = 0; t < samples.size(); ++t) samples[t] = apply_pointwise(spec_.pointwise, samples[t]);
  return dft_.analysis * samples;
}

FeatureField RegularNonlinearity::operator()(const FeatureField& field, int threads) const {
  field.check();
  if (!is_regular_type(field.type, spec_.band_limit))
    throw InvalidArgument("regular nonlinearity: type " + field.type.to_string() + " is not copies of [0.." +
                          std::to_string(spec_.band_limit) + "]");
  const int width = 2 * spec_.band_limit + 1;
  const int copies = field.type.dim() / width;
  FeatureField out{field.type, FieldValues(field.values.rows(), field.values.cols()), field.atlas_id};
  parallel_for(field.vertex_count(), threads, [&](std::size_t p) {
    const auto row = static_cast<Eigen::Index>(p);
    for (int c = 0; c < copies; ++c) {
      const Vector modes = field.values.block(row, c * width, 1, width).transpose();
      out.values.block(row, c * width, 1, width) = apply_modes(modes).transpose();
    }
  });
  return out;
}

FeatureField regular_nonlinearity(const RegularNonlinSpec& spec, const FeatureField& field, int threads) {
  return RegularNonlinearity(spec)(field, threads);
}

}  // namespace gem
