#include <cmath>

#include <gtest/gtest.h>

#include <gem/error.hpp>
#include <gem/layers.hpp>
#include <gem/numeric.hpp>

#include "support.hpp"

namespace gem {
namespace {

using testing::max_abs_diff;
using testing::random_field;

// Centre vertex 0 with neighbours 1..3 at the given angles, all transporters
// zero; the neighbours only see the centre.
GaugeAtlas one_ring(const std::array<double, 3>& angles) {
  std::vector<VertexGauge> v(4);
  v[0] = {Vec3::UnitZ(), 1, Vec3::UnitX(), Vec3::UnitY(),
          {{1, angles[0], 0.0}, {2, angles[1], 0.0}, {3, angles[2], 0.0}}};
  for (int q = 1; q <= 3; ++q) v[static_cast<std::size_t>(q)] = {Vec3::UnitZ(), 0, Vec3::UnitX(), Vec3::UnitY(), {{0, 0.0, 0.0}}};
  return GaugeAtlas(std::move(v));
}

FeatureField ring_features(const GaugeAtlas& atlas) {
  FeatureField f{ReprType{0}, FieldValues(4, 1), atlas.id()};
  f.values << 0.0, 1.0, 2.0, 3.0;
  return f;
}

// Direct evaluation of the defining sum with dense kernels and representations.
FieldValues dense_conv(const GaugeAtlas& atlas, const LayerWeights& w, const FeatureField& f) {
  FieldValues out = FieldValues::Zero(f.values.rows(), w.type_out.dim());
  for (std::size_t p = 0; p < atlas.size(); ++p) {
    const auto row = static_cast<Eigen::Index>(p);
    Vector acc = assemble_kernels(w, 0.0).self * f.values.row(row).transpose();
    for (const auto& nb : atlas[static_cast<VertexId>(p)].neighbors)
      acc += assemble_kernels(w, nb.theta).neigh * rep(w.type_in, nb.transport) * f.values.row(nb.id).transpose();
    out.row(row) = acc.transpose();
  }
  return out;
}

TEST(GemConv, IdentityConfiguration) {
  const Mesh mesh = icosahedron();
  const GaugeAtlas atlas = build_atlas(mesh);
  Rng rng(1);
  const FeatureField f = random_field(ReprType{0}, atlas, rng);
  const LayerWeights w{ReprType{0}, ReprType{0}, Vector::Ones(1), Vector::Zero(1)};
  EXPECT_EQ(gem_conv(atlas, w, f).values, f.values);
}

TEST(GemConv, ScalarKernelMatchesGraphConv) {
  const Mesh mesh = testing::rough_grid(6, 7, 2.0, 3);
  const GaugeAtlas atlas = build_atlas(mesh);
  Rng rng(2);
  const FeatureField f = random_field(ReprType{0}, atlas, rng);
  const double a = 0.7, b = -1.3;
  const LayerWeights w{ReprType{0}, ReprType{0}, Vector::Constant(1, a), Vector::Constant(1, b)};
  const FeatureField g = graph_conv(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), f, atlas.adjacency());
  EXPECT_LT(max_abs_diff(gem_conv(atlas, w, f).values, g.values), 1e-12);
}

TEST(GemConv, MatchesDenseSum) {
  const Mesh mesh = testing::rough_grid(5, 5, 2.0, 11);
  const GaugeAtlas atlas = build_atlas(mesh);
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const ReprType in = testing::random_type(rng, 4, 3);
    const ReprType out = testing::random_type(rng, 4, 3);
    const LayerWeights w = init_weights(in, out, rng.next_u64());
    const FeatureField f = random_field(in, atlas, rng);
    EXPECT_LT(max_abs_diff(gem_conv(atlas, w, f).values, dense_conv(atlas, w, f)), 1e-12)
        << in.to_string() << " -> " << out.to_string();
  }
}

TEST(GemConv, SeparatesNeighbourhoodsIsotropicKernelCannot) {
  const GaugeAtlas even = one_ring({0.0, kTwoPi / 3.0, 2.0 * kTwoPi / 3.0});
  const GaugeAtlas skewed = one_ring({0.0, kPi / 6.0, 2.0 * kTwoPi / 3.0});
  const LayerWeights w{ReprType{0}, ReprType{1}, Vector(0), (Vector(2) << 1.0, 0.0).finished()};

  const FieldValues a = gem_conv(even, w, ring_features(even)).values;
  const FieldValues b = gem_conv(skewed, w, ring_features(skewed)).values;
  const double r3 = std::sqrt(3.0);
  EXPECT_NEAR(a(0, 0), -1.5, 1e-12);
  EXPECT_NEAR(a(0, 1), -r3 / 2.0, 1e-12);
  EXPECT_NEAR(b(0, 0), r3 - 0.5, 1e-12);
  EXPECT_NEAR(b(0, 1), 1.0 - 1.5 * r3, 1e-12);

  const Matrix zero = Matrix::Zero(1, 1), one = Matrix::Ones(1, 1);
  const FieldValues ga = graph_conv(zero, one, ring_features(even), even.adjacency()).values;
  const FieldValues gb = graph_conv(zero, one, ring_features(skewed), skewed.adjacency()).values;
  EXPECT_EQ(ga(0, 0), 6.0);
  EXPECT_EQ(gb(0, 0), 6.0);
}

class GaugeEquivariance : public ::testing::TestWithParam<int> {};

TEST_P(GaugeEquivariance, TransformThenConvolveEqualsConvolveThenTransform) {
  const Mesh mesh = GetParam() == 0 ? icosahedron() : testing::rough_grid(8, 8, 2.0, 17);
  const GaugeAtlas atlas = build_atlas(mesh);
  Rng rng(100 + static_cast<std::uint64_t>(GetParam()));
  for (int draw = 0; draw < 20; ++draw) {
    const ReprType in = testing::random_type(rng, 3, 3);
    const ReprType out = testing::random_type(rng, 3, 3);
    const LayerWeights w = init_weights(in, out, rng.next_u64());
    const FeatureField f = random_field(in, atlas, rng);
    const GaugeChange change = random_gauge_change(atlas.size(), rng);
    const GaugeAtlas moved = apply_gauge_change(atlas, change);

    const FeatureField lhs = gem_conv(moved, w, transform_field(f, change, moved.id()));
    const FeatureField rhs = transform_field(gem_conv(atlas, w, f), change, moved.id());
    EXPECT_LT(max_abs_diff(lhs.values, rhs.values), 1e-9) << in.to_string() << " -> " << out.to_string();
  }
}

INSTANTIATE_TEST_SUITE_P(Meshes, GaugeEquivariance, ::testing::Values(0, 1));

TEST(GemConv, LinearInFieldAndWeights) {
  const Mesh mesh = icosahedron();
  const GaugeAtlas atlas = build_atlas(mesh);
  Rng rng(8);
  const ReprType in{0, 1, 2}, out{1, 0, 3};
  const LayerWeights w1 = init_weights(in, out, 1), w2 = init_weights(in, out, 2);
  const FeatureField f = random_field(in, atlas, rng), g = random_field(in, atlas, rng);
  const double a = 0.37, b = -2.1;

  FeatureField combo{in, a * f.values + b * g.values, atlas.id()};
  EXPECT_LT(max_abs_diff(gem_conv(atlas, w1, combo).values,
                         a * gem_conv(atlas, w1, f).values + b * gem_conv(atlas, w1, g).values),
            1e-12);

  const LayerWeights wc{in, out, a * w1.w_self + b * w2.w_self, a * w1.w_neigh + b * w2.w_neigh};
  EXPECT_LT(max_abs_diff(gem_conv(atlas, wc, f).values,
                         a * gem_conv(atlas, w1, f).values + b * gem_conv(atlas, w2, f).values),
            1e-12);
}

TEST(GemConv, BitIdenticalAcrossThreadCounts) {
  const Mesh mesh = testing::rough_grid(10, 10, 1.0, 4);
  const GaugeAtlas atlas = build_atlas(mesh);
  Rng rng(9);
  const ReprType type = ReprType::regular(2, 2);
  const LayerWeights w = init_weights(type, type, 77);
  const FeatureField f = random_field(type, atlas, rng);
  const FieldValues serial = gem_conv(atlas, w, f, 1).values;
  for (int threads : {2, 3, 8}) EXPECT_EQ(gem_conv(atlas, w, f, threads).values, serial);
}

TEST(GemConv, RejectsMismatches) {
  const GaugeAtlas atlas = build_atlas(icosahedron());
  Rng rng(3);
  const LayerWeights w = init_weights(ReprType{0, 1}, ReprType{0}, 1);
  EXPECT_THROW(gem_conv(atlas, w, random_field(ReprType{1, 0}, atlas, rng)), InvalidArgument);
  FeatureField stale = random_field(ReprType{0, 1}, atlas, rng);
  stale.atlas_id ^= 1;
  EXPECT_THROW(gem_conv(atlas, w, stale), InvalidArgument);
}

TEST(GraphConv, IdentityAndPermutationInvariance) {
  const GaugeAtlas atlas = build_atlas(icosahedron());
  Rng rng(4);
  const FeatureField f = random_field(ReprType::scalars(3), atlas, rng);
  EXPECT_EQ(graph_conv(Matrix::Identity(3, 3), Matrix::Zero(3, 3), f, atlas.adjacency()).values, f.values);

  Matrix ks = Matrix::Random(2, 3), kn = Matrix::Random(2, 3);
  auto adjacency = atlas.adjacency();
  const FieldValues base = graph_conv(ks, kn, f, adjacency).values;
  for (auto& nbrs : adjacency) std::reverse(nbrs.begin(), nbrs.end());
  EXPECT_LT(max_abs_diff(graph_conv(ks, kn, f, adjacency).values, base), 1e-14);
  EXPECT_THROW(graph_conv(Matrix::Zero(2, 2), kn, f, adjacency), InvalidArgument);
}

TEST(Dft, AnalysisInvertsSynthesis) {
  for (int b = 0; b <= 4; ++b)
    for (int n : {2 * b + 1, 2 * b + 2, 17, 101}) {
      const DftMatrices d = dft_matrices(b, n);
      EXPECT_LT((d.analysis * d.synthesis - Matrix::Identity(2 * b + 1, 2 * b + 1)).cwiseAbs().maxCoeff(), 1e-12)
          << "b=" << b << " N=" << n;
    }
}

TEST(Dft, SmallCases) {
  const DftMatrices trivial = dft_matrices(0, 1);
  EXPECT_EQ(trivial.synthesis, Matrix::Ones(1, 1));
  EXPECT_EQ(trivial.analysis, Matrix::Ones(1, 1));

  const DftMatrices d = dft_matrices(1, 3);
  const Vector samples = d.synthesis * Vector((Vector(3) << 2.5, 0.0, 0.0).finished());
  for (Eigen::Index t = 0; t < 3; ++t) EXPECT_EQ(samples[t], 2.5);
  EXPECT_THROW(dft_matrices(2, 4), InvalidArgument);
}

TEST(RegularNonlinearity, IdentityAndPositiveConstant) {
  const GaugeAtlas atlas = build_atlas(icosahedron());
  Rng rng(6);
  const ReprType type = ReprType::regular(3, 2);
  const FeatureField f = random_field(type, atlas, rng);
  const FeatureField id = regular_nonlinearity({2, 7, Pointwise::kIdentity}, f);
  EXPECT_LT(max_abs_diff(id.values, f.values), 1e-12);

  FeatureField positive{type, FieldValues::Zero(12, type.dim()), atlas.id()};
  for (int c = 0; c < 3; ++c) positive.values.col(c * 5).setConstant(1.5 + c);
  EXPECT_LT(max_abs_diff(regular_nonlinearity({2, 9, Pointwise::kRelu}, positive).values, positive.values), 1e-12);
}

TEST(RegularNonlinearity, ExactlyEquivariantAtSampleShifts) {
  Rng rng(12);
  for (int b : {1, 2, 3})
    for (int n : {2 * b + 1, 10, 13}) {
      const RegularNonlinearity nl({b, n, Pointwise::kRelu});
      const ReprType type = ReprType::regular(1, b);
      for (int k = 0; k < n; ++k) {
        Vector x(2 * b + 1);
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
        const double g = kTwoPi * k / n;
        Vector shifted_in = x;
        apply_rep(type, -g, shifted_in);
        Vector shifted_out = nl.apply_modes(x);
        apply_rep(type, -g, shifted_out);
        EXPECT_LT((nl.apply_modes(shifted_in) - shifted_out).cwiseAbs().maxCoeff(), 1e-12)
            << "b=" << b << " N=" << n << " k=" << k;
      }
    }
}

TEST(RegularNonlinearity, RejectsBadTypesAndSampling) {
  const GaugeAtlas atlas = build_atlas(icosahedron());
  Rng rng(7);
  EXPECT_THROW(regular_nonlinearity({2, 7, Pointwise::kRelu}, random_field(ReprType{0, 1}, atlas, rng)),
               InvalidArgument);
  EXPECT_THROW(regular_nonlinearity({1, 7, Pointwise::kRelu}, random_field(ReprType{0, 1, 0, 2}, atlas, rng)),
               InvalidArgument);
  EXPECT_THROW(RegularNonlinearity({2, 4, Pointwise::kRelu}), InvalidArgument);
  EXPECT_TRUE(is_regular_type(ReprType{0, 1, 2, 0, 1, 2}, 2));
  EXPECT_FALSE(is_regular_type(ReprType{0, 1, 2, 0, 1}, 2));
  EXPECT_THROW(pointwise_from_string("sigmoid"), InvalidArgument);
}

TEST(TransformField, ScalarsUnchangedVectorsRotate) {
  const GaugeAtlas atlas = build_atlas(icosahedron());
  Rng rng(10);
  const FeatureField f = random_field(ReprType{0, 1}, atlas, rng);
  GaugeChange change{std::vector<double>(12, kPi / 2.0)};
  const FeatureField g = transform_field(f, change, 42);
  EXPECT_EQ(g.atlas_id, 42u);
  for (Eigen::Index p = 0; p < 12; ++p) {
    EXPECT_EQ(g.values(p, 0), f.values(p, 0));
    // rho_1(-pi/2) (x, y) = (y, -x)
    EXPECT_NEAR(g.values(p, 1), f.values(p, 2), 1e-15);
    EXPECT_NEAR(g.values(p, 2), -f.values(p, 1), 1e-15);
  }
}

}  // namespace
}  // namespace gem
