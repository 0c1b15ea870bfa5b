#include <gtest/gtest.h>

#include <gem/error.hpp>
#include <gem/network.hpp>
#include <gem/serialize.hpp>

#include "support.hpp"

namespace gem {
namespace {

using testing::random_field;

TEST(Sequential, EmptyNetworkIsIdentity) {
  const GaugeAtlas atlas = build_atlas(icosahedron());
  Rng rng(1);
  const FeatureField f = random_field(ReprType{0, 1}, atlas, rng);
  const ForwardTrace t = sequential(Network{ReprType{0, 1}, {}}, atlas, f);
  EXPECT_EQ(t.output.values, f.values);
  EXPECT_TRUE(t.checksums.empty());
}

TEST(Sequential, SevenIdentityConvsAreIdentity) {
  const GaugeAtlas atlas = build_atlas(testing::rough_grid(6, 6, 2.0, 1));
  Rng rng(2);
  const ReprType type = ReprType::scalars(3);
  Network net{type, {}};
  for (int k = 0; k < 7; ++k) net.layers.emplace_back(identity_conv_layer(type));
  const FeatureField f = random_field(type, atlas, rng);
  const ForwardTrace t = sequential(net, atlas, f);
  EXPECT_EQ(t.output.values, f.values);
  ASSERT_EQ(t.checksums.size(), 7u);
  for (std::uint64_t c : t.checksums) EXPECT_EQ(c, field_checksum(f));
}

TEST(Sequential, ShapeContract) {
  const GaugeAtlas atlas = build_atlas(icosahedron());
  Rng rng(3);
  Network net{ReprType{0},
              {conv_layer(ReprType{0}, ReprType{0, 1, 1, 2, 2}, 1), RegularNonlinSpec{2, 7, Pointwise::kRelu},
               conv_layer(ReprType{0, 1, 1, 2, 2}, ReprType{0}, 2)}};
  EXPECT_FALSE(is_regular_type(ReprType{0, 1, 1, 2, 2}, 2));
  EXPECT_THROW(net.check(), InvalidArgument);

  net.layers[0] = conv_layer(ReprType{0}, ReprType{0, 1, 2}, 1);
  net.layers[2] = conv_layer(ReprType{0, 1, 2}, ReprType{0}, 2);
  EXPECT_EQ(net.output_type(), ReprType{0});
  const ForwardTrace t = sequential(net, atlas, random_field(ReprType{0}, atlas, rng));
  EXPECT_EQ(t.output.values.rows(), 12);
  EXPECT_EQ(t.output.values.cols(), 1);
  EXPECT_EQ(t.checksums.size(), 3u);
}

TEST(Sequential, MismatchNamesTheLayer) {
  Network net{ReprType{0}, {conv_layer(ReprType{0}, ReprType{1}, 1), conv_layer(ReprType{0}, ReprType{0}, 2)}};
  try {
    net.check();
    FAIL() << "expected a type error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("layer 1"), std::string::npos) << e.what();
  }
  Network bad_nl{ReprType{0, 1}, {RegularNonlinSpec{1, 2, Pointwise::kRelu}}};
  try {
    bad_nl.check();
    FAIL() << "expected a Nyquist error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("layer 0"), std::string::npos) << e.what();
  }
}

TEST(Sequential, ReproducibleAcrossThreads) {
  const GaugeAtlas atlas = build_atlas(testing::rough_grid(8, 8, 1.5, 2));
  Rng rng(4);
  const Network net = regular_network(4, 2, {2, 9, Pointwise::kTanh}, 10);
  const FeatureField f = random_field(ReprType::scalars(2), atlas, rng);
  const ForwardTrace a = sequential(net, atlas, f, 1), b = sequential(net, atlas, f, 3);
  EXPECT_EQ(a.checksums, b.checksums);
  EXPECT_EQ(a.output.values, b.output.values);
}

TEST(RegularNetwork, LayoutAndReseeding) {
  const Network net = regular_network(7, 4, {2, 11, Pointwise::kRelu}, 5);
  ASSERT_EQ(net.layers.size(), 13u);
  int convs = 0;
  for (const Layer& l : net.layers) convs += std::holds_alternative<ConvLayer>(l);
  EXPECT_EQ(convs, 7);
  EXPECT_EQ(net.output_type(), ReprType::scalars(4));
  EXPECT_THROW(regular_network(1, 4, {2, 11, Pointwise::kRelu}, 5), InvalidArgument);

  const Network r1 = net.reseeded(1), r1b = net.reseeded(1), r2 = net.reseeded(2);
  const auto& w1 = std::get<ConvLayer>(r1.layers[0]).weights.w_neigh;
  EXPECT_EQ(w1, std::get<ConvLayer>(r1b.layers[0]).weights.w_neigh);
  EXPECT_NE(w1, std::get<ConvLayer>(r2.layers[0]).weights.w_neigh);

  Network fixed{ReprType{0}, {identity_conv_layer(ReprType{0})}};
  EXPECT_EQ(std::get<ConvLayer>(fixed.reseeded(3).layers[0]).weights.w_self,
            std::get<ConvLayer>(fixed.layers[0]).weights.w_self);
}

TEST(Serialize, NetworkRoundTrip) {
  Network net = regular_network(3, 2, {1, 5, Pointwise::kTanh}, 8);
  net.layers.emplace_back(identity_conv_layer(ReprType::scalars(2)));
  const std::string text = network_to_json(net);
  const Network back = network_from_json(text);
  EXPECT_EQ(network_to_json(back), text);
  const auto& a = std::get<ConvLayer>(net.layers[2]).weights;
  const auto& b = std::get<ConvLayer>(back.layers[2]).weights;
  EXPECT_EQ(a.w_neigh, b.w_neigh);
}

TEST(Serialize, NetworkShorthandAndErrors) {
  const Network net = network_from_json(R"({"format":"gem-network","version":1,
    "input_type":{"copies":2,"orders":[0]},
    "layers":[{"kind":"conv","type_in":[0,0],"type_out":{"copies":2,"orders":[0,1]},"seed":3},
              {"kind":"regular_nonlinearity","band_limit":1,"samples":5,"pointwise":"relu"}]})");
  EXPECT_EQ(net.output_type(), (ReprType{0, 1, 0, 1}));
  EXPECT_THROW(network_from_json(R"({"format":"gem-network","input_type":[0],"layers":[{"kind":"pool"}]})"),
               InvalidArgument);
  EXPECT_THROW(network_from_json(R"({"format":"gem-network","input_type":[0],
    "layers":[{"kind":"conv","type_in":[0],"type_out":[0],"w_self":[1],"w_neigh":[]}]})"),
               InvalidArgument);
  EXPECT_THROW(network_from_json(R"({"format":"gem-network","input_type":[0],
    "layers":[{"kind":"conv","type_in":[1],"type_out":[0],"seed":1}]})"),
               InvalidArgument);
  EXPECT_THROW(network_from_json("not json"), InvalidArgument);
}

TEST(Serialize, FieldJsonAndCsv) {
  const GaugeAtlas atlas = build_atlas(icosahedron());
  Rng rng(6);
  const FeatureField f = random_field(ReprType{0, 2}, atlas, rng);
  const FeatureField back = field_from_json(field_to_json(f));
  EXPECT_EQ(back.values, f.values);
  EXPECT_EQ(back.atlas_id, f.atlas_id);
  EXPECT_EQ(back.type, f.type);

  const std::string bare = R"({"format":"gem-field","version":1,"type":[0],"values":[[1],[2]]})";
  EXPECT_THROW(field_from_json(bare), InvalidArgument);
  EXPECT_EQ(field_from_json(bare, 99).atlas_id, 99u);
  EXPECT_THROW(field_from_json(R"({"format":"gem-field","type":[1],"atlas_id":"0000000000000001","values":[[1]]})"),
               InvalidArgument);

  const std::string csv = field_to_csv(f);
  EXPECT_EQ(csv.rfind("# type=[0,2] atlas_id=", 0), 0u);
  EXPECT_NE(csv.find("\nvertex,c0,c1,c2\n0,"), std::string::npos);
}

}  // namespace
}  // namespace gem
