/*
 * Copyright 2026 The ab2h Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ab2h/nn.h"

#include <gtest/gtest.h>

#include "net_fixture.h"
#include "test_util.h"

namespace ab2h {
namespace {

const FixedPointConfig kFp(13);

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

const char* kTwoLayer = R"(
# comment
[network]
layers = 2       ; trailing comment
input = in.ab2s

[layer1]
in_dim = 6
out_dim = 4
activation = relu
splits = 2
weights_csv = w1.csv

[layer2]
in_dim = 4
out_dim = 3
)";

TEST(NetworkConfig, ParsesDefaultsAndPaths) {
  const auto c = NetworkConfig::parse(kTwoLayer, "/cfg", "/work");
  ASSERT_EQ(c.layers.size(), 2u);
  EXPECT_EQ(c.input, "/work/in.ab2s");
  EXPECT_EQ(c.output, "/work/output.ab2s");
  EXPECT_EQ(c.layers[0].activation, Activation::kRelu);
  EXPECT_EQ(c.layers[0].splits, 2u);
  EXPECT_EQ(c.layers[0].weights_csv, "/cfg/w1.csv");
  EXPECT_EQ(c.layers[1].weights, "/work/layer2_weights.ab2s");
  EXPECT_EQ(c.layers[1].splits, 1u);
  EXPECT_EQ(c.scratch_file(1), "/work/scratch/layer1.ab2s");
}

std::string with(std::string text, const std::string& from,
                 const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

TEST(NetworkConfig, Rejections) {
  auto parse = [](const std::string& t) {
    return code_of([&] { NetworkConfig::parse(t, ".", "."); });
  };
  EXPECT_EQ(parse(with(kTwoLayer, "in_dim = 4", "in_dim = 5")),
            ErrorCode::kChain);
  EXPECT_EQ(parse(with(kTwoLayer, "splits = 2", "splits = 5")),
            ErrorCode::kDimsMismatch);
  EXPECT_EQ(parse(with(kTwoLayer, "out_dim = 3", "out_dim = 3\nactivation = relu")),
            ErrorCode::kConfig);
  EXPECT_EQ(parse(with(kTwoLayer, "activation = relu", "activation = tanh")),
            ErrorCode::kConfig);
  EXPECT_EQ(parse(with(kTwoLayer, "layers = 2", "layers = 3")),
            ErrorCode::kConfig);
  EXPECT_EQ(parse(with(kTwoLayer, "out_dim = 4", "out_dim = -4")),
            ErrorCode::kConfig);
  EXPECT_EQ(parse("[layer1]\nin_dim=1\n"), ErrorCode::kConfig);
}

TEST(NetworkConfig, TopologyDigestTracksShape) {
  const auto a = NetworkConfig::parse(kTwoLayer, ".", ".");
  const auto b = NetworkConfig::parse(kTwoLayer, "/x", "/y");
  const auto c =
      NetworkConfig::parse(with(kTwoLayer, "splits = 2", "splits = 3"), ".", ".");
  EXPECT_EQ(a.topology_digest(), b.topology_digest());
  EXPECT_NE(a.topology_digest(), c.topology_digest());
  EXPECT_NE(a.topology_digest(), 0u);
}

TEST(RunNetwork, AgreesWithClearInference) {
  std::mt19937_64 gen(21);
  const auto net = testing::random_network({20, 8, 5}, gen);
  const auto root = testing::temp_dir("nn_run");
  Loopback lb;
  const auto staged =
      testing::stage_network(net, {3, 2}, root, kFp, lb.dealer_rng());
  std::uniform_real_distribution<double> px(0, 1);
  for (int k = 0; k < 5; ++k) {
    std::vector<double> x(20);
    for (auto& v : x) v = px(gen);
    testing::stage_input(staged, x, kFp, lb.dealer_rng());
    const auto [r0, r1] = testing::run_staged(lb, staged);
    const auto want = oracle::clear_infer(net, x, kFp);
    if (oracle::top2_gap(oracle::float_infer(net, x).logits) > 0.01) {
      EXPECT_EQ(testing::staged_label(staged), static_cast<int>(want.label));
    }
    // Hidden layer shares stay within a couple of ulp of the oracle.
    const auto y = reconstruct_arith(
        read_arith_file(staged.cfg[0].scratch_file(2)),
        read_arith_file(staged.cfg[1].scratch_file(2)));
    for (std::size_t i = 0; i < y.size(); ++i) {
      EXPECT_LE(std::llabs(testing::ulps(y[i], want.logits[i])), 8);
    }
    EXPECT_EQ(r0.total.peer.frames_out, r1.total.peer.frames_out);
  }
}

TEST(RunNetwork, ReportLinesMatchOracleCounts) {
  std::mt19937_64 gen(22);
  const auto net = testing::random_network({12, 6, 4}, gen);
  const auto root = testing::temp_dir("nn_report");
  Loopback lb;
  const auto staged =
      testing::stage_network(net, {2, 1}, root, kFp, lb.dealer_rng());
  testing::stage_input(staged, std::vector<double>(12, 0.5), kFp,
                       lb.dealer_rng());
  const auto [r0, r1] = testing::run_staged(lb, staged);
  const auto want = oracle::count_network(staged.cfg[0].shapes());
  EXPECT_EQ(r0.total.peer.frames_out, want.peer_exchanges);
  EXPECT_EQ(r0.total.peer.bytes_out, want.peer_bytes);
  EXPECT_EQ(r0.total.helper.bytes_out, want.helper_bytes_out);
  EXPECT_EQ(r0.total.triples, want.triples);
  const std::string text = r0.to_text();
  for (const char* key :
       {"layers=2\n", "layer1_peak_elements=", "layer2_rounds=1\n",
        "argmax_rounds=134\n", "helper_round_trips=", "wall_ms="}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}

TEST(RunLayer, FileChecks) {
  std::mt19937_64 gen(23);
  const auto net = testing::random_network({4, 3, 2}, gen);
  const auto root = testing::temp_dir("nn_checks");
  Loopback lb;
  auto staged = testing::stage_network(net, {}, root, kFp, lb.dealer_rng());
  testing::stage_input(staged, {0.1, 0.2, 0.3, 0.4}, kFp, lb.dealer_rng());
  auto run_expect = [&](ErrorCode want) {
    EXPECT_EQ(code_of([&] { testing::run_staged(lb, staged); }), want);
  };
  // Server 1 gets server 0's input file.
  std::filesystem::copy_file(staged.cfg[0].input, staged.cfg[1].input,
                             std::filesystem::copy_options::overwrite_existing);
  run_expect(ErrorCode::kShareMismatch);
}

TEST(RunLayer, WrongDimsInFile) {
  std::mt19937_64 gen(24);
  const auto net = testing::random_network({4, 3, 2}, gen);
  const auto root = testing::temp_dir("nn_dims");
  Loopback lb;
  auto staged = testing::stage_network(net, {}, root, kFp, lb.dealer_rng());
  testing::stage_input(staged, {0.1, 0.2, 0.3}, kFp, lb.dealer_rng());
  EXPECT_EQ(code_of([&] { testing::run_staged(lb, staged); }),
            ErrorCode::kDimsMismatch);
}

TEST(RunLayer, FractionalBitsMustMatchSession) {
  std::mt19937_64 gen(25);
  const auto net = testing::random_network({4, 3, 2}, gen);
  const auto root = testing::temp_dir("nn_fbits");
  Loopback lb;
  auto staged = testing::stage_network(net, {}, root, FixedPointConfig(12),
                                       lb.dealer_rng());
  testing::stage_input(staged, {0.1, 0.2, 0.3, 0.4}, FixedPointConfig(12),
                       lb.dealer_rng());
  EXPECT_EQ(code_of([&] { testing::run_staged(lb, staged); }),
            ErrorCode::kFileFormat);
}

TEST(SplitScaling, SmallLayerHoldsTheBound) {
  const auto pts = measure_split_scaling(64, 96, true, {1, 2, 4, 8}, kFp, 3);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_TRUE(split_bound_holds(pts, 96 + 64));
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_LT(pts[i].peak_elements, pts[i - 1].peak_elements);
  }
  EXPECT_FALSE(split_bound_holds({{2, 10}}, 0));
}

}  // namespace
}  // namespace ab2h
