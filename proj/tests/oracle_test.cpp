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

#include "ab2h/oracle.h"

#include <gtest/gtest.h>

#include "ab2h/csv.h"
#include "ab2h/nn.h"
#include "ab2h/roles.h"

namespace ab2h::oracle {
namespace {

const std::filesystem::path kRoot = AB2H_SOURCE_DIR;

TEST(FixedLayer, HandWorkedExample) {
  const FixedPointConfig fp(4);
  // W = [[1, -0.5], [0.25, 2]], x = [2, 3], b = [0.5, -10]
  const Ring w[] = {encode(1.0, fp), encode(-0.5, fp), encode(0.25, fp),
                    encode(2.0, fp)};
  const Ring x[] = {encode(2.0, fp), encode(3.0, fp)};
  const Ring b[] = {encode(0.5, fp), encode(-10.0, fp)};
  auto y = fixed_layer(w, 2, 2, x, b, false, fp);
  EXPECT_EQ(decode(y[0], fp), 1.0);
  EXPECT_EQ(decode(y[1], fp), -3.5);
  y = fixed_layer(w, 2, 2, x, b, true, fp);
  EXPECT_EQ(decode(y[1], fp), 0.0);
}

TEST(FixedLayer, ShapeErrors) {
  const FixedPointConfig fp(4);
  const Ring one[] = {1};
  EXPECT_THROW(fixed_layer(one, 2, 2, one, one, false, fp), Error);
}

TEST(Argmax, FirstMaximumWins) {
  const Ring v[] = {from_signed(-5), 7, 7, 3};
  EXPECT_EQ(argmax(std::span<const Ring>(v)), 1u);
  const double d[] = {0.1, 0.3, 0.3};
  EXPECT_EQ(argmax(std::span<const double>(d)), 1u);
  EXPECT_EQ(top2_gap(d), 0.0);
  const double e[] = {4.0, 1.0, 2.5};
  EXPECT_EQ(top2_gap(e), 1.5);
}

TEST(CheckNetwork, ChainAndShapes) {
  ClearNetwork net(2);
  net[0] = {3, 2, true, std::vector<double>(6), std::vector<double>(2)};
  net[1] = {2, 1, false, std::vector<double>(2), std::vector<double>(1)};
  EXPECT_NO_THROW(check_network(net));
  net[1].in_dim = 3;
  net[1].weights.resize(3);
  EXPECT_THROW(check_network(net), Error);
  EXPECT_THROW(check_network({}), Error);
}

struct Labelled {
  std::vector<std::vector<double>> images;
  std::vector<int> labels;
};

Labelled load_test_digits() {
  const auto m = read_csv(kRoot / "fixtures/mnist/test_200.csv");
  Labelled out;
  for (std::size_t r = 0; r < m.rows; ++r) {
    out.labels.push_back(static_cast<int>(m.values[r * m.cols]));
    out.images.emplace_back(m.values.begin() + r * m.cols + 1,
                            m.values.begin() + (r + 1) * m.cols);
  }
  return out;
}

ClearNetwork desk_model() {
  return load_clear_network(
      NetworkConfig::load(kRoot / "fixtures/desk_model/network.ini"));
}

TEST(DeskModel, ShapesAndTestSet) {
  const auto net = desk_model();
  ASSERT_EQ(net.size(), 2u);
  EXPECT_EQ(net[0].in_dim, 784u);
  EXPECT_EQ(net[0].out_dim, 32u);
  EXPECT_TRUE(net[0].relu);
  EXPECT_EQ(net[1].out_dim, 10u);
  const auto t = load_test_digits();
  EXPECT_EQ(t.images.size(), 200u);
  EXPECT_EQ(t.images[0].size(), 784u);
}

TEST(DeskModel, FloatAccuracyMatchesModelCard) {
  const auto net = desk_model();
  const auto t = load_test_digits();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < t.images.size(); ++i) {
    correct += float_infer(net, t.images[i]).label ==
               static_cast<std::size_t>(t.labels[i]);
  }
  // MODEL.txt records float_test_accuracy=0.9350 on these 200 digits.
  EXPECT_EQ(correct, 187u);
}

TEST(DeskModel, FixedPointAgreementAndErrorOrdering) {
  const auto net = desk_model();
  const auto t = load_test_digits();
  const int fs[] = {6, 13, 24};
  const auto rows = error_vs_fractional_bits(net, t.images, fs);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GE(rows[0].agreement, 0.99);
  EXPECT_EQ(rows[1].agreement, 1.0);
  EXPECT_LT(rows[2].mean_l2, rows[1].mean_l2);
  EXPECT_LT(rows[1].mean_l2, rows[0].mean_l2);
}

TEST(FloatInfer, InputLengthChecked) {
  const auto net = desk_model();
  const std::vector<double> short_input(10);
  EXPECT_THROW(float_infer(net, short_input), Error);
  EXPECT_THROW(clear_infer(net, short_input, FixedPointConfig(13)), Error);
}

}  // namespace
}  // namespace ab2h::oracle
