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

#pragma once

// N-layer inference over shares. Each layer reads its input share file,
// streams the weight file through secure_matmul one split block at a time,
// applies the activation and writes its output share file; the last layer's
// output goes through secure_argmax into a boolean one-hot share file.
//
// Network config (INI, '#' or ';' comments):
//
//   [network]
//   layers = 2
//   input = input.ab2s            ; share files, relative to the workdir
//   output = output.ab2s
//   scratch = scratch
//
//   [layer1]
//   in_dim = 784
//   out_dim = 32
//   activation = relu             ; relu | none, none on the last layer
//   splits = 4                    ; 1 .. out_dim, default 1
//   weights = layer1_weights.ab2s ; default layerK_weights.ab2s
//   bias = layer1_bias.ab2s       ; default layerK_bias.ab2s
//   weights_csv = w1.csv          ; model provider only, relative to
//   bias_csv = b1.csv             ; the config file

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ab2h/meter.h"
#include "ab2h/oracle.h"
#include "ab2h/ring.h"
#include "ab2h/session.h"

namespace ab2h {

enum class Activation : std::uint8_t { kNone, kRelu };

struct LayerSpec {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::kNone;
  std::size_t splits = 1;
  std::filesystem::path weights;
  std::filesystem::path bias;
  std::filesystem::path weights_csv;
  std::filesystem::path bias_csv;
};

struct NetworkConfig {
  std::vector<LayerSpec> layers;
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path scratch;

  // Share paths resolve against `workdir`, CSV paths against the config
  // file's directory. Validates before returning.
  static NetworkConfig load(const std::filesystem::path& path,
                            const std::filesystem::path& workdir = ".");
  static NetworkConfig parse(const std::string& text,
                             const std::filesystem::path& config_dir,
                             const std::filesystem::path& workdir);

  // DimsMismatch for bad dims or splits, Chain if layers do not chain,
  // Config for an activation on the last layer.
  void validate() const;

  // Digest of dims, activations and splits; exchanged at the handshake so
  // the servers know they run the same network.
  std::uint64_t topology_digest() const;

  std::vector<oracle::LayerShape> shapes() const;
  std::filesystem::path scratch_file(std::size_t layer) const;
};

struct LayerReport {
  std::size_t index = 0;  // 1-based
  std::size_t peak_elements = 0;
  SessionStats stats;
};

struct RunReport {
  std::vector<LayerReport> layers;
  SessionStats argmax;
  SessionStats total;
  std::size_t peak_elements = 0;
  std::chrono::milliseconds wall{0};

  // metric=value lines.
  std::string to_text() const;
};

// Runs one layer; the meter must be fresh or reset by the caller. Throws
// FileFormat, DimsMismatch or a protocol error.
LayerReport run_layer(const LayerSpec& spec, std::size_t index,
                      const std::filesystem::path& input,
                      const std::filesystem::path& output,
                      ProtocolSession& session, MemoryMeter& meter);

// All layers, then argmax into cfg.output. Never reconstructs anything.
RunReport run_network(const NetworkConfig& cfg, ProtocolSession& session);

struct SplitPoint {
  std::size_t splits = 0;
  std::size_t peak_elements = 0;
};

// Runs a random layer of the given shape once per split count on an
// in-process loopback and reports party 0's meter peak for each.
std::vector<SplitPoint> measure_split_scaling(
    std::size_t out_dim, std::size_t in_dim, bool relu,
    const std::vector<std::size_t>& splits, const FixedPointConfig& fp,
    std::uint64_t seed);

// peak(s) <= peak(1) / s * 1.25 + slack, for every measured s.
bool split_bound_holds(const std::vector<SplitPoint>& points,
                       std::size_t slack);

}  // namespace ab2h
