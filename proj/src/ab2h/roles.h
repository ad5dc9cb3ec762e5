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

// The five deployed roles. A deployment file (INI) describes all of them so
// every process can be started with the same file:
//
//   [deployment]
//   session = 1
//   fractional_bits = 13
//   network = network.ini       ; relative to this file
//   server0 = 127.0.0.1:7000    ; peer and provider port of server 0
//   server1 = 127.0.0.1:7001    ; provider port of server 1
//   helper = 127.0.0.1:7100
//   timeout_ms = 60000          ; waiting for peers, uploads and outputs
//   connect_timeout_ms = 10000
//
//   [server0]
//   workdir = work0
//   [server1]
//   workdir = work1
//   [image-provider]
//   image = digit.csv
//   save_shares = out           ; optional, keeps the two output shares

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ab2h/net/link.h"
#include "ab2h/net/messages.h"
#include "ab2h/oracle.h"
#include "ab2h/ring.h"

namespace ab2h {

struct NetworkConfig;

struct RoleConfig {
  net::Role role = net::Role::kServer0;
  std::uint32_t session = 1;
  FixedPointConfig fixed_point{};
  std::filesystem::path network;
  net::Endpoint server[2];
  net::Endpoint helper;
  std::optional<net::Endpoint> listen;  // overrides this role's own address
  std::filesystem::path workdir[2];
  std::filesystem::path image;
  std::filesystem::path save_shares;
  bool trace = false;
  std::optional<std::uint64_t> seed;  // honored only with trace
  net::Millis timeout{60000};
  net::Millis connect_timeout{10000};
  std::size_t upload_chunk = 0;         // 0: largest that fits a frame
  std::size_t helper_exit_after = 0;    // helper: stop after N connections

  static RoleConfig load(const std::filesystem::path& path, net::Role role);
  static RoleConfig parse(const std::string& text,
                          const std::filesystem::path& base, net::Role role);

  // "helper=host:port", "server0=host:port" or "server1=host:port".
  void apply_connect(const std::string& spec);

  // The seed in effect: null unless tracing is on.
  std::optional<std::uint64_t> effective_seed() const {
    return trace ? seed : std::nullopt;
  }
  net::Endpoint own_endpoint() const;
};

// "server0", "server1", "helper", "model-provider", "image-provider";
// throws Usage.
net::Role parse_role(const std::string& name);

struct RoleResult {
  std::optional<int> label;  // image provider
  std::string report;        // compute servers
};

// Runs the role to completion. Progress goes to `log`. Throws Error.
RoleResult run_role(const RoleConfig& cfg, std::ostream& log);

// XOR of two boolean one-hot share files; the index of the single 1.
// Throws FileFormat, DimsMismatch or NotOneHot.
int reconstruct_label(const std::filesystem::path& file0,
                      const std::filesystem::path& file1);
int one_hot_index(const std::vector<std::uint8_t>& bits);

// The clear model named by a network config's *_csv entries.
oracle::ClearNetwork load_clear_network(const NetworkConfig& cfg);

// Hidden CLI entry for regenerating expectations:
//   counts <network.ini>
//   infer <network.ini> <image.csv> [f]
//   fbits <network.ini> <labelled.csv> <f>...
// Returns the text to print. Throws Usage on bad arguments.
std::string oracle_command(const std::vector<std::string>& args);

}  // namespace ab2h
