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

// The ab2h command. One binary plays every role:
//
//   ab2h --role helper --config deploy.ini
//   ab2h --role server --party 0 --config deploy.ini
//   ab2h --role server --party 1 --config deploy.ini
//   ab2h --role model-provider --config deploy.ini
//   ab2h --role image-provider --config deploy.ini    (prints the label)
//   ab2h reconstruct-label output0.ab2s output1.ab2s
//
// The exit status is the library status code; see the table in README.md.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ab2h/ab2h.h"

namespace {

int report(int status) {
  if (status != AB2H_OK) {
    std::fprintf(stderr, "ab2h: %s: %s\n", ab2h_status_name(status),
                 ab2h_last_error());
  }
  return status;
}

int usage(const std::string& what) {
  std::fprintf(stderr, "ab2h: %s\n", what.c_str());
  return AB2H_E_USAGE;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ab2h: two-server secure inference with a helper node"};
  app.set_version_flag("--version", std::string(ab2h_version()));
  app.require_subcommand(0, 1);

  std::string role, config, listen;
  std::optional<int> party;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> connect;
  bool trace = false;
  app.add_option("--role", role,
                 "server | server0 | server1 | helper | model-provider | "
                 "image-provider");
  app.add_option("--config", config, "deployment file");
  app.add_option("--party", party, "0 or 1, with --role server")
      ->check(CLI::Range(0, 1));
  app.add_flag("--trace", trace, "write the message trace (test mode)");
  app.add_option("--seed", seed, "deterministic randomness, needs --trace");
  app.add_option("--listen", listen, "host:port to listen on");
  app.add_option("--connect", connect,
                 "counterpart address, name=host:port (repeatable)");

  auto* rec = app.add_subcommand("reconstruct-label",
                                 "XOR two one-hot share files, print the index");
  std::string file0, file1;
  rec->add_option("file0", file0)->required();
  rec->add_option("file1", file1)->required();

  auto* oracle = app.add_subcommand("oracle", "");
  oracle->group("");
  oracle->allow_extras();
  oracle->prefix_command();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return AB2H_E_USAGE;
  }

  if (*rec) {
    int label = -1;
    if (const int s = ab2h_reconstruct_label(file0.c_str(), file1.c_str(),
                                             &label)) {
      return report(s);
    }
    std::printf("%d\n", label);
    return AB2H_OK;
  }

  if (*oracle) {
    const auto rest = oracle->remaining();
    std::vector<const char*> args;
    for (const auto& a : rest) args.push_back(a.c_str());
    char* text = nullptr;
    if (const int s = ab2h_oracle(static_cast<int>(args.size()), args.data(),
                                  &text)) {
      return report(s);
    }
    std::fputs(text, stdout);
    ab2h_free(text);
    return AB2H_OK;
  }

  if (role.empty() || config.empty()) {
    return usage("--role and --config are required (see --help)");
  }
  if (role == "server") {
    if (!party) return usage("--role server needs --party 0 or 1");
    role += std::to_string(*party);
  } else if (party && role != "server" + std::to_string(*party)) {
    return usage("--party only goes with --role server");
  }

  ab2h_config* cfg = nullptr;
  if (const int s = ab2h_config_load(config.c_str(), role.c_str(), &cfg)) {
    return report(s);
  }
  int status = AB2H_OK;
  if (!listen.empty()) status = ab2h_config_set_listen(cfg, listen.c_str());
  for (const auto& c : connect) {
    if (status == AB2H_OK) status = ab2h_config_set_connect(cfg, c.c_str());
  }
  if (status == AB2H_OK) status = ab2h_config_set_trace(cfg, trace ? 1 : 0);
  if (status == AB2H_OK && seed) status = ab2h_config_set_seed(cfg, *seed);

  ab2h_result* result = nullptr;
  if (status == AB2H_OK) status = ab2h_run_role(cfg, &result);
  ab2h_config_free(cfg);
  if (status != AB2H_OK) return report(status);

  const int label = ab2h_result_label(result);
  if (label >= 0) std::printf("%d\n", label);
  ab2h_result_free(result);
  return AB2H_OK;
}
