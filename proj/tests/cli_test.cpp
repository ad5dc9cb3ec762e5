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

#include <gtest/gtest.h>

#include "ab2h/share_file.h"
#include "deploy_util.h"
#include "test_util.h"

namespace ab2h::testing {
namespace {

using namespace std::chrono_literals;

const std::filesystem::path kRoot = AB2H_SOURCE_DIR;
const std::string kCli = AB2H_CLI;
const auto kDesk = kRoot / "fixtures/desk_model/network.ini";

std::filesystem::path digit(int d) {
  return kRoot / "fixtures/mnist" / ("digit_" + std::to_string(d) + ".csv");
}

TEST(Cli, FiveProcessesClassifyADigit) {
  const auto d = make_deployment(temp_dir("cli_e2e"), kDesk, digit(7));
  const auto r = run_deployment(kCli, d);
  EXPECT_EQ(r.image, 0) << r.errors;
  EXPECT_EQ(r.model, 0);
  EXPECT_EQ(r.server0, 0);
  EXPECT_EQ(r.server1, 0);
  EXPECT_EQ(r.helper, 0);
  EXPECT_EQ(r.label, "7\n");
  const auto report = slurp(d.dir / "work0/report.txt");
  EXPECT_NE(report.find("\nrounds=339\n"), std::string::npos) << report;
  EXPECT_NE(report.find("\nhelper_round_trips=17\n"), std::string::npos);
  EXPECT_NE(report.find("\ntriples=2619\n"), std::string::npos);
  // Servers never see the label; only the image provider reconstructs it.
  EXPECT_EQ(slurp(d.dir / "server0.out"), "");
  EXPECT_EQ(slurp(d.dir / "server1.out"), "");

  Process rec({kCli, "reconstruct-label", (d.dir / "out/output0.ab2s").string(),
               (d.dir / "out/output1.ab2s").string()},
              d.dir / "rec");
  EXPECT_EQ(rec.wait(), 0);
  EXPECT_EQ(rec.out(), "7\n");
}

TEST(Cli, HelperDownExitsWithHelperUnreachable) {
  const auto d = make_deployment(temp_dir("cli_nohelper"), kDesk, digit(1),
                                 {{"connect_timeout_ms", "500"}});
  Process s0({kCli, "--role", "server", "--party", "0", "--config",
              d.ini.string()},
             d.dir / "server0");
  EXPECT_EQ(s0.wait(30s), 38);
  EXPECT_NE(s0.err().find("HelperUnreachable"), std::string::npos);
}

TEST(Cli, FractionalBitsMismatchExitsWithIncompatiblePeer) {
  const auto d = make_deployment(temp_dir("cli_fbits"), kDesk, digit(1),
                                 {{"timeout_ms", "10000"}});
  std::string other = slurp(d.ini);
  other.replace(other.find("fractional_bits = 13"), 20, "fractional_bits = 12");
  const auto ini12 = d.dir / "deploy12.ini";
  std::ofstream(ini12) << other;
  Process helper({kCli, "--role", "helper", "--config", d.ini.string()},
                 d.dir / "helper");
  Process s0({kCli, "--role", "server0", "--config", d.ini.string()},
             d.dir / "server0");
  Process s1({kCli, "--role", "server1", "--config", ini12.string()},
             d.dir / "server1");
  EXPECT_EQ(s1.wait(60s), 34) << s1.err();
  EXPECT_EQ(s0.wait(60s), 34) << s0.err();
  helper.terminate();
  EXPECT_EQ(helper.wait(10s), 0);
}

TEST(Cli, SeededTraceRunsAreReproducible) {
  std::string traces[2][2], outputs[2][2];
  for (int run = 0; run < 2; ++run) {
    const auto d = make_deployment(temp_dir("cli_seed" + std::to_string(run)),
                                   kDesk, digit(3));
    const auto r = run_deployment(kCli, d, {"--trace", "--seed", "7"});
    ASSERT_EQ(r.image, 0) << r.errors;
    EXPECT_EQ(r.label, "3\n");
    for (int p = 0; p < 2; ++p) {
      const std::string w = "work" + std::to_string(p);
      traces[run][p] = slurp(d.dir / w / "trace.txt");
      outputs[run][p] =
          slurp(d.dir / "out" / ("output" + std::to_string(p) + ".ab2s"));
    }
  }
  for (int p = 0; p < 2; ++p) {
    EXPECT_FALSE(traces[0][p].empty());
    EXPECT_EQ(traces[0][p], traces[1][p]);
    EXPECT_EQ(outputs[0][p], outputs[1][p]);
  }
}

TEST(Cli, UsageErrors) {
  const auto dir = temp_dir("cli_usage");
  Process none({kCli}, dir / "none");
  EXPECT_EQ(none.wait(), 2);
  Process noparty({kCli, "--role", "server", "--config", "x.ini"},
                  dir / "noparty");
  EXPECT_EQ(noparty.wait(), 2);
  Process badparty({kCli, "--role", "server", "--party", "3", "--config", "x"},
                   dir / "badparty");
  EXPECT_EQ(badparty.wait(), 2);
  Process badrole({kCli, "--role", "observer", "--config", "x.ini"},
                  dir / "badrole");
  EXPECT_EQ(badrole.wait(), 2);
  Process missing({kCli, "--role", "helper", "--config",
                   (dir / "missing.ini").string()},
                  dir / "missing");
  EXPECT_EQ(missing.wait(), 54);
}

TEST(Cli, ReconstructLabelRejectsAllZero) {
  const auto dir = temp_dir("cli_zero");
  const FixedPointConfig fp(13);
  write_bool_file(dir / "z0", BoolShare{std::vector<std::uint8_t>(10, 1), Party::k0}, fp);
  write_bool_file(dir / "z1", BoolShare{std::vector<std::uint8_t>(10, 1), Party::k1}, fp);
  Process rec({kCli, "reconstruct-label", (dir / "z0").string(),
               (dir / "z1").string()},
              dir / "rec");
  EXPECT_EQ(rec.wait(), 53);
  EXPECT_NE(rec.err().find("NotOneHot"), std::string::npos);
}

TEST(Cli, OracleSubcommand) {
  const auto dir = temp_dir("cli_oracle");
  Process o({kCli, "oracle", "counts", kDesk.string()}, dir / "o");
  EXPECT_EQ(o.wait(), 0);
  EXPECT_NE(o.out().find("peer_exchanges=339"), std::string::npos) << o.out();
}

}  // namespace
}  // namespace ab2h::testing
