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

#include <sodium.h>

#include <algorithm>
#include <atomic>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "ab2h/loopback.h"
#include "ab2h/net/byteorder.h"
#include "ab2h/secure_ops.h"
#include "ab2h/share_file.h"

namespace ab2h {
namespace {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

// Boost's INI reader has no inline comments; strip them first.
std::string strip_comments(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    const auto cut = line.find_first_of(";#");
    if (cut != std::string::npos) line.resize(cut);
    out += line;
    out += '\n';
  }
  return out;
}

std::size_t get_dim(const pt::ptree& t, const std::string& key,
                    const std::string& where) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) fail(ErrorCode::kConfig, where + ": missing " + key);
  try {
    const long long n = std::stoll(*v);
    if (n <= 0) throw std::out_of_range("not positive");
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    fail(ErrorCode::kConfig, where + ": " + key + " must be a positive integer");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

void check_file(const ShareFileHeader& h, const fs::path& path,
                std::size_t rows, std::size_t cols, const ProtocolSession& s) {
  if (h.rows != rows || h.cols != cols) {
    fail(ErrorCode::kDimsMismatch,
         path.string() + " holds " + std::to_string(h.rows) + "x" +
             std::to_string(h.cols) + ", expected " + std::to_string(rows) +
             "x" + std::to_string(cols));
  }
  if (h.party != s.party()) {
    fail(ErrorCode::kShareMismatch,
         path.string() + " belongs to the other server");
  }
  if (h.fractional_bits != s.fixed_point().fractional_bits()) {
    fail(ErrorCode::kFileFormat,
         path.string() + " was written with f=" +
             std::to_string(h.fractional_bits));
  }
}

ShareTensor load_all(const fs::path& path, std::size_t rows,
                     const ProtocolSession& s) {
  ArithFileReader r(path);
  check_file(r.header(), path, rows, 1, s);
  return r.read_rows(0, r.header().rows);
}

void require_clean_trace(const Trace& trace, std::size_t from) {
  const auto entries = trace.entries();
  for (std::size_t i = from; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.direction != Direction::kOut) continue;
    const bool ok =
        e.counterpart == Counterpart::kHelper
            ? (e.type == net::MsgType::kCrossTermReq ||
               e.type == net::MsgType::kAndTripleReq)
            : e.counterpart != Counterpart::kPeer ||
                  e.type == net::MsgType::kOnlineExchange;
    if (!ok) {
      fail(ErrorCode::kInternal,
           std::string("unexpected ") + net::msg_type_name(e.type) + " to " +
               counterpart_name(e.counterpart));
    }
  }
}

void put_stats(std::ostream& out, const std::string& prefix,
               const SessionStats& s) {
  out << prefix << "bytes_sent=" << s.peer.bytes_out + s.helper.bytes_out
      << '\n'
      << prefix << "bytes_received=" << s.peer.bytes_in + s.helper.bytes_in
      << '\n'
      << prefix << "rounds=" << s.peer.frames_out << '\n'
      << prefix << "helper_round_trips="
      << s.cross_term_round_trips + s.triple_round_trips << '\n'
      << prefix << "triples=" << s.triples << '\n';
}

}  // namespace

NetworkConfig NetworkConfig::parse(const std::string& text,
                                   const fs::path& config_dir,
                                   const fs::path& workdir) {
  pt::ptree tree;
  std::istringstream in(strip_comments(text));
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::kConfig, std::string("network config: ") + e.what());
  }
  const auto net = tree.get_child_optional("network");
  if (!net) fail(ErrorCode::kConfig, "network config: no [network] section");

  NetworkConfig cfg;
  const std::size_t layers = get_dim(*net, "layers", "[network]");
  cfg.input = resolve(workdir, net->get<std::string>("input", "input.ab2s"));
  cfg.output = resolve(workdir, net->get<std::string>("output", "output.ab2s"));
  cfg.scratch = resolve(workdir, net->get<std::string>("scratch", "scratch"));
  for (std::size_t k = 1; k <= layers; ++k) {
    const std::string name = "layer" + std::to_string(k);
    const auto sec = tree.get_child_optional(name);
    if (!sec) fail(ErrorCode::kConfig, "network config: no [" + name + "]");
    const std::string where = "[" + name + "]";
    LayerSpec l;
    l.in_dim = get_dim(*sec, "in_dim", where);
    l.out_dim = get_dim(*sec, "out_dim", where);
    l.splits = sec->count("splits") ? get_dim(*sec, "splits", where) : 1;
    const auto act = sec->get<std::string>("activation", "none");
    if (act == "relu") {
      l.activation = Activation::kRelu;
    } else if (act != "none") {
      fail(ErrorCode::kConfig, where + ": activation must be relu or none");
    }
    l.weights = resolve(workdir,
                        sec->get<std::string>("weights", name + "_weights.ab2s"));
    l.bias = resolve(workdir, sec->get<std::string>("bias", name + "_bias.ab2s"));
    if (auto p = sec->get_optional<std::string>("weights_csv")) {
      l.weights_csv = resolve(config_dir, *p);
    }
    if (auto p = sec->get_optional<std::string>("bias_csv")) {
      l.bias_csv = resolve(config_dir, *p);
    }
    cfg.layers.push_back(std::move(l));
  }
  cfg.validate();
  return cfg;
}

NetworkConfig NetworkConfig::load(const fs::path& path, const fs::path& workdir) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.parent_path(), workdir);
}

void NetworkConfig::validate() const {
  if (layers.empty()) fail(ErrorCode::kConfig, "network has no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    const std::string name = "layer " + std::to_string(k + 1);
    if (l.in_dim == 0 || l.out_dim == 0) {
      fail(ErrorCode::kDimsMismatch, name + " has a zero dimension");
    }
    if (l.splits == 0 || l.splits > l.out_dim) {
      fail(ErrorCode::kDimsMismatch,
           name + ": splits must be between 1 and out_dim");
    }
    if (k > 0 && layers[k - 1].out_dim != l.in_dim) {
      fail(ErrorCode::kChain, name + " takes " + std::to_string(l.in_dim) +
                                  " inputs but layer " + std::to_string(k) +
                                  " produces " +
                                  std::to_string(layers[k - 1].out_dim));
    }
  }
  if (layers.back().activation != Activation::kNone) {
    fail(ErrorCode::kConfig, "the last layer feeds argmax and takes no activation");
  }
}

std::uint64_t NetworkConfig::topology_digest() const {
  std::ostringstream canon;
  for (const auto& l : layers) {
    canon << l.in_dim << ',' << l.out_dim << ','
          << (l.activation == Activation::kRelu ? "relu" : "none") << ','
          << l.splits << ';';
  }
  const std::string s = canon.str();
  unsigned char h[crypto_generichash_BYTES_MIN];
  crypto_generichash(h, sizeof h, reinterpret_cast<const unsigned char*>(s.data()),
                     s.size(), nullptr, 0);
  return net::load_le<std::uint64_t>(h);
}

std::vector<oracle::LayerShape> NetworkConfig::shapes() const {
  std::vector<oracle::LayerShape> out;
  for (const auto& l : layers) {
    out.push_back({l.in_dim, l.out_dim, l.splits,
                   l.activation == Activation::kRelu});
  }
  return out;
}

fs::path NetworkConfig::scratch_file(std::size_t layer) const {
  return scratch / ("layer" + std::to_string(layer) + ".ab2s");
}

std::string RunReport::to_text() const {
  std::ostringstream out;
  out << "layers=" << layers.size() << '\n'
      << "peak_elements=" << peak_elements << '\n';
  for (const auto& l : layers) {
    const std::string p = "layer" + std::to_string(l.index) + "_";
    out << p << "peak_elements=" << l.peak_elements << '\n';
    put_stats(out, p, l.stats);
  }
  put_stats(out, "argmax_", argmax);
  put_stats(out, "", total);
  out << "wall_ms=" << wall.count() << '\n';
  return out.str();
}

LayerReport run_layer(const LayerSpec& spec, std::size_t index,
                      const fs::path& input, const fs::path& output,
                      ProtocolSession& session, MemoryMeter& meter) {
  MeterScope scope(meter);
  const SessionStats before = session.stats();

  ArithFileReader weights(spec.weights);
  check_file(weights.header(), spec.weights, spec.out_dim, spec.in_dim,
             session);
  ShareTensor y = [&] {
    const ShareTensor x = load_all(input, spec.in_dim, session);
    const ShareTensor b = load_all(spec.bias, spec.out_dim, session);
    const RowLoader rows = [&](std::size_t begin, std::size_t end) {
      return weights.read_rows(static_cast<std::uint32_t>(begin),
                               static_cast<std::uint32_t>(end));
    };
    return secure_matmul(spec.out_dim, spec.in_dim, rows, x, &b, spec.splits,
                         session);
  }();
  if (spec.activation == Activation::kRelu) y = secure_relu(y, session);
  {
    const auto bytes = encode_arith_file(y);
    MeterCharge charge(slots_for_bytes(bytes.size()));
    y.release();
    write_bytes(output, bytes);
  }

  LayerReport r;
  r.index = index;
  r.peak_elements = meter.peak();
  r.stats = session.stats() - before;
  return r;
}

RunReport run_network(const NetworkConfig& cfg, ProtocolSession& session) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const SessionStats start = session.stats();
  const std::size_t trace_from =
      session.trace() != nullptr ? session.trace()->size() : 0;
  std::error_code ec;
  fs::create_directories(cfg.scratch, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + cfg.scratch.string());

  RunReport report;
  fs::path in = cfg.input;
  for (std::size_t k = 0; k < cfg.layers.size(); ++k) {
    const fs::path out = cfg.scratch_file(k + 1);
    MemoryMeter meter;
    report.layers.push_back(
        run_layer(cfg.layers[k], k + 1, in, out, session, meter));
    report.peak_elements =
        std::max(report.peak_elements, report.layers.back().peak_elements);
    in = out;
  }

  const SessionStats before = session.stats();
  {
    MemoryMeter meter;
    MeterScope scope(meter);
    const BoolShare onehot = secure_argmax(
        load_all(in, cfg.layers.back().out_dim, session), session);
    write_bool_file(cfg.output, onehot, session.fixed_point());
    report.peak_elements = std::max(report.peak_elements, meter.peak());
  }
  report.argmax = session.stats() - before;
  report.total = session.stats() - start;
  if (session.trace() != nullptr) {
    require_clean_trace(*session.trace(), trace_from);
  }
  report.wall = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0);
  return report;
}

std::vector<SplitPoint> measure_split_scaling(
    std::size_t out_dim, std::size_t in_dim, bool relu,
    const std::vector<std::size_t>& splits, const FixedPointConfig& fp,
    std::uint64_t seed) {
  static std::atomic<int> serial{0};
  const fs::path dir =
      fs::temp_directory_path() /
      ("ab2h_splits_" + std::to_string(::getpid()) + "_" +
       std::to_string(serial++));
  fs::create_directories(dir);

  LoopbackOptions opt;
  opt.fixed_point = fp;
  opt.seed = seed;
  Loopback lb(opt);

  auto data = ChaChaPrg::from_seed(seed, "split-data", 0);
  auto uniform = [&](std::size_t n, double scale) {
    std::vector<Ring> v(n);
    for (auto& e : v) {
      const double u = static_cast<double>(data.next() >> 11) * 0x1p-53;
      e = encode((2 * u - 1) * scale, fp);
    }
    return v;
  };
  const auto w = uniform(out_dim * in_dim, 1.0 / 16);
  const auto x = uniform(in_dim, 1.0);
  const auto b = uniform(out_dim, 1.0);
  auto stage = [&](const std::vector<Ring>& v, std::size_t rows,
                   std::size_t cols, const std::string& name) {
    auto [s0, s1] = make_shares(v, rows, cols, fp, lb.dealer_rng());
    write_arith_file(dir / (name + "0.ab2s"), s0);
    write_arith_file(dir / (name + "1.ab2s"), s1);
  };
  stage(w, out_dim, in_dim, "w");
  stage(x, in_dim, 1, "x");
  stage(b, out_dim, 1, "b");

  std::vector<SplitPoint> points;
  try {
    for (const std::size_t s : splits) {
      auto [p0, p1] = lb.run([&](ProtocolSession& session) {
        const std::string i = std::to_string(session.party_index());
        LayerSpec spec;
        spec.in_dim = in_dim;
        spec.out_dim = out_dim;
        spec.splits = s;
        spec.activation = relu ? Activation::kRelu : Activation::kNone;
        spec.weights = dir / ("w" + i + ".ab2s");
        spec.bias = dir / ("b" + i + ".ab2s");
        MemoryMeter meter;
        return run_layer(spec, 1, dir / ("x" + i + ".ab2s"),
                         dir / ("y" + i + ".ab2s"), session, meter)
            .peak_elements;
      });
      (void)p1;
      points.push_back({s, p0});
    }
  } catch (...) {
    fs::remove_all(dir);
    throw;
  }
  fs::remove_all(dir);
  return points;
}

bool split_bound_holds(const std::vector<SplitPoint>& points,
                       std::size_t slack) {
  const auto base = std::find_if(points.begin(), points.end(),
                                 [](const SplitPoint& p) { return p.splits == 1; });
  if (base == points.end()) return false;
  for (const auto& p : points) {
    const double bound =
        static_cast<double>(base->peak_elements) / static_cast<double>(p.splits) *
            1.25 +
        static_cast<double>(slack);
    if (static_cast<double>(p.peak_elements) > bound) return false;
  }
  return true;
}

}  // namespace ab2h
