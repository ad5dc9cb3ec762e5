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

#include "ab2h/roles.h"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <condition_variable>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ab2h/csv.h"
#include "ab2h/helper.h"
#include "ab2h/net/handshake.h"
#include "ab2h/nn.h"
#include "ab2h/secure_ops.h"
#include "ab2h/session.h"
#include "ab2h/share_file.h"

namespace ab2h {
namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using net::Role;

std::string strip_comments(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    const auto cut = line.find_first_of(";#");
    if (cut != std::string::npos) line.resize(cut);
    out += line + '\n';
  }
  return out;
}

std::unique_ptr<RandomSource> make_rng(std::optional<std::uint64_t> seed,
                                       std::string_view domain,
                                       std::uint64_t stream) {
  if (seed) {
    return std::make_unique<ChaChaPrg>(
        ChaChaPrg::from_seed(*seed, domain, stream));
  }
  return std::make_unique<ChaChaPrg>(ChaChaPrg::from_entropy());
}

net::ByeReason reason_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimsMismatch:
      return net::ByeReason::kDimsMismatch;
    case ErrorCode::kSessionMismatch:
      return net::ByeReason::kSessionMismatch;
    case ErrorCode::kIncompatiblePeer:
      return net::ByeReason::kFractionalBitsMismatch;
    default:
      return net::ByeReason::kProtocolViolation;
  }
}

net::FrameHeader header_of(net::MsgType type, Role from,
                           const RoleConfig& cfg, std::uint32_t counter) {
  net::FrameHeader h;
  h.type = type;
  h.party = static_cast<std::uint8_t>(from);
  h.fractional_bits =
      static_cast<std::uint8_t>(cfg.fixed_point.fractional_bits());
  h.session = cfg.session;
  h.counter = counter;
  return h;
}

void send_bye(net::Link& link, Role from, const RoleConfig& cfg,
              net::ByeReason reason) {
  try {
    link.send(header_of(net::MsgType::kBye, from, cfg, 0),
              net::encode_payload(net::Bye{reason}));
  } catch (const Error&) {
  }
}

net::Hello hello_for(Role role, const RoleConfig& cfg, std::uint64_t topo) {
  net::Hello h;
  h.role = role;
  h.fractional_bits =
      static_cast<std::uint8_t>(cfg.fixed_point.fractional_bits());
  h.topology = topo;
  return h;
}

std::string upload_name(net::UploadKind kind, std::uint16_t layer) {
  switch (kind) {
    case net::UploadKind::kInput:
      return "input";
    case net::UploadKind::kWeights:
      return "layer " + std::to_string(layer) + " weights";
    case net::UploadKind::kBias:
      return "layer " + std::to_string(layer) + " bias";
  }
  return "upload";
}

// Provider side: one share file in as many SHARE_UPLOAD frames as needed,
// then the server's SHARE_ACK.
void upload_file(net::Link& link, Role from, const RoleConfig& cfg,
                 net::UploadKind kind, std::uint16_t layer,
                 std::span<const std::uint8_t> body) {
  const std::size_t cap = net::kMaxPayload - net::kShareUploadHeaderSize;
  const std::size_t chunk =
      cfg.upload_chunk == 0 ? cap : std::min(cfg.upload_chunk, cap);
  const std::size_t count = std::max<std::size_t>(1, (body.size() + chunk - 1) / chunk);
  for (std::size_t i = 0; i < count; ++i) {
    net::ShareUpload up;
    up.kind = kind;
    up.layer = layer;
    up.chunk = static_cast<std::uint32_t>(i);
    up.chunk_count = static_cast<std::uint32_t>(count);
    const std::size_t begin = i * chunk;
    const std::size_t end = std::min(body.size(), begin + chunk);
    up.body.assign(body.begin() + begin, body.begin() + end);
    link.send(header_of(net::MsgType::kShareUpload, from, cfg,
                        static_cast<std::uint32_t>(i)),
              net::encode_payload(up));
  }
  const net::Frame f = link.receive_any(cfg.timeout);
  if (f.type == net::MsgType::kBye) {
    const auto bye = net::decode_bye(f.payload);
    fail(bye_error(bye.reason),
         "server " + std::to_string(f.party) + " rejected the " +
             upload_name(kind, layer) + " (reason " +
             std::to_string(static_cast<int>(bye.reason)) + ")");
  }
  if (f.type != net::MsgType::kShareAck) {
    fail(ErrorCode::kProtocol,
         std::string("expected SHARE_ACK, got ") + net::msg_type_name(f.type));
  }
  const auto ack = net::decode_share_ack(f.payload);
  if (ack.kind != kind || ack.layer != layer) {
    fail(ErrorCode::kProtocol, "acknowledgment for the wrong file");
  }
}

std::unique_ptr<net::Link> connect_server(const RoleConfig& cfg, Role me,
                                          int p, std::uint64_t topo) {
  auto link = std::make_unique<net::Link>(net::connect_tcp(
      cfg.server[p], cfg.connect_timeout, ErrorCode::kServerUnreachable));
  net::HandshakeOptions hs;
  hs.mine = hello_for(me, cfg, topo);
  hs.session = cfg.session;
  hs.expect_role = p == 0 ? Role::kServer0 : Role::kServer1;
  hs.check_topology = topo != 0;
  net::session_handshake(*link, hs);
  return link;
}

// ---------------------------------------------------------------- server

class ComputeServer {
 public:
  ComputeServer(const RoleConfig& cfg, std::ostream& log)
      : cfg_(cfg),
        log_(log),
        p_(cfg.role == Role::kServer0 ? 0 : 1),
        net_(NetworkConfig::load(cfg.network, cfg.workdir[p_])),
        listener_(cfg.own_endpoint()) {}

  RoleResult run();

 private:
  void accept_loop();
  void handle(std::shared_ptr<net::Link> link);
  void receive_uploads(net::Link& link, Role who);
  void stage(net::UploadKind kind, std::uint16_t layer,
             std::vector<std::uint8_t> bytes);
  std::string missing() const;
  bool ready() const { return peer_ && image_ && missing().empty(); }
  void record_failure(std::exception_ptr e) {
    std::lock_guard lock(mu_);
    if (!failure_) failure_ = e;
    cv_.notify_all();
  }
  Role me() const { return p_ == 0 ? Role::kServer0 : Role::kServer1; }
  void say(const std::string& s) {
    std::lock_guard lock(log_mu_);
    log_ << "ab2h " << net::role_name(me()) << ": " << s << '\n' << std::flush;
  }

  const RoleConfig& cfg_;
  std::ostream& log_;
  std::mutex log_mu_;
  int p_;
  NetworkConfig net_;
  net::TcpListener listener_;

  std::atomic<bool> stopping_{false};
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::set<std::pair<net::UploadKind, std::uint16_t>> staged_;
  std::shared_ptr<net::Link> peer_;
  std::shared_ptr<net::Link> image_;
  std::exception_ptr failure_;
  std::vector<std::shared_ptr<net::Link>> links_;
  std::vector<std::thread> handlers_;
};

std::string ComputeServer::missing() const {
  std::string out;
  auto need = [&](net::UploadKind k, std::uint16_t layer) {
    if (!staged_.count({k, layer})) {
      out += (out.empty() ? "" : ", ") + upload_name(k, layer);
    }
  };
  need(net::UploadKind::kInput, 0);
  for (std::size_t k = 1; k <= net_.layers.size(); ++k) {
    need(net::UploadKind::kWeights, static_cast<std::uint16_t>(k));
    need(net::UploadKind::kBias, static_cast<std::uint16_t>(k));
  }
  return out;
}

void ComputeServer::accept_loop() {
  while (!stopping_) {
    std::optional<net::Socket> sock;
    try {
      sock = listener_.accept(net::Millis(100));
    } catch (...) {
      record_failure(std::current_exception());
      return;
    }
    if (!sock) continue;
    auto link = std::make_shared<net::Link>(std::move(*sock));
    std::lock_guard lock(mu_);
    links_.push_back(link);
    handlers_.emplace_back([this, link] { handle(link); });
  }
}

void ComputeServer::handle(std::shared_ptr<net::Link> link) {
  try {
    net::HandshakeOptions hs;
    hs.mine = hello_for(me(), cfg_, net_.topology_digest());
    hs.session = cfg_.session;
    hs.check_topology = true;
    const net::Hello peer = net::session_handshake(*link, hs);
    const bool allowed = peer.role == Role::kModelProvider ||
                         peer.role == Role::kImageProvider ||
                         (p_ == 0 && peer.role == Role::kServer1);
    if (!allowed) {
      send_bye(*link, me(), cfg_, net::ByeReason::kUnexpectedRole);
      link->close();
      say(std::string("turned away a ") + net::role_name(peer.role));
      return;
    }
    say(std::string(net::role_name(peer.role)) + " connected");
    if (peer.role == Role::kServer1) {
      std::lock_guard lock(mu_);
      if (peer_) fail(ErrorCode::kProtocol, "second peer connection");
      peer_ = link;
      cv_.notify_all();
      return;
    }
    receive_uploads(*link, peer.role);
    if (peer.role == Role::kImageProvider) {
      std::lock_guard lock(mu_);
      image_ = link;
      cv_.notify_all();
    }
  } catch (const Error& e) {
    // A provider that hangs up halfway leaves its uploads missing; the
    // main thread reports that when it times out.
    if (e.code() == ErrorCode::kConnectionClosed) {
      say(e.what());
      return;
    }
    record_failure(std::current_exception());
  } catch (...) {
    record_failure(std::current_exception());
  }
}

void ComputeServer::receive_uploads(net::Link& link, Role who) {
  struct Partial {
    std::vector<std::uint8_t> bytes;
    std::uint32_t next = 0;
    std::uint32_t count = 0;
  };
  std::map<std::pair<net::UploadKind, std::uint16_t>, Partial> partial;
  while (true) {
    net::Frame f = link.receive_any(cfg_.timeout);
    if (f.type == net::MsgType::kBye) return;
    try {
      if (f.type != net::MsgType::kShareUpload) {
        fail(ErrorCode::kProtocol, std::string("unexpected ") +
                                       net::msg_type_name(f.type) + " from " +
                                       net::role_name(who));
      }
      auto up = net::decode_share_upload(f.payload);
      const bool is_input = up.kind == net::UploadKind::kInput;
      if (is_input != (who == Role::kImageProvider) ||
          (!is_input && (up.layer == 0 || up.layer > net_.layers.size()))) {
        fail(ErrorCode::kProtocol,
             std::string(net::role_name(who)) + " may not upload the " +
                 upload_name(up.kind, up.layer));
      }
      auto& part = partial[{up.kind, up.layer}];
      if (up.chunk != part.next || up.chunk_count == 0 ||
          (part.next > 0 && up.chunk_count != part.count)) {
        fail(ErrorCode::kProtocol,
             "out-of-order chunk for the " + upload_name(up.kind, up.layer));
      }
      part.count = up.chunk_count;
      part.bytes.insert(part.bytes.end(), up.body.begin(), up.body.end());
      if (++part.next < part.count) continue;

      stage(up.kind, up.layer, std::move(part.bytes));
      partial.erase({up.kind, up.layer});
      link.send(header_of(net::MsgType::kShareAck, me(), cfg_, f.counter),
                net::encode_payload(net::ShareAck{up.kind, up.layer}));
      say("stored the " + upload_name(up.kind, up.layer));
      if (is_input) return;
    } catch (const Error& e) {
      send_bye(link, me(), cfg_, reason_for(e.code()));
      link.close();
      throw;
    }
  }
}

void ComputeServer::stage(net::UploadKind kind, std::uint16_t layer,
                          std::vector<std::uint8_t> bytes) {
  const std::string what = upload_name(kind, layer);
  const ShareFileHeader h = decode_share_header(bytes);
  if (h.kind != ShareKind::kArith ||
      bytes.size() != kShareFileHeaderSize + h.payload_size()) {
    fail(ErrorCode::kFileFormat, what + " is not a complete arithmetic share file");
  }
  if (index_of(h.party) != p_) {
    fail(ErrorCode::kShareMismatch, what + " was dealt for the other server");
  }
  if (h.fractional_bits != cfg_.fixed_point.fractional_bits()) {
    fail(ErrorCode::kIncompatiblePeer,
         what + " was encoded with f=" + std::to_string(h.fractional_bits));
  }
  std::size_t rows = 0, cols = 1;
  fs::path dest;
  if (kind == net::UploadKind::kInput) {
    rows = net_.layers.front().in_dim;
    dest = net_.input;
  } else {
    const LayerSpec& l = net_.layers[layer - 1];
    rows = l.out_dim;
    if (kind == net::UploadKind::kWeights) {
      cols = l.in_dim;
      dest = l.weights;
    } else {
      dest = l.bias;
    }
  }
  if (h.rows != rows || h.cols != cols) {
    fail(ErrorCode::kDimsMismatch,
         what + " is " + std::to_string(h.rows) + "x" + std::to_string(h.cols) +
             ", the network needs " + std::to_string(rows) + "x" +
             std::to_string(cols));
  }
  fs::create_directories(dest.parent_path());
  write_bytes(dest, bytes);
  std::lock_guard lock(mu_);
  staged_.insert({kind, layer});
  cv_.notify_all();
}

RoleResult ComputeServer::run() {
  fs::create_directories(cfg_.workdir[p_]);
  say("listening on port " + std::to_string(listener_.port()));
  std::thread acceptor([this] { accept_loop(); });
  auto finish = [&] {
    stopping_ = true;
    if (acceptor.joinable()) acceptor.join();
    std::vector<std::thread> handlers;
    {
      std::lock_guard lock(mu_);
      for (auto& l : links_) l->close();
      handlers.swap(handlers_);
    }
    for (auto& t : handlers) t.join();
  };

  try {
    net::Link helper(net::connect_tcp(cfg_.helper, cfg_.connect_timeout,
                                      ErrorCode::kHelperUnreachable));
    if (p_ == 1) {
      auto link = std::make_shared<net::Link>(net::connect_tcp(
          cfg_.server[0], cfg_.connect_timeout, ErrorCode::kPeerUnreachable));
      net::HandshakeOptions hs;
      hs.mine = hello_for(me(), cfg_, net_.topology_digest());
      hs.session = cfg_.session;
      hs.expect_role = Role::kServer0;
      hs.check_topology = true;
      net::session_handshake(*link, hs);
      std::lock_guard lock(mu_);
      peer_ = link;
      links_.push_back(link);
    }
    {
      std::unique_lock lock(mu_);
      const bool done = cv_.wait_for(lock, cfg_.timeout, [&] {
        return failure_ != nullptr || ready();
      });
      if (failure_) std::rethrow_exception(failure_);
      if (!done) {
        std::string what = missing();
        if (!peer_) what += std::string(what.empty() ? "" : ", ") + "peer";
        if (!image_) what += std::string(what.empty() ? "" : ", ") + "image provider";
        fail(ErrorCode::kTimeout, "gave up waiting for " + what);
      }
    }
    stopping_ = true;
    acceptor.join();

    auto rng = make_rng(cfg_.effective_seed(), "server",
                        static_cast<std::uint64_t>(p_));
    Trace trace(cfg_.effective_seed().has_value());
    SessionOptions so;
    so.session_id = cfg_.session;
    so.party = party_from_index(p_);
    so.fixed_point = cfg_.fixed_point;
    so.peer_timeout = cfg_.timeout;
    so.helper_timeout = cfg_.timeout;
    ProtocolSession session(so, *peer_, helper, *rng, &trace);
    say("running the network");
    const RunReport report = run_network(net_, session);

    net::OutputShare out{read_bytes(net_.output)};
    const auto payload = net::encode_payload(out);
    const auto h = header_of(net::MsgType::kOutputShare, me(), cfg_, 0);
    image_->send(h, payload);
    trace.record(Direction::kOut, Counterpart::kProvider,
                 [&] {
                   auto hh = h;
                   hh.length = static_cast<std::uint32_t>(payload.size());
                   return hh;
                 }(),
                 payload);
    say("sent the output share");

    RoleResult result;
    result.report = report.to_text();
    {
      std::ofstream f(cfg_.workdir[p_] / "report.txt");
      f << result.report;
    }
    if (cfg_.trace) {
      std::ofstream f(cfg_.workdir[p_] / "trace.txt");
      f << trace.to_text();
    }
    helper.close();
    finish();
    return result;
  } catch (...) {
    finish();
    throw;
  }
}

// ---------------------------------------------------------------- providers

RoleResult run_model_provider(const RoleConfig& cfg, std::ostream& log) {
  const NetworkConfig net = NetworkConfig::load(cfg.network);
  const auto& fp = cfg.fixed_point;
  auto rng = make_rng(cfg.effective_seed(), "model-provider", 0);

  struct Staged {
    net::UploadKind kind;
    std::uint16_t layer;
    std::vector<std::uint8_t> file[2];
  };
  std::vector<Staged> files;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const LayerSpec& l = net.layers[k];
    const auto layer = static_cast<std::uint16_t>(k + 1);
    const std::string name = "layer " + std::to_string(k + 1);
    if (l.weights_csv.empty() || l.bias_csv.empty()) {
      fail(ErrorCode::kConfig, name + " has no weights_csv/bias_csv");
    }
    std::vector<double> w, b;
    try {
      w = read_weights_csv(l.weights_csv, l.out_dim, l.in_dim);
      b = read_bias_csv(l.bias_csv, l.out_dim);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDimsMismatch) throw;
      fail(ErrorCode::kDimsMismatch, name + ": " + e.what());
    }
    auto share = [&](const std::vector<double>& v, std::size_t rows,
                     std::size_t cols, net::UploadKind kind) {
      std::vector<Ring> enc(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) enc[i] = encode(v[i], fp);
      auto [s0, s1] = make_shares(enc, rows, cols, fp, *rng);
      files.push_back({kind, layer, {encode_arith_file(s0), encode_arith_file(s1)}});
    };
    share(w, l.out_dim, l.in_dim, net::UploadKind::kWeights);
    share(b, l.out_dim, 1, net::UploadKind::kBias);
  }

  for (int p = 0; p < 2; ++p) {
    auto link = connect_server(cfg, Role::kModelProvider, p,
                               net.topology_digest());
    for (const auto& f : files) {
      upload_file(*link, Role::kModelProvider, cfg, f.kind, f.layer, f.file[p]);
    }
    send_bye(*link, Role::kModelProvider, cfg, net::ByeReason::kNormal);
    link->close();
    log << "ab2h model-provider: " << files.size() << " files acknowledged by server "
        << p << '\n';
  }
  return {};
}

RoleResult run_image_provider(const RoleConfig& cfg, std::ostream& log) {
  const auto& fp = cfg.fixed_point;
  const std::vector<double> pixels = read_image_csv(cfg.image);
  std::vector<Ring> enc(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) enc[i] = encode(pixels[i], fp);
  auto rng = make_rng(cfg.effective_seed(), "image-provider", 0);
  auto [s0, s1] = make_shares(enc, enc.size(), 1, fp, *rng);
  const std::vector<std::uint8_t> file[2] = {encode_arith_file(s0),
                                             encode_arith_file(s1)};

  std::unique_ptr<net::Link> links[2];
  for (int p = 0; p < 2; ++p) {
    links[p] = connect_server(cfg, Role::kImageProvider, p, 0);
    upload_file(*links[p], Role::kImageProvider, cfg, net::UploadKind::kInput,
                0, file[p]);
  }
  log << "ab2h image-provider: input shares acknowledged, waiting for output\n";

  BoolShareFile out[2];
  for (int p = 0; p < 2; ++p) {
    const net::Frame f = links[p]->receive_any(cfg.timeout);
    if (f.type == net::MsgType::kBye) {
      fail(bye_error(net::decode_bye(f.payload).reason),
           "server " + std::to_string(p) + " ended the session");
    }
    if (f.type != net::MsgType::kOutputShare) {
      fail(ErrorCode::kProtocol, std::string("expected OUTPUT_SHARE, got ") +
                                     net::msg_type_name(f.type));
    }
    const auto body = net::decode_output_share(f.payload).body;
    out[p] = decode_bool_file(body);
    if (index_of(out[p].header.party) != p) {
      fail(ErrorCode::kShareMismatch, "output share from the wrong server");
    }
    if (!cfg.save_shares.empty()) {
      fs::create_directories(cfg.save_shares);
      write_bytes(cfg.save_shares / ("output" + std::to_string(p) + ".ab2s"),
                  body);
    }
    links[p]->close();
  }
  if (out[0].header.rows != out[1].header.rows ||
      out[0].header.cols != out[1].header.cols) {
    fail(ErrorCode::kDimsMismatch, "the two output shares differ in shape");
  }
  RoleResult r;
  r.label = one_hot_index(
      reconstruct_bool(to_bool_share(out[0]), to_bool_share(out[1])));
  return r;
}

// ---------------------------------------------------------------- helper

RoleResult run_helper(const RoleConfig& cfg, std::ostream& log) {
  // Signals go to one waiting thread, which stops the service.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  HelperOptions opt;
  opt.listen = cfg.own_endpoint();
  opt.seed = cfg.effective_seed();
  opt.exit_after_connections = cfg.helper_exit_after;
  HelperService service(opt);
  log << "ab2h helper: listening on port " << service.port() << '\n'
      << std::flush;

  std::atomic<bool> done{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    if (!done) service.stop();
  });
  service.run();
  done = true;
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_UNBLOCK, &set, nullptr);

  for (const auto& [session, c] : service.session_counts()) {
    log << "ab2h helper: session " << session
        << " cross_term_pairs=" << c.cross_term_pairs
        << " triple_pairs=" << c.triple_pairs << " triples=" << c.triples
        << " rejected=" << c.rejected << '\n';
  }
  return {};
}

std::vector<std::vector<double>> read_labelled(const fs::path& path,
                                               std::vector<int>& labels,
                                               std::size_t width) {
  const CsvMatrix m = read_csv(path);
  if (m.cols != width + 1) {
    throw CsvFormatError(path.string(), 1, 0,
                         "expected a label and " + std::to_string(width) +
                             " values per row");
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.values.data() + r * m.cols;
    labels.push_back(static_cast<int>(row[0]));
    rows.emplace_back(row + 1, row + m.cols);
  }
  return rows;
}

int parse_f(const std::string& s) {
  try {
    return FixedPointConfig(std::stoi(s)).fractional_bits();
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::kUsage, "bad fractional bit count: " + s);
  }
}

}  // namespace

net::Role parse_role(const std::string& name) {
  static const std::map<std::string, Role> names = {
      {"server0", Role::kServer0},
      {"server1", Role::kServer1},
      {"helper", Role::kHelper},
      {"model-provider", Role::kModelProvider},
      {"image-provider", Role::kImageProvider},
  };
  const auto it = names.find(name);
  if (it == names.end()) fail(ErrorCode::kUsage, "unknown role " + name);
  return it->second;
}

RoleConfig RoleConfig::parse(const std::string& text, const fs::path& base,
                             Role role) {
  pt::ptree tree;
  std::istringstream in(strip_comments(text));
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::kConfig, std::string("deployment config: ") + e.what());
  }
  RoleConfig c;
  c.role = role;
  auto rel = [&](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  try {
    const auto& d = tree.get_child("deployment");
    c.session = d.get<std::uint32_t>("session", 1);
    c.fixed_point = FixedPointConfig(
        d.get<int>("fractional_bits", kDefaultFractionalBits));
    c.network = rel(d.get<std::string>("network", "network.ini"));
    c.server[0] = net::Endpoint::parse(d.get<std::string>("server0", "127.0.0.1:7000"));
    c.server[1] = net::Endpoint::parse(d.get<std::string>("server1", "127.0.0.1:7001"));
    c.helper = net::Endpoint::parse(d.get<std::string>("helper", "127.0.0.1:7100"));
    c.timeout = net::Millis(d.get<long>("timeout_ms", 60000));
    c.connect_timeout = net::Millis(d.get<long>("connect_timeout_ms", 10000));
    c.upload_chunk = d.get<std::size_t>("upload_chunk_bytes", 0);
    c.workdir[0] = rel(tree.get<std::string>("server0.workdir", "work0"));
    c.workdir[1] = rel(tree.get<std::string>("server1.workdir", "work1"));
    if (auto v = tree.get_optional<std::string>("image-provider.image")) {
      c.image = rel(*v);
    }
    if (auto v = tree.get_optional<std::string>("image-provider.save_shares")) {
      c.save_shares = rel(*v);
    }
    c.helper_exit_after = tree.get<std::size_t>("helper.exit_after", 0);
  } catch (const pt::ptree_error& e) {
    fail(ErrorCode::kConfig, std::string("deployment config: ") + e.what());
  }
  if (role == Role::kImageProvider && c.image.empty()) {
    fail(ErrorCode::kConfig, "deployment config: [image-provider] image is missing");
  }
  return c;
}

RoleConfig RoleConfig::load(const fs::path& path, Role role) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.parent_path(), role);
}

void RoleConfig::apply_connect(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    fail(ErrorCode::kUsage, "--connect wants name=host:port, got " + spec);
  }
  const std::string name = spec.substr(0, eq);
  const auto ep = net::Endpoint::parse(spec.substr(eq + 1));
  if (name == "helper") {
    helper = ep;
  } else if (name == "server0") {
    server[0] = ep;
  } else if (name == "server1") {
    server[1] = ep;
  } else {
    fail(ErrorCode::kUsage, "--connect: unknown counterpart " + name);
  }
}

net::Endpoint RoleConfig::own_endpoint() const {
  if (listen) return *listen;
  switch (role) {
    case Role::kServer0:
      return server[0];
    case Role::kServer1:
      return server[1];
    case Role::kHelper:
      return helper;
    default:
      fail(ErrorCode::kUsage, "providers do not listen");
  }
}

RoleResult run_role(const RoleConfig& cfg, std::ostream& log) {
  if (cfg.seed && !cfg.trace) {
    log << "ab2h: --seed is ignored without --trace\n";
  }
  switch (cfg.role) {
    case Role::kServer0:
    case Role::kServer1:
      return ComputeServer(cfg, log).run();
    case Role::kHelper:
      return run_helper(cfg, log);
    case Role::kModelProvider:
      return run_model_provider(cfg, log);
    case Role::kImageProvider:
      return run_image_provider(cfg, log);
  }
  fail(ErrorCode::kUsage, "unknown role");
}

int one_hot_index(const std::vector<std::uint8_t>& bits) {
  // Scan for the first set bit, then insist there is no second one.
  std::size_t k = 0;
  while (k < bits.size() && bits[k] == 0) ++k;
  if (k == bits.size()) {
    fail(ErrorCode::kNotOneHot, "no position is set");
  }
  for (std::size_t j = k + 1; j < bits.size(); ++j) {
    if (bits[j] != 0) {
      fail(ErrorCode::kNotOneHot, "positions " + std::to_string(k) + " and " +
                                      std::to_string(j) + " are both set");
    }
  }
  return static_cast<int>(k);
}

int reconstruct_label(const fs::path& file0, const fs::path& file1) {
  const BoolShareFile a = read_bool_file(file0);
  const BoolShareFile b = read_bool_file(file1);
  if (a.header.rows != b.header.rows || a.header.cols != b.header.cols) {
    fail(ErrorCode::kDimsMismatch, "share files differ in shape");
  }
  if (a.header.party == b.header.party) {
    fail(ErrorCode::kShareMismatch, "both files belong to the same server");
  }
  return one_hot_index(reconstruct_bool(to_bool_share(a), to_bool_share(b)));
}

oracle::ClearNetwork load_clear_network(const NetworkConfig& cfg) {
  oracle::ClearNetwork net;
  for (std::size_t k = 0; k < cfg.layers.size(); ++k) {
    const auto& l = cfg.layers[k];
    if (l.weights_csv.empty() || l.bias_csv.empty()) {
      fail(ErrorCode::kConfig,
           "layer " + std::to_string(k + 1) + " has no weights_csv/bias_csv");
    }
    oracle::ClearLayer c;
    c.in_dim = l.in_dim;
    c.out_dim = l.out_dim;
    c.relu = l.activation == Activation::kRelu;
    c.weights = read_weights_csv(l.weights_csv, l.out_dim, l.in_dim);
    c.bias = read_bias_csv(l.bias_csv, l.out_dim);
    net.push_back(std::move(c));
  }
  return net;
}

std::string oracle_command(const std::vector<std::string>& args) {
  const auto usage = [] {
    fail(ErrorCode::kUsage,
         "oracle counts <network.ini> | infer <network.ini> <image.csv> [f] | "
         "fbits <network.ini> <labelled.csv> <f>...");
  };
  if (args.empty()) usage();
  std::ostringstream out;
  if (args[0] == "counts" && args.size() == 2) {
    const auto net = NetworkConfig::load(args[1]);
    const auto shapes = net.shapes();
    out << oracle::count_network(shapes).to_text();
  } else if (args[0] == "infer" && (args.size() == 3 || args.size() == 4)) {
    const auto clear = load_clear_network(NetworkConfig::load(args[1]));
    const FixedPointConfig fp(args.size() == 4 ? parse_f(args[3])
                                               : kDefaultFractionalBits);
    const auto image = read_image_csv(args[2]);
    const auto fixed = oracle::clear_infer(clear, image, fp);
    const auto flt = oracle::float_infer(clear, image);
    out << "label=" << fixed.label << "\nfloat_label=" << flt.label
        << "\nlogits=";
    out << std::setprecision(9);
    for (std::size_t i = 0; i < fixed.logits.size(); ++i) {
      out << (i ? "," : "") << decode(fixed.logits[i], fp);
    }
    out << '\n';
  } else if (args[0] == "fbits" && args.size() >= 4) {
    const auto clear = load_clear_network(NetworkConfig::load(args[1]));
    std::vector<int> labels;
    const auto inputs = read_labelled(args[2], labels, clear.front().in_dim);
    std::vector<int> fs;
    for (std::size_t i = 3; i < args.size(); ++i) fs.push_back(parse_f(args[i]));
    out << std::setprecision(9);
    for (const auto& row : oracle::error_vs_fractional_bits(clear, inputs, fs)) {
      out << "f=" << row.fractional_bits << " mean_l2=" << row.mean_l2
          << " agreement=" << row.agreement << '\n';
    }
  } else {
    usage();
  }
  return out.str();
}

}  // namespace ab2h
