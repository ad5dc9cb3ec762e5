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

#include "ab2h/ab2h.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "ab2h/error.h"
#include "ab2h/random.h"
#include "ab2h/ring.h"
#include "ab2h/roles.h"
#include "ab2h/share_file.h"
#include "ab2h/shares.h"

struct ab2h_config {
  ab2h::RoleConfig cfg;
};

struct ab2h_result {
  ab2h::RoleResult result;
};

namespace {

thread_local std::string last_error;

template <typename F>
int guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return AB2H_OK;
  } catch (const ab2h::Error& e) {
    last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return AB2H_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return AB2H_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) {
    ab2h::fail(ab2h::ErrorCode::kUsage, std::string(what) + " is null");
  }
}

}  // namespace

extern "C" {

const char* ab2h_version(void) { return "1.0.0"; }

const char* ab2h_status_name(int status) {
  return ab2h::error_code_name(static_cast<ab2h::ErrorCode>(status));
}

const char* ab2h_last_error(void) { return last_error.c_str(); }

int ab2h_encode(double x, int fractional_bits, uint64_t* out) {
  return guarded([&] {
    need(out, "out");
    *out = ab2h::encode(x, ab2h::FixedPointConfig(fractional_bits));
  });
}

int ab2h_decode(uint64_t r, int fractional_bits, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = ab2h::decode(r, ab2h::FixedPointConfig(fractional_bits));
  });
}

int ab2h_config_load(const char* path, const char* role, ab2h_config** out) {
  return guarded([&] {
    need(path, "path");
    need(role, "role");
    need(out, "out");
    *out = new ab2h_config{
        ab2h::RoleConfig::load(path, ab2h::parse_role(role))};
  });
}

int ab2h_config_set_listen(ab2h_config* cfg, const char* endpoint) {
  return guarded([&] {
    need(cfg, "cfg");
    need(endpoint, "endpoint");
    cfg->cfg.listen = ab2h::net::Endpoint::parse(endpoint);
  });
}

int ab2h_config_set_connect(ab2h_config* cfg, const char* spec) {
  return guarded([&] {
    need(cfg, "cfg");
    need(spec, "spec");
    cfg->cfg.apply_connect(spec);
  });
}

int ab2h_config_set_trace(ab2h_config* cfg, int on) {
  return guarded([&] {
    need(cfg, "cfg");
    cfg->cfg.trace = on != 0;
  });
}

int ab2h_config_set_seed(ab2h_config* cfg, uint64_t seed) {
  return guarded([&] {
    need(cfg, "cfg");
    cfg->cfg.seed = seed;
  });
}

void ab2h_config_free(ab2h_config* cfg) { delete cfg; }

int ab2h_run_role(const ab2h_config* cfg, ab2h_result** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = nullptr;
    auto r = ab2h::run_role(cfg->cfg, std::cerr);
    *out = new ab2h_result{std::move(r)};
  });
}

int ab2h_result_label(const ab2h_result* result) {
  return result != nullptr && result->result.label ? *result->result.label
                                                   : -1;
}

const char* ab2h_result_report(const ab2h_result* result) {
  return result != nullptr ? result->result.report.c_str() : "";
}

void ab2h_result_free(ab2h_result* result) { delete result; }

int ab2h_reconstruct_label(const char* file0, const char* file1, int* label) {
  return guarded([&] {
    need(file0, "file0");
    need(file1, "file1");
    need(label, "label");
    *label = ab2h::reconstruct_label(file0, file1);
  });
}

int ab2h_deal_arith_file(const double* values, size_t rows, size_t cols,
                         int fractional_bits, uint64_t seed, const char* path0,
                         const char* path1) {
  return guarded([&] {
    need(values, "values");
    need(path0, "path0");
    need(path1, "path1");
    const ab2h::FixedPointConfig fp(fractional_bits);
    std::vector<ab2h::Ring> enc(rows * cols);
    for (size_t i = 0; i < enc.size(); ++i) enc[i] = ab2h::encode(values[i], fp);
    auto rng = ab2h::ChaChaPrg::from_seed(seed, "capi-deal", 0);
    auto [s0, s1] = ab2h::make_shares(enc, rows, cols, fp, rng);
    ab2h::write_arith_file(path0, s0);
    ab2h::write_arith_file(path1, s1);
  });
}

int ab2h_reconstruct_arith_file(const char* path0, const char* path1,
                                double* out, size_t capacity, size_t* count) {
  return guarded([&] {
    need(path0, "path0");
    need(path1, "path1");
    need(count, "count");
    const auto a = ab2h::read_arith_file(path0);
    const auto b = ab2h::read_arith_file(path1);
    const auto v = ab2h::reconstruct_arith(a, b);
    *count = v.size();
    if (v.size() > capacity) {
      ab2h::fail(ab2h::ErrorCode::kLengthMismatch,
                 "buffer holds " + std::to_string(capacity) + " of " +
                     std::to_string(v.size()) + " values");
    }
    need(out, "out");
    for (size_t i = 0; i < v.size(); ++i) {
      out[i] = ab2h::decode(v[i], a.fixed_point());
    }
  });
}

int ab2h_oracle(int argc, const char* const* argv, char** text) {
  return guarded([&] {
    need(text, "text");
    *text = nullptr;
    std::vector<std::string> args;
    for (int i = 0; i < argc; ++i) args.emplace_back(argv[i]);
    const std::string s = ab2h::oracle_command(args);
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p == nullptr) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    *text = p;
  });
}

void ab2h_free(void* p) { std::free(p); }

}  // extern "C"
