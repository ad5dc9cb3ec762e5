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

#ifndef AB2H_AB2H_H_
#define AB2H_AB2H_H_

/* C interface to the ab2h library. Every function returns an ab2h_status;
 * on failure ab2h_last_error() holds a message for the calling thread. The
 * status values double as the exit codes of the ab2h command. */

#include <stddef.h>
#include <stdint.h>

#if defined(AB2H_BUILDING)
#define AB2H_API __attribute__((visibility("default")))
#else
#define AB2H_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ab2h_status {
  AB2H_OK = 0,
  AB2H_E_USAGE = 2,
  AB2H_E_INTERNAL = 3,
  AB2H_E_RANGE = 10,
  AB2H_E_CONFIG = 11,
  AB2H_E_RNG = 12,
  AB2H_E_SHARE_MISMATCH = 20,
  AB2H_E_LENGTH_MISMATCH = 21,
  AB2H_E_DIMS_MISMATCH = 22,
  AB2H_E_SESSION_MISMATCH = 23,
  AB2H_E_SPLIT_MISMATCH = 24,
  AB2H_E_COUNTER_SKEW = 25,
  AB2H_E_TRIPLE_EXHAUSTED = 26,
  AB2H_E_EMPTY_INPUT = 27,
  AB2H_E_TIMEOUT = 30,
  AB2H_E_PEER_TIMEOUT = 31,
  AB2H_E_HELPER_TIMEOUT = 32,
  AB2H_E_HANDSHAKE_TIMEOUT = 33,
  AB2H_E_INCOMPATIBLE_PEER = 34,
  AB2H_E_PROTOCOL = 35,
  AB2H_E_CONNECTION_CLOSED = 36,
  AB2H_E_SERVER_UNREACHABLE = 37,
  AB2H_E_HELPER_UNREACHABLE = 38,
  AB2H_E_PEER_UNREACHABLE = 39,
  AB2H_E_BIND = 40,
  AB2H_E_MALFORMED_FRAME = 45,
  AB2H_E_VERSION_MISMATCH = 46,
  AB2H_E_FILE_FORMAT = 50,
  AB2H_E_CSV_FORMAT = 51,
  AB2H_E_CHAIN = 52,
  AB2H_E_NOT_ONE_HOT = 53,
  AB2H_E_IO = 54
} ab2h_status;

typedef struct ab2h_config ab2h_config;
typedef struct ab2h_result ab2h_result;

AB2H_API const char* ab2h_version(void);
AB2H_API const char* ab2h_status_name(int status);
/* Message of the last failure on this thread; "" if none. */
AB2H_API const char* ab2h_last_error(void);

AB2H_API int ab2h_encode(double x, int fractional_bits, uint64_t* out);
AB2H_API int ab2h_decode(uint64_t r, int fractional_bits, double* out);

/* role: server0, server1, helper, model-provider, image-provider. */
AB2H_API int ab2h_config_load(const char* path, const char* role,
                              ab2h_config** out);
AB2H_API int ab2h_config_set_listen(ab2h_config* cfg, const char* endpoint);
/* "helper=host:port", "server0=host:port" or "server1=host:port". */
AB2H_API int ab2h_config_set_connect(ab2h_config* cfg, const char* spec);
AB2H_API int ab2h_config_set_trace(ab2h_config* cfg, int on);
/* Only used while tracing is on. */
AB2H_API int ab2h_config_set_seed(ab2h_config* cfg, uint64_t seed);
AB2H_API void ab2h_config_free(ab2h_config* cfg);

/* Runs the role to completion; progress goes to stderr. */
AB2H_API int ab2h_run_role(const ab2h_config* cfg, ab2h_result** out);
/* The reconstructed label (image provider), else -1. */
AB2H_API int ab2h_result_label(const ab2h_result* result);
/* The run report (compute servers), else "". */
AB2H_API const char* ab2h_result_report(const ab2h_result* result);
AB2H_API void ab2h_result_free(ab2h_result* result);

AB2H_API int ab2h_reconstruct_label(const char* file0, const char* file1,
                                    int* label);

/* Deals rows x cols reals into two arithmetic share files. */
AB2H_API int ab2h_deal_arith_file(const double* values, size_t rows,
                                  size_t cols, int fractional_bits,
                                  uint64_t seed, const char* path0,
                                  const char* path1);
/* Reconstructs two arithmetic share files; *count gets the element count
 * even when capacity is too small (then AB2H_E_LENGTH_MISMATCH). */
AB2H_API int ab2h_reconstruct_arith_file(const char* path0, const char* path1,
                                         double* out, size_t capacity,
                                         size_t* count);

/* Plaintext reference computations; *text is freed with ab2h_free. */
AB2H_API int ab2h_oracle(int argc, const char* const* argv, char** text);
AB2H_API void ab2h_free(void* p);

#ifdef __cplusplus
}
#endif

#endif /* AB2H_AB2H_H_ */
