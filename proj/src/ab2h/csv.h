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

// Plain comma-separated reals, one record per line. No quoting, no header.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ab2h/error.h"

namespace ab2h {

// kCsvFormat with a 1-based location in the message; column 0 means the
// problem is with the row as a whole.
class CsvFormatError : public Error {
 public:
  CsvFormatError(const std::string& file, std::size_t row, std::size_t col,
                 const std::string& what);

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

struct CsvMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
};

// Every row must have the same number of cells. `name` is used in errors.
CsvMatrix parse_csv(const std::string& text, const std::string& name);
CsvMatrix read_csv(const std::filesystem::path& path);

// 28 rows of 28 pixels, or an already flattened 784 x 1 column, with every
// value in [0, 1]. Returns the 784 pixels row-major.
std::vector<double> read_image_csv(const std::filesystem::path& path);

// out_dim rows of in_dim cells.
std::vector<double> read_weights_csv(const std::filesystem::path& path,
                                     std::size_t out_dim, std::size_t in_dim);
// out_dim rows of one cell.
std::vector<double> read_bias_csv(const std::filesystem::path& path,
                                  std::size_t out_dim);

void write_csv(const std::filesystem::path& path, std::size_t rows,
               std::size_t cols, const std::vector<double>& values);

}  // namespace ab2h
