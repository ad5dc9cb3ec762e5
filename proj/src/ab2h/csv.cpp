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

#include "ab2h/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>

namespace ab2h {
namespace {

constexpr std::size_t kImageSide = 28;
constexpr std::size_t kImagePixels = kImageSide * kImageSide;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string describe(std::size_t row, std::size_t col) {
  std::string at = "row " + std::to_string(row);
  if (col != 0) at += ", column " + std::to_string(col);
  return at;
}

void check_shape(const CsvMatrix& m, const std::string& name,
                 std::size_t rows, std::size_t cols) {
  if (m.rows != rows) {
    throw CsvFormatError(name, m.rows, 0,
                         "expected " + std::to_string(rows) + " rows, found " +
                             std::to_string(m.rows));
  }
  if (m.cols != cols) {
    throw CsvFormatError(name, 1, 0,
                         "expected " + std::to_string(cols) +
                             " columns, found " + std::to_string(m.cols));
  }
}

}  // namespace

CsvFormatError::CsvFormatError(const std::string& file, std::size_t row,
                               std::size_t col, const std::string& what)
    : Error(ErrorCode::kCsvFormat,
            file + ": " + describe(row, col) + ": " + what),
      row_(row),
      col_(col) {}

CsvMatrix parse_csv(const std::string& text, const std::string& name) {
  CsvMatrix m;
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string_view line =
        trim(std::string_view(text).substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;
    ++row;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view cell = trim(
          line.substr(start, comma == std::string_view::npos
                                 ? std::string_view::npos
                                 : comma - start));
      ++col;
      double v = 0;
      const auto [end, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() ||
          end != cell.data() + cell.size() || !std::isfinite(v)) {
        throw CsvFormatError(name, row, col,
                             "not a number: \"" + std::string(cell) + "\"");
      }
      m.values.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (row == 1) {
      m.cols = col;
    } else if (col != m.cols) {
      throw CsvFormatError(name, row, 0,
                           "has " + std::to_string(col) + " cells, row 1 has " +
                               std::to_string(m.cols));
    }
  }
  m.rows = row;
  return m;
}

CsvMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_csv(text.str(), path.string());
}

std::vector<double> read_image_csv(const std::filesystem::path& path) {
  const CsvMatrix m = read_csv(path);
  const std::string name = path.string();
  if (!(m.rows == kImagePixels && m.cols == 1)) {
    if (m.rows != kImageSide) {
      throw CsvFormatError(name, m.rows, 0,
                           "image needs 28 rows of 28 pixels or 784 rows of "
                           "one pixel, found " +
                               std::to_string(m.rows) + " rows");
    }
    check_shape(m, name, kImageSide, kImageSide);
  }
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    const double v = m.values[i];
    if (v < 0.0 || v > 1.0) {
      throw CsvFormatError(name, i / m.cols + 1, i % m.cols + 1,
                           "pixel outside [0, 1]");
    }
  }
  return m.values;
}

std::vector<double> read_weights_csv(const std::filesystem::path& path,
                                     std::size_t out_dim,
                                     std::size_t in_dim) {
  CsvMatrix m = read_csv(path);
  if (m.rows != out_dim || m.cols != in_dim) {
    fail(ErrorCode::kDimsMismatch,
         path.string() + ": weights are " + std::to_string(m.rows) + "x" +
             std::to_string(m.cols) + ", expected " + std::to_string(out_dim) +
             "x" + std::to_string(in_dim));
  }
  return std::move(m.values);
}

std::vector<double> read_bias_csv(const std::filesystem::path& path,
                                  std::size_t out_dim) {
  CsvMatrix m = read_csv(path);
  if (m.rows != out_dim || m.cols != 1) {
    fail(ErrorCode::kDimsMismatch,
         path.string() + ": bias is " + std::to_string(m.rows) + "x" +
             std::to_string(m.cols) + ", expected " + std::to_string(out_dim) +
             "x1");
  }
  return std::move(m.values);
}

void write_csv(const std::filesystem::path& path, std::size_t rows,
               std::size_t cols, const std::vector<double>& values) {
  if (values.size() != rows * cols) {
    fail(ErrorCode::kDimsMismatch, "write_csv: value count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << values[r * cols + c];
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace ab2h
