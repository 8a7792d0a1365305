/*
 * Copyright 2026 The rfalcf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RFALCF_DATA_HPP
#define RFALCF_DATA_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rfalcf/types.hpp"

namespace rfalcf {

enum class FileFormat { csv, binary };

/// A data matrix bundled with its ground-truth class ids.
struct LabeledDataset {
  DataMatrix matrix;        // d x N
  std::vector<int> labels;  // one class id per column
  std::string name;
};

namespace detail {

constexpr char kMagic[4] = {'R', 'F', 'A', 'M'};

inline void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const std::string& buf, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[at + i])) << (8 * i);
  return v;
}

inline double get_f64(const std::string& buf, std::size_t at) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[at + i])) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline double parse_double(const std::string& cell, int line_no) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("line " + std::to_string(line_no) + ": non-numeric cell '" +
                     cell + "'");
  return value;
}

inline int parse_label(const std::string& cell, int line_no) {
  int value = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("line " + std::to_string(line_no) + ": non-numeric label '" +
                     cell + "'");
  return value;
}

}  // namespace detail

/// Binary layout: magic "RFAM", u32 rows, u32 cols (little endian), rows*cols
/// f64 values column-major, then cols u32 label ids. Round-trips bit-exactly.
inline void save_matrix(const LabeledDataset& dataset, const std::string& path,
                        FileFormat format) {
  const Matrix& m = dataset.matrix.values;
  if (static_cast<Eigen::Index>(dataset.labels.size()) != m.cols())
    throw InvalidInputError("save_matrix: label count does not match columns");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("save_matrix: cannot open '" + path + "' for writing");

  if (format == FileFormat::binary) {
    std::string buf;
    buf.reserve(4 + 8 + static_cast<std::size_t>(m.size()) * 8 + dataset.labels.size() * 4);
    buf.append(detail::kMagic, 4);
    detail::put_u32(buf, static_cast<std::uint32_t>(m.rows()));
    detail::put_u32(buf, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) detail::put_f64(buf, m(i, j));
    for (int label : dataset.labels) {
      if (label < 0) throw InvalidInputError("save_matrix: negative label id");
      detail::put_u32(buf, static_cast<std::uint32_t>(label));
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  } else {
    out << "label";
    for (Eigen::Index i = 0; i < m.rows(); ++i) out << ",f" << i;
    out << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << dataset.labels[j];
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        out << ',' << detail::format_double(m(i, j));
      out << '\n';
    }
  }
  if (!out) throw IoError("save_matrix: write to '" + path + "' failed");
}

/// CSV layout: header line, then one sample per row as label,f1,...,fd
/// (transposed into d x N on load).
inline LabeledDataset load_matrix(const std::string& path, FileFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_matrix: cannot open '" + path + "'");

  LabeledDataset dataset;
  dataset.name = std::filesystem::path(path).stem().string();

  if (format == FileFormat::binary) {
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    if (buf.size() < 4 || std::memcmp(buf.data(), detail::kMagic, 4) != 0)
      throw ParseError("bad magic at byte 0 (expected RFAM)");
    if (buf.size() < 12)
      throw ParseError("truncated header at byte " + std::to_string(buf.size()));
    const std::uint32_t rows = detail::get_u32(buf, 4);
    const std::uint32_t cols = detail::get_u32(buf, 8);
    if (rows == 0 || cols == 0)
      throw ParseError("bad dimensions at byte 4: " + std::to_string(rows) + " x " +
                       std::to_string(cols));
    const std::size_t payload = 12 + static_cast<std::size_t>(rows) * cols * 8;
    const std::size_t expected = payload + static_cast<std::size_t>(cols) * 4;
    if (buf.size() < expected)
      throw ParseError("truncated payload at byte " + std::to_string(buf.size()) +
                       " (expected " + std::to_string(expected) + " bytes)");
    dataset.matrix.values.resize(rows, cols);
    std::size_t at = 12;
    for (std::uint32_t j = 0; j < cols; ++j)
      for (std::uint32_t i = 0; i < rows; ++i, at += 8)
        dataset.matrix.values(i, j) = detail::get_f64(buf, at);
    dataset.labels.resize(cols);
    for (std::uint32_t j = 0; j < cols; ++j, at += 4)
      dataset.labels[j] = static_cast<int>(detail::get_u32(buf, at));
  } else {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("line 1: missing header");
    int line_no = 1;
    std::vector<std::vector<double>> samples;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::stringstream cells(line);
      std::string cell;
      if (!std::getline(cells, cell, ','))
        throw ParseError("line " + std::to_string(line_no) + ": empty row");
      dataset.labels.push_back(detail::parse_label(cell, line_no));
      std::vector<double> row;
      while (std::getline(cells, cell, ','))
        row.push_back(detail::parse_double(cell, line_no));
      if (row.empty())
        throw ParseError("line " + std::to_string(line_no) + ": no feature cells");
      if (!samples.empty() && row.size() != samples.front().size())
        throw ParseError("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(samples.front().size()) + " features, got " +
                         std::to_string(row.size()));
      samples.push_back(std::move(row));
    }
    if (samples.empty()) throw ParseError("line 1: no data rows");
    dataset.matrix.values.resize(static_cast<Eigen::Index>(samples.front().size()),
                                 static_cast<Eigen::Index>(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j)
      for (std::size_t i = 0; i < samples[j].size(); ++i)
        dataset.matrix.values(static_cast<Eigen::Index>(i),
                              static_cast<Eigen::Index>(j)) = samples[j][i];
  }
  dataset.matrix.labels = dataset.labels;
  return dataset;
}

/// Well-separated nonnegative Gaussian blobs: K class means drawn uniformly
/// in [0,1)^d with pairwise distance >= 4 * spread enforced by rejection,
/// n_per_class samples per class (mean + N(0, spread^2), clamped at 0).
inline LabeledDataset synth_blobs(int dim, int n_per_class, int k, double spread,
                                  std::uint64_t seed) {
  if (dim < 1 || n_per_class < 1 || k < 1)
    throw InvalidInputError("synth_blobs: dim, n_per_class, K must be >= 1");
  if (dim < k) throw InvalidInputError("synth_blobs: dim must be >= K");
  if (!(spread >= 0.0) || !std::isfinite(spread))
    throw InvalidInputError("synth_blobs: spread must be finite and >= 0");

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Vector> means;
  for (int c = 0; c < k; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      Vector candidate(dim);
      for (int i = 0; i < dim; ++i) candidate(i) = unif(gen);
      placed = std::all_of(means.begin(), means.end(), [&](const Vector& m) {
        return (m - candidate).norm() >= 4.0 * spread;
      });
      if (placed) means.push_back(std::move(candidate));
    }
    if (!placed)
      throw InvalidInputError("synth_blobs: could not separate class means; spread too large");
  }

  LabeledDataset dataset;
  dataset.name = "blobs";
  dataset.matrix.values.resize(dim, static_cast<Eigen::Index>(k) * n_per_class);
  dataset.labels.resize(static_cast<std::size_t>(k) * n_per_class);
  Eigen::Index col = 0;
  for (int c = 0; c < k; ++c) {
    for (int sample = 0; sample < n_per_class; ++sample, ++col) {
      for (int i = 0; i < dim; ++i)
        dataset.matrix.values(i, col) =
            std::max(0.0, means[c](i) + spread * normal(gen));
      dataset.labels[static_cast<std::size_t>(col)] = c;
    }
  }
  dataset.matrix.labels = dataset.labels;
  return dataset;
}

/// Additive Gaussian pixel corruption: for every sample, a uniformly random
/// subset of floor(pixel_fraction * d) coordinates receives N(0, variance)
/// noise, clamped to the dataset's original value range. The standard-normal
/// draws do not depend on the variance, so sweeping the variance with a fixed
/// seed perturbs the same pixels along the same directions.
inline LabeledDataset corrupt_gaussian(const LabeledDataset& dataset, double variance,
                                       double pixel_fraction, std::uint64_t seed) {
  if (!(variance >= 0.0) || !std::isfinite(variance))
    throw InvalidInputError("corrupt_gaussian: variance must be finite and >= 0");
  if (!(pixel_fraction >= 0.0) || !(pixel_fraction <= 1.0))
    throw InvalidInputError("corrupt_gaussian: pixel_fraction must be in [0,1]");

  LabeledDataset out = dataset;
  const Eigen::Index d = dataset.matrix.values.rows();
  const Eigen::Index n = dataset.matrix.values.cols();
  const Eigen::Index count =
      static_cast<Eigen::Index>(std::floor(pixel_fraction * static_cast<double>(d)));
  if (variance == 0.0 || count == 0) return out;

  const double lo = dataset.matrix.values.minCoeff();
  const double hi = dataset.matrix.values.maxCoeff();
  const double sigma = std::sqrt(variance);

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::Index> coords(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::iota(coords.begin(), coords.end(), 0);
    for (Eigen::Index i = 0; i < count; ++i) {
      std::uniform_int_distribution<Eigen::Index> pick(i, d - 1);
      std::swap(coords[i], coords[pick(gen)]);
    }
    for (Eigen::Index i = 0; i < count; ++i) {
      double& cell = out.matrix.values(coords[i], j);
      cell = std::clamp(cell + sigma * normal(gen), lo, hi);
    }
  }
  return out;
}

/// Scales every nonzero column to unit L2 norm; zero columns pass through.
inline LabeledDataset normalize_columns(const LabeledDataset& dataset) {
  LabeledDataset out = dataset;
  for (Eigen::Index j = 0; j < out.matrix.values.cols(); ++j) {
    const double norm = out.matrix.values.col(j).norm();
    if (norm > 0.0) out.matrix.values.col(j) /= norm;
  }
  return out;
}

}  // namespace rfalcf

#endif  // RFALCF_DATA_HPP
