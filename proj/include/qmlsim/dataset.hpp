// Copyright 2026 The qmlsim developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qmlsim/circuit.hpp"
#include "qmlsim/errors.hpp"
#include "qmlsim/rng.hpp"

namespace qmlsim {

/// Feature rows with binary labels. Operations never mutate their input.
struct Dataset {
  Eigen::MatrixXd features;  // N x D
  std::vector<int> labels;   // N entries in {0, 1}

  long n_samples() const { return features.rows(); }
  long n_features() const { return features.cols(); }
};

inline void validate_dataset(const Dataset& ds) {
  if (ds.features.rows() != static_cast<long>(ds.labels.size()))
    throw DataError("feature rows and label count differ");
  for (const int l : ds.labels)
    if (l != 0 && l != 1) throw DataError("labels must be 0 or 1");
  if (!ds.features.allFinite())
    throw DataError("dataset contains non-finite features");
}

/**
 * Loads comma-separated rows of D features followed by a final {0,1} label
 * column. Parse failures report the offending row and column.
 */
inline Dataset load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  if (has_header) {
    std::getline(in, line);
    ++line_no;
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<double> row;
    std::size_t pos = 0;
    int col = 0;
    while (pos <= line.size()) {
      const auto comma = line.find(',', pos);
      const std::string piece =
          line.substr(pos, comma == std::string::npos ? line.size() - pos
                                                      : comma - pos);
      ++col;
      double v = 0;
      const auto* begin = piece.data();
      const auto* end = piece.data() + piece.size();
      const auto res = std::from_chars(begin, end, v);
      if (res.ec != std::errc() || res.ptr != end)
        throw DataError("row " + std::to_string(line_no) + ", column " +
                        std::to_string(col) + ": cannot parse `" + piece +
                        "` as a number");
      if (!std::isfinite(v))
        throw DataError("row " + std::to_string(line_no) + ", column " +
                        std::to_string(col) + ": non-finite value");
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (row.size() < 2)
      throw DataError("row " + std::to_string(line_no) +
                      ": need at least one feature and a label");
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError("row " + std::to_string(line_no) +
                      ": column count differs from the first row");
    const double label = row.back();
    if (label != 0.0 && label != 1.0)
      throw DataError("row " + std::to_string(line_no) + ": label " +
                      format_double(label) + " is not 0 or 1");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("dataset is empty: " + path.string());

  Dataset ds;
  const long n = static_cast<long>(rows.size());
  const long d = static_cast<long>(rows.front().size()) - 1;
  ds.features.resize(n, d);
  ds.labels.resize(n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < d; ++j) ds.features(i, j) = rows[i][j];
    ds.labels[i] = static_cast<int>(rows[i][d]);
  }
  validate_dataset(ds);
  return ds;
}

/// Writes features then the label column, 17 significant digit floats.
inline void save_csv(const Dataset& ds, const std::filesystem::path& path,
                     bool with_header = false) {
  validate_dataset(ds);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset: " + path.string());
  if (with_header) {
    for (long j = 0; j < ds.n_features(); ++j) out << 'f' << j << ',';
    out << "label\n";
  }
  for (long i = 0; i < ds.n_samples(); ++i) {
    for (long j = 0; j < ds.n_features(); ++j)
      out << format_double(ds.features(i, j)) << ',';
    out << ds.labels[i] << "\n";
  }
}

/**
 * Two unit-variance Gaussian clusters with means +-separation/2 along the
 * first feature axis, n/2 samples per class, deterministic given the seed.
 */
inline Dataset synthesize(long n, long dims, double separation,
                          std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw DataError("sample count must be even and >= 2");
  if (dims < 1) throw DataError("feature dimension must be positive");
  Dataset ds;
  ds.features.resize(n, dims);
  ds.labels.resize(n);
  Rng rng(seed);
  for (long i = 0; i < n; ++i) {
    const int label = i < n / 2 ? 0 : 1;
    const double mean = (label == 0 ? -1.0 : 1.0) * separation / 2.0;
    for (long j = 0; j < dims; ++j)
      ds.features(i, j) = (j == 0 ? mean : 0.0) + rng.normal();
    ds.labels[i] = label;
  }
  return ds;
}

/// l -> 1 - l on every label; features untouched.
inline Dataset flip_labels(const Dataset& ds) {
  Dataset out = ds;
  for (auto& l : out.labels) l = 1 - l;
  return out;
}

/**
 * Seeded stratified split: per-class counts in the train side differ from
 * fraction * class-count by at most one sample.
 */
inline std::pair<Dataset, Dataset> split(const Dataset& ds,
                                         double train_fraction,
                                         std::uint64_t seed) {
  validate_dataset(ds);
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw DataError("train fraction must lie strictly between 0 and 1");
  std::vector<long> idx0, idx1;
  for (long i = 0; i < ds.n_samples(); ++i)
    (ds.labels[i] == 0 ? idx0 : idx1).push_back(i);
  Rng rng(seed);
  const auto shuffle = [&rng](std::vector<long>& v) {
    for (long i = static_cast<long>(v.size()) - 1; i > 0; --i)
      std::swap(v[i], v[rng.uniform_int(0, static_cast<int>(i))]);
  };
  shuffle(idx0);
  shuffle(idx1);

  std::vector<long> train_idx, test_idx;
  for (const auto* cls : {&idx0, &idx1}) {
    const long take = std::lround(train_fraction *
                                  static_cast<double>(cls->size()));
    for (long i = 0; i < static_cast<long>(cls->size()); ++i)
      (i < take ? train_idx : test_idx).push_back((*cls)[i]);
  }
  if (train_idx.empty() || test_idx.empty())
    throw DataError("split fraction leaves one side empty");
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  const auto take_rows = [&ds](const std::vector<long>& idx) {
    Dataset out;
    out.features.resize(static_cast<long>(idx.size()), ds.n_features());
    out.labels.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.features.row(static_cast<long>(i)) = ds.features.row(idx[i]);
      out.labels[i] = ds.labels[idx[i]];
    }
    return out;
  };
  return {take_rows(train_idx), take_rows(test_idx)};
}

}  // namespace qmlsim
