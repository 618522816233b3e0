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

#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmlsim/circuit.hpp"
#include "qmlsim/errors.hpp"

namespace qmlsim {

/// One evaluated sample: the model output, its rounding, and the truth.
struct EvaluationRecord {
  double output = 0.0;  // in [0, 1]
  int predicted = 0;
  int label = 0;
  std::string backend;
};

/// The row schema of a backend-comparison report.
struct MetricsReport {
  std::string backend;
  double accuracy = 0.0;
  double sureness = 0.0;
  double confidence_mean = 0.0;
  double confidence_spread = 0.0;
  long long n0 = 0;  // correctly predicted class-0 samples
  long long n1 = 0;  // correctly predicted class-1 samples
  long long imbalance = 0;  // n0 - n1
  long long n_samples = 0;
};

/**
 * How decisively the model classifies: twice the mean distance of the
 * outputs from the 0.5 demarcation line, in [0, 1]. Labels play no part.
 */
inline double sureness(std::span<const double> outputs) {
  if (outputs.empty()) throw Error("sureness of an empty output set");
  double acc = 0;
  for (const double y : outputs) {
    if (y < 0.0 || y > 1.0) throw Error("model output outside [0, 1]");
    acc += std::abs(y - 0.5);
  }
  return 2.0 * acc / static_cast<double>(outputs.size());
}

/**
 * Correctness weighted by decisiveness: mean of c_i = 1 - |l_i - y_i|,
 * with the sample standard deviation of the c_i as the reported spread.
 * 0 means always wrong and maximally sure; 1 always right and sure.
 */
inline std::pair<double, double> confidence(std::span<const double> outputs,
                                            std::span<const int> labels) {
  if (outputs.empty()) throw Error("confidence of an empty record set");
  if (outputs.size() != labels.size())
    throw Error("confidence needs matching outputs and labels");
  std::vector<double> c(outputs.size());
  double mean = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw Error("labels must be 0 or 1");
    c[i] = 1.0 - std::abs(static_cast<double>(labels[i]) - outputs[i]);
    mean += c[i];
  }
  mean /= static_cast<double>(c.size());
  double var = 0;
  for (const double ci : c) var += (ci - mean) * (ci - mean);
  const double spread =
      c.size() > 1 ? std::sqrt(var / static_cast<double>(c.size() - 1)) : 0.0;
  return {mean, spread};
}

struct ImbalanceCounts {
  long long n0 = 0;
  long long n1 = 0;
  long long imbalance = 0;  // n0 - n1
};

/// Correct predictions per class; the signed difference exposes a model
/// collapsing onto a single class.
inline ImbalanceCounts imbalance(std::span<const int> predictions,
                                 std::span<const int> labels) {
  if (predictions.empty()) throw Error("imbalance of an empty record set");
  if (predictions.size() != labels.size())
    throw Error("imbalance needs matching predictions and labels");
  ImbalanceCounts out;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw Error("labels must be 0 or 1");
    if (predictions[i] == labels[i]) {
      if (labels[i] == 0)
        ++out.n0;
      else
        ++out.n1;
    }
  }
  out.imbalance = out.n0 - out.n1;
  return out;
}

inline double accuracy(std::span<const int> predictions,
                       std::span<const int> labels) {
  if (predictions.empty()) throw Error("accuracy of an empty record set");
  if (predictions.size() != labels.size())
    throw Error("accuracy needs matching predictions and labels");
  long long correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

/// Assembles one report row from records that share a backend tag.
inline MetricsReport metrics_report(std::span<const EvaluationRecord> records) {
  if (records.empty()) throw Error("metrics report of an empty record set");
  MetricsReport report;
  report.backend = records.front().backend;
  std::vector<double> outputs;
  std::vector<int> predictions, labels;
  outputs.reserve(records.size());
  for (const auto& r : records) {
    if (r.backend != report.backend)
      throw Error("metrics report mixes records from different backends");
    outputs.push_back(r.output);
    predictions.push_back(r.predicted);
    labels.push_back(r.label);
  }
  report.n_samples = static_cast<long long>(records.size());
  report.sureness = sureness(outputs);
  const auto [cmean, cspread] = confidence(outputs, labels);
  report.confidence_mean = cmean;
  report.confidence_spread = cspread;
  const auto counts = imbalance(predictions, labels);
  report.n0 = counts.n0;
  report.n1 = counts.n1;
  report.imbalance = counts.imbalance;
  // accuracy == (n0 + n1) / N holds by construction; computed through the
  // counts so the identity cannot silently drift.
  report.accuracy =
      static_cast<double>(counts.n0 + counts.n1) /
      static_cast<double>(report.n_samples);
  return report;
}

inline const char* metrics_csv_header() {
  return "backend,accuracy,sureness,confidence_mean,confidence_spread,n0,n1,"
         "imbalance,n_samples";
}

inline std::string metrics_csv_row(const MetricsReport& r) {
  std::ostringstream out;
  out << r.backend << ',' << format_double(r.accuracy) << ','
      << format_double(r.sureness) << ',' << format_double(r.confidence_mean)
      << ',' << format_double(r.confidence_spread) << ',' << r.n0 << ','
      << r.n1 << ',' << r.imbalance << ',' << r.n_samples;
  return out.str();
}

inline nlohmann::ordered_json metrics_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["backend"] = r.backend;
  j["accuracy"] = r.accuracy;
  j["sureness"] = r.sureness;
  j["confidence_mean"] = r.confidence_mean;
  j["confidence_spread"] = r.confidence_spread;
  j["n0"] = r.n0;
  j["n1"] = r.n1;
  j["imbalance"] = r.imbalance;
  j["n_samples"] = r.n_samples;
  return j;
}

inline MetricsReport metrics_from_json(const nlohmann::json& j) {
  MetricsReport r;
  r.backend = j.at("backend").get<std::string>();
  r.accuracy = j.at("accuracy").get<double>();
  r.sureness = j.at("sureness").get<double>();
  r.confidence_mean = j.at("confidence_mean").get<double>();
  r.confidence_spread = j.at("confidence_spread").get<double>();
  r.n0 = j.at("n0").get<long long>();
  r.n1 = j.at("n1").get<long long>();
  r.imbalance = j.at("imbalance").get<long long>();
  r.n_samples = j.at("n_samples").get<long long>();
  return r;
}

}  // namespace qmlsim
