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

#include <string>
#include <vector>

#include "qmlsim/dataset.hpp"
#include "qmlsim/metrics.hpp"
#include "qmlsim/model.hpp"

namespace qmlsim {

/**
 * Runs the model over a dataset on one execution backend, producing the
 * records a metrics report is built from. In shot mode each sample gets its
 * own deterministic sub-stream of the configured seed.
 */
inline std::vector<EvaluationRecord> evaluate_dataset(
    const HybridModel& model, const Dataset& ds, const ExecutionConfig& cfg,
    const std::string& backend_tag) {
  validate_dataset(ds);
  const ModelEngine engine(model.config, cfg);
  std::vector<EvaluationRecord> records;
  records.reserve(ds.n_samples());
  for (long i = 0; i < ds.n_samples(); ++i) {
    const Eigen::VectorXd row = ds.features.row(i).transpose();
    const double y = engine.forward_seeded(
        model, {row.data(), static_cast<size_t>(row.size())},
        mix_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    EvaluationRecord rec;
    rec.output = y;
    rec.predicted = y >= 0.5 ? 1 : 0;
    rec.label = ds.labels[i];
    rec.backend = backend_tag;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace qmlsim
