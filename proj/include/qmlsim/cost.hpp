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

#include <optional>

#include "qmlsim/errors.hpp"

namespace qmlsim {

/// Per-minute QPU pricing plus the measured per-sample execution profile.
struct CostParams {
  double rate_usd_per_min = 0.0;
  double per_sample_seconds = 0.0;
  long long shots_per_sample = 1024;
};

/// Money cost of QPU time at a per-minute rate.
inline double qpu_cost(double minutes, double rate_usd_per_min) {
  if (minutes < 0.0) throw Error("minutes must be non-negative");
  if (rate_usd_per_min < 0.0) throw Error("rate must be non-negative");
  return minutes * rate_usd_per_min;
}

struct CostEstimate {
  double minutes = 0.0;
  double usd = 0.0;
  std::optional<double> fraction;  // processed share of a stated total
};

/// Linear extrapolation from a per-sample time to a sample count, with the
/// processed fraction when the full dataset size is given.
inline CostEstimate extrapolate_cost(long long n_samples,
                                     const CostParams& params,
                                     std::optional<long long> total_samples =
                                         std::nullopt) {
  if (n_samples < 1) throw Error("sample count must be at least 1");
  if (params.per_sample_seconds <= 0.0)
    throw Error("per-sample time must be positive");
  if (params.rate_usd_per_min < 0.0) throw Error("rate must be non-negative");
  CostEstimate est;
  est.minutes =
      static_cast<double>(n_samples) * params.per_sample_seconds / 60.0;
  est.usd = qpu_cost(est.minutes, params.rate_usd_per_min);
  if (total_samples) {
    if (*total_samples < 1) throw Error("total sample count must be positive");
    est.fraction = static_cast<double>(n_samples) /
                   static_cast<double>(*total_samples);
  }
  return est;
}

}  // namespace qmlsim
