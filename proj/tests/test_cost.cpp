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

#include <catch2/catch_amalgamated.hpp>

#include "qmlsim/cost.hpp"
#include "qmlsim/rng.hpp"

using namespace qmlsim;

TEST_CASE("fourteen hours eleven minutes at 96 USD/min") {
  // 14 h 11 min = 851 minutes; the product must be exact to the cent.
  REQUIRE(qpu_cost(851.0, 96.0) == 81696.0);
}

TEST_CASE("degenerate costs") {
  REQUIRE(qpu_cost(0.0, 96.0) == 0.0);
  REQUIRE(qpu_cost(1.0, 96.0) == 96.0);
  REQUIRE_THROWS_AS(qpu_cost(-1.0, 96.0), Error);
  REQUIRE_THROWS_AS(qpu_cost(1.0, -96.0), Error);
}

TEST_CASE("processed fraction of the full dataset") {
  CostParams params{96.0, 133.0, 1024};
  const auto est = extrapolate_cost(1815, params, 31256);
  REQUIRE(est.fraction.has_value());
  REQUIRE(std::abs(*est.fraction * 100.0 - 5.806) < 1e-3);
}

TEST_CASE("one sample at one minute costs one rate unit") {
  CostParams params{96.0, 60.0, 1024};
  const auto est = extrapolate_cost(1, params);
  REQUIRE(est.minutes == Catch::Approx(1.0));
  REQUIRE(est.usd == Catch::Approx(96.0));
  REQUIRE_FALSE(est.fraction.has_value());
}

TEST_CASE("full-dataset extrapolation lands near 6.65 million") {
  CostParams params{96.0, 133.0, 1024};
  const auto est = extrapolate_cost(31256, params);
  REQUIRE(est.minutes == Catch::Approx(31256.0 * 133.0 / 60.0));
  REQUIRE(est.usd == Catch::Approx(6.652e6).epsilon(0.01));
}

TEST_CASE("cost is linear in the sample count") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    CostParams params{rng.uniform(1.0, 200.0), rng.uniform(1.0, 300.0), 1024};
    const long long a = rng.uniform_int(1, 5000);
    const long long b = rng.uniform_int(1, 5000);
    const double sum = extrapolate_cost(a, params).usd +
                       extrapolate_cost(b, params).usd;
    REQUIRE(extrapolate_cost(a + b, params).usd ==
            Catch::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("invalid extrapolation inputs are rejected") {
  CostParams params{96.0, 0.0, 1024};
  REQUIRE_THROWS_AS(extrapolate_cost(10, params), Error);
  params.per_sample_seconds = 10.0;
  REQUIRE_THROWS_AS(extrapolate_cost(0, params), Error);
  REQUIRE_THROWS_AS(extrapolate_cost(10, params, 0), Error);
}
