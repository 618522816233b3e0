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

#include "qmlsim/training.hpp"

using namespace qmlsim;

namespace {

ModelConfig four_qubit_angle_config() {
  ModelConfig cfg;
  cfg.n_qubits = 4;
  cfg.in_dim = 4;
  cfg.encoding = EncodingKind::AngleY;
  cfg.ansatz = AnsatzKind::SimplifiedTwoDesign;
  cfg.ansatz_layers = 2;
  cfg.measured_qubit = 0;
  return cfg;
}

}  // namespace

TEST_CASE("bce of a coin-flip predictor is ln 2") {
  const std::vector<double> outputs(10, 0.5);
  const std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  REQUIRE(bce_loss(outputs, labels) == Catch::Approx(std::log(2.0)));
}

TEST_CASE("bce of a single confident correct output") {
  const std::vector<double> outputs{0.7311};
  const std::vector<int> labels{1};
  REQUIRE(bce_loss(outputs, labels) == Catch::Approx(0.31327).margin(1e-4));
}

TEST_CASE("bce is permutation invariant") {
  const std::vector<double> outputs{0.3, 0.6, 0.51, 0.44};
  const std::vector<int> labels{0, 1, 1, 0};
  const std::vector<double> perm_out{0.44, 0.3, 0.6, 0.51};
  const std::vector<int> perm_lab{0, 0, 1, 1};
  REQUIRE(bce_loss(outputs, labels) == Catch::Approx(bce_loss(perm_out, perm_lab)));
}

TEST_CASE("bce clamps exact zero and one outputs") {
  const std::vector<double> outputs{0.0, 1.0};
  const std::vector<int> labels{0, 1};
  long long clamped = 0;
  const double loss = bce_loss(outputs, labels, &clamped);
  REQUIRE(std::isfinite(loss));
  REQUIRE(clamped == 2);
}

TEST_CASE("adam fits a separable synthetic set") {
  const auto data = synthesize(240, 4, 6.0, 404);
  const auto cfg = four_qubit_angle_config();
  const auto initial = HybridModel::random_init(cfg, 7);
  TrainConfig tc;
  tc.epochs = 60;
  tc.batch_size = 32;
  tc.adam.lr = 0.05;
  tc.seed = 11;
  const auto result = train(initial, data, tc);
  REQUIRE(result.history.epochs_run() <= 60);
  REQUIRE(result.history.accuracy.back() >= 0.95);
}

TEST_CASE("a zero learning rate leaves the weights unchanged") {
  const auto data = synthesize(40, 4, 4.0, 5);
  const auto cfg = four_qubit_angle_config();
  const auto initial = HybridModel::random_init(cfg, 13);
  TrainConfig tc;
  tc.epochs = 1;
  tc.adam.lr = 0.0;
  tc.val_fraction = 0.0;
  const auto result = train(initial, data, tc);
  REQUIRE(result.model.linear_w == initial.linear_w);
  REQUIRE(result.model.linear_b == initial.linear_b);
  REQUIRE(result.model.quantum_weights == initial.quantum_weights);
}

TEST_CASE("training is deterministic in the seed") {
  const auto data = synthesize(60, 4, 4.0, 17);
  const auto cfg = four_qubit_angle_config();
  const auto initial = HybridModel::random_init(cfg, 19);
  TrainConfig tc;
  tc.epochs = 5;
  tc.seed = 23;
  const auto a = train(initial, data, tc);
  const auto b = train(initial, data, tc);
  REQUIRE(a.history.loss == b.history.loss);
  REQUIRE(a.history.accuracy == b.history.accuracy);
  REQUIRE(a.model.quantum_weights == b.model.quantum_weights);
}

TEST_CASE("adam decreases the loss over the first epochs") {
  const auto data = synthesize(200, 4, 6.0, 29);
  const auto cfg = four_qubit_angle_config();
  const auto initial = HybridModel::random_init(cfg, 31);
  TrainConfig tc;
  tc.epochs = 10;
  tc.adam.lr = 0.02;
  tc.seed = 37;
  const auto result = train(initial, data, tc);
  for (int e = 1; e < result.history.epochs_run(); ++e)
    REQUIRE(result.history.loss[e] <= result.history.loss[e - 1] + 1e-3);
  REQUIRE(result.history.loss.back() < result.history.loss.front());
}

TEST_CASE("topology phase on a zero-noise device matches noiseless") {
  const auto data = synthesize(40, 4, 5.0, 41);
  const auto cfg = four_qubit_angle_config();
  const auto initial = HybridModel::random_init(cfg, 43);
  TrainConfig plain;
  plain.epochs = 4;
  plain.seed = 47;
  TrainConfig topo = plain;
  topo.phase = TrainPhase::Topology;
  topo.device = all_to_all_device(4);
  const auto a = train(initial, data, plain);
  const auto b = train(initial, data, topo);
  for (int e = 0; e < a.history.epochs_run(); ++e)
    REQUIRE(std::abs(a.history.loss[e] - b.history.loss[e]) < 1e-6);
}

TEST_CASE("topology and noisy phases require a device") {
  const auto data = synthesize(10, 4, 4.0, 53);
  const auto initial =
      HybridModel::random_init(four_qubit_angle_config(), 59);
  TrainConfig tc;
  tc.phase = TrainPhase::Topology;
  REQUIRE_THROWS_AS(train(initial, data, tc), Error);
  tc.phase = TrainPhase::Noisy;
  REQUIRE_THROWS_AS(train(initial, data, tc), Error);
}

TEST_CASE("spsa converges on a quadratic objective") {
  // Bypasses the model entirely: minimize ||w - w*||^2 with the same gain
  // sequences the trainer uses. Averaged over seeds to keep the test sharp
  // against unlucky perturbation streams.
  const Eigen::VectorXd target = Eigen::Vector3d(0.7, -0.4, 0.2);
  const SpsaParams params;  // a = 0.2, c = 0.1, canonical exponents
  double mean_dist = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::VectorXd w = Eigen::Vector3d(1.5, 1.0, -1.0);
    Rng rng(seed);
    for (long k = 1; k <= 500; ++k) {
      const double ak = params.a / std::pow(k, params.alpha);
      const double ck = params.c / std::pow(k, params.gamma);
      Eigen::VectorXd delta(3);
      for (int i = 0; i < 3; ++i) delta(i) = rng.bernoulli(0.5) ? 1.0 : -1.0;
      const double lp = (w + ck * delta - target).squaredNorm();
      const double lm = (w - ck * delta - target).squaredNorm();
      w -= ak * (lp - lm) / (2.0 * ck) * delta;
    }
    mean_dist += (w - target).norm();
  }
  mean_dist /= 10.0;
  REQUIRE(mean_dist < 1e-2);
}

TEST_CASE("spsa step obeys its definition") {
  const auto cfg = four_qubit_angle_config();
  const auto m = HybridModel::random_init(cfg, 61);
  const ModelEngine eng(cfg, ExecutionConfig::noiseless());
  Eigen::MatrixXd X(4, 4);
  Rng rng(67);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) X(i, j) = rng.normal();
  const std::vector<int> labels{0, 1, 0, 1};

  REQUIRE_THROWS_AS(spsa_step(m, eng, X, labels, 0, SpsaParams{}, 1), Error);

  // c_k decreases monotonically in the iteration count
  const SpsaParams p;
  double prev = std::numeric_limits<double>::infinity();
  for (long k = 1; k <= 6; ++k) {
    const double ck = p.c / std::pow(k, p.gamma);
    REQUIRE(ck < prev);
    prev = ck;
  }

  // the update direction is a Rademacher vector scaled by one number
  const auto next = spsa_step(m, eng, X, labels, 1, p, 99);
  const Eigen::VectorXd diff = detail::FlatModel::flatten(next) -
                               detail::FlatModel::flatten(m);
  double magnitude = 0;
  for (long i = 0; i < diff.size(); ++i)
    magnitude = std::max(magnitude, std::abs(diff(i)));
  int matching = 0;
  for (long i = 0; i < diff.size(); ++i)
    if (std::abs(std::abs(diff(i)) - magnitude) < 1e-12) ++matching;
  REQUIRE(matching == diff.size());
}

TEST_CASE("spsa training runs in the noisy phase") {
  const auto data = synthesize(16, 2, 5.0, 71);
  ModelConfig cfg;
  cfg.n_qubits = 2;
  cfg.in_dim = 2;
  cfg.encoding = EncodingKind::AngleY;
  cfg.ansatz = AnsatzKind::SimplifiedTwoDesign;
  cfg.ansatz_layers = 1;
  cfg.measured_qubit = 0;
  const auto initial = HybridModel::random_init(cfg, 73);
  TrainConfig tc;
  tc.phase = TrainPhase::Noisy;
  tc.device = heavy_hex_127_device();
  tc.optimizer = OptimizerKind::Spsa;
  tc.epochs = 2;
  tc.batch_size = 8;
  const auto result = train(initial, data, tc);
  REQUIRE(result.history.epochs_run() == 2);
  for (const double l : result.history.loss) REQUIRE(std::isfinite(l));
}

TEST_CASE("history csv uses the documented header") {
  TrainHistory h;
  h.loss = {0.7, 0.6};
  h.accuracy = {0.5, 0.6};
  h.seconds = {0.01, 0.01};
  const auto path =
      std::filesystem::temp_directory_path() / "qmlsim_history.csv";
  write_history_csv(h, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "epoch,loss,accuracy,seconds");
  std::getline(in, line);
  REQUIRE(line.rfind("1,", 0) == 0);
  std::filesystem::remove(path);
}
