#pragma once

#include <cstdint>
#include <vector>

#include "flowlabel/dataset.hpp"

namespace flowlabel {

struct MlpConfig {
  std::vector<std::size_t> hidden = {64, 32};  // output layer is always width 1
  double learning_rate = 0.001;
  std::size_t epochs = 40;
  std::size_t batch_size = 200;
  double threshold = 0.5;
};

// Fully connected net: ReLU hidden layers, sigmoid output, binary
// cross-entropy loss.
struct MlpModel {
  std::vector<std::size_t> dims;             // input, hidden..., 1
  std::vector<std::vector<double>> weights;  // per layer, dims[l] x dims[l+1] row-major
  std::vector<std::vector<double>> biases;
  MlpConfig config;
  std::uint64_t seed = 0;

  std::size_t parameter_count() const;
};

// Weights uniform in +-sqrt(6/(fan_in+fan_out)), biases zero, deterministic
// per seed.
MlpModel mlp_init(std::size_t input_dim, const MlpConfig& config, std::uint64_t seed);

struct TrainingLog {
  std::vector<double> epoch_loss;     // mean training loss per epoch
  std::vector<double> epoch_seconds;  // wall clock per epoch
};

// Mini-batch SGD with a seeded shuffle per epoch. Throws if the loss goes
// non-finite, naming the epoch.
TrainingLog mlp_train(MlpModel& model, const RowMatrix& X, const std::vector<std::uint8_t>& y);

std::vector<double> mlp_predict_proba(const MlpModel& model, const RowMatrix& X);

// label 1 iff score > threshold strictly.
std::vector<std::uint8_t> mlp_predict(const MlpModel& model, const RowMatrix& X,
                                      double threshold = 0.5);

// Mean binary cross-entropy with scores clamped to [1e-12, 1-1e-12].
double mlp_loss(const MlpModel& model, const RowMatrix& X, const std::vector<std::uint8_t>& y);

// Analytic gradient of mlp_loss, flattened layer by layer (weights then
// biases per layer). Exposed so it can be checked against finite differences.
std::vector<double> mlp_loss_gradient(const MlpModel& model, const RowMatrix& X,
                                      const std::vector<std::uint8_t>& y);

// Flat view of all parameters in gradient order.
std::vector<double> mlp_get_parameters(const MlpModel& model);
void mlp_set_parameters(MlpModel& model, const std::vector<double>& flat);

}  // namespace flowlabel
