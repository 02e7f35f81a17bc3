#include "flowlabel/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "flowlabel/rng.hpp"

namespace flowlabel {

namespace {

constexpr double kProbClamp = 1e-12;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

struct Activations {
  // a[0] = input row, a[l+1] = output of layer l (post-activation)
  std::vector<std::vector<double>> a;
};

// single-row forward pass
double forward_row(const MlpModel& m, const double* x, Activations* acts) {
  std::size_t layers = m.weights.size();
  std::vector<double> cur(x, x + m.dims[0]);
  if (acts) acts->a.assign(1, cur);
  for (std::size_t l = 0; l < layers; ++l) {
    std::size_t in = m.dims[l], out = m.dims[l + 1];
    std::vector<double> next(out);
    const auto& W = m.weights[l];
    for (std::size_t j = 0; j < out; ++j) {
      double z = m.biases[l][j];
      for (std::size_t i = 0; i < in; ++i) z += cur[i] * W[i * out + j];
      next[j] = l + 1 == layers ? sigmoid(z) : std::max(0.0, z);  // sigmoid out, relu hidden
    }
    cur = std::move(next);
    if (acts) acts->a.push_back(cur);
  }
  return cur[0];
}

void check_input(const MlpModel& m, const RowMatrix& X) {
  if (X.d != m.dims[0])
    throw std::invalid_argument("mlp: data dim " + std::to_string(X.d) + " vs model input " +
                                std::to_string(m.dims[0]));
}

// accumulates the gradient of the summed (not yet averaged) loss for one row
void backward_row(const MlpModel& m, const Activations& acts, double y,
                  std::vector<std::vector<double>>& gw,
                  std::vector<std::vector<double>>& gb) {
  std::size_t layers = m.weights.size();
  // output delta: d(BCE)/dz = p - y for sigmoid + cross-entropy
  std::vector<double> delta{acts.a[layers][0] - y};
  for (std::size_t l = layers; l-- > 0;) {
    std::size_t in = m.dims[l], out = m.dims[l + 1];
    const auto& a_in = acts.a[l];
    for (std::size_t j = 0; j < out; ++j) {
      gb[l][j] += delta[j];
      for (std::size_t i = 0; i < in; ++i) gw[l][i * out + j] += a_in[i] * delta[j];
    }
    if (l == 0) break;
    std::vector<double> prev(in, 0.0);
    const auto& W = m.weights[l];
    for (std::size_t i = 0; i < in; ++i) {
      if (acts.a[l][i] <= 0.0) continue;  // relu gate
      double s = 0.0;
      for (std::size_t j = 0; j < out; ++j) s += W[i * out + j] * delta[j];
      prev[i] = s;
    }
    delta = std::move(prev);
  }
}

}  // namespace

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += weights[l].size() + biases[l].size();
  return n;
}

MlpModel mlp_init(std::size_t input_dim, const MlpConfig& config, std::uint64_t seed) {
  if (input_dim == 0) throw std::invalid_argument("mlp_init: zero input dimension");
  if (config.learning_rate <= 0.0)
    throw std::invalid_argument("mlp_init: learning rate must be positive");
  if (config.batch_size == 0) throw std::invalid_argument("mlp_init: batch size must be >= 1");
  for (std::size_t h : config.hidden)
    if (h == 0) throw std::invalid_argument("mlp_init: zero-width hidden layer");

  MlpModel m;
  m.config = config;
  m.seed = seed;
  m.dims.push_back(input_dim);
  for (std::size_t h : config.hidden) m.dims.push_back(h);
  m.dims.push_back(1);

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < m.dims.size(); ++l) {
    std::size_t in = m.dims[l], out = m.dims[l + 1];
    double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    std::vector<double> W(in * out);
    for (auto& w : W) w = rng.uniform(-bound, bound);
    m.weights.push_back(std::move(W));
    m.biases.emplace_back(out, 0.0);
  }
  return m;
}

TrainingLog mlp_train(MlpModel& model, const RowMatrix& X,
                      const std::vector<std::uint8_t>& y) {
  check_input(model, X);
  if (y.size() != X.n)
    throw std::invalid_argument("mlp_train: " + std::to_string(y.size()) + " labels for " +
                                std::to_string(X.n) + " rows");
  if (X.n == 0) throw std::invalid_argument("mlp_train: empty dataset");

  TrainingLog log;
  Rng rng = Rng(model.seed).fork(0x7261696e);  // training stream, distinct from init
  std::vector<std::size_t> order(X.n);
  std::iota(order.begin(), order.end(), 0);

  std::size_t layers = model.weights.size();
  std::vector<std::vector<double>> gw(layers), gb(layers);

  for (std::size_t epoch = 0; epoch < model.config.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    rng.shuffle(order);
    double epoch_loss_sum = 0.0;

    for (std::size_t b = 0; b < X.n; b += model.config.batch_size) {
      std::size_t bsz = std::min(model.config.batch_size, X.n - b);
      for (std::size_t l = 0; l < layers; ++l) {
        gw[l].assign(model.weights[l].size(), 0.0);
        gb[l].assign(model.biases[l].size(), 0.0);
      }
      for (std::size_t k = 0; k < bsz; ++k) {
        std::size_t i = order[b + k];
        Activations acts;
        double p = forward_row(model, X.row(i), &acts);
        double pc = clamp_prob(p);
        epoch_loss_sum -= y[i] ? std::log(pc) : std::log(1.0 - pc);
        backward_row(model, acts, static_cast<double>(y[i]), gw, gb);
      }
      double scale = model.config.learning_rate / static_cast<double>(bsz);
      for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t i = 0; i < gw[l].size(); ++i) model.weights[l][i] -= scale * gw[l][i];
        for (std::size_t i = 0; i < gb[l].size(); ++i) model.biases[l][i] -= scale * gb[l][i];
      }
    }

    double mean_loss = epoch_loss_sum / static_cast<double>(X.n);
    if (!std::isfinite(mean_loss))
      throw std::runtime_error("mlp_train: non-finite loss at epoch " +
                               std::to_string(epoch + 1));
    auto t1 = std::chrono::steady_clock::now();
    log.epoch_loss.push_back(mean_loss);
    log.epoch_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  return log;
}

std::vector<double> mlp_predict_proba(const MlpModel& model, const RowMatrix& X) {
  check_input(model, X);
  std::vector<double> out(X.n);
  for (std::size_t i = 0; i < X.n; ++i) out[i] = forward_row(model, X.row(i), nullptr);
  return out;
}

std::vector<std::uint8_t> mlp_predict(const MlpModel& model, const RowMatrix& X,
                                      double threshold) {
  auto proba = mlp_predict_proba(model, X);
  std::vector<std::uint8_t> out(proba.size());
  for (std::size_t i = 0; i < proba.size(); ++i) out[i] = proba[i] > threshold ? 1 : 0;
  return out;
}

double mlp_loss(const MlpModel& model, const RowMatrix& X, const std::vector<std::uint8_t>& y) {
  check_input(model, X);
  if (y.size() != X.n || X.n == 0)
    throw std::invalid_argument("mlp_loss: bad label count");
  double sum = 0.0;
  for (std::size_t i = 0; i < X.n; ++i) {
    double p = clamp_prob(forward_row(model, X.row(i), nullptr));
    sum -= y[i] ? std::log(p) : std::log(1.0 - p);
  }
  return sum / static_cast<double>(X.n);
}

std::vector<double> mlp_loss_gradient(const MlpModel& model, const RowMatrix& X,
                                      const std::vector<std::uint8_t>& y) {
  check_input(model, X);
  if (y.size() != X.n || X.n == 0)
    throw std::invalid_argument("mlp_loss_gradient: bad label count");
  std::size_t layers = model.weights.size();
  std::vector<std::vector<double>> gw(layers), gb(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    gw[l].assign(model.weights[l].size(), 0.0);
    gb[l].assign(model.biases[l].size(), 0.0);
  }
  for (std::size_t i = 0; i < X.n; ++i) {
    Activations acts;
    forward_row(model, X.row(i), &acts);
    backward_row(model, acts, static_cast<double>(y[i]), gw, gb);
  }
  std::vector<double> flat;
  flat.reserve(model.parameter_count());
  double inv_n = 1.0 / static_cast<double>(X.n);
  for (std::size_t l = 0; l < layers; ++l) {
    for (double g : gw[l]) flat.push_back(g * inv_n);
    for (double g : gb[l]) flat.push_back(g * inv_n);
  }
  return flat;
}

std::vector<double> mlp_get_parameters(const MlpModel& model) {
  std::vector<double> flat;
  flat.reserve(model.parameter_count());
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    flat.insert(flat.end(), model.weights[l].begin(), model.weights[l].end());
    flat.insert(flat.end(), model.biases[l].begin(), model.biases[l].end());
  }
  return flat;
}

void mlp_set_parameters(MlpModel& model, const std::vector<double>& flat) {
  if (flat.size() != model.parameter_count())
    throw std::invalid_argument("mlp_set_parameters: expected " +
                                std::to_string(model.parameter_count()) + " values, got " +
                                std::to_string(flat.size()));
  std::size_t pos = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    std::copy(flat.begin() + pos, flat.begin() + pos + model.weights[l].size(),
              model.weights[l].begin());
    pos += model.weights[l].size();
    std::copy(flat.begin() + pos, flat.begin() + pos + model.biases[l].size(),
              model.biases[l].begin());
    pos += model.biases[l].size();
  }
}

}  // namespace flowlabel
