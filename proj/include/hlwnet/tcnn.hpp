#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hlwnet/dataset.hpp"
#include "hlwnet/types.hpp"

namespace hlwnet {

struct TcnnShape {
  int n_aps = 5;       // N_a, output width
  int max_users = 10;  // M, mapped user count

  static constexpr int kTargetHidden = 6;
  static constexpr int kCondHidden1 = 64;
  static constexpr int kCondHidden2 = 6;

  int target_in() const { return n_aps + 1; }
  int cond_in() const { return max_users * (n_aps + 1); }
  int combiner_in() const { return kTargetHidden + kCondHidden2; }
};

// Demand-splitting map: N_u users become M mirroring users whose split
// rates sum back to each original requirement.
struct MappedInstance {
  Matrix snr_db;                 // n_aps x M, duplicated columns
  std::vector<double> rate_bps;  // M split rates
  std::vector<int> origin;       // mapped index -> original user
  std::vector<int> copies;       // per original user
};

MappedInstance adaptive_map(const Matrix& snr_db, const std::vector<double>& rate_bps,
                            int mapped_users);

// Normalized condition vector x_C, length M*(n_aps+1), one mapped user
// per block: [snr..., rate].
std::vector<double> mapped_features(const MappedInstance& mi,
                                    const NormalizationSpec& norm);

struct LinearLayer {
  Matrix w;  // out x in
  std::vector<double> b;
  Matrix gw;
  std::vector<double> gb;
  Matrix x_cache;  // train-mode input

  void init(int out, int in);
  Matrix forward(const Matrix& x, bool train);
  Matrix backward(const Matrix& dy);
};

struct BatchNormLayer {
  std::vector<double> scale, shift;          // trainable, init 1 / 0
  std::vector<double> gscale, gshift;
  std::vector<double> run_mean, run_var;
  double eps = 1e-5;
  double momentum = 0.1;
  Matrix xhat_cache;
  std::vector<double> invstd_cache;

  void init(int features);
  Matrix forward(const Matrix& x, bool train);
  Matrix backward(const Matrix& dy);
};

class TcnnModel {
 public:
  TcnnModel() = default;
  explicit TcnnModel(const TcnnShape& shape);

  void init_weights(std::uint64_t seed);  // Kaiming-uniform fan-in, zero biases

  // x_target: T x (n_aps+1); x_cond: T x M(n_aps+1). Returns softmax
  // probabilities, T x n_aps. Train mode uses batch statistics in BN and
  // keeps the caches backward() needs.
  Matrix forward(const Matrix& x_target, const Matrix& x_cond, bool train);

  // MSE-vs-one-hot gradients for the last train-mode forward.
  void backward(const Matrix& probs, const Matrix& labels_onehot);

  const TcnnShape& shape() const { return shape_; }

  // Trainable tensors and their gradients, in a fixed order.
  std::vector<std::pair<double*, std::size_t>> parameters();
  std::vector<std::pair<double*, std::size_t>> gradients();

  LinearLayer fc_target, fc_cond1, fc_cond2, fc_out;
  BatchNormLayer bn1, bn2;

 private:
  TcnnShape shape_;
  Matrix relu1_mask_, relu2_mask_;
};

double mse_loss(const Matrix& probs, const Matrix& labels_onehot);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.95;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m, v;
  long long step = 0;
};

void adam_step(std::vector<std::pair<double*, std::size_t>> params,
               std::vector<std::pair<double*, std::size_t>> grads, AdamState& state,
               const AdamConfig& cfg);

struct TrainConfig {
  int epochs = 30;
  int batch_size = 256;
  AdamConfig adam;
  std::uint64_t seed = 1;
  bool all_targets = false;  // train every mapped target per sample per pass
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
};

struct TrainResult {
  TcnnModel model;
  std::vector<EpochStats> history;
  int epochs_run = 0;
};

// Stochastic training: shuffle, one uniformly drawn target per example
// per pass (all targets with the config switch). Deterministic per seed.
// Throws on non-finite loss.
TrainResult train(const Dataset& train_set, const Dataset& test_set,
                  const TcnnShape& shape, const TrainConfig& cfg);

// Per-user inference over a full snapshot; argmax ties to AP 0.
Matrix predict_assignment(TcnnModel& model, const NormalizationSpec& norm,
                          const Matrix& snr_db, const std::vector<double>& rate_bps);

// Mean loss and accuracy over every original user of every sample.
std::pair<double, double> evaluate_model(TcnnModel& model, const Dataset& set);

void save_checkpoint(const TcnnModel& model, const NormalizationSpec& norm,
                     std::uint64_t seed, int epoch, const std::string& path);

struct Checkpoint {
  TcnnModel model;
  NormalizationSpec norm;
  std::uint64_t seed = 0;
  int epoch = 0;
};

Checkpoint load_checkpoint(const std::string& path);

// Plain-DNN baseline: one hidden layer (64, BN+ReLU), per-user softmax
// blocks on the output; same training engine, kept as a comparison point.
class DnnModel {
 public:
  DnnModel() = default;
  explicit DnnModel(const TcnnShape& shape);
  void init_weights(std::uint64_t seed);

  // x_cond: T x M(n_aps+1); returns T x M*n_aps, softmax per user block.
  Matrix forward(const Matrix& x_cond, bool train);
  void backward(const Matrix& probs, const Matrix& labels_onehot);

  std::vector<std::pair<double*, std::size_t>> parameters();
  std::vector<std::pair<double*, std::size_t>> gradients();

  const TcnnShape& shape() const { return shape_; }

  LinearLayer fc1, fc2;
  BatchNormLayer bn1;

 private:
  TcnnShape shape_;
  Matrix relu_mask_;
};

}  // namespace hlwnet
