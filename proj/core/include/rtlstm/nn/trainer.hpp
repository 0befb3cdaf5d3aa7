#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtlstm/dataset.hpp"
#include "rtlstm/nn/adam.hpp"
#include "rtlstm/nn/model.hpp"

namespace rtlstm {

struct TrainConfig {
  std::size_t epochs = 3;
  std::size_t batch_size = 256;
  AdamConfig adam;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;      // running mean over the epoch's batches
  double train_accuracy = 0.0;  // training-mode predictions
  std::optional<double> val_loss;
  std::optional<double> val_accuracy;

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Mini-batch training from init_params(config). Each epoch reshuffles the
/// training set with a generator derived from config.seed, runs forward,
/// backward and an Adam step per batch, then scores the validation set in
/// inference mode. Validation never contributes gradients.
/// Errors: EmptyDataset, InvalidConfig, NumericFailure (non-finite loss or
/// parameters).
TrainResult train(std::span<const LabeledSequence> train_set,
                  std::span<const LabeledSequence> validation_set, const ModelConfig& config,
                  const TrainConfig& train_config, const EpochCallback& on_epoch = {});

/// Same, starting from the given parameters.
TrainResult train(std::span<const LabeledSequence> train_set,
                  std::span<const LabeledSequence> validation_set, const ModelConfig& config,
                  const TrainConfig& train_config, ModelParams initial,
                  const EpochCallback& on_epoch = {});

struct LossAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Inference-mode mean loss and accuracy, computed in chunks.
LossAccuracy score(const ModelParams& params, std::span<const LabeledSequence> data,
                   std::size_t chunk = 1024);

/// Inference-mode predicted labels and malicious scores.
struct Predictions {
  std::vector<Label> labels;
  std::vector<double> malicious_scores;
};
Predictions predict_all(const ModelParams& params, std::span<const LabeledSequence> data,
                        std::size_t chunk = 1024);

/// JSON array of epoch records.
std::string history_to_json(std::span<const EpochStats> history);

}  // namespace rtlstm
