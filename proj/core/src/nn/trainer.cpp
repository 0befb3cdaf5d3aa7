#include "rtlstm/nn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "rtlstm/error.hpp"
#include "rtlstm/nn/network.hpp"
#include "rtlstm/rng.hpp"

namespace rtlstm {

TrainResult train(std::span<const LabeledSequence> train_set,
                  std::span<const LabeledSequence> validation_set, const ModelConfig& config,
                  const TrainConfig& train_config, const EpochCallback& on_epoch) {
  return train(train_set, validation_set, config, train_config, init_params(config), on_epoch);
}

TrainResult train(std::span<const LabeledSequence> train_set,
                  std::span<const LabeledSequence> validation_set, const ModelConfig& config,
                  const TrainConfig& train_config, ModelParams initial,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw Error(ErrorCode::EmptyDataset, "training set is empty");
  if (train_config.batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch size must be >= 1");
  for (const auto& item : train_set) {
    if (item.sequence.indices.size() != config.maxlen) {
      throw Error(ErrorCode::DimensionMismatch, "training sequence length differs from maxlen");
    }
  }

  TrainResult result;
  result.params = std::move(initial);
  AdamState adam = AdamState::zeros_like(result.params);
  Rng rng(derive_seed(config.seed, 1));
  const auto width = static_cast<Eigen::Index>(config.pooled_width());

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  ForwardCache cache;
  for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;

    for (std::size_t start = 0; start < order.size(); start += train_config.batch_size) {
      const std::size_t end = std::min(order.size(), start + train_config.batch_size);
      const std::span<const std::size_t> indices(order.data() + start, end - start);
      const Batch batch = make_batch(train_set, indices);

      Matrix mask;
      const Matrix* mask_ptr = nullptr;
      if (config.dropout_rate > 0.0) {
        mask = dropout_mask(static_cast<Eigen::Index>(batch.size), width, config.dropout_rate, rng);
        mask_ptr = &mask;
      }
      forward(result.params, batch, mask_ptr, cache);
      const double loss = batch_loss(cache.probs, batch.labels);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::NumericFailure,
                    "non-finite training loss in epoch " + std::to_string(epoch));
      }
      loss_sum += loss * static_cast<double>(batch.size);
      for (std::size_t b = 0; b < batch.size; ++b) {
        const auto row = static_cast<Eigen::Index>(b);
        if (predicted_label(cache.probs(row, 0), cache.probs(row, 1)) == batch.labels[b]) ++correct;
      }

      const ModelParams grads = backward(result.params, cache, batch);
      adam_step(result.params, grads, adam, train_config.adam);
      if (!all_finite(result.params)) {
        throw Error(ErrorCode::NumericFailure,
                    "non-finite parameters in epoch " + std::to_string(epoch));
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(order.size());
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    if (!validation_set.empty()) {
      const LossAccuracy val = score(result.params, validation_set);
      stats.val_loss = val.loss;
      stats.val_accuracy = val.accuracy;
    }
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

Predictions predict_all(const ModelParams& params, std::span<const LabeledSequence> data,
                        std::size_t chunk) {
  Predictions out;
  out.labels.reserve(data.size());
  out.malicious_scores.reserve(data.size());
  std::vector<std::size_t> indices;
  for (std::size_t start = 0; start < data.size(); start += chunk) {
    const std::size_t end = std::min(data.size(), start + chunk);
    indices.resize(end - start);
    std::iota(indices.begin(), indices.end(), start);
    const Matrix probs = predict(params, make_batch(data, indices));
    for (Eigen::Index b = 0; b < probs.rows(); ++b) {
      out.labels.push_back(predicted_label(probs(b, 0), probs(b, 1)));
      out.malicious_scores.push_back(probs(b, 1));
    }
  }
  return out;
}

LossAccuracy score(const ModelParams& params, std::span<const LabeledSequence> data,
                   std::size_t chunk) {
  if (data.empty()) throw Error(ErrorCode::EmptyDataset, "nothing to score");
  double loss_sum = 0.0;
  std::size_t correct = 0;
  std::vector<std::size_t> indices;
  for (std::size_t start = 0; start < data.size(); start += chunk) {
    const std::size_t end = std::min(data.size(), start + chunk);
    indices.resize(end - start);
    std::iota(indices.begin(), indices.end(), start);
    const Batch batch = make_batch(data, indices);
    const Matrix probs = predict(params, batch);
    loss_sum += batch_loss(probs, batch.labels) * static_cast<double>(batch.size);
    for (std::size_t b = 0; b < batch.size; ++b) {
      const auto row = static_cast<Eigen::Index>(b);
      if (predicted_label(probs(row, 0), probs(row, 1)) == batch.labels[b]) ++correct;
    }
  }
  const auto n = static_cast<double>(data.size());
  return {loss_sum / n, static_cast<double>(correct) / n};
}

std::string history_to_json(std::span<const EpochStats> history) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& stats : history) {
    nlohmann::json row = {{"epoch", stats.epoch},
                          {"train_loss", stats.train_loss},
                          {"train_accuracy", stats.train_accuracy}};
    row["val_loss"] = stats.val_loss ? nlohmann::json(*stats.val_loss) : nlohmann::json(nullptr);
    row["val_accuracy"] =
        stats.val_accuracy ? nlohmann::json(*stats.val_accuracy) : nlohmann::json(nullptr);
    out.push_back(std::move(row));
  }
  return out.dump(2) + "\n";
}

}  // namespace rtlstm
