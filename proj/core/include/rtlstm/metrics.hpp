#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "rtlstm/dataset.hpp"
#include "rtlstm/nn/model.hpp"
#include "rtlstm/trace.hpp"

namespace rtlstm {

/// Binary confusion matrix with malicious as the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const noexcept { return tp + fn + fp + tn; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) noexcept {
    tp += other.tp;
    fn += other.fn;
    fp += other.fp;
    tn += other.tn;
    return *this;
  }
  friend ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) noexcept {
    return a += b;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Increments exactly one counter.
void accumulate(ConfusionMatrix& cm, Label predicted, Label actual) noexcept;

/// TP / (TP + FN). Throws UndefinedRate when there are no positives.
double tpr(const ConfusionMatrix& cm);
/// FP / (FP + TN). Throws UndefinedRate when there are no negatives.
double fpr(const ConfusionMatrix& cm);
/// (TP + TN) / total. Throws EmptyMatrix.
double acc(const ConfusionMatrix& cm);

/// Rounds half away from zero to `decimals` places.
double round_to(double value, int decimals);
/// "92.19%"-style percentage, rounded half-up to 2 decimals.
std::string format_percent(double fraction);

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual);

struct EvalReport {
  ConfusionMatrix matrix;
  // Full precision; empty when the rate is undefined for this matrix.
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::optional<double> acc;
  SequenceMode mode = SequenceMode::Bsm;
  std::size_t maxlen = 0;
  std::string model_checksum;

  /// The same rates rounded to 4 decimals.
  std::optional<double> rounded_tpr() const;
  std::optional<double> rounded_fpr() const;
  std::optional<double> rounded_acc() const;
};

EvalReport make_report(const ConfusionMatrix& matrix, SequenceMode mode, std::size_t maxlen,
                       std::string checksum);

/// Classifies every sequence in inference mode and accumulates the matrix.
/// Throws EmptyDataset.
EvalReport evaluate(const Model& model, std::span<const LabeledSequence> test_set);

/// Key-value JSON document: mode, maxlen, model_checksum, tp, fn, fp, tn,
/// tpr, fpr, acc (null when undefined).
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view json);

/// Counts line, then one line each for TPR, FPR and ACC as percentages.
std::string report_summary(const EvalReport& report);

}  // namespace rtlstm
