#include "rtlstm/metrics.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "rtlstm/error.hpp"
#include "rtlstm/nn/checkpoint.hpp"
#include "rtlstm/nn/trainer.hpp"

namespace rtlstm {

void accumulate(ConfusionMatrix& cm, Label predicted, Label actual) noexcept {
  if (actual == Label::Malicious) {
    ++(predicted == Label::Malicious ? cm.tp : cm.fn);
  } else {
    ++(predicted == Label::Malicious ? cm.fp : cm.tn);
  }
}

double tpr(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fn == 0) throw Error(ErrorCode::UndefinedRate, "TPR undefined: no positives");
  return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

double fpr(const ConfusionMatrix& cm) {
  if (cm.fp + cm.tn == 0) throw Error(ErrorCode::UndefinedRate, "FPR undefined: no negatives");
  return static_cast<double>(cm.fp) / static_cast<double>(cm.fp + cm.tn);
}

double acc(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "accuracy of an empty matrix");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", round_to(fraction * 100.0, 2));
  return buf;
}

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::DimensionMismatch, "prediction and label counts differ");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) accumulate(cm, predicted[i], actual[i]);
  return cm;
}

namespace {

template <typename F>
std::optional<double> defined(F&& rate, const ConfusionMatrix& cm) {
  try {
    return rate(cm);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<double> rounded(const std::optional<double>& value) {
  if (!value) return std::nullopt;
  return round_to(*value, 4);
}

}  // namespace

std::optional<double> EvalReport::rounded_tpr() const { return rounded(tpr); }
std::optional<double> EvalReport::rounded_fpr() const { return rounded(fpr); }
std::optional<double> EvalReport::rounded_acc() const { return rounded(acc); }

EvalReport make_report(const ConfusionMatrix& matrix, SequenceMode mode, std::size_t maxlen,
                       std::string checksum) {
  EvalReport report;
  report.matrix = matrix;
  report.tpr = defined([](const ConfusionMatrix& m) { return rtlstm::tpr(m); }, matrix);
  report.fpr = defined([](const ConfusionMatrix& m) { return rtlstm::fpr(m); }, matrix);
  report.acc = defined([](const ConfusionMatrix& m) { return rtlstm::acc(m); }, matrix);
  report.mode = mode;
  report.maxlen = maxlen;
  report.model_checksum = std::move(checksum);
  return report;
}

EvalReport evaluate(const Model& model, std::span<const LabeledSequence> test_set) {
  if (test_set.empty()) throw Error(ErrorCode::EmptyDataset, "test set is empty");
  const Predictions predictions = predict_all(model.params, test_set);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    accumulate(cm, predictions.labels[i], test_set[i].label);
  }
  return make_report(cm, model.config.mode, model.config.maxlen, model_checksum(model));
}

std::string report_to_json(const EvalReport& report) {
  const auto rate = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json doc = {
      {"mode", std::string(to_string(report.mode))},
      {"maxlen", report.maxlen},
      {"model_checksum", report.model_checksum},
      {"tp", report.matrix.tp},
      {"fn", report.matrix.fn},
      {"fp", report.matrix.fp},
      {"tn", report.matrix.tn},
      {"tpr", rate(report.tpr)},
      {"fpr", rate(report.fpr)},
      {"acc", rate(report.acc)},
  };
  return doc.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
    ConfusionMatrix cm{doc.at("tp").get<std::uint64_t>(), doc.at("fn").get<std::uint64_t>(),
                       doc.at("fp").get<std::uint64_t>(), doc.at("tn").get<std::uint64_t>()};
    EvalReport report = make_report(cm, parse_sequence_mode(doc.at("mode").get<std::string>()),
                                    doc.at("maxlen").get<std::size_t>(),
                                    doc.at("model_checksum").get<std::string>());
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("bad report: ") + e.what());
  }
}

std::string report_summary(const EvalReport& report) {
  const auto pct = [](const std::optional<double>& v) {
    return v ? format_percent(*v) : std::string("undefined");
  };
  const auto& m = report.matrix;
  std::string out = "TP " + std::to_string(m.tp) + "  FN " + std::to_string(m.fn) + "  FP " +
                    std::to_string(m.fp) + "  TN " + std::to_string(m.tn) + "\n";
  out += "TPR " + pct(report.tpr) + "\n";
  out += "FPR " + pct(report.fpr) + "\n";
  out += "ACC " + pct(report.acc) + "\n";
  return out;
}

}  // namespace rtlstm
