#include "rtlstm/nn/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

#include "rtlstm/error.hpp"
#include "rtlstm/trace.hpp"

namespace rtlstm {

namespace {

constexpr std::string_view kMagic = "RTLM";

class Writer {
 public:
  void bytes(std::string_view s) { out_.append(s); }
  template <typename T>
  void uint(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
    }
  }
  void f64(double value) { uint(std::bit_cast<std::uint64_t>(value)); }
  void f32(float value) { uint(std::bit_cast<std::uint32_t>(value)); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    const auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  template <typename T>
  T uint() {
    need(sizeof(T));
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(value);
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw Error(ErrorCode::ShapeMismatch, "checkpoint truncated at byte " + std::to_string(pos_));
    }
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const Model& model, StoragePrecision precision) {
  const ModelConfig& c = model.config;
  Writer w;
  w.bytes(kMagic);
  w.uint<std::uint16_t>(kCheckpointVersion);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(c.vocab_size));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(c.embed_dim));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(c.hidden));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(c.maxlen));
  w.f64(c.dropout_rate);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(c.dense_hidden));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(c.num_outputs));
  w.uint<std::uint64_t>(c.seed);
  w.uint<std::uint8_t>(static_cast<std::uint8_t>(c.mode));
  w.uint<std::uint8_t>(static_cast<std::uint8_t>(precision));

  const auto layout = tensor_layout(model.params);
  const auto data = tensor_data(model.params);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(kTensorCount));
  for (std::size_t k = 0; k < kTensorCount; ++k) {
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(layout[k].name.size()));
    w.bytes(layout[k].name);
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(layout[k].rank));
    if (layout[k].rank == 2) w.uint<std::uint64_t>(layout[k].rows);
    w.uint<std::uint64_t>(layout[k].cols);
    for (double value : data[k]) {
      if (precision == StoragePrecision::Float64) {
        w.f64(value);
      } else {
        w.f32(static_cast<float>(value));
      }
    }
  }
  return w.take();
}

Model deserialize_model(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorCode::BadMagic, "BadMagic: not a model checkpoint");
  }
  Reader r(bytes.substr(kMagic.size()));
  const auto version = r.uint<std::uint16_t>();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::VersionMismatch,
                "checkpoint version " + std::to_string(version) + ", expected " +
                    std::to_string(kCheckpointVersion));
  }

  Model model;
  ModelConfig& c = model.config;
  c.vocab_size = r.uint<std::uint32_t>();
  c.embed_dim = r.uint<std::uint32_t>();
  c.hidden = r.uint<std::uint32_t>();
  c.maxlen = r.uint<std::uint32_t>();
  c.dropout_rate = r.f64();
  c.dense_hidden = r.uint<std::uint32_t>();
  c.num_outputs = r.uint<std::uint32_t>();
  c.seed = r.uint<std::uint64_t>();
  const auto mode = r.uint<std::uint8_t>();
  if (mode > 1) throw Error(ErrorCode::InvalidConfig, "unknown sequence mode in checkpoint");
  c.mode = static_cast<SequenceMode>(mode);
  const auto width = r.uint<std::uint8_t>();
  if (width != 4 && width != 8) {
    throw Error(ErrorCode::InvalidConfig, "unsupported value width in checkpoint");
  }
  c.validate();

  model.params = zero_params(c);
  const auto layout = tensor_layout(model.params);
  const auto data = tensor_data(model.params);
  if (r.uint<std::uint32_t>() != kTensorCount) {
    throw Error(ErrorCode::ShapeMismatch, "unexpected tensor count in checkpoint");
  }
  for (std::size_t k = 0; k < kTensorCount; ++k) {
    const auto name_len = r.uint<std::uint32_t>();
    const auto name = r.bytes(name_len);
    if (name != layout[k].name) {
      throw Error(ErrorCode::ShapeMismatch, "expected tensor '" + std::string(layout[k].name) +
                                                "', found '" + std::string(name) + "'");
    }
    const auto rank = r.uint<std::uint32_t>();
    std::uint64_t rows = 1;
    if (rank == 2) {
      rows = r.uint<std::uint64_t>();
    } else if (rank != 1) {
      throw Error(ErrorCode::ShapeMismatch, "bad rank for tensor " + std::string(name));
    }
    const auto cols = r.uint<std::uint64_t>();
    if (rank != layout[k].rank || rows != layout[k].rows || cols != layout[k].cols) {
      throw Error(ErrorCode::ShapeMismatch,
                  "tensor " + std::string(name) + " does not match the stored config");
    }
    for (double& value : data[k]) {
      value = width == 8 ? r.f64() : static_cast<double>(r.f32());
    }
  }
  if (!r.done()) throw Error(ErrorCode::ShapeMismatch, "trailing bytes after checkpoint");
  return model;
}

void save_model(const std::filesystem::path& path, const Model& model,
                StoragePrecision precision) {
  text::write_file(path, serialize_model(model, precision));
}

Model load_model(const std::filesystem::path& path) {
  return deserialize_model(text::read_file(path));
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (char ch : bytes) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string model_checksum(const Model& model) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_model(model))));
  return std::string("fnv1a64:") + buf;
}

}  // namespace rtlstm
