#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vitprobe/data_model.hpp"
#include "vitprobe/embed_store.hpp"
#include "vitprobe/types.hpp"

namespace vitprobe {

/// Single linear layer: logits = W x + b, W is K x D.
struct LinearModel {
  Matrix weights;
  Vector bias;

  LinearModel() = default;
  LinearModel(std::size_t classes, std::size_t dim);

  std::size_t classes() const noexcept { return static_cast<std::size_t>(weights.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(weights.cols()); }

  // W, b ~ uniform(-1/sqrt(D), 1/sqrt(D)).
  static LinearModel initialized(std::size_t classes, std::size_t dim, std::uint64_t seed);

  friend bool operator==(const LinearModel& a, const LinearModel& b) {
    return a.weights == b.weights && a.bias == b.bias;
  }
};

Vector forward(const LinearModel& model, const Vector& x);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(const Vector& values);

// Numerically stable max-shifted form. Throws NumericalError on non-finite input.
Vector log_softmax(const Vector& logits);
// Row-wise log_softmax, B x K.
Matrix log_softmax_rows(const Matrix& logits);

// -(1/B) sum_i logprobs[i, targets[i]]. Throws LabelRangeError for targets >= K.
double nll_loss(const Matrix& logprobs, std::span<const std::size_t> targets);

struct Gradients {
  Matrix weights;
  Vector bias;
};

// Gradient of nll_loss(log_softmax(X W^T + b)) for a batch X (B x D).
Gradients gradients(const LinearModel& model, const Matrix& batch, std::span<const std::size_t> targets);

// Mean NLL of the model on a batch.
double batch_loss(const LinearModel& model, const Matrix& batch, std::span<const std::size_t> targets);

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamHyper hyper;
  Matrix m_weights;
  Vector m_bias;
  Matrix v_weights;
  Vector v_bias;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(const LinearModel& model, AdamHyper hyper);
};

// Bias-corrected Adam update, in place.
void adam_step(LinearModel& model, AdamState& state, const Gradients& grads);

enum class FeatureKind { Cls, Dct };

std::string_view feature_kind_name(FeatureKind kind) noexcept;
FeatureKind parse_feature_kind(std::string_view s);

struct TrainConfig {
  std::uint64_t seed = 0;
  std::size_t batch_size = 64;
  std::size_t epochs = 20;
  AdamHyper adam;
  double val_fraction = 0.2;
  FeatureKind feature_kind = FeatureKind::Cls;

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

struct ObservationSplit {
  std::vector<ObservationId> train;
  std::vector<ObservationId> val;
};

/// Seeded observation-level partition of the manifest's train split.
/// |val| = round(val_fraction * #observations); both sides sorted ascending.
ObservationSplit split_train_val(const Manifest& manifest, double val_fraction, std::uint64_t seed);

struct LabeledSet {
  Matrix features;  // N x D
  std::vector<std::size_t> targets;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;      // NaN when the validation set is empty
  double val_accuracy = 0.0;  // NaN when the validation set is empty
};

struct TrainResult {
  LinearModel model;
  std::vector<EpochStats> history;
  ObservationSplit split;
};

/// Shuffled minibatch Adam on NLL over prepared arrays. Returns the
/// final-epoch model. Throws LabelRangeError for targets >= classes.
TrainResult train_arrays(const LabeledSet& train, const LabeledSet& val, std::size_t classes,
                         const TrainConfig& config);

/// Builds image-level train/val sets from the manifest and trains.
/// Throws MissingFeature for listed images without a vector and
/// LabelRangeError for classes the map does not contain.
TrainResult train(const VectorStore& features, const Manifest& manifest, const ClassIndexMap& map,
                  const TrainConfig& config);

// SLM1: "SLM1" | u32 K | u32 D | K*D f32 (W row-major) | K f32 (b), little-endian.
std::vector<std::byte> write_model(const LinearModel& model);
LinearModel read_model(std::span<const std::byte> bytes);

std::string history_json(const TrainResult& result, const TrainConfig& config);

}  // namespace vitprobe
