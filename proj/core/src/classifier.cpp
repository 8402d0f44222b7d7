#include "vitprobe/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "bytes.hpp"
#include "vitprobe/error.hpp"
#include "vitprobe/random.hpp"

namespace vitprobe {

namespace {

// Separate stream for minibatch shuffling so initialization and ordering
// do not share draws.
constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ULL;

void check_targets(std::span<const std::size_t> targets, std::size_t classes) {
  for (std::size_t t : targets) {
    if (t >= classes) {
      raise(ErrorKind::LabelRangeError,
            "target index " + std::to_string(t) + " outside 0.." + std::to_string(classes) + "-1");
    }
  }
}

Matrix batch_logits(const LinearModel& model, const Matrix& batch) {
  if (static_cast<std::size_t>(batch.cols()) != model.dim()) {
    raise(ErrorKind::DimensionError,
          "batch has " + std::to_string(batch.cols()) + " features, model expects " + std::to_string(model.dim()));
  }
  Matrix logits = batch * model.weights.transpose();
  logits.rowwise() += model.bias.transpose();
  return logits;
}

double accuracy_of(const Matrix& logits, std::span<const std::size_t> targets) {
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    if (argmax(logits.row(i).transpose()) == targets[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(targets.size());
}

}  // namespace

LinearModel::LinearModel(std::size_t classes, std::size_t dim)
    : weights(Matrix::Zero(static_cast<Eigen::Index>(classes), static_cast<Eigen::Index>(dim))),
      bias(Vector::Zero(static_cast<Eigen::Index>(classes))) {}

LinearModel LinearModel::initialized(std::size_t classes, std::size_t dim, std::uint64_t seed) {
  LinearModel model(classes, dim);
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) model.weights.data()[i] = rng.uniform(-bound, bound);
  for (Eigen::Index i = 0; i < model.bias.size(); ++i) model.bias[i] = rng.uniform(-bound, bound);
  return model;
}

Vector forward(const LinearModel& model, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != model.dim()) {
    raise(ErrorKind::DimensionError,
          "input has length " + std::to_string(x.size()) + ", model expects " + std::to_string(model.dim()));
  }
  return model.weights * x + model.bias;
}

std::size_t argmax(const Vector& values) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  }
  return best;
}

Vector log_softmax(const Vector& logits) {
  if (logits.size() == 0) raise(ErrorKind::DimensionError, "log_softmax of an empty vector");
  if (!logits.allFinite()) raise(ErrorKind::NumericalError, "log_softmax input contains non-finite values");
  const double peak = logits.maxCoeff();
  const Vector shifted = logits.array() - peak;
  const double log_sum = std::log(shifted.array().exp().sum());
  return shifted.array() - log_sum;
}

Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) out.row(i) = log_softmax(logits.row(i).transpose()).transpose();
  return out;
}

double nll_loss(const Matrix& logprobs, std::span<const std::size_t> targets) {
  if (static_cast<std::size_t>(logprobs.rows()) != targets.size()) {
    raise(ErrorKind::DimensionError, "nll_loss: " + std::to_string(logprobs.rows()) + " rows but " +
                                         std::to_string(targets.size()) + " targets");
  }
  if (targets.empty()) raise(ErrorKind::DimensionError, "nll_loss of an empty batch");
  check_targets(targets, static_cast<std::size_t>(logprobs.cols()));
  double total = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    total += logprobs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(targets[i]));
  }
  return -total / static_cast<double>(targets.size());
}

Gradients gradients(const LinearModel& model, const Matrix& batch, std::span<const std::size_t> targets) {
  if (static_cast<std::size_t>(batch.rows()) != targets.size() || targets.empty()) {
    raise(ErrorKind::DimensionError, "gradients: " + std::to_string(batch.rows()) + " rows but " +
                                         std::to_string(targets.size()) + " targets");
  }
  check_targets(targets, model.classes());
  // dlogits = (softmax - onehot) / B
  Matrix delta = log_softmax_rows(batch_logits(model, batch)).array().exp();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    delta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(targets[i])) -= 1.0;
  }
  delta /= static_cast<double>(targets.size());
  return {delta.transpose() * batch, delta.colwise().sum().transpose()};
}

double batch_loss(const LinearModel& model, const Matrix& batch, std::span<const std::size_t> targets) {
  return nll_loss(log_softmax_rows(batch_logits(model, batch)), targets);
}

AdamState::AdamState(const LinearModel& model, AdamHyper h)
    : hyper(h),
      m_weights(Matrix::Zero(model.weights.rows(), model.weights.cols())),
      m_bias(Vector::Zero(model.bias.size())),
      v_weights(Matrix::Zero(model.weights.rows(), model.weights.cols())),
      v_bias(Vector::Zero(model.bias.size())) {}

namespace {

template <class Param>
void adam_update(Param& theta, Param& m, Param& v, const Param& g, const AdamHyper& h, double c1, double c2) {
  m = h.beta1 * m + (1.0 - h.beta1) * g;
  v = h.beta2 * v + (1.0 - h.beta2) * g.cwiseProduct(g);
  theta.array() -= h.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + h.eps);
}

}  // namespace

void adam_step(LinearModel& model, AdamState& state, const Gradients& grads) {
  if (grads.weights.rows() != model.weights.rows() || grads.weights.cols() != model.weights.cols() ||
      grads.bias.size() != model.bias.size() || state.m_weights.rows() != model.weights.rows() ||
      state.m_weights.cols() != model.weights.cols() || state.m_bias.size() != model.bias.size()) {
    raise(ErrorKind::DimensionError, "adam_step: parameter, gradient and state shapes differ");
  }
  state.step += 1;
  const auto t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.hyper.beta1, t);
  const double c2 = 1.0 - std::pow(state.hyper.beta2, t);
  adam_update(model.weights, state.m_weights, state.v_weights, grads.weights, state.hyper, c1, c2);
  adam_update(model.bias, state.m_bias, state.v_bias, grads.bias, state.hyper, c1, c2);
}

std::string_view feature_kind_name(FeatureKind kind) noexcept { return kind == FeatureKind::Cls ? "cls" : "dct"; }

FeatureKind parse_feature_kind(std::string_view s) {
  if (s == "cls" || s == "cls-768") return FeatureKind::Cls;
  if (s == "dct" || s == "dct-64") return FeatureKind::Dct;
  raise(ErrorKind::ConfigError, "feature kind must be cls or dct, got '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    raise(ErrorKind::ConfigError, "val_fraction must lie strictly between 0 and 1");
  }
  if (batch_size == 0) raise(ErrorKind::ConfigError, "batch_size must be at least 1");
  if (!(adam.lr > 0.0) || !std::isfinite(adam.lr)) raise(ErrorKind::ConfigError, "lr must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    raise(ErrorKind::ConfigError, "Adam betas must lie in [0, 1)");
  }
  if (!(adam.eps > 0.0)) raise(ErrorKind::ConfigError, "Adam eps must be positive");
}

ObservationSplit split_train_val(const Manifest& manifest, double val_fraction, std::uint64_t seed) {
  std::vector<ObservationId> ids;
  for (const auto& obs : manifest.observations(Split::Train)) ids.push_back(obs.id);
  if (ids.empty()) raise(ErrorKind::EmptyTrainingSet, "manifest has no train observations");
  std::sort(ids.begin(), ids.end());
  Rng rng(seed);
  rng.shuffle(std::span(ids));
  const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(ids.size())));
  if (n_val >= ids.size()) {
    raise(ErrorKind::EmptyTrainingSet, "validation fraction leaves no training observations out of " +
                                           std::to_string(ids.size()));
  }
  ObservationSplit split;
  split.val.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.train.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_val), ids.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

TrainResult train_arrays(const LabeledSet& train_set, const LabeledSet& val_set, std::size_t classes,
                         const TrainConfig& config) {
  config.validate();
  const std::size_t n = train_set.targets.size();
  if (n == 0 || static_cast<std::size_t>(train_set.features.rows()) != n) {
    raise(ErrorKind::EmptyTrainingSet, "no training samples");
  }
  if (classes == 0) raise(ErrorKind::EmptyTrainingSet, "no classes");
  check_targets(train_set.targets, classes);
  check_targets(val_set.targets, classes);
  const auto dim = static_cast<std::size_t>(train_set.features.cols());
  if (val_set.targets.size() > 0 && static_cast<std::size_t>(val_set.features.cols()) != dim) {
    raise(ErrorKind::DimensionError, "train and validation feature dims differ");
  }

  TrainResult result;
  result.model = LinearModel::initialized(classes, dim, config.seed);
  AdamState state(result.model, config.adam);
  Rng order_rng(config.seed ^ kShuffleStream);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Matrix batch;
  std::vector<std::size_t> batch_targets;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    order_rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, n - start);
      batch.resize(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(dim));
      batch_targets.resize(len);
      for (std::size_t j = 0; j < len; ++j) {
        const auto src = order[start + j];
        batch.row(static_cast<Eigen::Index>(j)) = train_set.features.row(static_cast<Eigen::Index>(src));
        batch_targets[j] = train_set.targets[src];
      }
      adam_step(result.model, state, gradients(result.model, batch, batch_targets));
    }

    EpochStats stats;
    stats.epoch = epoch;
    const Matrix train_logits = batch_logits(result.model, train_set.features);
    stats.train_loss = nll_loss(log_softmax_rows(train_logits), train_set.targets);
    stats.train_accuracy = accuracy_of(train_logits, train_set.targets);
    if (val_set.targets.empty()) {
      stats.val_loss = std::numeric_limits<double>::quiet_NaN();
      stats.val_accuracy = std::numeric_limits<double>::quiet_NaN();
    } else {
      const Matrix val_logits = batch_logits(result.model, val_set.features);
      stats.val_loss = nll_loss(log_softmax_rows(val_logits), val_set.targets);
      stats.val_accuracy = accuracy_of(val_logits, val_set.targets);
    }
    result.history.push_back(stats);
  }
  return result;
}

namespace {

LabeledSet gather(const VectorStore& features, const Manifest& manifest, const ClassIndexMap& map,
                  const std::unordered_set<ObservationId>& members) {
  std::vector<const ManifestRow*> rows;
  for (const auto& row : manifest.rows()) {
    if (row.split == Split::Train && members.contains(row.observation_id)) rows.push_back(&row);
  }
  LabeledSet set;
  set.features.resize(static_cast<Eigen::Index>(rows.size()), features.dim());
  set.targets.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto vec = features.find(rows[i]->image_id);
    if (!vec) {
      raise(ErrorKind::MissingFeature, "no feature vector for image " + std::to_string(rows[i]->image_id) +
                                           " (observation " + std::to_string(rows[i]->observation_id) + ")");
    }
    for (std::size_t d = 0; d < vec->size(); ++d) {
      set.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = (*vec)[d];
    }
    set.targets.push_back(map.to_index(rows[i]->class_id).value);
  }
  return set;
}

}  // namespace

TrainResult train(const VectorStore& features, const Manifest& manifest, const ClassIndexMap& map,
                  const TrainConfig& config) {
  config.validate();
  auto split = split_train_val(manifest, config.val_fraction, config.seed);
  const LabeledSet train_set =
      gather(features, manifest, map, {split.train.begin(), split.train.end()});
  const LabeledSet val_set = gather(features, manifest, map, {split.val.begin(), split.val.end()});
  auto result = train_arrays(train_set, val_set, map.size(), config);
  result.split = std::move(split);
  return result;
}

std::vector<std::byte> write_model(const LinearModel& model) {
  detail::ByteWriter w;
  w.reserve(12 + 4 * (model.classes() * model.dim() + model.classes()));
  w.magic("SLM1");
  w.u32(static_cast<std::uint32_t>(model.classes()));
  w.u32(static_cast<std::uint32_t>(model.dim()));
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) w.f32(static_cast<float>(model.weights.data()[i]));
  for (Eigen::Index i = 0; i < model.bias.size(); ++i) w.f32(static_cast<float>(model.bias[i]));
  return w.take();
}

LinearModel read_model(std::span<const std::byte> bytes) {
  detail::ByteReader r(bytes);
  if (!r.magic("SLM1")) raise(ErrorKind::FormatError, "missing SLM1 magic");
  if (r.remaining() < 8) raise(ErrorKind::TruncatedFile, "model header shorter than 12 bytes");
  const std::uint32_t k = r.u32();
  const std::uint32_t d = r.u32();
  if (k == 0 || d == 0) raise(ErrorKind::FormatError, "model has a zero dimension");
  const std::size_t expected = 4 * (std::size_t{k} * d + k);
  if (r.remaining() != expected) {
    raise(ErrorKind::TruncatedFile, "model declares K=" + std::to_string(k) + " D=" + std::to_string(d) +
                                        " but payload is " + std::to_string(r.remaining()) + " bytes");
  }
  LinearModel model(k, d);
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) model.weights.data()[i] = r.f32();
  for (Eigen::Index i = 0; i < model.bias.size(); ++i) model.bias[i] = r.f32();
  if (!model.weights.allFinite() || !model.bias.allFinite()) {
    raise(ErrorKind::CorruptValue, "model contains non-finite parameters");
  }
  return model;
}

std::string history_json(const TrainResult& result, const TrainConfig& config) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["config"] = {{"seed", config.seed},
                 {"batch_size", config.batch_size},
                 {"epochs", config.epochs},
                 {"lr", config.adam.lr},
                 {"beta1", config.adam.beta1},
                 {"beta2", config.adam.beta2},
                 {"eps", config.adam.eps},
                 {"val_fraction", config.val_fraction},
                 {"feature_kind", feature_kind_name(config.feature_kind)}};
  j["classes"] = result.model.classes();
  j["dim"] = result.model.dim();
  j["train_observations"] = result.split.train.size();
  j["val_observations"] = result.split.val.size();
  auto& epochs = j["epochs"] = nlohmann::json::array();
  for (const auto& e : result.history) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", num(e.train_loss)},
                      {"train_accuracy", num(e.train_accuracy)},
                      {"val_loss", num(e.val_loss)},
                      {"val_accuracy", num(e.val_accuracy)}});
  }
  return j.dump(2) + "\n";
}

}  // namespace vitprobe
