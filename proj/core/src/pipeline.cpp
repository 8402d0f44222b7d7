#include "vitprobe/pipeline.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>
#include <unordered_set>

#include "vitprobe/error.hpp"
#include "vitprobe/projection.hpp"
#include "vitprobe/text_io.hpp"

namespace vitprobe {

std::filesystem::path PipelineConfig::class_map_path() const {
  if (!class_map.empty()) return class_map;
  auto p = model;
  return p.replace_extension(".csv");
}

std::filesystem::path PipelineConfig::history_path() const {
  if (!history.empty()) return history;
  auto p = model;
  return p.replace_extension(".history.json");
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  raise(ErrorKind::ConfigError,
        "bad value '" + std::string(value) + "' for " + std::string(key) + " (expected " + std::string(expected) + ")");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  if (!parse_double(v, out) || !std::isfinite(out)) bad_value(key, v, "a finite number");
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  if (!parse_uint(v, out)) bad_value(key, v, "a non-negative integer");
  return out;
}

std::uint32_t to_u32(std::string_view key, std::string_view v) {
  const auto out = to_uint(key, v);
  if (out > UINT32_MAX) bad_value(key, v, "a 32-bit integer");
  return static_cast<std::uint32_t>(out);
}

using Setter = std::function<void(PipelineConfig&, std::string_view, std::string_view)>;

const std::vector<std::pair<std::string_view, Setter>>& setters() {
  static const std::vector<std::pair<std::string_view, Setter>> table = {
      {"manifest", [](auto& c, auto, auto v) { c.manifest = std::string(v); }},
      {"features", [](auto& c, auto, auto v) { c.features = std::string(v); }},
      {"grids", [](auto& c, auto, auto v) { c.grids = std::string(v); }},
      {"model", [](auto& c, auto, auto v) { c.model = std::string(v); }},
      {"class_map", [](auto& c, auto, auto v) { c.class_map = std::string(v); }},
      {"history", [](auto& c, auto, auto v) { c.history = std::string(v); }},
      {"submission", [](auto& c, auto, auto v) { c.submission = std::string(v); }},
      {"out", [](auto& c, auto, auto v) { c.out = std::string(v); }},
      {"feature_kind", [](auto& c, auto, auto v) { c.train.feature_kind = parse_feature_kind(v); }},
      {"seed", [](auto& c, auto k, auto v) { c.train.seed = to_uint(k, v); }},
      {"batch_size", [](auto& c, auto k, auto v) { c.train.batch_size = to_uint(k, v); }},
      {"epochs", [](auto& c, auto k, auto v) { c.train.epochs = to_uint(k, v); }},
      {"lr", [](auto& c, auto k, auto v) { c.train.adam.lr = to_double(k, v); }},
      {"beta1", [](auto& c, auto k, auto v) { c.train.adam.beta1 = to_double(k, v); }},
      {"beta2", [](auto& c, auto k, auto v) { c.train.adam.beta2 = to_double(k, v); }},
      {"eps", [](auto& c, auto k, auto v) { c.train.adam.eps = to_double(k, v); }},
      {"val_fraction", [](auto& c, auto k, auto v) { c.train.val_fraction = to_double(k, v); }},
      {"c_correct", [](auto& c, auto k, auto v) { c.costs.correct = to_double(k, v); }},
      {"c_wrong_hh", [](auto& c, auto k, auto v) { c.costs.wrong_hh = to_double(k, v); }},
      {"c_wrong_vv", [](auto& c, auto k, auto v) { c.costs.wrong_vv = to_double(k, v); }},
      {"c_h_as_v", [](auto& c, auto k, auto v) { c.costs.h_as_v = to_double(k, v); }},
      {"c_v_as_h", [](auto& c, auto k, auto v) { c.costs.v_as_h = to_double(k, v); }},
      {"w_f1", [](auto& c, auto k, auto v) { c.weights.f1 = to_double(k, v); }},
      {"w_venom_kept", [](auto& c, auto k, auto v) { c.weights.venom_kept = to_double(k, v); }},
      {"w_harmless_kept", [](auto& c, auto k, auto v) { c.weights.harmless_kept = to_double(k, v); }},
      {"grid_rows", [](auto& c, auto k, auto v) { c.compression.rows = to_u32(k, v); }},
      {"grid_cols", [](auto& c, auto k, auto v) { c.compression.cols = to_u32(k, v); }},
      {"block", [](auto& c, auto k, auto v) { c.compression.block = to_u32(k, v); }},
      {"split",
       [](auto& c, auto k, auto v) {
         if (v == "train") {
           c.split = Split::Train;
         } else if (v == "test") {
           c.split = Split::Test;
         } else {
           bad_value(k, v, "train or test");
         }
       }},
      {"classes",
       [](auto& c, auto k, auto v) {
         c.eda_classes.clear();
         for (auto field : split_fields(v)) {
           field = trim(field);
           if (field.empty()) continue;
           std::int64_t id = 0;
           if (!parse_int(field, id)) bad_value(k, v, "a comma-separated list of class ids");
           c.eda_classes.push_back(ClassId{id});
         }
       }},
      {"top", [](auto& c, auto k, auto v) { c.eda_top = to_uint(k, v); }},
      {"synth_classes", [](auto& c, auto k, auto v) { c.synthetic.classes = to_uint(k, v); }},
      {"synth_dim", [](auto& c, auto k, auto v) { c.synthetic.dim = to_u32(k, v); }},
      {"synth_train", [](auto& c, auto k, auto v) { c.synthetic.train_observations = to_uint(k, v); }},
      {"synth_test", [](auto& c, auto k, auto v) { c.synthetic.test_observations = to_uint(k, v); }},
      {"synth_min_images", [](auto& c, auto k, auto v) { c.synthetic.min_images = to_uint(k, v); }},
      {"synth_max_images", [](auto& c, auto k, auto v) { c.synthetic.max_images = to_uint(k, v); }},
      {"synth_separation", [](auto& c, auto k, auto v) { c.synthetic.separation = to_double(k, v); }},
      {"synth_noise", [](auto& c, auto k, auto v) { c.synthetic.noise = to_double(k, v); }},
      {"synth_seed", [](auto& c, auto k, auto v) { c.synthetic.seed = to_uint(k, v); }},
      {"synth_grid_rows",
       [](auto& c, auto k, auto v) {
         const auto rows = to_u32(k, v);
         const auto cols = c.synthetic.grid_shape ? c.synthetic.grid_shape->second : 0u;
         c.synthetic.grid_shape = std::pair{rows, cols};
       }},
      {"synth_grid_cols",
       [](auto& c, auto k, auto v) {
         const auto cols = to_u32(k, v);
         const auto rows = c.synthetic.grid_shape ? c.synthetic.grid_shape->first : 0u;
         c.synthetic.grid_shape = std::pair{rows, cols};
       }},
  };
  return table;
}

void require_input(const std::filesystem::path& path, std::string_view what) {
  if (path.empty()) raise(ErrorKind::ConfigError, "missing required path: " + std::string(what));
  if (!std::filesystem::exists(path)) {
    raise(ErrorKind::IoError, std::string(what) + " file does not exist: " + path.string());
  }
}

void require_output(const std::filesystem::path& path, std::string_view what) {
  if (path.empty()) raise(ErrorKind::ConfigError, "missing required output path: " + std::string(what));
}

Manifest load_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

}  // namespace

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
  for (const auto& [name, set] : setters()) {
    if (name == key) {
      set(config, key, trim(value));
      return;
    }
  }
  raise(ErrorKind::ConfigError, "unknown config key '" + std::string(key) + "'");
}

void apply_config_text(PipelineConfig& config, std::string_view text) {
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = lines[i];
    if (auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      raise(ErrorKind::ConfigError, "line " + std::to_string(i + 1) + ": expected key = value");
    }
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    try {
      apply_setting(config, trim(line.substr(0, eq)), value);
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(i + 1) + ": " + e.detail());
    }
  }
}

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> out;
    for (const auto& [name, set] : setters()) out.push_back(name);
    return out;
  }();
  return keys;
}

void run_compress(const PipelineConfig& config) {
  require_input(config.grids, "grids");
  require_output(config.out, "out");
  const GridStore grids = load_grids(config.grids);
  const auto block = static_cast<std::uint32_t>(config.compression.block);
  VectorStore out(block * block);
  std::vector<float> buf(std::size_t{block} * block);
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const auto coeffs = compress_patch_grid(grids.grid(i), config.compression);
    std::transform(coeffs.begin(), coeffs.end(), buf.begin(), [](double v) { return static_cast<float>(v); });
    out.add(grids.id(i), buf);
  }
  save_vectors(config.out, out);
}

TrainResult run_train(const PipelineConfig& config) {
  require_input(config.manifest, "manifest");
  require_input(config.features, "features");
  require_output(config.model, "model");
  const Manifest manifest = load_manifest(config.manifest);
  const VectorStore features = load_vectors(config.features);
  const ClassIndexMap map = build_class_index_map(manifest);
  auto result = train(features, manifest, map, config.train);
  write_binary_file(config.model, write_model(result.model));
  write_text_file(config.class_map_path(), write_class_index_map(map));
  write_text_file(config.history_path(), history_json(result, config.train));
  return result;
}

Submission run_predict(const PipelineConfig& config) {
  require_input(config.model, "model");
  require_input(config.class_map_path(), "class map");
  require_input(config.features, "features");
  require_input(config.manifest, "manifest");
  require_output(config.submission, "submission");
  const LinearModel model = read_model(read_binary_file(config.model));
  const ClassIndexMap map = parse_class_index_map(read_text_file(config.class_map_path()));
  const VectorStore features = load_vectors(config.features);
  const Manifest manifest = load_manifest(config.manifest);
  auto submission = predict_observations(model, features, manifest, map, config.split);
  check_submission_labels(submission, map);
  write_text_file(config.submission, write_submission(submission));
  return submission;
}

MetricReport run_evaluate(const PipelineConfig& config) {
  require_input(config.manifest, "manifest");
  require_input(config.submission, "submission");
  const Manifest manifest = load_manifest(config.manifest);
  const Submission submission = parse_submission(read_text_file(config.submission));
  auto report = metric_report(manifest, submission, config.costs, config.weights, config.split);
  if (!config.out.empty()) write_text_file(config.out, report_json(report));
  return report;
}

void run_eda(const PipelineConfig& config) {
  require_input(config.manifest, "manifest");
  require_input(config.features, "features");
  require_output(config.out, "out");
  const Manifest manifest = load_manifest(config.manifest);
  const VectorStore features = load_vectors(config.features);

  std::unordered_set<ClassId> keep(config.eda_classes.begin(), config.eda_classes.end());
  if (config.eda_top > 0) {
    std::map<ClassId, std::size_t> counts;
    for (const auto& row : manifest.rows()) {
      if (keep.empty() || keep.contains(row.class_id)) ++counts[row.class_id];
    }
    std::vector<std::pair<ClassId, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    ranked.resize(std::min(ranked.size(), config.eda_top));
    keep.clear();
    for (const auto& [cls, n] : ranked) keep.insert(cls);
  }

  std::vector<ManifestRow> rows;
  for (const auto& row : manifest.rows()) {
    if (keep.empty() || keep.contains(row.class_id)) rows.push_back(row);
  }
  Matrix data(static_cast<Eigen::Index>(rows.size()), features.dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto vec = features.find(rows[i].image_id);
    if (!vec) raise(ErrorKind::MissingFeature, "no feature vector for image " + std::to_string(rows[i].image_id));
    for (std::size_t d = 0; d < vec->size(); ++d) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = (*vec)[d];
    }
  }
  const PcaModel pca = fit_pca(data, 2);
  write_text_file(config.out, export_scatter(project(pca, data), rows));
}

void run_synth(const PipelineConfig& config) {
  require_output(config.manifest, "manifest");
  require_output(config.features, "features");
  auto spec = config.synthetic;
  if (spec.grid_shape && (spec.grid_shape->first == 0 || spec.grid_shape->second == 0)) spec.grid_shape.reset();
  if (spec.grid_shape) require_output(config.grids, "grids");
  const auto fixture = make_synthetic_fixture(spec);
  write_text_file(config.manifest, write_manifest(fixture.manifest));
  save_vectors(config.features, fixture.features);
  if (fixture.grids) save_grids(config.grids, *fixture.grids);
}

int run(std::string_view command, const PipelineConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (command == "compress") {
      run_compress(config);
    } else if (command == "train") {
      const auto result = run_train(config);
      if (!result.history.empty()) {
        const auto& last = result.history.back();
        err << "trained " << result.model.classes() << " classes, epoch " << last.epoch
            << " train_loss=" << last.train_loss << " val_accuracy=" << last.val_accuracy << '\n';
      }
    } else if (command == "predict") {
      run_predict(config);
    } else if (command == "evaluate") {
      out << report_json(run_evaluate(config));
    } else if (command == "eda") {
      run_eda(config);
    } else if (command == "synth") {
      run_synth(config);
    } else {
      raise(ErrorKind::ConfigError, "unknown command '" + std::string(command) + "'");
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace vitprobe
