#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vitprobe/classifier.hpp"
#include "vitprobe/dct.hpp"
#include "vitprobe/metrics.hpp"
#include "vitprobe/synthetic.hpp"

namespace vitprobe {

/// Settings shared by all pipeline commands. Populated from a key=value
/// config file, then overridden by command-line flags using the same keys.
struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path features;
  std::filesystem::path grids;
  std::filesystem::path model;
  std::filesystem::path class_map;  // default: model path with extension .csv
  std::filesystem::path history;    // default: model path with extension .history.json
  std::filesystem::path submission;
  std::filesystem::path out;

  TrainConfig train;
  CostTable costs;
  Track1Weights weights;
  CompressionShape compression;
  Split split = Split::Test;

  std::vector<ClassId> eda_classes;  // empty: all classes
  std::size_t eda_top = 0;           // 0: no top-N restriction

  SyntheticSpec synthetic;

  std::filesystem::path class_map_path() const;
  std::filesystem::path history_path() const;
};

// Applies one setting. Throws ConfigError for an unknown key or bad value.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

// Parses `key = value` lines; '#' and ';' start comments, [section] lines are ignored.
void apply_config_text(PipelineConfig& config, std::string_view text);

// Names of every accepted key, in documentation order.
const std::vector<std::string_view>& config_keys();

// Commands. Each reads and writes only the explicit paths in `config`.
void run_compress(const PipelineConfig& config);
TrainResult run_train(const PipelineConfig& config);
Submission run_predict(const PipelineConfig& config);
MetricReport run_evaluate(const PipelineConfig& config);
void run_eda(const PipelineConfig& config);
void run_synth(const PipelineConfig& config);

inline constexpr std::string_view kCommands[] = {"compress", "train", "predict", "evaluate", "eda", "synth"};

/// Dispatches `command`. Returns 0 on success; on any library error prints
/// a single `error: <Kind>: <detail>` line to `err` and returns 1.
/// `evaluate` writes its JSON report to `out` (and to config.out if set).
int run(std::string_view command, const PipelineConfig& config, std::ostream& out, std::ostream& err);

}  // namespace vitprobe
