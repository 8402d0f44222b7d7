// vitprobe: file-to-file pipeline over pre-extracted ViT embeddings.
//
//   vitprobe synth    --manifest m.csv --features f.seb [--grids g.spg --synth-grid-rows R --synth-grid-cols C]
//   vitprobe compress --grids g.spg --out dct.seb [--grid-rows 256 --grid-cols 768 --block 8]
//   vitprobe train    --manifest m.csv --features f.seb --model model.slm [--epochs 20 --lr 1e-3 ...]
//   vitprobe predict  --manifest m.csv --features f.seb --model model.slm --submission sub.csv
//   vitprobe evaluate --manifest m.csv --submission sub.csv [--config metrics.ini]
//   vitprobe eda      --manifest m.csv --features f.seb --out scatter.csv [--classes 12,1754 | --top 5]
//
// Every command accepts --config FILE (key = value lines); flags override it.

#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vitprobe/error.hpp"
#include "vitprobe/pipeline.hpp"
#include "vitprobe/text_io.hpp"

namespace {

using KeyList = std::vector<std::string_view>;

const KeyList kPathKeys = {"manifest", "features", "model", "class_map"};
const KeyList kTrainKeys = {"feature_kind", "seed", "batch_size", "epochs", "lr",
                            "beta1", "beta2", "eps", "val_fraction", "history"};
const KeyList kMetricKeys = {"c_correct", "c_wrong_hh", "c_wrong_vv", "c_h_as_v", "c_v_as_h",
                             "w_f1", "w_venom_kept", "w_harmless_kept", "split", "out"};
const KeyList kSynthKeys = {"manifest", "features", "grids", "synth_classes", "synth_dim",
                            "synth_train", "synth_test", "synth_min_images", "synth_max_images",
                            "synth_separation", "synth_noise", "synth_seed", "synth_grid_rows",
                            "synth_grid_cols"};

std::map<std::string_view, KeyList> command_keys() {
  auto concat = [](std::initializer_list<KeyList> lists) {
    KeyList out;
    for (const auto& l : lists) out.insert(out.end(), l.begin(), l.end());
    return out;
  };
  return {
      {"compress", {"grids", "out", "grid_rows", "grid_cols", "block"}},
      {"train", concat({{"manifest", "features", "model", "class_map"}, kTrainKeys})},
      {"predict", concat({kPathKeys, {"submission", "split"}})},
      {"evaluate", concat({{"manifest", "submission"}, kMetricKeys})},
      {"eda", {"manifest", "features", "out", "classes", "top"}},
      {"synth", kSynthKeys},
  };
}

std::string flag_name(std::string_view key) {
  std::string flag = "--" + std::string(key);
  std::replace(flag.begin(), flag.end(), '_', '-');
  return flag;
}

const char* describe(std::string_view command) {
  if (command == "compress") return "DCT-compress patch grids (SPG1) into coefficient vectors (SEB1)";
  if (command == "train") return "Train the linear classifier; writes model, class map and history JSON";
  if (command == "predict") return "Predict one species per observation; writes submission CSV";
  if (command == "evaluate") return "Score a submission; prints a JSON metric report";
  if (command == "eda") return "Project embeddings to 2D with PCA; writes scatter CSV";
  return "Generate a seeded synthetic manifest and embedding fixture";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear-probe species classification over vision-transformer embeddings"};
  app.require_subcommand(1);

  struct CommandArgs {
    CLI::App* app = nullptr;
    std::string config;
    std::map<std::string_view, std::string> values;
  };
  std::map<std::string_view, CommandArgs> commands;
  const auto keys = command_keys();

  for (auto command : vitprobe::kCommands) {
    auto& args = commands[command];
    args.app = app.add_subcommand(std::string(command), describe(command));
    args.app->add_option("--config", args.config, "key = value config file")->check(CLI::ExistingFile);
    for (auto key : keys.at(command)) {
      args.app->add_option(flag_name(key), args.values[key], "overrides config key " + std::string(key));
    }
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [command, args] : commands) {
    if (!args.app->parsed()) continue;
    vitprobe::PipelineConfig config;
    try {
      if (!args.config.empty()) vitprobe::apply_config_text(config, vitprobe::read_text_file(args.config));
      for (const auto& [key, value] : args.values) {
        if (args.app->count(flag_name(key)) > 0) vitprobe::apply_setting(config, key, value);
      }
    } catch (const vitprobe::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
    return vitprobe::run(command, config, std::cout, std::cerr);
  }
  return 1;
}
