#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "vitprobe/data_model.hpp"
#include "vitprobe/inference.hpp"

namespace vitprobe {

// Per-observation cost by confusion category. The defaults are this
// project's configuration, not official competition constants.
struct CostTable {
  double correct = 0.0;
  double wrong_hh = 1.0;  // harmless predicted as another harmless species
  double wrong_vv = 2.0;  // venomous predicted as another venomous species
  double h_as_v = 2.0;    // harmless predicted as a venomous species
  double v_as_h = 5.0;    // venomous predicted as a harmless species

  // correct must be 0, all costs non-negative, v_as_h the largest.
  void validate() const;
};

struct Track1Weights {
  double f1 = 1.0;
  double venom_kept = 1.0;
  double harmless_kept = 1.0;

  void validate() const;
};

struct ConfusionBreakdown {
  std::size_t correct = 0;
  std::size_t wrong_hh = 0;
  std::size_t wrong_vv = 0;
  std::size_t h_as_v = 0;
  std::size_t v_as_h = 0;

  std::size_t total() const noexcept { return correct + wrong_hh + wrong_vv + h_as_v + v_as_h; }
  friend bool operator==(const ConfusionBreakdown&, const ConfusionBreakdown&) = default;
};

struct MetricReport {
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  double track1 = 0.0;
  double track2 = 0.0;
  double venom_kept = 1.0;     // A_v
  double harmless_kept = 1.0;  // A_h
  std::size_t observations = 0;
  ConfusionBreakdown breakdown;
  CostTable costs;
  Track1Weights weights;
};

// Mean per-class F1 over classes in truth or pred; F1 is 0 when P + R = 0.
double macro_f1(std::span<const ClassId> truth, std::span<const ClassId> pred);
double accuracy(std::span<const ClassId> truth, std::span<const ClassId> pred);

ConfusionBreakdown confusion_breakdown(std::span<const ClassId> truth, std::span<const ClassId> pred,
                                       const VenomMap& venom);

double track2_score(std::span<const ClassId> truth, std::span<const ClassId> pred, const VenomMap& venom,
                    const CostTable& costs = {});

double track1_score(std::span<const ClassId> truth, std::span<const ClassId> pred, const VenomMap& venom,
                    const Track1Weights& weights = {});

/// Scores `submission` against the observations of `split` in `truth`.
/// The submission must cover exactly those observations.
MetricReport metric_report(const Manifest& truth, const Submission& submission, const CostTable& costs = {},
                           const Track1Weights& weights = {}, Split split = Split::Test);

std::string report_json(const MetricReport& report);

}  // namespace vitprobe
