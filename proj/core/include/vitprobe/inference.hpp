#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vitprobe/classifier.hpp"
#include "vitprobe/data_model.hpp"
#include "vitprobe/embed_store.hpp"

namespace vitprobe {

struct SubmissionRow {
  ObservationId observation_id = 0;
  ClassId class_id;  // species id, never a model index
  friend bool operator==(const SubmissionRow&, const SubmissionRow&) = default;
};

struct Submission {
  std::vector<SubmissionRow> rows;
  friend bool operator==(const Submission&, const Submission&) = default;
};

ClassIndex predict_image(const LinearModel& model, std::span<const float> features);

/// Mode of the per-image predictions; when several values share the
/// maximal count the first image's prediction wins. Throws EmptyObservation.
ClassIndex aggregate_observation(std::span<const ClassIndex> per_image);

/// Predicts every observation of `split`, maps indices back to species ids
/// through `map`, and returns rows sorted by observation id.
Submission predict_observations(const LinearModel& model, const VectorStore& features, const Manifest& manifest,
                                const ClassIndexMap& map, Split split = Split::Test);

/// Throws LabelRangeError if any emitted class id is not a training label.
void check_submission_labels(const Submission& submission, const ClassIndexMap& map);

inline constexpr std::string_view kSubmissionHeader = "observation_id,class_id";

std::string write_submission(const Submission& submission);
Submission parse_submission(std::string_view text);

}  // namespace vitprobe
