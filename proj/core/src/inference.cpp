#include "vitprobe/inference.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <unordered_set>

#include "vitprobe/error.hpp"
#include "vitprobe/text_io.hpp"

namespace vitprobe {

ClassIndex predict_image(const LinearModel& model, std::span<const float> features) {
  if (features.size() != model.dim()) {
    raise(ErrorKind::DimensionError, "feature vector has length " + std::to_string(features.size()) +
                                         ", model expects " + std::to_string(model.dim()));
  }
  Vector x(static_cast<Eigen::Index>(features.size()));
  for (std::size_t i = 0; i < features.size(); ++i) x[static_cast<Eigen::Index>(i)] = features[i];
  return ClassIndex{argmax(forward(model, x))};
}

ClassIndex aggregate_observation(std::span<const ClassIndex> per_image) {
  if (per_image.empty()) raise(ErrorKind::EmptyObservation, "observation has no image predictions");
  std::map<ClassIndex, std::size_t> counts;
  std::size_t top = 0;
  for (auto p : per_image) top = std::max(top, ++counts[p]);
  std::size_t modes = 0;
  ClassIndex mode;
  for (const auto& [value, count] : counts) {
    if (count == top) {
      ++modes;
      mode = value;
    }
  }
  return modes == 1 ? mode : per_image.front();
}

Submission predict_observations(const LinearModel& model, const VectorStore& features, const Manifest& manifest,
                                const ClassIndexMap& map, Split split) {
  if (map.size() != model.classes()) {
    raise(ErrorKind::LabelRangeError, "class index map has " + std::to_string(map.size()) +
                                          " classes but the model outputs " + std::to_string(model.classes()));
  }
  Submission out;
  std::vector<ClassIndex> per_image;
  for (const auto& obs : manifest.observations(split)) {
    per_image.clear();
    for (ImageId image : obs.images) {
      const auto vec = features.find(image);
      if (!vec) {
        raise(ErrorKind::MissingFeature, "no feature vector for image " + std::to_string(image) +
                                             " (observation " + std::to_string(obs.id) + ")");
      }
      per_image.push_back(predict_image(model, *vec));
    }
    const ClassIndex index = aggregate_observation(per_image);
    assert(index.value < map.size());
    out.rows.push_back({obs.id, map.to_class(index)});
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const SubmissionRow& a, const SubmissionRow& b) { return a.observation_id < b.observation_id; });
  return out;
}

void check_submission_labels(const Submission& submission, const ClassIndexMap& map) {
  for (const auto& row : submission.rows) {
    if (!map.contains(row.class_id)) {
      raise(ErrorKind::LabelRangeError, "observation " + std::to_string(row.observation_id) + " predicts class_id " +
                                            std::to_string(row.class_id.value) + " which is not a training label");
    }
  }
}

std::string write_submission(const Submission& submission) {
  std::string out(kSubmissionHeader);
  out += '\n';
  for (const auto& row : submission.rows) {
    out += std::to_string(row.observation_id) + ',' + std::to_string(row.class_id.value) + '\n';
  }
  return out;
}

Submission parse_submission(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kSubmissionHeader) {
    raise(ErrorKind::ParseError, "line 1: expected header '" + std::string(kSubmissionHeader) + "'");
  }
  Submission out;
  std::unordered_set<ObservationId> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_fields(lines[i]);
    SubmissionRow row;
    std::int64_t cls = 0;
    if (f.size() != 2 || !parse_int(f[0], row.observation_id) || !parse_int(f[1], cls)) {
      raise(ErrorKind::ParseError, "line " + std::to_string(i + 1) + ": malformed row '" + std::string(lines[i]) + "'");
    }
    row.class_id = ClassId{cls};
    if (!seen.insert(row.observation_id).second) {
      raise(ErrorKind::DuplicateObservation,
            "line " + std::to_string(i + 1) + ": observation " + std::to_string(row.observation_id) + " repeated");
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace vitprobe
