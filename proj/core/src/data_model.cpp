#include "vitprobe/data_model.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "vitprobe/error.hpp"
#include "vitprobe/text_io.hpp"

namespace vitprobe {

std::string_view split_name(Split split) noexcept {
  return split == Split::Train ? "train" : "test";
}

Manifest::Manifest(std::vector<ManifestRow> rows) : rows_(std::move(rows)) {
  std::unordered_set<ImageId> images;
  std::unordered_map<ObservationId, std::size_t> first_row;
  std::unordered_map<ClassId, bool> venom;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    if (!images.insert(row.image_id).second) {
      raise(ErrorKind::DuplicateImage, "image_id " + std::to_string(row.image_id) + " appears more than once");
    }
    auto [it, fresh] = first_row.try_emplace(row.observation_id, i);
    if (!fresh) {
      const auto& first = rows_[it->second];
      if (first.class_id != row.class_id || first.venomous != row.venomous || first.split != row.split) {
        raise(ErrorKind::InconsistentObservation,
              "observation " + std::to_string(row.observation_id) + " has rows with differing class_id, venomous or split");
      }
    }
    auto [vit, vfresh] = venom.try_emplace(row.class_id, row.venomous);
    if (!vfresh && vit->second != row.venomous) {
      raise(ErrorKind::InconsistentClass,
            "class_id " + std::to_string(row.class_id.value) + " is marked both venomous and harmless");
    }
  }
}

std::vector<Observation> Manifest::observations() const {
  std::vector<Observation> out;
  std::unordered_map<ObservationId, std::size_t> slot;
  for (const auto& row : rows_) {
    auto [it, fresh] = slot.try_emplace(row.observation_id, out.size());
    if (fresh) out.push_back({row.observation_id, row.class_id, row.venomous, row.split, {}});
    out[it->second].images.push_back(row.image_id);
  }
  return out;
}

std::vector<Observation> Manifest::observations(Split split) const {
  auto all = observations();
  std::erase_if(all, [split](const Observation& o) { return o.split != split; });
  return all;
}

std::vector<ClassId> Manifest::distinct_classes() const {
  std::set<ClassId> classes;
  for (const auto& row : rows_) classes.insert(row.class_id);
  return {classes.begin(), classes.end()};
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  raise(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

Manifest parse_manifest(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kManifestHeader) {
    parse_fail(1, "expected header '" + std::string(kManifestHeader) + "'");
  }
  std::vector<ManifestRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (lines[i].empty()) continue;
    const auto f = split_fields(lines[i]);
    if (f.size() != 6) parse_fail(lineno, "expected 6 fields, got " + std::to_string(f.size()));
    ManifestRow row;
    std::int64_t cls = 0;
    if (!parse_int(f[0], row.observation_id)) parse_fail(lineno, "bad observation_id '" + std::string(f[0]) + "'");
    if (!parse_uint(f[1], row.image_id)) parse_fail(lineno, "bad image_id '" + std::string(f[1]) + "'");
    if (f[2].empty()) parse_fail(lineno, "empty relative_path");
    row.relative_path = std::string(f[2]);
    if (!parse_int(f[3], cls)) parse_fail(lineno, "bad class_id '" + std::string(f[3]) + "'");
    row.class_id = ClassId{cls};
    if (f[4] == "1") {
      row.venomous = true;
    } else if (f[4] == "0") {
      row.venomous = false;
    } else {
      parse_fail(lineno, "venomous must be 0 or 1, got '" + std::string(f[4]) + "'");
    }
    if (f[5] == "train") {
      row.split = Split::Train;
    } else if (f[5] == "test") {
      row.split = Split::Test;
    } else {
      parse_fail(lineno, "split must be train or test, got '" + std::string(f[5]) + "'");
    }
    rows.push_back(std::move(row));
  }
  return Manifest(std::move(rows));
}

std::string write_manifest(const Manifest& manifest) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& r : manifest.rows()) {
    out += std::to_string(r.observation_id) + ',' + std::to_string(r.image_id) + ',' + r.relative_path + ',' +
           std::to_string(r.class_id.value) + ',' + (r.venomous ? '1' : '0') + ',' + std::string(split_name(r.split)) +
           '\n';
  }
  return out;
}

ClassIndexMap::ClassIndexMap(std::vector<ClassId> classes) : backward_(std::move(classes)) {
  for (std::size_t i = 0; i < backward_.size(); ++i) {
    if (i > 0 && !(backward_[i - 1] < backward_[i])) {
      raise(ErrorKind::FormatError, "class index map must be strictly ascending by class_id");
    }
    forward_.emplace(backward_[i], i);
  }
}

std::optional<ClassIndex> ClassIndexMap::find(ClassId c) const {
  auto it = forward_.find(c);
  if (it == forward_.end()) return std::nullopt;
  return ClassIndex{it->second};
}

ClassIndex ClassIndexMap::to_index(ClassId c) const {
  auto idx = find(c);
  if (!idx) raise(ErrorKind::LabelRangeError, "class_id " + std::to_string(c.value) + " is not in the class index map");
  return *idx;
}

ClassId ClassIndexMap::to_class(ClassIndex i) const {
  if (i.value >= backward_.size()) {
    raise(ErrorKind::LabelRangeError,
          "index " + std::to_string(i.value) + " outside 0.." + std::to_string(backward_.size()) + "-1");
  }
  return backward_[i.value];
}

ClassIndexMap build_class_index_map(const Manifest& manifest) {
  std::set<ClassId> classes;
  for (const auto& row : manifest.rows()) {
    if (row.split == Split::Train) classes.insert(row.class_id);
  }
  if (classes.empty()) raise(ErrorKind::EmptyTrainingSet, "manifest has no train rows");
  return ClassIndexMap({classes.begin(), classes.end()});
}

std::string write_class_index_map(const ClassIndexMap& map) {
  std::string out(kClassMapHeader);
  out += '\n';
  for (std::size_t i = 0; i < map.size(); ++i) {
    out += std::to_string(map.classes()[i].value) + ',' + std::to_string(i) + '\n';
  }
  return out;
}

ClassIndexMap parse_class_index_map(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kClassMapHeader) {
    parse_fail(1, "expected header '" + std::string(kClassMapHeader) + "'");
  }
  std::vector<ClassId> classes;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (lines[i].empty()) continue;
    const auto f = split_fields(lines[i]);
    std::int64_t cls = 0;
    std::uint64_t index = 0;
    if (f.size() != 2 || !parse_int(f[0], cls) || !parse_uint(f[1], index)) parse_fail(lineno, "malformed row");
    if (index != classes.size()) {
      raise(ErrorKind::FormatError, "line " + std::to_string(lineno) + ": index " + std::to_string(index) +
                                        " breaks the contiguous 0..K-1 sequence");
    }
    classes.push_back(ClassId{cls});
  }
  if (classes.empty()) raise(ErrorKind::FormatError, "class index map is empty");
  return ClassIndexMap(std::move(classes));
}

VenomMap build_venom_map(const Manifest& manifest) {
  VenomMap venom;
  for (const auto& row : manifest.rows()) venom.emplace(row.class_id, row.venomous);
  return venom;
}

}  // namespace vitprobe
