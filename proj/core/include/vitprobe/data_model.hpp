#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vitprobe/types.hpp"

namespace vitprobe {

enum class Split { Train, Test };

std::string_view split_name(Split split) noexcept;

struct ManifestRow {
  ObservationId observation_id = 0;
  ImageId image_id = 0;
  std::string relative_path;
  ClassId class_id;
  bool venomous = false;
  Split split = Split::Train;

  friend bool operator==(const ManifestRow&, const ManifestRow&) = default;
};

// All images of one observation, in manifest order.
struct Observation {
  ObservationId id = 0;
  ClassId class_id;
  bool venomous = false;
  Split split = Split::Train;
  std::vector<ImageId> images;
};

/// Observation/image/label table driving every stage.
///
/// Construction validates the invariants: unique image ids, consistent
/// label, venom flag and split within an observation, and a single venom
/// flag per species. Row order is preserved; it defines "first image".
class Manifest {
 public:
  explicit Manifest(std::vector<ManifestRow> rows);

  const std::vector<ManifestRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  // Observations in order of first appearance, optionally restricted to one split.
  std::vector<Observation> observations() const;
  std::vector<Observation> observations(Split split) const;

  std::vector<ClassId> distinct_classes() const;

  friend bool operator==(const Manifest& a, const Manifest& b) { return a.rows_ == b.rows_; }

 private:
  std::vector<ManifestRow> rows_;
};

inline constexpr std::string_view kManifestHeader =
    "observation_id,image_id,relative_path,class_id,venomous,split";

Manifest parse_manifest(std::string_view text);
std::string write_manifest(const Manifest& manifest);

/// Bijection between sparse species ids and contiguous model indices,
/// assigned in ascending class id order.
class ClassIndexMap {
 public:
  // `classes` must be strictly ascending.
  explicit ClassIndexMap(std::vector<ClassId> classes);

  std::size_t size() const noexcept { return backward_.size(); }

  std::optional<ClassIndex> find(ClassId c) const;
  // Throws LabelRangeError when the class is not part of the map.
  ClassIndex to_index(ClassId c) const;
  // Throws LabelRangeError when the index is outside 0..K-1.
  ClassId to_class(ClassIndex i) const;
  bool contains(ClassId c) const { return forward_.contains(c); }

  const std::vector<ClassId>& classes() const noexcept { return backward_; }

  friend bool operator==(const ClassIndexMap& a, const ClassIndexMap& b) {
    return a.backward_ == b.backward_;
  }

 private:
  std::vector<ClassId> backward_;
  std::unordered_map<ClassId, std::size_t> forward_;
};

ClassIndexMap build_class_index_map(const Manifest& manifest);

inline constexpr std::string_view kClassMapHeader = "class_id,index";

std::string write_class_index_map(const ClassIndexMap& map);
ClassIndexMap parse_class_index_map(std::string_view text);

using VenomMap = std::map<ClassId, bool>;

VenomMap build_venom_map(const Manifest& manifest);

}  // namespace vitprobe
