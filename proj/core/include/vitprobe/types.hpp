#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace vitprobe {

using ObservationId = std::int64_t;
using ImageId = std::uint64_t;

// Sparse species identifier as it appears in the metadata.
struct ClassId {
  std::int64_t value = 0;
  friend auto operator<=>(const ClassId&, const ClassId&) = default;
};

// Contiguous model output index in 0..K-1. Deliberately not convertible to
// ClassId: the only path between the two is ClassIndexMap.
struct ClassIndex {
  std::size_t value = 0;
  friend auto operator<=>(const ClassIndex&, const ClassIndex&) = default;
};

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace vitprobe

template <>
struct std::hash<vitprobe::ClassId> {
  std::size_t operator()(const vitprobe::ClassId& c) const noexcept {
    return std::hash<std::int64_t>{}(c.value);
  }
};
