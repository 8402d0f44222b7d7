#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vitprobe/data_model.hpp"
#include "vitprobe/types.hpp"

namespace vitprobe {

struct PcaModel {
  Vector mean;                          // D
  Matrix components;                    // k x D, orthonormal rows
  std::vector<double> explained_variance;  // non-increasing, >= 0
  double total_variance = 0.0;          // trace of the sample covariance

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
  double explained_variance_ratio(std::size_t i) const;
};

struct PowerIterationOptions {
  double tolerance = 1e-9;
  std::size_t max_iterations = 1000;
};

/// Top-k principal axes of the rows of `vectors` (N x D), found by power
/// iteration with deflation on the sample covariance. Each component is
/// sign-normalized so its first nonzero coordinate is positive.
/// Throws InsufficientData when N < 2, DimensionError when D < k.
PcaModel fit_pca(const Matrix& vectors, std::size_t k = 2, const PowerIterationOptions& options = {});

// (x - mean) * components^T, N x k.
Matrix project(const PcaModel& model, const Matrix& vectors);

struct ScatterPoint {
  ImageId image_id = 0;
  double x = 0.0;
  double y = 0.0;
  ClassId class_id;
  bool venomous = false;
  friend bool operator==(const ScatterPoint&, const ScatterPoint&) = default;
};

inline constexpr std::string_view kScatterHeader = "image_id,x,y,class_id,venomous";

// One row per projected image; `coords` is N x 2 aligned with `rows`.
std::string export_scatter(const Matrix& coords, std::span<const ManifestRow> rows);
std::vector<ScatterPoint> parse_scatter(std::string_view text);

}  // namespace vitprobe
