#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "vitprobe/types.hpp"

namespace vitprobe {

// On-disk layouts (all integers and floats little-endian):
//
//   SEB1: "SEB1" | u32 count | u32 dim | u8 dtype | count x { u64 image_id | dim x f32 }
//   SPG1: "SPG1" | u32 count | u32 rows | u32 cols | u8 dtype | count x { u64 image_id | rows*cols x f32 }
//
// dtype 1 is IEEE-754 binary32. Grids are row-major.
inline constexpr std::uint8_t kDtypeFloat32 = 1;
inline constexpr std::size_t kVectorHeaderBytes = 13;
inline constexpr std::size_t kGridHeaderBytes = 17;

/// Fixed-dimension float vectors keyed by image id, in insertion order.
class VectorStore {
 public:
  explicit VectorStore(std::uint32_t dim);

  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  // Throws DimensionError, CorruptValue (non-finite) or DuplicateImage.
  void add(ImageId id, std::span<const float> values);

  ImageId id(std::size_t i) const { return ids_[i]; }
  std::span<const float> values(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::optional<std::span<const float>> find(ImageId id) const;

  const std::vector<ImageId>& ids() const noexcept { return ids_; }

  friend bool operator==(const VectorStore& a, const VectorStore& b) {
    return a.dim_ == b.dim_ && a.ids_ == b.ids_ && a.values_ == b.values_;
  }

 private:
  std::uint32_t dim_;
  std::vector<ImageId> ids_;
  std::vector<float> values_;
  std::unordered_map<ImageId, std::size_t> index_;
};

/// rows x cols float grids (patch tokens) keyed by image id.
class GridStore {
 public:
  GridStore(std::uint32_t rows, std::uint32_t cols);

  std::uint32_t rows() const noexcept { return rows_; }
  std::uint32_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return ids_.size(); }

  // `values` is row-major, length rows*cols.
  void add(ImageId id, std::span<const float> values);

  ImageId id(std::size_t i) const { return ids_[i]; }
  std::span<const float> values(std::size_t i) const {
    const std::size_t n = std::size_t{rows_} * cols_;
    return {values_.data() + i * n, n};
  }
  Matrix grid(std::size_t i) const;

  friend bool operator==(const GridStore& a, const GridStore& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.ids_ == b.ids_ && a.values_ == b.values_;
  }

 private:
  std::uint32_t rows_;
  std::uint32_t cols_;
  std::vector<ImageId> ids_;
  std::vector<float> values_;
  std::unordered_map<ImageId, std::size_t> index_;
};

std::vector<std::byte> write_vectors(const VectorStore& store);
VectorStore read_vectors(std::span<const std::byte> bytes);

std::vector<std::byte> write_grids(const GridStore& store);
GridStore read_grids(std::span<const std::byte> bytes);

void save_vectors(const std::filesystem::path& path, const VectorStore& store);
VectorStore load_vectors(const std::filesystem::path& path);
void save_grids(const std::filesystem::path& path, const GridStore& store);
GridStore load_grids(const std::filesystem::path& path);

}  // namespace vitprobe
