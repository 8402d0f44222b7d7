#include "vitprobe/embed_store.hpp"

#include <cmath>
#include <string>

#include "bytes.hpp"
#include "vitprobe/error.hpp"
#include "vitprobe/text_io.hpp"

namespace vitprobe {

namespace {

void check_finite(ImageId id, std::span<const float> values) {
  for (float v : values) {
    if (!std::isfinite(v)) raise(ErrorKind::CorruptValue, "non-finite value in record for image " + std::to_string(id));
  }
}

}  // namespace

VectorStore::VectorStore(std::uint32_t dim) : dim_(dim) {
  if (dim == 0) raise(ErrorKind::DimensionError, "vector dim must be positive");
}

void VectorStore::add(ImageId id, std::span<const float> values) {
  if (values.size() != dim_) {
    raise(ErrorKind::DimensionError,
          "vector for image " + std::to_string(id) + " has length " + std::to_string(values.size()) + ", expected " +
              std::to_string(dim_));
  }
  check_finite(id, values);
  if (!index_.try_emplace(id, ids_.size()).second) {
    raise(ErrorKind::DuplicateImage, "image_id " + std::to_string(id) + " already stored");
  }
  ids_.push_back(id);
  values_.insert(values_.end(), values.begin(), values.end());
}

std::optional<std::span<const float>> VectorStore::find(ImageId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return values(it->second);
}

GridStore::GridStore(std::uint32_t rows, std::uint32_t cols) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) raise(ErrorKind::DimensionError, "grid rows and cols must be positive");
}

void GridStore::add(ImageId id, std::span<const float> values) {
  if (values.size() != std::size_t{rows_} * cols_) {
    raise(ErrorKind::DimensionError, "grid for image " + std::to_string(id) + " has " +
                                         std::to_string(values.size()) + " values, expected " +
                                         std::to_string(std::size_t{rows_} * cols_));
  }
  check_finite(id, values);
  if (!index_.try_emplace(id, ids_.size()).second) {
    raise(ErrorKind::DuplicateImage, "image_id " + std::to_string(id) + " already stored");
  }
  ids_.push_back(id);
  values_.insert(values_.end(), values.begin(), values.end());
}

Matrix GridStore::grid(std::size_t i) const {
  const auto v = values(i);
  Matrix m(rows_, cols_);
  for (std::size_t k = 0; k < v.size(); ++k) m.data()[k] = v[k];
  return m;
}

std::vector<std::byte> write_vectors(const VectorStore& store) {
  detail::ByteWriter w;
  w.reserve(kVectorHeaderBytes + store.size() * (8 + 4 * std::size_t{store.dim()}));
  w.magic("SEB1");
  w.u32(static_cast<std::uint32_t>(store.size()));
  w.u32(store.dim());
  w.u8(kDtypeFloat32);
  for (std::size_t i = 0; i < store.size(); ++i) {
    w.u64(store.id(i));
    for (float v : store.values(i)) w.f32(v);
  }
  return w.take();
}

VectorStore read_vectors(std::span<const std::byte> bytes) {
  detail::ByteReader r(bytes);
  if (!r.magic("SEB1")) raise(ErrorKind::FormatError, "missing SEB1 magic");
  if (r.remaining() < kVectorHeaderBytes - 4) raise(ErrorKind::TruncatedFile, "header shorter than 13 bytes");
  const std::uint32_t count = r.u32();
  const std::uint32_t dim = r.u32();
  const std::uint8_t dtype = r.u8();
  if (dtype != kDtypeFloat32) raise(ErrorKind::FormatError, "unsupported dtype code " + std::to_string(dtype));
  if (dim == 0) raise(ErrorKind::FormatError, "dim is zero");
  const std::size_t record = 8 + 4 * std::size_t{dim};
  if (r.remaining() != std::size_t{count} * record) {
    raise(ErrorKind::TruncatedFile, "header declares " + std::to_string(count) + " records of dim " +
                                        std::to_string(dim) + " but payload is " + std::to_string(r.remaining()) +
                                        " bytes");
  }
  VectorStore store(dim);
  std::vector<float> buf(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    const ImageId id = r.u64();
    for (auto& v : buf) v = r.f32();
    store.add(id, buf);
  }
  return store;
}

std::vector<std::byte> write_grids(const GridStore& store) {
  detail::ByteWriter w;
  const std::size_t cells = std::size_t{store.rows()} * store.cols();
  w.reserve(kGridHeaderBytes + store.size() * (8 + 4 * cells));
  w.magic("SPG1");
  w.u32(static_cast<std::uint32_t>(store.size()));
  w.u32(store.rows());
  w.u32(store.cols());
  w.u8(kDtypeFloat32);
  for (std::size_t i = 0; i < store.size(); ++i) {
    w.u64(store.id(i));
    for (float v : store.values(i)) w.f32(v);
  }
  return w.take();
}

GridStore read_grids(std::span<const std::byte> bytes) {
  detail::ByteReader r(bytes);
  if (!r.magic("SPG1")) raise(ErrorKind::FormatError, "missing SPG1 magic");
  if (r.remaining() < kGridHeaderBytes - 4) raise(ErrorKind::TruncatedFile, "header shorter than 17 bytes");
  const std::uint32_t count = r.u32();
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  const std::uint8_t dtype = r.u8();
  if (dtype != kDtypeFloat32) raise(ErrorKind::FormatError, "unsupported dtype code " + std::to_string(dtype));
  if (rows == 0 || cols == 0) raise(ErrorKind::FormatError, "grid shape has a zero dimension");
  const std::size_t cells = std::size_t{rows} * cols;
  const std::size_t record = 8 + 4 * cells;
  if (r.remaining() != std::size_t{count} * record) {
    raise(ErrorKind::TruncatedFile, "header declares " + std::to_string(count) + " grids of " + std::to_string(rows) +
                                        "x" + std::to_string(cols) + " but payload is " +
                                        std::to_string(r.remaining()) + " bytes");
  }
  GridStore store(rows, cols);
  std::vector<float> buf(cells);
  for (std::uint32_t i = 0; i < count; ++i) {
    const ImageId id = r.u64();
    for (auto& v : buf) v = r.f32();
    store.add(id, buf);
  }
  return store;
}

void save_vectors(const std::filesystem::path& path, const VectorStore& store) {
  write_binary_file(path, write_vectors(store));
}

VectorStore load_vectors(const std::filesystem::path& path) { return read_vectors(read_binary_file(path)); }

void save_grids(const std::filesystem::path& path, const GridStore& store) {
  write_binary_file(path, write_grids(store));
}

GridStore load_grids(const std::filesystem::path& path) { return read_grids(read_binary_file(path)); }

}  // namespace vitprobe
