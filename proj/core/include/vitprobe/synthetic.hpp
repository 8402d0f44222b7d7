#pragma once

#include <cstdint>
#include <optional>

#include "vitprobe/data_model.hpp"
#include "vitprobe/embed_store.hpp"

namespace vitprobe {

// Seeded Gaussian class blobs with a matching manifest, so the whole
// pipeline runs without competition data.
struct SyntheticSpec {
  std::size_t classes = 10;
  std::uint32_t dim = 768;
  std::size_t train_observations = 500;
  std::size_t test_observations = 100;
  std::size_t min_images = 1;
  std::size_t max_images = 3;
  double separation = 1.0;  // per-coordinate std-dev of the class means
  double noise = 1.0;       // per-coordinate std-dev around the class mean
  std::uint64_t seed = 0;
  // When set, also emit patch grids of this shape (class-dependent smooth
  // pattern plus noise).
  std::optional<std::pair<std::uint32_t, std::uint32_t>> grid_shape;
};

struct SyntheticFixture {
  Manifest manifest;
  VectorStore features;
  std::optional<GridStore> grids;
};

/// Class ids are sparse and ascending in 1..99999; odd-indexed classes are
/// venomous. Observations cycle through classes so every class has train
/// observations whenever train_observations >= classes.
SyntheticFixture make_synthetic_fixture(const SyntheticSpec& spec);

}  // namespace vitprobe
