#include "vitprobe/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "vitprobe/error.hpp"
#include "vitprobe/random.hpp"

namespace vitprobe {

SyntheticFixture make_synthetic_fixture(const SyntheticSpec& spec) {
  if (spec.classes == 0 || spec.dim == 0) raise(ErrorKind::ConfigError, "synthetic fixture needs classes and dim > 0");
  if (spec.min_images == 0 || spec.max_images < spec.min_images) {
    raise(ErrorKind::ConfigError, "synthetic fixture needs 1 <= min_images <= max_images");
  }
  if (spec.classes > 99999) raise(ErrorKind::ConfigError, "too many synthetic classes");

  Rng rng(spec.seed);
  std::set<std::int64_t> ids;
  while (ids.size() < spec.classes) ids.insert(1 + static_cast<std::int64_t>(rng.below(99999)));
  const std::vector<std::int64_t> class_ids(ids.begin(), ids.end());

  std::vector<Vector> means(spec.classes, Vector(spec.dim));
  for (auto& mean : means) {
    for (Eigen::Index j = 0; j < mean.size(); ++j) mean[j] = spec.separation * rng.normal();
  }

  std::vector<ManifestRow> rows;
  VectorStore features(spec.dim);
  std::optional<GridStore> grids;
  if (spec.grid_shape) grids.emplace(spec.grid_shape->first, spec.grid_shape->second);

  std::vector<float> buf(spec.dim);
  std::vector<float> grid_buf;
  ImageId next_image = 1;
  const std::size_t total = spec.train_observations + spec.test_observations;
  for (std::size_t o = 0; o < total; ++o) {
    const auto obs_id = static_cast<ObservationId>(o + 1);
    const std::size_t cls = o % spec.classes;
    const Split split = o < spec.train_observations ? Split::Train : Split::Test;
    const std::size_t images = spec.min_images + rng.below(spec.max_images - spec.min_images + 1);
    for (std::size_t k = 0; k < images; ++k) {
      const ImageId image = next_image++;
      rows.push_back({obs_id, image, "images/" + std::to_string(obs_id) + "/" + std::to_string(image) + ".jpg",
                      ClassId{class_ids[cls]}, cls % 2 == 1, split});
      for (std::size_t j = 0; j < spec.dim; ++j) {
        buf[j] = static_cast<float>(means[cls][static_cast<Eigen::Index>(j)] + spec.noise * rng.normal());
      }
      features.add(image, buf);
      if (grids) {
        const auto [gr, gc] = *spec.grid_shape;
        grid_buf.resize(std::size_t{gr} * gc);
        const double fr = 1.0 + static_cast<double>(cls % 3);
        const double fc = 1.0 + static_cast<double>(cls / 3 % 3);
        for (std::uint32_t r = 0; r < gr; ++r) {
          for (std::uint32_t c = 0; c < gc; ++c) {
            const double pattern = std::cos(std::numbers::pi * fr * (r + 0.5) / gr) *
                                   std::cos(std::numbers::pi * fc * (c + 0.5) / gc);
            grid_buf[std::size_t{r} * gc + c] = static_cast<float>(pattern + spec.noise * 0.1 * rng.normal());
          }
        }
        grids->add(image, grid_buf);
      }
    }
  }
  return {Manifest(std::move(rows)), std::move(features), std::move(grids)};
}

}  // namespace vitprobe
