#include "vitprobe/projection.hpp"

#include <algorithm>
#include <cmath>

#include "vitprobe/error.hpp"
#include "vitprobe/random.hpp"
#include "vitprobe/text_io.hpp"

namespace vitprobe {

double PcaModel::explained_variance_ratio(std::size_t i) const {
  if (total_variance <= 0.0) return 0.0;
  return explained_variance.at(i) / total_variance;
}

namespace {

void orthogonalize(Vector& v, const Matrix& basis, Eigen::Index count) {
  for (Eigen::Index p = 0; p < count; ++p) {
    const auto row = basis.row(p).transpose();
    v -= row.dot(v) * row;
  }
}

void sign_normalize(Vector& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (std::abs(v[j]) > 1e-12 * scale) {
      if (v[j] < 0.0) v = -v;
      return;
    }
  }
}

// Unit vector orthogonal to the first `count` rows of `basis`, drawn from
// `start` or, when that collapses, from the standard basis.
Vector orthonormal_start(Vector start, const Matrix& basis, Eigen::Index count) {
  orthogonalize(start, basis, count);
  if (start.norm() > 1e-8) return start / start.norm();
  const Eigen::Index d = start.size();
  for (Eigen::Index j = 0; j < d; ++j) {
    Vector e = Vector::Unit(d, j);
    orthogonalize(e, basis, count);
    orthogonalize(e, basis, count);
    if (e.norm() > 1e-8) return e / e.norm();
  }
  raise(ErrorKind::NumericalError, "cannot find a direction orthogonal to previous components");
}

}  // namespace

PcaModel fit_pca(const Matrix& vectors, std::size_t k, const PowerIterationOptions& options) {
  const auto n = vectors.rows();
  const auto d = vectors.cols();
  if (n < 2) raise(ErrorKind::InsufficientData, "PCA needs at least 2 vectors, got " + std::to_string(n));
  if (k == 0 || static_cast<std::size_t>(d) < k) {
    raise(ErrorKind::DimensionError, "cannot extract " + std::to_string(k) + " components from dim " + std::to_string(d));
  }

  PcaModel model;
  model.mean = vectors.colwise().mean().transpose();
  const Matrix centered = vectors.rowwise() - model.mean.transpose();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  model.total_variance = cov.trace();
  model.components = Matrix::Zero(static_cast<Eigen::Index>(k), d);

  const double scale = std::max(cov.cwiseAbs().maxCoeff(), 1e-300);
  Rng rng(0x5eed);
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(k); ++c) {
    Vector start(d);
    for (Eigen::Index j = 0; j < d; ++j) start[j] = rng.normal();
    Vector v = orthonormal_start(std::move(start), model.components, c);
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
      Vector w = cov * v;
      orthogonalize(w, model.components, c);
      const double norm = w.norm();
      if (norm <= 1e-14 * scale) break;  // remaining spectrum is numerically zero
      w /= norm;
      const double change = (w - v).norm();
      v = std::move(w);
      if (change < options.tolerance) break;
    }
    sign_normalize(v);
    const double lambda = std::max(0.0, v.dot(cov * v));
    model.components.row(c) = v.transpose();
    model.explained_variance.push_back(lambda);
    cov -= lambda * v * v.transpose();
  }
  return model;
}

Matrix project(const PcaModel& model, const Matrix& vectors) {
  if (vectors.cols() != model.mean.size()) {
    raise(ErrorKind::DimensionError, "vectors have dim " + std::to_string(vectors.cols()) + ", PCA model expects " +
                                         std::to_string(model.mean.size()));
  }
  return (vectors.rowwise() - model.mean.transpose()) * model.components.transpose();
}

std::string export_scatter(const Matrix& coords, std::span<const ManifestRow> rows) {
  if (static_cast<std::size_t>(coords.rows()) != rows.size() || (coords.rows() > 0 && coords.cols() < 2)) {
    raise(ErrorKind::ShapeError, "scatter has " + std::to_string(coords.rows()) + " coordinate rows for " +
                                     std::to_string(rows.size()) + " images");
  }
  std::string out(kScatterHeader);
  out += '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out += std::to_string(rows[i].image_id) + ',' + format_double(coords(r, 0)) + ',' + format_double(coords(r, 1)) +
           ',' + std::to_string(rows[i].class_id.value) + ',' + (rows[i].venomous ? '1' : '0') + '\n';
  }
  return out;
}

std::vector<ScatterPoint> parse_scatter(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kScatterHeader) {
    raise(ErrorKind::ParseError, "line 1: expected header '" + std::string(kScatterHeader) + "'");
  }
  std::vector<ScatterPoint> points;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_fields(lines[i]);
    ScatterPoint p;
    std::int64_t cls = 0;
    if (f.size() != 5 || !parse_uint(f[0], p.image_id) || !parse_double(f[1], p.x) || !parse_double(f[2], p.y) ||
        !parse_int(f[3], cls) || (f[4] != "0" && f[4] != "1")) {
      raise(ErrorKind::ParseError, "line " + std::to_string(i + 1) + ": malformed scatter row");
    }
    p.class_id = ClassId{cls};
    p.venomous = f[4] == "1";
    points.push_back(p);
  }
  return points;
}

}  // namespace vitprobe
