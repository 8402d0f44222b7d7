#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vitprobe/error.hpp"
#include "vitprobe/projection.hpp"
#include "vitprobe/random.hpp"

using namespace vitprobe;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::IoError;
}

// N x D data with axis scales `scales`, rotated by a random orthogonal matrix.
Matrix anisotropic(Rng& rng, Eigen::Index n, const std::vector<double>& scales) {
  const auto d = static_cast<Eigen::Index>(scales.size());
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.normal() * scales[static_cast<std::size_t>(j)] + 3.0 * j;
  return x * q.transpose();
}

oracle::Grid covariance(const Matrix& x) {
  const Vector mean = x.colwise().mean().transpose();
  const Matrix c = x.rowwise() - mean.transpose();
  const Matrix cov = c.transpose() * c / static_cast<double>(x.rows() - 1);
  oracle::Grid g(cov.rows(), std::vector<double>(cov.cols()));
  for (Eigen::Index i = 0; i < cov.rows(); ++i)
    for (Eigen::Index j = 0; j < cov.cols(); ++j) g[i][j] = cov(i, j);
  return g;
}

}  // namespace

TEST(Pca, RankOneLine) {
  Matrix x(5, 2);
  for (int t = 0; t < 5; ++t) {
    x(t, 0) = t;
    x(t, 1) = 2.0 * t;
  }
  const auto model = fit_pca(x, 1);
  EXPECT_NEAR(model.components(0, 0), 1.0 / std::sqrt(5.0), 1e-6);
  EXPECT_NEAR(model.components(0, 1), 2.0 / std::sqrt(5.0), 1e-6);
  EXPECT_NEAR(model.explained_variance_ratio(0), 1.0, 1e-9);
}

TEST(Pca, RankOneSignNormalized) {
  // Direction (-1, 3) is reported as (1, -3) / sqrt(10).
  Matrix x(7, 2);
  for (int t = 0; t < 7; ++t) {
    x(t, 0) = -0.5 * t + 4.0;
    x(t, 1) = 1.5 * t - 1.0;
  }
  const auto model = fit_pca(x, 2);
  EXPECT_NEAR(model.components(0, 0), 1.0 / std::sqrt(10.0), 1e-6);
  EXPECT_NEAR(model.components(0, 1), -3.0 / std::sqrt(10.0), 1e-6);
  EXPECT_NEAR(model.explained_variance_ratio(0), 1.0, 1e-9);
  EXPECT_NEAR(model.explained_variance[1], 0.0, 1e-9);
  EXPECT_NEAR(model.components.row(0).dot(model.components.row(1)), 0.0, 1e-9);
  EXPECT_NEAR(model.components.row(1).norm(), 1.0, 1e-9);
}

TEST(Pca, IsotropicVariance) {
  Rng rng(1);
  Matrix x(10000, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const auto model = fit_pca(x, 2);
  EXPECT_NEAR(model.explained_variance[0], 1.0, 0.1);
  EXPECT_NEAR(model.explained_variance[1], 1.0, 0.1);
  EXPECT_NEAR(model.total_variance, 3.0, 0.3);
}

TEST(Pca, MatchesJacobiOracle) {
  Rng rng(2);
  for (Eigen::Index d = 2; d <= 8; ++d) {
    std::vector<double> scales;
    for (Eigen::Index j = 0; j < d; ++j) scales.push_back(4.0 * std::pow(0.7, static_cast<double>(j)));
    const Matrix x = anisotropic(rng, 50, scales);
    const auto model = fit_pca(x, static_cast<std::size_t>(d));
    const auto [values, vectors] = oracle::jacobi_eigen(covariance(x));
    for (Eigen::Index c = 0; c < d; ++c) {
      EXPECT_NEAR(model.explained_variance[static_cast<std::size_t>(c)], values[static_cast<std::size_t>(c)], 1e-6);
      double dot = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) dot += model.components(c, j) * vectors[c][j];
      const double sign = dot < 0 ? -1.0 : 1.0;
      for (Eigen::Index j = 0; j < d; ++j) EXPECT_NEAR(model.components(c, j), sign * vectors[c][j], 1e-6) << d << c;
    }
  }
}

TEST(Pca, Invariants) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto d = static_cast<Eigen::Index>(2 + rng.below(7));
    std::vector<double> scales;
    for (Eigen::Index j = 0; j < d; ++j) scales.push_back(rng.uniform(0.1, 5.0));
    const Matrix x = anisotropic(rng, static_cast<Eigen::Index>(10 + rng.below(50)), scales);
    const auto model = fit_pca(x, 2);

    const Matrix gram = model.components * model.components.transpose();
    EXPECT_LE((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_GE(model.explained_variance[0], model.explained_variance[1] - 1e-9);
    EXPECT_GE(model.explained_variance[1], 0.0);
    EXPECT_LE(model.explained_variance_ratio(0) + model.explained_variance_ratio(1), 1.0 + 1e-9);

    for (Eigen::Index c = 0; c < 2; ++c) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (std::abs(model.components(c, j)) > 1e-12) {
          EXPECT_GT(model.components(c, j), 0.0);
          break;
        }
      }
    }

    const Matrix coords = project(model, x);
    EXPECT_LE(coords.colwise().mean().cwiseAbs().maxCoeff(), 1e-9);
    const Matrix at_mean = project(model, model.mean.transpose());
    EXPECT_LE(at_mean.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Pca, Deterministic) {
  Rng rng(4);
  const Matrix x = anisotropic(rng, 40, {3.0, 2.0, 1.0, 0.5});
  const auto a = fit_pca(x, 2);
  const auto b = fit_pca(x, 2);
  EXPECT_EQ(a.components, b.components);
  EXPECT_EQ(a.explained_variance, b.explained_variance);
}

TEST(Pca, Errors) {
  EXPECT_EQ(kind_of([] { fit_pca(Matrix::Ones(1, 4)); }), ErrorKind::InsufficientData);
  EXPECT_EQ(kind_of([] { fit_pca(Matrix::Ones(5, 1), 2); }), ErrorKind::DimensionError);
  const auto model = fit_pca(Matrix::Identity(3, 3), 2);
  EXPECT_EQ(kind_of([&] { project(model, Matrix::Ones(2, 4)); }), ErrorKind::DimensionError);
}

TEST(Pca, ConstantDataHasZeroVariance) {
  const auto model = fit_pca(Matrix::Constant(6, 3, 2.5), 2);
  EXPECT_EQ(model.total_variance, 0.0);
  EXPECT_EQ(model.explained_variance_ratio(0), 0.0);
  EXPECT_NEAR(model.components.row(0).norm(), 1.0, 1e-12);
}

TEST(Scatter, ExportParseRoundTrip) {
  const std::vector<ManifestRow> rows = {{1, 10, "a", ClassId{5}, true, Split::Train},
                                         {1, 11, "b", ClassId{5}, true, Split::Train},
                                         {2, 12, "c", ClassId{9}, false, Split::Test}};
  Matrix coords(3, 2);
  coords << 0.5, -1.25, 3.0, 0.1, -7.0, 1e-20;
  const auto csv = export_scatter(coords, rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "image_id,x,y,class_id,venomous");
  const auto points = parse_scatter(csv);
  ASSERT_EQ(points.size(), 3u);
  EXPECT_EQ(points[0], (ScatterPoint{10, 0.5, -1.25, ClassId{5}, true}));
  EXPECT_EQ(points[1].x, 3.0);
  EXPECT_EQ(points[1].y, 0.1);
  EXPECT_EQ(points[2], (ScatterPoint{12, -7.0, 1e-20, ClassId{9}, false}));
  EXPECT_EQ(kind_of([&] { export_scatter(Matrix::Zero(2, 2), rows); }), ErrorKind::ShapeError);
  EXPECT_EQ(kind_of([] { parse_scatter("x,y\n"); }), ErrorKind::ParseError);
}
