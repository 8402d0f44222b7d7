#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "vitprobe/error.hpp"
#include "vitprobe/inference.hpp"
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

std::vector<ClassIndex> indices(std::initializer_list<std::size_t> xs) {
  std::vector<ClassIndex> out;
  for (auto x : xs) out.push_back(ClassIndex{x});
  return out;
}

// Model whose logits are just the input vector (K = D).
LinearModel identity_model(std::size_t k) {
  LinearModel m(k, k);
  m.weights = Matrix::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  return m;
}

}  // namespace

TEST(PredictImage, Argmax) {
  const auto m = identity_model(3);
  const float x[] = {0.1f, 0.9f, 0.3f};
  EXPECT_EQ(predict_image(m, x), ClassIndex{1});
  const float tie[] = {1.0f, 1.0f, 0.0f};
  EXPECT_EQ(predict_image(m, tie), ClassIndex{0});
  const float wrong[] = {1.0f, 2.0f};
  EXPECT_EQ(kind_of([&] { predict_image(m, wrong); }), ErrorKind::DimensionError);
}

TEST(PredictImage, MatchesLinearScan) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto k = 1 + rng.below(8), d = 1 + rng.below(8);
    LinearModel m(k, d);
    for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights.data()[i] = rng.normal();
    for (Eigen::Index i = 0; i < m.bias.size(); ++i) m.bias[i] = rng.normal();
    std::vector<float> x(d);
    for (auto& v : x) v = static_cast<float>(rng.normal());

    std::size_t best = 0;
    double best_v = -1e300;
    for (std::size_t c = 0; c < k; ++c) {
      double s = m.bias[static_cast<Eigen::Index>(c)];
      for (std::size_t j = 0; j < d; ++j) s += m.weights(c, j) * static_cast<double>(x[j]);
      if (s > best_v) {
        best_v = s;
        best = c;
      }
    }
    EXPECT_EQ(predict_image(m, x), ClassIndex{best});
  }
}

TEST(Aggregate, Examples) {
  EXPECT_EQ(aggregate_observation(indices({3, 3, 5})), ClassIndex{3});
  EXPECT_EQ(aggregate_observation(indices({5, 3, 3, 5})), ClassIndex{5});
  EXPECT_EQ(aggregate_observation(indices({7})), ClassIndex{7});
  EXPECT_EQ(aggregate_observation(indices({1, 2, 2})), ClassIndex{2});
  EXPECT_EQ(kind_of([] { aggregate_observation({}); }), ErrorKind::EmptyObservation);
}

TEST(Aggregate, ExhaustiveAgainstOracle) {
  // Every list of length 1..5 over 4 classes.
  for (int len = 1; len <= 5; ++len) {
    int total = 1;
    for (int i = 0; i < len; ++i) total *= 4;
    for (int code = 0; code < total; ++code) {
      std::vector<int> xs;
      std::vector<ClassIndex> idx;
      for (int i = 0, c = code; i < len; ++i, c /= 4) {
        xs.push_back(c % 4);
        idx.push_back(ClassIndex{static_cast<std::size_t>(c % 4)});
      }
      const auto got = aggregate_observation(idx);
      ASSERT_EQ(got.value, static_cast<std::size_t>(oracle::mode_first_tie(xs)));
      ASSERT_NE(std::find(idx.begin(), idx.end(), got), idx.end());
    }
  }
}

TEST(Aggregate, PermutingTailOnlyMattersForTies) {
  Rng rng(2);
  for (int t = 0; t < 300; ++t) {
    std::vector<ClassIndex> xs;
    const auto n = 1 + rng.below(7);
    for (std::uint64_t i = 0; i < n; ++i) xs.push_back(ClassIndex{rng.below(3)});
    const auto base = aggregate_observation(xs);
    auto shuffled = xs;
    rng.shuffle(std::span(shuffled).subspan(1));
    EXPECT_EQ(aggregate_observation(shuffled), base);
  }
}

namespace {

// Five observations, one-hot 3-dim features, classes {12, 1754, 9000} -> indices
// 0, 1, 2. Logits equal the features, so each image predicts its hot coordinate.
// Hand-traced expectations:
//   obs 40: images [0], [0]         -> 0,0     -> 0 -> 12
//   obs 10: images [1], [2], [2]    -> 1,2,2   -> 2 -> 9000
//   obs 30: images [2], [1]         -> 2,1 tie -> first 2 -> 9000
//   obs 20: images [1]              -> 1       -> 1754
//   obs 50: images [0], [1], [1],[0] -> tie    -> first 0 -> 12
struct Fixture {
  Manifest manifest{std::vector<ManifestRow>{}};
  VectorStore features{3};
  ClassIndexMap map{{ClassId{12}, ClassId{1754}, ClassId{9000}}};
};

Fixture five_observations() {
  Fixture f;
  std::vector<ManifestRow> rows;
  ImageId img = 100;
  auto add = [&](ObservationId obs, std::size_t hot, std::int64_t truth) {
    rows.push_back({obs, img, "x.jpg", ClassId{truth}, false, Split::Test});
    float v[3] = {0.0f, 0.0f, 0.0f};
    v[hot] = 1.0f;
    f.features.add(img, v);
    ++img;
  };
  add(40, 0, 12);
  add(40, 0, 12);
  add(10, 1, 9000);
  add(10, 2, 9000);
  add(10, 2, 9000);
  add(30, 2, 1754);
  add(30, 1, 1754);
  add(20, 1, 1754);
  add(50, 0, 12);
  add(50, 1, 12);
  add(50, 1, 12);
  add(50, 0, 12);
  // A train observation that must not appear in the submission.
  rows.push_back({60, img, "t.jpg", ClassId{12}, false, Split::Train});
  f.manifest = Manifest(rows);
  return f;
}

}  // namespace

TEST(PredictObservations, HandTracedFixture) {
  const auto f = five_observations();
  const auto sub = predict_observations(identity_model(3), f.features, f.manifest, f.map);
  const Submission expected{{{10, ClassId{9000}}, {20, ClassId{1754}}, {30, ClassId{9000}}, {40, ClassId{12}},
                             {50, ClassId{12}}}};
  EXPECT_EQ(sub, expected);
  EXPECT_NO_THROW(check_submission_labels(sub, f.map));
}

TEST(PredictObservations, EmitsSpeciesIdNotIndex) {
  std::vector<ManifestRow> rows = {{1, 1, "a", ClassId{1754}, false, Split::Test}};
  VectorStore features(2);
  const float v[] = {0.0f, 1.0f};
  features.add(1, v);
  const ClassIndexMap map({ClassId{12}, ClassId{1754}});
  const auto sub = predict_observations(identity_model(2), features, Manifest(rows), map);
  ASSERT_EQ(sub.rows.size(), 1u);
  EXPECT_EQ(sub.rows[0].class_id, ClassId{1754});
  EXPECT_NE(sub.rows[0].class_id, ClassId{1});
}

TEST(PredictObservations, SingleImageMatchesPredictImage) {
  Rng rng(3);
  LinearModel m(4, 3);
  for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights.data()[i] = rng.normal();
  const ClassIndexMap map({ClassId{2}, ClassId{3}, ClassId{5}, ClassId{7}});
  VectorStore features(3);
  const float v[] = {0.3f, -1.0f, 2.0f};
  features.add(9, v);
  const Manifest manifest({{1, 9, "a", ClassId{5}, true, Split::Test}});
  const auto sub = predict_observations(m, features, manifest, map);
  EXPECT_EQ(sub.rows[0].class_id, map.to_class(predict_image(m, v)));
}

TEST(PredictObservations, Errors) {
  auto f = five_observations();
  VectorStore partial(3);
  partial.add(f.features.id(0), f.features.values(0));
  EXPECT_EQ(kind_of([&] { predict_observations(identity_model(3), partial, f.manifest, f.map); }),
            ErrorKind::MissingFeature);
  EXPECT_EQ(kind_of([&] { predict_observations(identity_model(2), f.features, f.manifest, f.map); }),
            ErrorKind::LabelRangeError);
}

TEST(CheckSubmissionLabels, RejectsRawIndices) {
  const ClassIndexMap map({ClassId{12}, ClassId{1754}});
  const Submission raw{{{1, ClassId{1}}}};
  EXPECT_EQ(kind_of([&] { check_submission_labels(raw, map); }), ErrorKind::LabelRangeError);
}

TEST(SubmissionCsv, RoundTripAndErrors) {
  const Submission s{{{3, ClassId{1754}}, {9, ClassId{-2}}}};
  EXPECT_EQ(write_submission(s), "observation_id,class_id\n3,1754\n9,-2\n");
  EXPECT_EQ(parse_submission(write_submission(s)), s);
  EXPECT_EQ(write_submission({}), "observation_id,class_id\n");
  EXPECT_TRUE(parse_submission("observation_id,class_id\n").rows.empty());
  EXPECT_EQ(kind_of([] { parse_submission("observation_id,class_id\n1,2\n1,3\n"); }),
            ErrorKind::DuplicateObservation);
  EXPECT_EQ(kind_of([] { parse_submission("observation_id,class_id\n1,x\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse_submission("obs,class\n"); }), ErrorKind::ParseError);
}
