#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "pmmknn/core.hpp"
#include "pmmknn/random.hpp"

using namespace pmmknn;

namespace {

Dataset two_by_two() { return Dataset({0, 10, 2, 20}, {0, 1}, 2, {"a", "b"}); }

}  // namespace

TEST(EuclideanDistance, KnownValues) {
  EXPECT_DOUBLE_EQ(euclidean_distance(std::vector<double>{0, 0}, std::vector<double>{3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(euclidean_distance(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(euclidean_distance(std::vector<double>{1, 0}, std::vector<double>{0, 1}), std::sqrt(2.0));
}

TEST(EuclideanDistance, RejectsLengthMismatch) {
  EXPECT_THROW(euclidean_distance(std::vector<double>{1, 2}, std::vector<double>{1}), DimensionError);
  EXPECT_THROW(euclidean_distance(std::vector<double>{}, std::vector<double>{}), DimensionError);
}

TEST(EuclideanDistance, MetricAxiomsOnRandomTriples) {
  gen::Source src(7);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t d = src.index(1, 6);
    const auto a = src.reals(d, -5, 5), b = src.reals(d, -5, 5), c = src.reals(d, -5, 5);
    const double ab = euclidean_distance(a, b), ba = euclidean_distance(b, a);
    EXPECT_GE(ab, 0.0);
    EXPECT_EQ(ab, ba);
    EXPECT_EQ(euclidean_distance(a, a), 0.0);
    if (a != b) EXPECT_GT(ab, 0.0);
    EXPECT_LE(ab, euclidean_distance(a, c) + euclidean_distance(c, b) + 1e-12);
  }
}

TEST(Dataset, ValidatesConstruction) {
  EXPECT_THROW(Dataset({}, {}, 2, {"a"}), DimensionError);
  EXPECT_THROW(Dataset({1, 2, 3}, {0, 0}, 2, {"a"}), DimensionError);
  EXPECT_THROW(Dataset({1, 2}, {1}, 2, {"a"}), LabelError);
  EXPECT_THROW(Dataset({1, NAN}, {0}, 2, {"a"}), DomainError);
  EXPECT_THROW(Dataset({1, 2}, {0}, 0, {"a"}), DimensionError);
  EXPECT_THROW(Dataset({1, 2}, {0}, 2, {"a"}, {"x"}), DimensionError);
}

TEST(Dataset, AccessorsAndSubset) {
  const Dataset d({1, 2, 3, 4, 5, 6}, {0, 1, 1}, 2, {"a", "b"});
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.dimensionality(), 2u);
  EXPECT_EQ(d.class_counts(), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(d.row(1)[1], 4.0);
  EXPECT_EQ(d.feature_names(), (std::vector<std::string>{"f0", "f1"}));
  const std::vector<std::size_t> idx = {2, 0};
  const auto s = d.subset(idx);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.row(0)[0], 5.0);
  EXPECT_EQ(s.label(1), 0u);
  EXPECT_EQ(s.class_count(), 2u);
}

TEST(FeatureScaler, FitsPerFeatureBounds) {
  const auto one = FeatureScaler::fit(Dataset({5, -2}, {0}, 2, {"a"}));
  EXPECT_EQ(one.min(), (std::vector<double>{5, -2}));
  EXPECT_EQ(one.max(), (std::vector<double>{5, -2}));
  const auto two = fit_scaler(two_by_two());
  EXPECT_EQ(two.min(), (std::vector<double>{0, 10}));
  EXPECT_EQ(two.max(), (std::vector<double>{2, 20}));
}

TEST(FeatureScaler, AppliesAndClamps) {
  const FeatureScaler s({0}, {10});
  EXPECT_EQ(apply_scaler(s, std::vector<double>{5})[0], 0.5);
  EXPECT_EQ(apply_scaler(s, std::vector<double>{12})[0], 1.0);
  EXPECT_EQ(apply_scaler(s, std::vector<double>{-3})[0], 0.0);
  EXPECT_THROW(apply_scaler(s, std::vector<double>{1, 2}), DimensionError);
}

TEST(FeatureScaler, ConstantFeatureMapsToZero) {
  const auto s = FeatureScaler::fit(Dataset({7, 1, 7, 2, 7, 3}, {0, 0, 0}, 2, {"a"}));
  for (double x : {-100.0, 7.0, 8.0, 1e9}) EXPECT_EQ(s.apply(std::vector<double>{x, 2})[0], 0.0);
}

TEST(FeatureScaler, OutputAlwaysInUnitRange) {
  gen::Source src(11);
  for (int t = 0; t < 500; ++t) {
    const auto data = src.blobs(src.index(1, 20), src.index(1, 5), 2, 3.0);
    const auto s = FeatureScaler::fit(data);
    for (int q = 0; q < 10; ++q) {
      for (double v : s.apply(src.reals(data.dimensionality(), -20, 20))) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(FeatureScaler, IdempotentOnScaledTrainingData) {
  gen::Source src(12);
  for (int t = 0; t < 100; ++t) {
    const auto data = src.blobs(src.index(2, 30), src.index(1, 6), 3, 2.0);
    const auto once = FeatureScaler::fit(data).apply(data);
    const auto twice = FeatureScaler::fit(once).apply(once);
    for (std::size_t i = 0; i < once.features().size(); ++i) {
      EXPECT_NEAR(once.features()[i], twice.features()[i], 1e-12);
    }
  }
}

TEST(Random, SeededShuffleIsDeterministicPermutation) {
  std::vector<int> a(50), b(50);
  for (int i = 0; i < 50; ++i) a[i] = b[i] = i;
  Rng r1(3), r2(3);
  seeded_shuffle(std::span<int>(a), r1);
  seeded_shuffle(std::span<int>(b), r2);
  EXPECT_EQ(a, b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Random, UniformBelowStaysInRange) {
  Rng rng(5);
  for (std::uint64_t bound : {1ULL, 2ULL, 7ULL, 1000ULL}) {
    for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_below(rng, bound), bound);
  }
}
