#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "pmmknn/classifier.hpp"

using namespace pmmknn;

namespace {

using Rows = std::vector<std::vector<double>>;

Dataset make(const Rows& rows, const std::vector<ClassIndex>& labels, std::size_t classes) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  std::vector<std::string> names;
  for (std::size_t c = 0; c < classes; ++c) names.push_back(std::string(1, static_cast<char>('A' + c)));
  return Dataset(std::move(flat), labels, rows.front().size(), names);
}

Rows rows_of(const Dataset& d) {
  Rows out;
  for (std::size_t i = 0; i < d.size(); ++i) out.emplace_back(d.row(i).begin(), d.row(i).end());
  return out;
}

}  // namespace

TEST(PmmKnn, TwoClassHandExample) {
  const auto train = make({{0, 0}, {0.2, 0}, {1, 1}, {0.8, 1}}, {0, 0, 1, 1}, 2);
  const PmmKnnModel model(train, {.k = 2, .r = 1});
  const std::vector<double> q = {0.1, 0.1};
  const auto p = pmm_knn_predict(model, q);
  EXPECT_EQ(p.label, 0u);
  ASSERT_EQ(p.centroid_distances.size(), 2u);
  EXPECT_LT(p.centroid_distances[0], 0.15);
  EXPECT_GT(p.centroid_distances[1], 1.1);
  // Two members give equal weights, so the r = 1 centroid is the plain mean.
  const auto c = model.centroid(q, 0);
  EXPECT_NEAR(c[0], 0.1, 1e-15);
  EXPECT_NEAR(c[1], 0.0, 1e-15);
}

TEST(PmmKnn, SingleSamplePerClassReproducesIt) {
  const auto train = make({{0.3, 0.7}, {0.9, 0.1}}, {0, 1}, 2);
  for (std::size_t r : {1u, 2u, 3u}) {
    const PmmKnnModel model(train, {.k = 2, .r = std::min<std::size_t>(r, 2)});
    const auto c = model.centroid(std::vector<double>{0.5, 0.5}, 1);
    EXPECT_DOUBLE_EQ(c[0], 0.9);
    EXPECT_DOUBLE_EQ(c[1], 0.1);
    EXPECT_EQ(model.predict(std::vector<double>{0.35, 0.6}).label, 0u);
  }
}

TEST(PmmKnn, KOneUsesNearestMemberPerClass) {
  gen::Source src(31);
  for (int t = 0; t < 100; ++t) {
    const auto train = src.blobs(30, 3, 3);
    const PmmKnnModel model(train, {.k = 1, .r = 1});
    const auto q = src.reals(3, -0.5, 1.5);
    const auto p = model.predict(q);
    for (ClassIndex c = 0; c < 3; ++c) {
      double best = INFINITY;
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (train.label(i) == c) best = std::min(best, euclidean_distance(train.row(i), q));
      }
      EXPECT_DOUBLE_EQ(p.centroid_distances[c], best);
    }
  }
}

TEST(PmmKnn, ExactTrainingPointWithKOne) {
  gen::Source src(32);
  const auto train = src.blobs(40, 4, 3, 1.0);
  const PmmKnnModel model(train, {.k = 1});
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto p = model.predict(train.row(i));
    EXPECT_EQ(p.centroid_distances[train.label(i)], 0.0);
    // Another class may also sit at distance zero only if rows coincide.
    EXPECT_EQ(p.centroid_distances[p.label], 0.0);
  }
}

TEST(PmmKnn, MatchesIndependentOracle) {
  gen::Source src(33);
  for (int t = 0; t < 150; ++t) {
    const std::size_t classes = src.index(2, 4);
    const auto train = src.blobs(src.index(classes, 40), src.index(1, 5), classes);
    const std::size_t k = src.index(1, std::min<std::size_t>(train.size(), 9));
    const std::size_t r = src.index(1, k);
    const PmmKnnModel model(train, {.k = k, .r = r});
    const auto x = rows_of(train);
    const std::vector<std::size_t> y(train.labels().begin(), train.labels().end());
    for (int qi = 0; qi < 5; ++qi) {
      const auto q = src.reals(train.dimensionality(), -0.5, 1.5);
      const auto got = model.predict(q);
      const auto want = oracle::pmm_knn(x, y, classes, q, k, r);
      for (std::size_t c = 0; c < classes; ++c) {
        EXPECT_NEAR(got.centroid_distances[c], want.distances[c], 1e-9 * (1 + want.distances[c]));
      }
      EXPECT_EQ(got.label, want.label);
    }
  }
}

TEST(PmmKnn, NeighborhoodOrderingAndTies) {
  // Three class-0 points equidistant from q: index order decides.
  const auto train = make({{2, 1}, {1, 2}, {0, 1}, {5, 5}}, {0, 0, 0, 1}, 2);
  const PmmKnnModel model(train, {.k = 2});
  const auto hood = model.neighborhood(std::vector<double>{1, 1}, 0);
  EXPECT_EQ(hood.members, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(hood.label, 0u);
  const auto far = model.neighborhood(std::vector<double>{1, 1}, 1);
  EXPECT_EQ(far.members, (std::vector<std::size_t>{3}));
  gen::Source src(34);
  const auto data = src.blobs(60, 2, 2);
  const PmmKnnModel m2(data, {.k = 7});
  for (int t = 0; t < 50; ++t) {
    const auto q = src.reals(2, 0, 1);
    for (ClassIndex c = 0; c < 2; ++c) {
      const auto h = m2.neighborhood(q, c);
      for (std::size_t i = 0; i < h.members.size(); ++i) {
        EXPECT_EQ(data.label(h.members[i]), c);
        if (i > 0) EXPECT_LE(h.distances[i - 1], h.distances[i]);
      }
    }
  }
}

TEST(PmmKnn, CentroidDistanceTieGoesToLowerClass) {
  const auto train = make({{0.0}, {1.0}}, {0, 1}, 2);
  const PmmKnnModel model(train, {.k = 1});
  EXPECT_EQ(model.predict(std::vector<double>{0.5}).label, 0u);
}

TEST(PmmKnn, ParameterAndModelErrors) {
  const auto train = make({{0.0}, {1.0}}, {0, 0}, 2);
  EXPECT_THROW(PmmKnnModel(train, {.k = 1}), ModelError);
  const auto ok = make({{0.0}, {1.0}}, {0, 1}, 2);
  EXPECT_THROW(PmmKnnModel(ok, {.k = 0}), ParameterError);
  EXPECT_THROW(PmmKnnModel(ok, {.k = 3}), ParameterError);
  EXPECT_THROW(PmmKnnModel(ok, {.k = 1, .r = 2}), ParameterError);
  EXPECT_THROW(PmmKnnModel(ok, {.k = 2, .exponents = std::vector<double>{1.0}}), ParameterError);
  const PmmKnnModel model(ok, {.k = 1});
  EXPECT_THROW(model.predict(std::vector<double>{1.0, 2.0}), DimensionError);
  const auto negative = make({{-0.5}, {1.0}}, {0, 1}, 2);
  EXPECT_THROW(PmmKnnModel(negative, {.k = 1}), DomainError);
}

TEST(PmmKnn, GeneralExponentsEqualOnesChainWhenShapeMatches) {
  gen::Source src(35);
  const auto train = src.blobs(50, 3, 3);
  const PmmKnnModel chain(train, {.k = 4, .r = 2});
  const PmmKnnModel general(train, {.k = 4, .exponents = std::vector<double>{1, 1, 0, 0}});
  for (int t = 0; t < 30; ++t) {
    const auto q = src.reals(3, 0, 1);
    const auto a = chain.predict(q), b = general.predict(q);
    EXPECT_EQ(a.label, b.label);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(a.centroid_distances[c], b.centroid_distances[c], 1e-9);
  }
}

TEST(PmmKnn, GeneralExponentsUsePrefixForSmallClasses) {
  const auto train = make({{0.1}, {0.2}, {0.4}, {0.9}}, {0, 0, 0, 1}, 2);
  const PmmKnnModel model(train, {.k = 3, .exponents = std::vector<double>{2, 1, 0}});
  const auto c1 = model.centroid(std::vector<double>{0.5}, 1);
  EXPECT_DOUBLE_EQ(c1[0], 0.9);
  const auto c0 = model.centroid(std::vector<double>{0.5}, 0);
  const std::vector<double> vals = {0.4, 0.2, 0.1};
  oracle::Matrix sup = oracle::scalar_supports(vals);
  EXPECT_NEAR(c0[0], oracle::pmm(vals, {2, 1, 0}, sup), 1e-12);
}

TEST(PmmKnn, PerDimensionScopeUsesScalarSupports) {
  const auto train = make({{0.0, 0.0}, {1.0, 0.5}, {0.5, 1.0}, {3, 3}}, {0, 0, 0, 1}, 2);
  const PmmKnnModel model(train, {.k = 3, .r = 2, .scope = SupportScope::per_dimension});
  const auto c = model.centroid(std::vector<double>{0, 0}, 0);
  const std::vector<double> f0 = {0.0, 1.0, 0.5}, f1 = {0.0, 0.5, 1.0};
  EXPECT_NEAR(c[0], oracle::maclaurin(oracle::weighted(f0, oracle::scalar_supports(f0)), 2), 1e-12);
  EXPECT_NEAR(c[1], oracle::maclaurin(oracle::weighted(f1, oracle::scalar_supports(f1)), 2), 1e-12);
}

TEST(PmmKnn, AgreesWithKnnOnSeparatedClusters) {
  gen::Source src(36);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> flat;
    std::vector<ClassIndex> labels;
    for (std::size_t i = 0; i < 20; ++i) {
      const ClassIndex c = i % 2;
      for (int j = 0; j < 2; ++j) flat.push_back(c * 10.0 + src.real(0, 1));
      labels.push_back(c);
    }
    const Dataset train(flat, labels, 2, {"a", "b"});
    const std::size_t k = src.index(1, 10);
    const PmmKnnModel pmm(train, {.k = k, .r = src.index(1, k)});
    const KnnModel knn(train, {k});
    for (int q = 0; q < 10; ++q) {
      const double base = src.chance(0.5) ? 0.0 : 10.0;
      const std::vector<double> x = {base + src.real(0, 1), base + src.real(0, 1)};
      EXPECT_EQ(pmm.predict(x).label, knn.predict(x));
    }
  }
}

TEST(PmmKnn, DeterministicAndFinite) {
  gen::Source src(37);
  const auto train = src.blobs(80, 4, 4);
  const PmmKnnModel model(train, {.k = 6, .r = 3});
  for (int t = 0; t < 30; ++t) {
    const auto q = src.reals(4, 0, 1);
    const auto a = model.predict(q), b = model.predict(q);
    EXPECT_EQ(a.label, b.label);
    EXPECT_EQ(a.centroid_distances, b.centroid_distances);
    EXPECT_EQ(a.centroid_distances.size(), 4u);
    for (double d : a.centroid_distances) EXPECT_TRUE(std::isfinite(d));
  }
}

TEST(Knn, SpecExamples) {
  const auto train = make({{0.0}, {0.1}, {0.3}, {0.35}}, {0, 0, 1, 1}, 2);
  EXPECT_EQ(knn_predict(train, std::vector<double>{0.3}, 1), 1u);
  EXPECT_EQ(knn_predict(train, std::vector<double>{0.05}, 3), 0u);  // neighbors A, A, B
  // Two neighbors, one per class: lower class index wins.
  const auto tie = make({{0.0}, {1.0}}, {1, 0}, 2);
  EXPECT_EQ(knn_predict(tie, std::vector<double>{0.4}, 2), 0u);
}

TEST(Knn, DistanceTieUsesLowerIndex) {
  const auto train = make({{1.0}, {-1.0}, {5.0}}, {1, 0, 0}, 2);
  EXPECT_EQ(knn_predict(train, std::vector<double>{0.0}, 1), 1u);
}

TEST(Knn, MatchesOracle) {
  gen::Source src(38);
  for (int t = 0; t < 100; ++t) {
    const auto train = src.blobs(src.index(3, 40), 3, 3);
    const auto x = rows_of(train);
    const std::vector<std::size_t> y(train.labels().begin(), train.labels().end());
    const std::size_t k = src.index(1, train.size());
    const KnnModel model(train, {k});
    for (int q = 0; q < 5; ++q) {
      const auto query = src.reals(3, 0, 1);
      EXPECT_EQ(model.predict(query), oracle::knn(x, y, 3, query, k));
    }
  }
}

TEST(Knn, RejectsBadK) {
  const auto train = make({{0.0}, {1.0}}, {0, 1}, 2);
  EXPECT_THROW(KnnModel(train, {0}), ParameterError);
  EXPECT_THROW(KnnModel(train, {3}), ParameterError);
}

TEST(GaussianNb, HandComputedLikelihoods) {
  const auto train = make({{0.0}, {0.1}, {1.0}, {1.1}}, {0, 0, 1, 1}, 2);
  const GaussianNbModel model(train);
  const auto lp = model.log_posteriors(std::vector<double>{0.05});
  // Both classes: prior 1/2, variance 0.0025; means 0.05 and 1.05.
  const double var = 0.0025;
  const double norm = std::log(0.5) - 0.5 * std::log(2 * std::numbers::pi * var);
  EXPECT_NEAR(lp[0], norm, 1e-9);
  EXPECT_NEAR(lp[1], norm - 0.5 * 1.0 / var, 1e-6);
  EXPECT_EQ(gnb_fit_predict(train, std::vector<double>{0.05}), 0u);
}

TEST(GaussianNb, SeparatedClassesAndTies) {
  const auto train = make({{-1.0}, {1.0}, {9.0}, {11.0}}, {0, 0, 1, 1}, 2);
  EXPECT_EQ(gnb_fit_predict(train, std::vector<double>{0.0}), 0u);
  EXPECT_EQ(gnb_fit_predict(train, std::vector<double>{10.0}), 1u);
  const auto same = make({{0.0}, {1.0}, {0.0}, {1.0}}, {0, 0, 1, 1}, 2);
  EXPECT_EQ(gnb_fit_predict(same, std::vector<double>{0.3}), 0u);
}

TEST(GaussianNb, ConstantFeatureSurvives) {
  const auto train = make({{1.0, 0.0}, {1.0, 0.2}, {1.0, 1.0}, {1.0, 1.2}}, {0, 0, 1, 1}, 2);
  const GaussianNbModel model(train);
  for (double v : model.log_posteriors(std::vector<double>{1.0, 0.1})) EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(model.predict(std::vector<double>{1.0, 0.1}), 0u);
  EXPECT_EQ(model.predict(std::vector<double>{1.0, 1.1}), 1u);
}

TEST(Classifier, ConfigDispatch) {
  const auto train = make({{0.0}, {0.1}, {1.0}, {1.1}}, {0, 0, 1, 1}, 2);
  for (const ClassifierConfig& config :
       {ClassifierConfig{PmmKnnParams{.k = 2}}, ClassifierConfig{KnnParams{1}}, ClassifierConfig{GnbParams{}}}) {
    const Model m = fit(config, train);
    EXPECT_EQ(predict_label(m, std::vector<double>{0.02}), 0u);
    EXPECT_EQ(predict_label(m, std::vector<double>{1.05}), 1u);
  }
  EXPECT_EQ(classifier_name(PmmKnnParams{}), "pmm-knn");
  EXPECT_EQ(classifier_name(KnnParams{}), "knn");
  EXPECT_EQ(classifier_name(GnbParams{}), "gnb");
  EXPECT_EQ(to_string(SupportScope::per_dimension), "per-dim");
}
