#pragma once

// Seeded random inputs for property tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pmmknn/core.hpp"

namespace gen {

class Source {
 public:
  explicit Source(std::uint64_t seed) : rng_(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::vector<double> reals(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = real(lo, hi);
    return v;
  }

  // Values in [0, 1] with an occasional exact zero or duplicate.
  std::vector<double> feature_values(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && chance(0.1)) {
        v[i] = v[index(0, i - 1)];
      } else {
        v[i] = chance(0.05) ? 0.0 : real(0.0, 1.0);
      }
    }
    return v;
  }

  // Exponents in [0, 3] with some exact zeros and a nonzero sum.
  std::vector<double> exponents(std::size_t n) {
    std::vector<double> p(n);
    double sum = 0.0;
    do {
      sum = 0.0;
      for (auto& x : p) {
        x = chance(0.25) ? 0.0 : real(0.0, 3.0);
        sum += x;
      }
    } while (sum == 0.0);
    return p;
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng_);
    return idx;
  }

  // Labeled dataset of nonnegative Gaussian-ish class blobs (noise reflected at
  // zero), every class non-empty.
  pmmknn::Dataset blobs(std::size_t n, std::size_t d, std::size_t classes, double spread = 0.3) {
    std::vector<double> centers = reals(classes * d, 0.0, 1.0);
    std::vector<double> features;
    std::vector<pmmknn::ClassIndex> labels;
    std::normal_distribution<double> noise(0.0, spread);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = i < classes ? i : index(0, classes - 1);
      for (std::size_t j = 0; j < d; ++j) features.push_back(std::fabs(centers[c * d + j] + noise(rng_)));
      labels.push_back(c);
    }
    std::vector<std::string> names;
    for (std::size_t c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
    return pmmknn::Dataset(std::move(features), std::move(labels), d, std::move(names));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen
