#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmmknn/error.hpp"

namespace pmmknn {

using ClassIndex = std::size_t;

/// Euclidean distance between two equal-length vectors.
inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionError("euclidean_distance: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

// Squared distance without validation, for hot loops that already checked sizes.
inline double squared_distance_unchecked(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

struct SampleView {
  std::span<const double> features;
  ClassIndex label;
};

/// Immutable labeled feature matrix.
///
/// Features are stored row-major. Construction validates that every value is
/// finite, every label is below the class count and that there is at least one
/// sample and one feature. Classes may be empty (a label mapping can name a class
/// that never occurs); validate_dataset() reports those.
class Dataset {
 public:
  Dataset(std::vector<double> features, std::vector<ClassIndex> labels, std::size_t dimensionality,
          std::vector<std::string> class_names, std::vector<std::string> feature_names = {})
      : features_(std::move(features)),
        labels_(std::move(labels)),
        dimensionality_(dimensionality),
        class_names_(std::move(class_names)),
        feature_names_(std::move(feature_names)) {
    if (dimensionality_ == 0) throw DimensionError("dataset dimensionality must be >= 1");
    if (labels_.empty()) throw DimensionError("dataset must contain at least one sample");
    if (features_.size() != labels_.size() * dimensionality_) {
      throw DimensionError("dataset feature buffer holds " + std::to_string(features_.size()) +
                           " values, expected " + std::to_string(labels_.size() * dimensionality_));
    }
    if (class_names_.empty()) throw LabelError("dataset needs at least one class");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] >= class_names_.size()) {
        throw LabelError("sample " + std::to_string(i) + " has label " + std::to_string(labels_[i]) +
                         " but only " + std::to_string(class_names_.size()) + " classes exist");
      }
    }
    for (std::size_t i = 0; i < features_.size(); ++i) {
      if (!std::isfinite(features_[i])) {
        throw DomainError("non-finite feature at sample " + std::to_string(i / dimensionality_) +
                          ", column " + std::to_string(i % dimensionality_));
      }
    }
    if (feature_names_.empty()) {
      for (std::size_t j = 0; j < dimensionality_; ++j) feature_names_.push_back("f" + std::to_string(j));
    } else if (feature_names_.size() != dimensionality_) {
      throw DimensionError("feature_names length differs from dimensionality");
    }
  }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dimensionality() const noexcept { return dimensionality_; }
  std::size_t class_count() const noexcept { return class_names_.size(); }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dimensionality_, dimensionality_};
  }
  ClassIndex label(std::size_t i) const { return labels_[i]; }
  SampleView sample(std::size_t i) const { return {row(i), labels_[i]}; }

  std::span<const double> features() const noexcept { return features_; }
  std::span<const ClassIndex> labels() const noexcept { return labels_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(class_count(), 0);
    for (auto label : labels_) ++counts[label];
    return counts;
  }

  /// Rows at the given indices, in that order, keeping the class and feature names.
  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<double> features;
    std::vector<ClassIndex> labels;
    features.reserve(indices.size() * dimensionality_);
    labels.reserve(indices.size());
    for (auto i : indices) {
      auto r = row(i);
      features.insert(features.end(), r.begin(), r.end());
      labels.push_back(labels_[i]);
    }
    return Dataset(std::move(features), std::move(labels), dimensionality_, class_names_, feature_names_);
  }

 private:
  std::vector<double> features_;
  std::vector<ClassIndex> labels_;
  std::size_t dimensionality_;
  std::vector<std::string> class_names_;
  std::vector<std::string> feature_names_;
};

/// Per-feature min-max scaling into [0, 1], learned from training rows only.
///
/// Values outside the training range are clamped. Constant training features
/// map to 0 for every input.
class FeatureScaler {
 public:
  FeatureScaler(std::vector<double> min, std::vector<double> max) : min_(std::move(min)), max_(std::move(max)) {
    if (min_.size() != max_.size() || min_.empty()) throw DimensionError("scaler bounds length mismatch");
    for (std::size_t j = 0; j < min_.size(); ++j) {
      if (!(min_[j] <= max_[j])) throw ParameterError("scaler min exceeds max at feature " + std::to_string(j));
    }
  }

  static FeatureScaler fit(const Dataset& train) {
    const std::size_t d = train.dimensionality();
    std::vector<double> lo(train.row(0).begin(), train.row(0).end());
    std::vector<double> hi = lo;
    for (std::size_t i = 1; i < train.size(); ++i) {
      auto r = train.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        lo[j] = std::min(lo[j], r[j]);
        hi[j] = std::max(hi[j], r[j]);
      }
    }
    return FeatureScaler(std::move(lo), std::move(hi));
  }

  std::size_t size() const noexcept { return min_.size(); }
  const std::vector<double>& min() const noexcept { return min_; }
  const std::vector<double>& max() const noexcept { return max_; }

  void apply_into(std::span<const double> x, std::span<double> out) const {
    if (x.size() != min_.size() || out.size() != min_.size()) {
      throw DimensionError("scaler expects " + std::to_string(min_.size()) + " features, got " +
                           std::to_string(x.size()));
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double range = max_[j] - min_[j];
      if (range <= 0.0) {
        out[j] = 0.0;
        continue;
      }
      out[j] = std::clamp((x[j] - min_[j]) / range, 0.0, 1.0);
    }
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> out(x.size());
    apply_into(x, out);
    return out;
  }

  Dataset apply(const Dataset& data) const {
    std::vector<double> scaled(data.features().size());
    const std::size_t d = data.dimensionality();
    for (std::size_t i = 0; i < data.size(); ++i) {
      apply_into(data.row(i), std::span<double>(scaled.data() + i * d, d));
    }
    return Dataset(std::move(scaled), {data.labels().begin(), data.labels().end()}, d, data.class_names(),
                   data.feature_names());
  }

 private:
  std::vector<double> min_;
  std::vector<double> max_;
};

inline FeatureScaler fit_scaler(const Dataset& train) { return FeatureScaler::fit(train); }

inline std::vector<double> apply_scaler(const FeatureScaler& scaler, std::span<const double> x) {
  return scaler.apply(x);
}

}  // namespace pmmknn
