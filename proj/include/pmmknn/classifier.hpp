#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "pmmknn/aggregation.hpp"
#include "pmmknn/core.hpp"
#include "pmmknn/error.hpp"

namespace pmmknn {

// Which distances feed the support function when building a local centroid:
// full member vectors (one shared weight per member) or each feature alone.
enum class SupportScope { vector, per_dimension };

inline std::string to_string(SupportScope scope) { return scope == SupportScope::vector ? "vector" : "per-dim"; }

struct PmmKnnParams {
  std::size_t k = 5;
  // Ones-chain length; clamped to the neighborhood size for classes smaller than k.
  std::size_t r = 1;
  // General exponent vector of length k. Overrides r when set; neighborhoods
  // with n < k members use its first n entries.
  std::optional<std::vector<double>> exponents;
  SupportScope scope = SupportScope::vector;
};

struct KnnParams {
  std::size_t k = 5;
};

struct GnbParams {
  double variance_floor = 1e-9;
};

using ClassifierConfig = std::variant<PmmKnnParams, KnnParams, GnbParams>;

inline std::string classifier_name(const ClassifierConfig& config) {
  switch (config.index()) {
    case 0: return "pmm-knn";
    case 1: return "knn";
    default: return "gnb";
  }
}

/// The k nearest same-class training samples of a query.
struct Neighborhood {
  ClassIndex label = 0;
  std::vector<std::size_t> members;  // training indices, ascending distance then index
  std::vector<double> distances;
};

struct Prediction {
  ClassIndex label = 0;
  std::vector<double> centroid_distances;  // one per class
};

namespace detail {

struct ScoredIndex {
  double distance2;
  std::size_t index;

  friend bool operator<(const ScoredIndex& a, const ScoredIndex& b) {
    return a.distance2 < b.distance2 || (a.distance2 == b.distance2 && a.index < b.index);
  }
};

// The `limit` candidates nearest to q, sorted by (distance, index).
inline void nearest_of(const Dataset& train, std::span<const std::size_t> candidates, std::span<const double> q,
                       std::size_t limit, std::vector<ScoredIndex>& out) {
  const std::size_t d = train.dimensionality();
  out.clear();
  out.reserve(candidates.size());
  for (auto i : candidates) out.push_back({squared_distance_unchecked(q.data(), train.row(i).data(), d), i});
  limit = std::min(limit, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(limit), out.end());
  out.resize(limit);
}

inline void check_query(const Dataset& train, std::span<const double> q) {
  if (q.size() != train.dimensionality()) {
    throw DimensionError("query has " + std::to_string(q.size()) + " features, model expects " +
                         std::to_string(train.dimensionality()));
  }
}

struct CentroidWorkspace {
  std::vector<double> rows;
  std::vector<double> column;
  std::vector<double> weighted;
  std::vector<double> scratch;
  std::vector<double> out;
};

inline SupportContext vector_support(std::span<const double> rows, std::size_t n, std::size_t d) {
  return SupportContext::from_pairs(n, [&](std::size_t i, std::size_t j) {
    return inverse_distance_support(
        std::sqrt(squared_distance_unchecked(rows.data() + i * d, rows.data() + j * d, d)));
  });
}

// Ones-chain PMM centroids of n member rows (row-major, n x d) for each of the
// given orders. centroids receives orders.size() x d values.
inline void ones_chain_centroids(std::span<const double> rows, std::size_t n, std::size_t d, SupportScope scope,
                                 std::span<const std::size_t> orders, std::span<double> centroids,
                                 CentroidWorkspace& ws) {
  std::optional<SupportContext> shared;
  if (scope == SupportScope::vector) shared = vector_support(rows, n, d);
  ws.column.resize(n);
  ws.out.resize(orders.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) ws.column[i] = rows[i * d + j];
    std::optional<SupportContext> local;
    if (!shared) local = build_support_context(std::span<const double>(ws.column));
    auto w = (shared ? *shared : *local).weights();
    ws.weighted.resize(n);
    for (std::size_t i = 0; i < n; ++i) ws.weighted[i] = w[i] * ws.column[i];
    maclaurin_means(ws.weighted, orders, ws.out, ws.scratch);
    for (std::size_t o = 0; o < orders.size(); ++o) centroids[o * d + j] = ws.out[o];
  }
}

// General-exponent PMM centroid of n member rows.
inline void general_centroid(std::span<const double> rows, std::size_t n, std::size_t d, SupportScope scope,
                             const ExponentVector& p, std::span<double> centroid, CentroidWorkspace& ws) {
  std::optional<SupportContext> shared;
  if (scope == SupportScope::vector) shared = vector_support(rows, n, d);
  ws.column.resize(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) ws.column[i] = rows[i * d + j];
    std::optional<SupportContext> local;
    if (!shared) local = build_support_context(std::span<const double>(ws.column));
    centroid[j] = power_muirhead_mean(ws.column, p, shared ? *shared : *local);
  }
}

inline void gather_rows(const Dataset& train, std::span<const ScoredIndex> members, std::vector<double>& rows) {
  const std::size_t d = train.dimensionality();
  rows.resize(members.size() * d);
  for (std::size_t i = 0; i < members.size(); ++i) {
    auto r = train.row(members[i].index);
    std::copy(r.begin(), r.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
}

inline ClassIndex argmin_lowest(std::span<const double> values) {
  ClassIndex best = 0;
  for (std::size_t c = 1; c < values.size(); ++c) {
    if (values[c] < values[best]) best = c;
  }
  return best;
}

inline std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& data) {
  std::vector<std::vector<std::size_t>> by_class(data.class_count());
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data.label(i)].push_back(i);
  return by_class;
}

}  // namespace detail

/// Nearest-local-centroid classifier whose per-class centroids are Power
/// Muirhead Means of the query's k nearest same-class neighbors.
class PmmKnnModel {
 public:
  PmmKnnModel(Dataset train, PmmKnnParams params) : train_(std::move(train)), params_(std::move(params)) {
    const std::size_t n = train_.size();
    if (params_.k < 1 || params_.k > n) {
      throw ParameterError("k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(params_.k));
    }
    for (std::size_t i = 0; i < train_.features().size(); ++i) {
      if (train_.features()[i] < 0.0) {
        throw DomainError("PMM-KNN needs nonnegative training features; sample " +
                          std::to_string(i / train_.dimensionality()) + " has a negative value (scale first)");
      }
    }
    members_ = detail::indices_by_class(train_);
    for (std::size_t c = 0; c < members_.size(); ++c) {
      if (members_[c].empty()) throw ModelError("class '" + train_.class_names()[c] + "' has no training samples");
    }
    if (params_.exponents) {
      if (params_.exponents->size() != params_.k) {
        throw ParameterError("exponent vector length " + std::to_string(params_.exponents->size()) +
                             " must equal k = " + std::to_string(params_.k));
      }
      exponents_.emplace(*params_.exponents);
      for (const auto& m : members_) {
        prefixes_.try_emplace(std::min(params_.k, m.size()), exponents_->prefix(std::min(params_.k, m.size())));
      }
    } else if (params_.r < 1 || params_.r > params_.k) {
      throw ParameterError("ones-chain length r must lie in [1, k], got r=" + std::to_string(params_.r) +
                           ", k=" + std::to_string(params_.k));
    }
  }

  const Dataset& training_data() const noexcept { return train_; }
  const PmmKnnParams& params() const noexcept { return params_; }

  Neighborhood neighborhood(std::span<const double> q, ClassIndex c) const {
    detail::check_query(train_, q);
    if (c >= members_.size()) throw LabelError("class index out of range");
    std::vector<detail::ScoredIndex> scored;
    detail::nearest_of(train_, members_[c], q, params_.k, scored);
    Neighborhood hood;
    hood.label = c;
    for (const auto& s : scored) {
      hood.members.push_back(s.index);
      hood.distances.push_back(std::sqrt(s.distance2));
    }
    return hood;
  }

  /// Local PMM centroid of class c for query q.
  std::vector<double> centroid(std::span<const double> q, ClassIndex c) const {
    detail::check_query(train_, q);
    std::vector<detail::ScoredIndex> scored;
    detail::CentroidWorkspace ws;
    std::vector<double> out(train_.dimensionality());
    centroid_into(q, c, scored, ws, out);
    return out;
  }

  Prediction predict(std::span<const double> q) const {
    detail::check_query(train_, q);
    Prediction prediction;
    prediction.centroid_distances.resize(members_.size());
    std::vector<detail::ScoredIndex> scored;
    detail::CentroidWorkspace ws;
    std::vector<double> centroid(train_.dimensionality());
    for (ClassIndex c = 0; c < members_.size(); ++c) {
      centroid_into(q, c, scored, ws, centroid);
      prediction.centroid_distances[c] = euclidean_distance(q, centroid);
    }
    prediction.label = detail::argmin_lowest(prediction.centroid_distances);
    return prediction;
  }

 private:
  void centroid_into(std::span<const double> q, ClassIndex c, std::vector<detail::ScoredIndex>& scored,
                     detail::CentroidWorkspace& ws, std::span<double> out) const {
    const std::size_t d = train_.dimensionality();
    detail::nearest_of(train_, members_[c], q, params_.k, scored);
    detail::gather_rows(train_, scored, ws.rows);
    const std::size_t n = scored.size();
    if (exponents_) {
      detail::general_centroid(ws.rows, n, d, params_.scope, prefixes_.at(n), out, ws);
    } else {
      const std::size_t order = std::min(params_.r, n);
      detail::ones_chain_centroids(ws.rows, n, d, params_.scope, std::span<const std::size_t>(&order, 1), out, ws);
    }
  }

  Dataset train_;
  PmmKnnParams params_;
  std::vector<std::vector<std::size_t>> members_;
  std::optional<ExponentVector> exponents_;
  std::map<std::size_t, ExponentVector> prefixes_;
};

/// Majority vote among the k globally nearest training samples. Distance ties
/// go to the lower training index, vote ties to the lower class index.
class KnnModel {
 public:
  KnnModel(Dataset train, KnnParams params) : train_(std::move(train)), params_(params) {
    if (params_.k < 1 || params_.k > train_.size()) {
      throw ParameterError("k must lie in [1, " + std::to_string(train_.size()) + "], got " +
                           std::to_string(params_.k));
    }
    all_.resize(train_.size());
    std::iota(all_.begin(), all_.end(), std::size_t{0});
  }

  ClassIndex predict(std::span<const double> q) const {
    detail::check_query(train_, q);
    std::vector<detail::ScoredIndex> scored;
    detail::nearest_of(train_, all_, q, params_.k, scored);
    std::vector<std::size_t> votes(train_.class_count(), 0);
    for (const auto& s : scored) ++votes[train_.label(s.index)];
    ClassIndex best = 0;
    for (ClassIndex c = 1; c < votes.size(); ++c) {
      if (votes[c] > votes[best]) best = c;
    }
    return best;
  }

 private:
  Dataset train_;
  KnnParams params_;
  std::vector<std::size_t> all_;
};

/// Gaussian naive Bayes with per-class, per-feature maximum-likelihood variances
/// floored at a small constant. Classes without samples are never predicted.
class GaussianNbModel {
 public:
  GaussianNbModel(const Dataset& train, GnbParams params = {})
      : d_(train.dimensionality()), classes_(train.class_count()) {
    const auto counts = train.class_counts();
    means_.assign(classes_ * d_, 0.0);
    variances_.assign(classes_ * d_, 0.0);
    log_priors_.assign(classes_, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < train.size(); ++i) {
      auto r = train.row(i);
      const auto c = train.label(i);
      for (std::size_t j = 0; j < d_; ++j) means_[c * d_ + j] += r[j];
    }
    for (std::size_t c = 0; c < classes_; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < d_; ++j) means_[c * d_ + j] /= static_cast<double>(counts[c]);
      log_priors_[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(train.size()));
    }
    for (std::size_t i = 0; i < train.size(); ++i) {
      auto r = train.row(i);
      const auto c = train.label(i);
      for (std::size_t j = 0; j < d_; ++j) {
        const double diff = r[j] - means_[c * d_ + j];
        variances_[c * d_ + j] += diff * diff;
      }
    }
    for (std::size_t c = 0; c < classes_; ++c) {
      for (std::size_t j = 0; j < d_; ++j) {
        double& v = variances_[c * d_ + j];
        v = counts[c] == 0 ? 1.0 : v / static_cast<double>(counts[c]);
        v = std::max(v, params.variance_floor);
      }
    }
  }

  std::vector<double> log_posteriors(std::span<const double> q) const {
    if (q.size() != d_) throw DimensionError("query dimensionality differs from model");
    std::vector<double> scores(classes_);
    for (std::size_t c = 0; c < classes_; ++c) {
      double s = log_priors_[c];
      for (std::size_t j = 0; j < d_ && std::isfinite(s); ++j) {
        const double var = variances_[c * d_ + j];
        const double diff = q[j] - means_[c * d_ + j];
        s -= 0.5 * (std::log(2.0 * std::numbers::pi * var) + diff * diff / var);
      }
      scores[c] = s;
    }
    return scores;
  }

  ClassIndex predict(std::span<const double> q) const {
    const auto scores = log_posteriors(q);
    ClassIndex best = 0;
    for (ClassIndex c = 1; c < scores.size(); ++c) {
      if (scores[c] > scores[best]) best = c;
    }
    return best;
  }

 private:
  std::size_t d_;
  std::size_t classes_;
  std::vector<double> means_;
  std::vector<double> variances_;
  std::vector<double> log_priors_;
};

using Model = std::variant<PmmKnnModel, KnnModel, GaussianNbModel>;

inline Model fit(const ClassifierConfig& config, Dataset train) {
  return std::visit(
      [&](const auto& params) -> Model {
        using P = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<P, PmmKnnParams>) {
          return PmmKnnModel(std::move(train), params);
        } else if constexpr (std::is_same_v<P, KnnParams>) {
          return KnnModel(std::move(train), params);
        } else {
          return GaussianNbModel(train, params);
        }
      },
      config);
}

inline ClassIndex predict_label(const Model& model, std::span<const double> q) {
  return std::visit(
      [&](const auto& m) -> ClassIndex {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, PmmKnnModel>) {
          return m.predict(q).label;
        } else {
          return m.predict(q);
        }
      },
      model);
}

inline Prediction pmm_knn_predict(const PmmKnnModel& model, std::span<const double> q) { return model.predict(q); }

inline ClassIndex knn_predict(const Dataset& train, std::span<const double> q, std::size_t k) {
  return KnnModel(train, KnnParams{k}).predict(q);
}

inline ClassIndex gnb_fit_predict(const Dataset& train, std::span<const double> q) {
  return GaussianNbModel(train).predict(q);
}

}  // namespace pmmknn
