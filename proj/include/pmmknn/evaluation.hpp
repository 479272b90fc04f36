#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "pmmknn/classifier.hpp"
#include "pmmknn/core.hpp"
#include "pmmknn/error.hpp"
#include "pmmknn/random.hpp"

namespace pmmknn {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t class_count = 0) : classes_(class_count), counts_(class_count * class_count) {}

  std::size_t class_count() const noexcept { return classes_; }
  std::size_t at(ClassIndex truth, ClassIndex predicted) const { return counts_[truth * classes_ + predicted]; }

  void add(ClassIndex truth, ClassIndex predicted) {
    if (truth >= classes_ || predicted >= classes_) {
      throw LabelError("label pair (" + std::to_string(truth) + ", " + std::to_string(predicted) +
                       ") outside class count " + std::to_string(classes_));
    }
    ++counts_[truth * classes_ + predicted];
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
    if (other.classes_ != classes_) throw DimensionError("confusion matrices have different class counts");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
  }

  std::size_t total() const {
    std::size_t sum = 0;
    for (auto c : counts_) sum += c;
    return sum;
  }

  std::size_t trace() const {
    std::size_t sum = 0;
    for (std::size_t c = 0; c < classes_; ++c) sum += at(c, c);
    return sum;
  }

  std::size_t row_total(ClassIndex c) const {
    std::size_t sum = 0;
    for (std::size_t p = 0; p < classes_; ++p) sum += at(c, p);
    return sum;
  }

  std::size_t column_total(ClassIndex c) const {
    std::size_t sum = 0;
    for (std::size_t t = 0; t < classes_; ++t) sum += at(t, c);
    return sum;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_;
  std::vector<std::size_t> counts_;
};

inline ConfusionMatrix confusion(std::span<const ClassIndex> truth, std::span<const ClassIndex> predicted,
                                 std::size_t class_count) {
  if (truth.size() != predicted.size()) throw DimensionError("label sequences differ in length");
  ConfusionMatrix cm(class_count);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

struct BinaryCounts {
  std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
};

/// Sensitivity TP/(TP+FN) and specificity TN/(FP+TN). A zero denominator
/// yields 0 with the matching *_undefined flag raised.
struct BinaryRates {
  double sensitivity = 0.0;
  double specificity = 0.0;
  bool sensitivity_undefined = false;
  bool specificity_undefined = false;
};

inline BinaryRates rates(const BinaryCounts& c) {
  BinaryRates r;
  if (c.tp + c.fn == 0) {
    r.sensitivity_undefined = true;
  } else {
    r.sensitivity = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (c.fp + c.tn == 0) {
    r.specificity_undefined = true;
  } else {
    r.specificity = static_cast<double>(c.tn) / static_cast<double>(c.fp + c.tn);
  }
  return r;
}

/// One-vs-rest binarization around the positive class.
inline BinaryCounts one_vs_rest(const ConfusionMatrix& cm, ClassIndex positive) {
  BinaryCounts c;
  c.tp = cm.at(positive, positive);
  c.fn = cm.row_total(positive) - c.tp;
  c.fp = cm.column_total(positive) - c.tp;
  c.tn = cm.total() - c.tp - c.fn - c.fp;
  return c;
}

inline BinaryRates sensitivity_specificity(const ConfusionMatrix& cm, ClassIndex positive) {
  if (positive >= cm.class_count()) throw LabelError("positive class out of range");
  return rates(one_vs_rest(cm, positive));
}

enum class Averaging { one_vs_rest, pairwise };

struct MetricReport {
  double accuracy = 0.0;
  double sensitivity = 0.0;  // macro average
  double specificity = 0.0;  // macro average
  std::vector<double> class_sensitivity;
  std::vector<double> class_specificity;
  // Binarizations whose sensitivity or specificity had a zero denominator.
  std::size_t undefined_cells = 0;
};

/// Accuracy and macro sensitivity/specificity. One-vs-rest averages over every
/// class; pairwise averages over every ordered pair (a, b), restricting the
/// matrix to true and predicted labels in {a, b}. Per-class vectors are only
/// filled for one-vs-rest.
inline MetricReport metric_report(const ConfusionMatrix& cm, Averaging averaging = Averaging::one_vs_rest) {
  MetricReport report;
  const std::size_t total = cm.total();
  report.accuracy = total == 0 ? 0.0 : static_cast<double>(cm.trace()) / static_cast<double>(total);
  const std::size_t k = cm.class_count();
  std::size_t cells = 0;
  auto accumulate = [&](const BinaryRates& r) {
    report.sensitivity += r.sensitivity;
    report.specificity += r.specificity;
    report.undefined_cells += (r.sensitivity_undefined || r.specificity_undefined) ? 1 : 0;
    ++cells;
  };
  if (averaging == Averaging::one_vs_rest) {
    for (ClassIndex c = 0; c < k; ++c) {
      const auto r = rates(one_vs_rest(cm, c));
      report.class_sensitivity.push_back(r.sensitivity);
      report.class_specificity.push_back(r.specificity);
      accumulate(r);
    }
  } else {
    for (ClassIndex a = 0; a < k; ++a) {
      for (ClassIndex b = 0; b < k; ++b) {
        if (a == b) continue;
        accumulate(rates(BinaryCounts{cm.at(a, a), cm.at(a, b), cm.at(b, a), cm.at(b, b)}));
      }
    }
  }
  if (cells > 0) {
    report.sensitivity /= static_cast<double>(cells);
    report.specificity /= static_cast<double>(cells);
  }
  return report;
}

/// Fold index per sample.
struct FoldPlan {
  std::vector<std::size_t> assignment;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  bool stratified = true;
  std::vector<std::string> warnings;

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] == fold) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] != fold) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> fold_sizes() const {
    std::vector<std::size_t> sizes(folds, 0);
    for (auto f : assignment) ++sizes[f];
    return sizes;
  }
};

/// Stratified k-fold split. Each class is shuffled with the seeded generator
/// and dealt round-robin; the deal continues where the previous class stopped
/// so overall fold sizes also differ by at most one. Classes with fewer samples
/// than folds cannot reach every fold and are reported in warnings.
inline FoldPlan stratified_kfold(const Dataset& data, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ParameterError("cross-validation needs at least 2 folds");
  if (folds > data.size()) {
    throw ParameterError("folds (" + std::to_string(folds) + ") exceed sample count (" + std::to_string(data.size()) +
                         ")");
  }
  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  plan.assignment.assign(data.size(), 0);
  Rng rng(seed);
  std::size_t next = 0;
  const auto by_class = detail::indices_by_class(data);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto members = by_class[c];
    if (!members.empty() && members.size() < folds) {
      plan.warnings.push_back("class '" + data.class_names()[c] + "' has " + std::to_string(members.size()) +
                              " samples, fewer than " + std::to_string(folds) + " folds; it is not stratified");
    }
    seeded_shuffle(std::span<std::size_t>(members), rng);
    for (auto i : members) {
      plan.assignment[i] = next;
      next = (next + 1) % folds;
    }
  }
  return plan;
}

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  ConfusionMatrix confusion;
  MetricReport metrics;
};

struct CvReport {
  // Unweighted means of the per-fold metrics.
  double accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  // Metrics of the confusion matrix pooled over all folds.
  MetricReport pooled;
  ConfusionMatrix confusion;
  std::vector<FoldResult> folds;
};

struct CvOptions {
  Averaging averaging = Averaging::one_vs_rest;
  // 0 picks the hardware concurrency.
  std::size_t threads = 1;
};

namespace detail {

inline std::size_t resolve_threads(std::size_t requested, std::size_t tasks) {
  std::size_t t = requested == 0 ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : requested;
  return std::max<std::size_t>(1, std::min(t, tasks));
}

// Runs task(i) for i in [0, count) on up to `threads` workers. Results are
// written by index, so completion order never affects them.
template <class Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
  threads = resolve_threads(threads, count);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct FoldSplit {
  Dataset train;
  Dataset test;
};

inline FoldSplit scaled_split(const Dataset& data, const FoldPlan& plan, std::size_t fold) {
  const auto train_idx = plan.train_indices(fold);
  const auto test_idx = plan.test_indices(fold);
  if (train_idx.empty() || test_idx.empty()) throw ParameterError("fold has an empty train or test split");
  const Dataset raw_train = data.subset(train_idx);
  const auto scaler = FeatureScaler::fit(raw_train);
  return {scaler.apply(raw_train), scaler.apply(data.subset(test_idx))};
}

inline void check_plan(const Dataset& data, const FoldPlan& plan) {
  if (plan.assignment.size() != data.size()) throw DimensionError("fold plan does not match dataset size");
  if (plan.folds < 2) throw ParameterError("fold plan needs at least 2 folds");
  for (auto f : plan.assignment) {
    if (f >= plan.folds) throw ParameterError("fold plan assigns an out-of-range fold");
  }
}

inline CvReport summarize(std::vector<FoldResult> folds, std::size_t class_count, Averaging averaging) {
  CvReport report;
  report.confusion = ConfusionMatrix(class_count);
  for (const auto& f : folds) {
    report.confusion += f.confusion;
    report.accuracy += f.metrics.accuracy;
    report.sensitivity += f.metrics.sensitivity;
    report.specificity += f.metrics.specificity;
  }
  const auto n = static_cast<double>(folds.size());
  report.accuracy /= n;
  report.sensitivity /= n;
  report.specificity /= n;
  report.pooled = metric_report(report.confusion, averaging);
  report.folds = std::move(folds);
  return report;
}

}  // namespace detail

/// For each fold: fit a min-max scaler and the model on the training split,
/// predict the held-out split and record its confusion matrix.
inline CvReport cross_validate(const Dataset& data, const ClassifierConfig& config, const FoldPlan& plan,
                               const CvOptions& options = {}) {
  detail::check_plan(data, plan);
  std::vector<FoldResult> results(plan.folds);
  detail::parallel_for(plan.folds, options.threads, [&](std::size_t fold) {
    try {
      auto split = detail::scaled_split(data, plan, fold);
      FoldResult r;
      r.fold = fold;
      r.train_size = split.train.size();
      r.test_size = split.test.size();
      r.confusion = ConfusionMatrix(data.class_count());
      const Model model = fit(config, std::move(split.train));
      for (std::size_t i = 0; i < split.test.size(); ++i) {
        r.confusion.add(split.test.label(i), predict_label(model, split.test.row(i)));
      }
      r.metrics = metric_report(r.confusion, options.averaging);
      results[fold] = std::move(r);
    } catch (const FoldError&) {
      throw;
    } catch (const std::exception& e) {
      throw FoldError(fold, e.what());
    }
  });
  return detail::summarize(std::move(results), data.class_count(), options.averaging);
}

struct TuneCell {
  std::size_t k = 0;
  std::size_t r = 0;
  CvReport report;
};

struct TuneResult {
  std::size_t best_k = 0;
  std::size_t best_r = 0;
  double best_accuracy = 0.0;
  std::vector<TuneCell> cells;  // ordered by k, then r

  const TuneCell& best() const {
    for (const auto& c : cells) {
      if (c.k == best_k && c.r == best_r) return c;
    }
    throw ParameterError("tune result has no best cell");
  }
};

struct TuneOptions {
  SupportScope scope = SupportScope::vector;
  Averaging averaging = Averaging::one_vs_rest;
  std::size_t threads = 1;
};

/// Exhaustive PMM-KNN search over (k, r) with r <= k, scored by fold-mean
/// accuracy; ties go to the smaller k, then the smaller r.
///
/// Each query's per-class neighbor lists are computed once for the largest k
/// and reused for every cell, and every ones-chain order of one k shares a single
/// elementary-symmetric recurrence. Predictions are bit-identical to running
/// cross_validate on each cell separately.
inline TuneResult grid_tune(const Dataset& data, std::vector<std::size_t> k_grid, std::vector<std::size_t> r_grid,
                            const FoldPlan& plan, const TuneOptions& options = {}) {
  detail::check_plan(data, plan);
  std::sort(k_grid.begin(), k_grid.end());
  k_grid.erase(std::unique(k_grid.begin(), k_grid.end()), k_grid.end());
  std::sort(r_grid.begin(), r_grid.end());
  r_grid.erase(std::unique(r_grid.begin(), r_grid.end()), r_grid.end());
  if (k_grid.empty() || r_grid.empty()) throw ParameterError("tuning grids must not be empty");
  if (k_grid.front() < 1 || r_grid.front() < 1) throw ParameterError("k and r must be >= 1");

  struct CellIndex {
    std::size_t k, r;
  };
  std::vector<CellIndex> cells;
  std::vector<std::vector<std::size_t>> orders_for_k(k_grid.size());
  std::vector<std::size_t> first_cell_for_k(k_grid.size());
  for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
    first_cell_for_k[ki] = cells.size();
    for (auto r : r_grid) {
      if (r <= k_grid[ki]) {
        cells.push_back({k_grid[ki], r});
        orders_for_k[ki].push_back(r);
      }
    }
  }
  if (cells.empty()) throw ParameterError("no (k, r) pair in the grid satisfies r <= k");
  const std::size_t k_max = k_grid.back();
  const std::size_t classes = data.class_count();
  const std::size_t d = data.dimensionality();

  // confusion[fold][cell]
  std::vector<std::vector<ConfusionMatrix>> confusion(plan.folds);
  detail::parallel_for(plan.folds, options.threads, [&](std::size_t fold) {
    try {
      auto split = detail::scaled_split(data, plan, fold);
      const Dataset& train = split.train;
      if (k_max > train.size()) {
        throw ParameterError("k must lie in [1, " + std::to_string(train.size()) + "], got " + std::to_string(k_max));
      }
      const auto members = detail::indices_by_class(train);
      for (std::size_t c = 0; c < classes; ++c) {
        if (members[c].empty()) throw ModelError("class '" + train.class_names()[c] + "' has no training samples");
      }
      auto& cms = confusion[fold];
      cms.assign(cells.size(), ConfusionMatrix(classes));

      std::vector<detail::ScoredIndex> scored;
      detail::CentroidWorkspace ws;
      std::vector<double> centroids;
      std::vector<std::size_t> orders;
      std::vector<double> distances(cells.size() * classes);
      for (std::size_t t = 0; t < split.test.size(); ++t) {
        const auto q = split.test.row(t);
        for (std::size_t c = 0; c < classes; ++c) {
          detail::nearest_of(train, members[c], q, k_max, scored);
          for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
            const std::size_t n = std::min(k_grid[ki], scored.size());
            detail::gather_rows(train, std::span(scored).first(n), ws.rows);
            orders.clear();
            for (auto r : orders_for_k[ki]) orders.push_back(std::min(r, n));
            centroids.resize(orders.size() * d);
            detail::ones_chain_centroids(ws.rows, n, d, options.scope, orders, centroids, ws);
            for (std::size_t o = 0; o < orders.size(); ++o) {
              const std::size_t cell = first_cell_for_k[ki] + o;
              distances[cell * classes + c] = euclidean_distance(q, std::span<const double>(centroids).subspan(o * d, d));
            }
          }
        }
        const ClassIndex truth = split.test.label(t);
        for (std::size_t cell = 0; cell < cells.size(); ++cell) {
          cms[cell].add(truth,
                        detail::argmin_lowest(std::span<const double>(distances).subspan(cell * classes, classes)));
        }
      }
    } catch (const FoldError&) {
      throw;
    } catch (const std::exception& e) {
      throw FoldError(fold, e.what());
    }
  });

  TuneResult result;
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    std::vector<FoldResult> folds(plan.folds);
    for (std::size_t f = 0; f < plan.folds; ++f) {
      folds[f].fold = f;
      folds[f].confusion = confusion[f][cell];
      folds[f].test_size = folds[f].confusion.total();
      folds[f].train_size = data.size() - folds[f].test_size;
      folds[f].metrics = metric_report(folds[f].confusion, options.averaging);
    }
    TuneCell tc{cells[cell].k, cells[cell].r, detail::summarize(std::move(folds), classes, options.averaging)};
    // cells are ordered by (k, r), so a strict improvement keeps the smaller pair on ties
    if (result.cells.empty() || tc.report.accuracy > result.best_accuracy) {
      result.best_k = tc.k;
      result.best_r = tc.r;
      result.best_accuracy = tc.report.accuracy;
    }
    result.cells.push_back(std::move(tc));
  }
  return result;
}

}  // namespace pmmknn
