#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pmmknn/classifier.hpp"
#include "pmmknn/dataio.hpp"
#include "pmmknn/error.hpp"
#include "pmmknn/evaluation.hpp"

namespace pmmknn::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kReportSchema = "pmmknn.report/1";

/// Benchmark dataset identifiers, in reporting order.
inline constexpr std::array<std::string_view, 5> kDatasetIds = {"iris", "wbc", "digits", "satellite", "eeg"};

/// Invalid command-line configuration (exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class OutputFormat { json, csv, table };

inline std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
    default: return "table";
  }
}

inline OutputFormat parse_output_format(std::string_view s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  if (s == "table") return OutputFormat::table;
  throw UsageError("unknown output format '" + std::string(s) + "' (expected json, csv or table)");
}

inline SupportScope parse_scope(std::string_view s) {
  if (s == "vector") return SupportScope::vector;
  if (s == "per-dim") return SupportScope::per_dimension;
  throw UsageError("unknown support scope '" + std::string(s) + "' (expected vector or per-dim)");
}

inline std::string to_string(Averaging a) { return a == Averaging::one_vs_rest ? "one-vs-rest" : "pairwise"; }

inline Averaging parse_averaging(std::string_view s) {
  if (s == "one-vs-rest") return Averaging::one_vs_rest;
  if (s == "pairwise") return Averaging::pairwise;
  throw UsageError("unknown averaging '" + std::string(s) + "' (expected one-vs-rest or pairwise)");
}

struct RunConfig {
  std::string dataset = "iris";
  std::string variant;  // empty selects the manifest default
  std::vector<std::string> classifiers = {"pmm-knn", "knn", "gnb"};
  std::size_t k = 5;
  std::size_t r = 1;
  std::optional<std::vector<double>> p;  // overrides r
  std::optional<std::size_t> knn_k;      // KNN baseline k; defaults to k
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  SupportScope scope = SupportScope::vector;
  Averaging averaging = Averaging::one_vs_rest;
  OutputFormat output = OutputFormat::json;
  std::filesystem::path data_dir = "data";
  std::size_t threads = 1;
};

struct TuneGrid {
  std::vector<std::size_t> k = {3, 5, 7, 9, 11, 13, 15};
  std::vector<std::size_t> r = {1, 2, 3, 4, 5, 6, 7};
};

inline void validate(const RunConfig& c) {
  if (c.folds < 2) throw UsageError("--folds must be >= 2");
  if (c.k < 1) throw UsageError("--k must be >= 1");
  if (c.knn_k && *c.knn_k < 1) throw UsageError("--knn-k must be >= 1");
  if (c.p) {
    if (c.p->size() != c.k) {
      throw UsageError("--p has " + std::to_string(c.p->size()) + " entries, expected k = " + std::to_string(c.k));
    }
  } else {
    if (c.r < 1) throw UsageError("--r must be >= 1");
    if (c.r > c.k) throw UsageError("--r must not exceed --k");
  }
  if (c.classifiers.empty()) throw UsageError("--classifiers must name at least one classifier");
  for (const auto& name : c.classifiers) {
    if (name != "pmm-knn" && name != "knn" && name != "gnb") {
      throw UsageError("unknown classifier '" + name + "' (expected pmm-knn, knn or gnb)");
    }
  }
}

inline ClassifierConfig make_classifier(std::string_view name, const RunConfig& c) {
  if (name == "pmm-knn") return PmmKnnParams{.k = c.k, .r = c.r, .exponents = c.p, .scope = c.scope};
  if (name == "knn") return KnnParams{c.knn_k.value_or(c.k)};
  if (name == "gnb") return GnbParams{};
  throw UsageError("unknown classifier '" + std::string(name) + "'");
}

inline std::filesystem::path manifest_path(const RunConfig& c) {
  return c.data_dir / "manifests" / (c.dataset + ".manifest");
}

/// Resolves the dataset id to its manifest. Ids without a manifest in the data
/// directory are usage errors.
inline DatasetManifest resolve_manifest(const RunConfig& c) {
  const auto path = manifest_path(c);
  if (!std::filesystem::exists(path)) {
    std::string known;
    for (auto id : kDatasetIds) known += (known.empty() ? "" : ", ") + std::string(id);
    throw UsageError("unknown dataset '" + c.dataset + "': no manifest at " + path.string() + " (known: " + known +
                     ")");
  }
  auto manifest = load_manifest(path, c.variant);
  return manifest;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline Json confusion_json(const ConfusionMatrix& cm) {
  Json rows = Json::array();
  for (std::size_t t = 0; t < cm.class_count(); ++t) {
    Json row = Json::array();
    for (std::size_t p = 0; p < cm.class_count(); ++p) row.push_back(cm.at(t, p));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json metrics_json(const MetricReport& m) {
  Json j;
  j["accuracy"] = m.accuracy;
  j["sensitivity"] = m.sensitivity;
  j["specificity"] = m.specificity;
  j["class_sensitivity"] = m.class_sensitivity;
  j["class_specificity"] = m.class_specificity;
  j["undefined_cells"] = m.undefined_cells;
  return j;
}

inline Json params_json(const ClassifierConfig& config) {
  Json j = Json::object();
  if (const auto* p = std::get_if<PmmKnnParams>(&config)) {
    j["k"] = p->k;
    if (p->exponents) {
      j["p"] = *p->exponents;
    } else {
      j["r"] = p->r;
    }
    j["support_scope"] = to_string(p->scope);
    j["support"] = "inverse-distance";
  } else if (const auto* p = std::get_if<KnnParams>(&config)) {
    j["k"] = p->k;
  } else if (const auto* p = std::get_if<GnbParams>(&config)) {
    j["variance_floor"] = p->variance_floor;
  }
  return j;
}

inline Json cv_json(const ClassifierConfig& config, const CvReport& report) {
  Json j;
  j["classifier"] = classifier_name(config);
  j["params"] = params_json(config);
  j["accuracy"] = report.accuracy;
  j["sensitivity"] = report.sensitivity;
  j["specificity"] = report.specificity;
  j["pooled"] = metrics_json(report.pooled);
  j["confusion"] = confusion_json(report.confusion);
  Json folds = Json::array();
  for (const auto& f : report.folds) {
    Json fj;
    fj["fold"] = f.fold;
    fj["train_size"] = f.train_size;
    fj["test_size"] = f.test_size;
    fj["accuracy"] = f.metrics.accuracy;
    fj["sensitivity"] = f.metrics.sensitivity;
    fj["specificity"] = f.metrics.specificity;
    fj["undefined_cells"] = f.metrics.undefined_cells;
    fj["confusion"] = confusion_json(f.confusion);
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  return j;
}

inline Json dataset_json(const DatasetManifest& m, const Dataset& data) {
  Json j;
  j["id"] = m.name;
  j["variant"] = m.variant;
  j["samples"] = data.size();
  j["features"] = data.dimensionality();
  j["classes"] = data.class_count();
  j["class_names"] = data.class_names();
  j["class_counts"] = data.class_counts();
  j["source_url"] = m.source_url;
  j["note"] = m.note;
  return j;
}

inline Json plan_json(const FoldPlan& plan) {
  Json j;
  j["count"] = plan.folds;
  j["seed"] = plan.seed;
  j["stratified"] = plan.stratified;
  j["sizes"] = plan.fold_sizes();
  j["warnings"] = plan.warnings;
  return j;
}

inline Json config_json(const RunConfig& c, const DatasetManifest& m) {
  Json j;
  j["dataset"] = c.dataset;
  j["variant"] = m.variant;
  j["classifiers"] = c.classifiers;
  j["k"] = c.k;
  if (c.p) {
    j["p"] = *c.p;
  } else {
    j["r"] = c.r;
  }
  j["knn_k"] = c.knn_k.value_or(c.k);
  j["folds"] = c.folds;
  j["seed"] = c.seed;
  j["support_scope"] = to_string(c.scope);
  j["averaging"] = to_string(c.averaging);
  return j;
}

inline Json tune_cell_json(const TuneCell& cell) {
  Json j;
  j["k"] = cell.k;
  j["r"] = cell.r;
  j["accuracy"] = cell.report.accuracy;
  j["sensitivity"] = cell.report.sensitivity;
  j["specificity"] = cell.report.specificity;
  return j;
}

struct Loaded {
  DatasetManifest manifest;
  Dataset data;
  FoldPlan plan;
};

inline Loaded load(const RunConfig& c) {
  auto manifest = resolve_manifest(c);
  auto data = load_dataset(c.data_dir, manifest);
  auto plan = stratified_kfold(data, c.folds, c.seed);
  return {std::move(manifest), std::move(data), std::move(plan)};
}

}  // namespace detail

/// Cross-validates every requested classifier on one shared fold plan.
inline Json cmd_cv(const RunConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const auto loaded = detail::load(config);
  Json report;
  report["schema"] = kReportSchema;
  report["command"] = "cv";
  report["config"] = detail::config_json(config, loaded.manifest);
  report["dataset"] = detail::dataset_json(loaded.manifest, loaded.data);
  report["folds"] = detail::plan_json(loaded.plan);
  Json results = Json::array();
  const CvOptions options{config.averaging, config.threads};
  for (const auto& name : config.classifiers) {
    const auto classifier = make_classifier(name, config);
    results.push_back(detail::cv_json(classifier, cross_validate(loaded.data, classifier, loaded.plan, options)));
  }
  report["results"] = std::move(results);
  report["duration_seconds"] = detail::seconds_since(start);
  return report;
}

/// Grid search over (k, r) for PMM-KNN.
inline Json cmd_tune(const RunConfig& config, const TuneGrid& grid = {}) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const auto loaded = detail::load(config);
  const auto result = grid_tune(loaded.data, grid.k, grid.r, loaded.plan,
                                TuneOptions{config.scope, config.averaging, config.threads});
  Json report;
  report["schema"] = kReportSchema;
  report["command"] = "tune";
  auto cfg = detail::config_json(config, loaded.manifest);
  cfg["classifiers"] = {"pmm-knn"};
  cfg.erase("k");
  cfg.erase("r");
  cfg.erase("p");
  cfg.erase("knn_k");
  cfg["k_grid"] = grid.k;
  cfg["r_grid"] = grid.r;
  report["config"] = std::move(cfg);
  report["dataset"] = detail::dataset_json(loaded.manifest, loaded.data);
  report["folds"] = detail::plan_json(loaded.plan);
  report["best"] = detail::tune_cell_json(result.best());
  Json cells = Json::array();
  for (const auto& cell : result.cells) cells.push_back(detail::tune_cell_json(cell));
  report["cells"] = std::move(cells);
  report["duration_seconds"] = detail::seconds_since(start);
  return report;
}

struct ClassifyRow {
  std::size_t row = 0;
  ClassIndex label = 0;
  std::vector<double> centroid_distances;  // pmm-knn only
};

/// Trains the first requested classifier on the whole dataset and labels each
/// row of the query table. Query rows are scaled with the training bounds.
inline std::vector<ClassifyRow> classify_rows(const RunConfig& config, const Dataset& train, const RawTable& query) {
  const std::string& name = config.classifiers.front();
  const auto scaler = FeatureScaler::fit(train);
  const Model model = fit(make_classifier(name, config), scaler.apply(train));
  std::vector<ClassifyRow> out;
  std::vector<double> x(train.dimensionality());
  std::vector<double> scaled(train.dimensionality());
  for (std::size_t i = 0; i < query.rows.size(); ++i) {
    const auto& cells = query.rows[i];
    if (cells.size() != train.dimensionality()) {
      throw DimensionError("query row " + std::to_string(i + 1) + " has " + std::to_string(cells.size()) +
                           " values, expected " + std::to_string(train.dimensionality()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto v = pmmknn::detail::parse_real(cells[j]);
      if (!v) {
        throw ParseError("query row " + std::to_string(i + 1) + ", column " + std::to_string(j + 1) +
                         ": not a finite number: '" + cells[j] + "'");
      }
      x[j] = *v;
    }
    scaler.apply_into(x, scaled);
    ClassifyRow r{i, 0, {}};
    if (const auto* pmm = std::get_if<PmmKnnModel>(&model)) {
      auto prediction = pmm->predict(scaled);
      r.label = prediction.label;
      r.centroid_distances = std::move(prediction.centroid_distances);
    } else {
      r.label = predict_label(model, scaled);
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Predictions CSV for a query file; an empty query file yields empty output.
inline std::string cmd_classify(const RunConfig& config, const std::filesystem::path& query_path,
                                bool query_header = false, char delimiter = ',') {
  validate(config);
  const std::string text = pmmknn::detail::read_file(query_path);
  if (pmmknn::detail::trim(text).empty()) return {};
  const auto manifest = resolve_manifest(config);
  const auto train = load_dataset(config.data_dir, manifest);
  RawTable query;
  try {
    query = parse_csv(text, query_header, delimiter);
  } catch (const ParseError& e) {
    throw ParseError(query_path.string() + ": " + e.what());
  }
  const auto rows = classify_rows(config, train, query);
  std::ostringstream out;
  out << "row,label,class_index";
  const bool distances = config.classifiers.front() == "pmm-knn";
  if (distances) {
    for (const auto& name : train.class_names()) out << ",distance_" << name;
  }
  out << "\n";
  for (const auto& r : rows) {
    out << r.row << "," << train.class_names()[r.label] << "," << r.label;
    for (double d : r.centroid_distances) out << "," << pmmknn::detail::format_real(d);
    out << "\n";
  }
  return out.str();
}

/// Reference accuracy, sensitivity and specificity per dataset and classifier.
struct ReferenceMetrics {
  double accuracy, sensitivity, specificity;
};

inline std::optional<ReferenceMetrics> reference_metrics(std::string_view dataset, std::string_view classifier) {
  static const std::map<std::pair<std::string_view, std::string_view>, ReferenceMetrics> table = {
      {{"iris", "pmm-knn"}, {0.980, 0.970, 0.990}},      {{"iris", "gnb"}, {0.953, 0.946, 0.973}},
      {{"iris", "knn"}, {0.966, 0.957, 0.981}},          {{"wbc", "pmm-knn"}, {0.945, 0.963, 0.908}},
      {{"wbc", "gnb"}, {0.938, 0.959, 0.888}},           {{"wbc", "knn"}, {0.934, 0.961, 0.888}},
      {{"digits", "pmm-knn"}, {0.993, 0.999, 0.993}},    {{"digits", "gnb"}, {0.838, 0.834, 0.982}},
      {{"digits", "knn"}, {0.986, 0.986, 0.998}},        {{"satellite", "pmm-knn"}, {0.922, 0.899, 0.984}},
      {{"satellite", "gnb"}, {0.795, 0.784, 0.959}},     {{"satellite", "knn"}, {0.894, 0.868, 0.978}},
      {{"eeg", "pmm-knn"}, {0.978, 0.977, 0.982}},       {{"eeg", "gnb"}, {0.458, 0.942, 0.063}},
      {{"eeg", "knn"}, {0.941, 0.922, 0.956}},
  };
  const auto it = table.find({dataset, classifier});
  if (it == table.end()) return std::nullopt;
  return it->second;
}

struct BenchOptions {
  std::vector<std::string> datasets = {kDatasetIds.begin(), kDatasetIds.end()};
  TuneGrid grid;
};

/// Tunes PMM-KNN and cross-validates every classifier on each dataset. A dataset
/// that fails is recorded with its error and the rest still run.
inline Json cmd_bench_all(const RunConfig& config, const BenchOptions& options = {}) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  Json report;
  report["schema"] = kReportSchema;
  report["command"] = "bench-all";
  Json cfg;
  cfg["datasets"] = options.datasets;
  cfg["classifiers"] = config.classifiers;
  cfg["k_grid"] = options.grid.k;
  cfg["r_grid"] = options.grid.r;
  cfg["knn_k"] = config.knn_k.value_or(config.k);
  cfg["folds"] = config.folds;
  cfg["seed"] = config.seed;
  cfg["support_scope"] = to_string(config.scope);
  cfg["averaging"] = to_string(config.averaging);
  report["config"] = std::move(cfg);

  Json datasets = Json::array();
  std::size_t failures = 0;
  for (const auto& id : options.datasets) {
    Json entry;
    entry["id"] = id;
    const auto dataset_start = std::chrono::steady_clock::now();
    try {
      RunConfig c = config;
      c.dataset = id;
      c.variant.clear();
      const auto loaded = detail::load(c);
      entry["status"] = "ok";
      entry["dataset"] = detail::dataset_json(loaded.manifest, loaded.data);
      entry["folds"] = detail::plan_json(loaded.plan);
      Json results = Json::array();
      for (const auto& name : c.classifiers) {
        if (name == "pmm-knn") {
          const auto tuned = grid_tune(loaded.data, options.grid.k, options.grid.r, loaded.plan,
                                       TuneOptions{c.scope, c.averaging, c.threads});
          const auto& best = tuned.best();
          entry["tuning"] = {{"best_k", best.k}, {"best_r", best.r}, {"cells", tuned.cells.size()}};
          results.push_back(detail::cv_json(PmmKnnParams{.k = best.k, .r = best.r, .scope = c.scope}, best.report));
        } else {
          const auto classifier = make_classifier(name, c);
          results.push_back(detail::cv_json(
              classifier, cross_validate(loaded.data, classifier, loaded.plan, CvOptions{c.averaging, c.threads})));
        }
      }
      for (auto& result : results) {
        if (const auto ref = reference_metrics(id, result.at("classifier").get<std::string>())) {
          result["reference"] = {
              {"accuracy", ref->accuracy}, {"sensitivity", ref->sensitivity}, {"specificity", ref->specificity}};
        }
      }
      entry["results"] = std::move(results);
    } catch (const std::exception& e) {
      ++failures;
      entry["status"] = "error";
      entry["error"] = e.what();
    }
    entry["duration_seconds"] = detail::seconds_since(dataset_start);
    datasets.push_back(std::move(entry));
  }
  report["datasets"] = std::move(datasets);
  report["failures"] = failures;
  report["duration_seconds"] = detail::seconds_since(start);
  return report;
}

/// Copy of a report with every duration field removed, for byte comparisons.
inline Json without_durations(Json report) {
  if (report.is_object()) {
    report.erase("duration_seconds");
    for (auto& [key, value] : report.items()) value = without_durations(std::move(value));
  } else if (report.is_array()) {
    for (auto& value : report) value = without_durations(std::move(value));
  }
  return report;
}

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string number(const Json& v) { return v.dump(); }

inline std::string fixed(double v, int precision = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << v;
  return out.str();
}

// Dataset entries of a report: cv has one implicit entry, bench-all a list.
inline std::vector<Json> dataset_entries(const Json& report) {
  if (report.at("command") == "bench-all") return {report.at("datasets").begin(), report.at("datasets").end()};
  Json entry;
  entry["id"] = report.at("dataset").at("id");
  entry["status"] = "ok";
  entry["dataset"] = report.at("dataset");
  entry["results"] = report.at("results");
  return {entry};
}

inline std::string pad(std::string s, std::size_t width) {
  s.append(s.size() + 2 <= width ? width - s.size() : 2, ' ');
  return s;
}

}  // namespace detail

/// CSV rendering. cv and bench-all reports give one row per (dataset,
/// classifier, metric); tune reports give one row per grid cell.
inline std::string to_csv(const Json& report) {
  std::ostringstream out;
  if (report.at("command") == "tune") {
    out << "k,r,accuracy,sensitivity,specificity\n";
    for (const auto& cell : report.at("cells")) {
      out << cell.at("k").dump() << "," << cell.at("r").dump() << "," << detail::number(cell.at("accuracy")) << ","
          << detail::number(cell.at("sensitivity")) << "," << detail::number(cell.at("specificity")) << "\n";
    }
    return out.str();
  }
  out << "dataset,variant,classifier,metric,value,reference\n";
  for (const auto& entry : detail::dataset_entries(report)) {
    if (entry.at("status") != "ok") continue;
    const std::string id = entry.at("id");
    const std::string variant = entry.at("dataset").at("variant");
    for (const auto& result : entry.at("results")) {
      const std::string classifier = result.at("classifier");
      const auto ref = reference_metrics(id, classifier);
      const std::pair<const char*, std::optional<double>> metrics[] = {
          {"accuracy", ref ? std::optional(ref->accuracy) : std::nullopt},
          {"sensitivity", ref ? std::optional(ref->sensitivity) : std::nullopt},
          {"specificity", ref ? std::optional(ref->specificity) : std::nullopt}};
      for (const auto& [metric, reference] : metrics) {
        out << detail::csv_field(id) << "," << detail::csv_field(variant) << "," << classifier << "," << metric
            << "," << detail::number(result.at(metric)) << ",";
        if (reference && report.at("command") == "bench-all") out << detail::fixed(*reference, 3);
        out << "\n";
      }
    }
  }
  return out.str();
}

/// Human-readable table rendering of a report.
inline std::string to_table(const Json& report) {
  std::ostringstream out;
  const std::string command = report.at("command");
  if (command == "tune") {
    const auto& best = report.at("best");
    out << "dataset " << report.at("dataset").at("id").get<std::string>() << " ("
        << report.at("dataset").at("variant").get<std::string>() << "), " << report.at("folds").at("count").dump()
        << " folds, seed " << report.at("folds").at("seed").dump() << "\n";
    out << "best k=" << best.at("k").dump() << " r=" << best.at("r").dump()
        << "  accuracy " << detail::fixed(best.at("accuracy")) << "  sensitivity "
        << detail::fixed(best.at("sensitivity")) << "  specificity " << detail::fixed(best.at("specificity"))
        << "\n\n";
    out << "   k    r  accuracy  sensitivity  specificity\n";
    for (const auto& cell : report.at("cells")) {
      out << std::setw(4) << cell.at("k").get<std::size_t>() << std::setw(5) << cell.at("r").get<std::size_t>()
          << "  " << std::setw(8) << detail::fixed(cell.at("accuracy")) << "  " << std::setw(11)
          << detail::fixed(cell.at("sensitivity")) << "  " << std::setw(11) << detail::fixed(cell.at("specificity"))
          << "\n";
    }
    return out.str();
  }
  const bool bench = command == "bench-all";
  const auto params_of = [](const Json& result) {
    std::string params;
    for (const auto& [key, value] : result.at("params").items()) {
      if (key == "support") continue;
      params += (params.empty() ? "" : " ") + key + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
    }
    return params;
  };
  std::size_t params_width = 30;
  for (const auto& entry : detail::dataset_entries(report)) {
    if (entry.at("status") != "ok") continue;
    for (const auto& result : entry.at("results")) params_width = std::max(params_width, params_of(result).size() + 2);
  }
  out << detail::pad("dataset", 11) << detail::pad("classifier", 12) << detail::pad("params", params_width)
      << detail::pad("accuracy", bench ? 19 : 10) << detail::pad("sensitivity", bench ? 19 : 13)
      << "specificity\n";
  if (bench) out << detail::pad("", 23 + params_width) << "measured (reference)\n";
  for (const auto& entry : detail::dataset_entries(report)) {
    const std::string id = entry.at("id");
    if (entry.at("status") != "ok") {
      out << detail::pad(id, 11) << "error: " << entry.at("error").get<std::string>() << "\n";
      continue;
    }
    for (const auto& result : entry.at("results")) {
      const std::string classifier = result.at("classifier");
      out << detail::pad(id, 11) << detail::pad(classifier, 12) << detail::pad(params_of(result), params_width);
      const auto ref = bench ? reference_metrics(id, classifier) : std::nullopt;
      const double refs[] = {ref ? ref->accuracy : 0.0, ref ? ref->sensitivity : 0.0, ref ? ref->specificity : 0.0};
      const char* metrics[] = {"accuracy", "sensitivity", "specificity"};
      for (int m = 0; m < 3; ++m) {
        std::string cell = detail::fixed(result.at(metrics[m]));
        if (ref) cell += " (" + detail::fixed(refs[m], 3) + ")";
        out << (m < 2 ? detail::pad(cell, bench ? 19 : (m == 0 ? 10 : 13)) : cell);
      }
      out << "\n";
    }
  }
  return out.str();
}

inline std::string render(const Json& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::json: return report.dump(2) + "\n";
    case OutputFormat::csv: return to_csv(report);
    default: return to_table(report);
  }
}

}  // namespace pmmknn::cli
