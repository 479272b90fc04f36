// pmmknn: cross-validation, tuning and classification harness.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmmknn/commands.hpp"

#ifndef PMMKNN_DEFAULT_DATA_DIR
#define PMMKNN_DEFAULT_DATA_DIR "data"
#endif

namespace {

namespace cli = pmmknn::cli;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Flags {
  cli::RunConfig config;
  std::string scope = "vector";
  std::string averaging = "one-vs-rest";
  std::string output = "json";
  std::string data_dir;
  std::vector<double> p;
  std::size_t knn_k = 0;
  cli::TuneGrid grid;
  std::vector<std::string> datasets = {cli::kDatasetIds.begin(), cli::kDatasetIds.end()};
  std::string query;
  bool query_header = false;
  std::string delimiter = ",";
};

std::string default_data_dir() {
  if (const char* env = std::getenv("PMMKNN_DATA_DIR"); env && *env) return env;
  return PMMKNN_DEFAULT_DATA_DIR;
}

void add_run_flags(CLI::App& app, Flags& f, bool model_flags) {
  app.add_option("--dataset", f.config.dataset, "Dataset id (iris, wbc, digits, satellite, eeg)")
      ->capture_default_str();
  app.add_option("--variant", f.config.variant, "Dataset variant (default: the manifest's first)");
  if (model_flags) {
    app.add_option("--classifiers", f.config.classifiers, "Comma list of pmm-knn, knn, gnb")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--k", f.config.k, "Neighbors per class (PMM-KNN) or in total (KNN)")->capture_default_str();
    app.add_option("--r", f.config.r, "Ones-chain length")->capture_default_str();
    app.add_option("--p", f.p, "Exponent vector of length k, comma separated (overrides --r)")->delimiter(',');
    app.add_option("--knn-k", f.knn_k, "Neighbors for the KNN baseline (default: --k)");
  }
  app.add_option("--folds", f.config.folds, "Cross-validation folds")->capture_default_str();
  app.add_option("--seed", f.config.seed, "Fold assignment seed")->capture_default_str();
  app.add_option("--support-scope", f.scope, "Support distances: vector or per-dim")->capture_default_str();
  app.add_option("--averaging", f.averaging, "Sensitivity/specificity averaging: one-vs-rest or pairwise")
      ->capture_default_str();
  app.add_option("--output", f.output, "Output format: json, csv or table")->capture_default_str();
  app.add_option("--data-dir", f.data_dir, "Directory holding manifests/ and dataset files")
      ->default_str(default_data_dir());
  app.add_option("--threads", f.config.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
}

void add_grid_flags(CLI::App& app, Flags& f) {
  app.add_option("--k-grid", f.grid.k, "Comma list of k values")->delimiter(',')->capture_default_str();
  app.add_option("--r-grid", f.grid.r, "Comma list of r values (pairs with r > k are skipped)")
      ->delimiter(',')
      ->capture_default_str();
}

cli::RunConfig resolve(Flags& f) {
  cli::RunConfig c = f.config;
  c.scope = cli::parse_scope(f.scope);
  c.averaging = cli::parse_averaging(f.averaging);
  c.output = cli::parse_output_format(f.output);
  c.data_dir = f.data_dir.empty() ? default_data_dir() : f.data_dir;
  if (!f.p.empty()) c.p = f.p;
  if (f.knn_k > 0) c.knn_k = f.knn_k;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PMM-KNN classifier benchmark harness"};
  app.require_subcommand(1);
  Flags f;

  auto* cv = app.add_subcommand("cv", "Cross-validate classifiers on one dataset with shared folds");
  add_run_flags(*cv, f, true);

  auto* tune = app.add_subcommand("tune", "Grid-search PMM-KNN (k, r) by cross-validated accuracy");
  add_run_flags(*tune, f, false);
  add_grid_flags(*tune, f);

  auto* classify = app.add_subcommand("classify", "Train on a dataset and label the rows of a query CSV");
  add_run_flags(*classify, f, true);
  classify->add_option("--query", f.query, "Query CSV of unlabeled feature rows")->required();
  classify->add_flag("--query-header", f.query_header, "Query file has a header row");
  classify->add_option("--delimiter", f.delimiter, "Query field delimiter")->capture_default_str();

  auto* bench = app.add_subcommand("bench-all", "Tune and cross-validate every classifier on every dataset");
  add_run_flags(*bench, f, true);
  add_grid_flags(*bench, f);
  bench->add_option("--datasets", f.datasets, "Comma list of dataset ids")->delimiter(',')->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    auto config = resolve(f);
    if (cv->parsed()) {
      std::cout << cli::render(cli::cmd_cv(config), config.output);
    } else if (tune->parsed()) {
      std::cout << cli::render(cli::cmd_tune(config, f.grid), config.output);
    } else if (classify->parsed()) {
      if (f.delimiter.size() != 1) throw cli::UsageError("--delimiter must be a single character");
      if (!classify->count("--classifiers")) config.classifiers = {"pmm-knn"};
      std::cout << cli::cmd_classify(config, f.query, f.query_header, f.delimiter[0]);
    } else if (bench->parsed()) {
      const auto report = cli::cmd_bench_all(config, cli::BenchOptions{f.datasets, f.grid});
      std::cout << cli::render(report, config.output);
      if (report.at("failures").get<std::size_t>() > 0) {
        for (const auto& entry : report.at("datasets")) {
          if (entry.at("status") != "ok") {
            std::cerr << "pmmknn: " << entry.at("id").get<std::string>() << ": "
                      << entry.at("error").get<std::string>() << "\n";
          }
        }
        return kExitFailure;
      }
    }
  } catch (const cli::UsageError& e) {
    std::cerr << "pmmknn: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pmmknn::ParameterError& e) {
    std::cerr << "pmmknn: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "pmmknn: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
