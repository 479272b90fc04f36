// Cross-validates PMM-KNN, KNN and Gaussian naive Bayes on one dataset.
//
//   iris_cv [dataset-id] [k] [r]

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

#include "pmmknn/pmmknn.hpp"

int main(int argc, char** argv) {
  const std::string id = argc > 1 ? argv[1] : "iris";
  const std::size_t k = argc > 2 ? std::stoul(argv[2]) : 5;
  const std::size_t r = argc > 3 ? std::stoul(argv[3]) : 1;
  try {
    const std::filesystem::path data_dir = PMMKNN_DATA_DIR;
    const auto manifest = pmmknn::load_manifest(data_dir / "manifests" / (id + ".manifest"));
    const auto data = pmmknn::load_dataset(data_dir, manifest);
    const auto plan = pmmknn::stratified_kfold(data, 10, 42);

    std::cout << id << ": " << data.size() << " samples, " << data.dimensionality() << " features, "
              << data.class_count() << " classes\n";
    const pmmknn::ClassifierConfig configs[] = {pmmknn::PmmKnnParams{.k = k, .r = r}, pmmknn::KnnParams{k},
                                                pmmknn::GnbParams{}};
    for (const auto& config : configs) {
      const auto report = pmmknn::cross_validate(data, config, plan);
      std::cout << std::setw(8) << pmmknn::classifier_name(config) << std::fixed << std::setprecision(4)
                << "  accuracy " << report.accuracy << "  sensitivity " << report.sensitivity << "  specificity "
                << report.specificity << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
