// Evaluates the aggregation operators on a small collection with one outlier.

#include <iostream>
#include <vector>

#include "pmmknn/aggregation.hpp"

int main() {
  const std::vector<double> values = {0.30, 0.32, 0.35, 0.31, 0.95};
  const auto ctx = pmmknn::build_support_context(std::span<const double>(values));

  std::cout << "weights:";
  for (double w : ctx.weights()) std::cout << ' ' << w;
  std::cout << "\npower average:           " << pmmknn::power_average(values, ctx) << "\n";

  for (std::size_t r = 1; r <= values.size(); ++r) {
    const auto p = pmmknn::ExponentVector::ones_chain(values.size(), r);
    std::cout << "ones chain r=" << r << ": MM " << pmmknn::muirhead_mean(values, p) << "  PMM "
              << pmmknn::power_muirhead_mean(values, p, ctx) << "  (Ryser "
              << pmmknn::pmm_ryser(values, p, ctx) << ", brute force "
              << pmmknn::pmm_bruteforce_oracle(values, p, ctx) << ")\n";
  }

  const pmmknn::ExponentVector general({2.0, 0.5, 0.0, 0.0, 0.5});
  std::cout << "P=(2,0.5,0,0,0.5): PMM " << pmmknn::power_muirhead_mean(values, general, ctx) << "\n";
}
