#pragma once

// Support-weighted aggregation operators: Power Average, Muirhead Mean and the
// Power Muirhead Mean (PMM).
//
// PMM evaluates the Muirhead permutation sum on support-weighted values
// b_i = w_i * a_i with w_i = n (1 + T_i) / sum_j (1 + T_j). The permutation sum
// sum_{sigma in S_n} prod_j b_{sigma(j)}^{p_j} is the permanent of the matrix
// A_ij = b_i^{p_j}, so three evaluators are offered:
//
//   * pmm_bruteforce_oracle  literal n! enumeration, n <= 10
//   * pmm_ryser              Ryser inclusion-exclusion, O(2^n n), n <= 20
//   * pmm_ones_chain         P = (1,..,1,0,..,0): the sum equals
//                            r! (n-r)! e_r(b), e_r computed by an O(n r) recurrence
//
// 0^0 is taken as 1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmmknn/error.hpp"

namespace pmmknn {

inline constexpr std::size_t kBruteforceMaxSize = 10;
inline constexpr std::size_t kRyserMaxSize = 20;

/// Exponent vector P of the Muirhead family. The sum of exponents must be
/// nonzero so that the outer root exists.
class ExponentVector {
 public:
  explicit ExponentVector(std::vector<double> exponents) : exponents_(std::move(exponents)) {
    if (exponents_.empty()) throw ParameterError("exponent vector must not be empty");
    for (double p : exponents_) {
      if (!std::isfinite(p)) throw ParameterError("exponents must be finite");
    }
    sum_ = std::accumulate(exponents_.begin(), exponents_.end(), 0.0);
    if (sum_ == 0.0) throw ParameterError("exponent sum must be nonzero");

    std::size_t ones = 0;
    while (ones < exponents_.size() && exponents_[ones] == 1.0) ++ones;
    bool zeros_after = std::all_of(exponents_.begin() + static_cast<std::ptrdiff_t>(ones), exponents_.end(),
                                   [](double p) { return p == 0.0; });
    if (ones >= 1 && zeros_after) ones_chain_ = ones;
  }

  /// r ones followed by n - r zeros.
  static ExponentVector ones_chain(std::size_t n, std::size_t r) {
    if (r < 1 || r > n) {
      throw ParameterError("ones-chain length " + std::to_string(r) + " outside [1, " + std::to_string(n) + "]");
    }
    std::vector<double> p(n, 0.0);
    std::fill_n(p.begin(), r, 1.0);
    return ExponentVector(std::move(p));
  }

  static ExponentVector uniform(std::size_t n, double value) { return ExponentVector(std::vector<double>(n, value)); }

  std::size_t size() const noexcept { return exponents_.size(); }
  double sum() const noexcept { return sum_; }
  std::span<const double> values() const noexcept { return exponents_; }
  double operator[](std::size_t j) const { return exponents_[j]; }

  bool is_ones_chain() const noexcept { return ones_chain_.has_value(); }
  std::optional<std::size_t> ones_chain_length() const noexcept { return ones_chain_; }
  bool has_negative() const noexcept {
    return std::any_of(exponents_.begin(), exponents_.end(), [](double p) { return p < 0.0; });
  }

  /// Leading n exponents; throws if their sum is zero.
  ExponentVector prefix(std::size_t n) const {
    if (n == 0 || n > exponents_.size()) throw ParameterError("exponent prefix length out of range");
    return ExponentVector(std::vector<double>(exponents_.begin(), exponents_.begin() + static_cast<std::ptrdiff_t>(n)));
  }

 private:
  std::vector<double> exponents_;
  double sum_ = 0.0;
  std::optional<std::size_t> ones_chain_;
};

/// Support of two items at distance d: 1 / (1 + d).
inline double inverse_distance_support(double distance) {
  if (!(distance >= 0.0) || !std::isfinite(distance)) {
    throw DomainError("support distance must be finite and nonnegative");
  }
  return 1.0 / (1.0 + distance);
}

template <class Item, class Distance>
double support_inverse_distance(const Item& a, const Item& b, Distance&& distance) {
  return inverse_distance_support(distance(a, b));
}

/// Pairwise supports of a collection, the support totals T_i and the power
/// weights w_i = n (1 + T_i) / sum_j (1 + T_j).
class SupportContext {
 public:
  /// Builds from a callable support(i, j) evaluated once per unordered pair i < j.
  template <class PairSupport>
  static SupportContext from_pairs(std::size_t n, PairSupport&& support) {
    if (n == 0) throw ParameterError("support context needs at least one value");
    SupportContext ctx;
    ctx.n_ = n;
    ctx.pairwise_.assign(n * n, 1.0);
    ctx.totals_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double s = support(i, j);
        if (!(s >= 0.0 && s <= 1.0)) throw DomainError("support values must lie in [0, 1]");
        ctx.pairwise_[i * n + j] = s;
        ctx.pairwise_[j * n + i] = s;
        ctx.totals_[i] += s;
        ctx.totals_[j] += s;
      }
    }
    ctx.compute_weights();
    return ctx;
  }

  /// Context in which every weight is exactly 1 (plain Muirhead Mean).
  static SupportContext uniform(std::size_t n) {
    if (n == 0) throw ParameterError("support context needs at least one value");
    SupportContext ctx;
    ctx.n_ = n;
    ctx.pairwise_.assign(n * n, 1.0);
    ctx.totals_.assign(n, static_cast<double>(n - 1));
    ctx.weights_.assign(n, 1.0);
    return ctx;
  }

  std::size_t size() const noexcept { return n_; }
  double support(std::size_t i, std::size_t j) const { return pairwise_[i * n_ + j]; }
  std::span<const double> totals() const noexcept { return totals_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  SupportContext() = default;

  void compute_weights() {
    double denom = 0.0;
    for (double t : totals_) denom += 1.0 + t;
    weights_.resize(n_);
    const auto n = static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) weights_[i] = n * (1.0 + totals_[i]) / denom;
  }

  std::size_t n_ = 0;
  std::vector<double> pairwise_;
  std::vector<double> totals_;
  std::vector<double> weights_;
};

template <class Item, class Support>
SupportContext build_support_context(std::span<const Item> items, Support&& support) {
  return SupportContext::from_pairs(items.size(),
                                    [&](std::size_t i, std::size_t j) { return support(items[i], items[j]); });
}

/// Scalar collection with the inverse-distance support on |a - b|.
inline SupportContext build_support_context(std::span<const double> values) {
  return build_support_context(values, [](double a, double b) { return inverse_distance_support(std::abs(a - b)); });
}

namespace detail {

inline void check_values(std::span<const double> values) {
  if (values.empty()) throw ParameterError("aggregation needs at least one value");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("aggregated values must be finite and nonnegative");
  }
}

inline void check_shapes(std::span<const double> values, const ExponentVector& p, const SupportContext& ctx) {
  check_values(values);
  if (p.size() != values.size()) {
    throw DimensionError("exponent vector length " + std::to_string(p.size()) + " differs from value count " +
                         std::to_string(values.size()));
  }
  if (ctx.size() != values.size()) throw DimensionError("support context size differs from value count");
}

inline void check_zero_domain(std::span<const double> values, const ExponentVector& p) {
  if (!p.has_negative()) return;
  if (std::any_of(values.begin(), values.end(), [](double v) { return v == 0.0; })) {
    throw DomainError("zero value combined with a negative exponent");
  }
}

// x^p with 0^0 = 1.
inline double power0(double x, double p) {
  if (p == 0.0) return 1.0;
  if (p == 1.0) return x;
  return std::pow(x, p);
}

inline long double factorial(std::size_t n) {
  long double f = 1.0L;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<long double>(i);
  return f;
}

inline double binomial(std::size_t n, std::size_t r) {
  if (r > n) return 0.0;
  r = std::min(r, n - r);
  double c = 1.0;
  for (std::size_t i = 1; i <= r; ++i) c = c * static_cast<double>(n - r + i) / static_cast<double>(i);
  return c;
}

// (sum / count)^(1 / exponent_sum), with the domain rules of the Muirhead root.
inline double muirhead_root(long double sum, long double count, double exponent_sum) {
  long double mean = sum / count;
  if (mean < 0.0L) mean = 0.0L;  // Ryser cancellation noise on a zero permanent
  if (mean == 0.0L) {
    if (exponent_sum < 0.0) throw DomainError("zero permutation sum under a negative root exponent");
    return 0.0;
  }
  return static_cast<double>(std::pow(mean, 1.0L / static_cast<long double>(exponent_sum)));
}

}  // namespace detail

/// b_i = w_i * a_i.
inline std::vector<double> weighted_values(std::span<const double> values, const SupportContext& ctx) {
  if (ctx.size() != values.size()) throw DimensionError("support context size differs from value count");
  std::vector<double> b(values.size());
  auto w = ctx.weights();
  for (std::size_t i = 0; i < values.size(); ++i) b[i] = w[i] * values[i];
  return b;
}

/// Permanent of a row-major n x n matrix by Ryser's formula, visiting column
/// subsets in Gray-code order so each step updates the row sums in O(n).
inline long double permanent_ryser(std::span<const double> matrix, std::size_t n) {
  if (matrix.size() != n * n) throw DimensionError("permanent_ryser: matrix is not n x n");
  if (n > kRyserMaxSize) throw SizeError("permanent_ryser supports n <= " + std::to_string(kRyserMaxSize));
  if (n == 0) return 1.0L;

  std::vector<long double> row_sums(n, 0.0L);
  long double total = 0.0L;
  std::uint64_t previous = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < subsets; ++step) {
    const std::uint64_t gray = step ^ (step >> 1);
    const std::uint64_t flipped = gray ^ previous;
    const auto column = static_cast<std::size_t>(std::countr_zero(flipped));
    const bool added = (gray & flipped) != 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long double a = matrix[i * n + column];
      row_sums[i] += added ? a : -a;
    }
    long double product = 1.0L;
    for (std::size_t i = 0; i < n; ++i) product *= row_sums[i];
    const bool negative = ((n - static_cast<std::size_t>(std::popcount(gray))) & 1U) != 0;
    total += negative ? -product : product;
    previous = gray;
  }
  return total;
}

/// Literal sum over all n! permutations of prod_j b_{sigma(j)}^{p_j}.
inline long double permutation_sum_bruteforce(std::span<const double> b, std::span<const double> p) {
  const std::size_t n = b.size();
  if (p.size() != n) throw DimensionError("permutation_sum_bruteforce: length mismatch");
  if (n > kBruteforceMaxSize) {
    throw SizeError("brute-force permutation sum supports n <= " + std::to_string(kBruteforceMaxSize));
  }
  std::vector<long double> power(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) power[i * n + j] = detail::power0(b[i], p[j]);
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  long double total = 0.0L;
  do {
    long double term = 1.0L;
    for (std::size_t j = 0; j < n; ++j) term *= power[perm[j] * n + j];
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

namespace detail {

// Whether the nonzero pattern of a row-major n x n matrix admits a perfect
// matching, i.e. whether some permutation has a product with no zero factor.
inline bool has_perfect_matching(std::span<const double> matrix, std::size_t n) {
  std::vector<std::size_t> row_of(n, n);
  std::vector<char> seen(n);
  auto augment = [&](auto&& self, std::size_t row) -> bool {
    for (std::size_t col = 0; col < n; ++col) {
      if (matrix[row * n + col] == 0.0 || seen[col]) continue;
      seen[col] = 1;
      if (row_of[col] == n || self(self, row_of[col])) {
        row_of[col] = row;
        return true;
      }
    }
    return false;
  };
  for (std::size_t row = 0; row < n; ++row) {
    std::fill(seen.begin(), seen.end(), 0);
    if (!augment(augment, row)) return false;
  }
  return true;
}

}  // namespace detail

/// Same sum as permutation_sum_bruteforce, as the permanent of A_ij = b_i^{p_j}.
/// Structurally zero permanents return exactly 0 instead of cancellation noise.
inline long double permutation_sum_ryser(std::span<const double> b, std::span<const double> p) {
  const std::size_t n = b.size();
  if (p.size() != n) throw DimensionError("permutation_sum_ryser: length mismatch");
  if (n > kRyserMaxSize) throw SizeError("Ryser evaluation supports n <= " + std::to_string(kRyserMaxSize));
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = detail::power0(b[i], p[j]);
  }
  if (!detail::has_perfect_matching(a, n)) return 0.0L;
  // Equilibrate rows and columns to a maximum of one; the permanent is
  // multilinear, so the scale factors multiply back out exactly.
  long double log_scale = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, a[i * n + j]);
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] /= m;
    log_scale += std::log(static_cast<long double>(m));
  }
  for (std::size_t j = 0; j < n; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, a[i * n + j]);
    for (std::size_t i = 0; i < n; ++i) a[i * n + j] /= m;
    log_scale += std::log(static_cast<long double>(m));
  }
  return permanent_ryser(a, n) * std::exp(log_scale);
}

/// Elementary symmetric polynomials e_0..e_max_order of values, written into out
/// (which must hold max_order + 1 entries).
inline void elementary_symmetric_into(std::span<const double> values, std::size_t max_order, std::span<double> out) {
  if (out.size() < max_order + 1) throw DimensionError("elementary_symmetric_into: output too small");
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(max_order + 1), 0.0);
  out[0] = 1.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t top = std::min(i + 1, max_order);
    for (std::size_t j = top; j >= 1; --j) out[j] += values[i] * out[j - 1];
  }
}

inline std::vector<double> elementary_symmetric(std::span<const double> values, std::size_t max_order) {
  std::vector<double> e(max_order + 1);
  elementary_symmetric_into(values, max_order, e);
  return e;
}

/// Maclaurin means (e_r(b) / C(n, r))^(1/r) of nonnegative b for several orders r
/// at once; out[o] receives the mean for orders[o]. scratch is resized as needed.
inline void maclaurin_means(std::span<const double> b, std::span<const std::size_t> orders, std::span<double> out,
                            std::vector<double>& scratch) {
  const std::size_t n = b.size();
  std::size_t max_order = 0;
  for (auto r : orders) {
    if (r < 1 || r > n) {
      throw ParameterError("ones-chain length " + std::to_string(r) + " outside [1, " + std::to_string(n) + "]");
    }
    max_order = std::max(max_order, r);
  }
  scratch.resize(max_order + 1);
  elementary_symmetric_into(b, max_order, scratch);
  for (std::size_t o = 0; o < orders.size(); ++o) {
    const std::size_t r = orders[o];
    const double mean = std::max(scratch[r], 0.0) / detail::binomial(n, r);
    out[o] = r == 1 ? mean : std::pow(mean, 1.0 / static_cast<double>(r));
  }
}

/// Power Average: sum_i (1 + T_i) a_i / sum_j (1 + T_j).
inline double power_average(std::span<const double> values, const SupportContext& ctx) {
  if (values.empty()) throw ParameterError("power_average needs at least one value");
  if (ctx.size() != values.size()) throw DimensionError("support context size differs from value count");
  auto t = ctx.totals();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += (1.0 + t[i]) * values[i];
    den += 1.0 + t[i];
  }
  return num / den;
}

/// PMM by literal permutation enumeration (n <= 10). Reference evaluator.
inline double pmm_bruteforce_oracle(std::span<const double> values, const ExponentVector& p,
                                    const SupportContext& ctx) {
  detail::check_shapes(values, p, ctx);
  if (values.size() > kBruteforceMaxSize) {
    throw SizeError("brute-force PMM supports n <= " + std::to_string(kBruteforceMaxSize));
  }
  detail::check_zero_domain(values, p);
  const auto b = weighted_values(values, ctx);
  return detail::muirhead_root(permutation_sum_bruteforce(b, p.values()), detail::factorial(b.size()), p.sum());
}

/// PMM through the permanent of A_ij = b_i^{p_j} (n <= 20).
inline double pmm_ryser(std::span<const double> values, const ExponentVector& p, const SupportContext& ctx) {
  detail::check_shapes(values, p, ctx);
  if (values.size() > kRyserMaxSize) throw SizeError("Ryser PMM supports n <= " + std::to_string(kRyserMaxSize));
  detail::check_zero_domain(values, p);
  const auto b = weighted_values(values, ctx);
  return detail::muirhead_root(permutation_sum_ryser(b, p.values()), detail::factorial(b.size()), p.sum());
}

/// PMM for the ones-chain exponent vector with r leading ones, any n.
inline double pmm_ones_chain(std::span<const double> values, std::size_t r, const SupportContext& ctx) {
  detail::check_values(values);
  if (ctx.size() != values.size()) throw DimensionError("support context size differs from value count");
  if (r < 1 || r > values.size()) {
    throw ParameterError("ones-chain length " + std::to_string(r) + " outside [1, " +
                         std::to_string(values.size()) + "]");
  }
  const auto b = weighted_values(values, ctx);
  double out = 0.0;
  std::vector<double> scratch;
  maclaurin_means(b, std::span<const std::size_t>(&r, 1), std::span<double>(&out, 1), scratch);
  return out;
}

enum class PmmStrategy { automatic, bruteforce, ryser, ones_chain };

/// Power Muirhead Mean. The automatic strategy takes the ones-chain recurrence
/// when P has that form and Ryser's formula otherwise.
inline double power_muirhead_mean(std::span<const double> values, const ExponentVector& p, const SupportContext& ctx,
                                  PmmStrategy strategy = PmmStrategy::automatic) {
  switch (strategy) {
    case PmmStrategy::bruteforce:
      return pmm_bruteforce_oracle(values, p, ctx);
    case PmmStrategy::ryser:
      return pmm_ryser(values, p, ctx);
    case PmmStrategy::ones_chain:
      if (!p.is_ones_chain()) throw ParameterError("exponent vector is not a ones chain");
      detail::check_shapes(values, p, ctx);
      return pmm_ones_chain(values, *p.ones_chain_length(), ctx);
    case PmmStrategy::automatic:
      break;
  }
  if (p.is_ones_chain()) {
    detail::check_shapes(values, p, ctx);
    return pmm_ones_chain(values, *p.ones_chain_length(), ctx);
  }
  return pmm_ryser(values, p, ctx);
}

/// Muirhead Mean: PMM with every weight equal to one.
inline double muirhead_mean(std::span<const double> values, const ExponentVector& p,
                            PmmStrategy strategy = PmmStrategy::automatic) {
  if (values.empty()) throw ParameterError("muirhead_mean needs at least one value");
  return power_muirhead_mean(values, p, SupportContext::uniform(values.size()), strategy);
}

}  // namespace pmmknn
