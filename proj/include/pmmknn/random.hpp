#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace pmmknn {

// std::shuffle and the std distributions are implementation-defined; these
// helpers only rely on the mt19937_64 output sequence, which the standard pins
// down, so seeded results match across compilers.
using Rng = std::mt19937_64;

// Uniform integer in [0, bound). bound must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

// Uniform real in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void seeded_shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace pmmknn
