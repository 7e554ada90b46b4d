#include "edgebatch/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace edgebatch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

}  // namespace

std::uint64_t RngStream::derive_seed(std::uint64_t base_seed,
                                     std::string_view stream,
                                     std::uint64_t index) {
  std::uint64_t mixed = splitmix64(base_seed);
  mixed = splitmix64(mixed ^ fnv1a(stream));
  mixed = splitmix64(mixed ^ index);
  return mixed;
}

double RngStream::exponential(double mean) {
  if (mean <= 0.0) throw std::domain_error("exponential mean must be positive");
  // next_double() < 1, so the log argument stays positive
  return -mean * std::log(1.0 - next_double());
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::domain_error("bound must be positive");
  // rejection sampling keeps the draw unbiased
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t value;
  do {
    value = engine_();
  } while (value >= limit);
  return value % bound;
}

int RngStream::categorical(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::domain_error("categorical weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) throw std::domain_error("categorical weights must not all be zero");
  double draw = next_double() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    draw -= weights[i];
    if (draw < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace edgebatch
