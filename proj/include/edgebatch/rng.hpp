#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace edgebatch {

/// Named-stream seeding: every consumer derives its own engine from
/// (base seed, stream name, index), so adding a consumer never perturbs
/// another stream's draws. Distribution transforms are explicit inverse-CDF
/// forms so sequences do not depend on the standard library's
/// distribution implementations.
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::string_view stream,
            std::uint64_t index = 0)
      : engine_(derive_seed(base_seed, stream, index)) {}

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  double exponential(double mean);

  /// Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound);

  /// Index drawn from non-negative weights (at least one positive).
  int categorical(const std::vector<double>& weights);

 private:
  static std::uint64_t derive_seed(std::uint64_t base_seed,
                                   std::string_view stream,
                                   std::uint64_t index);
  std::mt19937_64 engine_;
};

}  // namespace edgebatch
