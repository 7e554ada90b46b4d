#pragma once

#include "edgebatch/model.hpp"
#include "edgebatch/rng.hpp"

namespace edgebatch {

/// Knobs for randomized scheduling problems used by certification, the
/// pruning benchmark and property tests.
struct RandomInstanceParams {
  int task_count = 8;
  int depth = 3;
  /// Bandwidth drawn log-uniformly over [bandwidth_lo, bandwidth_hi] so some
  /// instances are bandwidth-bound and others latency-bound.
  double bandwidth_lo_hz = 2.0e5;
  double bandwidth_hi_hz = 2.0e7;
  /// Probability of a tabulated (rather than linear) profile.
  double table_profile_prob = 0.25;
};

/// Fully random instance: random linear/tabulated profile, Rayleigh-style
/// SNRs, uniform deadlines/waiting times, uniform exit points.
Instance random_instance(RngStream& rng, const RandomInstanceParams& params);

/// Instance with experiment-default marks (20 MHz, 20 dB transmit SNR over
/// Rayleigh fading, deadlines U[0.5,2] s, uniform exits) and the default
/// synthetic profile at the given depth.
Instance benchmark_instance(RngStream& rng, int task_count, int depth);

}  // namespace edgebatch
