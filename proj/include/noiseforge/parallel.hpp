#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace noiseforge {

// Independent RNG stream derived from (master seed, stream index).
// SplitMix64 scrambling keeps streams decorrelated for consecutive indices.
uint64_t mix_seed(uint64_t master, uint64_t stream);
std::mt19937_64 rng_stream(uint64_t master, uint64_t stream);

// Worker-pool size: NOISE_FORGE_THREADS when set, hardware concurrency otherwise.
int worker_count();

// Runs fn(i) for i in [0, count) across the worker pool.  Results must be
// written to per-index slots by the caller; the iteration order is not
// observable, so outputs stay deterministic.
void parallel_for(int64_t count, const std::function<void(int64_t)>& fn);

}  // namespace noiseforge
