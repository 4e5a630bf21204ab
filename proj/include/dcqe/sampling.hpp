#pragma once

// Monte Carlo event generation and empirical estimation.
//
// Trials are split into fixed chunks of kSampleChunk consecutive trials.
// Chunk k draws from its own std::mt19937_64 seeded with
// derive_chunk_seed(seed, k), so the OpenMP kernels and the serial
// reference kernels produce identical logs for every thread count.

#include <cstdint>

#include "dcqe/probkit.hpp"

namespace dcqe {

inline constexpr std::uint64_t kSampleChunk = 1u << 16;

/// splitmix64 of seed + (chunk + 1) * golden ratio increment.
std::uint64_t derive_chunk_seed(std::uint64_t seed, std::uint64_t chunk) noexcept;

/// n i.i.d. draws from a validated joint. Zero-mass cells are never drawn.
EventLog sample_events(const JointDistribution& joint, std::uint64_t n, std::uint64_t seed);
EventLog sample_events_serial(const JointDistribution& joint, std::uint64_t n,
                              std::uint64_t seed);

/// Relative-frequency table carrying the log size. Throws EmptyLog.
JointDistribution estimate_from_events(const EventLog& log);
JointDistribution estimate_from_events_serial(const EventLog& log);

}  // namespace dcqe
