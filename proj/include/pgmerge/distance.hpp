#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace pgmerge {

/// Squared L2 distance. Accumulates in double so large dims do not lose
/// precision in float32 sums. Every call bumps the thread-local tally
/// readable via distance_call_count().
double l2_sqr(const float* a, const float* b, std::size_t dim) noexcept;

/// True Euclidean distance with dimension checking.
/// Throws UsageError on dimension mismatch.
double l2_distance(std::span<const float> a, std::span<const float> b);

/// Thread-local count of l2_sqr invocations on the calling thread.
/// Test oracle for NDC accounting; not used for any reported number.
std::uint64_t distance_call_count() noexcept;
void reset_distance_call_count() noexcept;

} // namespace pgmerge
