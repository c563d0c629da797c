// path_indexer.hpp: flat addressing of forward/backward path segments

#pragma once

#include <cstdint>
#include <span>

namespace quapi {

/// Bijection between tuples (j₀⁺, j₀⁻, …, j_{W−1}⁺, j_{W−1}⁻), jᵢ^± ∈ [0, M),
/// and flat indices in [0, M^{2W}). The tuple is read as a base-M numeral
/// whose most significant digit is j₀⁺ (oldest time point first), so encode
/// is monotone in lexicographic tuple order. A time point contributes the
/// combined digit x = j⁺·M + j⁻ in base M².
class PathIndexer {
public:
    PathIndexer(int dimension, int window);

    int dimension() const noexcept { return dimension_; }
    int window() const noexcept { return window_; }
    std::uint64_t size() const noexcept { return size_; }

    /// `tuple` has 2·window entries.
    std::uint64_t encode(std::span<const int> tuple) const;
    void decode(std::uint64_t flat, std::span<int> tuple) const;

private:
    int dimension_;
    int window_;
    std::uint64_t size_;
};

/// base^exponent, throwing CapacityError on 64-bit overflow.
std::uint64_t checked_power(std::uint64_t base, int exponent);

}  // namespace quapi
