#include "quapi/path_indexer.hpp"

#include <limits>

#include <fmt/format.h>

#include "quapi/errors.hpp"

namespace quapi {

std::uint64_t checked_power(std::uint64_t base, int exponent) {
    std::uint64_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (base != 0 && result > std::numeric_limits<std::uint64_t>::max() / base)
            throw CapacityError(std::numeric_limits<std::uint64_t>::max(),
                                fmt::format("{}^{} overflows 64-bit indexing", base, exponent));
        result *= base;
    }
    return result;
}

PathIndexer::PathIndexer(int dimension, int window)
    : dimension_(dimension), window_(window), size_(0) {
    if (dimension < 1) throw DomainError("path indexer dimension must be positive");
    if (window < 1) throw DomainError("path indexer window must be positive");
    size_ = checked_power(static_cast<std::uint64_t>(dimension), 2 * window);
}

std::uint64_t PathIndexer::encode(std::span<const int> tuple) const {
    if (tuple.size() != static_cast<std::size_t>(2 * window_))
        throw DomainError("path tuple length must be 2·window");
    std::uint64_t flat = 0;
    for (int digit : tuple) {
        if (digit < 0 || digit >= dimension_) throw DomainError("path digit out of range");
        flat = flat * static_cast<std::uint64_t>(dimension_) + static_cast<std::uint64_t>(digit);
    }
    return flat;
}

void PathIndexer::decode(std::uint64_t flat, std::span<int> tuple) const {
    if (tuple.size() != static_cast<std::size_t>(2 * window_))
        throw DomainError("path tuple length must be 2·window");
    if (flat >= size_) throw DomainError("flat path index out of range");
    const auto m = static_cast<std::uint64_t>(dimension_);
    for (std::size_t i = tuple.size(); i-- > 0;) {
        tuple[i] = static_cast<int>(flat % m);
        flat /= m;
    }
}

}  // namespace quapi
