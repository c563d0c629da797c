#include <cstdlib>
#include <string>

#include "quapi/errors.hpp"
#include "quapi/kernels.hpp"

namespace quapi::kernels {

#if defined(QUAPI_BUILD_AVX2)
namespace detail {
const KernelSet& avx2_set();
}
#endif

const KernelSet* avx2() {
#if defined(QUAPI_BUILD_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &detail::avx2_set() : nullptr;
#else
    return nullptr;
#endif
}

std::vector<const KernelSet*> available() {
    std::vector<const KernelSet*> sets{&scalar()};
    if (const KernelSet* k = avx2()) sets.push_back(k);
    return sets;
}

const KernelSet& by_name(std::string_view name) {
    if (name == "auto") {
        const KernelSet* k = avx2();
        return k ? *k : scalar();
    }
    if (name == "scalar") return scalar();
    if (name == "avx2") {
        if (const KernelSet* k = avx2()) return *k;
        throw DomainError("avx2 kernels are not available on this machine");
    }
    throw DomainError("unknown kernel variant '" + std::string(name) + "'");
}

const KernelSet& best() {
    static const KernelSet& chosen = [] () -> const KernelSet& {
        const char* env = std::getenv("QUAPI_KERNEL");
        return by_name(env && *env ? env : "auto");
    }();
    return chosen;
}

}  // namespace quapi::kernels
