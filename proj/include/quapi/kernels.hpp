// kernels.hpp: inner loops of the tensor propagation, scalar and SIMD
//
// Every variant performs the same floating-point operations in the same
// order (no fused multiply-add, sums in ascending index order), so results
// are bit-identical across variants.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "quapi/types.hpp"

namespace quapi::kernels {

struct KernelSet {
    std::string_view name;

    /// For rows i in [row_begin, row_end):
    ///   s = Σ_{b < blocks} src[b·stride + i]          (ascending b)
    ///   dst[i·fanout + x] = s · table[i·fanout + x]     for x < fanout
    void (*contract_scale)(const Complex* src, std::size_t blocks, std::size_t stride,
                           const Complex* table, std::size_t fanout, Complex* dst,
                           std::size_t row_begin, std::size_t row_end);

    /// acc[x] += Σ_i a[i·fanout + x] · w[i·fanout + x] over rows [row_begin, row_end),
    /// accumulated in ascending i.
    void (*weighted_column_sum)(const Complex* a, const Complex* w, std::size_t fanout,
                                std::size_t row_begin, std::size_t row_end, Complex* acc);
};

const KernelSet& scalar();

/// nullptr when not compiled in or not supported by the running CPU.
const KernelSet* avx2();

/// Variants usable on this machine, scalar first.
std::vector<const KernelSet*> available();

/// Best variant for this CPU, overridable through QUAPI_KERNEL=scalar|avx2.
const KernelSet& best();

/// Variant by name ("scalar", "avx2", or "auto" for best()).
const KernelSet& by_name(std::string_view name);

/// Reference complex product (ar·br − ai·bi, ar·bi + ai·br), matched by every variant.
inline Complex mul(Complex a, Complex b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace quapi::kernels
