#include "quapi/kernels.hpp"

namespace quapi::kernels {

namespace {

void contract_scale(const Complex* src, std::size_t blocks, std::size_t stride,
                    const Complex* table, std::size_t fanout, Complex* dst, std::size_t row_begin,
                    std::size_t row_end) {
    for (std::size_t i = row_begin; i < row_end; ++i) {
        double re = src[i].real();
        double im = src[i].imag();
        for (std::size_t b = 1; b < blocks; ++b) {
            re += src[b * stride + i].real();
            im += src[b * stride + i].imag();
        }
        const Complex s{re, im};
        const std::size_t base = i * fanout;
        for (std::size_t x = 0; x < fanout; ++x) dst[base + x] = mul(s, table[base + x]);
    }
}

void weighted_column_sum(const Complex* a, const Complex* w, std::size_t fanout,
                         std::size_t row_begin, std::size_t row_end, Complex* acc) {
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const std::size_t base = i * fanout;
        for (std::size_t x = 0; x < fanout; ++x) {
            const Complex p = mul(a[base + x], w[base + x]);
            acc[x] = {acc[x].real() + p.real(), acc[x].imag() + p.imag()};
        }
    }
}

const KernelSet kScalar{"scalar", &contract_scale, &weighted_column_sum};

}  // namespace

const KernelSet& scalar() { return kScalar; }

}  // namespace quapi::kernels
