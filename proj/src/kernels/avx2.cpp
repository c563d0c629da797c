// AVX2 variant. Compiled with -mavx2 only (no FMA) so every product and sum
// rounds exactly like the scalar reference.

#include <immintrin.h>

#include "quapi/kernels.hpp"

namespace quapi::kernels::detail {

namespace {

// Two complex products per register: (ar·br − ai·bi, ar·bi + ai·br).
inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d a_re = _mm256_movedup_pd(a);
    const __m256d a_im = _mm256_permute_pd(a, 0xF);
    const __m256d b_swap = _mm256_permute_pd(b, 0x5);
    return _mm256_addsub_pd(_mm256_mul_pd(a_re, b), _mm256_mul_pd(a_im, b_swap));
}

inline __m128d cmul(__m128d a, __m128d b) {
    const __m128d a_re = _mm_movedup_pd(a);
    const __m128d a_im = _mm_permute_pd(a, 0x3);
    const __m128d b_swap = _mm_permute_pd(b, 0x1);
    return _mm_addsub_pd(_mm_mul_pd(a_re, b), _mm_mul_pd(a_im, b_swap));
}

inline const double* ptr(const Complex* z) { return reinterpret_cast<const double*>(z); }
inline double* ptr(Complex* z) { return reinterpret_cast<double*>(z); }

inline void scale_row(__m256d s_dup, const Complex* table, Complex* dst, std::size_t fanout) {
    std::size_t x = 0;
    for (; x + 2 <= fanout; x += 2)
        _mm256_storeu_pd(ptr(dst + x), cmul(s_dup, _mm256_loadu_pd(ptr(table + x))));
    if (x < fanout)
        _mm_storeu_pd(ptr(dst + x), cmul(_mm256_castpd256_pd128(s_dup), _mm_loadu_pd(ptr(table + x))));
}

void contract_scale(const Complex* src, std::size_t blocks, std::size_t stride,
                    const Complex* table, std::size_t fanout, Complex* dst, std::size_t row_begin,
                    std::size_t row_end) {
    std::size_t i = row_begin;
    for (; i + 2 <= row_end; i += 2) {
        __m256d s = _mm256_loadu_pd(ptr(src + i));
        for (std::size_t b = 1; b < blocks; ++b)
            s = _mm256_add_pd(s, _mm256_loadu_pd(ptr(src + b * stride + i)));
        const __m256d lo = _mm256_permute2f128_pd(s, s, 0x00);
        const __m256d hi = _mm256_permute2f128_pd(s, s, 0x11);
        scale_row(lo, table + i * fanout, dst + i * fanout, fanout);
        scale_row(hi, table + (i + 1) * fanout, dst + (i + 1) * fanout, fanout);
    }
    for (; i < row_end; ++i) {
        __m128d s = _mm_loadu_pd(ptr(src + i));
        for (std::size_t b = 1; b < blocks; ++b) s = _mm_add_pd(s, _mm_loadu_pd(ptr(src + b * stride + i)));
        scale_row(_mm256_broadcast_pd(&s), table + i * fanout, dst + i * fanout, fanout);
    }
}

void weighted_column_sum(const Complex* a, const Complex* w, std::size_t fanout,
                         std::size_t row_begin, std::size_t row_end, Complex* acc) {
    double* out = ptr(acc);
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const std::size_t base = i * fanout;
        std::size_t x = 0;
        for (; x + 2 <= fanout; x += 2) {
            const __m256d p = cmul(_mm256_loadu_pd(ptr(a + base + x)), _mm256_loadu_pd(ptr(w + base + x)));
            _mm256_storeu_pd(out + 2 * x, _mm256_add_pd(_mm256_loadu_pd(out + 2 * x), p));
        }
        if (x < fanout) {
            const __m128d p = cmul(_mm_loadu_pd(ptr(a + base + x)), _mm_loadu_pd(ptr(w + base + x)));
            _mm_storeu_pd(out + 2 * x, _mm_add_pd(_mm_loadu_pd(out + 2 * x), p));
        }
    }
}

const KernelSet kAvx2{"avx2", &contract_scale, &weighted_column_sum};

}  // namespace

const KernelSet& avx2_set() { return kAvx2; }

}  // namespace quapi::kernels::detail
