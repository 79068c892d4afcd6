// AVX2 variants of the float kernels. Compiled with -mavx2 in its own TU;
// callers go through the runtime dispatch in kernels.cpp.

#if defined(__x86_64__) || defined(_M_X64)

#include "coasim/kernels.hpp"

#include <immintrin.h>

namespace coasim::kernels::avx2 {

namespace {

inline float hsum256(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_hadd_ps(s, s);
    s = _mm_hadd_ps(s, s);
    return _mm_cvtss_f32(s);
}

} // namespace

float dot(const float* a, const float* b, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 va = _mm256_loadu_ps(a + i);
        __m256 vb = _mm256_loadu_ps(b + i);
        acc = _mm256_fmadd_ps(va, vb, acc);
    }
    float total = hsum256(acc);
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

float squared_norm(const float* a, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 va = _mm256_loadu_ps(a + i);
        acc = _mm256_fmadd_ps(va, va, acc);
    }
    float total = hsum256(acc);
    for (; i < n; ++i) total += a[i] * a[i];
    return total;
}

float squared_euclidean(const float* a, const float* b, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
        acc = _mm256_fmadd_ps(d, d, acc);
    }
    float total = hsum256(acc);
    for (; i < n; ++i) {
        float d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

} // namespace coasim::kernels::avx2

#endif
