#include "coasim/kernels.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace coasim::kernels {

namespace scalar {

float dot(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

float squared_norm(const float* a, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

float squared_euclidean(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
        float d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

} // namespace scalar

namespace {

std::atomic<bool> g_force_scalar{false};

bool have_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

bool use_avx2() {
    static const bool detected = have_avx2();
    return detected && !g_force_scalar.load(std::memory_order_relaxed);
}

} // namespace

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

const char* active_backend() { return use_avx2() ? "avx2" : "scalar"; }

float dot(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw std::invalid_argument("kernel size mismatch");
#if defined(__x86_64__) || defined(_M_X64)
    if (use_avx2()) return avx2::dot(a.data(), b.data(), a.size());
#endif
    return scalar::dot(a.data(), b.data(), a.size());
}

float squared_norm(std::span<const float> a) {
#if defined(__x86_64__) || defined(_M_X64)
    if (use_avx2()) return avx2::squared_norm(a.data(), a.size());
#endif
    return scalar::squared_norm(a.data(), a.size());
}

float squared_euclidean(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw std::invalid_argument("kernel size mismatch");
#if defined(__x86_64__) || defined(_M_X64)
    if (use_avx2()) return avx2::squared_euclidean(a.data(), b.data(), a.size());
#endif
    return scalar::squared_euclidean(a.data(), b.data(), a.size());
}

double cosine_distance(std::span<const float> a, std::span<const float> b) {
    double na = std::sqrt(static_cast<double>(squared_norm(a)));
    double nb = std::sqrt(static_cast<double>(squared_norm(b)));
    if (na == 0.0 || nb == 0.0) return 1.0;
    double cos = static_cast<double>(dot(a, b)) / (na * nb);
    if (cos > 1.0) cos = 1.0;
    if (cos < -1.0) cos = -1.0;
    return 1.0 - cos;
}

double euclidean_distance(std::span<const float> a, std::span<const float> b) {
    return std::sqrt(static_cast<double>(squared_euclidean(a, b)));
}

} // namespace coasim::kernels
