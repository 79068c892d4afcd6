#pragma once

#include <cstddef>
#include <span>

namespace coasim::kernels {

// Scalar reference kernels. The dispatched variants below must agree with
// these within accumulation-order tolerance.
namespace scalar {
float dot(const float* a, const float* b, std::size_t n);
float squared_norm(const float* a, std::size_t n);
float squared_euclidean(const float* a, const float* b, std::size_t n);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
float dot(const float* a, const float* b, std::size_t n);
float squared_norm(const float* a, std::size_t n);
float squared_euclidean(const float* a, const float* b, std::size_t n);
} // namespace avx2
#endif

// Runtime-dispatched entry points.
float dot(std::span<const float> a, std::span<const float> b);
float squared_norm(std::span<const float> a);
float squared_euclidean(std::span<const float> a, std::span<const float> b);

// 1 - cos(a,b); 1.0 when either vector has zero norm.
double cosine_distance(std::span<const float> a, std::span<const float> b);
double euclidean_distance(std::span<const float> a, std::span<const float> b);

// Active kernel implementation ("avx2" or "scalar").
const char* active_backend();
// Force the scalar path (tests); pass false to restore detection.
void force_scalar(bool on);

} // namespace coasim::kernels
