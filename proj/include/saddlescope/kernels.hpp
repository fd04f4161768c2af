#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>

#include "saddlescope/geometry.hpp"

namespace saddlescope {

/// Batch kernels for the arithmetic inner loops of long-orbit iteration.
/// The scalar variants are the reference semantics; SIMD variants must agree
/// with them to ~1e-14 absolute (enforced by the equivalence tests).
struct MapKernels {
    const char* name;
    /// out[i] = sin(2*pi*x[i])
    void (*sin_two_pi)(const double* x, double* out, std::size_t n);
    /// One lift step of the standard map, in place. k = mu/(2*pi).
    /// y' = y + k*sin(2*pi*x); x' = x + y'.
    void (*standard_forward)(double k, double* x, double* y, std::size_t n);
    /// One lift step of the exact inverse, in place.
    /// x' = x - y; y' = y - k*sin(2*pi*x').
    void (*standard_inverse)(double k, double* x, double* y, std::size_t n);
};

const MapKernels& scalar_kernels();

#if defined(SADDLESCOPE_HAVE_AVX2)
const MapKernels& avx2_kernels();
#endif

/// Active kernel table. Selected once: SADDLESCOPE_KERNEL env var if set
/// ("scalar", "avx2", "auto"), otherwise the best variant the CPU supports.
const MapKernels& active_kernels();

/// Force a kernel by name; returns false (leaving the selection unchanged)
/// if the variant is not compiled in or not supported by this CPU.
bool select_kernels(std::string_view name);

/// Reference scalar sin(2*pi*x): argument reduced mod 1 before libm sin,
/// so accuracy does not degrade for large lift coordinates.
inline double sin_two_pi(double x) {
    return std::sin(kTwoPi * (x - std::nearbyint(x)));
}

inline double cos_two_pi(double x) {
    return std::cos(kTwoPi * (x - std::nearbyint(x)));
}

}  // namespace saddlescope
