#include "saddlescope/kernels.hpp"

namespace saddlescope {
namespace {

void sin_two_pi_scalar(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = sin_two_pi(x[i]);
}

void standard_forward_scalar(double k, double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double yn = y[i] + k * sin_two_pi(x[i]);
        y[i] = yn;
        x[i] = x[i] + yn;
    }
}

void standard_inverse_scalar(double k, double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double xp = x[i] - y[i];
        x[i] = xp;
        y[i] = y[i] - k * sin_two_pi(xp);
    }
}

}  // namespace

const MapKernels& scalar_kernels() {
    static const MapKernels table{"scalar", sin_two_pi_scalar, standard_forward_scalar,
                                  standard_inverse_scalar};
    return table;
}

}  // namespace saddlescope
