#include "saddlescope/map.hpp"

#include <cmath>

#include "saddlescope/kernels.hpp"

namespace saddlescope {
namespace {

constexpr double kMidpointTol = 1e-14;
constexpr int kMidpointMaxIter = 50;

// Hamiltonian vector field of H(x,y) = (1/4) sin(2pi x) sin(2pi y)
Vec2 ham_field(double x, double y) {
    double sx = sin_two_pi(x), cx = cos_two_pi(x);
    double sy = sin_two_pi(y), cy = cos_two_pi(y);
    return {0.5 * kPi * sx * cy, -0.5 * kPi * cx * sy};
}

Mat2 ham_field_jacobian(double x, double y) {
    double sx = sin_two_pi(x), cx = cos_two_pi(x);
    double sy = sin_two_pi(y), cy = cos_two_pi(y);
    double pi2 = kPi * kPi;
    return {pi2 * cx * cy, -pi2 * sx * sy, pi2 * sx * sy, -pi2 * cx * cy};
}

// One implicit-midpoint substep: z' = z + h V((z + z')/2).
PlanePoint midpoint_substep(const PlanePoint& z, double h) {
    Vec2 delta = ham_field(z.x, z.y) * h;  // explicit Euler predictor
    for (int it = 0; it < kMidpointMaxIter; ++it) {
        PlanePoint mid{z.x + 0.5 * delta.x, z.y + 0.5 * delta.y};
        Vec2 next = ham_field(mid.x, mid.y) * h;
        double change = std::hypot(next.x - delta.x, next.y - delta.y);
        delta = next;
        if (change < kMidpointTol) break;
    }
    return {z.x + delta.x, z.y + delta.y};
}

PlanePoint ham_time_map(const PlanePoint& p, int steps, double direction) {
    double h = direction / steps;
    PlanePoint z = p;
    for (int i = 0; i < steps; ++i) z = midpoint_substep(z, h);
    return z;
}

// Tangent map of one substep is the Cayley transform
// (I - h/2 A)^{-1} (I + h/2 A) with A = DV at the converged midpoint;
// its determinant is exactly 1 in exact arithmetic since tr A = 0.
Mat2 ham_variational(const PlanePoint& p, int steps) {
    double h = 1.0 / steps;
    PlanePoint z = p;
    Mat2 acc = Mat2::identity();
    for (int i = 0; i < steps; ++i) {
        PlanePoint next = midpoint_substep(z, h);
        PlanePoint mid{0.5 * (z.x + next.x), 0.5 * (z.y + next.y)};
        Mat2 a = ham_field_jacobian(mid.x, mid.y) * (0.5 * h);
        Mat2 num = Mat2::identity() + a;
        Mat2 den = Mat2::identity() - a;
        acc = den.inverse() * num * acc;
        z = next;
    }
    return acc;
}

}  // namespace

std::string MapSpec::name() const {
    switch (kind) {
        case MapKind::StandardMap:
            return "standard(mu=" + std::to_string(mu) + ")";
        case MapKind::LinearTorus:
            return "linear(" + std::to_string(coeffs[0]) + "," + std::to_string(coeffs[1]) +
                   "," + std::to_string(coeffs[2]) + "," + std::to_string(coeffs[3]) + ")";
        case MapKind::HamiltonianTimeOne:
            return "hamiltonian(steps=" + std::to_string(step_count) + ")";
    }
    return "?";
}

PlanePoint eval_lift(const MapSpec& map, const PlanePoint& p) {
    switch (map.kind) {
        case MapKind::StandardMap: {
            double s = (map.mu / kTwoPi) * sin_two_pi(p.x);
            double yn = p.y + s;
            return {p.x + yn, yn};
        }
        case MapKind::LinearTorus: {
            const auto& c = map.coeffs;
            return {c[0] * p.x + c[1] * p.y, c[2] * p.x + c[3] * p.y};
        }
        case MapKind::HamiltonianTimeOne:
            return ham_time_map(p, map.step_count, 1.0);
    }
    return p;
}

PlanePoint eval_inverse_lift(const MapSpec& map, const PlanePoint& w) {
    switch (map.kind) {
        case MapKind::StandardMap: {
            // closed form: z1 = w1 - w2, z2 = w2 - (mu/2pi) sin(2pi z1)
            double x = w.x - w.y;
            double y = w.y - (map.mu / kTwoPi) * sin_two_pi(x);
            return {x, y};
        }
        case MapKind::LinearTorus: {
            const auto& c = map.coeffs;
            // inverse of a determinant-1 integer matrix
            return {c[3] * w.x - c[1] * w.y, -c[2] * w.x + c[0] * w.y};
        }
        case MapKind::HamiltonianTimeOne:
            return ham_time_map(w, map.step_count, -1.0);
    }
    return w;
}

TorusPoint eval(const MapSpec& map, const TorusPoint& p) {
    return project(eval_lift(map, p.lift()));
}

TorusPoint eval_inverse(const MapSpec& map, const TorusPoint& w) {
    return project(eval_inverse_lift(map, w.lift()));
}

Jacobian2 jacobian(const MapSpec& map, const TorusPoint& p) {
    switch (map.kind) {
        case MapKind::StandardMap: {
            double c = map.mu * cos_two_pi(p.x);
            return {1.0 + c, 1.0, c, 1.0};
        }
        case MapKind::LinearTorus: {
            const auto& m = map.coeffs;
            return {double(m[0]), double(m[1]), double(m[2]), double(m[3])};
        }
        case MapKind::HamiltonianTimeOne:
            return ham_variational(p.lift(), map.step_count);
    }
    return Mat2::identity();
}

TorusPoint apply_symmetry(SymmetryOp op, const TorusPoint& p) {
    switch (op) {
        case SymmetryOp::Negate:
            return TorusPoint::reduce(-p.x, -p.y);
        case SymmetryOp::ConjugacyPhi:
            return TorusPoint::reduce(0.5 - p.x, -p.y);
    }
    return p;
}

void eval_lift_batch(const MapSpec& map, std::span<double> x, std::span<double> y, int steps) {
    const std::size_t n = x.size();
    switch (map.kind) {
        case MapKind::StandardMap: {
            const MapKernels& k = active_kernels();
            double ratio = map.mu / kTwoPi;
            for (int s = 0; s < steps; ++s) k.standard_forward(ratio, x.data(), y.data(), n);
            return;
        }
        case MapKind::LinearTorus: {
            const auto& c = map.coeffs;
            for (int s = 0; s < steps; ++s) {
                for (std::size_t i = 0; i < n; ++i) {
                    double xn = c[0] * x[i] + c[1] * y[i];
                    double yn = c[2] * x[i] + c[3] * y[i];
                    x[i] = xn;
                    y[i] = yn;
                }
            }
            return;
        }
        case MapKind::HamiltonianTimeOne: {
            for (int s = 0; s < steps; ++s) {
                for (std::size_t i = 0; i < n; ++i) {
                    PlanePoint z = ham_time_map({x[i], y[i]}, map.step_count, 1.0);
                    x[i] = z.x;
                    y[i] = z.y;
                }
            }
            return;
        }
    }
}

void eval_inverse_lift_batch(const MapSpec& map, std::span<double> x, std::span<double> y,
                             int steps) {
    const std::size_t n = x.size();
    switch (map.kind) {
        case MapKind::StandardMap: {
            const MapKernels& k = active_kernels();
            double ratio = map.mu / kTwoPi;
            for (int s = 0; s < steps; ++s) k.standard_inverse(ratio, x.data(), y.data(), n);
            return;
        }
        default: {
            for (int s = 0; s < steps; ++s) {
                for (std::size_t i = 0; i < n; ++i) {
                    PlanePoint z = eval_inverse_lift(map, {x[i], y[i]});
                    x[i] = z.x;
                    y[i] = z.y;
                }
            }
            return;
        }
    }
}

}  // namespace saddlescope
