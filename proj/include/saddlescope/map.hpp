#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>

#include "saddlescope/geometry.hpp"

namespace saddlescope {

enum class MapKind { StandardMap, LinearTorus, HamiltonianTimeOne };

/// A parameterized area-preserving torus map with lift, inverse and
/// analytic (or variational) Jacobian.
///
/// StandardMap:  f(x,y) = (x + y + (mu/2pi) sin 2pi x,  y + (mu/2pi) sin 2pi x)
/// LinearTorus:  integer matrix [[a,b],[c,d]] with ad - bc = 1
/// HamiltonianTimeOne: time-one map of H(x,y) = (1/4) sin(2pi x) sin(2pi y),
///   integrated by implicit midpoint with step 1/step_count. In the doubled
///   coordinates X = 2x, Y = 2y this is the flow of sin(pi X) sin(pi Y).
struct MapSpec {
    MapKind kind = MapKind::StandardMap;
    double mu = 1.0;
    std::array<int, 4> coeffs{1, 0, 0, 1};  // a, b, c, d
    int step_count = 64;
    int orientation = 1;  // every map in the family preserves orientation

    static MapSpec standard(double mu) {
        MapSpec m;
        m.kind = MapKind::StandardMap;
        m.mu = mu;
        return m;
    }
    static MapSpec linear_torus(int a, int b, int c, int d) {
        if (a * d - b * c != 1) throw std::invalid_argument("LinearTorus needs ad - bc = 1");
        MapSpec m;
        m.kind = MapKind::LinearTorus;
        m.coeffs = {a, b, c, d};
        return m;
    }
    static MapSpec hamiltonian(int step_count = 64) {
        if (step_count < 1) throw std::invalid_argument("step_count must be positive");
        MapSpec m;
        m.kind = MapKind::HamiltonianTimeOne;
        m.step_count = step_count;
        return m;
    }

    std::string name() const;
};

PlanePoint eval_lift(const MapSpec& map, const PlanePoint& p);
PlanePoint eval_inverse_lift(const MapSpec& map, const PlanePoint& w);

TorusPoint eval(const MapSpec& map, const TorusPoint& p);
TorusPoint eval_inverse(const MapSpec& map, const TorusPoint& w);

/// Derivative of the map at p. Analytic for StandardMap and LinearTorus;
/// variational (product of implicit-midpoint tangent maps) for the
/// Hamiltonian time-one map.
Jacobian2 jacobian(const MapSpec& map, const TorusPoint& p);

enum class SymmetryOp { Negate, ConjugacyPhi };

/// Negate: (x,y) -> (-x,-y) mod 1.  ConjugacyPhi: (x,y) -> (1/2 - x, -y) mod 1,
/// conjugating f_mu with f_{-mu}.
TorusPoint apply_symmetry(SymmetryOp op, const TorusPoint& p);

/// In-place batch lift steps over coordinate arrays (dispatches to the
/// active SIMD kernel for the standard map).
void eval_lift_batch(const MapSpec& map, std::span<double> x, std::span<double> y,
                     int steps = 1);
void eval_inverse_lift_batch(const MapSpec& map, std::span<double> x, std::span<double> y,
                             int steps = 1);

}  // namespace saddlescope
