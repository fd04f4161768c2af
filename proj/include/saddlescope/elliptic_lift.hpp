#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "saddlescope/fixed_points.hpp"
#include "saddlescope/map.hpp"

namespace saddlescope {

struct NotElliptic : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RadiusEscape : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadN : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonMonotone : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Linear chart around an elliptic fixed point in which the derivative of the
/// map is the rigid rotation by alpha. transform columns span the chart
/// (world = center + transform * chart); the chart may be orientation
/// reversing, recorded in `orientation`.
struct PolarChart {
    TorusPoint center;
    double alpha = 0.0;  // rotation angle in (0, pi), arccos(trace/2)
    Mat2 transform;
    Mat2 inverse;
    int orientation = 1;  // sign of det(transform)
    double radius = 0.25; // chart radius guard in chart units
};

/// alpha in (0, 2pi) from the eigenvalues of the Jacobian at an elliptic
/// point, together with the conjugating similarity. Throws NotElliptic.
PolarChart make_polar_chart(const MapSpec& map, const FixedPointRecord& q);

inline double rotation_angle(const MapSpec& map, const FixedPointRecord& q) {
    return make_polar_chart(map, q).alpha;
}

struct PolarLiftState {
    double theta = 0.0;  // lifted angle (not reduced mod 2pi)
    double r = 0.0;      // radius in chart units, > 0
};

/// One step of the polar lift F(theta, r) = (theta', r'): applies the map in
/// the chart and picks the unique continuous angle lift with
/// |theta' - (theta + alpha)| < pi. Throws RadiusEscape past the chart radius.
PolarLiftState lift_step(const MapSpec& map, const PolarChart& chart,
                         const PolarLiftState& state);

/// Empirical nonlinearity bound at radius r:
/// max over a circle of samples of |f(z) - f'(0) z| / |z| in chart coordinates.
double measure_epsilon(const MapSpec& map, const PolarChart& chart, double r,
                       int samples = 4096);

/// The three displayed conditions tying n, alpha and epsilon:
///   n (pi/2) eps < n alpha - 2 pi,
///   n (pi/2) eps < n (2 pi - alpha) - 2 pi,
///   alpha + (pi/2) eps < 2 pi  and  alpha - (pi/2) eps > 0.
/// pre (BadN): n alpha > 2 pi and n (2 pi - alpha) > 2 pi.
bool verify_epsilon_conditions(double alpha, int n, double epsilon);

/// Minimal n with n alpha > 2 pi and n (2 pi - alpha) > 2 pi.
int choose_n(double alpha);

struct ArcTrapReport {
    double alpha = 0.0;
    int n = 0;
    double r0 = 0.0;
    double epsilon = 0.0;        // measured at r0
    bool conditions_ok = false;  // verify_epsilon_conditions at (alpha, n, epsilon)
    bool consecutive_overlap = false;  // F beta ^ beta or F beta ^ (beta + 2pi)
    int k = 0;                   // smallest k >= 1 with iterates meeting beta + 2k pi
    bool closed = false;         // a closed curve xi was assembled
    std::vector<TorusPoint> xi;  // the closed curve, world coordinates
    int winding = 0;             // winding number of xi around the center
};

/// Iterates the lifted arc beta = arc x {r0} n times under the polar lift.
/// Reports whether consecutive images overlap, the smallest k >= 1 for which
/// the iterates meet the 2k pi translate of beta, and, when the chain of
/// overlaps closes, emits the closed curve xi with its winding number
/// (brute-force angle summation). NoClosure is reported via k = 0/closed =
/// false, not thrown.
ArcTrapReport arc_trap(const MapSpec& map, const FixedPointRecord& q, double r0,
                       double arc_from, double arc_to, int n);

struct RotationNumberResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Birkhoff average (F^n(x) - x)/n of a degree-one circle-map lift, averaged
/// over several starting points. Throws NonMonotone if the sampled lift
/// violates degree-one monotonicity.
RotationNumberResult rotation_number(const std::function<double(double)>& lift,
                                     int iterations, int starts = 8);

}  // namespace saddlescope
