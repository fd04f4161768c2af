#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "saddlescope/map.hpp"

namespace saddlescope {

enum class Classification { SaddlePositive, SaddleNegative, Elliptic, Degenerate };

struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FixedPointRecord {
    TorusPoint location;
    int translate_x = 0;  // F(z) = z + (k,l) on the lift
    int translate_y = 0;
    Classification classification = Classification::Degenerate;
    std::complex<double> eigenvalue_1;  // unstable first for saddles
    std::complex<double> eigenvalue_2;
    Vec2 unstable_direction;  // unit vectors, meaningful iff saddle
    Vec2 stable_direction;
    double residual = 0.0;

    bool is_saddle() const {
        return classification == Classification::SaddlePositive ||
               classification == Classification::SaddleNegative;
    }
    /// Real expansion eigenvalue (|lambda| > 1); saddles only.
    double expansion() const { return eigenvalue_1.real(); }
};

const char* classification_name(Classification c);

/// Spectral classification of a point fixed within ~1e-8.
/// Trace tau of the Jacobian decides: |tau| > 2 saddle (eigenvalue sign =
/// sign of tau), |tau| < 2 elliptic, |tau -+ 2| <= 1e-9 degenerate.
FixedPointRecord classify(const MapSpec& map, const TorusPoint& p);

/// Newton search from a resolution x resolution seed grid on the lift.
/// Results are deduplicated (torus distance < 1e-6) and sorted by (x, y).
/// Non-converging seeds are dropped; finding no fixed point for a standard
/// map with mu != 0 throws InternalError.
std::vector<FixedPointRecord> find_fixed_points(const MapSpec& map, int resolution);

}  // namespace saddlescope
