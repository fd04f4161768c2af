#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "saddlescope/fixed_points.hpp"
#include "saddlescope/map.hpp"

namespace saddlescope {

enum class Branch { UnstablePlus, UnstableMinus, StablePlus, StableMinus };

const char* branch_name(Branch b);
bool is_unstable(Branch b);

struct SeedFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GrowSettings {
    double seed_tol = 1e-9;
    double h_max = 1e-3;      // max vertex spacing (lift metric, bounds the torus metric)
    double theta_max = 0.2;   // max turning angle per vertex, radians
    double tube_tol = 1e-6;
    std::size_t vertex_cap = 5'000'000;
};

/// One branch of a saddle as an adaptively refined polyline on the lift,
/// parameterized by the linear coordinate t: alpha(t) ~ p + t v near p and
/// G(alpha(t)) = alpha(lambda t) globally, where G is the effective step
/// (the map for unstable branches, its inverse for stable ones, applied
/// twice with period-2 branches of negative saddles).
struct ManifoldArc {
    MapSpec map;
    FixedPointRecord saddle;
    Branch branch = Branch::UnstablePlus;
    GrowSettings settings;

    int period = 1;           // 2 for branches of negative saddles
    bool use_inverse = false; // stable branches grow under the inverse map
    double lambda = 0.0;      // parameter multiplier per effective step, > 1
    double d0 = 0.0;          // seed parameter scale
    Vec2 seed_dir;            // signed unit eigenvector
    PlanePoint base;          // saddle lift
    Vec2 shift;               // integer drift of the saddle under the effective step

    std::vector<double> t;    // strictly increasing from d0
    std::vector<double> x;    // lift coordinates
    std::vector<double> y;
    double torus_length = 0.0;
    bool truncated = false;   // vertex cap hit; arc is a valid partial result

    std::size_t last_level_begin = 0;
    int levels = 0;

    std::size_t size() const { return t.size(); }
    double tmax() const { return t.empty() ? 0.0 : t.back(); }
    PlanePoint point(std::size_t i) const { return {x[i], y[i]}; }
    TorusPoint torus_point(std::size_t i) const { return TorusPoint::reduce(x[i], y[i]); }

    /// One application of the effective step G (map or inverse, period times,
    /// with the integer drift removed so the saddle lift stays fixed).
    PlanePoint effective_step(const PlanePoint& z) const;
    PlanePoint effective_step_back(const PlanePoint& z) const;

    /// Exact curve sample at parameter tp: the seed chord mapped forward the
    /// right number of effective steps. Independent of the stored polyline.
    PlanePoint evaluate(double tp) const;
};

/// Initial segment p + t v over [d0, lambda d0], with d0 maximal (up to a
/// factor-2 search) such that the linearization defect stays within seed_tol
/// along the whole sampled fundamental segment.
ManifoldArc seed_branch(const MapSpec& map, const FixedPointRecord& saddle, Branch branch,
                        const GrowSettings& settings = {});

/// Extends the arc to parameter target_tmax by iterating the fundamental
/// segment, inserting midpoints (bisection of the pre-image parameter) until
/// spacing <= h_max and turning <= theta_max. Sets `truncated` instead of
/// failing when the vertex cap is reached.
void grow(ManifoldArc& arc, double target_tmax);

/// Grow level by level until the torus arc length reaches target_length.
void grow_to_length(ManifoldArc& arc, double target_length);

/// Max distance from the forward image of each vertex (with lambda t within
/// range) to the polyline near parameter lambda t. The functional-equation
/// tube test: must stay within tube_tol.
double functional_equation_defect(const ManifoldArc& arc);

/// Symmetric-difference fraction |A xor B| / |A union B| of occupied cells of
/// the two arcs' torus projections on a grid_res^2 toroidal grid.
double closure_similarity(const ManifoldArc& a, const ManifoldArc& b, int grid_res);

/// Occupied-cell set size for one arc (used by refinement-convergence tests).
std::size_t occupancy_cells(const ManifoldArc& a, int grid_res);

/// CSV polyline export: header t,x,y, one vertex per row, lift coordinates.
void write_csv(const ManifoldArc& arc, std::ostream& os);

}  // namespace saddlescope
