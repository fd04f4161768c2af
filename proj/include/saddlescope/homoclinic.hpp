#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "saddlescope/manifold.hpp"
#include "saddlescope/torus_topology.hpp"

namespace saddlescope {

struct ArcsTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OmegaFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Verdict { TopologicallyTransverse, TangentialOrUnresolved };

/// A detected homoclinic candidate between an unstable and a stable branch.
struct IntersectionRecord {
    Branch unstable_branch = Branch::UnstablePlus;
    Branch stable_branch = Branch::StablePlus;
    TorusPoint point;          // crossing of the two input polylines
    TorusPoint refined_point;  // curve-level estimate after local refinement
    double t_u = 0.0;          // polyline parameters of the crossing
    double t_s = 0.0;
    Verdict verdict = Verdict::TangentialOrUnresolved;
    int refinement_depth = 0;
    /// Which side of the other curve each local half-arc exits through:
    /// {u+ vs s, u- vs s, s+ vs u, s- vs u}. Zero when never classified.
    std::array<int, 4> side_signature{0, 0, 0, 0};
};

/// All transversal-candidate crossings of the torus projections, found by
/// wrap-aware segment tests on a spatial hash, polished by local bisection
/// refinement of both curves. Duplicates within `window` (torus metric) are
/// merged keeping the smallest t_u + t_s. Results sorted by t_u + t_s.
std::vector<IntersectionRecord> find_intersections(const ManifoldArc& u,
                                                   const ManifoldArc& s,
                                                   double window = 1e-5);

/// Local curve through a crossing: world position as a function of a real
/// parameter, with the crossing at parameter 0.
using LocalCurve = std::function<Vec2(double)>;

struct TransversalityOptions {
    double initial_radius = 0.02;
    int max_halvings = 12;
    int samples = 96;
};

/// Side-change test of the crossing at q between two local curves:
/// in the disk of radius r around q, finds which side of the other curve each
/// half exits through; halves r until two consecutive radii agree. Opposite
/// exits on both tests give TopologicallyTransverse.
std::pair<Verdict, std::array<int, 4>> classify_crossing(const LocalCurve& u,
                                                         const LocalCurve& s,
                                                         int* depth_out = nullptr,
                                                         const TransversalityOptions& opt = {});

/// Runs the side-change test on a record, sampling both manifolds through
/// their exact evaluators around the refined crossing.
IntersectionRecord classify_transversality(IntersectionRecord rec, const ManifoldArc& u,
                                           const ManifoldArc& s,
                                           const TransversalityOptions& opt = {});

/// Omega decomposition at a homoclinic point q: the closed curve family
/// Omega_u = u[q, G^3 q], Omega_s = s[q, G^3 q], rasterized with the
/// complement labeled. Component A is the one containing the saddle.
struct OmegaDecomposition {
    TorusPoint q;
    std::vector<double> omega_u_x, omega_u_y;  // lift polylines
    std::vector<double> omega_s_x, omega_s_y;
    ComponentLabeling labeling;
    std::int32_t a_component = -1;
    int grid_res = 0;
    bool all_components_touch_both = false;
};

/// pre: both arcs long enough to contain the third forward image of q.
/// ComponentCountOne triggers automatic grid doubling up to 4096.
OmegaDecomposition omega_analysis(const MapSpec& map, const IntersectionRecord& rec,
                                  const ManifoldArc& u, const ManifoldArc& s, int grid_res);

/// Records reordered by the size of the omega slices they would generate
/// (lambda^3 t_u + t_s); small slices rasterize most reliably.
std::vector<IntersectionRecord> omega_candidates(std::vector<IntersectionRecord> records,
                                                 double lambda);

/// One-sided containment defect of u inside a tol-tube of s, reported over
/// three growth stages (prefixes of both arcs). A connection would drive the
/// defect to 0 as arcs grow.
struct ConnectionReport {
    double tol = 0.0;
    std::array<double, 3> defect{0.0, 0.0, 0.0};  // increasing prefix lengths
    bool connection_suspected = false;            // final defect below tol
};

ConnectionReport connection_probe(const ManifoldArc& u, const ManifoldArc& s, double tol);

/// Convenience: grow the four branches of a saddle to a common torus length.
struct BranchSet {
    ManifoldArc u_plus, u_minus, s_plus, s_minus;

    const ManifoldArc& get(Branch b) const;
    ManifoldArc& get(Branch b);
};
BranchSet grow_branch_set(const MapSpec& map, const FixedPointRecord& saddle,
                          double torus_length, const GrowSettings& settings = {});

/// Detection plus classification for one branch pair: records in
/// (t_u + t_s) order, classified until the first transverse one.
struct PairScan {
    Branch unstable = Branch::UnstablePlus;
    Branch stable = Branch::StablePlus;
    std::vector<IntersectionRecord> records;
    std::optional<IntersectionRecord> first_transverse;
};
PairScan scan_pair(const ManifoldArc& u, const ManifoldArc& s, int classify_limit = 64,
                   double window = 1e-5);

}  // namespace saddlescope
