#pragma once

#include <optional>
#include <vector>

#include "saddlescope/homoclinic.hpp"
#include "saddlescope/map.hpp"

namespace saddlescope {

enum class EntropyMethod { LengthGrowth, HorseshoeShift };

struct EntropyReport {
    EntropyMethod method = EntropyMethod::LengthGrowth;
    double bound = 0.0;  // nats, >= 0; ln 2 / n for HorseshoeShift
    int n = 0;           // return time, HorseshoeShift only
    bool budget_exceeded = false;
    bool found = false;
    std::vector<std::pair<int, double>> fit;  // (iterate, log length) diagnostics
};

struct LengthGrowthOptions {
    int iterates = 24;  // weakly chaotic parameters need the longer transient
    double h_max = 5e-3;
    std::size_t vertex_cap = 3'000'000;
};

/// Iterates the seed polyline with adaptive source-refinement, records the
/// length per iterate and returns the least-squares slope of log-length over
/// the last half of the recorded iterates.
EntropyReport length_growth_rate(const MapSpec& map, std::vector<PlanePoint> seed,
                                 const LengthGrowthOptions& opt = {});

/// Short unstable-direction segment at the principal saddle, the default
/// length-growth seed.
std::vector<PlanePoint> default_growth_seed(const MapSpec& map);

struct HorseshoeOptions {
    int n_max = 40;
    int resolution = 512;
    double min_strip_cells = 8;  // discard strip components thinner than this
    std::vector<double> sizes{0.05, 0.02, 0.01};  // candidate rectangle half-sizes
};

struct HorseshoeCertificate {
    int n = 0;
    double half_u = 0.0;  // rectangle half-extents along the local tangents
    double half_s = 0.0;
    Vec2 dir_u, dir_s;    // local tangent frame at the homoclinic point
    TorusPoint corner_q;
    int resolution = 0;
    std::vector<std::uint8_t> mask;  // resolution^2 cells of R ^ f^n(R)
    int strip_count = 0;
};

/// Looks for the smallest n such that f^n of a rectangle R at the homoclinic
/// point crosses R in two disjoint full-height strips. R is spanned by the
/// local unstable/stable tangent directions at the refined crossing;
/// membership of f^n(R) is tested by mapping cell centers backwards, and the
/// strip certificate is re-verified at doubled resolution before acceptance.
/// pre: rec.verdict == TopologicallyTransverse (invalid_argument otherwise).
EntropyReport detect_horseshoe(const MapSpec& map, const IntersectionRecord& rec,
                               const ManifoldArc& u, const ManifoldArc& s,
                               const HorseshoeOptions& opt = {},
                               HorseshoeCertificate* cert_out = nullptr);

}  // namespace saddlescope
