#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "saddlescope/geometry.hpp"

namespace saddlescope {

struct ResolutionTooCoarse : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonGenericPosition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A closed polyline on the torus, stored as a lift. The displacement from
/// first to last vertex must be an integer vector: the homology class (a,b).
struct ClosedCurve {
    std::vector<PlanePoint> vertices;  // lift; closes up to the declared class

    std::pair<int, int> homology() const;
    /// Straight-line representative of class (a,b) through base.
    static ClosedCurve straight(int a, int b, PlanePoint base, int samples = 64);
};

/// Occupancy/label grid over the unit torus. Cell (i,j) covers
/// [i/res,(i+1)/res) x [j/res,(j+1)/res); indices wrap.
class TorusGrid {
public:
    explicit TorusGrid(int resolution)
        : res_(resolution), tags_(std::size_t(resolution) * resolution, 0) {}

    int resolution() const { return res_; }
    int wrap(int i) const {
        i %= res_;
        return i < 0 ? i + res_ : i;
    }
    std::size_t index(int i, int j) const {
        return std::size_t(wrap(j)) * res_ + wrap(i);
    }
    std::uint16_t tag(int i, int j) const { return tags_[index(i, j)]; }
    std::uint16_t& tag_ref(int i, int j) { return tags_[index(i, j)]; }
    const std::vector<std::uint16_t>& tags() const { return tags_; }

    /// Conservative rasterization of one segment of a torus polyline given by
    /// lift endpoints; marks every cell the segment passes through with the
    /// tag bit. Grid-line traversal (Amanatides & Woo), wrap-aware.
    void rasterize_segment(PlanePoint a, PlanePoint b, std::uint16_t tag_bit);
    void rasterize_polyline(std::span<const double> xs, std::span<const double> ys,
                            std::uint16_t tag_bit);
    void rasterize_curve(const ClosedCurve& c, std::uint16_t tag_bit);

    std::size_t occupied_count() const;

private:
    int res_;
    std::vector<std::uint16_t> tags_;  // bitmask of curve tags, 0 = free
};

struct ComponentLabeling {
    int resolution = 0;
    std::vector<std::int32_t> labels;  // -1 = curve cell, else component id from 0
    int component_count = 0;
    /// Per component: bitmask of curve tags its boundary cells touch.
    std::vector<std::uint16_t> touches;
    /// A component is resolved when it has at least one cell with no curve
    /// cell among its 8 neighbors; slivers living entirely inside the
    /// one-cell rasterization collar are below the grid's resolution.
    std::vector<char> resolved;
    int resolved_count = 0;
    bool coarse_flag = false;  // set when a curve tube self-merged distinct strands

    std::int32_t label_at(const TorusPoint& p) const;
    std::int32_t component_of(const TorusPoint& p) const;  // nearest free cell if on curve
    /// Graymap-style text dump: "P2", dimensions, maxval, then one value per
    /// cell (curve cells 0, component c printed as c+1).
    void write_pgm(std::ostream& os) const;
};

/// Rasterizes the curve family (tag bit i for curve i), flood-fills the
/// complement with 4-connectivity and toroidal wrap, and records which curve
/// tags each component touches. Curves may be open polylines.
ComponentLabeling label_complement(const std::vector<ClosedCurve>& curves, int resolution);
ComponentLabeling label_complement_grid(TorusGrid& grid);

/// Algebraic intersection number: sum of crossing signs over all wrap-aware
/// segment crossings. Equals a1*b2 - a2*b1 for the homology classes.
/// Degenerate crossings trigger a deterministic jitter retry (1e-9,
/// hash-seeded); NonGenericPosition after the retries are exhausted.
int intersection_number(const ClosedCurve& a, const ClosedCurve& b);

}  // namespace saddlescope
