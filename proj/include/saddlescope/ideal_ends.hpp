#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace saddlescope {

struct NotStabilized : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A closed orientable surface as a cell complex: cells are ordered vertex
/// cycles, every edge has exactly two incident cells. Genus comes from the
/// Euler characteristic (single source of truth).
class CombSurface {
public:
    int vertex_count() const { return nv_; }
    int edge_count() const { return int(edges_.size()); }
    int cell_count() const { return int(cells_.size()); }
    const std::vector<int>& cell(int c) const { return cells_[c]; }
    const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    const std::array<int, 2>& edge_cells(int e) const { return edge_cells_[e]; }
    const std::vector<int>& cell_edges(int c) const { return cell_edges_[c]; }
    const std::vector<int>& vertex_cells(int v) const { return vertex_cells_[v]; }

    int euler_characteristic() const { return nv_ - edge_count() + cell_count(); }
    int genus() const { return (2 - euler_characteristic()) / 2; }

    /// Edge id for an (unordered) vertex pair; -1 if absent.
    int find_edge(int a, int b) const;

    /// Midpoint subdivision: every k-gon becomes k quads. Preserves the Euler
    /// characteristic and all incidence invariants.
    CombSurface subdivided() const;

    static CombSurface torus_grid(int n);
    static CombSurface sphere_grid(int n);
    /// genus 0 = sphere grid, genus 1 = torus grid, genus >= 2 = torus grid
    /// with handles glued between pairs of removed cells.
    static CombSurface genus_grid(int g, int n);

    // construction interface
    int add_vertex();
    int edge_id(int a, int b);  // find or create
    void add_cell(std::vector<int> vertex_cycle);
    void remove_cell(int c);
    /// Builds the incidence tables; checks the two-cells-per-edge invariant
    /// and orientability.
    void finalize();

private:
    int nv_ = 0;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::vector<int>> cells_;
    std::unordered_map<std::uint64_t, int> edge_lookup_;
    std::vector<std::array<int, 2>> edge_cells_;
    std::vector<std::vector<int>> cell_edges_;
    std::vector<std::vector<int>> vertex_cells_;
};

/// A surface with a marked closed subcomplex K and a chosen residual domain U
/// (a set of cells connected through edges not in K).
struct MarkedComplex {
    const CombSurface* surface = nullptr;
    std::vector<char> k_vert, k_edge, k_cell;
    std::vector<char> u_cell;

    int k_component_count() const;  // m
};

/// Marks K (edges and/or cells, closed under taking faces) and picks the
/// residual domain: the one containing seed_cell, or the largest one.
MarkedComplex make_marked(const CombSurface& surface, const std::vector<int>& k_edges,
                          const std::vector<int>& k_cells = {},
                          std::optional<int> seed_cell = std::nullopt);

/// Ends of U as the stabilized number of components of U within the
/// combinatorial k-neighborhood of K, for k = levels..1. Throws NotStabilized
/// when the two tightest levels disagree.
int count_ends(const MarkedComplex& mc, int levels);

struct BoundCheck {
    int ends = 0;
    int m = 0;
    int g = 0;
    bool holds = false;  // ends <= m (g + 1)
};
BoundCheck check_bound(const MarkedComplex& mc, int levels = 4);

/// Components of the combinatorial frontier of U (the K simplices that touch
/// U cells).
int frontier_components(const MarkedComplex& mc);

// Fixtures on the n x n torus grid (n divisible by 4): the center-cross and
// the circle-plus-two-segments configurations.
MarkedComplex make_cross_fixture(const CombSurface& torus, int n);
MarkedComplex make_circle_segments_fixture(const CombSurface& torus, int n);

/// Axis-aligned lattice segments (grid coordinates) rasterized into K edges
/// on a torus grid; a segment spanning the full width/height closes into a
/// loop. Used by the JSON fixture format.
std::vector<int> segment_edges(const CombSurface& torus, int n,
                               const std::array<int, 4>& segment);

}  // namespace saddlescope
