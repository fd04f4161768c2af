#include "saddlescope/ideal_ends.hpp"

#include <algorithm>
#include <numeric>

namespace saddlescope {
namespace {

std::uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

int CombSurface::find_edge(int a, int b) const {
    auto it = edge_lookup_.find(pair_key(a, b));
    return it == edge_lookup_.end() ? -1 : it->second;
}

int CombSurface::add_vertex() { return nv_++; }

int CombSurface::edge_id(int a, int b) {
    auto key = pair_key(a, b);
    auto it = edge_lookup_.find(key);
    if (it != edge_lookup_.end()) return it->second;
    int id = int(edges_.size());
    edges_.push_back({std::min(a, b), std::max(a, b)});
    edge_lookup_.emplace(key, id);
    return id;
}

void CombSurface::add_cell(std::vector<int> vertex_cycle) {
    for (std::size_t i = 0; i < vertex_cycle.size(); ++i) {
        edge_id(vertex_cycle[i], vertex_cycle[(i + 1) % vertex_cycle.size()]);
    }
    cells_.push_back(std::move(vertex_cycle));
}

void CombSurface::remove_cell(int c) { cells_.erase(cells_.begin() + c); }

void CombSurface::finalize() {
    edge_cells_.assign(edges_.size(), {-1, -1});
    cell_edges_.assign(cells_.size(), {});
    vertex_cells_.assign(nv_, {});
    // traversal direction of each edge per incident cell, for orientability
    std::vector<std::array<int, 2>> edge_dir(edges_.size(), {0, 0});

    for (int c = 0; c < cell_count(); ++c) {
        const auto& cyc = cells_[c];
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            int a = cyc[i], b = cyc[(i + 1) % cyc.size()];
            int e = find_edge(a, b);
            cell_edges_[c].push_back(e);
            if (edge_cells_[e][0] < 0) {
                edge_cells_[e] = {c, -1};
                edge_dir[e][0] = a < b ? 1 : -1;
            } else if (edge_cells_[e][1] < 0) {
                edge_cells_[e][1] = c;
                edge_dir[e][1] = a < b ? 1 : -1;
            } else {
                throw std::logic_error("edge with more than two incident cells");
            }
            vertex_cells_[a].push_back(c);
        }
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edge_cells_[e][1] < 0) {
            throw std::logic_error("open edge: surface is not closed");
        }
    }

    // orientability: flip cells so the two traversals of every edge disagree
    std::vector<int> flip(cell_count(), 0);  // -1/+1 assigned, 0 unvisited
    std::vector<int> stack;
    for (int start = 0; start < cell_count(); ++start) {
        if (flip[start] != 0) continue;
        flip[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            int c = stack.back();
            stack.pop_back();
            for (int e : cell_edges_[c]) {
                int other = edge_cells_[e][0] == c ? edge_cells_[e][1] : edge_cells_[e][0];
                int mine = edge_cells_[e][0] == c ? edge_dir[e][0] : edge_dir[e][1];
                int theirs = edge_cells_[e][0] == c ? edge_dir[e][1] : edge_dir[e][0];
                // consistent orientation wants opposite traversal directions
                int needed = (mine * theirs < 0) ? flip[c] : -flip[c];
                if (flip[other] == 0) {
                    flip[other] = needed;
                    stack.push_back(other);
                } else if (flip[other] != needed) {
                    throw std::logic_error("surface is not orientable");
                }
            }
        }
    }

    for (auto& vc : vertex_cells_) {
        std::sort(vc.begin(), vc.end());
        vc.erase(std::unique(vc.begin(), vc.end()), vc.end());
    }
}

CombSurface CombSurface::torus_grid(int n) {
    CombSurface s;
    for (int i = 0; i < n * n; ++i) s.add_vertex();
    auto vid = [n](int i, int j) { return ((j % n + n) % n) * n + ((i % n + n) % n); };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            s.add_cell({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    s.finalize();
    return s;
}

CombSurface CombSurface::sphere_grid(int n) {
    // latitude-longitude grid: n columns, n - 1 interior rows, two poles
    CombSurface s;
    const int rows = n - 1;
    int north = s.add_vertex();
    std::vector<std::vector<int>> ring(rows);
    for (int r = 0; r < rows; ++r) {
        ring[r].resize(n);
        for (int i = 0; i < n; ++i) ring[r][i] = s.add_vertex();
    }
    int south = s.add_vertex();
    for (int i = 0; i < n; ++i) {
        s.add_cell({north, ring[0][i], ring[0][(i + 1) % n]});
    }
    for (int r = 0; r + 1 < rows; ++r) {
        for (int i = 0; i < n; ++i) {
            s.add_cell({ring[r][i], ring[r + 1][i], ring[r + 1][(i + 1) % n],
                        ring[r][(i + 1) % n]});
        }
    }
    for (int i = 0; i < n; ++i) {
        s.add_cell({south, ring[rows - 1][(i + 1) % n], ring[rows - 1][i]});
    }
    s.finalize();
    return s;
}

CombSurface CombSurface::genus_grid(int g, int n) {
    if (g == 0) return sphere_grid(n);
    CombSurface s;
    for (int i = 0; i < n * n; ++i) s.add_vertex();
    auto vid = [n](int i, int j) { return ((j % n + n) % n) * n + ((i % n + n) % n); };

    // cells removed for handle stubs: handle h joins (2, 4h+2) to (6, 4h+2)
    auto hole_cells = [&](int h) {
        return std::pair<std::pair<int, int>, std::pair<int, int>>{{2, 4 * h + 2},
                                                                   {6, 4 * h + 2}};
    };
    auto is_hole = [&](int i, int j) {
        for (int h = 0; h + 1 < g; ++h) {
            auto [a, b] = hole_cells(h);
            if ((i == a.first && j == a.second) || (i == b.first && j == b.second)) return true;
        }
        return false;
    };
    if (g >= 2 && n < 4 * g + 4) throw std::invalid_argument("grid too small for the handles");

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (is_hole(i, j)) continue;
            s.add_cell({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    // tube length: a short tube would sit entirely inside a thin collar of
    // its own meridian and blur the end counts
    const int tube_len = 4;
    for (int h = 0; h + 1 < g; ++h) {
        auto [a, b] = hole_cells(h);
        std::array<int, 4> rim_a{vid(a.first, a.second), vid(a.first + 1, a.second),
                                 vid(a.first + 1, a.second + 1), vid(a.first, a.second + 1)};
        std::array<int, 4> rim_b_cell{vid(b.first, b.second), vid(b.first + 1, b.second),
                                      vid(b.first + 1, b.second + 1), vid(b.first, b.second + 1)};
        // reversed rim keeps the gluing orientable
        std::array<int, 4> rim_b{rim_b_cell[0], rim_b_cell[3], rim_b_cell[2], rim_b_cell[1]};

        std::vector<std::array<int, 4>> rings;
        rings.push_back(rim_a);
        for (int r = 1; r < tube_len; ++r) {
            std::array<int, 4> ring;
            for (int k = 0; k < 4; ++k) ring[k] = s.add_vertex();
            rings.push_back(ring);
        }
        rings.push_back(rim_b);
        for (int r = 0; r + 1 < int(rings.size()); ++r) {
            for (int k = 0; k < 4; ++k) {
                s.add_cell({rings[r][k], rings[r][(k + 1) % 4], rings[r + 1][(k + 1) % 4],
                            rings[r + 1][k]});
            }
        }
    }
    s.finalize();
    return s;
}

CombSurface CombSurface::subdivided() const {
    CombSurface out;
    for (int v = 0; v < nv_; ++v) out.add_vertex();
    std::vector<int> edge_mid(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) edge_mid[e] = out.add_vertex();
    for (int c = 0; c < cell_count(); ++c) {
        int center = out.add_vertex();
        const auto& cyc = cells_[c];
        const int k = int(cyc.size());
        for (int i = 0; i < k; ++i) {
            int m_prev = edge_mid[find_edge(cyc[(i + k - 1) % k], cyc[i])];
            int m_next = edge_mid[find_edge(cyc[i], cyc[(i + 1) % k])];
            out.add_cell({cyc[i], m_next, center, m_prev});
        }
    }
    out.finalize();
    return out;
}

int MarkedComplex::k_component_count() const {
    const CombSurface& s = *surface;
    UnionFind uf(s.vertex_count());
    for (int e = 0; e < s.edge_count(); ++e) {
        if (k_edge[e]) uf.unite(s.edge(e)[0], s.edge(e)[1]);
    }
    for (int c = 0; c < s.cell_count(); ++c) {
        if (k_cell[c]) {
            const auto& cyc = s.cell(c);
            for (std::size_t i = 1; i < cyc.size(); ++i) uf.unite(cyc[0], cyc[i]);
        }
    }
    std::vector<int> roots;
    for (int v = 0; v < s.vertex_count(); ++v) {
        if (k_vert[v]) roots.push_back(uf.find(v));
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return int(roots.size());
}

MarkedComplex make_marked(const CombSurface& surface, const std::vector<int>& k_edges,
                          const std::vector<int>& k_cells, std::optional<int> seed_cell) {
    MarkedComplex mc;
    mc.surface = &surface;
    mc.k_vert.assign(surface.vertex_count(), 0);
    mc.k_edge.assign(surface.edge_count(), 0);
    mc.k_cell.assign(surface.cell_count(), 0);

    for (int c : k_cells) {
        mc.k_cell[c] = 1;
        for (int e : surface.cell_edges(c)) mc.k_edge[e] = 1;
    }
    for (int e : k_edges) mc.k_edge[e] = 1;
    for (int e = 0; e < surface.edge_count(); ++e) {
        if (mc.k_edge[e]) {
            mc.k_vert[surface.edge(e)[0]] = 1;
            mc.k_vert[surface.edge(e)[1]] = 1;
        }
    }

    // residual domains: non-K cells joined across non-K edges
    std::vector<std::int32_t> comp(surface.cell_count(), -1);
    std::vector<int> stack;
    std::vector<std::size_t> comp_size;
    for (int start = 0; start < surface.cell_count(); ++start) {
        if (mc.k_cell[start] || comp[start] >= 0) continue;
        std::int32_t id = std::int32_t(comp_size.size());
        comp[start] = id;
        comp_size.push_back(0);
        stack.push_back(start);
        while (!stack.empty()) {
            int c = stack.back();
            stack.pop_back();
            ++comp_size[id];
            for (int e : surface.cell_edges(c)) {
                if (mc.k_edge[e]) continue;
                int other = surface.edge_cells(e)[0] == c ? surface.edge_cells(e)[1]
                                                          : surface.edge_cells(e)[0];
                if (!mc.k_cell[other] && comp[other] < 0) {
                    comp[other] = id;
                    stack.push_back(other);
                }
            }
        }
    }
    std::int32_t chosen = -1;
    if (seed_cell) {
        chosen = comp[*seed_cell];
        if (chosen < 0) throw std::invalid_argument("seed cell belongs to K");
    } else if (!comp_size.empty()) {
        chosen = std::int32_t(
            std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());
    }
    mc.u_cell.assign(surface.cell_count(), 0);
    for (int c = 0; c < surface.cell_count(); ++c) mc.u_cell[c] = comp[c] == chosen;
    return mc;
}

namespace {

// BFS distance (in cells, through non-K edges) from the cells whose closure
// meets K; 0 = not in U, 1 = touching K.
std::vector<int> collar_distance(const MarkedComplex& mc) {
    const CombSurface& s = *mc.surface;
    std::vector<int> dist(s.cell_count(), 0);
    std::vector<int> frontier, next;
    for (int c = 0; c < s.cell_count(); ++c) {
        if (!mc.u_cell[c]) continue;
        bool touch = false;
        for (int v : s.cell(c)) {
            if (mc.k_vert[v]) {
                touch = true;
                break;
            }
        }
        if (touch) {
            dist[c] = 1;
            frontier.push_back(c);
        }
    }
    int level = 1;
    while (!frontier.empty()) {
        ++level;
        next.clear();
        for (int c : frontier) {
            for (int e : s.cell_edges(c)) {
                if (mc.k_edge[e]) continue;
                int other =
                    s.edge_cells(e)[0] == c ? s.edge_cells(e)[1] : s.edge_cells(e)[0];
                if (mc.u_cell[other] && dist[other] == 0) {
                    dist[other] = level;
                    next.push_back(other);
                }
            }
        }
        frontier.swap(next);
    }
    return dist;
}

int component_count_within(const MarkedComplex& mc, const std::vector<int>& dist, int k) {
    const CombSurface& s = *mc.surface;
    std::vector<char> in(s.cell_count(), 0);
    for (int c = 0; c < s.cell_count(); ++c) in[c] = dist[c] >= 1 && dist[c] <= k;
    std::vector<char> seen(s.cell_count(), 0);
    std::vector<int> stack;
    int count = 0;
    for (int start = 0; start < s.cell_count(); ++start) {
        if (!in[start] || seen[start]) continue;
        ++count;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            int c = stack.back();
            stack.pop_back();
            for (int e : s.cell_edges(c)) {
                if (mc.k_edge[e]) continue;
                int other =
                    s.edge_cells(e)[0] == c ? s.edge_cells(e)[1] : s.edge_cells(e)[0];
                if (in[other] && !seen[other]) {
                    seen[other] = 1;
                    stack.push_back(other);
                }
            }
        }
    }
    return count;
}

}  // namespace

int count_ends(const MarkedComplex& mc, int levels) {
    if (levels < 3) throw std::invalid_argument("need levels >= 3");
    std::vector<int> dist = collar_distance(mc);
    bool any = false;
    for (int c = 0; c < mc.surface->cell_count(); ++c) {
        if (dist[c] >= 1) {
            any = true;
            break;
        }
    }
    if (!any) return 0;  // K empty or unreachable from U: no ends face it

    std::vector<int> counts(levels + 1, 0);
    for (int k = 1; k <= levels; ++k) counts[k] = component_count_within(mc, dist, k);
    if (counts[1] != counts[2]) {
        throw NotStabilized("collar component counts at the two tightest levels disagree");
    }
    return counts[1];
}

BoundCheck check_bound(const MarkedComplex& mc, int levels) {
    BoundCheck out;
    out.ends = count_ends(mc, levels);
    out.m = mc.k_component_count();
    out.g = mc.surface->genus();
    out.holds = out.ends <= out.m * (out.g + 1);
    return out;
}

int frontier_components(const MarkedComplex& mc) {
    const CombSurface& s = *mc.surface;
    // K simplices adjacent to U cells
    std::vector<char> front_vert(s.vertex_count(), 0);
    for (int c = 0; c < s.cell_count(); ++c) {
        if (!mc.u_cell[c]) continue;
        for (int v : s.cell(c)) {
            if (mc.k_vert[v]) front_vert[v] = 1;
        }
    }
    UnionFind uf(s.vertex_count());
    for (int e = 0; e < s.edge_count(); ++e) {
        if (!mc.k_edge[e]) continue;
        int a = s.edge(e)[0], b = s.edge(e)[1];
        if (front_vert[a] && front_vert[b]) uf.unite(a, b);
    }
    std::vector<int> roots;
    for (int v = 0; v < s.vertex_count(); ++v) {
        if (front_vert[v]) roots.push_back(uf.find(v));
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return int(roots.size());
}

std::vector<int> segment_edges(const CombSurface& torus, int n,
                               const std::array<int, 4>& seg) {
    auto vid = [n](int i, int j) { return ((j % n + n) % n) * n + ((i % n + n) % n); };
    std::vector<int> out;
    int x0 = seg[0], y0 = seg[1], x1 = seg[2], y1 = seg[3];
    if (x0 != x1 && y0 != y1) {
        throw std::invalid_argument("fixture segments must be axis-aligned");
    }
    int steps = std::abs(x1 - x0) + std::abs(y1 - y0);
    int dx = (x1 > x0) - (x1 < x0);
    int dy = (y1 > y0) - (y1 < y0);
    for (int s = 0; s < steps; ++s) {
        int e = torus.find_edge(vid(x0 + s * dx, y0 + s * dy),
                                vid(x0 + (s + 1) * dx, y0 + (s + 1) * dy));
        if (e < 0) throw std::logic_error("segment edge missing from the grid");
        out.push_back(e);
    }
    return out;
}

MarkedComplex make_cross_fixture(const CombSurface& torus, int n) {
    int c = n / 2, h = n / 4;
    std::vector<int> edges = segment_edges(torus, n, {c - h, c, c + h, c});
    auto vertical = segment_edges(torus, n, {c, c - h, c, c + h});
    edges.insert(edges.end(), vertical.begin(), vertical.end());
    return make_marked(torus, edges);
}

MarkedComplex make_circle_segments_fixture(const CombSurface& torus, int n) {
    int c = n / 2, h = n / 4;
    std::vector<int> edges = segment_edges(torus, n, {0, c, n, c});  // full circle
    auto up = segment_edges(torus, n, {c, c, c, c + h});
    auto down = segment_edges(torus, n, {c, c - h, c, c});
    edges.insert(edges.end(), up.begin(), up.end());
    edges.insert(edges.end(), down.begin(), down.end());
    return make_marked(torus, edges);
}

}  // namespace saddlescope
