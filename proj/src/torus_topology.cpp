#include "saddlescope/torus_topology.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace saddlescope {

std::pair<int, int> ClosedCurve::homology() const {
    if (vertices.size() < 2) return {0, 0};
    Vec2 d = vertices.back() - vertices.front();
    int a = static_cast<int>(std::lround(d.x));
    int b = static_cast<int>(std::lround(d.y));
    if (std::abs(d.x - a) > 1e-9 || std::abs(d.y - b) > 1e-9) {
        throw std::invalid_argument("curve does not close up to an integer vector");
    }
    return {a, b};
}

ClosedCurve ClosedCurve::straight(int a, int b, PlanePoint base, int samples) {
    ClosedCurve c;
    c.vertices.reserve(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        double u = double(i) / samples;
        c.vertices.push_back({base.x + a * u, base.y + b * u});
    }
    return c;
}

void TorusGrid::rasterize_segment(PlanePoint a, PlanePoint b, std::uint16_t tag_bit) {
    const double r = res_;
    double ax = a.x * r, ay = a.y * r;
    double bx = b.x * r, by = b.y * r;
    double dx = bx - ax, dy = by - ay;

    int ci = static_cast<int>(std::floor(ax));
    int cj = static_cast<int>(std::floor(ay));
    const int ei = static_cast<int>(std::floor(bx));
    const int ej = static_cast<int>(std::floor(by));

    tags_[index(ci, cj)] |= tag_bit;

    int step_i = dx > 0 ? 1 : -1;
    int step_j = dy > 0 ? 1 : -1;
    // parametric distance to the next vertical / horizontal grid line
    double t_max_x = dx != 0.0 ? ((dx > 0 ? ci + 1 - ax : ax - ci) / std::abs(dx)) : 2.0;
    double t_max_y = dy != 0.0 ? ((dy > 0 ? cj + 1 - ay : ay - cj) / std::abs(dy)) : 2.0;
    double t_dx = dx != 0.0 ? 1.0 / std::abs(dx) : 2.0;
    double t_dy = dy != 0.0 ? 1.0 / std::abs(dy) : 2.0;

    int guard = 4 * (std::abs(ei - ci) + std::abs(ej - cj)) + 8;
    while ((ci != ei || cj != ej) && guard-- > 0) {
        if (t_max_x <= t_max_y) {
            ci += step_i;
            t_max_x += t_dx;
        } else {
            cj += step_j;
            t_max_y += t_dy;
        }
        tags_[index(ci, cj)] |= tag_bit;
    }
    tags_[index(ei, ej)] |= tag_bit;
}

void TorusGrid::rasterize_polyline(std::span<const double> xs, std::span<const double> ys,
                                   std::uint16_t tag_bit) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        rasterize_segment({xs[i], ys[i]}, {xs[i + 1], ys[i + 1]}, tag_bit);
    }
}

void TorusGrid::rasterize_curve(const ClosedCurve& c, std::uint16_t tag_bit) {
    for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i) {
        rasterize_segment(c.vertices[i], c.vertices[i + 1], tag_bit);
    }
}

std::size_t TorusGrid::occupied_count() const {
    std::size_t n = 0;
    for (auto t : tags_) n += (t != 0);
    return n;
}

std::int32_t ComponentLabeling::label_at(const TorusPoint& p) const {
    int i = std::min(resolution - 1, static_cast<int>(p.x * resolution));
    int j = std::min(resolution - 1, static_cast<int>(p.y * resolution));
    return labels[std::size_t(j) * resolution + i];
}

std::int32_t ComponentLabeling::component_of(const TorusPoint& p) const {
    if (std::int32_t l = label_at(p); l >= 0) return l;
    // spiral outwards to the nearest free cell
    int i0 = std::min(resolution - 1, static_cast<int>(p.x * resolution));
    int j0 = std::min(resolution - 1, static_cast<int>(p.y * resolution));
    auto wrap = [this](int v) {
        v %= resolution;
        return v < 0 ? v + resolution : v;
    };
    for (int radius = 1; radius < resolution / 2; ++radius) {
        for (int dj = -radius; dj <= radius; ++dj) {
            for (int di = -radius; di <= radius; ++di) {
                if (std::max(std::abs(di), std::abs(dj)) != radius) continue;
                std::int32_t l =
                    labels[std::size_t(wrap(j0 + dj)) * resolution + wrap(i0 + di)];
                if (l >= 0) return l;
            }
        }
    }
    return -1;
}

void ComponentLabeling::write_pgm(std::ostream& os) const {
    os << "P2\n" << resolution << ' ' << resolution << '\n' << component_count + 1 << '\n';
    for (int j = 0; j < resolution; ++j) {
        for (int i = 0; i < resolution; ++i) {
            std::int32_t l = labels[std::size_t(j) * resolution + i];
            os << (l < 0 ? 0 : l + 1) << (i + 1 == resolution ? '\n' : ' ');
        }
    }
}

ComponentLabeling label_complement_grid(TorusGrid& grid) {
    const int res = grid.resolution();
    ComponentLabeling out;
    out.resolution = res;
    out.labels.assign(std::size_t(res) * res, -2);  // -2 unvisited free, -1 curve

    const auto& tags = grid.tags();
    for (std::size_t c = 0; c < tags.size(); ++c) {
        if (tags[c] != 0) out.labels[c] = -1;
    }

    std::vector<std::size_t> stack;
    std::int32_t next = 0;
    for (std::size_t start = 0; start < out.labels.size(); ++start) {
        if (out.labels[start] != -2) continue;
        out.labels[start] = next;
        stack.push_back(start);
        std::uint16_t touch = 0;
        bool has_interior = false;
        while (!stack.empty()) {
            std::size_t c = stack.back();
            stack.pop_back();
            int i = static_cast<int>(c % res);
            int j = static_cast<int>(c / res);
            bool clear = true;
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (tags[grid.index(i + di, j + dj)] != 0) clear = false;
                }
            }
            has_interior = has_interior || clear;
            const int ni[4] = {i - 1, i + 1, i, i};
            const int nj[4] = {j, j, j - 1, j + 1};
            for (int d = 0; d < 4; ++d) {
                std::size_t nc = grid.index(ni[d], nj[d]);
                if (out.labels[nc] == -2) {
                    out.labels[nc] = next;
                    stack.push_back(nc);
                } else if (out.labels[nc] == -1) {
                    touch |= tags[nc];
                }
            }
        }
        out.touches.push_back(touch);
        out.resolved.push_back(has_interior);
        if (has_interior) ++out.resolved_count;
        ++next;
    }
    out.component_count = next;
    return out;
}

ComponentLabeling label_complement(const std::vector<ClosedCurve>& curves, int resolution) {
    if (resolution < 64 || resolution > 4096) {
        throw std::invalid_argument("resolution must be in [64, 4096]");
    }
    TorusGrid grid(resolution);
    for (std::size_t i = 0; i < curves.size(); ++i) {
        grid.rasterize_curve(curves[i], static_cast<std::uint16_t>(1u << (i % 16)));
    }
    ComponentLabeling out = label_complement_grid(grid);

    // doubling check: if doubling the resolution separates strands that this
    // resolution fused, flag the labeling as coarse
    if (2 * resolution <= 4096) {
        TorusGrid fine(2 * resolution);
        for (std::size_t i = 0; i < curves.size(); ++i) {
            fine.rasterize_curve(curves[i], static_cast<std::uint16_t>(1u << (i % 16)));
        }
        ComponentLabeling fine_labels = label_complement_grid(fine);
        out.coarse_flag = fine_labels.component_count != out.component_count;
    }
    return out;
}

namespace {

struct Crossing {
    double pos;  // parameter along curve a, for dedup
    int sign;
};

// All torus crossings of two lift segments: compare a's segment against the
// integer translates of b's that can reach it.
void segment_crossings(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1,
                       double s_base, std::vector<Crossing>& out, bool& degenerate) {
    double cx = 0.5 * (a0.x + a1.x) - 0.5 * (b0.x + b1.x);
    double cy = 0.5 * (a0.y + a1.y) - 0.5 * (b0.y + b1.y);
    int mx = static_cast<int>(std::lround(cx));
    int my = static_cast<int>(std::lround(cy));
    double reach_a = std::max(std::abs(a1.x - a0.x), std::abs(a1.y - a0.y));
    double reach_b = std::max(std::abs(b1.x - b0.x), std::abs(b1.y - b0.y));
    int spread = static_cast<int>(std::ceil(0.5 * (reach_a + reach_b))) + 1;
    for (int tx = mx - spread; tx <= mx + spread; ++tx) {
        for (int ty = my - spread; ty <= my + spread; ++ty) {
            Vec2 o{double(tx), double(ty)};
            auto hit = segment_intersection(a0, a1, b0 + o, b1 + o);
            if (!hit) continue;
            const double eps = 1e-12;
            if (hit->s < eps || hit->s > 1.0 - eps || hit->t < eps || hit->t > 1.0 - eps) {
                degenerate = true;  // endpoint-grazing: not in general position
                continue;
            }
            out.push_back({s_base + hit->s, hit->sign});
        }
    }
}

std::optional<int> crossing_sum(const ClosedCurve& a, const ClosedCurve& b) {
    std::vector<Crossing> crossings;
    bool degenerate = false;
    for (std::size_t i = 0; i + 1 < a.vertices.size(); ++i) {
        Vec2 a0{a.vertices[i].x, a.vertices[i].y};
        Vec2 a1{a.vertices[i + 1].x, a.vertices[i + 1].y};
        for (std::size_t j = 0; j + 1 < b.vertices.size(); ++j) {
            Vec2 b0{b.vertices[j].x, b.vertices[j].y};
            Vec2 b1{b.vertices[j + 1].x, b.vertices[j + 1].y};
            segment_crossings(a0, a1, b0, b1, double(i), crossings, degenerate);
        }
    }
    if (degenerate) return std::nullopt;
    int sum = 0;
    for (const auto& c : crossings) sum += c.sign;
    return sum;
}

ClosedCurve jittered(const ClosedCurve& c, std::uint64_t salt) {
    ClosedCurve out = c;
    for (std::size_t i = 0; i + 1 < out.vertices.size(); ++i) {
        std::uint64_t key = salt * 0x100000001b3ull + i;
        double jx = (hash_unit(key) - 0.5) * 2e-9;
        double jy = (hash_unit(key ^ 0x5bd1e995u) - 0.5) * 2e-9;
        out.vertices[i].x += jx;
        out.vertices[i].y += jy;
    }
    // keep the closure displacement an exact integer vector
    auto [ha, hb] = c.homology();
    out.vertices.back() = {out.vertices.front().x + ha, out.vertices.front().y + hb};
    return out;
}

}  // namespace

int intersection_number(const ClosedCurve& a, const ClosedCurve& b) {
    if (auto sum = crossing_sum(a, b)) return *sum;
    for (std::uint64_t attempt = 1; attempt <= 3; ++attempt) {
        if (auto sum = crossing_sum(jittered(a, attempt), jittered(b, attempt + 17))) {
            return *sum;
        }
    }
    throw NonGenericPosition("degenerate crossings persist after jitter retries");
}

}  // namespace saddlescope
