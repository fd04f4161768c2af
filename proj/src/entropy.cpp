#include "saddlescope/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "saddlescope/fixed_points.hpp"

namespace saddlescope {
namespace {

double polyline_length(const std::vector<double>& xs, const std::vector<double>& ys) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        len += std::hypot(xs[i + 1] - xs[i], ys[i + 1] - ys[i]);
    }
    return len;
}

// Advance the polyline one iterate, bisecting source segments until the image
// spacing passes h_max. Returns false when the vertex budget is hit.
bool advance_polyline(const MapSpec& map, std::vector<double>& xs, std::vector<double>& ys,
                      double h_max, std::size_t cap) {
    std::vector<double> ix = xs, iy = ys;
    eval_lift_batch(map, ix, iy);

    for (int pass = 0; pass < 40; ++pass) {
        std::vector<std::size_t> split;
        for (std::size_t i = 0; i + 1 < ix.size(); ++i) {
            if (std::hypot(ix[i + 1] - ix[i], iy[i + 1] - iy[i]) > h_max) split.push_back(i);
        }
        if (split.empty()) break;
        if (ix.size() + split.size() > cap) return false;

        std::vector<double> mx(split.size()), my(split.size());
        for (std::size_t n = 0; n < split.size(); ++n) {
            mx[n] = 0.5 * (xs[split[n]] + xs[split[n] + 1]);
            my[n] = 0.5 * (ys[split[n]] + ys[split[n] + 1]);
        }
        std::vector<double> imx = mx, imy = my;
        eval_lift_batch(map, imx, imy);

        std::vector<double> nx, ny, nix, niy;
        nx.reserve(xs.size() + split.size());
        ny.reserve(xs.size() + split.size());
        nix.reserve(xs.size() + split.size());
        niy.reserve(xs.size() + split.size());
        std::size_t cursor = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            nx.push_back(xs[i]);
            ny.push_back(ys[i]);
            nix.push_back(ix[i]);
            niy.push_back(iy[i]);
            if (cursor < split.size() && split[cursor] == i) {
                nx.push_back(mx[cursor]);
                ny.push_back(my[cursor]);
                nix.push_back(imx[cursor]);
                niy.push_back(imy[cursor]);
                ++cursor;
            }
        }
        xs.swap(nx);
        ys.swap(ny);
        ix.swap(nix);
        iy.swap(niy);
    }
    xs.swap(ix);
    ys.swap(iy);
    return true;
}

double least_squares_slope(const std::vector<std::pair<int, double>>& pts) {
    if (pts.size() < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (const auto& [i, v] : pts) {
        mx += i;
        my += v;
    }
    mx /= pts.size();
    my /= pts.size();
    double num = 0.0, den = 0.0;
    for (const auto& [i, v] : pts) {
        num += (i - mx) * (v - my);
        den += (i - mx) * (i - mx);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

std::vector<PlanePoint> default_growth_seed(const MapSpec& map) {
    if (map.kind == MapKind::LinearTorus) {
        // generic short segment; any non-eigendirection grows at the top eigenvalue
        return {{0.31, 0.17}, {0.31 + 7.07e-4, 0.17 + 7.07e-4}};
    }
    FixedPointRecord p = classify(map, TorusPoint{0.0, 0.0});
    Vec2 dir = p.is_saddle() ? p.unstable_direction : Vec2{1.0, 0.0};
    PlanePoint a{0.0, 0.0};
    return {a + 1e-4 * dir, a + (1e-4 + 1e-3) * dir};
}

EntropyReport length_growth_rate(const MapSpec& map, std::vector<PlanePoint> seed,
                                 const LengthGrowthOptions& opt) {
    if (opt.iterates < 5) throw std::invalid_argument("need at least 5 iterates");
    if (seed.size() < 2) throw std::invalid_argument("seed arc needs at least 2 vertices");

    EntropyReport rep;
    rep.method = EntropyMethod::LengthGrowth;

    std::vector<double> xs, ys;
    for (const auto& p : seed) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    if (polyline_length(xs, ys) <= 0.0) {
        throw std::invalid_argument("seed arc has zero length");
    }

    std::vector<std::pair<int, double>> logs;
    logs.push_back({0, std::log(polyline_length(xs, ys))});
    for (int it = 1; it <= opt.iterates; ++it) {
        if (!advance_polyline(map, xs, ys, opt.h_max, opt.vertex_cap)) {
            rep.budget_exceeded = true;
            break;
        }
        logs.push_back({it, std::log(polyline_length(xs, ys))});
    }

    std::size_t half = logs.size() / 2;
    rep.fit.assign(logs.begin() + half, logs.end());
    rep.bound = std::max(0.0, least_squares_slope(rep.fit));
    rep.found = rep.fit.size() >= 2;
    return rep;
}

namespace {

struct Frame {
    TorusPoint q;
    Vec2 du, ds;  // unit tangents
    Mat2 to_frame;

    // frame coordinates (a, b) of a torus point, wrap-nearest to q
    Vec2 coords(double x, double y) const {
        Vec2 d{wrap_delta(x, q.x), wrap_delta(y, q.y)};
        return to_frame * d;
    }
};

// connected components of the intersection mask that join the two s-aligned
// walls (first and last column of the frame box)
int full_height_strips(const std::vector<std::uint8_t>& mask, int res, double min_cells,
                       std::vector<std::uint8_t>* strips_out) {
    std::vector<std::int32_t> label(mask.size(), -1);
    std::vector<std::size_t> stack;
    int strips = 0;
    std::int32_t next = 0;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || label[start] >= 0) continue;
        bool touch_left = false, touch_right = false;
        std::size_t cells = 0;
        label[start] = next;
        stack.push_back(start);
        std::vector<std::size_t> member;
        while (!stack.empty()) {
            std::size_t c = stack.back();
            stack.pop_back();
            member.push_back(c);
            ++cells;
            int i = static_cast<int>(c % res);
            int j = static_cast<int>(c / res);
            if (i == 0) touch_left = true;
            if (i == res - 1) touch_right = true;
            const int ni[4] = {i - 1, i + 1, i, i};
            const int nj[4] = {j, j, j - 1, j + 1};
            for (int d = 0; d < 4; ++d) {
                if (ni[d] < 0 || ni[d] >= res || nj[d] < 0 || nj[d] >= res) continue;
                std::size_t nc = std::size_t(nj[d]) * res + ni[d];
                if (mask[nc] && label[nc] < 0) {
                    label[nc] = next;
                    stack.push_back(nc);
                }
            }
        }
        if (touch_left && touch_right && double(cells) >= min_cells) {
            ++strips;
            if (strips_out) {
                for (std::size_t c : member) (*strips_out)[c] = 1;
            }
        }
        ++next;
    }
    return strips;
}

// Count full-height strips of R ^ f^n(R) for n = 1..n_max in one inverse
// sweep: cell centers are pulled back step by step and tested against R.
std::vector<int> strip_counts(const MapSpec& map, const Frame& frame, double ha, double hs,
                              int res, int n_max, double min_cells,
                              std::vector<std::vector<std::uint8_t>>* masks) {
    std::vector<double> xs(std::size_t(res) * res), ys(std::size_t(res) * res);
    for (int j = 0; j < res; ++j) {
        for (int i = 0; i < res; ++i) {
            double a = ha * (2.0 * (i + 0.5) / res - 1.0);
            double b = hs * (2.0 * (j + 0.5) / res - 1.0);
            Vec2 world = frame.du * a + frame.ds * b;
            xs[std::size_t(j) * res + i] = frame.q.x + world.x;
            ys[std::size_t(j) * res + i] = frame.q.y + world.y;
        }
    }

    std::vector<int> counts(n_max + 1, 0);
    std::vector<std::uint8_t> mask(xs.size());
    for (int n = 1; n <= n_max; ++n) {
        eval_inverse_lift_batch(map, xs, ys);
        for (std::size_t c = 0; c < xs.size(); ++c) {
            Vec2 f = frame.coords(xs[c], ys[c]);
            mask[c] = (std::abs(f.x) <= ha && std::abs(f.y) <= hs) ? 1 : 0;
        }
        counts[n] = full_height_strips(mask, res, min_cells, nullptr);
        if (masks) (*masks)[n] = mask;
    }
    return counts;
}

}  // namespace

EntropyReport detect_horseshoe(const MapSpec& map, const IntersectionRecord& rec,
                               const ManifoldArc& u, const ManifoldArc& s,
                               const HorseshoeOptions& opt, HorseshoeCertificate* cert_out) {
    if (rec.verdict != Verdict::TopologicallyTransverse) {
        throw std::invalid_argument("horseshoe detection needs a transverse record");
    }

    EntropyReport rep;
    rep.method = EntropyMethod::HorseshoeShift;

    // local tangent frame at the refined crossing
    auto tangent = [](const ManifoldArc& arc, double t) {
        double dt = 1e-5 * t;
        PlanePoint a = arc.evaluate(std::max(arc.d0, t - dt));
        PlanePoint b = arc.evaluate(t + dt);
        return (b - a).normalized();
    };
    Frame frame;
    frame.q = rec.refined_point;
    frame.du = tangent(u, rec.t_u);
    frame.ds = tangent(s, rec.t_s);
    double det = frame.du.cross(frame.ds);
    if (std::abs(det) < 1e-9) return rep;  // tangent frame too degenerate to span
    frame.to_frame = Mat2{frame.du.x, frame.ds.x, frame.du.y, frame.ds.y}.inverse();

    for (double size : opt.sizes) {
        double ha = size, hs = size;
        std::vector<std::vector<std::uint8_t>> masks(opt.n_max + 1);
        std::vector<int> counts =
            strip_counts(map, frame, ha, hs, opt.resolution, opt.n_max, opt.min_strip_cells,
                         cert_out ? &masks : nullptr);
        for (int n = 1; n <= opt.n_max; ++n) {
            if (counts[n] < 2) continue;
            // re-verify at doubled resolution before accepting
            std::vector<int> fine = strip_counts(map, frame, ha, hs, 2 * opt.resolution, n,
                                                 4.0 * opt.min_strip_cells, nullptr);
            if (fine[n] < 2) continue;
            rep.found = true;
            rep.n = n;
            rep.bound = std::log(2.0) / n;
            if (cert_out) {
                cert_out->n = n;
                cert_out->half_u = ha;
                cert_out->half_s = hs;
                cert_out->dir_u = frame.du;
                cert_out->dir_s = frame.ds;
                cert_out->corner_q = frame.q;
                cert_out->resolution = opt.resolution;
                cert_out->mask = masks[n];
                cert_out->strip_count = counts[n];
            }
            return rep;
        }
    }
    return rep;  // found = false: no horseshoe up to n_max
}

}  // namespace saddlescope
