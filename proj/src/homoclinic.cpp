#include "saddlescope/homoclinic.hpp"

#include <algorithm>
#include <cmath>

namespace saddlescope {
namespace {

// Spatial hash of torus-projected polyline segments on a res x res grid.
// Segments are assumed short (<= a cell or so); each is filed under the
// cells covered by its reduced bounding box plus a one-cell margin.
class TorusSegmentHash {
public:
    TorusSegmentHash(std::span<const double> xs, std::span<const double> ys, int res)
        : xs_(xs), ys_(ys), res_(res) {
        std::vector<std::uint32_t> counts(std::size_t(res) * res + 1, 0);
        auto visit_cells = [&](std::size_t seg, auto&& fn) {
            double x0 = xs_[seg], x1 = xs_[seg + 1];
            double y0 = ys_[seg], y1 = ys_[seg + 1];
            int ia = static_cast<int>(std::floor(std::min(x0, x1) * res)) - 1;
            int ib = static_cast<int>(std::floor(std::max(x0, x1) * res)) + 1;
            int ja = static_cast<int>(std::floor(std::min(y0, y1) * res)) - 1;
            int jb = static_cast<int>(std::floor(std::max(y0, y1) * res)) + 1;
            for (int i = ia; i <= ib; ++i) {
                for (int j = ja; j <= jb; ++j) fn(cell(i, j));
            }
        };
        const std::size_t nseg = xs_.size() - 1;
        for (std::size_t s = 0; s < nseg; ++s) {
            visit_cells(s, [&](std::size_t c) { ++counts[c + 1]; });
        }
        for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
        offsets_ = counts;
        ids_.resize(offsets_.back());
        std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t s = 0; s < nseg; ++s) {
            visit_cells(s, [&](std::size_t c) { ids_[cursor[c]++] = std::uint32_t(s); });
        }
    }

    std::size_t cell(int i, int j) const {
        i %= res_;
        if (i < 0) i += res_;
        j %= res_;
        if (j < 0) j += res_;
        return std::size_t(j) * res_ + i;
    }

    template <typename Fn>
    void for_segment_candidates(const PlanePoint& a, const PlanePoint& b, Fn&& fn) const {
        int ia = static_cast<int>(std::floor(std::min(a.x, b.x) * res_)) - 1;
        int ib = static_cast<int>(std::floor(std::max(a.x, b.x) * res_)) + 1;
        int ja = static_cast<int>(std::floor(std::min(a.y, b.y) * res_)) - 1;
        int jb = static_cast<int>(std::floor(std::max(a.y, b.y) * res_)) + 1;
        for (int i = ia; i <= ib; ++i) {
            for (int j = ja; j <= jb; ++j) {
                std::size_t c = cell(i, j);
                for (std::uint32_t k = offsets_[c]; k < offsets_[c + 1]; ++k) fn(ids_[k]);
            }
        }
    }

private:
    std::span<const double> xs_, ys_;
    int res_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> ids_;
};

struct Candidate {
    double t_u, t_s;
    PlanePoint u_point;  // on u's lift
    bool valid = true;
};

// Local re-sampling refinement of one candidate crossing; curves sampled
// through the exact arc evaluators, the stable curve translated into the
// unstable arc's lift frame.
bool polish_candidate(const ManifoldArc& u, const ManifoldArc& s, double& t_u, double& t_s,
                      double wu, double ws, double tol, PlanePoint& out_u) {
    constexpr int kLocal = 17;
    PlanePoint qu = u.evaluate(t_u);
    PlanePoint qs = s.evaluate(t_s);
    Vec2 shift{std::nearbyint(qu.x - qs.x), std::nearbyint(qu.y - qs.y)};

    for (int round = 0; round < 10; ++round) {
        std::array<PlanePoint, kLocal> pu, ps;
        std::array<double, kLocal> tu_s, ts_s;
        for (int i = 0; i < kLocal; ++i) {
            double fu = -1.0 + 2.0 * i / (kLocal - 1);
            tu_s[i] = std::max(u.d0, t_u + fu * wu);
            ts_s[i] = std::max(s.d0, t_s + fu * ws);
            pu[i] = u.evaluate(tu_s[i]);
            ps[i] = s.evaluate(ts_s[i]) + shift;
        }
        bool found = false;
        double best_d2 = 1e300;
        double new_tu = t_u, new_ts = t_s;
        PlanePoint new_pt = qu;
        for (int i = 0; i + 1 < kLocal; ++i) {
            for (int j = 0; j + 1 < kLocal; ++j) {
                auto hit = segment_intersection({pu[i].x, pu[i].y}, {pu[i + 1].x, pu[i + 1].y},
                                                {ps[j].x, ps[j].y}, {ps[j + 1].x, ps[j + 1].y});
                if (!hit) continue;
                double cu = tu_s[i] + hit->s * (tu_s[i + 1] - tu_s[i]);
                double cs = ts_s[j] + hit->t * (ts_s[j + 1] - ts_s[j]);
                double d2 = (cu - t_u) * (cu - t_u) + (cs - t_s) * (cs - t_s);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    new_tu = cu;
                    new_ts = cs;
                    new_pt = {hit->point.x, hit->point.y};
                    found = true;
                }
            }
        }
        if (!found) return round > 0;  // fine scale shows no crossing: phantom
        double moved = std::hypot(new_pt.x - qu.x, new_pt.y - qu.y);
        t_u = new_tu;
        t_s = new_ts;
        qu = new_pt;
        out_u = new_pt;
        if (moved < 0.1 * tol && round > 0) break;
        wu *= 0.25;
        ws *= 0.25;
    }
    // residual between the two curve points must close to tube tolerance
    PlanePoint a = u.evaluate(t_u);
    PlanePoint b = s.evaluate(t_s) + shift;
    out_u = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    return (a - b).norm() <= tol;
}

}  // namespace

const ManifoldArc& BranchSet::get(Branch b) const {
    switch (b) {
        case Branch::UnstablePlus: return u_plus;
        case Branch::UnstableMinus: return u_minus;
        case Branch::StablePlus: return s_plus;
        case Branch::StableMinus: return s_minus;
    }
    return u_plus;
}

ManifoldArc& BranchSet::get(Branch b) {
    return const_cast<ManifoldArc&>(static_cast<const BranchSet*>(this)->get(b));
}

PairScan scan_pair(const ManifoldArc& u, const ManifoldArc& s, int classify_limit,
                   double window) {
    PairScan scan;
    scan.unstable = u.branch;
    scan.stable = s.branch;
    scan.records = find_intersections(u, s, window);
    int budget = classify_limit;
    for (auto& rec : scan.records) {
        if (budget-- <= 0) break;
        rec = classify_transversality(rec, u, s);
        if (rec.verdict == Verdict::TopologicallyTransverse) {
            scan.first_transverse = rec;
            break;
        }
    }
    return scan;
}

BranchSet grow_branch_set(const MapSpec& map, const FixedPointRecord& saddle,
                          double torus_length, const GrowSettings& settings) {
    BranchSet set{seed_branch(map, saddle, Branch::UnstablePlus, settings),
                  seed_branch(map, saddle, Branch::UnstableMinus, settings),
                  seed_branch(map, saddle, Branch::StablePlus, settings),
                  seed_branch(map, saddle, Branch::StableMinus, settings)};
    grow_to_length(set.u_plus, torus_length);
    grow_to_length(set.u_minus, torus_length);
    grow_to_length(set.s_plus, torus_length);
    grow_to_length(set.s_minus, torus_length);
    return set;
}

std::vector<IntersectionRecord> find_intersections(const ManifoldArc& u, const ManifoldArc& s,
                                                   double window) {
    std::vector<IntersectionRecord> out;
    if (u.size() < 2 || s.size() < 2) return out;

    const double tol = std::max(u.settings.tube_tol, s.settings.tube_tol);
    int res = std::clamp(
        static_cast<int>(1.0 / std::max(u.settings.h_max, s.settings.h_max)) / 2, 64, 1024);
    TorusSegmentHash hash(
        std::span<const double>(u.x), std::span<const double>(u.y), res);

    std::vector<std::uint32_t> stamp(u.size(), 0xffffffffu);
    std::vector<Candidate> cands;

    for (std::size_t j = 0; j + 1 < s.size(); ++j) {
        PlanePoint sa{s.x[j], s.y[j]}, sb{s.x[j + 1], s.y[j + 1]};
        hash.for_segment_candidates(sa, sb, [&](std::uint32_t i) {
            if (stamp[i] == j) return;
            stamp[i] = std::uint32_t(j);
            PlanePoint ua{u.x[i], u.y[i]}, ub{u.x[i + 1], u.y[i + 1]};
            Vec2 w{std::nearbyint(0.5 * (ua.x + ub.x) - 0.5 * (sa.x + sb.x)),
                   std::nearbyint(0.5 * (ua.y + ub.y) - 0.5 * (sa.y + sb.y))};
            Vec2 du = ub - ua;
            Vec2 ds = sb - sa;
            // collinear chatter (shared vertices, stitched levels) is not a
            // transversal candidate
            if (std::abs(du.cross(ds)) < 1e-9 * du.norm() * ds.norm()) return;
            auto hit = segment_intersection({ua.x, ua.y}, {ub.x, ub.y},
                                            {sa.x + w.x, sa.y + w.y}, {sb.x + w.x, sb.y + w.y});
            if (!hit) return;
            Candidate c;
            c.t_u = u.t[i] + hit->s * (u.t[i + 1] - u.t[i]);
            c.t_s = s.t[j] + hit->t * (s.t[j + 1] - s.t[j]);
            c.u_point = {hit->point.x, hit->point.y};
            cands.push_back(c);
        });
    }

    // polish candidates on the true curves
    for (auto& c : cands) {
        double wu = std::max(1e-12, 0.01 * c.t_u);
        double ws = std::max(1e-12, 0.01 * c.t_s);
        PlanePoint coarse = c.u_point;
        PlanePoint refined = coarse;
        if (!polish_candidate(u, s, c.t_u, c.t_s, wu, ws, tol, refined)) {
            c.valid = false;
            continue;
        }
        IntersectionRecord rec;
        rec.unstable_branch = u.branch;
        rec.stable_branch = s.branch;
        rec.point = TorusPoint::reduce(coarse.x, coarse.y);
        rec.refined_point = TorusPoint::reduce(refined.x, refined.y);
        rec.t_u = c.t_u;
        rec.t_s = c.t_s;
        out.push_back(rec);
    }

    std::sort(out.begin(), out.end(), [](const IntersectionRecord& a, const IntersectionRecord& b) {
        return a.t_u + a.t_s < b.t_u + b.t_s;
    });
    std::vector<IntersectionRecord> merged;
    for (const auto& rec : out) {
        bool dup = false;
        for (const auto& kept : merged) {
            if (torus_dist(rec.refined_point, kept.refined_point) < window) {
                dup = true;
                break;
            }
        }
        if (!dup) merged.push_back(rec);
    }
    return merged;
}

namespace {

struct HalfExit {
    bool found = false;
    Vec2 exit_point;
    std::vector<Vec2> chain;  // samples from the crossing out to the exit
};

// Walk one half of a local curve outward until it leaves the disk of radius r.
HalfExit walk_half(const LocalCurve& curve, Vec2 q, double dir, double r, double cap,
                   int samples) {
    HalfExit h;
    double lo = 0.0, hi = 1e-9;
    while (hi < cap) {
        if ((curve(dir * hi) - q).norm() > r) break;
        lo = hi;
        hi *= 2.0;
    }
    if (hi >= cap) return h;
    for (int it = 0; it < 60; ++it) {  // bisect the first exit
        double mid = 0.5 * (lo + hi);
        if ((curve(dir * mid) - q).norm() > r) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    h.found = true;
    h.chain.reserve(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        h.chain.push_back(curve(dir * hi * double(i) / samples));
    }
    h.exit_point = h.chain.back();
    return h;
}

int side_of_chain(const Vec2& p, const std::vector<Vec2>& chain) {
    double best = 1e300;
    int sign = 0;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        double tparam = 0.0;
        double d = point_segment_distance(p, chain[i], chain[i + 1], &tparam);
        if (d < best) {
            best = d;
            Vec2 tangent = chain[i + 1] - chain[i];
            Vec2 off = p - (chain[i] + tangent * tparam);
            double c = tangent.cross(off);
            double scale = tangent.norm() * off.norm();
            sign = (scale > 0.0 && std::abs(c) > 1e-13 * scale) ? (c > 0.0 ? 1 : -1) : 0;
        }
    }
    return sign;
}

bool chains_cross_away_from_center(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                                   const Vec2& q, double r) {
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            auto hit = segment_intersection(a[i], a[i + 1], b[j], b[j + 1]);
            if (hit && (hit->point - q).norm() > 0.05 * r) return true;
        }
    }
    return false;
}

}  // namespace

std::pair<Verdict, std::array<int, 4>> classify_crossing(const LocalCurve& u,
                                                         const LocalCurve& s, int* depth_out,
                                                         const TransversalityOptions& opt) {
    Vec2 q = (u(0.0) + s(0.0)) * 0.5;
    double r = opt.initial_radius;
    std::array<int, 4> prev{0, 0, 0, 0};
    bool have_prev = false;

    for (int depth = 0; depth <= opt.max_halvings; ++depth, r *= 0.5) {
        HalfExit up = walk_half(u, q, +1.0, r, 1e9, opt.samples);
        HalfExit um = walk_half(u, q, -1.0, r, 1e9, opt.samples);
        HalfExit sp = walk_half(s, q, +1.0, r, 1e9, opt.samples);
        HalfExit sm = walk_half(s, q, -1.0, r, 1e9, opt.samples);
        if (!up.found || !um.found || !sp.found || !sm.found) {
            have_prev = false;
            continue;
        }

        std::vector<Vec2> s_chain(sm.chain.rbegin(), sm.chain.rend());
        s_chain.insert(s_chain.end(), sp.chain.begin() + 1, sp.chain.end());
        std::vector<Vec2> u_chain(um.chain.rbegin(), um.chain.rend());
        u_chain.insert(u_chain.end(), up.chain.begin() + 1, up.chain.end());

        // the disk must be split by a single strand of each curve
        if (chains_cross_away_from_center(u_chain, s_chain, q, r)) {
            have_prev = false;
            continue;
        }

        std::array<int, 4> sig{side_of_chain(up.exit_point, s_chain),
                               side_of_chain(um.exit_point, s_chain),
                               side_of_chain(sp.exit_point, u_chain),
                               side_of_chain(sm.exit_point, u_chain)};
        bool valid = sig[0] != 0 && sig[1] != 0 && sig[2] != 0 && sig[3] != 0;
        if (!valid) {
            have_prev = false;
            continue;
        }
        if (have_prev && sig == prev) {
            if (depth_out) *depth_out = depth;
            bool transverse = sig[0] * sig[1] < 0 && sig[2] * sig[3] < 0;
            return {transverse ? Verdict::TopologicallyTransverse
                               : Verdict::TangentialOrUnresolved,
                    sig};
        }
        prev = sig;
        have_prev = true;
    }
    if (depth_out) *depth_out = opt.max_halvings;
    return {Verdict::TangentialOrUnresolved, prev};
}

IntersectionRecord classify_transversality(IntersectionRecord rec, const ManifoldArc& u,
                                           const ManifoldArc& s,
                                           const TransversalityOptions& opt) {
    PlanePoint qu = u.evaluate(rec.t_u);
    PlanePoint qs = s.evaluate(rec.t_s);
    Vec2 shift{std::nearbyint(qu.x - qs.x), std::nearbyint(qu.y - qs.y)};

    double tu0 = rec.t_u, ts0 = rec.t_s;
    LocalCurve u_local = [&u, tu0](double tau) {
        PlanePoint p = u.evaluate(std::max(u.d0, tu0 + tau * tu0));
        return Vec2{p.x, p.y};
    };
    LocalCurve s_local = [&s, ts0, shift](double tau) {
        PlanePoint p = s.evaluate(std::max(s.d0, ts0 + tau * ts0)) + shift;
        return Vec2{p.x, p.y};
    };

    TransversalityOptions local = opt;
    local.initial_radius = std::min(opt.initial_radius, 0.2);
    int depth = 0;
    auto [verdict, sig] = classify_crossing(u_local, s_local, &depth, local);
    rec.verdict = verdict;
    rec.side_signature = sig;
    rec.refinement_depth = depth;
    return rec;
}

OmegaDecomposition omega_analysis(const MapSpec& map, const IntersectionRecord& rec,
                                  const ManifoldArc& u, const ManifoldArc& s, int grid_res) {
    (void)map;
    const double lam_u = u.lambda;
    const double lam_s = s.lambda;
    const double t_hi = rec.t_u * lam_u * lam_u * lam_u;
    const double s_lo = rec.t_s / (lam_s * lam_s * lam_s);
    if (u.tmax() < t_hi) {
        throw ArcsTooShort("unstable arc does not reach the third image of q");
    }
    if (s_lo < s.d0) {
        throw ArcsTooShort("stable arc seed scale exceeds the pulled-back q parameter");
    }

    OmegaDecomposition out;
    out.q = rec.refined_point;

    auto slice = [](const ManifoldArc& arc, double lo, double hi, std::vector<double>& xs,
                    std::vector<double>& ys) {
        PlanePoint a = arc.evaluate(lo);
        xs.push_back(a.x);
        ys.push_back(a.y);
        auto i0 = std::upper_bound(arc.t.begin(), arc.t.end(), lo) - arc.t.begin();
        for (std::size_t i = i0; i < arc.size() && arc.t[i] < hi; ++i) {
            xs.push_back(arc.x[i]);
            ys.push_back(arc.y[i]);
        }
        PlanePoint b = arc.evaluate(hi);
        xs.push_back(b.x);
        ys.push_back(b.y);
    };
    slice(u, rec.t_u, t_hi, out.omega_u_x, out.omega_u_y);
    slice(s, s_lo, rec.t_s, out.omega_s_x, out.omega_s_y);

    int res = grid_res;
    while (true) {
        TorusGrid grid(res);
        grid.rasterize_polyline(out.omega_u_x, out.omega_u_y, 1);
        grid.rasterize_polyline(out.omega_s_x, out.omega_s_y, 2);
        out.labeling = label_complement_grid(grid);
        out.grid_res = res;
        if (out.labeling.resolved_count >= 2) break;
        if (2 * res > 4096) {
            throw OmegaFailure("complement stayed connected up to resolution 4096");
        }
        res *= 2;
    }

    out.a_component = out.labeling.component_of(u.saddle.location);
    out.all_components_touch_both = true;
    for (std::size_t c = 0; c < out.labeling.touches.size(); ++c) {
        if (!out.labeling.resolved[c]) continue;  // sub-collar sliver
        std::uint16_t touch = out.labeling.touches[c];
        if ((touch & 1) == 0 || (touch & 2) == 0) {
            out.all_components_touch_both = false;
            break;
        }
    }
    return out;
}

std::vector<IntersectionRecord> omega_candidates(std::vector<IntersectionRecord> records,
                                                 double lambda) {
    double lam3 = lambda * lambda * lambda;
    std::sort(records.begin(), records.end(),
              [lam3](const IntersectionRecord& a, const IntersectionRecord& b) {
                  return lam3 * a.t_u + a.t_s < lam3 * b.t_u + b.t_s;
              });
    return records;
}

ConnectionReport connection_probe(const ManifoldArc& u, const ManifoldArc& s, double tol) {
    ConnectionReport rep;
    rep.tol = tol;
    const int res = 512;

    for (int stage = 1; stage <= 3; ++stage) {
        double frac = double(stage) / 3.0;
        // prefix of each polyline by torus length fraction
        auto prefix_end = [&](const ManifoldArc& arc) {
            double target = arc.torus_length * frac;
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < arc.size(); ++i) {
                acc += std::hypot(arc.x[i + 1] - arc.x[i], arc.y[i + 1] - arc.y[i]);
                if (acc >= target) return i + 2;
            }
            return arc.size();
        };
        std::size_t un = prefix_end(u);
        std::size_t sn = prefix_end(s);
        if (un < 2 || sn < 2) continue;

        // grid distance transform (BFS hops) away from the stable prefix
        TorusGrid grid(res);
        grid.rasterize_polyline(std::span<const double>(s.x.data(), sn),
                                std::span<const double>(s.y.data(), sn), 1);
        std::vector<std::int32_t> dist(std::size_t(res) * res, -1);
        std::vector<std::size_t> frontier, next;
        for (std::size_t c = 0; c < dist.size(); ++c) {
            if (grid.tags()[c] != 0) {
                dist[c] = 0;
                frontier.push_back(c);
            }
        }
        std::int32_t level = 0;
        while (!frontier.empty()) {
            ++level;
            next.clear();
            for (std::size_t c : frontier) {
                int i = static_cast<int>(c % res);
                int j = static_cast<int>(c / res);
                const int ni[4] = {i - 1, i + 1, i, i};
                const int nj[4] = {j, j, j - 1, j + 1};
                for (int d = 0; d < 4; ++d) {
                    std::size_t nc = grid.index(ni[d], nj[d]);
                    if (dist[nc] < 0) {
                        dist[nc] = level;
                        next.push_back(nc);
                    }
                }
            }
            frontier.swap(next);
        }

        double worst = 0.0;
        std::size_t stride = std::max<std::size_t>(1, un / 40000);
        for (std::size_t i = 0; i < un; i += stride) {
            TorusPoint p = u.torus_point(i);
            int ci = std::min(res - 1, static_cast<int>(p.x * res));
            int cj = std::min(res - 1, static_cast<int>(p.y * res));
            worst = std::max(worst, double(dist[grid.index(ci, cj)]) / res);
        }
        rep.defect[stage - 1] = worst;
    }
    rep.connection_suspected = rep.defect[2] <= tol;
    return rep;
}

}  // namespace saddlescope
