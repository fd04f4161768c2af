#include "saddlescope/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "saddlescope/torus_topology.hpp"

namespace saddlescope {
namespace {

constexpr int kSeedSamples = 17;
constexpr int kMaxRefinePasses = 48;

double turning_angle(const PlanePoint& a, const PlanePoint& b, const PlanePoint& c) {
    Vec2 u = b - a;
    Vec2 v = c - b;
    return std::abs(std::atan2(u.cross(v), u.dot(v)));
}

}  // namespace

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::UnstablePlus: return "UnstablePlus";
        case Branch::UnstableMinus: return "UnstableMinus";
        case Branch::StablePlus: return "StablePlus";
        case Branch::StableMinus: return "StableMinus";
    }
    return "?";
}

bool is_unstable(Branch b) {
    return b == Branch::UnstablePlus || b == Branch::UnstableMinus;
}

PlanePoint ManifoldArc::effective_step(const PlanePoint& z) const {
    PlanePoint w = z;
    for (int i = 0; i < period; ++i) {
        w = use_inverse ? eval_inverse_lift(map, w) : eval_lift(map, w);
    }
    return w - shift;
}

PlanePoint ManifoldArc::effective_step_back(const PlanePoint& z) const {
    PlanePoint w = z + shift;
    for (int i = 0; i < period; ++i) {
        w = use_inverse ? eval_lift(map, w) : eval_inverse_lift(map, w);
    }
    return w;
}

PlanePoint ManifoldArc::evaluate(double tp) const {
    int k = 0;
    if (tp > lambda * d0) {
        k = static_cast<int>(std::ceil(std::log(tp / (lambda * d0)) / std::log(lambda) - 1e-12));
        if (k < 0) k = 0;
    }
    double s = tp / std::pow(lambda, k);
    s = std::clamp(s, d0, lambda * d0);
    PlanePoint z = base + s * seed_dir;
    for (int i = 0; i < k; ++i) z = effective_step(z);
    return z;
}

namespace {

// Batch version of the effective step over coordinate arrays.
void effective_step_batch(const ManifoldArc& arc, std::vector<double>& xs,
                          std::vector<double>& ys) {
    for (int i = 0; i < arc.period; ++i) {
        if (arc.use_inverse) {
            eval_inverse_lift_batch(arc.map, xs, ys);
        } else {
            eval_lift_batch(arc.map, xs, ys);
        }
    }
    for (auto& v : xs) v -= arc.shift.x;
    for (auto& v : ys) v -= arc.shift.y;
}

void append_vertex(ManifoldArc& arc, double tp, const PlanePoint& z) {
    if (!arc.t.empty()) {
        arc.torus_length += std::hypot(z.x - arc.x.back(), z.y - arc.y.back());
    }
    arc.t.push_back(tp);
    arc.x.push_back(z.x);
    arc.y.push_back(z.y);
}

struct Level {
    std::vector<double> t, x, y;

    std::size_t size() const { return t.size(); }
};

// Refine one level: insert midpoints (by bisecting the pre-image parameter in
// the seed segment and re-mapping) until spacing and turning pass.
// Returns false when the vertex budget is hit.
bool refine_level(ManifoldArc& arc, Level& lv, int level_index) {
    const double h_max = arc.settings.h_max;
    const double theta_max = arc.settings.theta_max;
    const double scale = std::pow(arc.lambda, level_index);

    for (int pass = 0; pass < kMaxRefinePasses; ++pass) {
        std::vector<std::size_t> split;  // segment i = (i, i+1)
        for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
            double len = std::hypot(lv.x[i + 1] - lv.x[i], lv.y[i + 1] - lv.y[i]);
            bool bad = len > h_max;
            if (!bad && i > 0) {
                bad = turning_angle({lv.x[i - 1], lv.y[i - 1]}, {lv.x[i], lv.y[i]},
                                    {lv.x[i + 1], lv.y[i + 1]}) > theta_max;
            }
            if (!bad && i + 2 < lv.size()) {
                bad = turning_angle({lv.x[i], lv.y[i]}, {lv.x[i + 1], lv.y[i + 1]},
                                    {lv.x[i + 2], lv.y[i + 2]}) > theta_max;
            }
            if (bad) split.push_back(i);
        }
        if (split.empty()) return true;
        if (arc.size() + lv.size() + split.size() > arc.settings.vertex_cap) {
            arc.truncated = true;
            return false;
        }

        // evaluate all insertions in one batch: seed chord point, then
        // level_index effective steps
        std::vector<double> mx(split.size()), my(split.size()), mt(split.size());
        for (std::size_t n = 0; n < split.size(); ++n) {
            double tm = 0.5 * (lv.t[split[n]] + lv.t[split[n] + 1]);
            double s = std::clamp(tm / scale, arc.d0, arc.lambda * arc.d0);
            mt[n] = tm;
            mx[n] = arc.base.x + s * arc.seed_dir.x;
            my[n] = arc.base.y + s * arc.seed_dir.y;
        }
        for (int k = 0; k < level_index; ++k) effective_step_batch(arc, mx, my);

        // rebuild the level with the midpoints interleaved
        Level merged;
        merged.t.reserve(lv.size() + split.size());
        merged.x.reserve(lv.size() + split.size());
        merged.y.reserve(lv.size() + split.size());
        std::size_t cursor = 0;
        for (std::size_t i = 0; i < lv.size(); ++i) {
            merged.t.push_back(lv.t[i]);
            merged.x.push_back(lv.x[i]);
            merged.y.push_back(lv.y[i]);
            if (cursor < split.size() && split[cursor] == i) {
                merged.t.push_back(mt[cursor]);
                merged.x.push_back(mx[cursor]);
                merged.y.push_back(my[cursor]);
                ++cursor;
            }
        }
        lv = std::move(merged);
    }
    return true;
}

void append_level(ManifoldArc& arc, const Level& lv, bool drop_first) {
    arc.last_level_begin = arc.size();
    for (std::size_t i = drop_first ? 1 : 0; i < lv.size(); ++i) {
        append_vertex(arc, lv.t[i], {lv.x[i], lv.y[i]});
    }
}

Level current_level(const ManifoldArc& arc) {
    Level lv;
    // re-include the junction vertex that append_level dropped
    std::size_t begin = arc.last_level_begin;
    if (arc.levels > 0 && begin > 0) --begin;
    lv.t.assign(arc.t.begin() + begin, arc.t.end());
    lv.x.assign(arc.x.begin() + begin, arc.x.end());
    lv.y.assign(arc.y.begin() + begin, arc.y.end());
    return lv;
}

bool advance_level(ManifoldArc& arc) {
    Level lv = current_level(arc);
    for (auto& tp : lv.t) tp *= arc.lambda;
    effective_step_batch(arc, lv.x, lv.y);
    bool ok = refine_level(arc, lv, arc.levels + 1);
    append_level(arc, lv, /*drop_first=*/true);
    ++arc.levels;
    if (arc.size() >= arc.settings.vertex_cap) arc.truncated = true;
    return ok && !arc.truncated;
}

}  // namespace

ManifoldArc seed_branch(const MapSpec& map, const FixedPointRecord& saddle, Branch branch,
                        const GrowSettings& settings) {
    if (!saddle.is_saddle()) {
        throw std::invalid_argument("seed_branch needs a saddle fixed point");
    }

    ManifoldArc arc;
    arc.map = map;
    arc.saddle = saddle;
    arc.branch = branch;
    arc.settings = settings;
    arc.use_inverse = !is_unstable(branch);
    arc.period = saddle.classification == Classification::SaddleNegative ? 2 : 1;
    arc.base = saddle.location.lift();

    double lam = saddle.expansion();  // |lam| > 1, sign of the eigenvalues
    arc.lambda = arc.period == 2 ? lam * lam : lam;
    Vec2 dir = arc.use_inverse ? saddle.stable_direction : saddle.unstable_direction;
    bool plus = branch == Branch::UnstablePlus || branch == Branch::StablePlus;
    arc.seed_dir = plus ? dir : -dir;

    // integer drift of the saddle under the effective step
    {
        PlanePoint w = arc.base;
        for (int i = 0; i < arc.period; ++i) {
            w = arc.use_inverse ? eval_inverse_lift(map, w) : eval_lift(map, w);
        }
        arc.shift = {std::nearbyint(w.x - arc.base.x), std::nearbyint(w.y - arc.base.y)};
    }

    // largest d0 (halving search) with linearization defect <= seed_tol over
    // the whole fundamental segment
    double d = 0.25;
    while (d >= 1e-12) {
        double defect = 0.0;
        for (int i = 0; i < kSeedSamples; ++i) {
            double s = d * (1.0 + (arc.lambda - 1.0) * i / (kSeedSamples - 1));
            PlanePoint image = arc.effective_step(arc.base + s * arc.seed_dir);
            PlanePoint linear = arc.base + (arc.lambda * s) * arc.seed_dir;
            defect = std::max(defect, (image - linear).norm());
        }
        if (defect <= settings.seed_tol) break;
        d *= 0.5;
    }
    if (d < 1e-12) throw SeedFailure("no linear seed segment above machine scale");
    arc.d0 = d;

    // seed vertices over [d0, lambda d0]; the endpoint is the image of the
    // start so consecutive levels stitch exactly
    PlanePoint start = arc.base + d * arc.seed_dir;
    for (int i = 0; i < kSeedSamples - 1; ++i) {
        double s = d * (1.0 + (arc.lambda - 1.0) * i / (kSeedSamples - 1));
        append_vertex(arc, s, arc.base + s * arc.seed_dir);
    }
    append_vertex(arc, arc.lambda * d, arc.effective_step(start));
    arc.levels = 0;
    arc.last_level_begin = 0;
    return arc;
}

void grow(ManifoldArc& arc, double target_tmax) {
    while (arc.tmax() < target_tmax && !arc.truncated) {
        if (!advance_level(arc)) break;
    }
}

void grow_to_length(ManifoldArc& arc, double target_length) {
    while (arc.torus_length < target_length && !arc.truncated) {
        if (!advance_level(arc)) break;
    }
}

double functional_equation_defect(const ManifoldArc& arc) {
    double worst = 0.0;
    const double tmax = arc.tmax();
    for (std::size_t i = 0; i < arc.size(); ++i) {
        double target = arc.lambda * arc.t[i];
        if (target > tmax) break;
        PlanePoint image = arc.effective_step(arc.point(i));

        auto lo = std::lower_bound(arc.t.begin(), arc.t.end(), target / (1.0 + 1e-9));
        std::size_t j0 = lo == arc.t.begin() ? 0 : std::size_t(lo - arc.t.begin()) - 1;
        double best = 1e300;
        for (std::size_t j = j0 > 2 ? j0 - 2 : 0; j + 1 < arc.size(); ++j) {
            best = std::min(best, point_segment_distance({image.x, image.y},
                                                         {arc.x[j], arc.y[j]},
                                                         {arc.x[j + 1], arc.y[j + 1]}));
            if (arc.t[j] > target * (1.0 + 1e-9) && j > j0 + 2) break;
        }
        worst = std::max(worst, best);
    }
    return worst;
}

std::size_t occupancy_cells(const ManifoldArc& a, int grid_res) {
    TorusGrid grid(grid_res);
    grid.rasterize_polyline(a.x, a.y, 1);
    return grid.occupied_count();
}

double closure_similarity(const ManifoldArc& a, const ManifoldArc& b, int grid_res) {
    TorusGrid grid(grid_res);
    grid.rasterize_polyline(a.x, a.y, 1);
    grid.rasterize_polyline(b.x, b.y, 2);
    std::size_t sym_diff = 0, uni = 0;
    for (auto tag : grid.tags()) {
        if (tag != 0) ++uni;
        if (tag == 1 || tag == 2) ++sym_diff;
    }
    return uni == 0 ? 0.0 : double(sym_diff) / double(uni);
}

void write_csv(const ManifoldArc& arc, std::ostream& os) {
    os << "t,x,y\n";
    os.precision(17);
    for (std::size_t i = 0; i < arc.size(); ++i) {
        os << arc.t[i] << ',' << arc.x[i] << ',' << arc.y[i] << '\n';
    }
}

}  // namespace saddlescope
