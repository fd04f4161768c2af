#include "saddlescope/elliptic_lift.hpp"

#include <algorithm>
#include <cmath>

namespace saddlescope {
namespace {

// Apply the map near the chart center and return the image in chart
// coordinates; the world image is pulled to the lift copy nearest the center.
Vec2 chart_image(const MapSpec& map, const PolarChart& chart, const Vec2& z_chart) {
    Vec2 offset = chart.transform * z_chart;
    TorusPoint w = eval(map, TorusPoint::reduce(chart.center.x + offset.x,
                                                chart.center.y + offset.y));
    Vec2 d{wrap_delta(w.x, chart.center.x), wrap_delta(w.y, chart.center.y)};
    return chart.inverse * d;
}

}  // namespace

PolarChart make_polar_chart(const MapSpec& map, const FixedPointRecord& q) {
    if (q.classification != Classification::Elliptic) {
        throw NotElliptic("polar lift needs an elliptic fixed point");
    }
    Jacobian2 j = jacobian(map, q.location);
    double half_trace = 0.5 * j.trace();
    double alpha = std::acos(std::clamp(half_trace, -1.0, 1.0));

    // complex eigenvector v = u + i w for e^{i alpha}; in the basis (u, -w)
    // the derivative acts as the rigid rotation by alpha
    double sin_a = std::sin(alpha);
    Vec2 u, w;
    if (std::abs(j.a12) >= std::abs(j.a21)) {
        u = {j.a12, half_trace - j.a11};
        w = {0.0, sin_a};
    } else {
        u = {half_trace - j.a22, j.a21};
        w = {sin_a, 0.0};
    }
    PolarChart chart;
    chart.center = q.location;
    chart.alpha = alpha;
    chart.transform = {u.x, -w.x, u.y, -w.y};
    double det = chart.transform.det();
    chart.orientation = det >= 0.0 ? 1 : -1;
    // uniform rescale only: per-column scaling would break the conjugacy
    double cu = std::hypot(chart.transform.a11, chart.transform.a21);
    chart.transform = chart.transform * (1.0 / cu);
    chart.inverse = chart.transform.inverse();
    return chart;
}

PolarLiftState lift_step(const MapSpec& map, const PolarChart& chart,
                         const PolarLiftState& state) {
    if (state.r > chart.radius) {
        throw RadiusEscape("lift step outside the chart radius");
    }
    Vec2 z{state.r * std::cos(state.theta), state.r * std::sin(state.theta)};
    Vec2 img = chart_image(map, chart, z);
    PolarLiftState next;
    next.r = img.norm();
    if (next.r > chart.radius) {
        throw RadiusEscape("image escaped the chart radius");
    }
    double base = std::atan2(img.y, img.x);
    double expected = state.theta + chart.alpha;
    next.theta = base + kTwoPi * std::nearbyint((expected - base) / kTwoPi);
    return next;
}

double measure_epsilon(const MapSpec& map, const PolarChart& chart, double r, int samples) {
    Mat2 rot = Mat2::rotation(chart.alpha);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        double theta = kTwoPi * i / samples;
        Vec2 z{r * std::cos(theta), r * std::sin(theta)};
        Vec2 img = chart_image(map, chart, z);
        Vec2 linear = rot * z;
        worst = std::max(worst, (img - linear).norm() / r);
    }
    return worst;
}

// resonance guard: n alpha = 2 pi exactly must not slip through as
// "greater" on floating-point fuzz (alpha = pi/3 with n = 6, say)
constexpr double kResonanceMargin = 1e-9;

bool verify_epsilon_conditions(double alpha, int n, double epsilon) {
    if (!(n * alpha > kTwoPi + kResonanceMargin) ||
        !(n * (kTwoPi - alpha) > kTwoPi + kResonanceMargin)) {
        throw BadN("need n alpha > 2 pi and n (2 pi - alpha) > 2 pi");
    }
    double slack = n * 0.5 * kPi * epsilon;
    return slack < n * alpha - kTwoPi && slack < n * (kTwoPi - alpha) - kTwoPi &&
           alpha + 0.5 * kPi * epsilon < kTwoPi && alpha - 0.5 * kPi * epsilon > 0.0;
}

int choose_n(double alpha) {
    for (int n = 1; n < 1 << 20; ++n) {
        if (n * alpha > kTwoPi + kResonanceMargin &&
            n * (kTwoPi - alpha) > kTwoPi + kResonanceMargin) {
            return n;
        }
    }
    throw BadN("no admissible n below 2^20; alpha too close to 0 or 2 pi");
}

namespace {

using LiftPolyline = std::vector<PolarLiftState>;

// max over points of one polyline of ... used for the exact-coincidence case
double polyline_gap(const LiftPolyline& a, const LiftPolyline& b, double theta_shift) {
    double worst = 0.0;
    for (const auto& p : a) {
        double best = 1e300;
        for (std::size_t i = 0; i + 1 < b.size(); ++i) {
            Vec2 p0{b[i].theta + theta_shift, b[i].r};
            Vec2 p1{b[i + 1].theta + theta_shift, b[i + 1].r};
            best = std::min(best, point_segment_distance({p.theta, p.r}, p0, p1));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

bool polylines_intersect(const LiftPolyline& a, const LiftPolyline& b, double theta_shift) {
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            Vec2 a0{a[i].theta, a[i].r}, a1{a[i + 1].theta, a[i + 1].r};
            Vec2 b0{b[j].theta + theta_shift, b[j].r}, b1{b[j + 1].theta + theta_shift, b[j + 1].r};
            if (segment_intersection(a0, a1, b0, b1, 1e-12)) return true;
        }
    }
    // touching counts: the exact-return case lands one polyline on the other
    return polyline_gap(a, b, theta_shift) < 1e-7;
}

}  // namespace

ArcTrapReport arc_trap(const MapSpec& map, const FixedPointRecord& q, double r0,
                       double arc_from, double arc_to, int n) {
    PolarChart chart = make_polar_chart(map, q);
    ArcTrapReport rep;
    rep.alpha = chart.alpha;
    rep.n = n;
    rep.r0 = r0;
    rep.epsilon = measure_epsilon(map, chart, r0);
    try {
        rep.conditions_ok = verify_epsilon_conditions(chart.alpha, n, rep.epsilon);
    } catch (const BadN&) {
        rep.conditions_ok = false;
    }

    // beta-hat and its n lifted images
    const int samples = std::max(64, int((arc_to - arc_from) * 256));
    std::vector<LiftPolyline> image(n + 1);
    image[0].reserve(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        double theta = arc_from + (arc_to - arc_from) * i / samples;
        image[0].push_back({theta, r0});
    }
    for (int j = 1; j <= n; ++j) {
        image[j].reserve(image[j - 1].size());
        for (const auto& st : image[j - 1]) {
            image[j].push_back(lift_step(map, chart, st));
        }
    }

    rep.consecutive_overlap = polylines_intersect(image[1], image[0], 0.0) ||
                              polylines_intersect(image[1], image[0], kTwoPi);

    // smallest k >= 1 with any iterate meeting beta + 2k pi
    double theta_reach = 0.0;
    for (const auto& img : image) {
        for (const auto& st : img) theta_reach = std::max(theta_reach, st.theta);
    }
    int k_cap = static_cast<int>(theta_reach / kTwoPi) + 1;
    for (int k = 1; k <= k_cap && rep.k == 0; ++k) {
        for (int j = 1; j <= n && rep.k == 0; ++j) {
            if (polylines_intersect(image[j], image[0], kTwoPi * k)) rep.k = k;
        }
    }

    // assemble xi when the consecutive chain overlaps all the way and the
    // last image reaches a translate of beta
    if (rep.k >= 1) {
        bool chain_ok = true;
        std::vector<std::pair<std::size_t, std::size_t>> joints(n);  // vertex ids
        for (int j = 0; j + 1 <= n && chain_ok; ++j) {
            bool found = false;
            for (std::size_t a = 0; a + 1 < image[j].size() && !found; ++a) {
                for (std::size_t b = 0; b + 1 < image[j + 1].size() && !found; ++b) {
                    Vec2 a0{image[j][a].theta, image[j][a].r};
                    Vec2 a1{image[j][a + 1].theta, image[j][a + 1].r};
                    Vec2 b0{image[j + 1][b].theta, image[j + 1][b].r};
                    Vec2 b1{image[j + 1][b + 1].theta, image[j + 1][b + 1].r};
                    if (segment_intersection(a0, a1, b0, b1, 1e-12)) {
                        joints[j] = {a, b};
                        found = true;
                    }
                }
            }
            chain_ok = found;
        }
        std::size_t final_a = 0, final_b = 0;
        bool final_found = false;
        if (chain_ok) {
            for (std::size_t a = 0; a + 1 < image[n].size() && !final_found; ++a) {
                for (std::size_t b = 0; b + 1 < image[0].size() && !final_found; ++b) {
                    Vec2 a0{image[n][a].theta, image[n][a].r};
                    Vec2 a1{image[n][a + 1].theta, image[n][a + 1].r};
                    Vec2 b0{image[0][b].theta + kTwoPi * rep.k, image[0][b].r};
                    Vec2 b1{image[0][b + 1].theta + kTwoPi * rep.k, image[0][b + 1].r};
                    if (segment_intersection(a0, a1, b0, b1, 1e-12)) {
                        final_a = a;
                        final_b = b;
                        final_found = true;
                    }
                }
            }
        }
        if (chain_ok && final_found) {
            // path in the (theta, r) strip: start of beta -> joint(0) -> ... ->
            // joint on beta + 2k pi -> start of beta + 2k pi
            std::vector<PolarLiftState> path;
            std::size_t from = 0;
            for (int j = 0; j < n; ++j) {
                for (std::size_t v = from; v <= joints[j].first; ++v) path.push_back(image[j][v]);
                from = joints[j].second;
            }
            for (std::size_t v = from; v <= final_a; ++v) path.push_back(image[n][v]);
            for (std::size_t v = final_b + 1; v-- > 0;) {
                path.push_back({image[0][v].theta + kTwoPi * rep.k, image[0][v].r});
            }
            // close with the start translated by 2k pi, then project
            path.push_back({image[0][0].theta + kTwoPi * rep.k, image[0][0].r});

            rep.xi.reserve(path.size());
            for (const auto& st : path) {
                Vec2 z = chart.transform * Vec2{st.r * std::cos(st.theta),
                                                st.r * std::sin(st.theta)};
                rep.xi.push_back(
                    TorusPoint::reduce(chart.center.x + z.x, chart.center.y + z.y));
            }
            // winding of xi around the center by angle summation of the
            // emitted polyline (sign follows the chart orientation)
            double winding_sum = 0.0;
            for (std::size_t i = 0; i + 1 < rep.xi.size(); ++i) {
                Vec2 a{wrap_delta(rep.xi[i].x, chart.center.x),
                       wrap_delta(rep.xi[i].y, chart.center.y)};
                Vec2 b{wrap_delta(rep.xi[i + 1].x, chart.center.x),
                       wrap_delta(rep.xi[i + 1].y, chart.center.y)};
                winding_sum += std::atan2(a.cross(b), a.dot(b));
            }
            rep.winding = static_cast<int>(std::lround(std::abs(winding_sum) / kTwoPi));
            rep.closed = true;
        }
    }
    return rep;
}

RotationNumberResult rotation_number(const std::function<double(double)>& lift, int iterations,
                                     int starts) {
    // degree-one and monotonicity spot checks on a sample grid
    const int grid = 64;
    double prev = lift(0.0);
    for (int i = 1; i <= grid; ++i) {
        double xi = double(i) / grid;
        double v = lift(xi);
        if (v < prev - 1e-12) throw NonMonotone("sampled lift decreases");
        prev = v;
    }
    if (std::abs((lift(1.0) - lift(0.0)) - 1.0) > 1e-9) {
        throw NonMonotone("sampled lift is not degree one");
    }

    double sum = 0.0;
    for (int s = 0; s < starts; ++s) {
        double x0 = double(s) / starts;
        double x = x0;
        for (int i = 0; i < iterations; ++i) x = lift(x);
        sum += (x - x0) / iterations;
    }
    RotationNumberResult out;
    out.value = sum / starts;
    out.error_estimate = 1.0 / iterations;
    return out;
}

}  // namespace saddlescope
