#include "saddlescope/fixed_points.hpp"

#include <algorithm>
#include <cmath>

namespace saddlescope {
namespace {

constexpr double kStepTol = 1e-12;
constexpr double kResidualTol = 1e-10;
constexpr double kDegenerateTol = 1e-9;
constexpr double kMergeTol = 1e-6;
constexpr int kMaxNewton = 50;
constexpr int kMaxTranslate = 2;

double residual_norm(const MapSpec& map, const PlanePoint& z, int kx, int ky) {
    PlanePoint fz = eval_lift(map, z);
    return std::hypot(fz.x - z.x - kx, fz.y - z.y - ky);
}

// Damped Newton on G(z) = F(z) - z - (kx,ky); returns true on convergence.
bool newton_polish(const MapSpec& map, PlanePoint& z, int kx, int ky) {
    double res = residual_norm(map, z, kx, ky);
    for (int it = 0; it < kMaxNewton; ++it) {
        PlanePoint fz = eval_lift(map, z);
        Vec2 g{fz.x - z.x - kx, fz.y - z.y - ky};
        Mat2 jg = jacobian(map, project(z)) - Mat2::identity();
        if (std::abs(jg.det()) < 1e-14) return false;
        Vec2 step = jg.solve(g);
        double damp = 1.0;
        PlanePoint next{z.x - step.x, z.y - step.y};
        double next_res = residual_norm(map, next, kx, ky);
        while (next_res > res && damp > 1e-4) {
            damp *= 0.5;
            next = {z.x - damp * step.x, z.y - damp * step.y};
            next_res = residual_norm(map, next, kx, ky);
        }
        z = next;
        res = next_res;
        if (damp * step.norm() < kStepTol) return res < kResidualTol;
    }
    return res < kResidualTol;
}

}  // namespace

const char* classification_name(Classification c) {
    switch (c) {
        case Classification::SaddlePositive: return "SaddlePositive";
        case Classification::SaddleNegative: return "SaddleNegative";
        case Classification::Elliptic: return "Elliptic";
        case Classification::Degenerate: return "Degenerate";
    }
    return "?";
}

FixedPointRecord classify(const MapSpec& map, const TorusPoint& p) {
    FixedPointRecord rec;
    rec.location = p;
    PlanePoint fz = eval_lift(map, p.lift());
    rec.translate_x = static_cast<int>(std::lround(fz.x - p.x));
    rec.translate_y = static_cast<int>(std::lround(fz.y - p.y));
    rec.residual = std::hypot(fz.x - p.x - rec.translate_x, fz.y - p.y - rec.translate_y);

    Jacobian2 j = jacobian(map, p);
    double tau = j.trace();

    if (std::abs(tau - 2.0) <= kDegenerateTol || std::abs(tau + 2.0) <= kDegenerateTol) {
        rec.classification = Classification::Degenerate;
        double lam = tau / 2.0;  // double eigenvalue +-1
        rec.eigenvalue_1 = lam;
        rec.eigenvalue_2 = lam;
        return rec;
    }

    if (std::abs(tau) > 2.0) {
        // real reciprocal pair; eigenvalue product is det = 1
        double disc = std::sqrt(tau * tau - 4.0);
        double big = (tau > 0.0) ? 0.5 * (tau + disc) : 0.5 * (tau - disc);
        double small = 1.0 / big;
        rec.eigenvalue_1 = big;
        rec.eigenvalue_2 = small;
        rec.classification =
            tau > 0.0 ? Classification::SaddlePositive : Classification::SaddleNegative;

        auto eigvec = [&j](double lam) {
            // rows of (J - lam I) are parallel; take the better-conditioned kernel vector
            Vec2 v1{j.a12, lam - j.a11};
            Vec2 v2{lam - j.a22, j.a21};
            Vec2 v = v1.norm() >= v2.norm() ? v1 : v2;
            v = v.normalized();
            if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;  // canonical sign
            return v;
        };
        rec.unstable_direction = eigvec(big);
        rec.stable_direction = eigvec(small);
    } else {
        rec.classification = Classification::Elliptic;
        double re = tau / 2.0;
        double im = std::sqrt(1.0 - re * re);
        rec.eigenvalue_1 = {re, im};
        rec.eigenvalue_2 = {re, -im};
    }
    return rec;
}

std::vector<FixedPointRecord> find_fixed_points(const MapSpec& map, int resolution) {
    if (resolution < 8) throw std::invalid_argument("seed resolution must be >= 8");

    std::vector<FixedPointRecord> found;
    for (int i = 0; i < resolution; ++i) {
        for (int jj = 0; jj < resolution; ++jj) {
            PlanePoint seed{(i + 0.5) / resolution, (jj + 0.5) / resolution};
            PlanePoint fs = eval_lift(map, seed);
            int kx = static_cast<int>(std::lround(fs.x - seed.x));
            int ky = static_cast<int>(std::lround(fs.y - seed.y));
            if (std::abs(kx) > kMaxTranslate || std::abs(ky) > kMaxTranslate) continue;

            PlanePoint z = seed;
            if (!newton_polish(map, z, kx, ky)) continue;
            if (residual_norm(map, z, kx, ky) > kResidualTol) continue;

            TorusPoint loc = project(z);
            // coordinates converged to just below an integer belong at 0
            auto snap = [](double c) { return c > 1.0 - 1e-12 ? 0.0 : c; };
            loc = {snap(loc.x), snap(loc.y)};
            bool duplicate = false;
            for (const auto& r : found) {
                if (torus_dist(r.location, loc) < kMergeTol) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) continue;

            FixedPointRecord rec = classify(map, loc);
            if (rec.residual > kResidualTol) continue;
            found.push_back(rec);
        }
    }

    std::sort(found.begin(), found.end(), [](const FixedPointRecord& a, const FixedPointRecord& b) {
        if (a.location.x != b.location.x) return a.location.x < b.location.x;
        return a.location.y < b.location.y;
    });

    if (found.empty() && map.kind == MapKind::StandardMap && map.mu != 0.0) {
        throw InternalError("standard map with mu != 0 must have fixed points");
    }
    return found;
}

}  // namespace saddlescope
