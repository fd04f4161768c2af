#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "saddlescope/homoclinic.hpp"

using namespace saddlescope;

namespace {

FixedPointRecord principal(const MapSpec& map) { return classify(map, {0.0, 0.0}); }

// Shared across cases; growth is monotone, and the cases that extend single
// branches asymmetrically run after the symmetry comparisons (file order).
BranchSet& branches_mu15() {
    static BranchSet set =
        grow_branch_set(MapSpec::standard(1.5), principal(MapSpec::standard(1.5)), 30.0);
    return set;
}

}  // namespace

TEST_CASE("synthetic crossings classify by the side-change test") {
    SUBCASE("orthogonal lines are transverse immediately") {
        LocalCurve u = [](double t) { return Vec2{t, 0.0}; };
        LocalCurve s = [](double t) { return Vec2{0.0, t}; };
        int depth = 0;
        auto [verdict, sig] = classify_crossing(u, s, &depth);
        CHECK(verdict == Verdict::TopologicallyTransverse);
        CHECK(depth == 1);
        CHECK(sig[0] * sig[1] < 0);
        CHECK(sig[2] * sig[3] < 0);
    }
    SUBCASE("even tangency: parabola against its tangent line") {
        LocalCurve u = [](double t) { return Vec2{t, t * t}; };
        LocalCurve s = [](double t) { return Vec2{t, 0.0}; };
        auto [verdict, sig] = classify_crossing(u, s);
        CHECK(verdict == Verdict::TangentialOrUnresolved);
        CHECK(sig[0] == sig[1]);  // both parabola halves exit the same side
    }
    SUBCASE("odd tangency: cubic crossing of zero angle is transverse") {
        LocalCurve u = [](double t) { return Vec2{t, t * t * t}; };
        LocalCurve s = [](double t) { return Vec2{t, 0.0}; };
        auto [verdict, sig] = classify_crossing(u, s);
        CHECK(verdict == Verdict::TopologicallyTransverse);
        CHECK(sig[0] * sig[1] < 0);
        CHECK(sig[2] * sig[3] < 0);
    }
}

TEST_CASE("collinear self-test produces no records") {
    MapSpec cat = MapSpec::linear_torus(2, 1, 1, 1);
    FixedPointRecord p = principal(cat);
    ManifoldArc u = seed_branch(cat, p, Branch::UnstablePlus);
    grow_to_length(u, 3.0);
    CHECK(find_intersections(u, u).empty());
}

TEST_CASE("cat map unstable and stable lines cross transversally") {
    MapSpec cat = MapSpec::linear_torus(2, 1, 1, 1);
    FixedPointRecord p = principal(cat);
    BranchSet set = grow_branch_set(cat, p, 6.0);
    PairScan scan = scan_pair(set.u_plus, set.s_plus);
    REQUIRE(!scan.records.empty());
    REQUIRE(scan.first_transverse.has_value());
    CHECK(scan.first_transverse->refinement_depth <= 3);
}

TEST_CASE("standard map mu=1.5: all four adjacent pairs intersect transversally") {
    BranchSet& set = branches_mu15();
    for (auto [ub, sb] : {std::pair{Branch::UnstablePlus, Branch::StablePlus},
                          std::pair{Branch::UnstablePlus, Branch::StableMinus},
                          std::pair{Branch::UnstableMinus, Branch::StablePlus},
                          std::pair{Branch::UnstableMinus, Branch::StableMinus}}) {
        CAPTURE(branch_name(ub));
        CAPTURE(branch_name(sb));
        PairScan scan = scan_pair(set.get(ub), set.get(sb));
        CHECK(!scan.records.empty());
        REQUIRE(scan.first_transverse.has_value());
        const IntersectionRecord& rec = *scan.first_transverse;
        CHECK(rec.verdict == Verdict::TopologicallyTransverse);
        // a transverse verdict must come with a full opposite-side signature
        CHECK(rec.side_signature[0] * rec.side_signature[1] == -1);
        CHECK(rec.side_signature[2] * rec.side_signature[3] == -1);
        // the crossing closes on both curves to the tube tolerance
        PlanePoint qu = set.get(ub).evaluate(rec.t_u);
        PlanePoint qs = set.get(sb).evaluate(rec.t_s);
        PlanePoint qs_near = nearest_translate(qs, qu);
        CHECK((qu - qs_near).norm() <= set.get(ub).settings.tube_tol);
    }
}

TEST_CASE("records stay on both polylines and merge within the window") {
    BranchSet& set = branches_mu15();
    auto records = find_intersections(set.u_plus, set.s_plus, 1e-5);
    REQUIRE(records.size() >= 2);
    auto distance_to = [](const ManifoldArc& arc, const TorusPoint& p) {
        double best = 1e300;
        for (std::size_t j = 0; j + 1 < arc.size(); ++j) {
            PlanePoint mid{0.5 * (arc.x[j] + arc.x[j + 1]), 0.5 * (arc.y[j] + arc.y[j + 1])};
            PlanePoint q = nearest_translate(p.lift(), mid);
            best = std::min(best, point_segment_distance({q.x, q.y},
                                                         {arc.x[j], arc.y[j]},
                                                         {arc.x[j + 1], arc.y[j + 1]}));
        }
        return best;
    };
    std::size_t stride = std::max<std::size_t>(1, records.size() / 12);
    for (std::size_t i = 0; i < records.size(); i += stride) {
        CHECK(distance_to(set.u_plus, records[i].point) <= set.u_plus.settings.tube_tol);
        CHECK(distance_to(set.s_plus, records[i].point) <= set.s_plus.settings.tube_tol);
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (std::size_t j = i + 1; j < std::min(records.size(), i + 8); ++j) {
            CHECK(torus_dist(records[i].refined_point, records[j].refined_point) >= 1e-5);
        }
    }
}

TEST_CASE("verdicts are stable under refinement halving") {
    BranchSet& coarse = branches_mu15();
    PairScan scan = scan_pair(coarse.u_plus, coarse.s_plus);
    REQUIRE(scan.first_transverse.has_value());

    MapSpec m = MapSpec::standard(1.5);
    FixedPointRecord p = principal(m);
    GrowSettings fine;
    fine.h_max /= 2.0;
    ManifoldArc u2 = seed_branch(m, p, Branch::UnstablePlus, fine);
    ManifoldArc s2 = seed_branch(m, p, Branch::StablePlus, fine);
    grow(u2, coarse.u_plus.tmax());
    grow(s2, coarse.s_plus.tmax());
    PairScan scan2 = scan_pair(u2, s2);
    REQUIRE(scan2.first_transverse.has_value());
    CHECK(torus_dist(scan.first_transverse->refined_point,
                     scan2.first_transverse->refined_point) <=
          10.0 * coarse.u_plus.settings.tube_tol);
}

TEST_CASE("record lists are negate-equivariant") {
    BranchSet& set = branches_mu15();
    auto plus_records = find_intersections(set.u_plus, set.s_plus);
    auto minus_records = find_intersections(set.u_minus, set.s_minus);
    REQUIRE(!plus_records.empty());
    CHECK(plus_records.size() == minus_records.size());

    double window = 10.0 * set.u_plus.settings.tube_tol;
    std::size_t matched = 0;
    for (const auto& rec : plus_records) {
        TorusPoint negated = apply_symmetry(SymmetryOp::Negate, rec.refined_point);
        for (const auto& other : minus_records) {
            if (torus_dist(negated, other.refined_point) <= window) {
                ++matched;
                break;
            }
        }
    }
    CHECK(matched == plus_records.size());
}

TEST_CASE("omega decomposition at mu=1.5") {
    MapSpec m = MapSpec::standard(1.5);
    BranchSet& set = branches_mu15();
    grow_to_length(set.s_plus, 60.0);

    auto candidates =
        omega_candidates(find_intersections(set.u_plus, set.s_plus), set.u_plus.lambda);
    REQUIRE(!candidates.empty());

    bool stable_found = false;
    IntersectionRecord used;
    for (std::size_t c = 0; c < std::min<std::size_t>(6, candidates.size()); ++c) {
        IntersectionRecord rec = classify_transversality(candidates[c], set.u_plus, set.s_plus);
        if (rec.verdict != Verdict::TopologicallyTransverse) continue;
        double need = rec.t_u * std::pow(set.u_plus.lambda, 3) * 1.001;
        if (set.u_plus.tmax() < need) grow(set.u_plus, need);

        OmegaDecomposition omega = omega_analysis(m, rec, set.u_plus, set.s_plus, 512);
        OmegaDecomposition fine = omega_analysis(m, rec, set.u_plus, set.s_plus, 1024);
        CHECK(omega.labeling.resolved_count >= 2);
        CHECK(omega.a_component >= 0);
        if (omega.all_components_touch_both && fine.all_components_touch_both &&
            omega.labeling.resolved_count == fine.labeling.resolved_count) {
            stable_found = true;
            used = rec;
            break;
        }
    }
    CHECK(stable_found);

    SUBCASE("too-short arcs are rejected") {
        ManifoldArc stub = seed_branch(m, principal(m), Branch::UnstablePlus);
        grow(stub, used.t_u * 1.5);  // well short of lambda^3 t_q
        CHECK_THROWS_AS(omega_analysis(m, used, stub, set.s_plus, 512), ArcsTooShort);
    }
}

TEST_CASE("three-loop alpha family from the mu=1.5 tangle disconnects the torus") {
    // alpha_i = u[G^i q, G^{i+1} q] joined with s[G^{i+1} q, G^i q]; each loop
    // keeps a private point, and together they disconnect the complement
    BranchSet& set = branches_mu15();
    grow_to_length(set.s_plus, 60.0);
    auto candidates =
        omega_candidates(find_intersections(set.u_plus, set.s_plus), set.u_plus.lambda);
    REQUIRE(!candidates.empty());
    IntersectionRecord rec = candidates.front();
    double lam = set.u_plus.lambda;
    double need = rec.t_u * lam * lam * lam * 1.001;
    if (set.u_plus.tmax() < need) grow(set.u_plus, need);

    auto arc_slice = [](const ManifoldArc& arc, double lo, double hi) {
        std::vector<PlanePoint> pts;
        pts.push_back(arc.evaluate(lo));
        auto i0 = std::upper_bound(arc.t.begin(), arc.t.end(), lo) - arc.t.begin();
        for (std::size_t i = i0; i < arc.size() && arc.t[i] < hi; ++i) {
            pts.push_back(arc.point(i));
        }
        pts.push_back(arc.evaluate(hi));
        return pts;
    };

    TorusGrid grid(512);
    for (int i = 0; i < 3; ++i) {
        double pw = std::pow(lam, i);
        auto u_part = arc_slice(set.u_plus, rec.t_u * pw, rec.t_u * pw * lam);
        auto s_part = arc_slice(set.s_plus, rec.t_s / (pw * lam), rec.t_s / pw);
        std::vector<double> xs, ys;
        for (const auto& p : u_part) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
        grid.rasterize_polyline(xs, ys, std::uint16_t(1u << i));
        xs.clear();
        ys.clear();
        for (const auto& p : s_part) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
        grid.rasterize_polyline(xs, ys, std::uint16_t(1u << i));
    }
    ComponentLabeling lab = label_complement_grid(grid);
    CHECK(lab.resolved_count >= 2);
}

TEST_CASE("synthetic omega: two meridian circles give two annuli") {
    std::vector<ClosedCurve> curves{ClosedCurve::straight(1, 0, {0.0, 0.2}),
                                    ClosedCurve::straight(1, 0, {0.0, 0.6})};
    ComponentLabeling lab = label_complement(curves, 256);
    CHECK(lab.component_count == 2);
}

TEST_CASE("connection probe") {
    SUBCASE("standard map branches are not connections") {
        BranchSet& set = branches_mu15();
        ConnectionReport rep = connection_probe(set.u_plus, set.s_plus, 1e-3);
        CHECK_FALSE(rep.connection_suspected);
        CHECK(rep.defect[2] > 10.0 * rep.tol);
    }
    SUBCASE("an arc against itself reports defect 0") {
        MapSpec m = MapSpec::standard(1.5);
        ManifoldArc u = seed_branch(m, principal(m), Branch::UnstablePlus);
        grow_to_length(u, 5.0);
        ConnectionReport rep = connection_probe(u, u, 1e-3);
        CHECK(rep.defect[2] == 0.0);
        CHECK(rep.connection_suspected);
    }
    SUBCASE("cat map lines are transverse, defect does not vanish") {
        MapSpec cat = MapSpec::linear_torus(2, 1, 1, 1);
        BranchSet set = grow_branch_set(cat, principal(cat), 12.0);
        ConnectionReport rep = connection_probe(set.u_plus, set.s_plus, 1e-3);
        CHECK(rep.defect[2] > 10.0 * rep.tol);
    }
}
