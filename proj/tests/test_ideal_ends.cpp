#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "saddlescope/ideal_ends.hpp"

using namespace saddlescope;

TEST_CASE("surface constructors satisfy the complex invariants") {
    SUBCASE("torus") {
        CombSurface t = CombSurface::torus_grid(16);
        CHECK(t.euler_characteristic() == 0);
        CHECK(t.genus() == 1);
    }
    SUBCASE("sphere") {
        CombSurface s = CombSurface::sphere_grid(12);
        CHECK(s.euler_characteristic() == 2);
        CHECK(s.genus() == 0);
    }
    SUBCASE("genus two") {
        CombSurface g2 = CombSurface::genus_grid(2, 16);
        CHECK(g2.euler_characteristic() == -2);
        CHECK(g2.genus() == 2);
    }
    SUBCASE("genus three") {
        CombSurface g3 = CombSurface::genus_grid(3, 20);
        CHECK(g3.genus() == 3);
    }
}

TEST_CASE("subdivision preserves the euler characteristic") {
    CHECK(CombSurface::torus_grid(8).subdivided().euler_characteristic() == 0);
    CHECK(CombSurface::sphere_grid(8).subdivided().euler_characteristic() == 2);
    CHECK(CombSurface::genus_grid(2, 16).subdivided().euler_characteristic() == -2);
}

TEST_CASE("cross fixture has one end") {
    CombSurface torus = CombSurface::torus_grid(64);
    MarkedComplex mc = make_cross_fixture(torus, 64);
    CHECK(count_ends(mc, 4) == 1);
    CHECK(frontier_components(mc) == 1);
    BoundCheck b = check_bound(mc);
    CHECK(b.m == 1);
    CHECK(b.g == 1);
    CHECK(b.holds);
}

TEST_CASE("circle plus segments fixture has two ends") {
    CombSurface torus = CombSurface::torus_grid(64);
    MarkedComplex mc = make_circle_segments_fixture(torus, 64);
    CHECK(count_ends(mc, 4) == 2);
    // K is connected: one frontier component even though there are two ends
    CHECK(frontier_components(mc) == 1);
    BoundCheck b = check_bound(mc);
    CHECK(b.ends == 2);
    CHECK(b.m == 1);
    CHECK(b.holds);
    CHECK(b.ends == b.m * (b.g + 1));  // the bound is attained
}

TEST_CASE("sphere with the equator marked: a hemisphere has one end") {
    const int n = 16;
    CombSurface sphere = CombSurface::sphere_grid(n);
    // the equator row of horizontal edges: ring r = (n-1)/2
    // vertices of ring r start at 1 + r * n
    int r = (n - 1) / 2;
    std::vector<int> k_edges;
    for (int i = 0; i < n; ++i) {
        int a = 1 + r * n + i;
        int b = 1 + r * n + (i + 1) % n;
        int e = sphere.find_edge(a, b);
        REQUIRE(e >= 0);
        k_edges.push_back(e);
    }
    MarkedComplex mc = make_marked(sphere, k_edges, {}, 0);  // cell 0 is at the north pole
    CHECK(count_ends(mc, 4) == 1);
    BoundCheck b = check_bound(mc);
    CHECK(b.g == 0);
    CHECK(b.m == 1);
    CHECK(b.holds);
    CHECK(b.ends == b.m * (b.g + 1));  // sharp at genus 0
}

TEST_CASE("two disjoint circles on the sphere: the band between them") {
    const int n = 16;
    CombSurface sphere = CombSurface::sphere_grid(n);
    auto ring_edges = [&](int r) {
        std::vector<int> edges;
        for (int i = 0; i < n; ++i) {
            int a = 1 + r * n + i;
            int b = 1 + r * n + (i + 1) % n;
            edges.push_back(sphere.find_edge(a, b));
        }
        return edges;
    };
    std::vector<int> k_edges = ring_edges(4);
    auto lower = ring_edges(10);
    k_edges.insert(k_edges.end(), lower.begin(), lower.end());

    // seed a cell in the middle band: quad strips start after the n polar
    // triangles; strip r covers cells n + r*n .. n + r*n + n - 1
    int seed = n + 7 * n;
    MarkedComplex mc = make_marked(sphere, k_edges, {}, seed);
    CHECK(count_ends(mc, 4) == 2);
    CHECK(frontier_components(mc) == 2);
    BoundCheck b = check_bound(mc);
    CHECK(b.m == 2);
    CHECK(b.holds);
}

TEST_CASE("meridian alone on the torus: the annulus has two ends, bound sharp") {
    const int n = 32;
    CombSurface torus = CombSurface::torus_grid(n);
    std::vector<int> k_edges = segment_edges(torus, n, {8, 0, 8, n});  // vertical loop
    MarkedComplex mc = make_marked(torus, k_edges);
    BoundCheck b = check_bound(mc);
    CHECK(b.ends == 2);
    CHECK(b.m == 1);
    CHECK(b.g == 1);
    CHECK(b.holds);
    CHECK(b.ends == b.m * (b.g + 1));
}

TEST_CASE("genus-2 sharpness: two handle meridians joined by an arc give three ends") {
    const int n = 16;
    CombSurface g2 = CombSurface::genus_grid(2, n);
    // gamma_1: a vertical circle of the base grid away from the handle
    std::vector<int> k_edges = segment_edges(g2, n, {12, 0, 12, n});
    // gamma_2: the meridian of the handle tube = the rim of the first hole
    auto vid = [n](int i, int j) { return ((j % n + n) % n) * n + ((i % n + n) % n); };
    int rim[4] = {vid(2, 2), vid(3, 2), vid(3, 3), vid(2, 3)};
    for (int k = 0; k < 4; ++k) {
        int e = g2.find_edge(rim[k], rim[(k + 1) % 4]);
        REQUIRE(e >= 0);
        k_edges.push_back(e);
    }
    // alpha: arc from gamma_2's rim corner (3,2) to gamma_1, routed along
    // row 1 to stay clear of both handle stubs
    for (auto seg : {std::array<int, 4>{3, 2, 3, 1}, std::array<int, 4>{3, 1, 12, 1},
                     std::array<int, 4>{12, 1, 12, 2}}) {
        auto arc = segment_edges(g2, n, seg);
        k_edges.insert(k_edges.end(), arc.begin(), arc.end());
    }

    MarkedComplex mc = make_marked(g2, k_edges);
    CHECK(mc.k_component_count() == 1);
    BoundCheck b = check_bound(mc, 4);
    CHECK(b.g == 2);
    CHECK(b.m == 1);
    CHECK(b.holds);
    CHECK(b.ends == 3);  // m (g + 1) attained
}

TEST_CASE("subdivision invariance of the end counts") {
    CombSurface torus = CombSurface::torus_grid(32);

    // K edges of the subdivided complex: each original K edge splits into its
    // two halves through the edge midpoint (midpoint of edge e has id nv + e)
    auto subdivide_k = [](const CombSurface& surf, const CombSurface& fine,
                          const std::vector<char>& k_edge) {
        std::vector<int> fine_edges;
        for (int e = 0; e < surf.edge_count(); ++e) {
            if (!k_edge[e]) continue;
            int mid = surf.vertex_count() + e;
            int e1 = fine.find_edge(surf.edge(e)[0], mid);
            int e2 = fine.find_edge(mid, surf.edge(e)[1]);
            REQUIRE(e1 >= 0);
            REQUIRE(e2 >= 0);
            fine_edges.push_back(e1);
            fine_edges.push_back(e2);
        }
        return fine_edges;
    };

    CombSurface fine = torus.subdivided();
    for (auto* fixture : {&make_cross_fixture, &make_circle_segments_fixture}) {
        MarkedComplex coarse = (*fixture)(torus, 32);
        MarkedComplex refined = make_marked(fine, subdivide_k(torus, fine, coarse.k_edge));
        CHECK(count_ends(refined, 4) == count_ends(coarse, 4));
        BoundCheck bc = check_bound(coarse);
        BoundCheck bf = check_bound(refined);
        CHECK(bc.ends == bf.ends);
        CHECK(bc.m == bf.m);
        CHECK(bc.g == bf.g);
        CHECK(bc.holds == bf.holds);
    }
}

TEST_CASE("randomized marked complexes never violate ends <= m (g+1)") {
    std::mt19937_64 rng(2026);
    int trials_done = 0;
    int attempts = 0;
    while (trials_done < 200 && attempts < 2000) {
        ++attempts;
        int g = int(rng() % 3);
        int n = 16;
        CombSurface surf = g == 0   ? CombSurface::sphere_grid(n)
                           : g == 1 ? CombSurface::torus_grid(n)
                                    : CombSurface::genus_grid(2, n);
        // random K: a few random edge walks
        std::vector<int> k_edges;
        int walks = 1 + int(rng() % 3);
        for (int w = 0; w < walks; ++w) {
            int e = int(rng() % surf.edge_count());
            int v = surf.edge(e)[rng() % 2];
            int len = 2 + int(rng() % 10);
            for (int s = 0; s < len; ++s) {
                // pick a random incident edge at v
                std::vector<int> incident;
                for (int c : surf.vertex_cells(v)) {
                    for (int ce : surf.cell_edges(c)) {
                        if (surf.edge(ce)[0] == v || surf.edge(ce)[1] == v) {
                            incident.push_back(ce);
                        }
                    }
                }
                if (incident.empty()) break;
                int pick = incident[rng() % incident.size()];
                k_edges.push_back(pick);
                v = surf.edge(pick)[0] == v ? surf.edge(pick)[1] : surf.edge(pick)[0];
            }
        }
        if (k_edges.empty()) continue;
        MarkedComplex mc = make_marked(surf, k_edges);
        bool has_u = false;
        for (char c : mc.u_cell) has_u |= (c != 0);
        if (!has_u) continue;
        try {
            BoundCheck b = check_bound(mc, 5);
            CAPTURE(g);
            CAPTURE(b.ends);
            CAPTURE(b.m);
            CHECK(b.holds);
            ++trials_done;
        } catch (const NotStabilized&) {
            continue;  // re-roll; stabilization failures are not bound failures
        }
    }
    CHECK(trials_done == 200);
}

TEST_CASE("count_ends argument checks") {
    CombSurface torus = CombSurface::torus_grid(16);
    MarkedComplex mc = make_cross_fixture(torus, 16);
    CHECK_THROWS_AS(count_ends(mc, 2), std::invalid_argument);
    MarkedComplex empty = make_marked(torus, {});
    CHECK(count_ends(empty, 4) == 0);
}
