#pragma once

// Hand-built desk-scale fixtures: the annulus family (plain, merging and
// subdividing rings), its filled and slit variants, and the glued-squares
// band. Orientations are solved from the filtration constraints rather than
// hand-assigned, so each builder is self-checking.

#include <deque>
#include <memory>

#include "homwalk/filtration.hpp"

namespace homwalk::fixtures {

struct Fixture {
    WeightedGraph graph;
    std::unique_ptr<CliqueComplex> complex;
    std::unique_ptr<Filtration> filtration;
};

/// Assigns signs to essential d-simplices so that every within-level
/// face-sharing pair and every cross-level coface-sharing pair induces
/// opposite orientations. The constraints form a sign graph; a BFS 2-coloring
/// solves it or reports the fixture inconsistent.
inline void solve_orientation(CliqueComplex& X, const Filtration& F) {
    const int d = F.dim();
    std::vector<std::vector<std::pair<std::size_t, int>>> constraints(X.count(d));
    auto relate = [&](std::size_t a, std::size_t b, int rel) {
        constraints[a].push_back({b, rel});
        constraints[b].push_back({a, rel});
    };
    // rel = required product s_a * s_b given the +1-orientation incidences
    if (d >= 1) {
        for (std::size_t ti = 0; ti < X.count(d - 1); ++ti) {
            auto star = X.cofaces_of(d - 1, ti);
            for (std::size_t a = 0; a < star.size(); ++a)
                for (std::size_t b = a + 1; b < star.size(); ++b) {
                    auto [ia, sa] = star[a];
                    auto [ib, sb] = star[b];
                    if (!F.is_essential(ia) || !F.is_essential(ib)) continue;
                    if (F.level_of(ia) != F.level_of(ib)) continue;
                    relate(ia, ib, -sa * sb);
                }
        }
    }
    for (std::size_t ci = 0; ci < X.count(d + 1); ++ci) {
        auto faces = X.faces_of(d + 1, ci);
        for (std::size_t a = 0; a < faces.size(); ++a)
            for (std::size_t b = a + 1; b < faces.size(); ++b) {
                auto [ia, sa] = faces[a];
                auto [ib, sb] = faces[b];
                if (!F.is_essential(ia) || !F.is_essential(ib)) continue;
                if (F.level_of(ia) == F.level_of(ib)) continue;
                relate(ia, ib, -sa * sb);
            }
    }
    std::vector<int> sign(X.count(d), 0);
    for (std::size_t root = 0; root < X.count(d); ++root) {
        if (sign[root] != 0 || !F.is_essential(root)) continue;
        sign[root] = 1;
        std::deque<std::size_t> q{root};
        while (!q.empty()) {
            std::size_t cur = q.front();
            q.pop_front();
            for (auto& [nb, rel] : constraints[cur]) {
                int want = sign[cur] * rel;
                if (sign[nb] == 0) {
                    sign[nb] = want;
                    q.push_back(nb);
                } else if (sign[nb] != want) {
                    throw std::logic_error("fixture orientation constraints unsatisfiable");
                }
            }
        }
    }
    for (std::size_t i = 0; i < X.count(d); ++i)
        if (sign[i] != 0) X.set_sign(d, i, sign[i]);
}

inline Fixture make(const std::vector<std::pair<VertexId, VertexId>>& edges,
                    const std::vector<std::pair<std::pair<VertexId, VertexId>, int>>& levels,
                    bool expect_valid = true) {
    Fixture f;
    std::set<VertexId> verts;
    for (auto [a, b] : edges) {
        verts.insert(a);
        verts.insert(b);
    }
    for (VertexId v : verts) f.graph.add_vertex(v, 1.0);
    for (auto [a, b] : edges) f.graph.add_edge(a, b);
    f.complex = std::make_unique<CliqueComplex>(f.graph, 2);
    std::vector<LevelEntry> entries;
    for (auto& [e, lvl] : levels) entries.push_back({{e.first, e.second}, lvl});
    f.filtration = std::make_unique<Filtration>(*f.complex, 1, entries);
    solve_orientation(*f.complex, *f.filtration);
    if (expect_valid) {
        auto r1 = f.filtration->validate_orientable();
        auto r2 = f.filtration->validate_uniform();
        if (!r1.pass || !r2.pass) throw std::logic_error("fixture fails its own validators");
    } else {
        f.filtration->validate_uniform();  // still records the f table
    }
    return f;
}

// Vertex ids of the five-layer annulus with amplitude profile 1,1,1/2,1/2,1:
//   inner square 0..3 (cycle 0-2-1-3), band targets 4,5, cap vertices 6..9,
//   outer square 10..13.
inline std::vector<std::pair<VertexId, VertexId>> annulus_phi_edges() {
    return {
        // inner square arcs (cycle 0-2-1-3)
        {0, 2}, {1, 2}, {1, 3}, {0, 3},
        // band: verticals (internal) and diagonals
        {2, 4}, {3, 5}, {0, 4}, {1, 4}, {1, 5}, {0, 5},
        // cap 8-cycle 0-6-4-7-1-8-5-9-0
        {0, 6}, {4, 6}, {4, 7}, {1, 7}, {1, 8}, {5, 8}, {5, 9}, {0, 9},
        // merging ring: verticals (internal) and slants
        {0, 10}, {4, 11}, {1, 12}, {5, 13},
        {6, 10}, {6, 11}, {7, 11}, {7, 12}, {8, 12}, {8, 13}, {9, 13}, {9, 10},
        // outer square arcs
        {10, 11}, {11, 12}, {12, 13}, {10, 13},
    };
}

inline std::vector<std::pair<std::pair<VertexId, VertexId>, int>> annulus_phi_levels() {
    std::vector<std::pair<std::pair<VertexId, VertexId>, int>> lv;
    auto put = [&](std::initializer_list<std::pair<VertexId, VertexId>> es, int l) {
        for (auto e : es) lv.push_back({e, l});
    };
    put({{0, 2}, {1, 2}, {1, 3}, {0, 3}}, 0);
    put({{2, 4}, {3, 5}, {0, 4}, {1, 4}, {1, 5}, {0, 5}}, 1);
    put({{0, 6}, {4, 6}, {4, 7}, {1, 7}, {1, 8}, {5, 8}, {5, 9}, {0, 9}}, 2);
    put({{0, 10}, {4, 11}, {1, 12}, {5, 13}, {6, 10}, {6, 11}, {7, 11}, {7, 12},
         {8, 12}, {8, 13}, {9, 13}, {9, 10}},
        3);
    put({{10, 11}, {11, 12}, {12, 13}, {10, 13}}, 4);
    return lv;
}

/// Fig.-3-style annulus: five layers, harmonic amplitudes 1, 1, 1/2, 1/2, 1.
inline Fixture annulus_phi() { return make(annulus_phi_edges(), annulus_phi_levels()); }

/// Same complex with the inner hole filled by a center vertex; the innermost
/// arcs become bad (non-cocycle). A NO instance.
inline Fixture filled_disc() {
    auto edges = annulus_phi_edges();
    auto levels = annulus_phi_levels();
    const VertexId z = 14;
    for (VertexId v : {0, 1, 2, 3}) {
        edges.push_back({z, v});
        levels.push_back({{z, v}, 0});
    }
    return make(edges, levels);
}

/// The annulus cut through along a radial slit; the cut-edge ends become bad
/// (non-cycle). A NO instance.
inline Fixture broken_annulus() {
    std::set<std::pair<VertexId, VertexId>> slit{{0, 3}, {3, 5}, {0, 5},
                                                 {0, 9}, {0, 10}, {9, 10}, {10, 13}};
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (auto e : annulus_phi_edges())
        if (!slit.count(e)) edges.push_back(e);
    std::vector<std::pair<std::pair<VertexId, VertexId>, int>> levels;
    for (auto& [e, l] : annulus_phi_levels())
        if (!slit.count(e)) levels.push_back({e, l});
    return make(edges, levels);
}

/// Criterion-8 annulus: merging ring (octagon to square) then subdividing
/// ring (square to octagon); realizes the pinned f-table
/// {f01=1, f10=1, f12=2, f23=1, f32=2}.
inline Fixture annulus_f() {
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<std::pair<std::pair<VertexId, VertexId>, int>> levels;
    auto put = [&](VertexId a, VertexId b, int l) {
        if (a > b) std::swap(a, b);
        edges.push_back({a, b});
        levels.push_back({{a, b}, l});
    };
    for (int j = 0; j < 8; ++j) put(j, (j + 1) % 8, 0);  // inner octagon 0..7
    for (int j = 0; j < 4; ++j) {                        // square 8..11 above 0,2,4,6
        put(2 * j, 8 + j, 1);                            // verticals (internal)
        put(2 * j + 1, 8 + j, 1);                        // slants from odd vertices
        put(2 * j + 1, 8 + (j + 1) % 4, 1);
    }
    for (int j = 0; j < 4; ++j) put(8 + j, 8 + (j + 1) % 4, 2);  // square arcs
    for (int j = 0; j < 4; ++j) {  // outer octagon 12..19, even above square
        put(8 + j, 12 + 2 * j, 3);                        // verticals (internal)
        put(8 + j, 12 + (2 * j + 1) % 8, 3);              // slants
        put(8 + (j + 1) % 4, 12 + (2 * j + 1) % 8, 3);
    }
    for (int j = 0; j < 8; ++j) put(12 + j, 12 + (j + 1) % 8, 4);
    return make(edges, levels);
}

}  // namespace homwalk::fixtures
