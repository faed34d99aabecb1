#pragma once

#include <memory>

#include "homwalk/filtration.hpp"
#include "homwalk/oracle.hpp"

namespace homwalk {

// ---------------------------------------------------------------------------
// Qubit graph and encoding
// ---------------------------------------------------------------------------
//
// Each qubit block holds two 4-cycles ("squares", one per bit value) on
// vertices numbered 1..4, cycle order 1-3-2-4, joined by the edge 4^0-4^1.
// Blocks are combined with the graph join. Vertex ids are allocated as
// 8*block + 4*bit + (numeral-1); gadget vertices come after 8n.

inline VertexId qubit_vertex(int block, int numeral, int bit) {
    return static_cast<VertexId>(8 * block + 4 * bit + (numeral - 1));
}

/// The square cycle of one block/bit as numeral pairs, in cycle order.
inline std::vector<std::pair<int, int>> square_cycle_numerals() {
    return {{1, 3}, {3, 2}, {2, 4}, {4, 1}};
}

struct QubitGraph {
    int n = 0;
    WeightedGraph graph;
};

inline QubitGraph qubit_graph(int n, int max_n = 4) {
    if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
    if (n > max_n) throw too_large_error("qubit graph capped: (2n-1)-cliques explode");
    QubitGraph qg;
    qg.n = n;
    for (int i = 0; i < n; ++i)
        for (int b = 0; b < 2; ++b)
            for (int l = 1; l <= 4; ++l)
                qg.graph.add_vertex(qubit_vertex(i, l, b), 1.0,
                                    std::to_string(l) + "_" + std::to_string(i) + "^" +
                                        std::to_string(b));
    for (int i = 0; i < n; ++i) {
        for (int b = 0; b < 2; ++b)
            for (auto [a, c] : square_cycle_numerals())
                qg.graph.add_edge(qubit_vertex(i, a, b), qubit_vertex(i, c, b));
        qg.graph.add_edge(qubit_vertex(i, 4, 0), qubit_vertex(i, 4, 1));
    }
    // join: all pairs across distinct blocks
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int b1 = 0; b1 < 2; ++b1)
                for (int l1 = 1; l1 <= 4; ++l1)
                    for (int b2 = 0; b2 < 2; ++b2)
                        for (int l2 = 1; l2 <= 4; ++l2)
                            qg.graph.add_edge(qubit_vertex(i, l1, b1), qubit_vertex(j, l2, b2));
    return qg;
}

namespace detail {

/// Numeric part of a vertex label ("3'x_0:t1" -> 3); 0 when it has none.
inline int label_numeral(const std::string& label) {
    if (label.empty() || label[0] < '1' || label[0] > '9') return 0;
    return label[0] - '0';
}

/// Chosen orientation (-1)^{sum of numerals}; +1 for simplices touching a
/// vertex without a numeral (central vertices, whose orientation is free).
inline void assign_numeral_orientation(CliqueComplex& X, int d) {
    for (std::size_t i = 0; i < X.count(d); ++i) {
        int s = 0;
        bool all = true;
        for (VertexId v : X.simplex(d, i).vertices) {
            int num = label_numeral(X.graph().label(v));
            if (num == 0) {
                all = false;
                break;
            }
            s += num;
        }
        X.set_sign(d, i, all ? (s % 2 == 0 ? +1 : -1) : +1);
    }
}

}  // namespace detail

/// Clique complex of the qubit graph with the (-1)^{sum v_i} orientation on
/// (2n-1)-simplices.
inline CliqueComplex qubit_complex(const QubitGraph& qg) {
    CliqueComplex X(qg.graph, 2 * qg.n);
    detail::assign_numeral_orientation(X, 2 * qg.n - 1);
    return X;
}

/// Enc(|x>): tensor product over blocks of the 4-edge square cycles, with
/// coefficient 1/2 per block; non-negative in the chosen orientation.
inline ChainVector encode_basis_state(const CliqueComplex& X, int n, const std::string& x) {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("bitstring length != n");
    ChainVector out(2 * n - 1);
    double coeff = std::pow(0.5, n);
    std::vector<std::vector<VertexId>> products{{}};
    for (int i = 0; i < n; ++i) {
        int b = x[i] - '0';
        std::vector<std::vector<VertexId>> next;
        for (const auto& base : products)
            for (auto [a, c] : square_cycle_numerals()) {
                auto cur = base;
                cur.push_back(qubit_vertex(i, a, b));
                cur.push_back(qubit_vertex(i, c, b));
                next.push_back(std::move(cur));
            }
        products = std::move(next);
    }
    for (auto& p : products) out.add(X, p, coeff);
    return out;
}

// ---------------------------------------------------------------------------
// Generalized octahedra and thickenings
// ---------------------------------------------------------------------------

/// Pair list of a generalized octahedron: pairs[j] = the two vertices of the
/// j-th factor, in ascending id order.
using OctPairs = std::vector<std::array<VertexId, 2>>;

/// Join of m vertex pairs on ids 1..2m, top simplices oriented so that the
/// all-ones top chain is a cycle.
inline CliqueComplex generalized_octahedron(int m) {
    if (m < 1) throw std::invalid_argument("octahedron needs m >= 1 pairs");
    WeightedGraph g;
    for (VertexId v = 1; v <= 2 * m; ++v) g.add_vertex(v, 1.0, std::to_string(v));
    for (VertexId u = 1; u <= 2 * m; ++u)
        for (VertexId v = u + 1; v <= 2 * m; ++v)
            if ((u - 1) / 2 != (v - 1) / 2) g.add_edge(u, v);
    CliqueComplex X(g, m - 1);
    detail::assign_numeral_orientation(X, m - 1);
    return X;
}

namespace detail {

/// All 2^M side choices of an M-pair octahedron, in lexicographic order.
inline void for_each_sides(int M, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> sides(M, 0);
    while (true) {
        fn(sides);
        int j = M - 1;
        while (j >= 0 && sides[j] == 1) sides[j--] = 0;
        if (j < 0) break;
        sides[j] = 1;
    }
}

}  // namespace detail

/// Layer sets of the thickening that glues octahedron `src` to its copy `tgt`
/// (gluing performed with all src ids below all tgt ids). Indexing follows
/// the gluing direction: layer k=1 is adjacent to src, layer k=M to tgt.
struct ThickenSets {
    int pairs = 0;
    std::vector<std::pair<VertexId, VertexId>> edges;
    // top cells per k = 1..M, with the orientation sign induced by layer k-1
    std::vector<std::vector<std::pair<std::vector<VertexId>, int>>> cells;
    // d-simplices: level_sets[k] for k = 1..M (essential + internal),
    // essential[k] for k = 0..M (essential[0] = src tops, essential[M] = tgt tops)
    std::vector<std::vector<std::vector<VertexId>>> level_sets;
    std::vector<std::vector<std::vector<VertexId>>> essential;
};

inline ThickenSets thicken_pairs(const OctPairs& src, const OctPairs& tgt) {
    if (src.size() != tgt.size() || src.empty())
        throw std::invalid_argument("thicken: pair lists must match");
    const int M = static_cast<int>(src.size());
    ThickenSets out;
    out.pairs = M;
    // edge families of the thickening lemma
    auto add_edge = [&](VertexId a, VertexId b) {
        if (a > b) std::swap(a, b);
        out.edges.push_back({a, b});
    };
    for (int j = 0; j < M; ++j)
        for (int jp = j + 1; jp < M; ++jp)
            for (int s = 0; s < 2; ++s)
                for (int sp = 0; sp < 2; ++sp) {
                    add_edge(src[j][s], src[jp][sp]);
                    add_edge(tgt[j][s], tgt[jp][sp]);
                    add_edge(src[j][s], tgt[jp][sp]);  // pair(u) < pair(v) diagonals
                }
    for (int j = 0; j < M; ++j)
        for (int s = 0; s < 2; ++s) add_edge(src[j][s], tgt[j][s]);
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());

    auto numeral = [&](int pair, int side) { return 2 * pair + 1 + side; };  // 1..2M

    out.cells.resize(M + 1);
    out.level_sets.resize(M + 1);
    out.essential.resize(M + 1);
    detail::for_each_sides(M, [&](const std::vector<int>& sides) {
        std::vector<VertexId> srctop;
        for (int j = 0; j < M; ++j) srctop.push_back(src[j][sides[j]]);
        out.essential[0].push_back(srctop);  // essential[M] comes from the k loop
    });
    for (int k = 1; k <= M; ++k) {
        int p = M - k;  // 0-based pivot pair position
        detail::for_each_sides(M, [&](const std::vector<int>& sides) {
            std::vector<VertexId> cell;
            int label_sum = 0;
            for (int j = 0; j < p; ++j) {
                cell.push_back(src[j][sides[j]]);
                label_sum += numeral(j, sides[j]);
            }
            cell.push_back(src[p][sides[p]]);
            cell.push_back(tgt[p][sides[p]]);
            label_sum += 2 * numeral(p, sides[p]);
            for (int j = p + 1; j < M; ++j) {
                cell.push_back(tgt[j][sides[j]]);
                label_sum += numeral(j, sides[j]);
            }
            // orientation induced by the layer-(k-1) face (see module notes)
            int sign = ((p + 1) + numeral(p, sides[p]) + label_sum) % 2 == 0 ? +1 : -1;
            out.cells[k].push_back({cell, sign});
            // essential layer-k member: drop the source pivot
            std::vector<VertexId> ess;
            for (std::size_t q = 0; q < cell.size(); ++q)
                if (q != static_cast<std::size_t>(p)) ess.push_back(cell[q]);
            out.essential[k].push_back(ess);
            out.level_sets[k].push_back(ess);
            // internal members: drop a non-pivot source vertex instead
            for (int j = 0; j < p; ++j) {
                std::vector<VertexId> internal;
                for (std::size_t q = 0; q < cell.size(); ++q)
                    if (q != static_cast<std::size_t>(j)) internal.push_back(cell[q]);
                out.level_sets[k].push_back(internal);
            }
        });
        std::sort(out.level_sets[k].begin(), out.level_sets[k].end());
        out.level_sets[k].erase(
            std::unique(out.level_sets[k].begin(), out.level_sets[k].end()),
            out.level_sets[k].end());
    }
    return out;
}

/// Standalone thickening of the m-pair octahedron: src ids 1..2m, tgt ids
/// 2m+1..4m ("primed"). Asserts at small m that the clique complex of the
/// lemma's edge families reproduces the thickening's simplices.
struct ThickenedOctahedron {
    int m = 0;
    CliqueComplex complex;
    ThickenSets sets;
    OctPairs src, tgt;
};

namespace detail {

/// Literal enumeration of the thickening definition's simplices (top cells
/// only), used as the construction-time cross-check.
inline std::set<std::vector<VertexId>> thickening_def_top_cells(int m) {
    // vertices of K are 1..2m with pair j = {2j-1, 2j}; copy 1 shifted by 2m
    std::set<std::vector<VertexId>> cells;
    auto in_K = [&](const std::vector<int>& vs) {
        std::set<int> pairs;
        for (int v : vs)
            if (!pairs.insert((v - 1) / 2).second) return false;
        return true;
    };
    // mixed simplices [u_1..u_a, v_1'..v_b'] with u_a <= v_1; top cells have
    // a + b = m + 1
    std::vector<int> all(2 * m);
    for (int i = 0; i < 2 * m; ++i) all[i] = i + 1;
    std::vector<int> u, v;
    std::function<void(int, int)> rec_v = [&](int start, int need) {
        if (need == 0) {
            if (!in_K(v)) return;
            if (!u.empty()) {
                if (u.back() > v.front()) return;
                std::vector<int> merged = u;
                if (u.back() == v.front())
                    merged.insert(merged.end(), v.begin() + 1, v.end());
                else
                    merged.insert(merged.end(), v.begin(), v.end());
                if (!in_K(merged)) return;
            }
            std::vector<VertexId> cell;
            for (int x : u) cell.push_back(x);
            for (int y : v) cell.push_back(y + 2 * m);
            std::sort(cell.begin(), cell.end());
            cells.insert(cell);
            return;
        }
        for (int x = start; x <= 2 * m; ++x) {
            v.push_back(x);
            rec_v(x + 1, need - 1);
            v.pop_back();
        }
    };
    std::function<void(int, int, int)> rec_u = [&](int start, int need, int bsize) {
        if (need == 0) {
            if (!in_K(u)) return;
            rec_v(u.empty() ? 1 : u.back(), bsize);
            return;
        }
        for (int x = start; x <= 2 * m; ++x) {
            u.push_back(x);
            rec_u(x + 1, need - 1, bsize);
            u.pop_back();
        }
    };
    for (int a = 1; a <= m; ++a) rec_u(1, a, m + 1 - a);
    return cells;
}

}  // namespace detail

inline ThickenedOctahedron thicken_octahedron(int m) {
    ThickenedOctahedron out;
    out.m = m;
    for (int j = 0; j < m; ++j) {
        out.src.push_back({static_cast<VertexId>(2 * j + 1), static_cast<VertexId>(2 * j + 2)});
        out.tgt.push_back({static_cast<VertexId>(2 * m + 2 * j + 1),
                           static_cast<VertexId>(2 * m + 2 * j + 2)});
    }
    out.sets = thicken_pairs(out.src, out.tgt);
    WeightedGraph g;
    for (VertexId v = 1; v <= 2 * m; ++v) g.add_vertex(v, 1.0, std::to_string(v));
    for (VertexId v = 1; v <= 2 * m; ++v)
        g.add_vertex(2 * m + v, 1.0, std::to_string(v) + "'");
    for (auto [a, b] : out.sets.edges) g.add_edge(a, b);
    out.complex = CliqueComplex(g, m);
    // chosen orientation on (m-1)-simplices by the numeral-sum rule, numerals
    // taken mod the copy
    for (std::size_t i = 0; i < out.complex.count(m - 1); ++i) {
        int s = 0;
        for (VertexId v : out.complex.simplex(m - 1, i).vertices) s += (v - 1) % (2 * m) + 1;
        out.complex.set_sign(m - 1, i, s % 2 == 0 ? +1 : -1);
    }
    if (m <= 3) {
        std::set<std::vector<VertexId>> got;
        for (std::size_t i = 0; i < out.complex.count(m); ++i)
            got.insert(out.complex.simplex(m, i).vertices);
        if (got != detail::thickening_def_top_cells(m))
            throw operator_consistency_error(
                "thickening cliques disagree with the definition's simplices");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gadget complexes
// ---------------------------------------------------------------------------

struct GadgetTerm {
    Projector proj;
    std::vector<VertexId> central;  // 4c per block (gluing) or the cone vertex (filling)
    // gadget-local d-simplex layers in wormhole order, Enc(x)-side to
    // Enc(y)-side (gluing terms only; layers exclude the two qubit cycles)
    std::vector<std::vector<std::vector<VertexId>>> wormhole_layers;
};

struct GadgetComplex {
    int n = 0;
    double lambda = 0.1;
    QubitGraph qubits;
    WeightedGraph graph;
    std::unique_ptr<CliqueComplex> complex;
    std::unique_ptr<Filtration> filtration;
    std::vector<GadgetTerm> terms;

    int dim() const { return 2 * n - 1; }
};

struct GadgetOptions {
    bool central_vertices = true;  // disable to reproduce the new-hole regression
    int max_n = 3;
    std::size_t clique_cap = 1000000;
};

namespace detail {

/// Products of one square edge per listed block (both bit squares allowed),
/// i.e. the top simplices of the disjoint qubit complex on those blocks.
inline std::vector<std::vector<VertexId>> disjoint_edge_products(const std::vector<int>& blocks) {
    std::vector<std::vector<VertexId>> out{{}};
    for (int i : blocks) {
        std::vector<std::vector<VertexId>> next;
        for (const auto& base : out)
            for (int b = 0; b < 2; ++b)
                for (auto [a, c] : square_cycle_numerals()) {
                    auto cur = base;
                    cur.push_back(qubit_vertex(i, a, b));
                    cur.push_back(qubit_vertex(i, c, b));
                    next.push_back(std::move(cur));
                }
        out = std::move(next);
    }
    return out;
}

inline std::vector<VertexId> sorted_union(std::vector<VertexId> a,
                                          const std::vector<VertexId>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
}

}  // namespace detail

/// Builds the combined gadget complex for a stoquastic SAT instance: the
/// qubit graph joined with one gadget per term, lambda weights on all gadget
/// vertices, and the uniform orientable filtration at dimension 2n-1.
inline GadgetComplex combine(const StoquasticSAT& sat, double lambda,
                             const GadgetOptions& opts = {}) {
    validate_sat(sat);
    if (sat.n > opts.max_n) throw too_large_error("combined gadget capped at n <= 3");
    if (lambda <= 0.0 || lambda >= 1.0) throw std::invalid_argument("lambda must be in (0,1)");
    GadgetComplex g;
    g.n = sat.n;
    g.lambda = lambda;
    g.qubits = qubit_graph(sat.n);
    g.graph = g.qubits.graph;

    std::vector<LevelEntry> levels;
    // level 0: the disjoint qubit complex's top simplices
    std::vector<int> all_blocks(sat.n);
    for (int i = 0; i < sat.n; ++i) all_blocks[i] = i;
    for (auto& p : detail::disjoint_edge_products(all_blocks)) {
        std::sort(p.begin(), p.end());
        levels.push_back({p, 0});
    }
    int next_level = 0;
    VertexId next_id = static_cast<VertexId>(8 * sat.n);

    // gadget vertex bookkeeping: owning term and home block (-1 for cone
    // vertices, which belong to the whole term)
    std::unordered_map<VertexId, int> owner, home_block;
    auto add_gadget_vertex = [&](const std::string& label, int term, int block) {
        VertexId id = next_id++;
        g.graph.add_vertex(id, lambda, label);
        owner[id] = term;
        home_block[id] = block;
        return id;
    };

    for (std::size_t t = 0; t < sat.terms.size(); ++t) {
        const Projector& proj = sat.terms[t];
        const std::string tt = ":t" + std::to_string(t);
        const int m = proj.arity();
        std::vector<int> rest_blocks;
        for (int i = 0; i < sat.n; ++i)
            if (std::find(proj.qubits.begin(), proj.qubits.end(), i) == proj.qubits.end())
                rest_blocks.push_back(i);
        auto rest = detail::disjoint_edge_products(rest_blocks);

        // octahedron pair lists for the term's blocks
        auto qubit_pairs = [&](const std::string& bits) {
            OctPairs pairs;
            for (int k = 0; k < m; ++k) {
                int i = proj.qubits[k], b = bits[k] - '0';
                pairs.push_back({qubit_vertex(i, 1, b), qubit_vertex(i, 2, b)});
                pairs.push_back({qubit_vertex(i, 3, b), qubit_vertex(i, 4, b)});
            }
            return pairs;
        };
        auto fresh_pairs = [&](const std::string& tag) {
            OctPairs pairs;
            for (int k = 0; k < m; ++k) {
                int i = proj.qubits[k];
                std::array<VertexId, 4> ids;
                for (int l = 1; l <= 4; ++l)
                    ids[l - 1] = add_gadget_vertex(
                        std::to_string(l) + tag + "_" + std::to_string(i) + tt,
                        static_cast<int>(t), i);
                pairs.push_back({ids[0], ids[1]});
                pairs.push_back({ids[2], ids[3]});
            }
            return pairs;
        };
        auto add_sets = [&](const ThickenSets& sets) {
            for (auto [a, b] : sets.edges)
                if (!g.graph.has_edge(a, b)) g.graph.add_edge(a, b);
        };
        // the term graph is joined with the untouched blocks' qubit graphs
        auto join_rest = [&](VertexId v) {
            for (int i : rest_blocks)
                for (int b = 0; b < 2; ++b)
                    for (int l = 1; l <= 4; ++l) g.graph.add_edge(v, qubit_vertex(i, l, b));
        };
        auto level_products = [&](const std::vector<std::vector<VertexId>>& local, int level) {
            for (const auto& piece : local)
                for (const auto& r : rest)
                    levels.push_back({detail::sorted_union(piece, r), level});
        };

        GadgetTerm term;
        term.proj = proj;

        if (proj.kind == Projector::Kind::Diff) {
            OctPairs Kx = qubit_pairs(proj.x), Ky = qubit_pairs(proj.y);
            // K'' ids are allocated below the copies so every thickening's
            // source vertices sort before its targets (the orientation rule
            // and cell enumeration rely on this)
            OctPairs Kpp = fresh_pairs("''"), Kpx = fresh_pairs("'x"), Kpy = fresh_pairs("'y");
            ThickenSets Lxx = thicken_pairs(Kx, Kpx);
            ThickenSets Lyy = thicken_pairs(Ky, Kpy);
            ThickenSets Lppx = thicken_pairs(Kpp, Kpx);
            ThickenSets Lppy = thicken_pairs(Kpp, Kpy);
            add_sets(Lxx);
            add_sets(Lyy);
            add_sets(Lppx);
            add_sets(Lppy);
            for (const auto& pairs : {Kpx, Kpy, Kpp})
                for (const auto& pr : pairs)
                    for (VertexId v : pr) join_rest(v);
            const int M = 2 * m;
            // copies outward from K^x/K^y (the two sides are vertex-disjoint
            // and may share levels), then the K''-side layers inward, one side
            // at a time (they meet at K'' and would break down-degree 2 if
            // they shared a level), then K'' itself
            for (int k = 1; k <= M; ++k) {
                ++next_level;
                level_products(Lxx.level_sets[k], next_level);
                level_products(Lyy.level_sets[k], next_level);
            }
            for (int k = M - 1; k >= 1; --k) {
                ++next_level;
                level_products(Lppx.level_sets[k], next_level);
            }
            for (int k = M - 1; k >= 1; --k) {
                ++next_level;
                level_products(Lppy.level_sets[k], next_level);
            }
            ++next_level;
            level_products(Lppx.essential[0], next_level);  // K'' top simplices
            // wormhole layers for harmonization, x side to y side
            for (int k = 1; k <= M; ++k) term.wormhole_layers.push_back(Lxx.essential[k]);
            for (int k = M - 1; k >= 0; --k) term.wormhole_layers.push_back(Lppx.essential[k]);
            for (int k = 1; k <= M - 1; ++k) term.wormhole_layers.push_back(Lppy.essential[k]);
            for (int k = M; k >= 1; --k) term.wormhole_layers.push_back(Lyy.essential[k]);
            // central vertices 4_i^c: joined to the block's 4-family and, per
            // the stated rule, to everything outside the block that the
            // family reaches inside this term's graph
            if (opts.central_vertices) {
                for (int k = 0; k < m; ++k) {
                    int i = proj.qubits[k];
                    VertexId c =
                        add_gadget_vertex("4c_" + std::to_string(i) + tt, static_cast<int>(t), i);
                    term.central.push_back(c);
                    std::set<VertexId> family{qubit_vertex(i, 4, proj.x[k] - '0'),
                                              qubit_vertex(i, 4, proj.y[k] - '0'),
                                              Kpx[2 * k + 1][1], Kpy[2 * k + 1][1],
                                              Kpp[2 * k + 1][1]};
                    std::set<VertexId> nbrs;
                    for (VertexId f : family) {
                        g.graph.add_edge(c, f);
                        for (VertexId u : g.graph.neighbors(f)) nbrs.insert(u);
                    }
                    for (VertexId u : nbrs) {
                        if (u == c || family.count(u)) continue;
                        auto ow = owner.find(u);
                        if (ow != owner.end() && ow->second != static_cast<int>(t))
                            continue;  // other terms' gadgets are disjoint
                        int blk = u < 8 * sat.n ? u / 8 : home_block.at(u);
                        if (blk != i) g.graph.add_edge(c, u);
                    }
                }
            }
        } else {
            OctPairs Kx = qubit_pairs(proj.x);
            OctPairs Kpx = fresh_pairs("'x");
            ThickenSets Lxx = thicken_pairs(Kx, Kpx);
            add_sets(Lxx);
            for (const auto& pr : Kpx)
                for (VertexId v : pr) join_rest(v);
            const int M = 2 * m;
            for (int k = 1; k <= M; ++k) {
                ++next_level;
                level_products(Lxx.level_sets[k], next_level);
            }
            // center vertex coning off the copy; its d-simplices join the last
            // level as internal simplices
            if (opts.central_vertices) {
                VertexId vc = add_gadget_vertex("vc" + tt, static_cast<int>(t), -1);
                term.central.push_back(vc);
                for (const auto& pr : Kpx)
                    for (VertexId v : pr) g.graph.add_edge(vc, v);
                join_rest(vc);
                std::set<std::vector<VertexId>> cone_pieces;
                for (const auto& top : Lxx.essential[M])
                    for (std::size_t drop = 0; drop < top.size(); ++drop) {
                        std::vector<VertexId> piece{vc};
                        for (std::size_t q = 0; q < top.size(); ++q)
                            if (q != drop) piece.push_back(top[q]);
                        std::sort(piece.begin(), piece.end());
                        cone_pieces.insert(std::move(piece));
                    }
                for (const auto& piece : cone_pieces) level_products({piece}, next_level);
            }
        }
        g.terms.push_back(std::move(term));
    }

    g.complex = std::make_unique<CliqueComplex>(g.graph, 2 * sat.n, opts.clique_cap);
    detail::assign_numeral_orientation(*g.complex, 2 * sat.n - 1);
    g.filtration = std::make_unique<Filtration>(*g.complex, 2 * sat.n - 1, levels);
    return g;
}

/// Single gluing gadget for a projector onto |x> - |y| on m qubits.
inline GadgetComplex gluing_gadget(const std::string& x, const std::string& y, double lambda,
                                   const GadgetOptions& opts = {}) {
    StoquasticSAT sat;
    sat.n = static_cast<int>(x.size());
    Projector p;
    p.kind = Projector::Kind::Diff;
    for (int i = 0; i < sat.n; ++i) p.qubits.push_back(i);
    p.x = x;
    p.y = y;
    sat.terms.push_back(p);
    return combine(sat, lambda, opts);
}

/// Single filling gadget for a projector onto |x><x| on m qubits.
inline GadgetComplex filling_gadget(const std::string& x, double lambda,
                                    const GadgetOptions& opts = {}) {
    StoquasticSAT sat;
    sat.n = static_cast<int>(x.size());
    Projector p;
    p.kind = Projector::Kind::Basis;
    for (int i = 0; i < sat.n; ++i) p.qubits.push_back(i);
    p.x = x;
    sat.terms.push_back(p);
    return combine(sat, lambda, opts);
}

// ---------------------------------------------------------------------------
// Harmonization of YES-instance kernel states
// ---------------------------------------------------------------------------

/// Lifts Enc(psi) to a harmonic representative by adding the wormhole chains
/// |x <-> y> of every gluing term whose patterns lie in psi's support.
/// psi is a non-negative uniform subset state over 2^n, indexed with qubit 0
/// as the most significant bit.
inline ChainVector harmonize(const Eigen::VectorXd& psi, const GadgetComplex& g,
                             const StoquasticSAT& sat, double kernel_tol = 1e-9) {
    const int n = g.n;
    if (psi.size() != (1L << n)) throw std::invalid_argument("psi dimension != 2^n");
    Eigen::MatrixXd H = sat_hamiltonian(sat);
    if ((H * psi).norm() > kernel_tol * std::max(1.0, psi.norm()))
        throw std::invalid_argument("psi is not in ker H");
    double uniform = 0.0;
    for (long z = 0; z < psi.size(); ++z) {
        if (psi[z] < -1e-12) throw std::invalid_argument("psi not non-negative");
        if (psi[z] > 1e-12) {
            if (uniform == 0.0)
                uniform = psi[z];
            else if (std::abs(psi[z] - uniform) > 1e-9 * uniform)
                throw std::invalid_argument("psi not a uniform subset state");
        }
    }
    auto bits_of = [&](long z) {
        std::string s(n, '0');
        for (int i = 0; i < n; ++i)
            if (z & (1L << (n - 1 - i))) s[i] = '1';
        return s;
    };
    ChainVector out(g.dim());
    for (long z = 0; z < psi.size(); ++z) {
        if (psi[z] <= 1e-12) continue;
        ChainVector enc = encode_basis_state(*g.complex, n, bits_of(z));
        enc *= psi[z];
        out += enc;
    }
    double coeff = std::pow(0.5, n);
    for (std::size_t t = 0; t < sat.terms.size(); ++t) {
        const Projector& proj = sat.terms[t];
        if (proj.kind != Projector::Kind::Diff) continue;
        std::vector<int> rest_blocks;
        for (int i = 0; i < n; ++i)
            if (std::find(proj.qubits.begin(), proj.qubits.end(), i) == proj.qubits.end())
                rest_blocks.push_back(i);
        // every support string matching x on the term's qubits, paired with y
        for (long z = 0; z < psi.size(); ++z) {
            if (psi[z] <= 1e-12) continue;
            std::string bits = bits_of(z);
            bool matches_x = true;
            for (int k = 0; k < proj.arity(); ++k)
                if (bits[proj.qubits[k]] != proj.x[k]) matches_x = false;
            if (!matches_x) continue;
            std::string ybits = bits;
            for (int k = 0; k < proj.arity(); ++k) ybits[proj.qubits[k]] = proj.y[k];
            long zy = 0;
            for (int i = 0; i < n; ++i)
                if (ybits[i] == '1') zy |= 1L << (n - 1 - i);
            if (psi[zy] <= 1e-12)
                throw std::invalid_argument("psi support not closed under a diff term");
            // rest part of this support string
            std::vector<std::vector<VertexId>> rest_products{{}};
            for (int i : rest_blocks) {
                int b = bits[i] - '0';
                std::vector<std::vector<VertexId>> next;
                for (const auto& base : rest_products)
                    for (auto [a, c] : square_cycle_numerals()) {
                        auto cur = base;
                        cur.push_back(qubit_vertex(i, a, b));
                        cur.push_back(qubit_vertex(i, c, b));
                        next.push_back(std::move(cur));
                    }
                rest_products = std::move(next);
            }
            // layer amplitudes match Enc on unnormalized |sigma>; the
            // normalized-basis coefficient picks up the simplex weight
            for (const auto& layer : g.terms[t].wormhole_layers)
                for (const auto& piece : layer)
                    for (const auto& r : rest_products) {
                        auto prod = detail::sorted_union(piece, r);
                        double w = 1.0;
                        for (VertexId v : prod) w *= g.graph.weight(v);
                        out.add_chosen(*g.complex, prod, psi[z] * coeff * w);
                    }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Toffoli circuit front end
// ---------------------------------------------------------------------------

struct ToffoliGate {
    int c1, c2, target;
};

struct ToffoliCircuit {
    int witness_qubits = 1;
    std::vector<char> ancilla_inits;  // '0', '1' or '+'
    std::vector<ToffoliGate> gates;   // act on witness+ancilla wires
    int output_wire = 0;              // measured wire
};

/// Kitaev-style clock construction restricted to Toffoli circuits; emits only
/// Basis and Diff projectors (the Toffoli propagation term splits into the
/// five displayed rank-1 projectors, clock bits absorbed into the patterns).
inline StoquasticSAT circuit_to_sat(const ToffoliCircuit& circ) {
    const int Nw = circ.witness_qubits;
    const int Na = static_cast<int>(circ.ancilla_inits.size());
    const int L = static_cast<int>(circ.gates.size());
    const int clock0 = Nw + Na;
    StoquasticSAT sat;
    sat.n = Nw + Na + (L + 1);
    auto basis = [&](std::vector<int> qs, std::string x) {
        Projector p;
        p.kind = Projector::Kind::Basis;
        p.qubits = std::move(qs);
        p.x = std::move(x);
        sat.terms.push_back(p);
    };
    auto diff = [&](std::vector<int> qs, std::string x, std::string y) {
        Projector p;
        p.kind = Projector::Kind::Diff;
        p.qubits = std::move(qs);
        p.x = std::move(x);
        p.y = std::move(y);
        sat.terms.push_back(p);
    };
    // ancilla initialization, enforced at clock time 0
    for (int k = 0; k < Na; ++k) {
        int a = Nw + k;
        char init = circ.ancilla_inits[k];
        if (init != '0' && init != '1' && init != '+')
            throw std::invalid_argument("ancilla init must be 0, 1 or +");
        if (L == 0) {
            if (init == '0')
                basis({a, clock0}, "11");
            else if (init == '1')
                basis({a, clock0}, "01");
            else
                diff({a, clock0}, "01", "11");
        } else {
            if (init == '0')
                basis({a, clock0, clock0 + 1}, "110");
            else if (init == '1')
                basis({a, clock0, clock0 + 1}, "010");
            else
                diff({a, clock0, clock0 + 1}, "010", "110");
        }
    }
    // clock validity
    basis({clock0}, "0");
    for (int l = 1; l <= L; ++l) basis({clock0 + l - 1, clock0 + l}, "01");
    // gate propagation
    for (int j = 1; j <= L; ++j) {
        const ToffoliGate& gate = circ.gates[j - 1];
        if (gate.c1 == gate.c2 || gate.c1 == gate.target || gate.c2 == gate.target ||
            gate.c1 >= Nw + Na || gate.c2 >= Nw + Na || gate.target >= Nw + Na)
            throw std::invalid_argument("malformed toffoli gate");
        std::vector<int> qs{clock0 + j - 1, clock0 + j};
        std::string pre = "1";  // Cl(j-1) = 1
        if (j + 1 <= L) qs.push_back(clock0 + j + 1);
        auto emit = [&](const std::string& xin, const std::string& yin,
                        std::vector<int> data) {
            std::vector<int> all = qs;
            all.insert(all.end(), data.begin(), data.end());
            std::string x = pre + xin.substr(0, 1) + (j + 1 <= L ? "0" : "") + xin.substr(1);
            std::string y = pre + yin.substr(0, 1) + (j + 1 <= L ? "0" : "") + yin.substr(1);
            // qubit lists must be ascending with bits aligned
            std::vector<std::pair<int, char>> px, py;
            for (std::size_t q = 0; q < all.size(); ++q) {
                px.push_back({all[q], x[q]});
                py.push_back({all[q], y[q]});
            }
            std::sort(px.begin(), px.end());
            std::sort(py.begin(), py.end());
            std::vector<int> qsorted;
            std::string xs, ys;
            for (std::size_t q = 0; q < px.size(); ++q) {
                qsorted.push_back(px[q].first);
                xs += px[q].second;
                ys += py[q].second;
            }
            diff(qsorted, xs, ys);
        };
        // control patterns that leave the target alone
        for (const std::string& p2 : {std::string("00"), std::string("01"), std::string("10")})
            for (char tbit : {'0', '1'}) {
                std::string xin = std::string("1") + p2 + tbit;  // Cl(j)=1
                std::string yin = std::string("0") + p2 + tbit;  // Cl(j)=0
                emit(xin, yin, {gate.c1, gate.c2, gate.target});
            }
        // the flipping pair
        emit("1110", "0111", {gate.c1, gate.c2, gate.target});
        emit("1111", "0110", {gate.c1, gate.c2, gate.target});
    }
    // measurement: output must be 1 at the final time
    basis({circ.output_wire, clock0 + L}, "01");
    validate_sat(sat);
    return sat;
}

}  // namespace homwalk
