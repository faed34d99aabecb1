#pragma once

#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "homwalk/simplex.hpp"

namespace homwalk {

struct invalid_graph_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct too_large_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vertex-weighted simple graph. Vertex ids are arbitrary non-negative
/// integers; gadget vertex names live in the label table, never in identity.
class WeightedGraph {
public:
    void add_vertex(VertexId id, double weight, std::string label = {}) {
        if (weight <= 0.0) throw invalid_graph_error("vertex weight must be positive");
        if (index_.count(id)) throw invalid_graph_error("duplicate vertex id");
        index_[id] = ids_.size();
        ids_.push_back(id);
        weights_.push_back(weight);
        labels_.push_back(std::move(label));
        adj_.emplace_back();
    }

    void add_edge(VertexId a, VertexId b) {
        if (a == b) throw invalid_graph_error("self-loop");
        auto ia = index_.find(a), ib = index_.find(b);
        if (ia == index_.end() || ib == index_.end())
            throw invalid_graph_error("edge endpoint not declared");
        if (adj_[ia->second].insert(b).second) {
            adj_[ib->second].insert(a);
            ++edge_count_;
        }
    }

    bool has_vertex(VertexId id) const { return index_.count(id) != 0; }

    bool has_edge(VertexId a, VertexId b) const {
        auto it = index_.find(a);
        return it != index_.end() && adj_[it->second].count(b) != 0;
    }

    double weight(VertexId id) const { return weights_.at(slot(id)); }
    const std::string& label(VertexId id) const { return labels_.at(slot(id)); }
    void set_label(VertexId id, std::string label) { labels_[slot(id)] = std::move(label); }
    void set_weight(VertexId id, double w) {
        if (w <= 0.0) throw invalid_graph_error("vertex weight must be positive");
        weights_[slot(id)] = w;
    }

    const std::set<VertexId>& neighbors(VertexId id) const { return adj_.at(slot(id)); }

    /// Vertex ids in insertion order.
    const std::vector<VertexId>& vertex_ids() const { return ids_; }
    std::size_t vertex_count() const { return ids_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    std::vector<std::pair<VertexId, VertexId>> edges() const {
        std::vector<std::pair<VertexId, VertexId>> out;
        for (std::size_t i = 0; i < ids_.size(); ++i)
            for (VertexId b : adj_[i])
                if (ids_[i] < b) out.push_back({ids_[i], b});
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::size_t slot(VertexId id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw invalid_graph_error("unknown vertex id");
        return it->second;
    }

    std::vector<VertexId> ids_;
    std::vector<double> weights_;
    std::vector<std::string> labels_;
    std::vector<std::set<VertexId>> adj_;
    std::unordered_map<VertexId, std::size_t> index_;
    std::size_t edge_count_ = 0;
};

/// Product of vertex weights.
inline double simplex_weight(const OrientedSimplex& s, const WeightedGraph& g) {
    double w = 1.0;
    for (VertexId v : s.vertices) w *= g.weight(v);
    return w;
}

/// Clique complex of a weighted graph, enumerated up to a maximum dimension,
/// with one chosen orientation sign per simplex. Immutable once built apart
/// from orientation assignment, which must happen before operators are taken.
class CliqueComplex {
public:
    CliqueComplex() = default;

    CliqueComplex(WeightedGraph g, int dmax, std::size_t per_dim_cap = 1000000)
        : graph_(std::move(g)), dmax_(dmax) {
        if (dmax < 0) throw std::invalid_argument("dmax must be >= 0");
        simplices_.resize(dmax + 1);
        index_.resize(dmax + 1);
        // ordered DFS extension: a clique is grown only by vertices larger
        // than its current maximum, which yields each clique exactly once in
        // lexicographic order.
        std::vector<VertexId> ids = graph_.vertex_ids();
        std::sort(ids.begin(), ids.end());
        std::vector<VertexId> clique;
        for (VertexId v : ids) {
            clique.assign(1, v);
            std::vector<VertexId> cand;
            for (VertexId u : graph_.neighbors(v))
                if (u > v) cand.push_back(u);
            std::sort(cand.begin(), cand.end());
            extend(clique, cand, per_dim_cap);
        }
        for (int d = 0; d <= dmax_; ++d) {
            auto& list = simplices_[d];
            std::sort(list.begin(), list.end(),
                      [](const OrientedSimplex& a, const OrientedSimplex& b) {
                          return a.vertices < b.vertices;
                      });
            for (std::size_t i = 0; i < list.size(); ++i) index_[d][list[i].vertices] = i;
        }
    }

    const WeightedGraph& graph() const { return graph_; }
    int dmax() const { return dmax_; }

    std::size_t count(int d) const {
        return (d < 0 || d > dmax_) ? 0 : simplices_[d].size();
    }

    const std::vector<OrientedSimplex>& simplices(int d) const {
        static const std::vector<OrientedSimplex> empty;
        return (d < 0 || d > dmax_) ? empty : simplices_[d];
    }

    const OrientedSimplex& simplex(int d, std::size_t i) const { return simplices_[d][i]; }

    std::optional<std::size_t> find(int d, const std::vector<VertexId>& sorted_vertices) const {
        if (d < 0 || d > dmax_) return std::nullopt;
        auto it = index_[d].find(sorted_vertices);
        if (it == index_[d].end()) return std::nullopt;
        return it->second;
    }

    bool contains(const OrientedSimplex& s) const { return find(s.dim(), s.vertices).has_value(); }

    /// Chosen orientation sign of the simplex with these (sorted) vertices.
    int chosen_sign(int d, std::size_t i) const { return simplices_[d][i].sign; }

    void set_sign(int d, std::size_t i, int sign) {
        if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
        if (d == 0 && sign != 1) throw std::invalid_argument("vertices have sign +1");
        simplices_[d][i].sign = sign;
    }

    double weight(int d, std::size_t i) const { return simplex_weight(simplices_[d][i], graph_); }

    /// Faces of the stored simplex with incidence signs relative to the
    /// chosen orientations on both sides: entries are (face index, sign) with
    /// sign = sigma.sign * (-1)^i * face.sign.
    std::vector<std::pair<std::size_t, int>> faces_of(int d, std::size_t i) const {
        std::vector<std::pair<std::size_t, int>> out;
        if (d < 1) return out;
        for (auto& [face, inc] : boundary_faces(simplices_[d][i])) {
            auto idx = find(d - 1, face.vertices);
            if (!idx) throw std::logic_error("complex not closed under faces");
            out.push_back({*idx, inc * simplices_[d - 1][*idx].sign});
        }
        return out;
    }

    /// Cofaces of the stored simplex with incidence signs consistent with
    /// faces_of: (coface index, sign s) appears here iff (this, s) appears in
    /// faces_of(coface).
    std::vector<std::pair<std::size_t, int>> cofaces_of(int d, std::size_t i) const {
        std::vector<std::pair<std::size_t, int>> out;
        if (d + 1 > dmax_) return out;
        const auto& s = simplices_[d][i];
        // candidate extra vertices: common neighbors of all vertices of s
        std::vector<VertexId> cand(graph_.neighbors(s.vertices[0]).begin(),
                                   graph_.neighbors(s.vertices[0]).end());
        for (std::size_t k = 1; k < s.vertices.size() && !cand.empty(); ++k) {
            const auto& nb = graph_.neighbors(s.vertices[k]);
            std::vector<VertexId> kept;
            for (VertexId u : cand)
                if (nb.count(u)) kept.push_back(u);
            cand.swap(kept);
        }
        for (VertexId u : cand) {
            std::vector<VertexId> up = s.vertices;
            up.insert(std::upper_bound(up.begin(), up.end(), u), u);
            auto idx = find(d + 1, up);
            if (!idx) continue;  // beyond enumeration cap only if dmax cut it off
            std::size_t pos = std::lower_bound(up.begin(), up.end(), u) - up.begin();
            int inc = simplices_[d + 1][*idx].sign * ((pos % 2 == 0) ? +1 : -1) * s.sign;
            out.push_back({*idx, inc});
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t degree(int d, std::size_t i) const { return cofaces_of(d, i).size(); }

private:
    void extend(std::vector<VertexId>& clique, const std::vector<VertexId>& cand,
                std::size_t cap) {
        int d = static_cast<int>(clique.size()) - 1;
        if (d <= dmax_) {
            simplices_[d].push_back(OrientedSimplex{clique, +1});
            if (simplices_[d].size() > cap)
                throw too_large_error("clique count exceeds cap at dimension " +
                                      std::to_string(d) + "; instance too large for desk scale");
        }
        if (d == dmax_) return;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            VertexId u = cand[i];
            std::vector<VertexId> next;
            const auto& nb = graph_.neighbors(u);
            for (std::size_t j = i + 1; j < cand.size(); ++j)
                if (nb.count(cand[j])) next.push_back(cand[j]);
            clique.push_back(u);
            extend(clique, next, cap);
            clique.pop_back();
        }
    }

    WeightedGraph graph_;
    int dmax_ = 0;
    std::vector<std::vector<OrientedSimplex>> simplices_;
    std::vector<std::unordered_map<std::vector<VertexId>, std::size_t, VertexVectorHash>> index_;
};

inline CliqueComplex enumerate_cliques(const WeightedGraph& g, int dmax,
                                       std::size_t per_dim_cap = 1000000) {
    return CliqueComplex(g, dmax, per_dim_cap);
}

/// Sparse chain with coefficients in the normalized basis |[sigma]>.
/// Coefficients are canonicalized onto the complex's chosen orientation:
/// writing c on sigma-bar stores -c on sigma.
class ChainVector {
public:
    ChainVector() = default;
    explicit ChainVector(int dim) : dim_(dim) {}

    int dim() const { return dim_; }

    /// Adds c on the oriented simplex given by `vertices` in the given order
    /// (not necessarily sorted) with orientation `sign` relative to that order.
    void add(const CliqueComplex& X, std::vector<VertexId> vertices, double c, int sign = +1) {
        auto [canon, rel] = canonicalize(std::move(vertices));
        if (canon.dim() != dim_) throw std::invalid_argument("chain dimension mismatch");
        auto idx = X.find(dim_, canon.vertices);
        if (!idx) throw std::invalid_argument("simplex not in complex: " + canon.str());
        entries_[*idx] += c * sign * rel * X.chosen_sign(dim_, *idx);
        if (entries_[*idx] == 0.0) entries_.erase(*idx);
    }

    void add_index(std::size_t idx, double c) {
        entries_[idx] += c;
        if (entries_[idx] == 0.0) entries_.erase(idx);
    }

    /// Adds c directly on the complex's chosen-orientation basis state.
    void add_chosen(const CliqueComplex& X, const std::vector<VertexId>& sorted_vertices,
                    double c) {
        auto idx = X.find(dim_, sorted_vertices);
        if (!idx) throw std::invalid_argument("simplex not in complex");
        add_index(*idx, c);
    }

    double coeff_index(std::size_t idx) const {
        auto it = entries_.find(idx);
        return it == entries_.end() ? 0.0 : it->second;
    }

    /// Coefficient on the chosen-orientation basis state of these vertices.
    double coeff(const CliqueComplex& X, const std::vector<VertexId>& sorted_vertices) const {
        auto idx = X.find(dim_, sorted_vertices);
        return idx ? coeff_index(*idx) : 0.0;
    }

    const std::map<std::size_t, double>& entries() const { return entries_; }

    std::size_t support_size() const { return entries_.size(); }

    double norm() const {
        double s = 0.0;
        for (auto& [i, c] : entries_) s += c * c;
        return std::sqrt(s);
    }

    double dot(const ChainVector& o) const {
        double s = 0.0;
        const auto& a = entries_.size() <= o.entries_.size() ? entries_ : o.entries_;
        const auto& b = entries_.size() <= o.entries_.size() ? o.entries_ : entries_;
        for (auto& [i, c] : a) {
            auto it = b.find(i);
            if (it != b.end()) s += c * it->second;
        }
        return s;
    }

    ChainVector& operator*=(double a) {
        for (auto& [i, c] : entries_) c *= a;
        return *this;
    }

    ChainVector& operator+=(const ChainVector& o) {
        for (auto& [i, c] : o.entries_) add_index(i, c);
        return *this;
    }

    bool nonnegative(double tol = 0.0) const {
        for (auto& [i, c] : entries_)
            if (c < -tol) return false;
        return true;
    }

private:
    int dim_ = 0;
    std::map<std::size_t, double> entries_;
};

}  // namespace homwalk
