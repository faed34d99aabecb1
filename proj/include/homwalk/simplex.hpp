#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace homwalk {

using VertexId = std::int32_t;

struct degenerate_simplex_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A simplex stored as a strictly increasing vertex tuple plus a sign giving
/// its orientation relative to the sorted order. |sigma-bar> = -|sigma>, so
/// the pair (vertices, -sign) is the same simplex with opposite orientation.
struct OrientedSimplex {
    std::vector<VertexId> vertices;  // strictly increasing
    int sign = +1;

    int dim() const { return static_cast<int>(vertices.size()) - 1; }

    OrientedSimplex opposite() const { return {vertices, -sign}; }

    bool same_vertices(const OrientedSimplex& o) const { return vertices == o.vertices; }

    bool operator==(const OrientedSimplex& o) const {
        return vertices == o.vertices && sign == o.sign;
    }

    std::string str() const {
        std::string s = sign < 0 ? "-[" : "[";
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(vertices[i]);
        }
        return s + "]";
    }
};

/// Sorts a vertex list and reports the parity of the sorting permutation.
/// Returns (+1 oriented sorted simplex, relative sign). relative = +1 iff
/// the permutation from the input ordering to sorted order is even.
inline std::pair<OrientedSimplex, int> canonicalize(std::vector<VertexId> v) {
    int rel = +1;
    // insertion sort; counts inversions mod 2, input lists are tiny
    for (std::size_t i = 1; i < v.size(); ++i) {
        VertexId key = v[i];
        std::size_t j = i;
        while (j > 0 && v[j - 1] > key) {
            v[j] = v[j - 1];
            --j;
            rel = -rel;
        }
        v[j] = key;
    }
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] == v[i - 1])
            throw degenerate_simplex_error("duplicate vertex in simplex");
    return {OrientedSimplex{std::move(v), +1}, rel};
}

/// The d+1 faces of sigma with incidence signs. Removing the i-th smallest
/// vertex contributes sigma.sign * (-1)^i on the +1-oriented face; combining
/// with the face's own chosen sign is the caller's concern (see CliqueComplex).
inline std::vector<std::pair<OrientedSimplex, int>> boundary_faces(const OrientedSimplex& s) {
    std::vector<std::pair<OrientedSimplex, int>> out;
    if (s.dim() < 1) return out;
    out.reserve(s.vertices.size());
    int inc = s.sign;
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
        std::vector<VertexId> f;
        f.reserve(s.vertices.size() - 1);
        for (std::size_t j = 0; j < s.vertices.size(); ++j)
            if (j != i) f.push_back(s.vertices[j]);
        out.push_back({OrientedSimplex{std::move(f), +1}, inc});
        inc = -inc;
    }
    return out;
}

struct VertexVectorHash {
    std::size_t operator()(const std::vector<VertexId>& v) const {
        std::size_t h = 0x9e3779b97f4a7c15ull;
        for (VertexId x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace homwalk
