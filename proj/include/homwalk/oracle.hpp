#pragma once

#include <gmpxx.h>

#include "homwalk/operators.hpp"

namespace homwalk {

namespace detail {

/// Exact rank over Q by rational Gaussian elimination with partial pivoting.
/// Ranks of incidence matrices are weight-independent (weights are positive
/// diagonal scalings), so callers pass the sign-only matrix.
inline std::size_t rank_rational(std::vector<std::vector<mpq_class>> rows, std::size_t ncols) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][col] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[rank], rows[piv]);
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            if (rows[r][col] == 0) continue;
            mpq_class f = rows[r][col] / rows[rank][col];
            for (std::size_t c = col; c < ncols; ++c) rows[r][c] -= f * rows[rank][c];
        }
        ++rank;
    }
    return rank;
}

/// Rank over Z_p with machine arithmetic; a certified lower bound on the
/// rational rank, exact unless p divides an invariant factor.
inline std::size_t rank_mod_p(const Eigen::SparseMatrix<double>& m, std::uint64_t p) {
    std::size_t nr = m.rows(), nc = m.cols();
    std::vector<std::vector<std::uint64_t>> rows(nr, std::vector<std::uint64_t>(nc, 0));
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            long long v = llround(it.value());
            rows[it.row()][it.col()] = static_cast<std::uint64_t>(((v % (long long)p) + p) % p);
        }
    auto inv = [p](std::uint64_t a) {
        std::uint64_t r = 1, b = a, e = p - 2;
        while (e) {
            if (e & 1) r = (__uint128_t)r * b % p;
            b = (__uint128_t)b * b % p;
            e >>= 1;
        }
        return r;
    };
    std::size_t rank = 0;
    for (std::size_t col = 0; col < nc && rank < nr; ++col) {
        std::size_t piv = rank;
        while (piv < nr && rows[piv][col] == 0) ++piv;
        if (piv == nr) continue;
        std::swap(rows[rank], rows[piv]);
        std::uint64_t ip = inv(rows[rank][col]);
        for (std::size_t r = rank + 1; r < nr; ++r) {
            if (rows[r][col] == 0) continue;
            std::uint64_t f = (__uint128_t)rows[r][col] * ip % p;
            for (std::size_t c = col; c < nc; ++c) {
                std::uint64_t sub = (__uint128_t)f * rows[rank][c] % p;
                rows[r][c] = (rows[r][c] + p - sub) % p;
            }
        }
        ++rank;
    }
    return rank;
}

}  // namespace detail

/// Exact rank of the incidence-sign matrix of the boundary operator.
inline std::size_t boundary_rank_exact(const CliqueComplex& X, int d) {
    if (d < 1 || d > X.dmax() || X.count(d) == 0 || X.count(d - 1) == 0) return 0;
    std::size_t nr = X.count(d - 1), nc = X.count(d);
    if (std::max(nr, nc) <= 1500) {
        std::vector<std::vector<mpq_class>> rows(nr, std::vector<mpq_class>(nc, 0));
        for (std::size_t i = 0; i < nc; ++i)
            for (auto& [fi, inc] : X.faces_of(d, i)) rows[fi][i] = inc;
        return detail::rank_rational(std::move(rows), nc);
    }
    // sign-only sparse matrix, two 31-bit primes must agree
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < nc; ++i)
        for (auto& [fi, inc] : X.faces_of(d, i))
            trip.push_back({static_cast<int>(fi), static_cast<int>(i), double(inc)});
    Eigen::SparseMatrix<double> m(nr, nc);
    m.setFromTriplets(trip.begin(), trip.end());
    std::size_t r1 = detail::rank_mod_p(m, 2147483647ull);
    std::size_t r2 = detail::rank_mod_p(m, 2147483629ull);
    if (r1 != r2) throw operator_consistency_error("modular ranks disagree");
    return r1;
}

struct BettiProfile {
    std::vector<long> betti;                          // per dimension 0..dmax
    std::vector<std::vector<ChainVector>> harmonics;  // per dimension, may be empty
};

/// Exact Betti numbers via rational rank: betti_d = |X_d| - rank d_d - rank d_{d+1}.
/// Harmonic bases come from a dense eigensolve and are only produced for
/// dimensions below `harmonic_cap` basis simplices.
inline BettiProfile betti(const CliqueComplex& X, int max_dim = -1,
                          std::size_t rank_cap = 50000, std::size_t harmonic_cap = 2000,
                          bool want_harmonics = true) {
    if (max_dim < 0) max_dim = X.dmax();
    std::size_t total = 0;
    for (int d = 0; d <= X.dmax(); ++d) total += X.count(d);
    if (total > rank_cap) throw too_large_error("complex too large for oracle rank");
    BettiProfile out;
    std::vector<std::size_t> rk(max_dim + 2, 0);
    for (int d = 1; d <= std::min(max_dim + 1, X.dmax()); ++d) rk[d] = boundary_rank_exact(X, d);
    for (int d = 0; d <= max_dim; ++d) {
        long b = static_cast<long>(X.count(d)) - static_cast<long>(rk[d]) -
                 static_cast<long>(d + 1 <= X.dmax() ? rk[d + 1] : 0);
        out.betti.push_back(b);
    }
    out.harmonics.resize(max_dim + 1);
    if (!want_harmonics) return out;
    for (int d = 0; d <= max_dim; ++d) {
        if (out.betti[d] <= 0 || X.count(d) == 0 || X.count(d) > harmonic_cap) continue;
        SparseOperator L = laplacian(X, d, LaplacianKind::Full);
        Eigen::MatrixXd vecs;
        auto vals = low_spectrum(L, out.betti[d], 1e-12, harmonic_cap, &vecs);
        for (long k = 0; k < out.betti[d]; ++k) {
            if (vals[k] > 1e-9 * (1.0 + L.inf_norm()))
                throw operator_consistency_error(
                    "numerical kernel smaller than exact Betti number");
            ChainVector h(d);
            for (std::size_t i = 0; i < X.count(d); ++i)
                if (std::abs(vecs(i, k)) > 1e-14) h.add_index(i, vecs(i, k));
            out.harmonics[d].push_back(std::move(h));
        }
    }
    return out;
}

inline bool is_cycle(const ChainVector& c, const CliqueComplex& X, double tol = 1e-9) {
    if (c.dim() == 0) return true;
    auto b = boundary(X, c.dim());
    return apply(b, c).norm() <= tol * std::max(1.0, c.norm());
}

/// Least-squares residual test for membership in Im(boundary_{d+1}).
inline bool is_boundary(const ChainVector& c, const CliqueComplex& X, double tol = 1e-9) {
    if (c.dim() + 1 > X.dmax() || X.count(c.dim() + 1) == 0) return c.norm() == 0.0;
    auto b = boundary(X, c.dim() + 1);
    Eigen::MatrixXd B = Eigen::MatrixXd(b.mat);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(B.rows());
    for (auto& [i, v] : c.entries()) y[i] = v;
    Eigen::VectorXd x = B.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    return (B * x - y).norm() <= tol * std::max(1.0, y.norm());
}

// ---------------------------------------------------------------------------
// Stoquastic SAT brute force
// ---------------------------------------------------------------------------

struct Projector {
    enum class Kind { Basis, Diff };
    Kind kind;
    std::vector<int> qubits;  // acting qubit set, ascending positions in [0,n)
    std::string x;            // bitstring over `qubits`
    std::string y;            // Diff only

    int arity() const { return static_cast<int>(qubits.size()); }
};

struct StoquasticSAT {
    int n = 0;
    std::vector<Projector> terms;
};

inline void validate_sat(const StoquasticSAT& sat) {
    for (const auto& t : sat.terms) {
        if (t.x.size() != t.qubits.size())
            throw std::invalid_argument("projector bitstring length mismatch");
        for (int q : t.qubits)
            if (q < 0 || q >= sat.n) throw std::invalid_argument("projector qubit out of range");
        if (t.kind == Projector::Kind::Diff) {
            if (t.y.size() != t.x.size() || t.y == t.x)
                throw std::invalid_argument("diff projector needs distinct equal-length x,y");
        }
    }
}

/// Dense H = sum h_i on 2^n dimensions.
inline Eigen::MatrixXd sat_hamiltonian(const StoquasticSAT& sat) {
    validate_sat(sat);
    if (sat.n > 12) throw too_large_error("sat brute force capped at 12 qubits");
    std::size_t dim = std::size_t(1) << sat.n;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    auto pattern = [](std::size_t z, const std::vector<int>& qs, const std::string& bits,
                      int n) {
        std::size_t out = z;
        for (std::size_t k = 0; k < qs.size(); ++k) {
            std::size_t bit = std::size_t(1) << (n - 1 - qs[k]);
            if (bits[k] == '1')
                out |= bit;
            else
                out &= ~bit;
        }
        return out;
    };
    for (const auto& t : sat.terms) {
        for (std::size_t z = 0; z < dim; ++z) {
            std::size_t zx = pattern(z, t.qubits, t.x, sat.n);
            if (zx != z) continue;  // enumerate each matched configuration once
            if (t.kind == Projector::Kind::Basis) {
                H(z, z) += 1.0;
            } else {
                std::size_t zy = pattern(z, t.qubits, t.y, sat.n);
                H(z, z) += 0.5;
                H(zy, zy) += 0.5;
                H(z, zy) -= 0.5;
                H(zy, z) -= 0.5;
            }
        }
    }
    return H;
}

struct SatKernel {
    long dimension = 0;
    std::optional<Eigen::VectorXd> nonnegative_witness;  // present when dimension > 0
};

/// Dense kernel of sum h_i; stoquasticity guarantees a non-negative kernel
/// vector exists whenever the kernel is non-trivial.
inline SatKernel sat_kernel_bruteforce(const StoquasticSAT& sat, double tol = 1e-9) {
    Eigen::MatrixXd H = sat_hamiltonian(sat);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    SatKernel out;
    // Project the all-ones vector onto the kernel. The kernel of a sum of
    // S_stoq projectors is spanned by uniform class states, so the projection
    // is a uniform non-negative subset state whenever the kernel is nonzero.
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(H.rows());
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()[i] < tol) {
            ++out.dimension;
            const auto v = es.eigenvectors().col(i);
            proj += v.dot(Eigen::VectorXd::Ones(H.rows())) * v;
        }
    }
    if (out.dimension > 0) {
        if (proj.minCoeff() < -1e-7 || proj.norm() < 1e-9)
            throw operator_consistency_error("kernel projection of all-ones not non-negative");
        proj = proj.cwiseMax(0.0);
        proj.normalize();
        out.nonnegative_witness = proj;
    }
    return out;
}

}  // namespace homwalk
