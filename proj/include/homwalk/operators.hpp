#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "homwalk/complex.hpp"

namespace homwalk {

struct operator_consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Linear operator between chain spaces in the normalized basis. Rows are
/// indexed by codomain-dimension simplices, columns by domain-dimension
/// simplices, in the complex's lexicographic order.
struct SparseOperator {
    const CliqueComplex* X = nullptr;
    int domain_dim = 0;
    int codomain_dim = 0;
    Eigen::SparseMatrix<double> mat;

    std::size_t rows() const { return mat.rows(); }
    std::size_t cols() const { return mat.cols(); }

    /// Orientation-canonicalized lookup: querying with a flipped-orientation
    /// simplex on either side negates the entry.
    double entry(const OrientedSimplex& row, const OrientedSimplex& col) const {
        auto ri = X->find(codomain_dim, row.vertices);
        auto ci = X->find(domain_dim, col.vertices);
        if (!ri || !ci) throw std::invalid_argument("simplex not in complex");
        double v = mat.coeff(*ri, *ci);
        int flip = row.sign * X->chosen_sign(codomain_dim, *ri) * col.sign *
                   X->chosen_sign(domain_dim, *ci);
        return v * flip;
    }

    bool is_symmetric(double tol = 1e-12) const {
        if (mat.rows() != mat.cols()) return false;
        Eigen::SparseMatrix<double> d = Eigen::SparseMatrix<double>(mat.transpose()) - mat;
        for (int k = 0; k < d.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
                if (std::abs(it.value()) > tol) return false;
        return true;
    }

    double inf_norm() const {
        Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(mat.rows());
        for (int k = 0; k < mat.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
                rowsum[it.row()] += std::abs(it.value());
        return rowsum.size() ? rowsum.maxCoeff() : 0.0;
    }
};

/// Weighted boundary operator in the normalized basis:
/// entry (tau, sigma) = incidence sign * w(vertex removed from sigma).
inline SparseOperator boundary(const CliqueComplex& X, int d) {
    if (d < 1 || d > X.dmax()) throw std::invalid_argument("boundary: dimension out of range");
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < X.count(d); ++i) {
        const auto& s = X.simplex(d, i);
        int inc = s.sign;
        for (std::size_t k = 0; k < s.vertices.size(); ++k) {
            std::vector<VertexId> f;
            for (std::size_t j = 0; j < s.vertices.size(); ++j)
                if (j != k) f.push_back(s.vertices[j]);
            auto fi = X.find(d - 1, f);
            if (!fi) throw std::logic_error("complex not closed under faces");
            double w = X.graph().weight(s.vertices[k]);
            trip.push_back({static_cast<int>(*fi), static_cast<int>(i),
                            inc * X.chosen_sign(d - 1, *fi) * w});
            inc = -inc;
        }
    }
    SparseOperator op{&X, d, d - 1, {}};
    op.mat.resize(X.count(d - 1), X.count(d));
    op.mat.setFromTriplets(trip.begin(), trip.end());
    return op;
}

/// delta_d = (boundary_{d+1})^T entrywise in the normalized basis.
inline SparseOperator coboundary(const CliqueComplex& X, int d) {
    SparseOperator b = boundary(X, d + 1);
    SparseOperator op{&X, d, d + 1, {}};
    op.mat = b.mat.transpose();
    return op;
}

enum class LaplacianKind { Up, Down, Full };

namespace detail {

/// Closed-form Laplacian matrix elements (the goldberg table), used to
/// verify the composition-assembled operator.
inline Eigen::SparseMatrix<double> laplacian_table(const CliqueComplex& X, int d,
                                                   LaplacianKind kind) {
    const auto& G = X.graph();
    std::size_t n = X.count(d);
    std::vector<Eigen::Triplet<double>> trip;
    // diagonal
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = X.simplex(d, i);
        double up = 0.0, down = 0.0;
        if (d + 1 <= X.dmax())
            for (auto& [ci, inc] : X.cofaces_of(d, i)) {
                (void)inc;
                // the added vertex
                const auto& cs = X.simplex(d + 1, ci);
                for (VertexId v : cs.vertices)
                    if (!std::binary_search(s.vertices.begin(), s.vertices.end(), v))
                        up += G.weight(v) * G.weight(v);
            }
        if (d >= 1)  // boundary of vertices is zero
            for (VertexId v : s.vertices) down += G.weight(v) * G.weight(v);
        double val = kind == LaplacianKind::Up ? up
                   : kind == LaplacianKind::Down ? down
                                                 : up + down;
        if (val != 0.0) trip.push_back({static_cast<int>(i), static_cast<int>(i), val});
    }
    // off-diagonal. Distinct d-simplices share at most one (d-1)-face and at
    // most one coface, so each pair is visited once per mechanism; sign
    // products encode "induce the same/opposite orientation".
    std::map<std::pair<std::size_t, std::size_t>, double> off;
    auto removed_weight = [&](const OrientedSimplex& A, const OrientedSimplex& B) {
        for (VertexId v : A.vertices)
            if (!std::binary_search(B.vertices.begin(), B.vertices.end(), v))
                return G.weight(v);
        return 1.0;
    };
    if (kind != LaplacianKind::Up && d >= 1) {
        for (std::size_t ti = 0; ti < X.count(d - 1); ++ti) {
            auto star = X.cofaces_of(d - 1, ti);
            for (std::size_t a = 0; a < star.size(); ++a)
                for (std::size_t b = a + 1; b < star.size(); ++b) {
                    auto [ia, sa] = star[a];
                    auto [ib, sb] = star[b];
                    const auto& A = X.simplex(d, ia);
                    const auto& B = X.simplex(d, ib);
                    off[{std::min(ia, ib), std::max(ia, ib)}] +=
                        sa * sb * removed_weight(A, B) * removed_weight(B, A);
                }
        }
    }
    if (kind != LaplacianKind::Down && d + 1 <= X.dmax()) {
        for (std::size_t ci = 0; ci < X.count(d + 1); ++ci) {
            auto faces = X.faces_of(d + 1, ci);
            for (std::size_t a = 0; a < faces.size(); ++a)
                for (std::size_t b = a + 1; b < faces.size(); ++b) {
                    auto [ia, ca] = faces[a];
                    auto [ib, cb] = faces[b];
                    const auto& A = X.simplex(d, ia);
                    const auto& B = X.simplex(d, ib);
                    off[{std::min(ia, ib), std::max(ia, ib)}] +=
                        ca * cb * removed_weight(A, B) * removed_weight(B, A);
                }
        }
    }
    for (auto& [ij, val] : off) {
        if (val == 0.0) continue;
        trip.push_back({static_cast<int>(ij.first), static_cast<int>(ij.second), val});
        trip.push_back({static_cast<int>(ij.second), static_cast<int>(ij.first), val});
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

}  // namespace detail

/// Assembles the requested Laplacian by composition and verifies it against
/// the closed-form matrix-element table.
inline SparseOperator laplacian(const CliqueComplex& X, int d, LaplacianKind kind,
                                double table_tol = 1e-10) {
    if (d < 0 || d > X.dmax()) throw std::invalid_argument("laplacian: dimension out of range");
    if (kind == LaplacianKind::Up && d + 1 > X.dmax())
        throw std::invalid_argument("up laplacian needs d+1 <= dmax");
    std::size_t n = X.count(d);
    Eigen::SparseMatrix<double> up(n, n), down(n, n);
    if (d + 1 <= X.dmax()) {
        auto b = boundary(X, d + 1);
        up = b.mat * Eigen::SparseMatrix<double>(b.mat.transpose());
    }
    if (d >= 1) {
        auto b = boundary(X, d);
        down = Eigen::SparseMatrix<double>(b.mat.transpose()) * b.mat;
    }
    SparseOperator op{&X, d, d, {}};
    op.mat = kind == LaplacianKind::Up ? up : kind == LaplacianKind::Down ? down : up + down;
    Eigen::SparseMatrix<double> diff = op.mat - detail::laplacian_table(X, d, kind);
    for (int k = 0; k < diff.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
            if (std::abs(it.value()) > table_tol)
                throw operator_consistency_error(
                    "laplacian disagrees with closed-form table at (" +
                    std::to_string(it.row()) + "," + std::to_string(it.col()) + ") by " +
                    std::to_string(it.value()));
    return op;
}

/// Restricted down Laplacian for a (d-1)-simplex tau: (Pi_tau d)^T (Pi_tau d).
/// Rank <= 1 by construction.
inline SparseOperator restricted_down(const CliqueComplex& X, int d,
                                      const OrientedSimplex& tau) {
    auto ti = X.find(d - 1, tau.vertices);
    if (!ti) throw std::invalid_argument("tau not in complex");
    auto b = boundary(X, d);
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(b.mat.cols());
    for (int k = 0; k < b.mat.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(b.mat, k); it; ++it)
            if (it.row() == static_cast<int>(*ti)) r[it.col()] = it.value();
    SparseOperator op{&X, d, d, {}};
    op.mat = (r.transpose() * r).sparseView();
    return op;
}

/// Restricted up Laplacian for a (d+1)-simplex tau: (Pi_tau delta)^T (Pi_tau delta).
inline SparseOperator restricted_up(const CliqueComplex& X, int d, const OrientedSimplex& tau) {
    auto ti = X.find(d + 1, tau.vertices);
    if (!ti) throw std::invalid_argument("tau not in complex");
    auto b = boundary(X, d + 1);  // delta_d = b^T; Pi_tau delta selects column ti of b
    Eigen::VectorXd col = Eigen::VectorXd::Zero(b.mat.rows());
    for (Eigen::SparseMatrix<double>::InnerIterator it(b.mat, static_cast<int>(*ti)); it; ++it)
        col[it.row()] = it.value();
    SparseOperator op{&X, d, d, {}};
    op.mat = (col * col.transpose()).sparseView();
    return op;
}

/// Smallest k eigenvalues of a symmetric operator. Dense below `dense_cap`,
/// shifted inverse iteration with deterministic start vectors above.
inline std::vector<double> low_spectrum(const SparseOperator& op, int k, double tol = 1e-10,
                                        std::size_t dense_cap = 2000,
                                        Eigen::MatrixXd* vectors = nullptr) {
    if (!op.is_symmetric(1e-9)) throw std::invalid_argument("operator not symmetric");
    const std::size_t n = op.mat.rows();
    if (n == 0) return {};
    k = std::min<std::size_t>(k, n);
    if (n <= dense_cap) {
        Eigen::MatrixXd dense = Eigen::MatrixXd(op.mat);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
        std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + k);
        if (vectors) *vectors = es.eigenvectors().leftCols(k);
        return out;
    }
    if (n > 60000) throw too_large_error("operator dimension above eigensolver hard cap");
    // Block shifted inverse iteration on (A + mu I); deterministic start.
    double mu = 1e-6 * (1.0 + op.inf_norm());
    Eigen::SparseMatrix<double> shifted = op.mat;
    for (std::size_t i = 0; i < n; ++i) shifted.coeffRef(i, i) += mu;
    shifted.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
    if (solver.info() != Eigen::Success)
        throw operator_consistency_error("shift-invert factorization failed");
    Eigen::MatrixXd V(n, k);
    std::uint64_t state = 0x243f6a8885a308d3ull;
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            V(i, j) = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
        }
    Eigen::VectorXd evals(k);
    for (int iter = 0; iter < 500; ++iter) {
        V = solver.solve(V);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
        V = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
        Eigen::MatrixXd small = V.transpose() * (op.mat * V);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
        V = V * es.eigenvectors();
        Eigen::VectorXd now = es.eigenvalues();
        if (iter > 2 && (now - evals).cwiseAbs().maxCoeff() < tol * (1.0 + op.inf_norm())) {
            evals = now;
            break;
        }
        evals = now;
    }
    if (vectors) *vectors = V;
    return std::vector<double>(evals.data(), evals.data() + k);
}

inline double min_eigenvalue(const SparseOperator& op, double tol = 1e-10,
                             std::size_t dense_cap = 2000) {
    auto v = low_spectrum(op, 1, tol, dense_cap);
    if (v.empty()) throw std::invalid_argument("empty operator");
    return v[0];
}

/// Scale-aware kernel membership threshold (see module design notes).
inline bool in_kernel_threshold(double eigenvalue, const SparseOperator& op) {
    return eigenvalue < 1e-8 * (1.0 + op.inf_norm());
}

/// Applies an operator to a chain, returning a chain in the codomain.
inline ChainVector apply(const SparseOperator& op, const ChainVector& c) {
    if (c.dim() != op.domain_dim) throw std::invalid_argument("apply: dimension mismatch");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(op.mat.cols());
    for (auto& [i, v] : c.entries()) x[i] = v;
    Eigen::VectorXd y = op.mat * x;
    ChainVector out(op.codomain_dim);
    for (int i = 0; i < y.size(); ++i)
        if (y[i] != 0.0) out.add_index(i, y[i]);
    return out;
}

}  // namespace homwalk
