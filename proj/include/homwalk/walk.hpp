#pragma once

#include "homwalk/filtration.hpp"

namespace homwalk {

/// Counter-based deterministic RNG: value t of stream `seed` is a pure
/// function of (seed, t), so traces replay identically across platforms.
struct CounterRng {
    std::uint64_t seed = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0,1) at counter t.
    double uniform(std::uint64_t t) const {
        std::uint64_t v = mix(mix(seed) ^ mix(t + 0x632be59bd9b4e019ull));
        return static_cast<double>(v >> 11) * 0x1.0p-53;
    }
};

struct walk_domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Fixed-node modification of the Laplacian relative to a non-negative state:
/// sign-violating off-diagonals are zeroed and pushed onto the diagonal.
/// Realizes rows lazily from the Laplacian's sparse rows.
class FixedNodeOperator {
public:
    FixedNodeOperator(const SparseOperator& delta, const PhiGood& phi)
        : delta_(&delta), phi_(&phi) {
        if (phi.coeff.empty()) throw walk_domain_error("fixed node state is zero");
        for (auto& [idx, c] : phi.coeff)
            if (c <= 0.0) throw walk_domain_error("fixed node state not positive on support");
    }

    const SparseOperator& laplacian() const { return *delta_; }
    const PhiGood& phi() const { return *phi_; }

    bool in_support(std::size_t idx) const { return phi_->in_support(idx); }

    /// Off-diagonal entries of row idx: pairs (column, F value).
    /// S+ pairs (positive Laplacian entry with both ends in the support) are
    /// dropped; everything else keeps the Laplacian value.
    std::vector<std::pair<std::size_t, double>> row_offdiag(std::size_t idx) const {
        std::vector<std::pair<std::size_t, double>> out;
        for (Eigen::SparseMatrix<double>::InnerIterator it(delta_->mat, static_cast<int>(idx));
             it; ++it) {
            std::size_t r = static_cast<std::size_t>(it.row());
            if (r == idx || it.value() == 0.0) continue;
            bool splus = it.value() > 0.0 && in_support(r) && in_support(idx);
            if (!splus) out.push_back({r, it.value()});
        }
        return out;
    }

    double diagonal(std::size_t idx) const {
        double f = delta_->mat.coeff(idx, idx);
        if (!in_support(idx)) return f;
        double ci = phi_->c(idx);
        if (ci == 0.0) throw walk_domain_error("fixed node state vanishes on a support row");
        for (Eigen::SparseMatrix<double>::InnerIterator it(delta_->mat, static_cast<int>(idx));
             it; ++it) {
            std::size_t r = static_cast<std::size_t>(it.row());
            if (r == idx) continue;
            if (it.value() > 0.0 && in_support(r)) f += it.value() * phi_->c(r) / ci;
        }
        return f;
    }

    /// Dense materialization for spectral tests.
    Eigen::MatrixXd dense() const {
        const std::size_t n = delta_->mat.rows();
        Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            F(i, i) = diagonal(i);
            for (auto& [j, v] : row_offdiag(i)) F(j, i) = v;
        }
        return F;
    }

private:
    const SparseOperator* delta_;
    const PhiGood* phi_;
};

/// beta = 1 / max diagonal of F over the support, which keeps every
/// transition probability of I - beta F non-negative.
inline double choose_beta(const FixedNodeOperator& F) {
    double mx = 0.0;
    for (auto& [idx, c] : F.phi().coeff) {
        (void)c;
        mx = std::max(mx, F.diagonal(idx));
    }
    if (mx <= 0.0) throw walk_domain_error("degenerate instance: non-positive diagonal");
    return 1.0 / mx;
}

/// Minimal L with sqrt(|X_d|) (1 - beta eps)^L <= 1/3.
inline long choose_length(double beta, double epsilon, std::size_t state_count) {
    double q = beta * epsilon;
    if (q >= 1.0) return 1;
    if (q <= 0.0) throw walk_domain_error("beta*eps must be positive");
    double L = std::log(3.0 * std::sqrt(static_cast<double>(state_count))) / -std::log1p(-q);
    return std::max<long>(1, static_cast<long>(std::ceil(L - 1e-12)));
}

/// Row of the Markov kernel P at sigma: laziness plus moves to the
/// down-adjacent simplices that share no coface, phi-ratio weighted.
/// Entries are ordered by column index; the row sums to 1 whenever the
/// fixed-node state is locally harmonic at sigma.
struct TransitionKernel {
    const FixedNodeOperator* F;
    double beta;

    std::vector<std::pair<std::size_t, double>> row(std::size_t idx) const {
        if (!F->in_support(idx)) throw walk_domain_error("walk left the support");
        auto memo = rows_.find(idx);
        if (memo != rows_.end()) return memo->second;
        std::vector<std::pair<std::size_t, double>> out;
        double ci = F->phi().c(idx);
        for (auto& [j, v] : F->row_offdiag(idx)) {
            if (!F->in_support(j)) continue;  // phi ratio vanishes
            double p = -beta * v * F->phi().c(j) / ci;
            if (p != 0.0) out.push_back({j, p});
        }
        out.push_back({idx, 1.0 - beta * F->diagonal(idx)});
        std::sort(out.begin(), out.end());
        for (auto& [j, p] : out)
            if (p < -1e-12) throw walk_domain_error("negative transition probability");
        rows_[idx] = out;
        return out;
    }

    mutable std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, double>>> rows_;
};

struct VerifierParams {
    double epsilon = 0.0;
    std::optional<double> beta;  // default: choose_beta
    std::optional<long> steps;   // default: choose_length
    std::uint64_t seed = 0;
};

struct WalkTrace {
    enum class Outcome { Accept, RejectBadWitness, RejectBadNeighbor, RejectRatioProduct };
    Outcome outcome;
    std::vector<std::size_t> sequence;  // sigma_0 .. sigma_L (truncated on reject)
    std::vector<double> ratios;         // r_1 .. r_L
    long L = 0;
    double beta = 0.0;
    std::optional<OrientedSimplex> bad_simplex;
    long bad_step = -1;

    bool accepted() const { return outcome == Outcome::Accept; }
};

namespace detail {

/// True when sigma and every adjacent essential simplex are good.
inline bool neighborhood_good(const Filtration& F, std::size_t idx,
                              std::unordered_map<std::size_t, bool>& memo,
                              std::size_t* bad_out = nullptr) {
    auto it = memo.find(idx);
    if (it != memo.end()) return it->second;
    bool ok = F.is_good(idx);
    std::size_t bad = idx;
    if (ok)
        for (std::size_t nb : F.essential_neighbors(idx))
            if (!F.is_good(nb)) {
                ok = false;
                bad = nb;
                break;
            }
    memo[idx] = ok;
    if (!ok && bad_out) *bad_out = bad;
    return ok;
}

}  // namespace detail

/// The complete verification walk. Rejects on a bad or non-essential witness,
/// on any bad simplex adjacent to the walk, or when the amplitude-ratio
/// product exceeds 1; accepts otherwise after L steps.
inline WalkTrace verify_walk(const CliqueComplex& X, const Filtration& F, std::size_t witness,
                             const PhiGood& phi, const VerifierParams& params) {
    WalkTrace tr;
    if (!F.is_essential(witness) || !F.is_good(witness)) {
        tr.outcome = WalkTrace::Outcome::RejectBadWitness;
        tr.bad_simplex = X.simplex(F.dim(), witness);
        return tr;
    }
    SparseOperator delta = laplacian(X, F.dim(), LaplacianKind::Full);
    FixedNodeOperator fn(delta, phi);
    tr.beta = params.beta ? *params.beta : choose_beta(fn);
    tr.L = params.steps ? *params.steps
                        : choose_length(tr.beta, params.epsilon, X.count(F.dim()));
    TransitionKernel kernel{&fn, tr.beta};
    CounterRng rng{params.seed};

    std::unordered_map<std::size_t, bool> memo;
    std::size_t cur = witness;
    tr.sequence.push_back(cur);
    for (long t = 0; t <= tr.L; ++t) {
        std::size_t bad = cur;
        if (!detail::neighborhood_good(F, cur, memo, &bad)) {
            tr.outcome = WalkTrace::Outcome::RejectBadNeighbor;
            tr.bad_simplex = X.simplex(F.dim(), bad);
            tr.bad_step = t;
            return tr;
        }
        if (t == tr.L) break;
        auto row = kernel.row(cur);
        double u = rng.uniform(static_cast<std::uint64_t>(t));
        double acc = 0.0;
        std::optional<std::size_t> next;
        for (auto& [j, p] : row) {
            acc += p;
            if (u < acc) {
                next = j;
                break;
            }
        }
        if (!next) {
            if (1.0 - acc > 1e-9) {
                // sub-stochastic row: the state is locally non-harmonic, the
                // leftover mass rejects
                tr.outcome = WalkTrace::Outcome::RejectBadNeighbor;
                tr.bad_simplex = X.simplex(F.dim(), cur);
                tr.bad_step = t;
                return tr;
            }
            for (auto it = row.rbegin(); it != row.rend(); ++it)
                if (it->second > 0.0) {
                    next = it->first;
                    break;
                }
        }
        tr.ratios.push_back(phi.c(*next) / phi.c(cur));
        cur = *next;
        tr.sequence.push_back(cur);
    }
    // telescoped ratio product: phi(sigma_L)/phi(sigma_0)
    double prod = phi.c(cur) / phi.c(witness);
    if (prod > 1.0 + 1e-9) {
        tr.outcome = WalkTrace::Outcome::RejectRatioProduct;
        return tr;
    }
    tr.outcome = WalkTrace::Outcome::Accept;
    return tr;
}

/// Builds phi_good from every good seed in the lowest populated level and
/// returns the support simplex of maximal normalized amplitude (ties:
/// lexicographically smallest).
inline std::size_t honest_witness(const CliqueComplex& X, const Filtration& F) {
    std::vector<std::size_t> seeds;
    for (int lvl = 0; lvl <= F.max_level() && seeds.empty(); ++lvl)
        for (std::size_t idx : F.essential(lvl))
            if (F.is_good(idx)) seeds.push_back(idx);
    if (seeds.empty()) throw walk_domain_error("no good simplex in the lowest level");
    std::optional<std::size_t> best;
    double best_c = -1.0;
    for (std::size_t seed : seeds) {
        PhiGood phi = build_phi_good(X, F, seed);
        for (auto& [idx, c] : phi.coeff) {
            if (c > best_c + 1e-12 || (std::abs(c - best_c) <= 1e-12 &&
                                       (!best || X.simplex(F.dim(), idx).vertices <
                                                     X.simplex(F.dim(), *best).vertices))) {
                best = idx;
                best_c = std::max(best_c, c);
            }
        }
    }
    return *best;
}

/// Exact acceptance probability: propagates the distribution through the
/// kernel restricted to all-good neighborhoods, then keeps the end states
/// whose telescoped ratio product phi(end)/phi(start) is <= 1.
inline double acceptance_probability_exact(const CliqueComplex& X, const Filtration& F,
                                           std::size_t witness, const PhiGood& phi,
                                           double beta, long L) {
    if (!F.is_essential(witness) || !F.is_good(witness)) return 0.0;
    if (X.count(F.dim()) > 5000) throw too_large_error("state space too large for exact walk");
    SparseOperator delta = laplacian(X, F.dim(), LaplacianKind::Full);
    FixedNodeOperator fn(delta, phi);
    TransitionKernel kernel{&fn, beta};
    std::unordered_map<std::size_t, bool> memo;
    std::unordered_map<std::size_t, double> dist;
    if (!detail::neighborhood_good(F, witness, memo)) return 0.0;
    dist[witness] = 1.0;
    for (long t = 0; t < L; ++t) {
        std::unordered_map<std::size_t, double> next;
        for (auto& [idx, mass] : dist) {
            for (auto& [j, p] : kernel.row(idx)) {
                if (p == 0.0) continue;
                if (!detail::neighborhood_good(F, j, memo)) continue;  // rejected mass
                next[j] += mass * p;
            }
        }
        dist.swap(next);
        if (dist.empty()) break;
    }
    double acc = 0.0;
    double c0 = phi.c(witness);
    for (auto& [idx, mass] : dist)
        if (phi.c(idx) <= c0 * (1.0 + 1e-9)) acc += mass;
    return acc;
}

}  // namespace homwalk
