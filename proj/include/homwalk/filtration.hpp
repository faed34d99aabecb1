#pragma once

#include <deque>

#include "homwalk/operators.hpp"

namespace homwalk {

struct malformed_filtration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct filtration_domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Violation {
    std::string kind;
    std::string detail;
};

struct ValidationReport {
    bool pass = true;
    std::vector<Violation> violations;

    void fail(std::string kind, std::string detail) {
        pass = false;
        violations.push_back({std::move(kind), std::move(detail)});
    }
};

struct LevelEntry {
    std::vector<VertexId> simplex;
    int level;
};

/// Per-simplex level assignment for dimension d, with derived internal-simplex
/// marks, essential sets, and the relative-degree table f^{i,j}.
///
/// A d-simplex is "internal" at its level when every coface sees the same set
/// of face levels and two same-level companions cover all its cofaces; such
/// simplices never carry harmonic weight and their orientation is irrelevant.
class Filtration {
public:
    static constexpr int kUnleveled = -1;

    Filtration(const CliqueComplex& X, int d, const std::vector<LevelEntry>& entries,
               std::map<int, double> layer_weights = {})
        : X_(&X), d_(d), layer_weights_(std::move(layer_weights)) {
        if (d < 0 || d > X.dmax()) throw filtration_domain_error("filtration dimension out of range");
        level_.assign(X.count(d), kUnleveled);
        for (const auto& e : entries) {
            auto [canon, rel] = canonicalize(e.simplex);
            (void)rel;
            auto idx = X.find(d, canon.vertices);
            if (!idx)
                throw malformed_filtration_error("leveled simplex not in complex: " + canon.str());
            if (e.level < 0) throw malformed_filtration_error("negative level");
            if (level_[*idx] != kUnleveled)
                throw malformed_filtration_error("simplex leveled twice: " + canon.str());
            level_[*idx] = e.level;
            N_ = std::max(N_, e.level);
        }
        compute_internal();
        compute_bands();
    }

    const CliqueComplex& complex() const { return *X_; }
    int dim() const { return d_; }
    int max_level() const { return N_; }

    int level_of(std::size_t idx) const { return level_[idx]; }
    bool leveled(std::size_t idx) const { return level_[idx] != kUnleveled; }
    bool is_internal(std::size_t idx) const { return leveled(idx) && internal_[idx]; }
    bool is_essential(std::size_t idx) const { return leveled(idx) && !internal_[idx]; }

    const std::vector<std::size_t>& essential(int level) const {
        static const std::vector<std::size_t> empty;
        auto it = essential_.find(level);
        return it == essential_.end() ? empty : it->second;
    }

    std::size_t essential_count() const {
        std::size_t n = 0;
        for (auto& [l, v] : essential_) n += v.size();
        return n;
    }

    const std::map<int, double>& layer_weights() const { return layer_weights_; }

    /// f^{i,j} table; present only after validate_uniform has run (or via the
    /// combined validate() below).
    const std::map<std::pair<int, int>, int>& f_table() const { return f_table_; }

    /// Levels {i,j} of the band a (d+1)-simplex connects, if it connects
    /// exactly two; unleveled faces are ignored for the pair but tracked for
    /// internality bands.
    std::optional<std::pair<int, int>> band_pair(std::size_t coface_idx) const {
        return band_pair_[coface_idx];
    }

    // -- validators ---------------------------------------------------------

    /// Down-orientability inside each essential level set and up-orientability
    /// (with the face-partition condition) across level sets.
    ValidationReport validate_orientable() const {
        ValidationReport rep;
        const CliqueComplex& X = *X_;
        // (a) within-level pairs sharing a (d-1)-face
        if (d_ >= 1) {
            for (std::size_t ti = 0; ti < X.count(d_ - 1); ++ti) {
                auto star = X.cofaces_of(d_ - 1, ti);
                for (std::size_t a = 0; a < star.size(); ++a)
                    for (std::size_t b = a + 1; b < star.size(); ++b) {
                        auto [ia, sa] = star[a];
                        auto [ib, sb] = star[b];
                        if (!is_essential(ia) || !is_essential(ib)) continue;
                        if (level_[ia] != level_[ib]) continue;
                        if (sa * sb != -1)
                            rep.fail("down-orientability",
                                     X.simplex(d_, ia).str() + " and " + X.simplex(d_, ib).str() +
                                         " at level " + std::to_string(level_[ia]) +
                                         " induce the same orientation on " +
                                         X.simplex(d_ - 1, ti).str());
                    }
            }
        }
        // (b) cross-level pairs sharing a coface + partition condition
        for (std::size_t ci = 0; ci < X.count(d_ + 1); ++ci) {
            auto faces = X.faces_of(d_ + 1, ci);
            std::set<int> levels_present;
            bool has_unleveled = false;
            for (auto& [fi, inc] : faces) {
                (void)inc;
                if (leveled(fi))
                    levels_present.insert(level_[fi]);
                else
                    has_unleveled = true;
            }
            (void)has_unleveled;
            std::set<int> essential_levels;
            for (auto& [fi, inc] : faces)
                if (is_essential(fi)) essential_levels.insert(level_[fi]);
            if (essential_levels.size() < 2) continue;
            if (levels_present.size() > 2) {
                rep.fail("face-partition",
                         "faces of " + X.simplex(d_ + 1, ci).str() +
                             " span more than two levels");
                continue;
            }
            for (std::size_t a = 0; a < faces.size(); ++a)
                for (std::size_t b = a + 1; b < faces.size(); ++b) {
                    auto [ia, sa] = faces[a];
                    auto [ib, sb] = faces[b];
                    if (!is_essential(ia) || !is_essential(ib)) continue;
                    if (level_[ia] == level_[ib]) continue;
                    if (sa * sb != -1)
                        rep.fail("up-orientability",
                                 X.simplex(d_, ia).str() + " (level " +
                                     std::to_string(level_[ia]) + ") and " +
                                     X.simplex(d_, ib).str() + " (level " +
                                     std::to_string(level_[ib]) +
                                     ") induce the same orientation on " +
                                     X.simplex(d_ + 1, ci).str());
                }
        }
        return rep;
    }

    /// Per-level weight uniformity and constancy of the relative degrees
    /// f^{i,j} over every connecting band; records the f table.
    ValidationReport validate_uniform() {
        ValidationReport rep;
        const CliqueComplex& X = *X_;
        // layer weight uniformity over all leveled simplices (internal included)
        std::map<int, double> seen;
        for (std::size_t i = 0; i < level_.size(); ++i) {
            if (!leveled(i)) continue;
            double w = X.weight(d_, i);
            auto [it, fresh] = seen.emplace(level_[i], w);
            if (!fresh && std::abs(it->second - w) > 1e-12 * std::max(1.0, std::abs(w)))
                rep.fail("weight-uniformity",
                         "level " + std::to_string(level_[i]) + " has weights " +
                             std::to_string(it->second) + " and " + std::to_string(w) + " (" +
                             X.simplex(d_, i).str() + ")");
        }
        for (auto& [lvl, w] : seen) {
            auto it = layer_weights_.find(lvl);
            if (it == layer_weights_.end())
                layer_weights_[lvl] = w;
            else if (std::abs(it->second - w) > 1e-12 * std::max(1.0, std::abs(w)))
                rep.fail("weight-uniformity", "declared layer weight for level " +
                                                  std::to_string(lvl) +
                                                  " disagrees with simplex weights");
        }
        // relative degrees
        f_table_.clear();
        for (std::size_t ci = 0; ci < X.count(d_ + 1); ++ci) {
            auto pr = band_pair_[ci];
            if (!pr) continue;
            auto [i, j] = *pr;
            int fij = 0, fji = 0;
            for (auto& [fi, inc] : X.faces_of(d_ + 1, ci)) {
                (void)inc;
                if (!is_essential(fi)) continue;
                if (level_[fi] == i) ++fij;
                if (level_[fi] == j) ++fji;
            }
            auto put = [&](int a, int b, int f) {
                auto [it, fresh] = f_table_.emplace(std::make_pair(a, b), f);
                if (!fresh && it->second != f)
                    rep.fail("relative-degree",
                             "f^{" + std::to_string(a) + "," + std::to_string(b) +
                                 "} is not constant: " + std::to_string(it->second) + " vs " +
                                 std::to_string(f) + " at " + X.simplex(d_ + 1, ci).str());
            };
            put(i, j, fij);
            put(j, i, fji);
        }
        return rep;
    }

    // -- good/bad classification ---------------------------------------------

    enum class Badness { NonCycle, NonCocycle };

    struct GoodnessReport {
        bool good = true;
        std::optional<Badness> reason;
        std::optional<OrientedSimplex> witness;
    };

    /// A simplex is good when every face and every coface admits a strictly
    /// positive kernel vector over its essential star, i.e. both incidence
    /// signs appear there. Bad verdicts carry the first failing witness.
    GoodnessReport classify(std::size_t idx) const {
        if (!is_essential(idx))
            throw filtration_domain_error("classify: simplex is internal or unleveled");
        auto memo = classify_memo_.find(idx);
        if (memo != classify_memo_.end()) return memo->second;
        const CliqueComplex& X = *X_;
        GoodnessReport rep;
        int lvl = level_[idx];
        if (d_ >= 1) {
            for (auto& [fi, inc] : X.faces_of(d_, idx)) {
                (void)inc;
                bool plus = false, minus = false;
                for (auto& [si, sinc] : X.cofaces_of(d_ - 1, fi)) {
                    if (!is_essential(si) || level_[si] != lvl) continue;
                    (sinc > 0 ? plus : minus) = true;
                }
                if (!(plus && minus)) {
                    rep.good = false;
                    rep.reason = Badness::NonCycle;
                    rep.witness = X.simplex(d_ - 1, fi);
                    classify_memo_[idx] = rep;
                    return rep;
                }
            }
        }
        for (auto& [ci, inc] : X.cofaces_of(d_, idx)) {
            (void)inc;
            bool plus = false, minus = false;
            for (auto& [fi, finc] : X.faces_of(d_ + 1, ci)) {
                if (!is_essential(fi)) continue;
                (finc > 0 ? plus : minus) = true;
            }
            if (!(plus && minus)) {
                rep.good = false;
                rep.reason = Badness::NonCocycle;
                rep.witness = X.simplex(d_ + 1, ci);
                classify_memo_[idx] = rep;
                return rep;
            }
        }
        classify_memo_[idx] = rep;
        return rep;
    }

    bool is_good(std::size_t idx) const { return classify(idx).good; }

    /// Essential simplices sharing a (d-1)-face with idx.
    std::vector<std::size_t> essential_neighbors(std::size_t idx) const {
        std::set<std::size_t> out;
        if (d_ >= 1) {
            for (auto& [fi, inc] : X_->faces_of(d_, idx)) {
                (void)inc;
                for (auto& [si, sinc] : X_->cofaces_of(d_ - 1, fi)) {
                    (void)sinc;
                    if (si != idx && is_essential(si)) out.insert(si);
                }
            }
        }
        return {out.begin(), out.end()};
    }

private:
    void compute_internal() {
        const CliqueComplex& X = *X_;
        internal_.assign(level_.size(), false);
        // group leveled simplices per level for companion lookup
        std::map<int, std::vector<std::size_t>> per_level;
        for (std::size_t i = 0; i < level_.size(); ++i)
            if (leveled(i)) per_level[level_[i]].push_back(i);
        for (std::size_t i = 0; i < level_.size(); ++i) {
            if (!leveled(i)) continue;
            // relevant cofaces: those with another leveled face; cofaces whose
            // remaining faces are all outside X^N never constrain amplitudes
            std::vector<std::pair<std::size_t, int>> cof;
            for (auto& cf : X.cofaces_of(d_, i)) {
                bool relevant = false;
                for (auto& [fi, inc] : X.faces_of(d_ + 1, cf.first)) {
                    (void)inc;
                    if (fi != i && leveled(fi)) relevant = true;
                }
                if (relevant) cof.push_back(cf);
            }
            if (cof.size() < 2) continue;
            // all relevant cofaces must see the same set of face levels
            std::set<int> band0;
            bool same_band = true;
            for (std::size_t c = 0; c < cof.size() && same_band; ++c) {
                std::set<int> band;
                for (auto& [fi, inc] : X.faces_of(d_ + 1, cof[c].first)) {
                    (void)inc;
                    band.insert(level_[fi]);
                }
                if (c == 0)
                    band0 = std::move(band);
                else if (band != band0)
                    same_band = false;
            }
            if (!same_band) continue;
            // companions: same-level simplices covering the cofaces, two of
            // them appearing in distinct cofaces
            std::vector<std::vector<std::size_t>> mates(cof.size());
            for (std::size_t c = 0; c < cof.size(); ++c)
                for (auto& [fi, inc] : X.faces_of(d_ + 1, cof[c].first)) {
                    (void)inc;
                    if (fi != i && leveled(fi) && level_[fi] == level_[i])
                        mates[c].push_back(fi);
                }
            bool coverable = true;
            for (auto& m : mates)
                if (m.empty()) coverable = false;
            if (!coverable) continue;
            bool distinct = false;
            for (std::size_t a = 0; a < cof.size() && !distinct; ++a)
                for (std::size_t b = a + 1; b < cof.size() && !distinct; ++b)
                    for (auto ma : mates[a])
                        for (auto mb : mates[b])
                            if (ma != mb) distinct = true;
            if (distinct) internal_[i] = true;
        }
        essential_.clear();
        for (std::size_t i = 0; i < level_.size(); ++i)
            if (is_essential(i)) essential_[level_[i]].push_back(i);
    }

    void compute_bands() {
        const CliqueComplex& X = *X_;
        band_pair_.assign(X.count(d_ + 1), std::nullopt);
        for (std::size_t ci = 0; ci < X.count(d_ + 1); ++ci) {
            std::set<int> lv, ess;
            for (auto& [fi, inc] : X.faces_of(d_ + 1, ci)) {
                (void)inc;
                if (leveled(fi)) lv.insert(level_[fi]);
                if (is_essential(fi)) ess.insert(level_[fi]);
            }
            if (lv.size() == 2 && ess.size() == 2)
                band_pair_[ci] = std::make_pair(*lv.begin(), *std::next(lv.begin()));
        }
    }

    const CliqueComplex* X_;
    int d_;
    int N_ = 0;
    std::vector<int> level_;
    std::vector<bool> internal_;
    std::map<int, std::vector<std::size_t>> essential_;
    std::map<int, double> layer_weights_;
    std::map<std::pair<int, int>, int> f_table_;
    std::vector<std::optional<std::pair<int, int>>> band_pair_;
    mutable std::unordered_map<std::size_t, GoodnessReport> classify_memo_;
};

/// One BFS block of phi_good: the stage-i simplices that came in at level j,
/// all carrying the same unnormalized amplitude.
struct PhiLayer {
    int stage;
    int level;
    std::vector<std::size_t> simplices;
    double amplitude;  // on unnormalized |sigma>
};

struct PhiGood {
    std::size_t base;
    ChainVector vector;  // normalized-basis coefficients, all > 0
    std::vector<PhiLayer> layers;
    std::unordered_map<std::size_t, double> coeff;       // sigma -> <[sigma]|phi>
    std::unordered_map<std::size_t, std::size_t> layer_of;  // sigma -> layer index

    bool in_support(std::size_t idx) const { return coeff.count(idx) != 0; }
    double c(std::size_t idx) const {
        auto it = coeff.find(idx);
        if (it == coeff.end()) throw filtration_domain_error("simplex outside phi support");
        return it->second;
    }
};

/// BFS construction of the fixed-node state from a good essential seed.
/// Stage 0 is the seed's good component inside its own essential level set;
/// stage t+1 adds good essential simplices sharing cofaces with stage t.
/// Amplitudes are |stage 0| / |block| per (stage, level) block.
inline PhiGood build_phi_good(const CliqueComplex& X, const Filtration& F, std::size_t seed) {
    if (!F.is_essential(seed)) throw filtration_domain_error("phi_good seed internal or unleveled");
    if (!F.is_good(seed)) throw filtration_domain_error("phi_good seed is a bad simplex");
    const int d = F.dim();
    PhiGood phi;
    phi.base = seed;
    phi.vector = ChainVector(d);

    std::unordered_map<std::size_t, int> stage_of;
    // stage 0: connectivity through shared faces within the seed's level,
    // good essential simplices only
    {
        std::deque<std::size_t> q{seed};
        stage_of[seed] = 0;
        while (!q.empty()) {
            std::size_t cur = q.front();
            q.pop_front();
            for (std::size_t nb : F.essential_neighbors(cur)) {
                if (stage_of.count(nb) || F.level_of(nb) != F.level_of(seed)) continue;
                if (!F.is_good(nb)) continue;
                stage_of[nb] = 0;
                q.push_back(nb);
            }
        }
    }
    std::vector<std::size_t> frontier;
    for (auto& [idx, st] : stage_of) frontier.push_back(idx);
    std::sort(frontier.begin(), frontier.end());

    auto share_coface = [&](std::size_t a) {
        std::set<std::size_t> out;
        for (auto& [ci, inc] : X.cofaces_of(d, a)) {
            (void)inc;
            for (auto& [fi, finc] : X.faces_of(d + 1, ci)) {
                (void)finc;
                if (fi != a) out.insert(fi);
            }
        }
        return out;
    };

    std::vector<std::vector<std::size_t>> stages{frontier};
    for (int stage = 1; !frontier.empty(); ++stage) {
        std::set<std::size_t> next;
        for (std::size_t cur : frontier)
            for (std::size_t nb : share_coface(cur))
                if (!stage_of.count(nb) && F.is_essential(nb) && F.is_good(nb)) next.insert(nb);
        if (next.empty()) break;
        frontier.assign(next.begin(), next.end());
        for (std::size_t idx : frontier) stage_of[idx] = stage;
        stages.push_back(frontier);
    }

    double stage0_size = static_cast<double>(stages[0].size());
    for (int stage = 0; stage < static_cast<int>(stages.size()); ++stage) {
        std::map<int, std::vector<std::size_t>> by_level;
        for (std::size_t idx : stages[stage]) by_level[F.level_of(idx)].push_back(idx);
        for (auto& [lvl, set] : by_level) {
            PhiLayer layer{stage, lvl, set, stage0_size / static_cast<double>(set.size())};
            for (std::size_t idx : set) {
                double c = layer.amplitude * X.weight(d, idx);
                phi.coeff[idx] = c;
                phi.layer_of[idx] = phi.layers.size();
                phi.vector.add_index(idx, c);
            }
            phi.layers.push_back(std::move(layer));
        }
    }

    // Amplitude coherence across adjacent blocks: the uniform filtration's
    // relative degrees must reproduce the block-size amplitudes. A mismatch
    // means the instance violates uniformity, so abort rather than average.
    for (const auto& layer : phi.layers) {
        for (std::size_t idx : layer.simplices) {
            for (auto& [ci, inc] : X.cofaces_of(d, idx)) {
                (void)inc;
                auto pr = F.band_pair(ci);
                if (!pr) continue;
                for (auto& [fi, finc] : X.faces_of(d + 1, ci)) {
                    (void)finc;
                    if (fi == idx || !phi.in_support(fi)) continue;
                    int li = F.level_of(idx), lj = F.level_of(fi);
                    if (li == lj) continue;
                    auto fij = F.f_table().find({li, lj});
                    auto fji = F.f_table().find({lj, li});
                    if (fij == F.f_table().end() || fji == F.f_table().end()) continue;
                    double want = phi.layers[phi.layer_of.at(idx)].amplitude *
                                  static_cast<double>(fij->second) /
                                  static_cast<double>(fji->second);
                    double got = phi.layers[phi.layer_of.at(fi)].amplitude;
                    if (std::abs(want - got) > 1e-9 * std::max(1.0, std::abs(want)))
                        throw malformed_filtration_error(
                            "phi_good amplitude inconsistency between levels " +
                            std::to_string(li) + " and " + std::to_string(lj));
                }
            }
        }
    }
    return phi;
}

/// <[sigma']|phi>/<[sigma]|phi> from the f table and layer weights alone,
/// for adjacent support simplices; cross-checked against the stored ratio.
inline double relative_amplitude(const CliqueComplex& X, const Filtration& F,
                                 std::size_t sigma, std::size_t sigma_p, const PhiGood& phi) {
    if (!phi.in_support(sigma) || !phi.in_support(sigma_p))
        throw filtration_domain_error("relative_amplitude: simplex outside support");
    const int d = F.dim();
    auto adjacent = [&](std::size_t a, std::size_t b) {
        if (d == 0) return false;
        for (auto& [fi, inc] : X.faces_of(d, a)) {
            (void)inc;
            for (auto& [ci, cinc] : X.cofaces_of(d - 1, fi)) {
                (void)cinc;
                if (ci == b) return true;
            }
        }
        return false;
    };
    auto coface_between = [&](std::size_t a, std::size_t b) -> bool {
        for (auto& [ci, inc] : X.cofaces_of(d, a)) {
            (void)inc;
            for (auto& [fi, finc] : X.faces_of(d + 1, ci)) {
                (void)finc;
                if (fi == b) return true;
            }
        }
        return false;
    };
    auto direct = [&](std::size_t a, std::size_t b) -> std::optional<double> {
        int la = F.level_of(a), lb = F.level_of(b);
        double wa = X.weight(d, a), wb = X.weight(d, b);
        if (la == lb) return wb / wa;  // equal amplitude within a level
        if (!coface_between(a, b)) return std::nullopt;
        auto fab = F.f_table().find({la, lb});
        auto fba = F.f_table().find({lb, la});
        if (fab == F.f_table().end() || fba == F.f_table().end()) return std::nullopt;
        return static_cast<double>(fab->second) / static_cast<double>(fba->second) * wb / wa;
    };
    if (!adjacent(sigma, sigma_p))
        throw filtration_domain_error("relative_amplitude: simplices not adjacent");
    std::optional<double> ratio = direct(sigma, sigma_p);
    if (!ratio) {
        // face-only adjacency across levels: chain through one intermediate
        for (std::size_t mid : F.essential_neighbors(sigma)) {
            if (!phi.in_support(mid) || !adjacent(mid, sigma_p)) continue;
            auto r1 = direct(sigma, mid);
            auto r2 = direct(mid, sigma_p);
            if (r1 && r2) {
                ratio = *r1 * *r2;
                break;
            }
        }
    }
    if (!ratio) throw filtration_domain_error("relative_amplitude: no evaluation path");
    double stored = phi.c(sigma_p) / phi.c(sigma);
    if (std::abs(*ratio - stored) > 1e-12 * std::max(1.0, std::abs(stored)))
        throw malformed_filtration_error("relative amplitude disagrees with stored state");
    return *ratio;
}

}  // namespace homwalk
