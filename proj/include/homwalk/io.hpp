#pragma once

#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "homwalk/filtration.hpp"
#include "homwalk/oracle.hpp"

namespace homwalk {

using nlohmann::json;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw io_error(path + ": " + e.what());
    }
    return j;
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

// -- complex files -----------------------------------------------------------

struct ComplexFile {
    WeightedGraph graph;
    int dmax = 0;
    std::vector<std::pair<std::vector<VertexId>, int>> orientation;

    CliqueComplex build(std::size_t cap = 1000000) const {
        CliqueComplex X(graph, dmax, cap);
        for (const auto& [vs, sign] : orientation) {
            auto [canon, rel] = canonicalize(vs);
            auto idx = X.find(canon.dim(), canon.vertices);
            if (!idx) throw io_error("orientation entry not a simplex: " + canon.str());
            X.set_sign(canon.dim(), *idx, sign * rel);
        }
        return X;
    }
};

inline ComplexFile parse_complex(const json& j) {
    ComplexFile out;
    try {
        for (const auto& v : j.at("vertices"))
            out.graph.add_vertex(v.at("id").get<VertexId>(), v.at("weight").get<double>(),
                                 v.value("label", std::string{}));
        for (const auto& e : j.at("edges"))
            out.graph.add_edge(e.at(0).get<VertexId>(), e.at(1).get<VertexId>());
        out.dmax = j.at("dmax").get<int>();
        if (j.contains("orientation"))
            for (const auto& o : j.at("orientation"))
                out.orientation.push_back(
                    {o.at("simplex").get<std::vector<VertexId>>(), o.at("sign").get<int>()});
    } catch (const json::exception& e) {
        throw io_error(std::string("complex file: ") + e.what());
    }
    return out;
}

inline json complex_to_json(const CliqueComplex& X) {
    json j;
    j["vertices"] = json::array();
    for (VertexId id : X.graph().vertex_ids()) {
        json v{{"id", id}, {"weight", X.graph().weight(id)}};
        if (!X.graph().label(id).empty()) v["label"] = X.graph().label(id);
        j["vertices"].push_back(v);
    }
    j["edges"] = json::array();
    for (auto [a, b] : X.graph().edges()) j["edges"].push_back(json::array({a, b}));
    j["dmax"] = X.dmax();
    j["orientation"] = json::array();
    for (int d = 1; d <= X.dmax(); ++d)
        for (std::size_t i = 0; i < X.count(d); ++i)
            if (X.chosen_sign(d, i) < 0)
                j["orientation"].push_back(
                    {{"simplex", X.simplex(d, i).vertices}, {"sign", -1}});
    return j;
}

// -- filtration files --------------------------------------------------------

inline Filtration parse_filtration(const json& j, const CliqueComplex& X) {
    try {
        int dim = j.at("dim").get<int>();
        std::vector<LevelEntry> entries;
        for (const auto& l : j.at("levels"))
            entries.push_back(
                {l.at("simplex").get<std::vector<VertexId>>(), l.at("level").get<int>()});
        std::map<int, double> lw;
        if (j.contains("layer_weights"))
            for (auto& [k, v] : j.at("layer_weights").items())
                lw[std::stoi(k)] = v.get<double>();
        Filtration F(X, dim, entries, lw);
        if (j.contains("N") && j.at("N").get<int>() < F.max_level())
            throw io_error("filtration N below maximal level index");
        return F;
    } catch (const json::exception& e) {
        throw io_error(std::string("filtration file: ") + e.what());
    }
}

inline json filtration_to_json(const Filtration& F) {
    const CliqueComplex& X = F.complex();
    json j;
    j["dim"] = F.dim();
    j["N"] = F.max_level();
    j["levels"] = json::array();
    for (std::size_t i = 0; i < X.count(F.dim()); ++i)
        if (F.leveled(i))
            j["levels"].push_back(
                {{"simplex", X.simplex(F.dim(), i).vertices}, {"level", F.level_of(i)}});
    json lw = json::object();
    for (auto& [lvl, w] : F.layer_weights()) lw[std::to_string(lvl)] = w;
    if (!lw.empty()) j["layer_weights"] = lw;
    return j;
}

// -- stoquastic SAT files ----------------------------------------------------

inline StoquasticSAT parse_sat(const json& j) {
    StoquasticSAT sat;
    try {
        sat.n = j.at("n").get<int>();
        for (const auto& t : j.at("terms")) {
            Projector p;
            std::string type = t.at("type").get<std::string>();
            p.kind = type == "basis" ? Projector::Kind::Basis : Projector::Kind::Diff;
            if (type != "basis" && type != "diff") throw io_error("unknown term type " + type);
            p.qubits = t.at("qubits").get<std::vector<int>>();
            p.x = t.at("x").get<std::string>();
            if (p.kind == Projector::Kind::Diff) p.y = t.at("y").get<std::string>();
            sat.terms.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw io_error(std::string("sat file: ") + e.what());
    }
    validate_sat(sat);
    return sat;
}

inline json sat_to_json(const StoquasticSAT& sat) {
    json j{{"n", sat.n}, {"terms", json::array()}};
    for (const auto& t : sat.terms) {
        json term{{"type", t.kind == Projector::Kind::Basis ? "basis" : "diff"},
                  {"qubits", t.qubits},
                  {"x", t.x}};
        if (t.kind == Projector::Kind::Diff) term["y"] = t.y;
        j["terms"].push_back(term);
    }
    return j;
}

// -- chain files --------------------------------------------------------------

inline ChainVector parse_chain(const json& j, const CliqueComplex& X) {
    try {
        ChainVector c(j.at("dim").get<int>());
        for (const auto& e : j.at("entries"))
            c.add(X, e.at("simplex").get<std::vector<VertexId>>(), e.at("coeff").get<double>());
        return c;
    } catch (const json::exception& e) {
        throw io_error(std::string("chain file: ") + e.what());
    }
}

inline json chain_to_json(const ChainVector& c, const CliqueComplex& X) {
    json j{{"dim", c.dim()}, {"entries", json::array()}};
    for (auto& [idx, v] : c.entries())
        j["entries"].push_back({{"simplex", X.simplex(c.dim(), idx).vertices}, {"coeff", v}});
    return j;
}

// -- run reports --------------------------------------------------------------

inline std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

inline std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "missing";
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64_hex(ss.str());
}

/// Self-contained record of one CLI invocation: inputs with content hashes,
/// all effective parameters, and the payload.
class RunReport {
public:
    explicit RunReport(std::string subcommand) : start_(clock_t::now()) {
        j_["subcommand"] = std::move(subcommand);
        j_["inputs"] = json::array();
        j_["parameters"] = json::object();
    }

    void input(const std::string& path) {
        j_["inputs"].push_back({{"path", path}, {"hash", file_hash(path)}});
    }

    template <typename T>
    void param(const std::string& name, const T& value) {
        j_["parameters"][name] = value;
    }

    json finish(json outputs) {
        j_["outputs"] = std::move(outputs);
        j_["wall_time_s"] =
            std::chrono::duration<double>(clock_t::now() - start_).count();
        return j_;
    }

private:
    using clock_t = std::chrono::steady_clock;
    json j_;
    clock_t::time_point start_;
};

}  // namespace homwalk
