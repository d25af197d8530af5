#include "qtwist/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qtwist {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

QSeq parse_qseq(const json& j, int length) {
    reject_unknown(j, {"kind", "base", "ratio", "terms"}, "q_seq");
    const std::string kind = j.value("kind", "geometric");
    if (kind == "geometric") {
        const double base = j.value("base", 0.5);
        const double ratio = j.value("ratio", 0.5);
        return QSeq::geometric(base, ratio, length);
    }
    if (kind == "explicit") {
        if (!j.contains("terms")) throw ConfigError("explicit q_seq requires 'terms'");
        std::vector<double> terms = j.at("terms").get<std::vector<double>>();
        return QSeq::explicit_list(std::move(terms));
    }
    throw ConfigError("q_seq.kind must be 'geometric' or 'explicit'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"q_seq", "fock_levels", "winding_radius", "factors", "twist_level", "probes",
                    "seed", "cluster_tol", "commands", "out", "format"},
                   "config");

    ExperimentConfig c;
    c.fock_levels = j.value("fock_levels", 8);
    c.winding_radius = j.value("winding_radius", 3);
    c.factors = j.value("factors", 6);
    c.twist_level = j.value("twist_level", 3);
    c.probes = j.value("probes", 20);
    c.seed = j.value("seed", static_cast<uint64_t>(42));
    if (j.contains("cluster_tol")) {
        if (j["cluster_tol"].is_string()) {
            if (j["cluster_tol"] != "auto") throw ConfigError("cluster_tol: number or \"auto\"");
            c.cluster_tol = -1.0;
        } else {
            c.cluster_tol = j["cluster_tol"].get<double>();
        }
    }
    if (j.contains("commands")) c.commands = j.at("commands").get<std::vector<std::string>>();
    c.out_path = j.value("out", std::string());
    c.format = j.value("format", "csv");
    if (c.format != "csv" && c.format != "json")
        throw ConfigError("format must be 'csv' or 'json'");

    if (c.fock_levels < 3) throw ConfigError("fock_levels >= 3 required");
    if (c.winding_radius < 1) throw ConfigError("winding_radius >= 1 required");
    if (c.factors < 1) throw ConfigError("factors >= 1 required");
    if (c.twist_level < 0 || c.twist_level > c.factors)
        throw ConfigError("twist_level must lie in [0, factors]");
    if (c.probes < 1) throw ConfigError("probes >= 1 required");

    try {
        c.q_seq = j.contains("q_seq") ? parse_qseq(j.at("q_seq"), c.factors)
                                      : QSeq::geometric(0.5, 0.5, c.factors);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (c.q_seq.kind == QSeq::Kind::explicit_list &&
        static_cast<int>(c.q_seq.terms.size()) < c.factors)
        throw ConfigError("q_seq.terms shorter than factors");
    c.qseq_summable_warning = !c.q_seq.summability().certified;

    // validate every materialised TruncSpec before any computation
    for (int k = 0; k < c.factors; ++k) {
        const double q = c.q_seq.terms[k];
        try {
            TruncSpec::make(q, max_valid_fock(q, c.fock_levels), c.winding_radius, c.cluster_tol);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("q_seq term ") + std::to_string(k + 1) + ": " + e.what());
        }
    }
    const std::set<std::string> cmds = {"relations", "haar", "cocycle", "converge", "twist", "all"};
    for (const auto& cmd : c.commands)
        if (!cmds.count(cmd)) throw ConfigError("unknown command '" + cmd + "'");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace qtwist
