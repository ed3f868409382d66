#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace hazclust {

namespace {

class Reader {
public:
    Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void error(const std::string& path, const std::string& msg) const {
        fail(ErrorKind::Config, source_ + ": " + path + ": " + msg);
    }

    void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) const {
        if (!node.IsMap()) error(path.empty() ? "<root>" : path, "expected a mapping");
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) error(join(path, key), "unknown key");
        }
    }

    template <class T>
    void get(const YAML::Node& node, const std::string& path, const char* key, T& out) const {
        const YAML::Node v = node[key];
        if (!v) return;
        try {
            out = v.as<T>();
        } catch (const YAML::Exception&) {
            error(join(path, key), "wrong type");
        }
    }

    template <class T>
    void get_list(const YAML::Node& node, const std::string& path, const char* key, std::vector<T>& out) const {
        const YAML::Node v = node[key];
        if (!v) return;
        const auto where = join(path, key);
        out.clear();
        if (v.IsScalar()) {
            out.push_back(scalar<T>(v, where));
            return;
        }
        if (!v.IsSequence()) error(where, "expected a list");
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(scalar<T>(v[i], where + "[" + std::to_string(i) + "]"));
        if (out.empty()) error(where, "must not be empty");
    }

    static std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

private:
    template <class T>
    T scalar(const YAML::Node& v, const std::string& where) const {
        try {
            return v.as<T>();
        } catch (const YAML::Exception&) {
            error(where, "wrong type");
        }
    }

    std::string source_;
};

template <class E, class F>
std::vector<E> parse_names(const std::vector<std::string>& names, F parse, const Reader& r, const std::string& where) {
    std::vector<E> out;
    for (const auto& n : names) {
        try {
            out.push_back(parse(n));
        } catch (const Error& e) {
            r.error(where, e.what());
        }
    }
    return out;
}

}  // namespace

FitConfig RunConfig::fit_config() const {
    FitConfig f;
    f.baseline = baseline;
    f.frailty = frailty;
    f.gamma = gamma;
    f.C = C;
    f.k = k;
    f.lambda0 = lambda0;
    f.tol_s = tol_s;
    f.tol_ll = tol_ll;
    f.maxit = maxit;
    f.maxit_inner = maxit_inner;
    f.seed = seed;
    return f;
}

ScanSpec RunConfig::effective_scan() const {
    ScanSpec s = scan;
    if (s.baseline.empty()) s.baseline = {baseline};
    if (s.frailty.empty()) s.frailty = {frailty};
    if (s.gamma.empty()) s.gamma = {gamma};
    if (s.k.empty()) s.k = {k};
    if (s.C.empty()) s.C = {C};
    return s;
}

void RunConfig::validate() const {
    auto bad = [](const std::string& key, const std::string& msg) { fail(ErrorKind::Config, key + ": " + msg); };
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) bad("penalty.gamma", "must be finite and >= 0");
    if (k < 1) bad("penalty.k", "must be >= 1");
    if (C < 1) bad("penalty.C", "must be >= 1");
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) bad("penalty.lambda0", "must be finite and > 0");
    if (!(tol_s > 0.0)) bad("convergence.tolS", "must be > 0");
    if (!(tol_ll > 0.0)) bad("convergence.tolll", "must be > 0");
    if (maxit < 1) bad("convergence.maxit", "must be >= 1");
    if (maxit_inner < 1) bad("convergence.maxit_inner", "must be >= 1");
    if (threads < 0) bad("threads", "must be >= 0");
    if (output_dir.empty()) bad("io.output_dir", "must not be empty");
    simulation.validate();
    if (benchmark.replications < 1) bad("benchmark.replications", "must be >= 1");
    if (benchmark.censoring.empty()) bad("benchmark.censoring", "must not be empty");
    if (benchmark.gamma.empty() || benchmark.k.empty() || benchmark.C.empty()) bad("benchmark.grid", "must not be empty");
    for (double g : benchmark.gamma) {
        if (!(g >= 0.0) || !std::isfinite(g)) bad("benchmark.grid.gamma", "values must be finite and >= 0");
    }
    for (int v : benchmark.k) {
        if (v < 1) bad("benchmark.grid.k", "values must be >= 1");
    }
    for (int v : benchmark.C) {
        if (v < 1) bad("benchmark.grid.C", "values must be >= 1");
    }
    for (double g : scan.gamma) {
        if (!(g >= 0.0) || !std::isfinite(g)) bad("scan.gamma", "values must be finite and >= 0");
    }
    for (int v : scan.k) {
        if (v < 1) bad("scan.k", "values must be >= 1");
    }
    for (int v : scan.C) {
        if (v < 1) bad("scan.C", "values must be >= 1");
    }
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        fail(ErrorKind::Config, source + ": " + e.what());
    }
    RunConfig cfg;
    const Reader r(source);
    if (!root || root.IsNull()) {
        root = YAML::Node(YAML::NodeType::Map);
    }
    r.check_keys(root, "", {"model", "penalty", "convergence", "io", "seed", "threads", "simulation", "benchmark", "scan"});

    r.get(root, "", "seed", cfg.seed);
    r.get(root, "", "threads", cfg.threads);

    if (const auto m = root["model"]) {
        r.check_keys(m, "model", {"baseline", "frailty"});
        std::string name;
        if (m["baseline"]) {
            r.get(m, "model", "baseline", name);
            cfg.baseline = parse_names<BaselineFamily>({name}, parse_baseline, r, "model.baseline")[0];
        }
        if (m["frailty"]) {
            r.get(m, "model", "frailty", name);
            cfg.frailty = parse_names<FrailtyKind>({name}, parse_frailty, r, "model.frailty")[0];
        }
    }
    if (const auto p = root["penalty"]) {
        r.check_keys(p, "penalty", {"gamma", "k", "C", "lambda0"});
        r.get(p, "penalty", "gamma", cfg.gamma);
        r.get(p, "penalty", "k", cfg.k);
        r.get(p, "penalty", "C", cfg.C);
        r.get(p, "penalty", "lambda0", cfg.lambda0);
    }
    if (const auto c = root["convergence"]) {
        r.check_keys(c, "convergence", {"tolS", "tolll", "maxit", "maxit_inner"});
        r.get(c, "convergence", "tolS", cfg.tol_s);
        r.get(c, "convergence", "tolll", cfg.tol_ll);
        r.get(c, "convergence", "maxit", cfg.maxit);
        r.get(c, "convergence", "maxit_inner", cfg.maxit_inner);
    }
    if (const auto io = root["io"]) {
        r.check_keys(io, "io", {"input", "output_dir", "emit_similarity"});
        r.get(io, "io", "input", cfg.input);
        r.get(io, "io", "output_dir", cfg.output_dir);
        r.get(io, "io", "emit_similarity", cfg.emit_similarity);
    }
    if (const auto s = root["simulation"]) {
        r.check_keys(s, "simulation", {"groups", "units_per_group", "theta", "cluster_means", "sigma", "beta", "shape",
                                       "scale", "censoring", "admin_time", "censor_mean", "censor_sd"});
        auto& sim = cfg.simulation;
        r.get(s, "simulation", "groups", sim.groups);
        r.get(s, "simulation", "units_per_group", sim.units_per_group);
        r.get(s, "simulation", "theta", sim.theta);
        r.get_list(s, "simulation", "cluster_means", sim.cluster_means);
        r.get(s, "simulation", "sigma", sim.sigma);
        r.get(s, "simulation", "beta", sim.beta);
        r.get(s, "simulation", "shape", sim.shape);
        r.get(s, "simulation", "scale", sim.scale);
        if (s["censoring"]) {
            std::string name;
            r.get(s, "simulation", "censoring", name);
            sim.censoring = parse_names<CensoringKind>({name}, parse_censoring, r, "simulation.censoring")[0];
        }
        r.get(s, "simulation", "admin_time", sim.admin_time);
        r.get(s, "simulation", "censor_mean", sim.censor_mean);
        r.get(s, "simulation", "censor_sd", sim.censor_sd);
    }
    if (const auto b = root["benchmark"]) {
        r.check_keys(b, "benchmark", {"replications", "censoring", "grid"});
        r.get(b, "benchmark", "replications", cfg.benchmark.replications);
        std::vector<std::string> names;
        r.get_list(b, "benchmark", "censoring", names);
        if (!names.empty()) {
            cfg.benchmark.censoring = parse_names<CensoringKind>(names, parse_censoring, r, "benchmark.censoring");
        }
        if (const auto g = b["grid"]) {
            r.check_keys(g, "benchmark.grid", {"gamma", "k", "C"});
            r.get_list(g, "benchmark.grid", "gamma", cfg.benchmark.gamma);
            r.get_list(g, "benchmark.grid", "k", cfg.benchmark.k);
            r.get_list(g, "benchmark.grid", "C", cfg.benchmark.C);
        }
    }
    if (const auto sc = root["scan"]) {
        r.check_keys(sc, "scan", {"baseline", "frailty", "gamma", "k", "C"});
        std::vector<std::string> names;
        if (sc["baseline"]) {
            r.get_list(sc, "scan", "baseline", names);
            cfg.scan.baseline = parse_names<BaselineFamily>(names, parse_baseline, r, "scan.baseline");
        }
        if (sc["frailty"]) {
            r.get_list(sc, "scan", "frailty", names);
            cfg.scan.frailty = parse_names<FrailtyKind>(names, parse_frailty, r, "scan.frailty");
        }
        r.get_list(sc, "scan", "gamma", cfg.scan.gamma);
        r.get_list(sc, "scan", "k", cfg.scan.k);
        r.get_list(sc, "scan", "C", cfg.scan.C);
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Config, source + ": " + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

}  // namespace hazclust
