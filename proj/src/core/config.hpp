#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "descent.hpp"
#include "frailty.hpp"
#include "simulate.hpp"

namespace hazclust {

struct BenchmarkSpec {
    int replications = 20;
    std::vector<CensoringKind> censoring{CensoringKind::Administrative};
    std::vector<double> gamma{1e-4};
    std::vector<int> k{20};
    std::vector<int> C{3};
};

struct ScanSpec {
    std::vector<BaselineFamily> baseline;
    std::vector<FrailtyKind> frailty;
    std::vector<double> gamma;
    std::vector<int> k;
    std::vector<int> C;
};

/// Everything a CLI run needs. Absent keys keep the defaults below.
struct RunConfig {
    BaselineFamily baseline = BaselineFamily::Weibull;
    FrailtyKind frailty = FrailtyKind::Gamma;
    double gamma = 0.0;
    int k = 10;
    int C = 2;
    double lambda0 = 1000.0;
    double tol_s = 1e-4;
    double tol_ll = 1e-3;
    int maxit = 500;
    int maxit_inner = 500;
    std::string input;
    std::string output_dir = ".";
    bool emit_similarity = false;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: hardware concurrency
    SimConfig simulation;
    BenchmarkSpec benchmark;
    ScanSpec scan;  // empty lists fall back to the single-fit settings

    FitConfig fit_config() const;
    ScanSpec effective_scan() const;
    void validate() const;
};

/// Throws Config with the offending key path on unknown keys, wrong types or
/// out-of-range values.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

}  // namespace hazclust
