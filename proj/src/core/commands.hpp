#pragma once

#include <string>

#include "config.hpp"
#include "descent.hpp"
#include "io.hpp"

namespace hazclust {

/// dataset.csv (with true_* columns) and km.csv in cfg.output_dir.
void cmd_simulate(const RunConfig& cfg);

/// fit_report.json, labels.csv, trace.csv and, with emit_similarity,
/// similarity.csv. Outputs are written before a numerical failure is rethrown.
void cmd_fit(const RunConfig& cfg);

void cmd_benchmark(const RunConfig& cfg);

/// scan.csv and scan_best.json.
void cmd_scan(const RunConfig& cfg);

/// JSON text of the fit report; `truth` adds a recovery section.
std::string fit_report(const SurvivalDataset& data, const RunConfig& cfg, const FitResult& fr,
                       const GroundTruth* truth);

}  // namespace hazclust
