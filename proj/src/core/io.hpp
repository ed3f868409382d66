#pragma once

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "simgraph.hpp"
#include "simulate.hpp"

namespace hazclust {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);
double parse_number(std::string_view text, std::string_view what);

/// RFC 4180 fields: quoted fields may contain commas, quotes ("") and newlines.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& in, std::string_view source);
CsvTable read_csv_file(const std::string& path);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Ground-truth columns carried by simulated files. Readers skip them as covariates.
struct GroundTruth {
    std::vector<int> cluster;
    std::vector<double> frailty;
    std::vector<double> eta;
};

struct LoadedDataset {
    SurvivalDataset data;
    std::optional<GroundTruth> truth;  // present when all true_* columns are
};

/// Required columns: unit_id, group_id, time, status. Every other column is a
/// numeric covariate, except the true_* columns.
LoadedDataset parse_dataset(const CsvTable& table, std::string_view source);
LoadedDataset read_dataset(const std::string& path);

void write_dataset(std::ostream& out, const SurvivalDataset& data, const GroundTruth* truth = nullptr);
void write_dataset_file(const std::string& path, const SurvivalDataset& data, const GroundTruth* truth = nullptr);
GroundTruth truth_of(const SimulatedDataset& sim);

/// unit_id,cluster
void write_labels(std::ostream& out, const SurvivalDataset& data, const std::vector<int>& labels);
/// row,col,value over stored entries, with unit ids for row and column.
void write_similarity(std::ostream& out, const SurvivalDataset& data, const SimilarityMatrix& S);

/// Opens for writing or throws an Io error naming the path.
std::ofstream open_output(const std::string& path);
void ensure_directory(const std::string& dir);

}  // namespace hazclust
