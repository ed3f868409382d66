#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <system_error>

#include "errors.hpp"

namespace hazclust {

namespace {

const char* const kRequired[] = {"unit_id", "group_id", "time", "status"};

bool is_truth_column(std::string_view name) { return name.substr(0, 5) == "true_"; }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string quote_if_needed(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != last) {
        fail(ErrorKind::Schema, std::string(what) + ": '" + std::string(text) + "' is not a number");
    }
    return v;
}

CsvTable read_csv(std::istream& in, std::string_view source) {
    CsvTable table;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, field_started = false, any = false;
    long line = 1;
    char c;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        const bool blank = row.size() == 1 && row[0].empty();
        if (!blank) {
            if (table.header.empty() && table.rows.empty() && !any) {
                table.header = std::move(row);
                any = true;
            } else {
                table.rows.push_back(std::move(row));
            }
        }
        row.clear();
    };
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_row();
            ++line;
        } else if (c != '\r') {
            field += c;
            field_started = true;
        }
    }
    if (quoted) fail(ErrorKind::Schema, std::string(source) + ": unterminated quoted field near line " + std::to_string(line));
    if (!field.empty() || !row.empty()) end_row();
    if (table.header.empty()) fail(ErrorKind::Schema, std::string(source) + ": empty file");
    for (auto& h : table.header) h = trim(h);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != table.header.size()) {
            fail(ErrorKind::Schema, std::string(source) + ": data row " + std::to_string(r + 1) + " has " +
                                        std::to_string(table.rows[r].size()) + " fields, header has " +
                                        std::to_string(table.header.size()));
        }
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
    return read_csv(in, path);
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << quote_if_needed(fields[i]);
    }
    out << '\n';
}

LoadedDataset parse_dataset(const CsvTable& table, std::string_view source) {
    const std::string src(source);
    auto column = [&](std::string_view name) -> int {
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            if (table.header[i] == name) return static_cast<int>(i);
        }
        return -1;
    };
    int idx[4];
    for (int r = 0; r < 4; ++r) {
        idx[r] = column(kRequired[r]);
        if (idx[r] < 0) fail(ErrorKind::Schema, src + ": missing required column '" + kRequired[r] + "'");
    }
    {
        std::vector<std::string> names = table.header;
        std::sort(names.begin(), names.end());
        const auto dup = std::adjacent_find(names.begin(), names.end());
        if (dup != names.end()) fail(ErrorKind::Schema, src + ": duplicate column '" + *dup + "'");
    }
    std::vector<int> cov_cols;
    std::vector<std::string> cov_names;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        const auto& h = table.header[i];
        if (h == "unit_id" || h == "group_id" || h == "time" || h == "status" || is_truth_column(h)) continue;
        cov_cols.push_back(static_cast<int>(i));
        cov_names.push_back(h);
    }
    const int tc = column("true_cluster"), tf = column("true_frailty"), te = column("true_eta");
    const bool has_truth = tc >= 0 && tf >= 0 && te >= 0;

    const auto n = table.rows.size();
    if (n == 0) fail(ErrorKind::Schema, src + ": no data rows");
    std::vector<std::string> units(n), groups(n);
    Eigen::VectorXd time(static_cast<Eigen::Index>(n));
    std::vector<int> status(n);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cov_cols.size()));
    GroundTruth truth;

    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = table.rows[r];
        const std::string where = src + " row " + std::to_string(r + 1);
        units[r] = trim(row[static_cast<std::size_t>(idx[0])]);
        groups[r] = trim(row[static_cast<std::size_t>(idx[1])]);
        if (units[r].empty()) fail(ErrorKind::Schema, where + ": missing value in column 'unit_id'");
        if (groups[r].empty()) fail(ErrorKind::Schema, where + ": missing value in column 'group_id'");
        time[static_cast<Eigen::Index>(r)] = parse_number(row[static_cast<std::size_t>(idx[2])], where + " column 'time'");
        const double st = parse_number(row[static_cast<std::size_t>(idx[3])], where + " column 'status'");
        if (st != 0.0 && st != 1.0) fail(ErrorKind::Schema, where + ": status must be 0 or 1");
        status[r] = static_cast<int>(st);
        for (std::size_t c = 0; c < cov_cols.size(); ++c) {
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_number(row[static_cast<std::size_t>(cov_cols[c])], where + " column '" + cov_names[c] + "'");
        }
        if (has_truth) {
            truth.cluster.push_back(static_cast<int>(
                parse_number(row[static_cast<std::size_t>(tc)], where + " column 'true_cluster'")));
            truth.frailty.push_back(parse_number(row[static_cast<std::size_t>(tf)], where + " column 'true_frailty'"));
            truth.eta.push_back(parse_number(row[static_cast<std::size_t>(te)], where + " column 'true_eta'"));
        }
    }
    LoadedDataset out{SurvivalDataset(std::move(units), std::move(groups), std::move(time), std::move(status),
                                      std::move(x), std::move(cov_names)),
                      std::nullopt};
    if (has_truth) out.truth = std::move(truth);
    return out;
}

LoadedDataset read_dataset(const std::string& path) { return parse_dataset(read_csv_file(path), path); }

void write_dataset(std::ostream& out, const SurvivalDataset& data, const GroundTruth* truth) {
    std::vector<std::string> header{"unit_id", "group_id", "time", "status"};
    for (const auto& c : data.covariate_names()) header.push_back(c);
    if (truth) {
        header.push_back("true_cluster");
        header.push_back("true_frailty");
        header.push_back("true_eta");
    }
    write_csv_row(out, header);
    std::vector<std::string> row;
    for (int i = 0; i < data.num_units(); ++i) {
        row.clear();
        row.push_back(data.unit_ids()[static_cast<std::size_t>(i)]);
        row.push_back(data.group_names()[static_cast<std::size_t>(data.group_of(i))]);
        row.push_back(format_number(data.time()[i]));
        row.push_back(std::to_string(data.status()[static_cast<std::size_t>(i)]));
        for (int c = 0; c < data.num_covariates(); ++c) row.push_back(format_number(data.covariates()(i, c)));
        if (truth) {
            const auto u = static_cast<std::size_t>(i);
            row.push_back(std::to_string(truth->cluster[u]));
            row.push_back(format_number(truth->frailty[u]));
            row.push_back(format_number(truth->eta[u]));
        }
        write_csv_row(out, row);
    }
}

void write_dataset_file(const std::string& path, const SurvivalDataset& data, const GroundTruth* truth) {
    auto out = open_output(path);
    write_dataset(out, data, truth);
    if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

GroundTruth truth_of(const SimulatedDataset& sim) { return {sim.true_cluster, sim.true_frailty, sim.true_eta}; }

void write_labels(std::ostream& out, const SurvivalDataset& data, const std::vector<int>& labels) {
    write_csv_row(out, {"unit_id", "cluster"});
    for (int i = 0; i < data.num_units(); ++i) {
        write_csv_row(out, {data.unit_ids()[static_cast<std::size_t>(i)], std::to_string(labels[static_cast<std::size_t>(i)])});
    }
}

void write_similarity(std::ostream& out, const SurvivalDataset& data, const SimilarityMatrix& S) {
    write_csv_row(out, {"row_unit", "col_unit", "value"});
    for (int a = 0; a < S.outerSize(); ++a) {
        for (SimilarityMatrix::InnerIterator e(S, a); e; ++e) {
            write_csv_row(out, {data.unit_ids()[static_cast<std::size_t>(a)],
                                data.unit_ids()[static_cast<std::size_t>(e.col())], format_number(e.value())});
        }
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
    return out;
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace hazclust
