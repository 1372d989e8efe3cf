#include "anmmm/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "anmmm/errors.hpp"

namespace anmmm {

namespace {

std::vector<double> parse_row(const std::string& line, long line_no) {
    std::string normalized = line;
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::replace(normalized.begin(), normalized.end(), '\t', ' ');
    std::istringstream ss(normalized);
    std::vector<double> values;
    std::string token;
    while (ss >> token) {
        try {
            std::size_t used = 0;
            const double v = std::stod(token, &used);
            if (used != token.size()) {
                throw std::invalid_argument(token);
            }
            values.push_back(v);
        } catch (const std::exception&) {
            throw ParseError("non-numeric cell '" + token + "'", line_no);
        }
    }
    return values;
}

Direction parse_direction(const std::string& s) {
    if (s == "XtoY") return Direction::XtoY;
    if (s == "YtoX") return Direction::YtoX;
    return Direction::NoDecision;
}

}  // namespace

PairFile load_pairs(const std::string& path, int cause_col, int effect_col) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'", 0);
    }

    std::vector<std::vector<double>> table;
    std::string line;
    long line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        auto row = parse_row(line, line_no);
        if (row.empty()) {
            continue;
        }
        if (width == 0) {
            width = row.size();
        } else if (row.size() != width) {
            throw ParseError("ragged row: expected " + std::to_string(width) + " columns, got " +
                                 std::to_string(row.size()),
                             line_no);
        }
        table.push_back(std::move(row));
    }
    if (table.empty()) {
        throw ParseError("no numeric rows in '" + path + "'", line_no);
    }
    if (width < 2) {
        throw ParseError("need at least two columns", 0);
    }
    if (cause_col < 0 || effect_col < 0 || cause_col >= static_cast<int>(width) ||
        effect_col >= static_cast<int>(width)) {
        throw ParseError("selected column out of range (file has " + std::to_string(width) +
                             " columns)",
                         0);
    }

    PairFile pf;
    pf.cause_col = cause_col;
    pf.effect_col = effect_col;
    pf.rows.resize(static_cast<Eigen::Index>(table.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            pf.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table[i][j];
        }
    }
    pf.selected.resize(pf.rows.rows(), 2);
    pf.selected.col(0) = pf.rows.col(cause_col);
    pf.selected.col(1) = pf.rows.col(effect_col);
    if (!pf.selected.allFinite()) {
        throw ParseError("non-finite value in selected columns", 0);
    }
    return pf;
}

Matrix subsample(const Matrix& pairs, int k, std::uint64_t seed) {
    const Eigen::Index n = pairs.rows();
    if (k < 1 || k > n) {
        throw std::invalid_argument("subsample: k must be in [1, N]");
    }
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    Matrix out(k, pairs.cols());
    for (int i = 0; i < k; ++i) {
        out.row(i) = pairs.row(idx[static_cast<std::size_t>(i)]);
    }
    return out;
}

double accuracy(const std::vector<TrialRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("accuracy: no records");
    }
    std::size_t correct = 0;
    for (const auto& r : records) {
        if (r.verdict != Direction::NoDecision && r.verdict == r.truth) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(records.size());
}

void write_records(std::ostream& out, const std::vector<TrialRecord>& records) {
    for (const auto& r : records) {
        out << "seed=" << r.seed << " dataset=" << r.dataset_id
            << " verdict=" << direction_name(r.verdict) << " truth=" << direction_name(r.truth)
            << " metric=" << r.metric << " wall_s=" << r.wall_seconds << "\n";
    }
}

std::vector<TrialRecord> read_records(std::istream& in) {
    std::vector<TrialRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        TrialRecord r;
        std::istringstream ss(line);
        std::string kv;
        while (ss >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                continue;
            }
            const std::string key = kv.substr(0, eq);
            const std::string value = kv.substr(eq + 1);
            if (key == "seed") {
                r.seed = std::stoull(value);
            } else if (key == "dataset") {
                r.dataset_id = value;
            } else if (key == "verdict") {
                r.verdict = parse_direction(value);
            } else if (key == "truth") {
                r.truth = parse_direction(value);
            } else if (key == "metric") {
                r.metric = std::stod(value);
            } else if (key == "wall_s") {
                r.wall_seconds = std::stod(value);
            }
        }
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace anmmm
