#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "anmmm/inference.hpp"
#include "anmmm/kernels.hpp"

namespace anmmm {

struct PairFile {
    Matrix rows;       // full numeric table
    Matrix selected;   // N x 2 (cause, effect)
    int cause_col = 0;
    int effect_col = 1;
};

// Parse a whitespace- or comma-separated numeric table; '#' lines are
// comments. Throws ParseError (with line number) on non-numeric cells or
// out-of-range column selection.
PairFile load_pairs(const std::string& path, int cause_col, int effect_col);

// k rows drawn uniformly without replacement, deterministic given seed.
Matrix subsample(const Matrix& pairs, int k, std::uint64_t seed);

struct TrialRecord {
    std::uint64_t seed = 0;
    std::string dataset_id;
    Direction verdict = Direction::NoDecision;
    Direction truth = Direction::XtoY;
    double metric = 0.0;
    double wall_seconds = 0.0;
};

// Fraction of records whose verdict matches the ground truth; NoDecision
// counts as incorrect.
double accuracy(const std::vector<TrialRecord>& records);

// One record per line, key=value pairs.
void write_records(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records(std::istream& in);

}  // namespace anmmm
