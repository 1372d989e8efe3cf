#pragma once

#include "anmmm/gppom.hpp"

namespace anmmm {

enum class Direction { XtoY, YtoX, NoDecision };

struct Standardized {
    Vector values;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, N-1 denominator
};

// Rescale to zero mean, unit sample variance. Throws ConstantVariableError
// when the column has zero variance.
Standardized standardize(const Vector& column);

struct FitSummary {
    double objective_total = 0.0;
    double nll = 0.0;
    double hsic_raw = 0.0;
    int iterations = 0;
    int restart_index = 0;
    bool failed = false;
};

struct CausalVerdict {
    Direction direction = Direction::NoDecision;
    double hsic_xy = 0.0;
    double hsic_yx = 0.0;
    FitSummary fit_xy;
    FitSummary fit_yx;
};

struct InferOptions {
    FitOptions fit;
    double tie_rel_tol = 1e-12;  // |hsic_xy - hsic_yx| <= tol * max => no decision
};

// Standardizes both columns, fits the model in each direction with shared
// restart seeds, and decides by the smaller converged HSIC.
CausalVerdict infer_direction(const Matrix& pairs, double lambda, const InferOptions& options);

const char* direction_name(Direction d);

}  // namespace anmmm
