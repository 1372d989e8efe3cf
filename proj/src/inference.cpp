#include "anmmm/inference.hpp"

#include <cmath>
#include <stdexcept>

#include "anmmm/errors.hpp"

namespace anmmm {

Standardized standardize(const Vector& column) {
    const Eigen::Index n = column.size();
    if (n < 2) {
        throw std::invalid_argument("standardize: need at least two values");
    }
    Standardized out;
    out.mean = column.mean();
    const double ss = (column.array() - out.mean).square().sum();
    out.stddev = std::sqrt(ss / static_cast<double>(n - 1));
    if (out.stddev <= 0.0) {
        throw ConstantVariableError("standardize: column has zero variance");
    }
    out.values = (column.array() - out.mean) / out.stddev;
    return out;
}

namespace {

FitSummary summarize(const FitResult& r) {
    FitSummary s;
    s.objective_total = r.objective.total;
    s.nll = r.objective.nll;
    s.hsic_raw = r.objective.hsic_raw;
    s.iterations = r.iterations;
    s.restart_index = r.restart_index;
    return s;
}

}  // namespace

CausalVerdict infer_direction(const Matrix& pairs, double lambda, const InferOptions& options) {
    if (pairs.cols() != 2) {
        throw std::invalid_argument("infer_direction: expected an N x 2 matrix");
    }
    if (pairs.rows() < 10) {
        throw std::invalid_argument("infer_direction: need at least 10 observations");
    }
    if (!pairs.allFinite()) {
        throw std::invalid_argument("infer_direction: non-finite observations");
    }

    const Vector xs = standardize(pairs.col(0)).values;
    const Vector ys = standardize(pairs.col(1)).values;

    CausalVerdict verdict;
    try {
        const FitResult fxy = fit(xs, ys, lambda, options.fit);
        verdict.fit_xy = summarize(fxy);
        verdict.hsic_xy = fxy.objective.hsic_raw;
    } catch (const EstimationFailedError&) {
        verdict.fit_xy.failed = true;
    }
    try {
        const FitResult fyx = fit(ys, xs, lambda, options.fit);
        verdict.fit_yx = summarize(fyx);
        verdict.hsic_yx = fyx.objective.hsic_raw;
    } catch (const EstimationFailedError&) {
        verdict.fit_yx.failed = true;
    }

    if (verdict.fit_xy.failed || verdict.fit_yx.failed) {
        verdict.direction = Direction::NoDecision;
        return verdict;
    }

    const double gap = std::abs(verdict.hsic_xy - verdict.hsic_yx);
    const double scale = std::max(verdict.hsic_xy, verdict.hsic_yx);
    if (gap <= options.tie_rel_tol * scale) {
        verdict.direction = Direction::NoDecision;
    } else if (verdict.hsic_xy < verdict.hsic_yx) {
        verdict.direction = Direction::XtoY;
    } else {
        verdict.direction = Direction::YtoX;
    }
    return verdict;
}

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::XtoY:
            return "XtoY";
        case Direction::YtoX:
            return "YtoX";
        default:
            return "NoDecision";
    }
}

}  // namespace anmmm
