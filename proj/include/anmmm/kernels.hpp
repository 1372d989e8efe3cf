#pragma once

#include <Eigen/Dense>

namespace anmmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// RBF Gram matrix with per-dimension widths:
//   K(i,j) = exp(-sum_d gamma_d * (p_id - p_jd)^2)
// Symmetric with unit diagonal. Throws std::invalid_argument if the width
// vector does not match the point dimension or contains a non-positive entry.
Matrix rbf_gram(const Matrix& points, const Vector& gammas);

// H = I - (1/N) * ones * ones^T. Symmetric and idempotent; rows sum to 0.
Matrix centering_matrix(Eigen::Index n);

// Biased empirical HSIC: (1/N^2) * tr(K H L H). Nonnegative up to floating
// slack for PSD Gram inputs.
double hsic_biased(const Matrix& k, const Matrix& l);

}  // namespace anmmm
