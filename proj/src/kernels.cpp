#include "anmmm/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace anmmm {

Matrix rbf_gram(const Matrix& points, const Vector& gammas) {
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    if (n < 1) {
        throw std::invalid_argument("rbf_gram: need at least one point");
    }
    if (gammas.size() != d) {
        throw std::invalid_argument("rbf_gram: width count does not match point dimension");
    }
    if ((gammas.array() <= 0.0).any()) {
        throw std::invalid_argument("rbf_gram: kernel widths must be positive");
    }

    Matrix gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        gram(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < d; ++k) {
                const double diff = points(i, k) - points(j, k);
                s += gammas(k) * diff * diff;
            }
            const double v = std::exp(-s);
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    return gram;
}

Matrix centering_matrix(Eigen::Index n) {
    if (n < 1) {
        throw std::invalid_argument("centering_matrix: N must be positive");
    }
    Matrix h = Matrix::Identity(n, n);
    h.array() -= 1.0 / static_cast<double>(n);
    return h;
}

double hsic_biased(const Matrix& k, const Matrix& l) {
    const Eigen::Index n = k.rows();
    if (k.cols() != n || l.rows() != n || l.cols() != n) {
        throw std::invalid_argument("hsic_biased: Gram matrices must be square and equally sized");
    }
    // tr(KHLH) via centered L, avoiding the explicit H product chain.
    const Vector l_row_mean = l.rowwise().mean();
    const double l_mean = l_row_mean.mean();
    Matrix lc = l;
    lc.colwise() -= l_row_mean;
    lc.rowwise() -= l_row_mean.transpose();
    lc.array() += l_mean;
    const double trace = (k.array() * lc.array()).sum();
    return trace / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace anmmm
