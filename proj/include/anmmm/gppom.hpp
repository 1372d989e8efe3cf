#pragma once

#include <cstdint>
#include <optional>

#include "anmmm/kernels.hpp"

namespace anmmm {

// Noise precision and kernel widths, stored in log-space so plain gradient
// steps keep them positive.
struct Hyperparams {
    double log_beta = 0.0;
    Vector log_gamma_x;      // widths of the cause kernel, one per input dim
    Vector log_gamma_theta;  // widths of the latent kernel, one per latent dim

    double beta() const { return std::exp(log_beta); }
    Vector gamma_x() const { return log_gamma_x.array().exp(); }
    Vector gamma_theta() const { return log_gamma_theta.array().exp(); }

    // Flat packing [log_beta, log_gamma_x..., log_gamma_theta...] for
    // gradient steps and finite-difference checks.
    Vector pack() const;
    void unpack(const Vector& packed);
};

// Model state: standardized cause/effect columns, the latent matrix Theta
// (one row per observation) and hyperparameters.
struct GppomState {
    Matrix theta;  // N x q
    Hyperparams hyper;
    Vector x;  // N, standardized cause
    Vector y;  // N, standardized effect

    Eigen::Index n() const { return x.size(); }
    Eigen::Index q() const { return theta.cols(); }
};

struct ObjectiveValue {
    double total = 0.0;          // nll + hsic_log_term
    double nll = 0.0;            // -L, Gaussian marginal likelihood
    double hsic_log_term = 0.0;  // lambda * log HSIC_b(X, Theta)
    double hsic_raw = 0.0;       // HSIC_b(X, Theta)
};

struct FitOptions {
    int restarts = 5;
    int max_iters = 500;
    int hyper_every = 10;  // one hyperparameter step per this many Theta steps
    double tol = 1e-6;     // absolute objective-change stopping threshold
    int latent_dim = 1;
    std::uint64_t seed = 0;
    bool optimize_hyper = false;
    double beta_init = 100.0;   // noise precision at start of each restart
    double gamma_init = 0.12;   // kernel width for both X and Theta kernels
};

struct FitResult {
    GppomState state;
    ObjectiveValue objective;
    int iterations = 0;
    int restart_index = 0;
    bool degenerate = false;  // max pairwise latent distance < 0.001
};

// K_tilde = K_X o K_Theta + beta^{-1} I
Matrix covariance(const GppomState& state);

// -L where L is the Gaussian marginal log-likelihood with covariance
// K_tilde. Cholesky-based; throws NumericError when K_tilde is not PD.
double neg_log_likelihood(const GppomState& state);

// -L + lambda * log HSIC_b(X, Theta). Throws DegenerateLatentError when
// lambda > 0 and the HSIC estimate has underflowed to zero.
ObjectiveValue objective(const GppomState& state, double lambda);

// dJ/dTheta, assembled as a full-matrix contraction (no per-entry
// single-entry matrices).
Matrix grad_theta(const GppomState& state, double lambda);

// Gradient of the objective in the packed log-space hyperparameter vector.
Vector grad_hyper(const GppomState& state, double lambda);

// Best-of-restarts block gradient descent with backtracking line search.
// Throws EstimationFailedError if every restart ends degenerate.
FitResult fit(const Vector& x, const Vector& y, double lambda, const FitOptions& options);

// Largest pairwise distance between latent rows; used for the degeneracy
// threshold |theta_i - theta_j| < 0.001.
double max_pairwise_latent_distance(const Matrix& theta);

}  // namespace anmmm
