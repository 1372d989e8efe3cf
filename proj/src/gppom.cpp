#include "anmmm/gppom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "anmmm/errors.hpp"

namespace anmmm {

namespace {

constexpr double kOutputDim = 1.0;  // Y is a univariate column
constexpr double kDegenerateLatentThreshold = 1e-3;
constexpr double kHsicFloor = 1e-300;
constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;
constexpr int kMaxBacktracks = 60;

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void check_finite(const Matrix& theta) {
    if (!theta.allFinite()) {
        throw NumericError("gppom: non-finite entries in latent matrix");
    }
}

struct Factorization {
    Matrix k_x;
    Matrix k_theta;
    Matrix cov;
    Eigen::LLT<Matrix> llt;
};

Factorization factorize(const GppomState& state, const Matrix* k_x_cached) {
    check_finite(state.theta);
    Factorization f;
    f.k_x = k_x_cached ? *k_x_cached : rbf_gram(state.x, state.hyper.gamma_x());
    f.k_theta = rbf_gram(state.theta, state.hyper.gamma_theta());
    f.cov = f.k_x.cwiseProduct(f.k_theta);
    f.cov.diagonal().array() += 1.0 / state.hyper.beta();
    f.llt.compute(f.cov);
    if (f.llt.info() != Eigen::Success) {
        const double min_pivot = f.llt.matrixLLT().diagonal().minCoeff();
        throw NumericError("gppom: covariance factorization failed, smallest pivot " +
                           std::to_string(min_pivot));
    }
    return f;
}

double nll_from(const Factorization& f, const Vector& y) {
    const double n = static_cast<double>(y.size());
    const double log_det = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();
    const Vector alpha = f.llt.solve(y);
    return 0.5 * kOutputDim * n * std::log(2.0 * M_PI) + 0.5 * kOutputDim * log_det +
           0.5 * y.dot(alpha);
}

ObjectiveValue objective_from(const Factorization& f, const GppomState& state, double lambda) {
    ObjectiveValue v;
    v.nll = nll_from(f, state.y);
    v.hsic_raw = hsic_biased(f.k_x, f.k_theta);
    if (lambda > 0.0) {
        if (v.hsic_raw <= kHsicFloor) {
            throw DegenerateLatentError("gppom: HSIC(X, Theta) underflowed; latent collapsed");
        }
        v.hsic_log_term = lambda * std::log(v.hsic_raw);
    }
    v.total = v.nll + v.hsic_log_term;
    return v;
}

// d(-L)/dK_tilde = (1/2) (D K^{-1} - K^{-1} y y^T K^{-1}); symmetric.
Matrix nll_cov_gradient(const Factorization& f, const Vector& y) {
    const Eigen::Index n = y.size();
    const Matrix k_inv = f.llt.solve(Matrix::Identity(n, n));
    const Vector alpha = f.llt.solve(y);
    return 0.5 * (kOutputDim * k_inv - alpha * alpha.transpose());
}

// dJ/dK_theta: likelihood part elementwise through the Hadamard product,
// plus the centered HSIC part H K_X H / tr(K_X H K_theta H).
Matrix objective_k_theta_gradient(const Factorization& f, const GppomState& state, double lambda) {
    Matrix g = nll_cov_gradient(f, state.y).cwiseProduct(f.k_x);
    if (lambda > 0.0) {
        const Eigen::Index n = state.n();
        const Matrix h = centering_matrix(n);
        const Matrix hkxh = h * f.k_x * h;
        const double trace = (hkxh.array() * f.k_theta.array()).sum();
        if (trace <= kHsicFloor) {
            throw DegenerateLatentError("gppom: HSIC(X, Theta) underflowed; latent collapsed");
        }
        g += (lambda / trace) * hkxh;
    }
    return g;
}

Matrix grad_theta_from(const Factorization& f, const GppomState& state, double lambda) {
    const Matrix g = objective_k_theta_gradient(f, state, lambda);
    // Chain rule through the RBF: the full contraction reduces to row sums of
    // B = (G + G^T) o K_theta against the latent coordinates.
    const Matrix b = (g + g.transpose()).cwiseProduct(f.k_theta);
    const Vector row_sums = b.rowwise().sum();
    Matrix grad = -2.0 * (row_sums.asDiagonal() * state.theta - b * state.theta);
    grad *= state.hyper.gamma_theta().asDiagonal();
    return grad;
}

Vector grad_hyper_from(const Factorization& f, const GppomState& state, double lambda) {
    const Eigen::Index n = state.n();
    const Eigen::Index dx = state.hyper.log_gamma_x.size();
    const Eigen::Index q = state.hyper.log_gamma_theta.size();
    Vector grad(1 + dx + q);

    const Matrix e = nll_cov_gradient(f, state.y);

    // log beta: K_tilde depends on beta only through the beta^{-1} ridge.
    grad(0) = -e.trace() / state.hyper.beta();

    // Cause-kernel widths: both the likelihood (through the Hadamard
    // product) and the HSIC penalty see K_X.
    Matrix dj_dkx = e.cwiseProduct(f.k_theta);
    if (lambda > 0.0) {
        const Matrix h = centering_matrix(n);
        const Matrix hkth = h * f.k_theta * h;
        const double trace = (f.k_x.array() * hkth.array()).sum();
        if (trace <= kHsicFloor) {
            throw DegenerateLatentError("gppom: HSIC(X, Theta) underflowed; latent collapsed");
        }
        dj_dkx += (lambda / trace) * hkth;
    }
    const Vector gx = state.hyper.gamma_x();
    for (Eigen::Index d = 0; d < dx; ++d) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const double diff = state.x(i) - state.x(j);
                s += dj_dkx(i, j) * (-(diff * diff)) * f.k_x(i, j);
            }
        }
        grad(1 + d) = s * gx(d);  // chain into log-space
    }

    // Latent-kernel widths reuse dJ/dK_theta.
    const Matrix g_ktheta = objective_k_theta_gradient(f, state, lambda);
    const Vector gt = state.hyper.gamma_theta();
    for (Eigen::Index d = 0; d < q; ++d) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const double diff = state.theta(i, d) - state.theta(j, d);
                s += g_ktheta(i, j) * (-(diff * diff)) * f.k_theta(i, j);
            }
        }
        grad(1 + dx + d) = s * gt(d);
    }
    return grad;
}

double objective_total_or_inf(const GppomState& state, double lambda, const Matrix* k_x_cached) {
    try {
        const Factorization f = factorize(state, k_x_cached);
        return objective_from(f, state, lambda).total;
    } catch (const NumericError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

Vector Hyperparams::pack() const {
    Vector v(1 + log_gamma_x.size() + log_gamma_theta.size());
    v(0) = log_beta;
    v.segment(1, log_gamma_x.size()) = log_gamma_x;
    v.tail(log_gamma_theta.size()) = log_gamma_theta;
    return v;
}

void Hyperparams::unpack(const Vector& packed) {
    log_beta = packed(0);
    log_gamma_x = packed.segment(1, log_gamma_x.size());
    log_gamma_theta = packed.tail(log_gamma_theta.size());
}

Matrix covariance(const GppomState& state) {
    return factorize(state, nullptr).cov;
}

double neg_log_likelihood(const GppomState& state) {
    return nll_from(factorize(state, nullptr), state.y);
}

ObjectiveValue objective(const GppomState& state, double lambda) {
    return objective_from(factorize(state, nullptr), state, lambda);
}

Matrix grad_theta(const GppomState& state, double lambda) {
    return grad_theta_from(factorize(state, nullptr), state, lambda);
}

Vector grad_hyper(const GppomState& state, double lambda) {
    return grad_hyper_from(factorize(state, nullptr), state, lambda);
}

double max_pairwise_latent_distance(const Matrix& theta) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < theta.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < theta.rows(); ++j) {
            best = std::max(best, (theta.row(i) - theta.row(j)).norm());
        }
    }
    return best;
}

FitResult fit(const Vector& x, const Vector& y, double lambda, const FitOptions& options) {
    if (x.size() != y.size() || x.size() < 4) {
        throw std::invalid_argument("fit: x and y must be equal-length columns with N >= 4");
    }
    if (options.restarts < 1 || options.latent_dim < 1) {
        throw std::invalid_argument("fit: restarts and latent_dim must be positive");
    }

    const Eigen::Index n = x.size();
    const Eigen::Index q = options.latent_dim;

    std::optional<FitResult> best;
    int degenerate_restarts = 0;

    for (int r = 0; r < options.restarts; ++r) {
        std::mt19937_64 rng(splitmix64(options.seed + static_cast<std::uint64_t>(r)));
        std::normal_distribution<double> gauss(0.0, 1.0);

        GppomState state;
        state.x = x;
        state.y = y;
        state.hyper.log_beta = std::log(options.beta_init);
        state.hyper.log_gamma_x = Vector::Constant(1, std::log(options.gamma_init));
        state.hyper.log_gamma_theta = Vector::Constant(q, std::log(options.gamma_init));

        // Redraw on immediate HSIC collapse at the initial point.
        ObjectiveValue current;
        bool initialized = false;
        for (int attempt = 0; attempt < 20 && !initialized; ++attempt) {
            state.theta = Matrix::NullaryExpr(n, q, [&](Eigen::Index, Eigen::Index) {
                return 0.1 * gauss(rng);
            });
            if (r % 2 == 0) {
                state.theta.col(0) += y;
            }
            try {
                current = objective(state, lambda);
                initialized = true;
            } catch (const NumericError&) {
            }
        }
        if (!initialized) {
            ++degenerate_restarts;
            continue;
        }

        Matrix k_x = rbf_gram(state.x, state.hyper.gamma_x());
        double theta_step = 1.0;
        double hyper_step = 1.0;
        int iters = 0;

        // Polak-Ribiere conjugate gradient over Theta with Armijo
        // backtracking; falls back to steepest descent whenever the
        // conjugate direction stops being a descent direction.
        Matrix g;
        Matrix dir;
        bool have_grad = false;

        for (int it = 1; it <= options.max_iters; ++it) {
            iters = it;
            const double before = current.total;

            if (!have_grad) {
                try {
                    const Factorization f = factorize(state, &k_x);
                    g = grad_theta_from(f, state, lambda);
                } catch (const NumericError&) {
                    break;
                }
                dir = -g;
                have_grad = true;
            }

            double descent = (g.array() * dir.array()).sum();
            if (descent >= 0.0) {
                dir = -g;
                descent = -g.squaredNorm();
            }
            if (descent < 0.0) {
                double t = theta_step;
                GppomState trial = state;
                bool accepted = false;
                for (int b = 0; b < kMaxBacktracks; ++b) {
                    trial.theta = state.theta + t * dir;
                    const double j_trial = objective_total_or_inf(trial, lambda, &k_x);
                    if (j_trial <= current.total + kArmijo * t * descent) {
                        accepted = true;
                        break;
                    }
                    t *= kShrink;
                }
                if (!accepted) {
                    break;
                }
                state.theta = trial.theta;
                current = objective(state, lambda);
                theta_step = std::min(t * 2.0, 1e3);

                Matrix g_next;
                try {
                    const Factorization f = factorize(state, &k_x);
                    g_next = grad_theta_from(f, state, lambda);
                } catch (const NumericError&) {
                    break;
                }
                const double beta_pr =
                    std::max(0.0, (g_next.array() * (g_next - g).array()).sum() / g.squaredNorm());
                dir = -g_next + beta_pr * dir;
                g = g_next;
            }

            // Interleaved hyperparameter step.
            if (options.optimize_hyper && it % options.hyper_every == 0) {
                try {
                    const Factorization fh = factorize(state, &k_x);
                    const Vector gh = grad_hyper_from(fh, state, lambda);
                    const double gh_norm2 = gh.squaredNorm();
                    if (gh_norm2 > 0.0) {
                        const Vector packed = state.hyper.pack();
                        double t = hyper_step;
                        GppomState trial = state;
                        for (int b = 0; b < kMaxBacktracks; ++b) {
                            trial.hyper.unpack(packed - t * gh);
                            const double j_trial = objective_total_or_inf(trial, lambda, nullptr);
                            if (j_trial <= current.total - kArmijo * t * gh_norm2) {
                                state.hyper = trial.hyper;
                                k_x = rbf_gram(state.x, state.hyper.gamma_x());
                                current = objective(state, lambda);
                                hyper_step = std::min(t * 2.0, 1e3);
                                have_grad = false;  // K_X changed under the CG direction
                                break;
                            }
                            t *= kShrink;
                        }
                    }
                } catch (const NumericError&) {
                    break;
                }
            }

            if (std::abs(before - current.total) < options.tol) {
                break;
            }
        }

        FitResult result;
        result.state = state;
        result.objective = current;
        result.iterations = iters;
        result.restart_index = r;
        result.degenerate = max_pairwise_latent_distance(state.theta) < kDegenerateLatentThreshold;
        if (result.degenerate) {
            ++degenerate_restarts;
            continue;
        }
        if (!best || result.objective.total < best->objective.total) {
            best = std::move(result);
        }
    }

    if (!best) {
        throw EstimationFailedError("fit: all " + std::to_string(options.restarts) +
                                    " restarts ended degenerate");
    }
    return *best;
}

}  // namespace anmmm
