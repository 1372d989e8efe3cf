#include "anmmm.h"

#include <cstring>
#include <string>

#include "anmmm/clustering.hpp"
#include "anmmm/errors.hpp"
#include "anmmm/inference.hpp"
#include "anmmm/io.hpp"
#include "anmmm/synth.hpp"

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const anmmm::DegenerateLatentError& e) {
        return set_error(ANMMM_EDEGENERATE, e.what());
    } catch (const anmmm::EstimationFailedError& e) {
        return set_error(ANMMM_EDEGENERATE, e.what());
    } catch (const anmmm::ConstantVariableError& e) {
        return set_error(ANMMM_ECONSTANT, e.what());
    } catch (const anmmm::ParseError& e) {
        return set_error(ANMMM_EPARSE,
                         std::string(e.what()) + " (line " + std::to_string(e.line()) + ")");
    } catch (const anmmm::NumericError& e) {
        return set_error(ANMMM_ENUMERIC, e.what());
    } catch (const std::exception& e) {
        return set_error(ANMMM_EINVAL, e.what());
    }
}

anmmm::FitOptions fit_options(const anmmm_options& o) {
    anmmm::FitOptions f;
    f.restarts = o.restarts;
    f.max_iters = o.max_iters;
    f.tol = o.tol;
    f.latent_dim = o.latent_dim;
    f.seed = o.seed;
    f.hyper_every = o.hyper_every > 0 ? o.hyper_every : 10;
    f.optimize_hyper = o.optimize_hyper != 0;
    if (o.beta_init > 0.0) {
        f.beta_init = o.beta_init;
    }
    if (o.gamma_init > 0.0) {
        f.gamma_init = o.gamma_init;
    }
    return f;
}

}  // namespace

struct anmmm_dataset {
    anmmm::Matrix pairs;  // N x 2
    std::vector<int> labels;
    anmmm::Vector thetas;
    bool has_truth = false;
};

struct anmmm_synth_spec {
    anmmm::MixtureSpec spec;
};

extern "C" {

const char* anmmm_last_error(void) { return g_last_error.c_str(); }

void anmmm_default_options(anmmm_options* opts) {
    if (!opts) {
        return;
    }
    opts->lambda = 1.0;
    opts->seed = 0;
    opts->restarts = 5;
    opts->max_iters = 500;
    opts->tol = 1e-6;
    opts->latent_dim = 1;
    opts->hyper_every = 10;
    opts->optimize_hyper = 0;
    opts->kmeans_restarts = 10;
    opts->beta_init = 100.0;
    opts->gamma_init = 0.12;
}

anmmm_synth_spec* anmmm_synth_spec_create(double noise_std, int n) {
    auto* spec = new anmmm_synth_spec();
    spec->spec.noise_std = noise_std;
    spec->spec.n = n;
    spec->spec.mechanisms.clear();
    return spec;
}

int anmmm_synth_spec_add_mechanism(anmmm_synth_spec* spec, int family, double theta_low,
                                   double theta_high, double weight) {
    if (!spec) {
        return set_error(ANMMM_EINVAL, "null spec");
    }
    return guarded([&] {
        anmmm::MechanismSpec m;
        switch (family) {
            case ANMMM_FAMILY_F1: m.family = anmmm::MechanismFamily::F1; break;
            case ANMMM_FAMILY_F2: m.family = anmmm::MechanismFamily::F2; break;
            case ANMMM_FAMILY_F3: m.family = anmmm::MechanismFamily::F3; break;
            case ANMMM_FAMILY_F4: m.family = anmmm::MechanismFamily::F4; break;
            default:
                return set_error(ANMMM_EINVAL, "unknown mechanism family id");
        }
        m.theta_low = theta_low;
        m.theta_high = theta_high;
        m.weight = weight;
        spec->spec.mechanisms.push_back(m);
        return ANMMM_OK;
    });
}

void anmmm_synth_spec_free(anmmm_synth_spec* spec) { delete spec; }

int anmmm_synth_generate(const anmmm_synth_spec* spec, uint64_t seed, anmmm_dataset** out) {
    if (!spec || !out) {
        return set_error(ANMMM_EINVAL, "null argument");
    }
    return guarded([&] {
        const anmmm::LabeledDataset ds = anmmm::generate(spec->spec, seed);
        auto* handle = new anmmm_dataset();
        handle->pairs.resize(ds.x.size(), 2);
        handle->pairs.col(0) = ds.x;
        handle->pairs.col(1) = ds.y;
        handle->labels = ds.mechanism_labels;
        handle->thetas = ds.theta_values;
        handle->has_truth = true;
        *out = handle;
        return ANMMM_OK;
    });
}

int anmmm_dataset_from_arrays(const double* x, const double* y, size_t n, anmmm_dataset** out) {
    if (!x || !y || !out || n == 0) {
        return set_error(ANMMM_EINVAL, "null argument or empty arrays");
    }
    auto* handle = new anmmm_dataset();
    handle->pairs.resize(static_cast<Eigen::Index>(n), 2);
    for (size_t i = 0; i < n; ++i) {
        handle->pairs(static_cast<Eigen::Index>(i), 0) = x[i];
        handle->pairs(static_cast<Eigen::Index>(i), 1) = y[i];
    }
    *out = handle;
    return ANMMM_OK;
}

int anmmm_dataset_load(const char* path, int cause_col, int effect_col, anmmm_dataset** out) {
    if (!path || !out) {
        return set_error(ANMMM_EINVAL, "null argument");
    }
    return guarded([&] {
        const anmmm::PairFile pf = anmmm::load_pairs(path, cause_col, effect_col);
        auto* handle = new anmmm_dataset();
        handle->pairs = pf.selected;
        *out = handle;
        return ANMMM_OK;
    });
}

int anmmm_dataset_subsample(const anmmm_dataset* ds, size_t k, uint64_t seed,
                            anmmm_dataset** out) {
    if (!ds || !out) {
        return set_error(ANMMM_EINVAL, "null argument");
    }
    return guarded([&] {
        auto* handle = new anmmm_dataset();
        handle->pairs = anmmm::subsample(ds->pairs, static_cast<int>(k), seed);
        *out = handle;
        return ANMMM_OK;
    });
}

size_t anmmm_dataset_size(const anmmm_dataset* ds) {
    return ds ? static_cast<size_t>(ds->pairs.rows()) : 0;
}

int anmmm_dataset_columns(const anmmm_dataset* ds, double* x, double* y) {
    if (!ds) {
        return set_error(ANMMM_EINVAL, "null dataset");
    }
    const Eigen::Index n = ds->pairs.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (x) x[i] = ds->pairs(i, 0);
        if (y) y[i] = ds->pairs(i, 1);
    }
    return ANMMM_OK;
}

int anmmm_dataset_ground_truth(const anmmm_dataset* ds, int* labels, double* thetas) {
    if (!ds) {
        return set_error(ANMMM_EINVAL, "null dataset");
    }
    if (!ds->has_truth) {
        return set_error(ANMMM_EINVAL, "dataset carries no ground truth");
    }
    const Eigen::Index n = ds->pairs.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels) labels[i] = ds->labels[static_cast<std::size_t>(i)];
        if (thetas) thetas[i] = ds->thetas(i);
    }
    return ANMMM_OK;
}

void anmmm_dataset_free(anmmm_dataset* ds) { delete ds; }

int anmmm_infer_direction(const anmmm_dataset* ds, const anmmm_options* opts,
                          anmmm_verdict* out) {
    if (!ds || !opts || !out) {
        return set_error(ANMMM_EINVAL, "null argument");
    }
    return guarded([&] {
        anmmm::InferOptions io;
        io.fit = fit_options(*opts);
        const anmmm::CausalVerdict v = anmmm::infer_direction(ds->pairs, opts->lambda, io);
        std::memset(out, 0, sizeof(*out));
        switch (v.direction) {
            case anmmm::Direction::XtoY: out->direction = ANMMM_DIR_X_TO_Y; break;
            case anmmm::Direction::YtoX: out->direction = ANMMM_DIR_Y_TO_X; break;
            default: out->direction = ANMMM_DIR_NO_DECISION; break;
        }
        out->hsic_xy = v.hsic_xy;
        out->hsic_yx = v.hsic_yx;
        out->objective_xy = v.fit_xy.objective_total;
        out->objective_yx = v.fit_yx.objective_total;
        out->iterations_xy = v.fit_xy.iterations;
        out->iterations_yx = v.fit_yx.iterations;
        out->failed_xy = v.fit_xy.failed ? 1 : 0;
        out->failed_yx = v.fit_yx.failed ? 1 : 0;
        return ANMMM_OK;
    });
}

int anmmm_cluster_mechanisms(const anmmm_dataset* ds, const anmmm_options* opts, int clusters,
                             int* labels_out) {
    if (!ds || !opts || !labels_out) {
        return set_error(ANMMM_EINVAL, "null argument");
    }
    return guarded([&] {
        anmmm::ClusterMechanismOptions co;
        co.fit = fit_options(*opts);
        co.kmeans.restarts = opts->kmeans_restarts > 0 ? opts->kmeans_restarts : 10;
        co.kmeans.seed = opts->seed;
        const anmmm::ClusterResult r =
            anmmm::cluster_mechanisms(ds->pairs, opts->lambda, clusters, co);
        for (std::size_t i = 0; i < r.labels.size(); ++i) {
            labels_out[i] = r.labels[i];
        }
        return ANMMM_OK;
    });
}

int anmmm_adjusted_rand_index(const int* labels_a, const int* labels_b, size_t n, double* out) {
    if (!labels_a || !labels_b || !out) {
        return set_error(ANMMM_EINVAL, "null argument");
    }
    return guarded([&] {
        const std::vector<int> a(labels_a, labels_a + n);
        const std::vector<int> b(labels_b, labels_b + n);
        *out = anmmm::adjusted_rand_index(a, b);
        return ANMMM_OK;
    });
}

int anmmm_standardize(const double* in, size_t n, double* out, double* mean, double* stddev) {
    if (!in || !out) {
        return set_error(ANMMM_EINVAL, "null argument");
    }
    return guarded([&] {
        anmmm::Vector col(static_cast<Eigen::Index>(n));
        for (size_t i = 0; i < n; ++i) {
            col(static_cast<Eigen::Index>(i)) = in[i];
        }
        const anmmm::Standardized s = anmmm::standardize(col);
        for (size_t i = 0; i < n; ++i) {
            out[i] = s.values(static_cast<Eigen::Index>(i));
        }
        if (mean) *mean = s.mean;
        if (stddev) *stddev = s.stddev;
        return ANMMM_OK;
    });
}

}  // extern "C"
