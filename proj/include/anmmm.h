/*
 * C API for the ANM mixture model library: latent mechanism estimation,
 * bivariate causal-direction inference and mechanism clustering.
 *
 * All functions return ANMMM_OK (0) on success or a negative error code.
 * anmmm_last_error() returns a thread-local message for the most recent
 * failure on the calling thread. Handles are opaque and must be released
 * with their matching *_free function.
 */
#ifndef ANMMM_H
#define ANMMM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define ANMMM_OK 0
#define ANMMM_EINVAL (-1)       /* invalid argument */
#define ANMMM_ENUMERIC (-2)     /* numerical failure */
#define ANMMM_EDEGENERATE (-3)  /* latent collapse / estimation failed */
#define ANMMM_EPARSE (-4)       /* malformed input file */
#define ANMMM_ECONSTANT (-5)    /* zero-variance variable */

#define ANMMM_DIR_X_TO_Y 1
#define ANMMM_DIR_Y_TO_X 2
#define ANMMM_DIR_NO_DECISION 0

#define ANMMM_FAMILY_F1 1
#define ANMMM_FAMILY_F2 2
#define ANMMM_FAMILY_F3 3
#define ANMMM_FAMILY_F4 4

typedef struct anmmm_dataset anmmm_dataset;
typedef struct anmmm_synth_spec anmmm_synth_spec;

typedef struct anmmm_options {
    double lambda;        /* independence weight (default 1.0) */
    uint64_t seed;        /* base seed for all randomized steps */
    int restarts;         /* model-fit restarts (default 5) */
    int max_iters;        /* gradient-descent iterations per restart */
    double tol;           /* absolute objective-change stopping threshold */
    int latent_dim;       /* latent dimension q (default 1) */
    int hyper_every;      /* hyperparameter step interval (default 10) */
    int optimize_hyper;   /* nonzero to interleave hyperparameter steps */
    int kmeans_restarts;  /* k-means restarts (default 10) */
    double beta_init;     /* initial noise precision (default 100) */
    double gamma_init;    /* initial kernel width (default 0.12) */
} anmmm_options;

typedef struct anmmm_verdict {
    int direction; /* ANMMM_DIR_* */
    double hsic_xy;
    double hsic_yx;
    double objective_xy;
    double objective_yx;
    int iterations_xy;
    int iterations_yx;
    int failed_xy; /* nonzero when the x->y fit had no usable restart */
    int failed_yx;
} anmmm_verdict;

const char* anmmm_last_error(void);
void anmmm_default_options(anmmm_options* opts);

/* --- synthetic data ----------------------------------------------------- */

anmmm_synth_spec* anmmm_synth_spec_create(double noise_std, int n);
int anmmm_synth_spec_add_mechanism(anmmm_synth_spec* spec, int family, double theta_low,
                                   double theta_high, double weight);
void anmmm_synth_spec_free(anmmm_synth_spec* spec);

int anmmm_synth_generate(const anmmm_synth_spec* spec, uint64_t seed, anmmm_dataset** out);

/* --- datasets ----------------------------------------------------------- */

int anmmm_dataset_from_arrays(const double* x, const double* y, size_t n, anmmm_dataset** out);
int anmmm_dataset_load(const char* path, int cause_col, int effect_col, anmmm_dataset** out);
int anmmm_dataset_subsample(const anmmm_dataset* ds, size_t k, uint64_t seed,
                            anmmm_dataset** out);
size_t anmmm_dataset_size(const anmmm_dataset* ds);
/* Copies into caller buffers of length n; any pointer may be NULL.
 * labels/thetas are only available for synthetic datasets (returns
 * ANMMM_EINVAL otherwise). */
int anmmm_dataset_columns(const anmmm_dataset* ds, double* x, double* y);
int anmmm_dataset_ground_truth(const anmmm_dataset* ds, int* labels, double* thetas);
void anmmm_dataset_free(anmmm_dataset* ds);

/* --- estimation --------------------------------------------------------- */

int anmmm_infer_direction(const anmmm_dataset* ds, const anmmm_options* opts,
                          anmmm_verdict* out);

/* labels_out: caller buffer of length n, filled with 1-based cluster ids. */
int anmmm_cluster_mechanisms(const anmmm_dataset* ds, const anmmm_options* opts, int clusters,
                             int* labels_out);

int anmmm_adjusted_rand_index(const int* labels_a, const int* labels_b, size_t n, double* out);

int anmmm_standardize(const double* in, size_t n, double* out, double* mean, double* stddev);

#ifdef __cplusplus
}
#endif

#endif /* ANMMM_H */
