// Command-line front end for the ANM mixture model shared library.
// Talks to the core exclusively through the C API in anmmm.h.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "anmmm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNoDecision = 3;
constexpr int kExitNumeric = 4;

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(base ^ (a * 0x9e3779b97f4a7c15ULL)) ^ b);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

int family_id(const std::string& name) {
    if (name == "f1") return ANMMM_FAMILY_F1;
    if (name == "f2") return ANMMM_FAMILY_F2;
    if (name == "f3") return ANMMM_FAMILY_F3;
    if (name == "f4") return ANMMM_FAMILY_F4;
    return -1;
}

struct CommonArgs {
    std::uint64_t seed = 0;
    double lambda = 1.0;
    std::string lambda_sweep;
    std::string out_dir = ".";
    int workers = 1;
    int restarts = 5;
    int max_iters = 500;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_sweep) {
    cmd->add_option("--seed", args.seed, "Base RNG seed");
    cmd->add_option("--lambda", args.lambda, "Independence weight");
    if (with_sweep) {
        cmd->add_option("--lambda-sweep", args.lambda_sweep,
                        "Comma-separated lambda list, e.g. 0.001,0.01,0.1,1,10");
    }
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--workers", args.workers, "Concurrent trial workers")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--restarts", args.restarts, "Model-fit restarts");
    cmd->add_option("--max-iters", args.max_iters, "Gradient iterations per restart");
}

anmmm_options make_options(const CommonArgs& args, double lambda, std::uint64_t seed) {
    anmmm_options opts;
    anmmm_default_options(&opts);
    opts.lambda = lambda;
    opts.seed = seed;
    opts.restarts = args.restarts;
    opts.max_iters = args.max_iters;
    return opts;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) {
            out.push_back(std::stod(token));
        }
    }
    return out;
}

// Mechanism parameter bands used across the experiment grid: U(1,1.1),
// U(3,3.1), U(5,5.1), U(7,7.1).
anmmm_synth_spec* build_spec(int family, int n, double sigma, int mechanisms, double prop) {
    anmmm_synth_spec* spec = anmmm_synth_spec_create(sigma, n);
    if (mechanisms == 2) {
        anmmm_synth_spec_add_mechanism(spec, family, 1.0, 1.1, prop);
        anmmm_synth_spec_add_mechanism(spec, family, 3.0, 3.1, 1.0 - prop);
    } else {
        for (int c = 0; c < mechanisms; ++c) {
            const double low = 1.0 + 2.0 * c;
            anmmm_synth_spec_add_mechanism(spec, family, low, low + 0.1, 1.0 / mechanisms);
        }
    }
    return spec;
}

void write_header(std::ofstream& out, const std::vector<std::pair<std::string, std::string>>& cfg) {
    for (const auto& [k, v] : cfg) {
        out << "# " << k << "=" << v << "\n";
    }
}

int fail_numeric(const std::string& context) {
    std::fprintf(stderr, "error: %s: %s\n", context.c_str(), anmmm_last_error());
    return kExitNumeric;
}

// ---------------------------------------------------------------------------

int run_synth(const CommonArgs& common, const std::string& family, int n, double sigma,
              int mechanisms, double prop) {
    const int fam = family_id(family);
    anmmm_synth_spec* spec = build_spec(fam, n, sigma, mechanisms, prop);
    anmmm_dataset* ds = nullptr;
    const int rc = anmmm_synth_generate(spec, common.seed, &ds);
    anmmm_synth_spec_free(spec);
    if (rc != ANMMM_OK) {
        return fail_numeric("synth");
    }

    std::vector<double> x(n), y(n), thetas(n);
    std::vector<int> labels(n);
    anmmm_dataset_columns(ds, x.data(), y.data());
    anmmm_dataset_ground_truth(ds, labels.data(), thetas.data());
    anmmm_dataset_free(ds);

    std::filesystem::create_directories(common.out_dir);
    const std::vector<std::pair<std::string, std::string>> cfg = {
        {"command", "synth"},        {"family", family},
        {"n", std::to_string(n)},    {"sigma", fmt(sigma)},
        {"mechanisms", std::to_string(mechanisms)}, {"prop", fmt(prop)},
        {"seed", std::to_string(common.seed)},
    };

    std::ofstream data(common.out_dir + "/data.csv");
    write_header(data, cfg);
    data << "# x,y\n";
    for (int i = 0; i < n; ++i) {
        data << fmt(x[i]) << "," << fmt(y[i]) << "\n";
    }

    std::ofstream lab(common.out_dir + "/labels.csv");
    write_header(lab, cfg);
    lab << "# label,theta\n";
    for (int i = 0; i < n; ++i) {
        lab << labels[i] << "," << fmt(thetas[i]) << "\n";
    }
    std::printf("wrote %s/data.csv and %s/labels.csv (%d rows)\n", common.out_dir.c_str(),
                common.out_dir.c_str(), n);
    return kExitOk;
}

int load_dataset(const std::string& input, int cause_col, int effect_col, int subsample,
                 std::uint64_t seed, anmmm_dataset** out) {
    anmmm_dataset* ds = nullptr;
    if (anmmm_dataset_load(input.c_str(), cause_col, effect_col, &ds) != ANMMM_OK) {
        std::fprintf(stderr, "error: cannot load %s: %s\n", input.c_str(), anmmm_last_error());
        return kExitUsage;
    }
    if (subsample > 0) {
        anmmm_dataset* sub = nullptr;
        const int rc = anmmm_dataset_subsample(ds, static_cast<size_t>(subsample), seed, &sub);
        anmmm_dataset_free(ds);
        if (rc != ANMMM_OK) {
            std::fprintf(stderr, "error: subsample: %s\n", anmmm_last_error());
            return kExitUsage;
        }
        ds = sub;
    }
    *out = ds;
    return kExitOk;
}

int run_infer(const CommonArgs& common, const std::string& input, int cause_col, int effect_col,
              int subsample) {
    anmmm_dataset* ds = nullptr;
    const int load_rc = load_dataset(input, cause_col, effect_col, subsample, common.seed, &ds);
    if (load_rc != kExitOk) {
        return load_rc;
    }

    const anmmm_options opts = make_options(common, common.lambda, common.seed);
    anmmm_verdict verdict;
    const int rc = anmmm_infer_direction(ds, &opts, &verdict);
    anmmm_dataset_free(ds);
    if (rc != ANMMM_OK) {
        return fail_numeric("infer");
    }

    const char* name = verdict.direction == ANMMM_DIR_X_TO_Y   ? "XtoY"
                       : verdict.direction == ANMMM_DIR_Y_TO_X ? "YtoX"
                                                               : "NoDecision";
    std::printf("direction=%s\n", name);
    std::printf("hsic_xy=%s hsic_yx=%s\n", fmt(verdict.hsic_xy).c_str(),
                fmt(verdict.hsic_yx).c_str());
    std::printf("objective_xy=%s objective_yx=%s iters_xy=%d iters_yx=%d\n",
                fmt(verdict.objective_xy).c_str(), fmt(verdict.objective_yx).c_str(),
                verdict.iterations_xy, verdict.iterations_yx);
    return verdict.direction == ANMMM_DIR_NO_DECISION ? kExitNoDecision : kExitOk;
}

std::vector<int> load_truth_labels(const std::string& path) {
    std::vector<int> labels;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        labels.push_back(std::stoi(line.substr(first)));
    }
    return labels;
}

int run_cluster(const CommonArgs& common, const std::string& input, int cause_col, int effect_col,
                int clusters, const std::string& truth_path) {
    anmmm_dataset* ds = nullptr;
    const int load_rc = load_dataset(input, cause_col, effect_col, 0, common.seed, &ds);
    if (load_rc != kExitOk) {
        return load_rc;
    }
    const size_t n = anmmm_dataset_size(ds);
    std::vector<int> labels(n);
    const anmmm_options opts = make_options(common, common.lambda, common.seed);
    const int rc = anmmm_cluster_mechanisms(ds, &opts, clusters, labels.data());
    anmmm_dataset_free(ds);
    if (rc != ANMMM_OK) {
        return fail_numeric("cluster");
    }

    std::filesystem::create_directories(common.out_dir);
    std::ofstream out(common.out_dir + "/cluster_labels.csv");
    write_header(out, {{"command", "cluster"},
                       {"input", input},
                       {"clusters", std::to_string(clusters)},
                       {"lambda", fmt(common.lambda)},
                       {"seed", std::to_string(common.seed)}});
    for (size_t i = 0; i < n; ++i) {
        out << labels[i] << "\n";
    }
    std::printf("wrote %s/cluster_labels.csv (%zu rows)\n", common.out_dir.c_str(), n);

    if (!truth_path.empty()) {
        const std::vector<int> truth = load_truth_labels(truth_path);
        if (truth.size() != n) {
            std::fprintf(stderr, "error: ground truth has %zu labels, dataset has %zu rows\n",
                         truth.size(), n);
            return kExitUsage;
        }
        double ari = 0.0;
        if (anmmm_adjusted_rand_index(labels.data(), truth.data(), n, &ari) != ANMMM_OK) {
            return fail_numeric("ari");
        }
        std::printf("ari=%s\n", fmt(ari).c_str());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchCell {
    std::string family;
    int n = 100;
    double sigma = 0.05;
    double prop = 0.5;
    int mechanisms = 2;
};

struct BenchTrialResult {
    int verdict = ANMMM_DIR_NO_DECISION;
    double metric = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
};

int run_bench(const CommonArgs& common, const std::string& task, const std::string& families_csv,
              const std::string& ns_csv, const std::string& sigmas_csv, const std::string& props_csv,
              int clusters, int trials) {
    if (trials < 1) {
        std::fprintf(stderr, "error: --trials must be positive\n");
        return kExitUsage;
    }
    std::vector<std::string> families;
    {
        std::stringstream ss(families_csv);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (family_id(token) < 0) {
                std::fprintf(stderr, "error: unknown family '%s'\n", token.c_str());
                return kExitUsage;
            }
            families.push_back(token);
        }
    }
    const std::vector<double> ns = parse_list(ns_csv);
    const std::vector<double> sigmas = parse_list(sigmas_csv);
    const std::vector<double> props = parse_list(props_csv);
    std::vector<double> lambdas =
        common.lambda_sweep.empty() ? std::vector<double>{common.lambda}
                                    : parse_list(common.lambda_sweep);

    std::vector<BenchCell> cells;
    for (const auto& fam : families) {
        for (double n : ns) {
            for (double sigma : sigmas) {
                for (double prop : props) {
                    cells.push_back({fam, static_cast<int>(n), sigma, prop, 2});
                }
            }
        }
    }

    // One task per (cell, lambda, trial); results land in a preallocated
    // grid so worker count never changes output order.
    const std::size_t per_cell = lambdas.size() * static_cast<std::size_t>(trials);
    std::vector<BenchTrialResult> results(cells.size() * per_cell);
    std::vector<std::function<void()>> tasks;

    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        for (std::size_t li = 0; li < lambdas.size(); ++li) {
            for (int t = 0; t < trials; ++t) {
                const std::size_t slot = ci * per_cell + li * trials + t;
                tasks.push_back([&, ci, li, t, slot] {
                    const BenchCell& cell = cells[ci];
                    const double lambda = lambdas[li];
                    const std::uint64_t data_seed = derive_seed(common.seed, ci, t);
                    const std::uint64_t fit_seed = derive_seed(common.seed + 1, ci, t);
                    BenchTrialResult& r = results[slot];
                    r.seed = data_seed;

                    anmmm_synth_spec* spec = build_spec(family_id(cell.family), cell.n, cell.sigma,
                                                        cell.mechanisms, cell.prop);
                    anmmm_dataset* ds = nullptr;
                    const int grc = anmmm_synth_generate(spec, data_seed, &ds);
                    anmmm_synth_spec_free(spec);
                    if (grc != ANMMM_OK) {
                        return;
                    }
                    const anmmm_options opts = make_options(common, lambda, fit_seed);

                    if (task == "infer") {
                        anmmm_verdict v;
                        if (anmmm_infer_direction(ds, &opts, &v) == ANMMM_OK) {
                            r.verdict = v.direction;
                            r.metric = v.direction == ANMMM_DIR_X_TO_Y ? 1.0 : 0.0;
                            r.ok = true;
                        }
                    } else {
                        const size_t n = anmmm_dataset_size(ds);
                        std::vector<int> labels(n), truth(n);
                        if (anmmm_cluster_mechanisms(ds, &opts, clusters, labels.data()) ==
                                ANMMM_OK &&
                            anmmm_dataset_ground_truth(ds, truth.data(), nullptr) == ANMMM_OK) {
                            double ari = 0.0;
                            if (anmmm_adjusted_rand_index(labels.data(), truth.data(), n, &ari) ==
                                ANMMM_OK) {
                                r.metric = ari;
                                r.ok = true;
                            }
                        }
                    }
                    anmmm_dataset_free(ds);
                });
            }
        }
    }

    // Static round-robin split keeps scheduling independent of timing.
    const int workers = std::max(1, common.workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = static_cast<std::size_t>(w); i < tasks.size();
                 i += static_cast<std::size_t>(workers)) {
                tasks[i]();
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }

    std::filesystem::create_directories(common.out_dir);
    const std::vector<std::pair<std::string, std::string>> cfg = {
        {"command", "bench"},
        {"task", task},
        {"families", families_csv},
        {"n", ns_csv},
        {"sigma", sigmas_csv},
        {"prop", props_csv},
        {"clusters", std::to_string(clusters)},
        {"trials", std::to_string(trials)},
        {"seed", std::to_string(common.seed)},
        {"lambda", common.lambda_sweep.empty() ? fmt(common.lambda) : common.lambda_sweep},
    };

    std::ofstream table(common.out_dir + "/table.csv");
    write_header(table, cfg);
    table << "family,n,sigma,prop,lambda,metric_mean,metric_std,trials\n";

    std::ofstream longf(common.out_dir + "/long.csv");
    write_header(longf, cfg);
    longf << "family,n,sigma,prop,lambda,trial,seed,metric,verdict\n";

    std::ofstream recs(common.out_dir + "/records.log");

    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const BenchCell& cell = cells[ci];
        double best_mean = -2.0;
        double best_lambda = lambdas.front();
        for (std::size_t li = 0; li < lambdas.size(); ++li) {
            double sum = 0.0;
            double sum_sq = 0.0;
            for (int t = 0; t < trials; ++t) {
                const BenchTrialResult& r = results[ci * per_cell + li * trials + t];
                sum += r.metric;
                sum_sq += r.metric * r.metric;
                const char* vname = r.verdict == ANMMM_DIR_X_TO_Y   ? "XtoY"
                                    : r.verdict == ANMMM_DIR_Y_TO_X ? "YtoX"
                                                                    : "NoDecision";
                longf << cell.family << "," << cell.n << "," << fmt(cell.sigma) << ","
                      << fmt(cell.prop) << "," << fmt(lambdas[li]) << "," << t << "," << r.seed
                      << "," << fmt(r.metric) << "," << vname << "\n";
                recs << "seed=" << r.seed << " dataset=" << cell.family << "-n" << cell.n << "-s"
                     << fmt(cell.sigma) << " verdict=" << vname << " truth=XtoY"
                     << " metric=" << fmt(r.metric) << " wall_s=0\n";
            }
            const double mean = sum / trials;
            const double var = std::max(0.0, sum_sq / trials - mean * mean);
            table << cell.family << "," << cell.n << "," << fmt(cell.sigma) << ","
                  << fmt(cell.prop) << "," << fmt(lambdas[li]) << "," << fmt(mean) << ","
                  << fmt(std::sqrt(var)) << "," << trials << "\n";
            if (mean > best_mean) {
                best_mean = mean;
                best_lambda = lambdas[li];
            }
        }
        if (lambdas.size() > 1) {
            table << cell.family << "," << cell.n << "," << fmt(cell.sigma) << ","
                  << fmt(cell.prop) << ",best:" << fmt(best_lambda) << "," << fmt(best_mean)
                  << ",," << trials << "\n";
        }
    }
    std::printf("wrote %s/table.csv, %s/long.csv, %s/records.log\n", common.out_dir.c_str(),
                common.out_dir.c_str(), common.out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ANM mixture model: causal direction inference and mechanism clustering"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonArgs common;

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic mixture dataset");
    std::string family = "f3";
    int n = 100;
    double sigma = 0.05;
    int mechanisms = 2;
    double prop = 0.5;
    synth->add_option("--family", family, "Mechanism family (f1|f2|f3|f4)");
    synth->add_option("--n", n, "Sample count")->check(CLI::PositiveNumber);
    synth->add_option("--sigma", sigma, "Additive noise std");
    synth->add_option("--mechanisms", mechanisms, "Number of mechanisms")
        ->check(CLI::Range(1, 4));
    synth->add_option("--prop", prop, "Mixing proportion of the first mechanism (2-mechanism)");
    add_common(synth, common, false);

    // infer
    auto* infer = app.add_subcommand("infer", "Decide the causal direction of a pair file");
    std::string input;
    int cause_col = 0;
    int effect_col = 1;
    int subsample = 0;
    infer->add_option("--input", input, "Pair data file")->required();
    infer->add_option("--cause-col", cause_col, "Cause column index (0-based)");
    infer->add_option("--effect-col", effect_col, "Effect column index (0-based)");
    infer->add_option("--subsample", subsample, "Random subsample size (0 = all rows)");
    add_common(infer, common, false);

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Cluster observations by generating mechanism");
    int clusters = 2;
    std::string truth_path;
    cluster->add_option("--input", input, "Pair data file")->required();
    cluster->add_option("--cause-col", cause_col, "Cause column index (0-based)");
    cluster->add_option("--effect-col", effect_col, "Effect column index (0-based)");
    cluster->add_option("--clusters", clusters, "Cluster count")->check(CLI::PositiveNumber);
    cluster->add_option("--truth", truth_path, "Ground-truth label file for ARI");
    add_common(cluster, common, false);

    // bench
    auto* bench = app.add_subcommand("bench", "Run a synthetic experiment grid");
    std::string task = "infer";
    std::string families_csv = "f3";
    std::string ns_csv = "100";
    std::string sigmas_csv = "0.05";
    std::string props_csv = "0.5";
    int trials = 20;
    bench->add_option("--task", task, "infer | cluster")
        ->check(CLI::IsMember({"infer", "cluster"}));
    bench->add_option("--family", families_csv, "Comma-separated families");
    bench->add_option("--n", ns_csv, "Comma-separated sample sizes");
    bench->add_option("--sigma", sigmas_csv, "Comma-separated noise stds");
    bench->add_option("--prop", props_csv, "Comma-separated first-mechanism proportions");
    bench->add_option("--clusters", clusters, "Cluster count (cluster task)");
    bench->add_option("--trials", trials, "Trials per grid cell");
    add_common(bench, common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth->parsed()) {
            if (family_id(family) < 0) {
                std::fprintf(stderr, "error: unknown family '%s'\n", family.c_str());
                return kExitUsage;
            }
            return run_synth(common, family, n, sigma, mechanisms, prop);
        }
        if (infer->parsed()) {
            return run_infer(common, input, cause_col, effect_col, subsample);
        }
        if (cluster->parsed()) {
            return run_cluster(common, input, cause_col, effect_col, clusters, truth_path);
        }
        if (bench->parsed()) {
            return run_bench(common, task, families_csv, ns_csv, sigmas_csv, props_csv, clusters,
                             trials);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitUsage;
}
