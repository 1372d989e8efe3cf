// Acceptance suite: end-to-end checks with pinned tolerances, one pass/fail
// line per criterion. Exits with the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "anmmm/clustering.hpp"
#include "anmmm/gppom.hpp"
#include "anmmm/inference.hpp"
#include "anmmm/kernels.hpp"
#include "anmmm/synth.hpp"

using anmmm::GppomState;
using anmmm::Matrix;
using anmmm::Vector;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    if (!pass) {
        ++g_failures;
    }
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void run_parallel(int tasks, const std::function<void(int)>& body) {
    const unsigned hw = std::thread::hardware_concurrency();
    const int workers = static_cast<int>(std::min(8u, hw == 0 ? 4u : hw));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int t = w; t < tasks; t += workers) {
                body(t);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

GppomState random_state(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    GppomState s;
    s.x.resize(n);
    s.y.resize(n);
    s.theta.resize(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        s.x(i) = gauss(rng);
        s.y(i) = gauss(rng);
        s.theta(i, 0) = 0.5 * gauss(rng);
    }
    s.hyper.log_beta = std::log(10.0) + 0.3 * gauss(rng);
    s.hyper.log_gamma_x = Vector::Constant(1, 0.2 * gauss(rng));
    s.hyper.log_gamma_theta = Vector::Constant(1, 0.2 * gauss(rng));
    return s;
}

// ---- criterion 1: HSIC against the brute-force centered double sum --------

void criterion_hsic_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(101);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> size(2, 20);

    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = size(rng);
        Matrix pts_a(n, 1);
        Matrix pts_b(n, 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            pts_a(i, 0) = gauss(rng);
            pts_b(i, 0) = gauss(rng);
        }
        const Matrix k = anmmm::rbf_gram(pts_a, Vector::Constant(1, 0.8));
        const Matrix l = anmmm::rbf_gram(pts_b, Vector::Constant(1, 1.3));

        const Matrix h = anmmm::centering_matrix(n);
        const Matrix kc = h * k * h;
        const Matrix lc = h * l * h;
        double brute = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                brute += kc(i, j) * lc(i, j);
            }
        }
        brute /= static_cast<double>(n) * static_cast<double>(n);
        worst = std::max(worst, std::abs(anmmm::hsic_biased(k, l) - brute));
    }
    const double elapsed = seconds_since(start);
    report(1, worst <= 1e-10 && elapsed < 1.0, "HSIC matches the brute-force double sum",
           "max |diff| = " + std::to_string(worst) + ", " + std::to_string(elapsed) + " s");
}

// ---- criterion 2: analytic gradients vs central finite differences --------

void criterion_gradients() {
    const auto start = Clock::now();
    std::mt19937_64 rng(202);
    const double h = 1e-5;
    const Eigen::Index sizes[] = {4, 8, 16};
    double worst_excess = 0.0;  // worst (|diff| - allowed), <= 0 means pass

    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = sizes[trial % 3];
        const double lambda = (trial % 2 == 0) ? 1.0 : 0.0;
        GppomState s = random_state(rng, n);

        const auto compare = [&](double analytic, double fd) {
            const double allowed = std::max(1e-4, 1e-3 * std::abs(fd));
            worst_excess = std::max(worst_excess, std::abs(analytic - fd) - allowed);
        };

        const Matrix gt = anmmm::grad_theta(s, lambda);
        for (Eigen::Index i = 0; i < n; ++i) {
            GppomState plus = s;
            GppomState minus = s;
            plus.theta(i, 0) += h;
            minus.theta(i, 0) -= h;
            const double fd = (anmmm::objective(plus, lambda).total -
                               anmmm::objective(minus, lambda).total) /
                              (2.0 * h);
            compare(gt(i, 0), fd);
        }

        const Vector gh = anmmm::grad_hyper(s, lambda);
        const Vector packed = s.hyper.pack();
        for (Eigen::Index k = 0; k < packed.size(); ++k) {
            GppomState plus = s;
            GppomState minus = s;
            Vector p = packed;
            p(k) += h;
            plus.hyper.unpack(p);
            p(k) -= 2.0 * h;
            minus.hyper.unpack(p);
            const double fd = (anmmm::objective(plus, lambda).total -
                               anmmm::objective(minus, lambda).total) /
                              (2.0 * h);
            compare(gh(k), fd);
        }
    }
    const double elapsed = seconds_since(start);
    report(2, worst_excess <= 0.0 && elapsed < 10.0,
           "latent and hyperparameter gradients match finite differences",
           "worst tolerance excess = " + std::to_string(worst_excess) + ", " +
               std::to_string(elapsed) + " s");
}

// ---- criterion 3: likelihood against a dense-inverse oracle ---------------

void criterion_likelihood_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(303);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const GppomState s = random_state(rng, 5 + (trial % 8));
        const Matrix cov = anmmm::covariance(s);
        const double dense = 0.5 * static_cast<double>(s.n()) * std::log(2.0 * M_PI) +
                             0.5 * std::log(cov.determinant()) +
                             0.5 * (cov.inverse() * s.y * s.y.transpose()).trace();
        const double got = anmmm::neg_log_likelihood(s);
        worst_rel = std::max(worst_rel, std::abs(got - dense) / std::abs(dense));
    }
    const double elapsed = seconds_since(start);
    report(3, worst_rel <= 1e-8 && elapsed < 1.0,
           "marginal likelihood matches the dense explicit-inverse oracle",
           "max rel diff = " + std::to_string(worst_rel) + ", " + std::to_string(elapsed) + " s");
}

// ---- criteria 4 and 6: direction accuracy over seeded trials --------------

double direction_accuracy(double sigma, int trials) {
    std::vector<int> correct(static_cast<std::size_t>(trials), 0);
    run_parallel(trials, [&](int t) {
        const auto spec =
            anmmm::default_two_mechanism_spec(anmmm::MechanismFamily::F3, 100, sigma);
        const auto ds = anmmm::generate(spec, 1000 + static_cast<std::uint64_t>(t));
        Matrix pairs(100, 2);
        pairs.col(0) = ds.x;
        pairs.col(1) = ds.y;
        anmmm::InferOptions opts;
        opts.fit.seed = static_cast<std::uint64_t>(t);
        try {
            const auto v = anmmm::infer_direction(pairs, 1.0, opts);
            correct[static_cast<std::size_t>(t)] = v.direction == anmmm::Direction::XtoY ? 1 : 0;
        } catch (const std::exception&) {
        }
    });
    int sum = 0;
    for (int c : correct) {
        sum += c;
    }
    return static_cast<double>(sum) / trials;
}

// ---- criterion 5: clustering quality over seeded trials -------------------

double mean_cluster_ari(double sigma, int trials) {
    std::vector<double> aris(static_cast<std::size_t>(trials), 0.0);
    run_parallel(trials, [&](int t) {
        const auto spec =
            anmmm::default_two_mechanism_spec(anmmm::MechanismFamily::F3, 100, sigma);
        const auto ds = anmmm::generate(spec, 2000 + static_cast<std::uint64_t>(t));
        Matrix pairs(100, 2);
        pairs.col(0) = ds.x;
        pairs.col(1) = ds.y;
        anmmm::ClusterMechanismOptions opts;
        opts.fit.seed = static_cast<std::uint64_t>(t);
        opts.kmeans.seed = static_cast<std::uint64_t>(t);
        try {
            const auto r = anmmm::cluster_mechanisms(pairs, 1.0, 2, opts);
            aris[static_cast<std::size_t>(t)] =
                anmmm::adjusted_rand_index(r.labels, ds.mechanism_labels);
        } catch (const std::exception&) {
            aris[static_cast<std::size_t>(t)] = 0.0;
        }
    });
    double sum = 0.0;
    for (double a : aris) {
        sum += a;
    }
    return sum / trials;
}

// ---- criterion 7: exhaustive k-means optimum at tiny N --------------------

void criterion_kmeans_exact() {
    std::mt19937_64 rng(707);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int matches = 0;
    bool traces_monotone = true;

    for (int trial = 0; trial < 10; ++trial) {
        const int n = 6 + (trial % 3);  // 6, 7, 8
        Matrix points(n, 1);
        for (int i = 0; i < n; ++i) {
            points(i, 0) = gauss(rng);
        }

        double best = std::numeric_limits<double>::infinity();
        for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
            double sum0 = 0.0;
            double sum1 = 0.0;
            int c0 = 0;
            int c1 = 0;
            for (int i = 0; i < n; ++i) {
                if (mask & (1u << i)) {
                    sum1 += points(i, 0);
                    ++c1;
                } else {
                    sum0 += points(i, 0);
                    ++c0;
                }
            }
            double wcss = 0.0;
            for (int i = 0; i < n; ++i) {
                const double m = (mask & (1u << i)) ? sum1 / c1 : sum0 / c0;
                wcss += (points(i, 0) - m) * (points(i, 0) - m);
            }
            best = std::min(best, wcss);
        }

        anmmm::KmeansOptions opts;
        opts.seed = static_cast<std::uint64_t>(trial);
        const auto r = anmmm::kmeans(points, 2, opts);
        for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
            if (r.objective_trace[k] > r.objective_trace[k - 1] + 1e-12) {
                traces_monotone = false;
            }
        }
        if (std::abs(r.objective_trace.back() - best) < 1e-9) {
            ++matches;
        }
    }
    report(7, matches >= 9 && traces_monotone,
           "k-means reaches the exhaustive optimum at tiny N",
           std::to_string(matches) + "/10 optimal, trace monotone = " +
               (traces_monotone ? "yes" : "no"));
}

// ---- criterion 8: ARI exactness and chance centering ----------------------

void criterion_ari() {
    bool ok = true;
    std::string detail;

    const std::vector<int> ident{1, 2, 1, 3, 2, 3};
    ok = ok && anmmm::adjusted_rand_index(ident, ident) == 1.0;

    const std::vector<int> a{1, 1, 2, 2};
    const std::vector<int> permuted{2, 2, 1, 1};
    ok = ok && anmmm::adjusted_rand_index(a, permuted) == 1.0;

    const double hand = anmmm::adjusted_rand_index({1, 1, 1, 2, 2, 2}, {1, 1, 2, 2, 3, 3});
    ok = ok && std::abs(hand - 8.0 / 33.0) <= 1e-12;

    std::mt19937_64 rng(808);
    std::uniform_int_distribution<int> pick(1, 3);
    double sum = 0.0;
    for (int d = 0; d < 200; ++d) {
        std::vector<int> p(60);
        std::vector<int> q(60);
        for (int i = 0; i < 60; ++i) {
            p[static_cast<std::size_t>(i)] = pick(rng);
            q[static_cast<std::size_t>(i)] = pick(rng);
        }
        sum += anmmm::adjusted_rand_index(p, q);
    }
    const double mean = sum / 200.0;
    ok = ok && std::abs(mean) < 0.05;

    report(8, ok, "ARI exact cases, invariances and chance centering",
           "hand case = " + std::to_string(hand) + ", random mean = " + std::to_string(mean));
}

// ---- criterion 9: byte-identical benchmark reruns -------------------------

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_determinism() {
    const std::filesystem::path base =
        std::filesystem::temp_directory_path() / "anmmm_acceptance_bench";
    std::filesystem::remove_all(base);

    const std::string common_args =
        " bench --task infer --family f3 --n 40 --sigma 0.05 --trials 6 --seed 3"
        " --max-iters 200 --out ";
    const auto run = [&](const std::string& dir, const std::string& extra) {
        const std::string cmd = std::string(ANMMM_CLI_PATH) + common_args + dir + extra +
                                " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };

    const std::string d1 = (base / "run1").string();
    const std::string d2 = (base / "run2").string();
    const std::string d3 = (base / "run3_workers4").string();
    bool ran = run(d1, "") && run(d2, "") && run(d3, " --workers 4");

    bool identical = ran;
    std::string detail = ran ? "" : "CLI invocation failed";
    if (ran) {
        for (const char* file : {"table.csv", "long.csv", "records.log"}) {
            const std::string ref = slurp(std::filesystem::path(d1) / file);
            if (ref.empty()) {
                identical = false;
                detail = std::string(file) + " missing or empty";
                break;
            }
            if (slurp(std::filesystem::path(d2) / file) != ref) {
                identical = false;
                detail = std::string(file) + " differs between reruns";
                break;
            }
            if (slurp(std::filesystem::path(d3) / file) != ref) {
                identical = false;
                detail = std::string(file) + " differs under --workers 4";
                break;
            }
        }
        if (identical) {
            detail = "rerun and 4-worker outputs byte-identical";
        }
    }
    std::filesystem::remove_all(base);
    report(9, identical, "benchmark reruns are byte-identical", detail);
}

}  // namespace

int main() {
    criterion_hsic_oracle();
    criterion_gradients();
    criterion_likelihood_oracle();

    {
        const auto start = Clock::now();
        const double acc = direction_accuracy(0.05, 20);
        report(4, acc >= 0.90, "causal direction accuracy on two-mechanism data",
               "accuracy = " + std::to_string(acc) + " over 20 trials, " +
                   std::to_string(seconds_since(start)) + " s");

        const auto start5 = Clock::now();
        const double ari = mean_cluster_ari(0.05, 20);
        report(5, ari >= 0.60, "mechanism clustering quality",
               "mean ARI = " + std::to_string(ari) + " over 20 trials, " +
                   std::to_string(seconds_since(start5)) + " s");

        const auto start6 = Clock::now();
        const double acc_low = direction_accuracy(0.01, 20);
        const double acc_high = direction_accuracy(0.1, 20);
        report(6, acc_low >= 0.85 && acc >= 0.85 && acc_high >= 0.85,
               "direction accuracy robust across noise levels",
               "accuracy = " + std::to_string(acc_low) + " / " + std::to_string(acc) + " / " +
                   std::to_string(acc_high) + " at sigma 0.01 / 0.05 / 0.1, " +
                   std::to_string(seconds_since(start6)) + " s");
    }

    criterion_kmeans_exact();
    criterion_ari();
    criterion_determinism();

    std::printf("%d of 9 criteria failed\n", g_failures);
    return g_failures;
}
