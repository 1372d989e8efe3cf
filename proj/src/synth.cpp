#include "anmmm/synth.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace anmmm {

double mechanism_eval(MechanismFamily family, double x, double theta) {
    switch (family) {
        case MechanismFamily::F1:
            return 1.0 / (1.5 + theta * x * x);
        case MechanismFamily::F2:
            if (x < 0.0) {
                throw std::domain_error("mechanism_eval: f2 needs x >= 0 (fractional power)");
            }
            return 2.0 * std::pow(x, theta - 0.25);
        case MechanismFamily::F3:
            return std::exp(-theta * x);
        case MechanismFamily::F4:
            return std::tanh(theta * x);
    }
    throw std::invalid_argument("mechanism_eval: unknown family");
}

MechanismFamily parse_family(const std::string& name) {
    if (name == "f1") return MechanismFamily::F1;
    if (name == "f2") return MechanismFamily::F2;
    if (name == "f3") return MechanismFamily::F3;
    if (name == "f4") return MechanismFamily::F4;
    throw std::invalid_argument("unknown mechanism family: " + name);
}

const char* family_name(MechanismFamily family) {
    switch (family) {
        case MechanismFamily::F1: return "f1";
        case MechanismFamily::F2: return "f2";
        case MechanismFamily::F3: return "f3";
        case MechanismFamily::F4: return "f4";
    }
    return "?";
}

void MixtureSpec::validate() const {
    if (mechanisms.empty()) {
        throw std::invalid_argument("MixtureSpec: need at least one mechanism");
    }
    if (n < 1) {
        throw std::invalid_argument("MixtureSpec: n must be positive");
    }
    if (noise_std < 0.0) {
        throw std::invalid_argument("MixtureSpec: noise_std must be nonnegative");
    }
    double total = 0.0;
    for (const auto& m : mechanisms) {
        if (!(m.theta_low <= m.theta_high)) {
            throw std::invalid_argument("MechanismSpec: theta_low must not exceed theta_high");
        }
        if (m.weight <= 0.0 || m.weight > 1.0) {
            throw std::invalid_argument("MechanismSpec: weight must be in (0, 1]");
        }
        total += m.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("MixtureSpec: weights must sum to 1");
    }
}

LabeledDataset generate(const MixtureSpec& spec, std::uint64_t seed) {
    spec.validate();
    const int c = static_cast<int>(spec.mechanisms.size());

    bool equal_weights = true;
    for (const auto& m : spec.mechanisms) {
        if (std::abs(m.weight - 1.0 / c) > 1e-12) {
            equal_weights = false;
            break;
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& m : spec.mechanisms) {
        acc += m.weight;
        cumulative.push_back(acc);
    }

    LabeledDataset ds;
    ds.x.resize(spec.n);
    ds.y.resize(spec.n);
    ds.theta_values.resize(spec.n);
    ds.mechanism_labels.resize(static_cast<std::size_t>(spec.n));

    for (int i = 0; i < spec.n; ++i) {
        int mech;
        if (equal_weights) {
            mech = i % c;  // exact-count allocation
        } else {
            const double u = unit(rng);
            mech = c - 1;
            for (int k = 0; k < c; ++k) {
                if (u < cumulative[static_cast<std::size_t>(k)]) {
                    mech = k;
                    break;
                }
            }
        }
        const auto& m = spec.mechanisms[static_cast<std::size_t>(mech)];
        const double theta = m.theta_low + (m.theta_high - m.theta_low) * unit(rng);
        const double x = unit(rng);
        const double noise = spec.noise_std > 0.0 ? spec.noise_std * gauss(rng) : 0.0;
        ds.x(i) = x;
        ds.y(i) = mechanism_eval(m.family, x, theta) + noise;
        ds.theta_values(i) = theta;
        ds.mechanism_labels[static_cast<std::size_t>(i)] = mech + 1;
    }
    return ds;
}

MixtureSpec default_two_mechanism_spec(MechanismFamily family, int n, double noise_std,
                                       double first_weight) {
    MixtureSpec spec;
    spec.n = n;
    spec.noise_std = noise_std;
    spec.mechanisms = {
        {family, 1.0, 1.1, first_weight},
        {family, 3.0, 3.1, 1.0 - first_weight},
    };
    return spec;
}

}  // namespace anmmm
