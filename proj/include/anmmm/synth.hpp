#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anmmm/kernels.hpp"

namespace anmmm {

enum class MechanismFamily { F1, F2, F3, F4 };

// f1 = 1 / (1.5 + theta x^2), f2 = 2 x^(theta - 0.25),
// f3 = exp(-theta x),         f4 = tanh(theta x)
double mechanism_eval(MechanismFamily family, double x, double theta);

MechanismFamily parse_family(const std::string& name);
const char* family_name(MechanismFamily family);

struct MechanismSpec {
    MechanismFamily family = MechanismFamily::F3;
    double theta_low = 1.0;
    double theta_high = 1.1;
    double weight = 0.5;  // mixing proportion
};

struct MixtureSpec {
    std::vector<MechanismSpec> mechanisms;
    double noise_std = 0.05;
    int n = 100;

    void validate() const;  // weights sum to 1, ranges ordered, n >= 1
};

struct LabeledDataset {
    Vector x;
    Vector y;
    std::vector<int> mechanism_labels;  // 1-based ground truth
    Vector theta_values;
};

// Draw a dataset: per observation a mechanism (round-robin exact counts for
// equal weights, multinomial otherwise), theta ~ U(low, high), x ~ U(0,1),
// y = f(x; theta) + N(0, sigma^2). Deterministic given (spec, seed).
LabeledDataset generate(const MixtureSpec& spec, std::uint64_t seed);

// The standard two-mechanism setup: theta1 ~ U(1, 1.1), theta2 ~ U(3, 3.1),
// equal mixing, with the first mechanism's proportion overridable.
MixtureSpec default_two_mechanism_spec(MechanismFamily family, int n, double noise_std,
                                       double first_weight = 0.5);

}  // namespace anmmm
