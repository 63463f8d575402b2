#include "otx/weighting.hpp"

#include <cmath>
#include <string>

namespace otx {

namespace {

// Collects the classes that take part in the weighting. Zero-support
// classes are excluded unless flagged defined, which is a caller bug.
struct Included {
    std::vector<int> classes;
    std::vector<int> excluded;
};

Included split_classes(const std::vector<long long>& support,
                       const std::vector<std::uint8_t>* defined) {
    Included inc;
    for (std::size_t j = 0; j < support.size(); ++j) {
        bool live = defined ? (*defined)[j] != 0 : support[j] > 0;
        if (!live) {
            inc.excluded.push_back(static_cast<int>(j));
            continue;
        }
        if (support[j] <= 0) {
            throw EmptyClass("weighting: defined class " + std::to_string(j) +
                             " has zero support");
        }
        inc.classes.push_back(static_cast<int>(j));
    }
    if (inc.classes.empty()) {
        throw EmptyClass("weighting: no class with positive support");
    }
    return inc;
}

ClassWeights normalize(std::vector<double> raw, Included inc, WeightScheme scheme,
                       double param) {
    double sum = 0.0;
    for (double v : raw) sum += v;
    for (double& v : raw) v /= sum;
    ClassWeights w;
    w.weights = std::move(raw);
    w.classes = std::move(inc.classes);
    w.excluded = std::move(inc.excluded);
    w.scheme = scheme;
    w.param = param;
    return w;
}

}  // namespace

ClassWeights effective_number_weights(const std::vector<long long>& support, double beta,
                                      const std::vector<std::uint8_t>* defined) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw BetaOutOfRange("effective_number_weights: beta must lie in [0, 1)");
    }
    Included inc = split_classes(support, defined);
    std::vector<double> raw(inc.classes.size());
    if (beta == 0.0) {
        // (1-beta)/(1-beta^N) is exactly 1 for every class.
        for (double& v : raw) v = 1.0;
        return normalize(std::move(raw), std::move(inc), WeightScheme::kEffectiveNumber, beta);
    }
    // 1 - beta^N evaluated as -expm1(N * log(beta)); log1p keeps precision
    // when beta is within one ulp of 1. Underflow of beta^N to 0 leaves the
    // limit value 1 - beta, which is fine.
    const double log_beta = std::log1p(beta - 1.0);
    const double one_minus_beta = 1.0 - beta;
    for (std::size_t t = 0; t < inc.classes.size(); ++t) {
        double n = static_cast<double>(support[static_cast<std::size_t>(inc.classes[t])]);
        double denom = -std::expm1(n * log_beta);
        raw[t] = one_minus_beta / denom;
    }
    return normalize(std::move(raw), std::move(inc), WeightScheme::kEffectiveNumber, beta);
}

ClassWeights inverse_frequency_weights(const std::vector<long long>& support, double r,
                                       const std::vector<std::uint8_t>* defined) {
    if (!(r > 0.0)) {
        throw NonPositiveExponent("inverse_frequency_weights: r must be positive");
    }
    Included inc = split_classes(support, defined);
    std::vector<double> raw(inc.classes.size());
    for (std::size_t t = 0; t < inc.classes.size(); ++t) {
        double n = static_cast<double>(support[static_cast<std::size_t>(inc.classes[t])]);
        raw[t] = std::pow(n, -r);
    }
    return normalize(std::move(raw), std::move(inc), WeightScheme::kInverseFrequency, r);
}

ClassWeights uniform_weights(int num_classes) {
    if (num_classes < 1) {
        throw EmptyClass("uniform_weights: need at least one class");
    }
    ClassWeights w;
    w.weights.assign(static_cast<std::size_t>(num_classes),
                     1.0 / static_cast<double>(num_classes));
    w.classes.resize(static_cast<std::size_t>(num_classes));
    for (int j = 0; j < num_classes; ++j) w.classes[static_cast<std::size_t>(j)] = j;
    w.scheme = WeightScheme::kUniform;
    return w;
}

}  // namespace otx
