#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "otx/datamodel.hpp"

namespace otx {

enum class NoiseModel { kJoint, kSymmetric, kAsymmetric };

struct SimSpec {
    int num_classes = 10;
    int dim = 32;
    long long head_count = 500;
    double imbalance_factor = 100.0;
    double cluster_separation = 10.0;  // multiplier on the within-class std
    double within_class_std = 1.0;
    NoiseModel noise_model = NoiseModel::kJoint;
    double eta = 0.5;
    std::optional<int> asym_target;  // defaults to the smallest class
    int test_per_class = 50;
    std::uint64_t rng_seed = 0;
};

/// Exponential long-tail profile N_k = round(N1 * IF^(-k/(K-1))),
/// round-half-to-even, floored at one sample per class.
std::vector<long long> longtail_counts(int num_classes, long long head_count,
                                       double imbalance_factor);

struct SimulatedData {
    EmbeddingSet train;
    LabelTable train_labels;  // observed plus ground truth
    EmbeddingSet test;
    LabelTable test_labels;   // clean balanced hold-out
};

/// Isotropic Gaussian clusters around orthogonal mean directions scaled so
/// pairwise mean distance equals cluster_separation * within_class_std.
/// Train counts follow longtail_counts; the test set is balanced. Observed
/// labels equal truth; noise injection is a separate step.
SimulatedData sample_gaussian_mixture(const SimSpec& spec);

/// Keeps a label with probability 1 - eta, otherwise flips to class j != i
/// with probability proportional to N_j.
std::vector<int> inject_joint_noise(const std::vector<int>& truth,
                                    const std::vector<long long>& counts, double eta,
                                    std::uint64_t seed);

/// With probability eta replaces a label by a uniform draw over the other
/// K - 1 classes.
std::vector<int> inject_symmetric_noise(const std::vector<int>& truth, int num_classes,
                                        double eta, std::uint64_t seed);

/// Flips every non-target sample to the target class with probability eta;
/// target samples are never touched. Default target is the class with the
/// fewest samples (ties resolve to the highest index, the tail position).
std::vector<int> inject_asymmetric_noise(const std::vector<int>& truth, double eta,
                                         std::optional<int> target_class, std::uint64_t seed);

/// Full generation pass: mixture plus the configured noise model.
SimulatedData simulate(const SimSpec& spec);

}  // namespace otx
