#include "otx/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "otx/rng.hpp"

namespace otx {

namespace {

void check_eta(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw EtaOutOfRange("noise injection: eta must lie in [0, 1]");
    }
}

// Orthonormal class directions from a seeded Gram-Schmidt pass over
// standard normal draws. Requires d >= K.
Matrix orthonormal_directions(int num_classes, int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix dirs(static_cast<std::size_t>(num_classes), static_cast<std::size_t>(dim));
    for (int j = 0; j < num_classes; ++j) {
        double* row = dirs.row(static_cast<std::size_t>(j));
        while (true) {
            for (int t = 0; t < dim; ++t) row[t] = normal(rng);
            for (int p = 0; p < j; ++p) {
                const double* prev = dirs.row(static_cast<std::size_t>(p));
                double dot = 0.0;
                for (int t = 0; t < dim; ++t) dot += row[t] * prev[t];
                for (int t = 0; t < dim; ++t) row[t] -= dot * prev[t];
            }
            double norm = 0.0;
            for (int t = 0; t < dim; ++t) norm += row[t] * row[t];
            norm = std::sqrt(norm);
            if (norm > 1e-6) {  // retry the astronomically unlikely collapse
                for (int t = 0; t < dim; ++t) row[t] /= norm;
                break;
            }
        }
    }
    return dirs;
}

}  // namespace

std::vector<long long> longtail_counts(int num_classes, long long head_count,
                                       double imbalance_factor) {
    if (num_classes < 1 || head_count < 1) {
        throw DimensionMismatch("longtail_counts: need at least one class and one sample");
    }
    if (!(imbalance_factor >= 1.0)) {
        throw DimensionMismatch("longtail_counts: imbalance factor must be >= 1");
    }
    std::vector<long long> counts(static_cast<std::size_t>(num_classes));
    counts[0] = head_count;
    for (int k = 1; k < num_classes; ++k) {
        double exact = static_cast<double>(head_count) *
                       std::pow(imbalance_factor,
                                -static_cast<double>(k) / static_cast<double>(num_classes - 1));
        // nearbyint rounds half to even under the default FP environment
        long long rounded = static_cast<long long>(std::nearbyint(exact));
        counts[static_cast<std::size_t>(k)] = std::max<long long>(1, rounded);
    }
    return counts;
}

SimulatedData sample_gaussian_mixture(const SimSpec& spec) {
    if (spec.dim < spec.num_classes) {
        throw DimensionTooSmall("sample_gaussian_mixture: need dim >= num_classes to place "
                                "orthogonal class means");
    }
    if (spec.num_classes < 1 || spec.test_per_class < 1) {
        throw DimensionMismatch("sample_gaussian_mixture: counts must be positive");
    }
    const int k = spec.num_classes, d = spec.dim;
    std::vector<long long> counts =
        k == 1 ? std::vector<long long>{spec.head_count}
               : longtail_counts(k, spec.head_count, spec.imbalance_factor);

    auto rng = make_rng(spec.rng_seed, 0);
    Matrix dirs = orthonormal_directions(k, d, rng);
    // Orthonormal directions at this scale sit cluster_separation * std
    // apart pairwise.
    const double scale = spec.cluster_separation * spec.within_class_std / std::sqrt(2.0);
    Matrix means(static_cast<std::size_t>(k), static_cast<std::size_t>(d));
    for (int j = 0; j < k; ++j) {
        for (int t = 0; t < d; ++t) {
            means(static_cast<std::size_t>(j), static_cast<std::size_t>(t)) =
                scale * dirs(static_cast<std::size_t>(j), static_cast<std::size_t>(t));
        }
    }

    std::normal_distribution<double> noise(0.0, spec.within_class_std);
    auto draw_class_rows = [&](int cls, long long rows, Matrix& out, std::size_t offset,
                               std::mt19937_64& gen) {
        for (long long r = 0; r < rows; ++r) {
            double* row = out.row(offset + static_cast<std::size_t>(r));
            const double* mu = means.row(static_cast<std::size_t>(cls));
            for (int t = 0; t < d; ++t) row[t] = mu[t] + noise(gen);
        }
    };

    long long total_train = std::accumulate(counts.begin(), counts.end(), 0LL);
    Matrix train(static_cast<std::size_t>(total_train), static_cast<std::size_t>(d));
    std::vector<int> train_truth(static_cast<std::size_t>(total_train));
    std::size_t offset = 0;
    for (int j = 0; j < k; ++j) {
        auto class_rng = make_rng(spec.rng_seed, 1 + static_cast<std::uint64_t>(j));
        draw_class_rows(j, counts[static_cast<std::size_t>(j)], train, offset, class_rng);
        std::fill_n(train_truth.begin() + static_cast<std::ptrdiff_t>(offset),
                    counts[static_cast<std::size_t>(j)], j);
        offset += static_cast<std::size_t>(counts[static_cast<std::size_t>(j)]);
    }

    long long total_test = static_cast<long long>(k) * spec.test_per_class;
    Matrix test(static_cast<std::size_t>(total_test), static_cast<std::size_t>(d));
    std::vector<int> test_truth(static_cast<std::size_t>(total_test));
    offset = 0;
    for (int j = 0; j < k; ++j) {
        auto class_rng = make_rng(spec.rng_seed, 1000003 + static_cast<std::uint64_t>(j));
        draw_class_rows(j, spec.test_per_class, test, offset, class_rng);
        std::fill_n(test_truth.begin() + static_cast<std::ptrdiff_t>(offset),
                    spec.test_per_class, j);
        offset += static_cast<std::size_t>(spec.test_per_class);
    }

    std::vector<std::uint64_t> train_ids(static_cast<std::size_t>(total_train));
    std::iota(train_ids.begin(), train_ids.end(), 0);
    std::vector<std::uint64_t> test_ids(static_cast<std::size_t>(total_test));
    std::iota(test_ids.begin(), test_ids.end(), 0);

    return SimulatedData{
        EmbeddingSet(std::move(train_ids), std::move(train)),
        LabelTable(train_truth, train_truth, k),
        EmbeddingSet(std::move(test_ids), std::move(test)),
        LabelTable(test_truth, test_truth, k),
    };
}

std::vector<int> inject_joint_noise(const std::vector<int>& truth,
                                    const std::vector<long long>& counts, double eta,
                                    std::uint64_t seed) {
    check_eta(eta);
    long long total = std::accumulate(counts.begin(), counts.end(), 0LL);
    for (int y : truth) {
        if (y < 0 || static_cast<std::size_t>(y) >= counts.size()) {
            throw LabelOutOfRange("inject_joint_noise: label outside the count table");
        }
    }
    auto rng = make_rng(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<int> observed(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        int y = truth[i];
        if (unit(rng) >= eta) {
            observed[i] = y;
            continue;
        }
        // Flip target drawn proportional to class size over j != y.
        double denom = static_cast<double>(total - counts[static_cast<std::size_t>(y)]);
        double u = unit(rng) * denom;
        double acc = 0.0;
        int pick = -1;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            if (static_cast<int>(j) == y) continue;
            acc += static_cast<double>(counts[j]);
            if (u < acc) {
                pick = static_cast<int>(j);
                break;
            }
        }
        if (pick < 0) {  // u == denom edge, take the last eligible class
            for (std::size_t j = counts.size(); j-- > 0;) {
                if (static_cast<int>(j) != y) {
                    pick = static_cast<int>(j);
                    break;
                }
            }
        }
        observed[i] = pick;
    }
    return observed;
}

std::vector<int> inject_symmetric_noise(const std::vector<int>& truth, int num_classes,
                                        double eta, std::uint64_t seed) {
    check_eta(eta);
    if (num_classes < 2) {
        throw DimensionMismatch("inject_symmetric_noise: need at least two classes");
    }
    auto rng = make_rng(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> other(0, num_classes - 2);
    std::vector<int> observed(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        int y = truth[i];
        if (unit(rng) >= eta) {
            observed[i] = y;
            continue;
        }
        int pick = other(rng);
        observed[i] = pick >= y ? pick + 1 : pick;
    }
    return observed;
}

std::vector<int> inject_asymmetric_noise(const std::vector<int>& truth, double eta,
                                         std::optional<int> target_class, std::uint64_t seed) {
    check_eta(eta);
    int max_label = 0;
    for (int y : truth) max_label = std::max(max_label, y);
    int target;
    if (target_class.has_value()) {
        target = *target_class;
        if (target < 0) throw LabelOutOfRange("inject_asymmetric_noise: negative target class");
    } else {
        std::vector<long long> counts(static_cast<std::size_t>(max_label) + 1, 0);
        for (int y : truth) ++counts[static_cast<std::size_t>(y)];
        target = 0;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            if (counts[j] <= counts[static_cast<std::size_t>(target)]) {
                target = static_cast<int>(j);
            }
        }
    }
    auto rng = make_rng(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<int> observed(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == target) {
            observed[i] = truth[i];
            continue;
        }
        observed[i] = unit(rng) < eta ? target : truth[i];
    }
    return observed;
}

SimulatedData simulate(const SimSpec& spec) {
    SimulatedData data = sample_gaussian_mixture(spec);
    std::vector<int> truth = data.train_labels.truth();
    std::vector<int> observed;
    std::uint64_t noise_seed = mix_seed(spec.rng_seed, 2000003);
    switch (spec.noise_model) {
        case NoiseModel::kJoint: {
            std::vector<long long> counts(static_cast<std::size_t>(spec.num_classes), 0);
            for (int y : truth) ++counts[static_cast<std::size_t>(y)];
            observed = inject_joint_noise(truth, counts, spec.eta, noise_seed);
            break;
        }
        case NoiseModel::kSymmetric:
            observed = inject_symmetric_noise(truth, spec.num_classes, spec.eta, noise_seed);
            break;
        case NoiseModel::kAsymmetric:
            observed = inject_asymmetric_noise(truth, spec.eta, spec.asym_target, noise_seed);
            break;
    }
    data.train_labels = LabelTable(std::move(observed), truth, spec.num_classes);
    return data;
}

}  // namespace otx
