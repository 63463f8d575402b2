#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otx/datamodel.hpp"

namespace otx {

struct ImbalanceResult {
    double value = 1.0;                 // max count / min count over nonzero classes
    std::vector<int> excluded_classes;  // zero-count classes left out of the ratio
};

ImbalanceResult imbalance_factor(const std::vector<long long>& per_class_counts);

/// Fraction of kept samples whose retained label differs from the truth.
/// Empty subsets report 0 by convention; the caller sees the size anyway.
double noise_ratio(const std::vector<int>& kept_labels, const std::vector<int>& kept_truth);

struct PseudoQuality {
    double precision = 0.0;  // macro one-vs-rest over classes present in truth
    double recall = 0.0;
    double accuracy = 0.0;
    std::optional<double> macro_auc;     // absent when every class is degenerate
    std::vector<int> degenerate_classes; // no positives or no negatives, skipped in the AUC
};

/// Quality of pseudo-labels against ground truth. `scores` must be
/// row-stochastic with one column per class; ranking ties contribute 1/2
/// to the AUC.
PseudoQuality pseudo_label_quality(const std::vector<int>& pseudo, const Matrix& scores,
                                   const std::vector<int>& truth);

struct ShotThresholds {
    long long many_above = 100;  // many: count > many_above
    long long few_below = 20;    // few:  count < few_below
};

struct ShotGroups {
    std::vector<int> many;
    std::vector<int> medium;
    std::vector<int> few;
};

struct ShotReport {
    std::optional<double> many;
    std::optional<double> medium;
    std::optional<double> few;
    std::vector<std::string> empty_groups;
};

ShotGroups shot_groups_from_counts(const std::vector<long long>& counts,
                                   const ShotThresholds& thresholds);

/// Mean of the per-class values inside each shot group. Empty groups are
/// omitted and reported by name.
ShotReport shot_partition_report(const std::vector<double>& per_class_values,
                                 const std::vector<long long>& counts,
                                 const ShotThresholds& thresholds);
ShotReport shot_partition_report(const std::vector<double>& per_class_values,
                                 const ShotGroups& groups);

/// Per-class occurrence counts of `labels` over K classes.
std::vector<long long> class_counts(const std::vector<int>& labels, int num_classes);

}  // namespace otx
