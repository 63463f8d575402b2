#include "otx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace otx {

ImbalanceResult imbalance_factor(const std::vector<long long>& per_class_counts) {
    ImbalanceResult out;
    long long max_count = 0, min_count = 0;
    bool any = false;
    for (std::size_t j = 0; j < per_class_counts.size(); ++j) {
        long long c = per_class_counts[j];
        if (c == 0) {
            out.excluded_classes.push_back(static_cast<int>(j));
            continue;
        }
        if (!any) {
            max_count = min_count = c;
            any = true;
        } else {
            max_count = std::max(max_count, c);
            min_count = std::min(min_count, c);
        }
    }
    if (!any) {
        throw AllEmpty("imbalance_factor: every class count is zero");
    }
    out.value = static_cast<double>(max_count) / static_cast<double>(min_count);
    return out;
}

double noise_ratio(const std::vector<int>& kept_labels, const std::vector<int>& kept_truth) {
    if (kept_labels.size() != kept_truth.size()) {
        throw MissingTruth("noise_ratio: truth not available for every kept sample");
    }
    if (kept_labels.empty()) return 0.0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < kept_labels.size(); ++i) {
        if (kept_labels[i] != kept_truth[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(kept_labels.size());
}

namespace {

// One-vs-rest ranking AUC from a score column, average ranks on ties.
double rank_auc(const std::vector<double>& scores, const std::vector<char>& positive,
                std::size_t num_pos) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t t = i; t < j; ++t) {
            if (positive[order[t]]) pos_rank_sum += avg_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(num_pos);
    const double neg = static_cast<double>(n - num_pos);
    return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * neg);
}

}  // namespace

PseudoQuality pseudo_label_quality(const std::vector<int>& pseudo, const Matrix& scores,
                                   const std::vector<int>& truth) {
    const std::size_t n = pseudo.size();
    if (truth.size() != n) {
        throw MissingTruth("pseudo_label_quality: truth not available for every sample");
    }
    if (scores.rows() != n) {
        throw ShapeMismatch("pseudo_label_quality: score rows differ from sample count");
    }
    const std::size_t k = scores.cols();

    PseudoQuality out;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pseudo[i] == truth[i]) ++hits;
    }
    out.accuracy = static_cast<double>(hits) / static_cast<double>(n);

    std::vector<long long> truth_count(k, 0), pred_count(k, 0), tp(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++truth_count[static_cast<std::size_t>(truth[i])];
        ++pred_count[static_cast<std::size_t>(pseudo[i])];
        if (truth[i] == pseudo[i]) ++tp[static_cast<std::size_t>(truth[i])];
    }

    double precision_sum = 0.0, recall_sum = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < k; ++c) {
        if (truth_count[c] == 0) continue;
        ++present;
        precision_sum += pred_count[c] > 0
                             ? static_cast<double>(tp[c]) / static_cast<double>(pred_count[c])
                             : 0.0;
        recall_sum += static_cast<double>(tp[c]) / static_cast<double>(truth_count[c]);
    }
    if (present == 0) {
        throw MissingTruth("pseudo_label_quality: no class present in truth");
    }
    out.precision = precision_sum / static_cast<double>(present);
    out.recall = recall_sum / static_cast<double>(present);

    double auc_sum = 0.0;
    std::size_t auc_classes = 0;
    std::vector<double> col(n);
    std::vector<char> positive(n);
    for (std::size_t c = 0; c < k; ++c) {
        if (truth_count[c] == 0) continue;
        if (static_cast<std::size_t>(truth_count[c]) == n) {
            out.degenerate_classes.push_back(static_cast<int>(c));
            continue;  // no negatives, the ranking AUC is undefined
        }
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = scores(i, c);
            positive[i] = truth[i] == static_cast<int>(c) ? 1 : 0;
        }
        auc_sum += rank_auc(col, positive, static_cast<std::size_t>(truth_count[c]));
        ++auc_classes;
    }
    if (auc_classes > 0) {
        out.macro_auc = auc_sum / static_cast<double>(auc_classes);
    }
    return out;
}

ShotGroups shot_groups_from_counts(const std::vector<long long>& counts,
                                   const ShotThresholds& thresholds) {
    ShotGroups groups;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] > thresholds.many_above) {
            groups.many.push_back(static_cast<int>(j));
        } else if (counts[j] < thresholds.few_below) {
            groups.few.push_back(static_cast<int>(j));
        } else {
            groups.medium.push_back(static_cast<int>(j));
        }
    }
    return groups;
}

ShotReport shot_partition_report(const std::vector<double>& per_class_values,
                                 const ShotGroups& groups) {
    auto mean_of = [&](const std::vector<int>& idx) -> std::optional<double> {
        if (idx.empty()) return std::nullopt;
        double s = 0.0;
        for (int j : idx) s += per_class_values[static_cast<std::size_t>(j)];
        return s / static_cast<double>(idx.size());
    };
    ShotReport report;
    report.many = mean_of(groups.many);
    report.medium = mean_of(groups.medium);
    report.few = mean_of(groups.few);
    if (!report.many) report.empty_groups.push_back("many");
    if (!report.medium) report.empty_groups.push_back("medium");
    if (!report.few) report.empty_groups.push_back("few");
    return report;
}

ShotReport shot_partition_report(const std::vector<double>& per_class_values,
                                 const std::vector<long long>& counts,
                                 const ShotThresholds& thresholds) {
    if (per_class_values.size() != counts.size()) {
        throw LengthMismatch("shot_partition_report: values and counts differ in length");
    }
    return shot_partition_report(per_class_values, shot_groups_from_counts(counts, thresholds));
}

std::vector<long long> class_counts(const std::vector<int>& labels, int num_classes) {
    std::vector<long long> counts(static_cast<std::size_t>(num_classes), 0);
    for (int y : labels) {
        if (y < 0 || y >= num_classes) {
            throw LabelOutOfRange("class_counts: label outside [0, K)");
        }
        ++counts[static_cast<std::size_t>(y)];
    }
    return counts;
}

}  // namespace otx
