#include "otx/labeling.hpp"

#include <string>

#include "otx/kernels.hpp"

namespace otx {

PrototypeBank build_prototypes(const Matrix& features, const std::vector<int>& labels,
                               int num_classes) {
    if (labels.size() != features.rows()) {
        throw LengthMismatch("build_prototypes: label count differs from row count");
    }
    for (int y : labels) {
        if (y < 0 || y >= num_classes) {
            throw LabelOutOfRange("build_prototypes: label " + std::to_string(y) +
                                  " outside [0, " + std::to_string(num_classes) + ")");
        }
    }
    Matrix means(static_cast<std::size_t>(num_classes), features.cols());
    std::vector<long long> counts;
    kernels::class_mean(features, labels, num_classes, means, counts);
    return PrototypeBank(std::move(means), std::move(counts));
}

PrototypeBank build_prototypes(const EmbeddingSet& embeddings, const std::vector<int>& labels,
                               int num_classes) {
    return build_prototypes(embeddings.features(), labels, num_classes);
}

std::vector<int> pseudo_label(const TransportPlan& t) {
    const std::size_t n = t.plan.rows(), k = t.plan.cols();
    if (k == 0) throw ShapeMismatch("pseudo_label: plan has no columns");
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = t.plan.row(i);
        double best = row[0];
        int arg = 0;
        double sum = row[0];
        for (std::size_t j = 1; j < k; ++j) {
            sum += row[j];
            if (row[j] > best) {
                best = row[j];
                arg = static_cast<int>(j);
            }
        }
        if (sum <= 0.0) {
            throw UndefinedRow("pseudo_label: row " + std::to_string(i) + " of the plan is zero");
        }
        labels[i] = arg;
    }
    return labels;
}

Matrix soft_scores(const TransportPlan& t) {
    const std::size_t n = t.plan.rows(), k = t.plan.cols();
    Matrix scores(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = t.plan.row(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) sum += row[j];
        if (sum <= 0.0) {
            throw UndefinedRow("soft_scores: row " + std::to_string(i) + " of the plan is zero");
        }
        double inv = 1.0 / sum;
        for (std::size_t j = 0; j < k; ++j) scores(i, j) = row[j] * inv;
    }
    return scores;
}

CleanFilterResult filter_clean(const std::vector<int>& observed, const std::vector<int>& pseudo,
                               const std::vector<std::uint64_t>& ids) {
    if (observed.size() != pseudo.size() || observed.size() != ids.size()) {
        throw LengthMismatch("filter_clean: observed, pseudo and id lengths differ");
    }
    CleanFilterResult out;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (observed[i] != pseudo[i]) continue;
        out.kept_rows.push_back(i);
        out.kept_ids.push_back(ids[i]);
        out.kept_labels.push_back(observed[i]);
    }
    return out;
}

PrototypeBank calibrate_prototypes(const PrototypeBank& old_bank, const PrototypeBank& current,
                                   double alpha) {
    if (old_bank.num_classes() != current.num_classes() || old_bank.dim() != current.dim()) {
        throw ShapeMismatch("calibrate_prototypes: bank shapes differ");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw AlphaOutOfRange("calibrate_prototypes: alpha must lie in [0, 1]");
    }
    const std::size_t k = old_bank.prototypes().rows(), d = old_bank.dim();
    Matrix blended = old_bank.prototypes();
    std::vector<std::uint8_t> defined = old_bank.defined();
    for (std::size_t j = 0; j < k; ++j) {
        if (!current.is_defined(static_cast<int>(j))) continue;  // carry old row forward
        for (std::size_t t = 0; t < d; ++t) {
            blended(j, t) = alpha * old_bank.prototypes()(j, t) +
                            (1.0 - alpha) * current.prototypes()(j, t);
        }
        defined[j] = 1;
    }
    return PrototypeBank(std::move(blended), old_bank.support(), std::move(defined));
}

}  // namespace otx
