#include "otx/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "otx/labeling.hpp"
#include "otx/metrics.hpp"
#include "otx/rng.hpp"
#include "otx/weighting.hpp"

namespace otx {

namespace {

// Candidate classes: defined prototypes only. Classes absent from the
// observed labels never get a defined prototype, so they stay out of Q
// and out of the pseudo-label range for every epoch.
std::vector<int> candidate_classes(const PrototypeBank& bank) {
    std::vector<int> classes;
    for (int j = 0; j < bank.num_classes(); ++j) {
        if (bank.is_defined(j)) classes.push_back(j);
    }
    if (classes.empty()) {
        throw EmptyClass("pipeline: no defined prototypes");
    }
    return classes;
}

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), src.cols());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const double* from = src.row(rows[t]);
        double* to = out.row(t);
        for (std::size_t c = 0; c < src.cols(); ++c) to[c] = from[c];
    }
    return out;
}

Matrix gather_class_rows(const Matrix& protos, const std::vector<int>& classes) {
    Matrix out(classes.size(), protos.cols());
    for (std::size_t t = 0; t < classes.size(); ++t) {
        const double* from = protos.row(static_cast<std::size_t>(classes[t]));
        double* to = out.row(t);
        for (std::size_t c = 0; c < protos.cols(); ++c) to[c] = from[c];
    }
    return out;
}

ClassWeights epoch_weights(const PrototypeBank& bank, const std::vector<int>& classes,
                           const PipelineConfig& cfg) {
    std::vector<long long> support(classes.size());
    for (std::size_t t = 0; t < classes.size(); ++t) {
        support[t] = bank.support()[static_cast<std::size_t>(classes[t])];
    }
    switch (cfg.weighting) {
        case WeightScheme::kUniform:
            return uniform_weights(static_cast<int>(classes.size()));
        case WeightScheme::kEffectiveNumber:
            return effective_number_weights(support, cfg.beta);
        case WeightScheme::kInverseFrequency:
            return inverse_frequency_weights(support, cfg.icf_r);
    }
    throw Error("pipeline: unknown weighting scheme");
}

double max_abs_row_diff(const Matrix& a, const Matrix& b, std::size_t row) {
    double worst = 0.0;
    const double* pa = a.row(row);
    const double* pb = b.row(row);
    for (std::size_t t = 0; t < a.cols(); ++t) {
        worst = std::max(worst, std::abs(pa[t] - pb[t]));
    }
    return worst;
}

}  // namespace

EpochOutput run_epoch(const EmbeddingSet& train, const LabelTable& labels,
                      const PrototypeBank& prototypes, const PipelineConfig& cfg, int epoch) {
    validate_dataset(train, labels);
    if (cfg.batch_size < 1 || cfg.epochs < 1) {
        throw Error("pipeline: batch_size and epochs must be >= 1");
    }
    const std::size_t n = train.size();
    const int k = labels.num_classes();
    if (prototypes.num_classes() != k) {
        throw ShapeMismatch("pipeline: prototype bank does not match the class count");
    }

    const std::vector<int> candidates = candidate_classes(prototypes);
    const Matrix cand_protos = gather_class_rows(prototypes.prototypes(), candidates);
    // Weights come from the epoch-start support counts, not per-batch counts.
    const ClassWeights weights = epoch_weights(prototypes, candidates, cfg);

    // Seeded shuffle; every sample lands in exactly one batch.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(cfg.rng_seed, 3000017ULL + static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<int> pseudo(n, -1);
    Matrix soft(n, static_cast<std::size_t>(k), 0.0);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
        std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                       order.begin() + static_cast<std::ptrdiff_t>(stop));
        Matrix xb = gather_rows(train.features(), batch);
        Matrix cost = cost_matrix(cfg.cost, xb, cand_protos);
        // Uniform row mass over the actual batch size; short final batches
        // keep 1/B' rather than being padded.
        std::vector<double> a(batch.size(), 1.0 / static_cast<double>(batch.size()));
        TransportPlan plan = sinkhorn(cost, a, weights, cfg.sinkhorn);
        std::vector<int> batch_pseudo = pseudo_label(plan);
        Matrix batch_soft = soft_scores(plan);
        for (std::size_t t = 0; t < batch.size(); ++t) {
            const std::size_t row = batch[t];
            pseudo[row] = candidates[static_cast<std::size_t>(batch_pseudo[t])];
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                soft(row, static_cast<std::size_t>(candidates[c])) = batch_soft(t, c);
            }
        }
    }

    CleanFilterResult kept = filter_clean(labels.observed(), pseudo, train.ids());

    EpochOutput out{ExtractionResult{}, EpochReport{}, prototypes, std::move(soft)};
    out.subset.kept_ids = std::move(kept.kept_ids);
    out.subset.kept_rows = std::move(kept.kept_rows);
    out.subset.pseudo_labels = std::move(pseudo);
    out.subset.kept_labels = std::move(kept.kept_labels);
    out.subset.epoch = epoch;
    out.subset.stats.per_class_counts = class_counts(out.subset.kept_labels, k);

    out.report.epoch = epoch;
    out.report.subset_size = out.subset.kept_rows.size();
    out.report.per_class_counts = out.subset.stats.per_class_counts;
    if (!out.subset.kept_rows.empty()) {
        out.report.imbalance_factor = imbalance_factor(out.report.per_class_counts).value;
        out.subset.stats.imbalance_factor = out.report.imbalance_factor;
    }
    if (labels.has_truth()) {
        std::vector<int> kept_truth(out.subset.kept_rows.size());
        for (std::size_t t = 0; t < out.subset.kept_rows.size(); ++t) {
            kept_truth[t] = labels.truth()[out.subset.kept_rows[t]];
        }
        out.report.noise_ratio = noise_ratio(out.subset.kept_labels, kept_truth);
        out.subset.stats.noise_ratio = out.report.noise_ratio;
        // Pseudo-label quality is scored on the extracted subset: the kept
        // labels against ground truth, with the kept rows' soft scores.
        if (!out.subset.kept_rows.empty()) {
            Matrix kept_soft(out.subset.kept_rows.size(), static_cast<std::size_t>(k));
            for (std::size_t t = 0; t < out.subset.kept_rows.size(); ++t) {
                const double* src = out.soft.row(out.subset.kept_rows[t]);
                double* dst = kept_soft.row(t);
                for (int c = 0; c < k; ++c) dst[static_cast<std::size_t>(c)] = src[c];
            }
            PseudoQuality q = pseudo_label_quality(out.subset.kept_labels, kept_soft, kept_truth);
            out.report.precision = q.precision;
            out.report.recall = q.recall;
            out.report.accuracy = q.accuracy;
            out.report.macro_auc = q.macro_auc;
        }
    }

    // Calibration once per epoch from the accumulated subset; an empty
    // subset leaves the prototypes untouched.
    if (!out.subset.kept_rows.empty()) {
        Matrix kept_features = gather_rows(train.features(), out.subset.kept_rows);
        PrototypeBank current = build_prototypes(kept_features, out.subset.kept_labels, k);
        PrototypeBank calibrated = calibrate_prototypes(prototypes, current, cfg.alpha);
        std::vector<long long> support = prototypes.support();
        if (cfg.update_counts_from_subset) {
            for (int j = 0; j < k; ++j) {
                long long fresh = out.report.per_class_counts[static_cast<std::size_t>(j)];
                // Classes absent from the subset keep their previous counts;
                // a zero would poison the weight formulas.
                if (fresh > 0) support[static_cast<std::size_t>(j)] = fresh;
            }
        }
        out.prototypes = calibrated.with_support(std::move(support));
    }

    double drift = 0.0;
    for (int j = 0; j < k; ++j) {
        drift = std::max(drift, max_abs_row_diff(out.prototypes.prototypes(),
                                                 prototypes.prototypes(),
                                                 static_cast<std::size_t>(j)));
    }
    out.report.prototype_drift = drift;
    return out;
}

PipelineResult run_pipeline(const EmbeddingSet& train, const LabelTable& labels,
                            const EmbeddingSet* test, const LabelTable* test_labels,
                            const PipelineConfig& cfg) {
    validate_dataset(train, labels);
    if (test != nullptr && test_labels != nullptr) {
        validate_dataset(*test, *test_labels);
        if (static_cast<std::size_t>(test->dim()) != train.dim()) {
            throw DimensionMismatch("pipeline: test feature dimension differs from train");
        }
    }

    PrototypeBank bank = build_prototypes(train, labels.observed(), labels.num_classes());

    PipelineResult result;
    result.reports.reserve(static_cast<std::size_t>(cfg.epochs));
    ExtractionResult last_subset;
    std::optional<LinearModel> model;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        EpochOutput out = run_epoch(train, labels, bank, cfg, epoch);
        bank = std::move(out.prototypes);
        if (!out.subset.kept_rows.empty()) {
            model = train_softmax(out.subset, train, labels.num_classes(), cfg.classifier);
            if (test != nullptr && test_labels != nullptr) {
                out.report.test_accuracy =
                    accuracy(predict(*model, test->features()), test_labels->observed());
            }
        }
        result.reports.push_back(out.report);
        last_subset = std::move(out.subset);
    }
    result.final_subset = std::move(last_subset);
    result.model = std::move(model);
    return result;
}

}  // namespace otx
