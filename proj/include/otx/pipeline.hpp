#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "otx/classifier.hpp"
#include "otx/cost.hpp"
#include "otx/datamodel.hpp"
#include "otx/ot.hpp"

namespace otx {

struct PipelineConfig {
    int epochs = 100;
    int batch_size = 128;
    double alpha = 0.9;   // prototype EMA
    double beta = 0.95;   // effective-number smoothing
    double icf_r = 1.0;   // inverse-frequency exponent
    WeightScheme weighting = WeightScheme::kEffectiveNumber;
    CostMetric cost = CostMetric::kCosine;
    bool update_counts_from_subset = true;
    std::uint64_t rng_seed = 0;
    SinkhornConfig sinkhorn;
    TrainConfig classifier;
};

struct EpochReport {
    int epoch = 0;
    std::size_t subset_size = 0;
    std::optional<double> imbalance_factor;  // of the kept subset
    std::optional<double> noise_ratio;       // needs ground truth
    std::vector<long long> per_class_counts;
    std::optional<double> precision;   // pseudo-label quality over the full set
    std::optional<double> recall;
    std::optional<double> accuracy;
    std::optional<double> macro_auc;
    std::optional<double> test_accuracy;
    double prototype_drift = 0.0;      // max over classes of the max-norm change

    bool operator==(const EpochReport&) const = default;
};

struct EpochOutput {
    ExtractionResult subset;
    EpochReport report;
    PrototypeBank prototypes;  // calibrated, support counts per update policy
    Matrix soft;               // full n x K row-stochastic scores
};

/// One pass of mini-batch OT labeling, agreement filtering, prototype
/// calibration and support-count refresh. Batch shuffling derives from
/// cfg.rng_seed and the epoch index, so a single epoch is reproducible in
/// isolation. Class weights are fixed for the whole epoch from the bank's
/// support counts.
EpochOutput run_epoch(const EmbeddingSet& train, const LabelTable& labels,
                      const PrototypeBank& prototypes, const PipelineConfig& cfg, int epoch);

struct PipelineResult {
    std::vector<EpochReport> reports;
    ExtractionResult final_subset;
    std::optional<LinearModel> model;  // absent if the final subset was empty
};

/// Full training loop: prototypes initialized from the observed labels,
/// then per epoch an extraction pass, a classifier retrained on the
/// epoch's subset, and an EMA prototype calibration.
PipelineResult run_pipeline(const EmbeddingSet& train, const LabelTable& labels,
                            const EmbeddingSet* test, const LabelTable* test_labels,
                            const PipelineConfig& cfg);

}  // namespace otx
