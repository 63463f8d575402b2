#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "otx/pipeline.hpp"
#include "otx/labeling.hpp"
#include "otx/simkit.hpp"

using namespace otx;

namespace {

SimulatedData clustered_data(double eta, std::uint64_t seed, int classes = 5,
                             double imbalance = 10.0) {
    SimSpec spec;
    spec.num_classes = classes;
    spec.dim = 12;
    spec.head_count = 120;
    spec.imbalance_factor = imbalance;
    spec.cluster_separation = 10.0;
    spec.eta = eta;
    spec.test_per_class = 30;
    spec.rng_seed = seed;
    return simulate(spec);
}

PipelineConfig fast_config() {
    PipelineConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 64;
    cfg.classifier.epochs = 60;
    return cfg;
}

}  // namespace

TEST_CASE("noiseless balanced clustered data keeps everything at any beta") {
    // balanced counts make the effective-number weights uniform, and a
    // whole-set batch makes the batch composition match the column
    // marginal exactly, so no sample gets relabeled at any beta
    SimulatedData data = clustered_data(0.0, 11, 5, 1.0);
    for (double beta : {0.0, 0.5, 0.98}) {
        PipelineConfig cfg = fast_config();
        cfg.epochs = 1;
        cfg.beta = beta;
        cfg.batch_size = static_cast<int>(data.train.size());
        PipelineResult result =
            run_pipeline(data.train, data.train_labels, nullptr, nullptr, cfg);
        const EpochReport& r = result.reports.back();
        CHECK(r.subset_size == data.train.size());
        REQUIRE(r.noise_ratio.has_value());
        CHECK(*r.noise_ratio == 0.0);
    }
}

TEST_CASE("a batch covering the whole set matches whole-set labeling") {
    SimulatedData data = clustered_data(0.3, 13);
    PrototypeBank bank = build_prototypes(data.train, data.train_labels.observed(),
                                          data.train_labels.num_classes());
    PipelineConfig cfg = fast_config();
    cfg.batch_size = static_cast<int>(data.train.size());

    EpochOutput once = run_epoch(data.train, data.train_labels, bank, cfg, 1);
    cfg.batch_size = static_cast<int>(data.train.size()) * 3;  // still one batch
    EpochOutput padded = run_epoch(data.train, data.train_labels, bank, cfg, 1);
    CHECK(once.subset.kept_rows == padded.subset.kept_rows);
    CHECK(once.subset.pseudo_labels == padded.subset.pseudo_labels);
}

TEST_CASE("fixed seeds reproduce epoch reports bit for bit") {
    SimulatedData data = clustered_data(0.4, 17);
    PipelineConfig cfg = fast_config();
    cfg.rng_seed = 123;
    PipelineResult a = run_pipeline(data.train, data.train_labels, &data.test,
                                    &data.test_labels, cfg);
    PipelineResult b = run_pipeline(data.train, data.train_labels, &data.test,
                                    &data.test_labels, cfg);
    REQUIRE(a.reports.size() == b.reports.size());
    for (std::size_t e = 0; e < a.reports.size(); ++e) {
        CHECK(a.reports[e] == b.reports[e]);
    }
    CHECK(a.final_subset.kept_ids == b.final_subset.kept_ids);
    CHECK(a.final_subset.pseudo_labels == b.final_subset.pseudo_labels);
}

TEST_CASE("alpha = 1 with frozen counts is a fixed point across epochs") {
    SimulatedData data = clustered_data(0.4, 19);
    PipelineConfig cfg = fast_config();
    cfg.alpha = 1.0;
    cfg.update_counts_from_subset = false;
    cfg.epochs = 3;
    cfg.batch_size = static_cast<int>(data.train.size());  // single batch kills shuffle effects
    PipelineResult result = run_pipeline(data.train, data.train_labels, nullptr, nullptr, cfg);
    REQUIRE(result.reports.size() == 3);
    for (const EpochReport& r : result.reports) {
        CHECK(r.prototype_drift == 0.0);
        CHECK(r.subset_size == result.reports.front().subset_size);
        CHECK(r.per_class_counts == result.reports.front().per_class_counts);
        CHECK(r.noise_ratio == result.reports.front().noise_ratio);
    }
}

TEST_CASE("every sample lands in exactly one batch per epoch") {
    SimulatedData data = clustered_data(0.2, 23);
    PrototypeBank bank = build_prototypes(data.train, data.train_labels.observed(),
                                          data.train_labels.num_classes());
    PipelineConfig cfg = fast_config();
    cfg.batch_size = 37;  // ragged final batch
    EpochOutput out = run_epoch(data.train, data.train_labels, bank, cfg, 4);
    CHECK(out.subset.pseudo_labels.size() == data.train.size());
    for (int y : out.subset.pseudo_labels) {
        CHECK(y >= 0);
        CHECK(y < data.train_labels.num_classes());
    }
    // kept rows ascending and unique
    CHECK(std::is_sorted(out.subset.kept_rows.begin(), out.subset.kept_rows.end()));
    CHECK(std::adjacent_find(out.subset.kept_rows.begin(), out.subset.kept_rows.end()) ==
          out.subset.kept_rows.end());
}

TEST_CASE("epoch report bookkeeping holds") {
    SimulatedData data = clustered_data(0.4, 29);
    PipelineConfig cfg = fast_config();
    PipelineResult result = run_pipeline(data.train, data.train_labels, &data.test,
                                         &data.test_labels, cfg);
    for (const EpochReport& r : result.reports) {
        long long total = std::accumulate(r.per_class_counts.begin(),
                                          r.per_class_counts.end(), 0LL);
        CHECK(static_cast<std::size_t>(total) == r.subset_size);
        for (auto rate : {r.noise_ratio, r.precision, r.recall, r.accuracy, r.macro_auc,
                          r.test_accuracy}) {
            REQUIRE(rate.has_value());
            CHECK(*rate >= 0.0);
            CHECK(*rate <= 1.0);
        }
    }
    // kept labels equal observed labels on the kept set
    for (std::size_t t = 0; t < result.final_subset.kept_rows.size(); ++t) {
        std::size_t row = result.final_subset.kept_rows[t];
        CHECK(result.final_subset.kept_labels[t] ==
              data.train_labels.observed()[row]);
        CHECK(result.final_subset.pseudo_labels[row] ==
              data.train_labels.observed()[row]);
    }
}

TEST_CASE("extraction lowers the noise ratio on joint-noise data") {
    SimulatedData data = clustered_data(0.5, 31, 6, 30.0);
    PipelineConfig cfg = fast_config();
    cfg.epochs = 4;
    cfg.beta = 0.98;
    PipelineResult result = run_pipeline(data.train, data.train_labels, nullptr, nullptr, cfg);
    const EpochReport& last = result.reports.back();
    REQUIRE(last.noise_ratio.has_value());
    // observed noise is 0.5; the agreement filter should cut it well down
    CHECK(*last.noise_ratio < 0.25);
    REQUIRE(last.imbalance_factor.has_value());
    CHECK(*last.imbalance_factor < 30.0);
}

TEST_CASE("classes absent from observed labels stay out of the pseudo-label range") {
    // build a 3-class problem whose observed labels never mention class 2
    SimulatedData data = clustered_data(0.0, 37, 3, 2.0);
    std::vector<int> observed = data.train_labels.observed();
    for (int& y : observed) {
        if (y == 2) y = 0;
    }
    LabelTable squashed(observed, data.train_labels.truth(), 3);
    PipelineConfig cfg = fast_config();
    cfg.epochs = 2;
    PipelineResult result = run_pipeline(data.train, squashed, nullptr, nullptr, cfg);
    for (int y : result.final_subset.pseudo_labels) CHECK(y != 2);
}
