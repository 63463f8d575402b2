#include <cmath>
#include <numeric>

#include "doctest.h"
#include "otx/classifier.hpp"
#include "otx/labeling.hpp"
#include "otx/metrics.hpp"
#include "otx/simkit.hpp"

using namespace otx;

TEST_CASE("longtail endpoints and the balanced limit") {
    CHECK(longtail_counts(2, 100, 100.0) == std::vector<long long>{100, 1});
    std::vector<long long> balanced = longtail_counts(5, 42, 1.0);
    for (long long c : balanced) CHECK(c == 42);
}

TEST_CASE("longtail profile matches the independent formula evaluation") {
    // round-half-even over 500 * 100^(-k/9), evaluated externally at high
    // precision
    CHECK(longtail_counts(10, 500, 100.0) ==
          std::vector<long long>{500, 300, 180, 108, 65, 39, 23, 14, 8, 5});
    CHECK(longtail_counts(10, 500, 10.0) ==
          std::vector<long long>{500, 387, 300, 232, 180, 139, 108, 83, 65, 50});
    std::vector<long long> counts = longtail_counts(10, 500, 100.0);
    for (std::size_t k = 1; k < counts.size(); ++k) CHECK(counts[k] <= counts[k - 1]);
    CHECK(counts.back() == 5);  // 500 / 100
}

TEST_CASE("zero separation is class-blind") {
    SimSpec spec;
    spec.num_classes = 4;
    spec.dim = 8;
    spec.head_count = 200;
    spec.imbalance_factor = 1.0;
    spec.cluster_separation = 0.0;
    spec.eta = 0.0;
    spec.test_per_class = 50;
    spec.rng_seed = 5;
    SimulatedData data = sample_gaussian_mixture(spec);
    PrototypeBank bank =
        build_prototypes(data.train, data.train_labels.truth(), spec.num_classes);
    std::vector<int> pred = nearest_prototype_predict(bank, data.test, CostMetric::kEuclidean);
    double acc = accuracy(pred, data.test_labels.truth());
    CHECK(acc >= 0.25 - 0.1);
    CHECK(acc <= 0.25 + 0.1);
}

TEST_CASE("strong separation gives near-perfect nearest-prototype accuracy") {
    SimSpec spec;
    spec.num_classes = 6;
    spec.dim = 16;
    spec.head_count = 300;
    spec.imbalance_factor = 10.0;
    spec.cluster_separation = 10.0;
    spec.within_class_std = 1.0;
    spec.eta = 0.0;
    spec.rng_seed = 6;
    SimulatedData data = sample_gaussian_mixture(spec);
    PrototypeBank bank =
        build_prototypes(data.train, data.train_labels.truth(), spec.num_classes);
    std::vector<int> pred = nearest_prototype_predict(bank, data.test, CostMetric::kCosine);
    CHECK(accuracy(pred, data.test_labels.truth()) >= 0.99);
}

TEST_CASE("generation is deterministic per seed") {
    SimSpec spec;
    spec.num_classes = 3;
    spec.dim = 4;
    spec.head_count = 50;
    spec.imbalance_factor = 5.0;
    spec.rng_seed = 77;
    SimulatedData a = simulate(spec);
    SimulatedData b = simulate(spec);
    CHECK(a.train.features() == b.train.features());
    CHECK(a.test.features() == b.test.features());
    CHECK(a.train_labels.observed() == b.train_labels.observed());

    spec.rng_seed = 78;
    SimulatedData c = simulate(spec);
    CHECK_FALSE(a.train.features() == c.train.features());
}

TEST_CASE("dimension must cover the class count") {
    SimSpec spec;
    spec.num_classes = 8;
    spec.dim = 4;
    CHECK_THROWS_AS(sample_gaussian_mixture(spec), DimensionTooSmall);
}

TEST_CASE("injectors preserve order, count, and eta = 0 identity") {
    std::vector<int> truth{0, 1, 2, 2, 1, 0, 2};
    std::vector<long long> counts{2, 2, 3};
    CHECK(inject_joint_noise(truth, counts, 0.0, 1) == truth);
    CHECK(inject_symmetric_noise(truth, 3, 0.0, 1) == truth);
    CHECK(inject_asymmetric_noise(truth, 0.0, std::nullopt, 1) == truth);
    CHECK(inject_joint_noise(truth, counts, 0.7, 1).size() == truth.size());
    CHECK_THROWS_AS(inject_joint_noise(truth, counts, 1.4, 1), EtaOutOfRange);
    CHECK_THROWS_AS(inject_symmetric_noise(truth, 3, -0.1, 1), EtaOutOfRange);
}

TEST_CASE("joint noise frequencies match the flip matrix row") {
    // truth class 0 with N = [500, 300, 200]: keep 0.5, to class 1 with
    // 0.5 * 300/500 = 0.3, to class 2 with 0.5 * 200/500 = 0.2
    const int n = 100000;
    std::vector<int> truth(n, 0);
    std::vector<long long> counts{500, 300, 200};
    std::vector<int> observed = inject_joint_noise(truth, counts, 0.5, 12345);
    double to[3] = {0.0, 0.0, 0.0};
    for (int y : observed) to[y] += 1.0 / n;
    CHECK(std::abs(to[0] - 0.5) <= 0.01);
    CHECK(std::abs(to[1] - 0.3) <= 0.01);
    CHECK(std::abs(to[2] - 0.2) <= 0.01);
}

TEST_CASE("joint noise keeps the observed distribution long-tailed in expectation") {
    std::vector<long long> counts = longtail_counts(6, 6000, 50.0);
    std::vector<int> truth;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        truth.insert(truth.end(), static_cast<std::size_t>(counts[j]), static_cast<int>(j));
    }
    REQUIRE(truth.size() >= 10000);
    std::vector<double> observed_mean(counts.size(), 0.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::vector<int> observed = inject_joint_noise(truth, counts, 0.5, seed);
        for (int y : observed) observed_mean[static_cast<std::size_t>(y)] += 0.1;
    }
    for (std::size_t j = 1; j < observed_mean.size(); ++j) {
        CHECK(observed_mean[j] <= observed_mean[j - 1] * 1.02 + 1.0);
    }
}

TEST_CASE("symmetric noise per-class rate approaches eta") {
    const int n = 100000;
    std::vector<int> truth(n);
    for (int i = 0; i < n; ++i) truth[i] = i % 4;
    std::vector<int> observed = inject_symmetric_noise(truth, 4, 0.4, 99);
    double flipped[4] = {0, 0, 0, 0};
    double total[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        total[truth[i]] += 1.0;
        if (observed[i] != truth[i]) flipped[truth[i]] += 1.0;
    }
    for (int c = 0; c < 4; ++c) {
        CHECK(std::abs(flipped[c] / total[c] - 0.4) <= 0.01);
    }
}

TEST_CASE("two-class symmetric noise flips with probability eta") {
    const int n = 100000;
    std::vector<int> truth(n, 1);
    std::vector<int> observed = inject_symmetric_noise(truth, 2, 0.4, 3);
    double flips = 0.0;
    for (int y : observed) {
        if (y == 0) flips += 1.0;
    }
    CHECK(std::abs(flips / n - 0.4) <= 0.01);
}

TEST_CASE("asymmetric noise inflates the target and never touches it") {
    // counts [100, 50, 10], eta 0.5: expected observed count of class 2 is
    // 10 + 0.5 * 150 = 85, overtaking every other class
    std::vector<int> truth;
    truth.insert(truth.end(), 100, 0);
    truth.insert(truth.end(), 50, 1);
    truth.insert(truth.end(), 10, 2);
    double mean_count = 0.0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        std::vector<int> observed = inject_asymmetric_noise(truth, 0.5, std::nullopt, seed);
        long long count2 = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (truth[i] == 2) CHECK(observed[i] == 2);
            if (observed[i] == 2) ++count2;
        }
        mean_count += static_cast<double>(count2) / 40.0;
    }
    CHECK(std::abs(mean_count - 85.0) <= 8.5);

    std::vector<int> one_run = inject_asymmetric_noise(truth, 0.6, std::nullopt, 4);
    std::vector<long long> observed_counts = class_counts(one_run, 3);
    CHECK(observed_counts[2] > observed_counts[1]);  // tail observed as head
}
