#include <cmath>
#include <random>

#include "doctest.h"
#include "otx/ot.hpp"
#include "oracles.hpp"

using namespace otx;

TEST_CASE("single-cell problem has the only feasible plan") {
    Matrix d(1, 1);
    d(0, 0) = 0.7;
    TransportPlan t = sinkhorn(d, {1.0}, {1.0});
    CHECK(t.plan(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.converged);
    CHECK(t.marginal_violation <= 1e-9);
}

TEST_CASE("zero cost yields the independent coupling") {
    Matrix d(2, 2, 0.0);
    TransportPlan t = sinkhorn(d, {0.5, 0.5}, {0.5, 0.5}, {.gamma = 0.37});
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(t.plan(i, j) == doctest::Approx(0.25).epsilon(1e-12));
        }
    }
}

TEST_CASE("sinkhorn validates marginals and costs") {
    Matrix d(2, 2, 0.1);
    CHECK_THROWS_AS(sinkhorn(d, {0.6, 0.6}, {0.5, 0.5}), InfeasibleMarginals);
    CHECK_THROWS_AS(sinkhorn(d, {1.0, 0.0}, {0.5, 0.5}), InfeasibleMarginals);
    CHECK_THROWS_AS(sinkhorn(d, {0.5, 0.5}, {0.5}), ShapeMismatch);
    Matrix bad(2, 2, 0.1);
    bad(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(sinkhorn(bad, {0.5, 0.5}, {0.5, 0.5}), NonFiniteCost);
}

TEST_CASE("non-convergence is a warning result, not an error") {
    std::mt19937_64 rng(8);
    Matrix d = oracle::random_cost(rng, 12, 4);
    SinkhornConfig cfg;
    cfg.gamma = 1e-3;
    cfg.max_iterations = 3;  // deliberately too few
    TransportPlan t = sinkhorn(d, oracle::random_simplex(rng, 12),
                               oracle::random_simplex(rng, 4), cfg);
    CHECK_FALSE(t.converged);
    CHECK(t.iterations_used == 3);
    CHECK(t.marginal_violation > 1e-9);
    CHECK(t.plan.all_finite());
}

TEST_CASE("plan objective on hand-checked cases") {
    TransportPlan unit;
    unit.plan = Matrix(1, 1);
    unit.plan(0, 0) = 1.0;
    unit.regularization = 0.5;
    Matrix d(1, 1);
    d(0, 0) = 0.3;
    PlanObjective obj = plan_objective(unit, d);
    CHECK(obj.transport_cost == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(obj.entropy == 0.0);
    CHECK(obj.regularized_objective == doctest::Approx(0.3).epsilon(1e-15));

    TransportPlan quarter;
    quarter.plan = Matrix(2, 2, 0.25);
    quarter.regularization = 1.0;
    Matrix z(2, 2, 0.0);
    PlanObjective uniform = plan_objective(quarter, z);
    CHECK(uniform.transport_cost == 0.0);
    CHECK(uniform.entropy == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("plan objective matches the scalar double loop") {
    std::mt19937_64 rng(17);
    Matrix d = oracle::random_cost(rng, 9, 5);
    TransportPlan t = sinkhorn(d, oracle::random_simplex(rng, 9), oracle::random_simplex(rng, 5),
                               {.gamma = 5e-2});
    PlanObjective obj = plan_objective(t, d);
    double cost = 0.0, entropy = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            double p = t.plan(i, j);
            cost += p * d(i, j);
            if (p > 0.0) entropy -= p * std::log(p);
        }
    }
    CHECK(obj.transport_cost == doctest::Approx(cost).epsilon(1e-14));
    CHECK(obj.entropy == doctest::Approx(entropy).epsilon(1e-14));
    CHECK(obj.regularized_objective ==
          doctest::Approx(cost - t.regularization * entropy).epsilon(1e-13));
    Matrix wrong(3, 3, 0.0);
    CHECK_THROWS_AS(plan_objective(t, wrong), ShapeMismatch);
}

TEST_CASE("exact_ot solves the perfect matching") {
    Matrix d(2, 2, 0.0);
    d(0, 1) = 1.0;
    d(1, 0) = 1.0;
    ExactPlan p = exact_ot(d, {0.5, 0.5}, {0.5, 0.5});
    CHECK(p.cost == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p.plan(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.plan(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact_ot pays for mass forced onto an expensive column") {
    Matrix d(2, 2, 0.0);
    d(0, 1) = 1.0;
    d(1, 1) = 1.0;
    ExactPlan p = exact_ot(d, {0.5, 0.5}, {0.5, 0.5});
    CHECK(p.cost == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact_ot enforces the size cap and marginal checks") {
    Matrix big(64, 17, 0.0);
    std::vector<double> a(64, 1.0 / 64.0), b(17, 1.0 / 17.0);
    CHECK_THROWS_AS(exact_ot(big, a, b), InstanceTooLarge);
    Matrix d(2, 2, 0.0);
    CHECK_THROWS_AS(exact_ot(d, {0.7, 0.7}, {0.5, 0.5}), InfeasibleMarginals);
}

TEST_CASE("exact_ot matches the brute-force vertex search") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 12; ++trial) {
        std::uniform_int_distribution<std::size_t> pick_n(2, 6), pick_m(2, 3);
        std::size_t n = pick_n(rng), m = pick_m(rng);
        Matrix d = oracle::random_cost(rng, n, m);
        std::vector<double> a = oracle::random_simplex(rng, n);
        std::vector<double> b = oracle::random_simplex(rng, m);
        ExactPlan p = exact_ot(d, a, b);
        double expected = oracle::brute_force_ot_cost(d, a, b);
        CHECK(std::abs(p.cost - expected) <= 1e-12);
    }
}

TEST_CASE("sinkhorn cost approaches the exact cost at small gamma") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        std::uniform_int_distribution<std::size_t> pick_n(4, 16), pick_m(2, 4);
        std::size_t n = pick_n(rng), m = pick_m(rng);
        Matrix d = oracle::random_cost(rng, n, m);
        std::vector<double> a = oracle::random_simplex(rng, n);
        std::vector<double> b = oracle::random_simplex(rng, m);
        SinkhornConfig cfg;
        cfg.gamma = 1e-3;
        cfg.max_iterations = 200000;
        TransportPlan t = sinkhorn(d, a, b, cfg);
        REQUIRE(t.converged);
        ExactPlan p = exact_ot(d, a, b);
        CHECK(plan_objective(t, d).transport_cost - p.cost <= 1e-2);
        // a feasible plan cannot undercut the optimum beyond residual slack
        CHECK(plan_objective(t, d).transport_cost >= p.cost - 1e-8);
    }
}

TEST_CASE("transport cost is nonincreasing as gamma shrinks") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 4; ++trial) {
        std::uniform_int_distribution<std::size_t> pick_n(8, 64), pick_m(2, 8);
        std::size_t n = pick_n(rng), m = pick_m(rng);
        Matrix d = oracle::random_cost(rng, n, m);
        std::vector<double> a = oracle::random_simplex(rng, n);
        std::vector<double> b = oracle::random_simplex(rng, m);
        double prev = std::numeric_limits<double>::infinity();
        for (double gamma : {1e-1, 1e-2, 1e-3}) {
            SinkhornConfig cfg;
            cfg.gamma = gamma;
            cfg.max_iterations = 40000;
            double cost = plan_objective(sinkhorn(d, a, b, cfg), d).transport_cost;
            CHECK(cost <= prev + 1e-10);
            prev = cost;
        }
    }
}

TEST_CASE("high gamma drives the plan to the product coupling") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 4; ++trial) {
        std::size_t n = 16, m = 6;
        Matrix d = oracle::random_cost(rng, n, m);
        std::vector<double> a = oracle::random_simplex(rng, n);
        std::vector<double> b = oracle::random_simplex(rng, m);
        TransportPlan t = sinkhorn(d, a, b, {.gamma = 1e3});
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                worst = std::max(worst, std::abs(t.plan(i, j) - a[i] * b[j]));
            }
        }
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("permuting cost rows permutes the plan rows") {
    std::mt19937_64 rng(23);
    const std::size_t n = 10, m = 4;
    Matrix d = oracle::random_cost(rng, n, m);
    std::vector<double> a = oracle::random_simplex(rng, n);
    std::vector<double> b = oracle::random_simplex(rng, m);
    TransportPlan base = sinkhorn(d, a, b);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = (i * 7 + 3) % n;  // a fixed permutation
    Matrix dp(n, m);
    std::vector<double> ap(n);
    for (std::size_t i = 0; i < n; ++i) {
        ap[i] = a[perm[i]];
        for (std::size_t j = 0; j < m; ++j) dp(i, j) = d(perm[i], j);
    }
    TransportPlan permuted = sinkhorn(dp, ap, b);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            CHECK(permuted.plan(i, j) == doctest::Approx(base.plan(perm[i], j)).epsilon(1e-10));
        }
    }
}

TEST_CASE("stabilized and naive sinkhorn agree on well-conditioned instances") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 4; ++trial) {
        std::size_t n = 20, m = 5;
        Matrix d = oracle::random_cost(rng, n, m);
        std::vector<double> a = oracle::random_simplex(rng, n);
        std::vector<double> b = oracle::random_simplex(rng, m);
        SinkhornConfig log_cfg;
        log_cfg.gamma = 1e-2;
        log_cfg.max_iterations = 50000;
        SinkhornConfig naive_cfg = log_cfg;
        naive_cfg.stabilized = false;
        TransportPlan stable = sinkhorn(d, a, b, log_cfg);
        TransportPlan naive = sinkhorn(d, a, b, naive_cfg);
        REQUIRE(stable.converged);
        REQUIRE(naive.converged);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                CHECK(std::abs(stable.plan(i, j) - naive.plan(i, j)) <= 1e-8);
            }
        }
    }
}

TEST_CASE("plan invariants: nonnegative entries, marginals, unit mass") {
    std::mt19937_64 rng(31);
    Matrix d = oracle::random_cost(rng, 40, 7);
    std::vector<double> a = oracle::random_simplex(rng, 40);
    std::vector<double> b = oracle::random_simplex(rng, 7);
    TransportPlan t = sinkhorn(d, a, b);
    REQUIRE(t.converged);
    double total = 0.0;
    for (std::size_t i = 0; i < t.plan.rows(); ++i) {
        for (std::size_t j = 0; j < t.plan.cols(); ++j) {
            CHECK(t.plan(i, j) >= 0.0);
            total += t.plan(i, j);
        }
    }
    CHECK(std::abs(total - 1.0) <= 2.0 * std::max(t.marginal_violation, 1e-15) + 1e-12);
    CHECK(t.marginal_violation <= 1e-9);
}
