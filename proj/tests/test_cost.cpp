#include <cmath>
#include <random>

#include "doctest.h"
#include "otx/cost.hpp"
#include "oracles.hpp"

using namespace otx;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("cosine cost on axis-aligned vectors") {
    Matrix x = from_rows({{1.0, 0.0}});
    Matrix c = from_rows({{1.0, 0.0}, {0.0, 1.0}});
    Matrix d = cosine_cost(x, c);
    CHECK(d(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(d(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cosine cost is 2 for antiparallel vectors") {
    Matrix x = from_rows({{1.0, 0.0}});
    Matrix c = from_rows({{-1.0, 0.0}});
    CHECK(cosine_cost(x, c)(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("cosine cost ignores scale") {
    Matrix x = from_rows({{3.0, 4.0}});
    Matrix c = from_rows({{6.0, 8.0}});
    CHECK(cosine_cost(x, c)(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cosine cost rejects zero-norm rows") {
    Matrix x = from_rows({{0.0, 0.0}});
    Matrix c = from_rows({{1.0, 0.0}});
    CHECK_THROWS_AS(cosine_cost(x, c), ZeroNormVector);
    CHECK_THROWS_AS(cosine_cost(c, x), ZeroNormVector);
}

TEST_CASE("euclidean cost: 3-4-5 and identity") {
    Matrix x = from_rows({{0.0, 0.0}});
    Matrix c = from_rows({{3.0, 4.0}});
    CHECK(euclidean_cost(x, c)(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(euclidean_cost(c, c)(0, 0) == 0.0);
}

TEST_CASE("euclidean cost matches the per-pair norm loop") {
    std::mt19937_64 rng(7);
    Matrix x = oracle::random_matrix(rng, 4, 2);
    Matrix c = oracle::random_matrix(rng, 3, 2);
    Matrix d = euclidean_cost(x, c);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double dx = x(i, 0) - c(j, 0), dy = x(i, 1) - c(j, 1);
            CHECK(d(i, j) == doctest::Approx(std::sqrt(dx * dx + dy * dy)).epsilon(1e-14));
        }
    }
}

TEST_CASE("cosine cost invariant to positive per-row scaling") {
    std::mt19937_64 rng(21);
    Matrix x = oracle::random_matrix(rng, 6, 4, 0.1, 1.0);
    Matrix c = oracle::random_matrix(rng, 3, 4, 0.1, 1.0);
    Matrix base = cosine_cost(x, c);

    std::uniform_real_distribution<double> scale(0.5, 4.0);
    Matrix scaled = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = scale(rng);
        for (std::size_t j = 0; j < x.cols(); ++j) scaled(i, j) = s * x(i, j);
    }
    Matrix after = cosine_cost(scaled, c);
    for (std::size_t i = 0; i < base.rows(); ++i) {
        for (std::size_t j = 0; j < base.cols(); ++j) {
            CHECK(after(i, j) == doctest::Approx(base(i, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("swapping roles transposes both metrics") {
    std::mt19937_64 rng(33);
    Matrix x = oracle::random_matrix(rng, 5, 3, 0.1, 1.0);
    Matrix c = oracle::random_matrix(rng, 4, 3, 0.1, 1.0);
    Matrix forward = cosine_cost(x, c);
    Matrix backward = cosine_cost(c, x);
    Matrix fe = euclidean_cost(x, c);
    Matrix be = euclidean_cost(c, x);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < c.rows(); ++j) {
            CHECK(forward(i, j) == doctest::Approx(backward(j, i)).epsilon(1e-14));
            CHECK(fe(i, j) == doctest::Approx(be(j, i)).epsilon(1e-14));
        }
    }
    CHECK(forward.all_finite());
    CHECK(fe.all_finite());
}

TEST_CASE("bank overloads reject undefined prototypes") {
    Matrix f(2, 2, 1.0);
    f(1, 1) = 2.0;
    EmbeddingSet e({0, 1}, f);
    PrototypeBank bank(Matrix(2, 2, 1.0), {3, 0});
    CHECK_THROWS_AS(cosine_cost(e, bank), UndefinedPrototype);
    CHECK_THROWS_AS(euclidean_cost(e, bank), UndefinedPrototype);
}
