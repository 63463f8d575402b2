// Timing harness comparing the serial reference kernels against the
// OpenMP kernels on pipeline-shaped workloads, with an equality check on
// every pair. Run manually: build/bench/otx_bench [threads]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "otx/kernels.hpp"
#include "otx/matrix.hpp"

using namespace otx;

namespace {

double time_of(const std::function<void()>& fn, int repeats) {
    // one warm-up, then the median of the timed repeats
    fn();
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        auto start = std::chrono::steady_clock::now();
        fn();
        times.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

void row(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-22s %10.3f ms %10.3f ms %7.2fx   %s\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel, identical ? "bit-identical" : "MISMATCH");
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m, double lo, double hi) {
    std::uniform_real_distribution<double> unit(lo, hi);
    Matrix out(n, m);
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = unit(rng);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) kernels::set_threads(std::atoi(argv[1]));
    std::printf("threads: %d\n", kernels::max_threads());
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    std::mt19937_64 rng(2024);
    const std::size_t n = 20000, d = 64, k = 10;
    Matrix x = random_matrix(rng, n, d, 0.05, 1.0);
    Matrix protos = random_matrix(rng, k, d, 0.05, 1.0);
    const int repeats = 7;

    {
        std::vector<double> nx, nc, nx_ref, nc_ref;
        kernels::ref::row_norms(x, nx_ref);
        kernels::ref::row_norms(protos, nc_ref);
        nx = nx_ref;
        nc = nc_ref;
        for (double& v : nx) v = 1.0 / v;
        for (double& v : nc) v = 1.0 / v;
        Matrix out_ref(n, k), out_par(n, k);
        double ts = time_of([&] { kernels::ref::cosine_cost(x, protos, nx, nc, out_ref); },
                            repeats);
        double tp = time_of([&] { kernels::cosine_cost(x, protos, nx, nc, out_par); }, repeats);
        row("cosine_cost", ts, tp, out_ref == out_par);
    }
    {
        Matrix out_ref(n, k), out_par(n, k);
        double ts = time_of([&] { kernels::ref::euclidean_cost(x, protos, out_ref); }, repeats);
        double tp = time_of([&] { kernels::euclidean_cost(x, protos, out_par); }, repeats);
        row("euclidean_cost", ts, tp, out_ref == out_par);
    }
    {
        Matrix cost(n, k);
        std::uniform_real_distribution<double> unit(0.0, 2.0);
        for (std::size_t i = 0; i < cost.size(); ++i) cost.data()[i] = unit(rng);
        std::vector<double> log_a(n, -std::log(static_cast<double>(n)));
        std::vector<double> g(k, 0.01), f_ref(n), f_par(n), lse_ref(k), lse_par(k);
        const double gamma = 1e-2;
        double ts = time_of(
            [&] {
                kernels::ref::sinkhorn_row_update(cost, gamma, log_a, g, f_ref);
                kernels::ref::sinkhorn_col_lse(cost, gamma, f_ref, lse_ref);
            },
            repeats);
        double tp = time_of(
            [&] {
                kernels::sinkhorn_row_update(cost, gamma, log_a, g, f_par);
                kernels::sinkhorn_col_lse(cost, gamma, f_par, lse_par);
            },
            repeats);
        row("sinkhorn_sweep", ts, tp, f_ref == f_par && lse_ref == lse_par);
    }
    {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(k) - 1);
        std::vector<int> labels(n);
        for (int& y : labels) y = pick(rng);
        Matrix w = random_matrix(rng, k, d, -0.3, 0.3);
        std::vector<double> bias(k, 0.0);
        Matrix probs_ref(n, k), probs_par(n, k), gw_ref(k, d), gw_par(k, d);
        std::vector<double> gb_ref, gb_par;
        double ts = time_of(
            [&] {
                kernels::ref::softmax_probs(x, w, bias, probs_ref);
                kernels::ref::softmax_grad(x, labels, probs_ref, w, 1e-4, gw_ref, gb_ref);
            },
            repeats);
        double tp = time_of(
            [&] {
                kernels::softmax_probs(x, w, bias, probs_par);
                kernels::softmax_grad(x, labels, probs_par, w, 1e-4, gw_par, gb_par);
            },
            repeats);
        row("softmax_step", ts, tp,
            probs_ref == probs_par && gw_ref == gw_par && gb_ref == gb_par);

        Matrix means_ref(k, d), means_par(k, d);
        std::vector<long long> counts_ref, counts_par;
        double tm_s = time_of(
            [&] { kernels::ref::class_mean(x, labels, static_cast<int>(k), means_ref, counts_ref); },
            repeats);
        double tm_p = time_of(
            [&] { kernels::class_mean(x, labels, static_cast<int>(k), means_par, counts_par); },
            repeats);
        row("class_mean", tm_s, tm_p, means_ref == means_par && counts_ref == counts_par);
    }
    return 0;
}
