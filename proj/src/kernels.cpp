#include "otx/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace otx::kernels {

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

inline double row_norm_one(const double* row, std::size_t d) {
    double s = 0.0;
    for (std::size_t t = 0; t < d; ++t) s += row[t] * row[t];
    return std::sqrt(s);
}

inline void cosine_cost_row(const Matrix& x, const Matrix& c, const std::vector<double>& inx,
                            const std::vector<double>& inc, Matrix& out, std::size_t i) {
    const std::size_t d = x.cols();
    const double* xi = x.row(i);
    for (std::size_t j = 0; j < c.rows(); ++j) {
        const double* cj = c.row(j);
        double dot = 0.0;
        for (std::size_t t = 0; t < d; ++t) dot += xi[t] * cj[t];
        out(i, j) = 1.0 - dot * inx[i] * inc[j];
    }
}

inline void euclidean_cost_row(const Matrix& x, const Matrix& c, Matrix& out, std::size_t i) {
    const std::size_t d = x.cols();
    const double* xi = x.row(i);
    for (std::size_t j = 0; j < c.rows(); ++j) {
        const double* cj = c.row(j);
        double s = 0.0;
        for (std::size_t t = 0; t < d; ++t) {
            double diff = xi[t] - cj[t];
            s += diff * diff;
        }
        out(i, j) = std::sqrt(s);
    }
}

inline void sinkhorn_row_one(const Matrix& cost, double gamma, const std::vector<double>& log_a,
                             const std::vector<double>& g, std::vector<double>& f,
                             std::size_t i) {
    const std::size_t k = cost.cols();
    const double* ci = cost.row(i);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
        m = std::max(m, (g[j] - ci[j]) / gamma);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        s += std::exp((g[j] - ci[j]) / gamma - m);
    }
    f[i] = gamma * (log_a[i] - (m + std::log(s)));
}

inline void sinkhorn_col_one(const Matrix& cost, double gamma, const std::vector<double>& f,
                             std::vector<double>& lse, std::size_t j) {
    const std::size_t n = cost.rows();
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        m = std::max(m, (f[i] - cost(i, j)) / gamma);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += std::exp((f[i] - cost(i, j)) / gamma - m);
    }
    lse[j] = m + std::log(s);
}

inline void plan_row_one(const Matrix& cost, double gamma, const std::vector<double>& f,
                         const std::vector<double>& g, Matrix& plan, std::size_t i) {
    const std::size_t k = cost.cols();
    const double* ci = cost.row(i);
    double* pi = plan.row(i);
    for (std::size_t j = 0; j < k; ++j) {
        pi[j] = std::exp((f[i] + g[j] - ci[j]) / gamma);
    }
}

inline void softmax_probs_row(const Matrix& x, const Matrix& w, const std::vector<double>& bias,
                              Matrix& probs, std::size_t i) {
    const std::size_t k = w.rows();
    const std::size_t d = x.cols();
    const double* xi = x.row(i);
    double* pi = probs.row(i);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        const double* wc = w.row(c);
        double z = bias[c];
        for (std::size_t t = 0; t < d; ++t) z += wc[t] * xi[t];
        pi[c] = z;
        m = std::max(m, z);
    }
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        pi[c] = std::exp(pi[c] - m);
        s += pi[c];
    }
    double inv = 1.0 / s;
    for (std::size_t c = 0; c < k; ++c) pi[c] *= inv;
}

inline void softmax_grad_class(const Matrix& x, const std::vector<int>& labels,
                               const Matrix& probs, const Matrix& w, double l2, Matrix& grad_w,
                               std::vector<double>& grad_b, std::size_t c) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    double* gc = grad_w.row(c);
    for (std::size_t t = 0; t < d; ++t) gc[t] = 0.0;
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double coef = probs(i, c) - (labels[i] == static_cast<int>(c) ? 1.0 : 0.0);
        const double* xi = x.row(i);
        for (std::size_t t = 0; t < d; ++t) gc[t] += coef * xi[t];
        gb += coef;
    }
    const double* wc = w.row(c);
    for (std::size_t t = 0; t < d; ++t) gc[t] = gc[t] * inv_n + l2 * wc[t];
    grad_b[c] = gb * inv_n;
}

inline void class_mean_one(const Matrix& x, const std::vector<int>& labels, Matrix& means,
                           std::vector<long long>& counts, std::size_t j) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    double* mj = means.row(j);
    for (std::size_t t = 0; t < d; ++t) mj[t] = 0.0;
    long long cnt = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != static_cast<int>(j)) continue;
        const double* xi = x.row(i);
        for (std::size_t t = 0; t < d; ++t) mj[t] += xi[t];
        ++cnt;
    }
    if (cnt > 0) {
        double inv = 1.0 / static_cast<double>(cnt);
        for (std::size_t t = 0; t < d; ++t) mj[t] *= inv;
    }
    counts[j] = cnt;
}

}  // namespace

namespace ref {

void row_norms(const Matrix& m, std::vector<double>& out) {
    out.resize(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = row_norm_one(m.row(i), m.cols());
}

void cosine_cost(const Matrix& x, const Matrix& c, const std::vector<double>& inv_norm_x,
                 const std::vector<double>& inv_norm_c, Matrix& out) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        cosine_cost_row(x, c, inv_norm_x, inv_norm_c, out, i);
    }
}

void euclidean_cost(const Matrix& x, const Matrix& c, Matrix& out) {
    for (std::size_t i = 0; i < x.rows(); ++i) euclidean_cost_row(x, c, out, i);
}

void sinkhorn_row_update(const Matrix& cost, double gamma, const std::vector<double>& log_a,
                         const std::vector<double>& g, std::vector<double>& f) {
    for (std::size_t i = 0; i < cost.rows(); ++i) sinkhorn_row_one(cost, gamma, log_a, g, f, i);
}

void sinkhorn_col_lse(const Matrix& cost, double gamma, const std::vector<double>& f,
                      std::vector<double>& lse) {
    for (std::size_t j = 0; j < cost.cols(); ++j) sinkhorn_col_one(cost, gamma, f, lse, j);
}

void plan_from_potentials(const Matrix& cost, double gamma, const std::vector<double>& f,
                          const std::vector<double>& g, Matrix& plan) {
    for (std::size_t i = 0; i < cost.rows(); ++i) plan_row_one(cost, gamma, f, g, plan, i);
}

void matvec(const Matrix& m, const std::vector<double>& v, std::vector<double>& out) {
    out.resize(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* mi = m.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += mi[j] * v[j];
        out[i] = s;
    }
}

void matvec_t(const Matrix& m, const std::vector<double>& v, std::vector<double>& out) {
    out.resize(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, j) * v[i];
        out[j] = s;
    }
}

void softmax_probs(const Matrix& x, const Matrix& w, const std::vector<double>& bias,
                   Matrix& probs) {
    for (std::size_t i = 0; i < x.rows(); ++i) softmax_probs_row(x, w, bias, probs, i);
}

void softmax_grad(const Matrix& x, const std::vector<int>& labels, const Matrix& probs,
                  const Matrix& w, double l2, Matrix& grad_w, std::vector<double>& grad_b) {
    grad_b.resize(w.rows());
    for (std::size_t c = 0; c < w.rows(); ++c) {
        softmax_grad_class(x, labels, probs, w, l2, grad_w, grad_b, c);
    }
}

void class_mean(const Matrix& x, const std::vector<int>& labels, int num_classes,
                Matrix& means, std::vector<long long>& counts) {
    counts.assign(static_cast<std::size_t>(num_classes), 0);
    for (std::size_t j = 0; j < static_cast<std::size_t>(num_classes); ++j) {
        class_mean_one(x, labels, means, counts, j);
    }
}

}  // namespace ref

void row_norms(const Matrix& m, std::vector<double>& out) {
    out.resize(m.rows());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = row_norm_one(m.row(static_cast<std::size_t>(i)), m.cols());
    }
}

void cosine_cost(const Matrix& x, const Matrix& c, const std::vector<double>& inv_norm_x,
                 const std::vector<double>& inv_norm_c, Matrix& out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        cosine_cost_row(x, c, inv_norm_x, inv_norm_c, out, static_cast<std::size_t>(i));
    }
}

void euclidean_cost(const Matrix& x, const Matrix& c, Matrix& out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        euclidean_cost_row(x, c, out, static_cast<std::size_t>(i));
    }
}

void sinkhorn_row_update(const Matrix& cost, double gamma, const std::vector<double>& log_a,
                         const std::vector<double>& g, std::vector<double>& f) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(cost.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        sinkhorn_row_one(cost, gamma, log_a, g, f, static_cast<std::size_t>(i));
    }
}

void sinkhorn_col_lse(const Matrix& cost, double gamma, const std::vector<double>& f,
                      std::vector<double>& lse) {
    const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(cost.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < k; ++j) {
        sinkhorn_col_one(cost, gamma, f, lse, static_cast<std::size_t>(j));
    }
}

void plan_from_potentials(const Matrix& cost, double gamma, const std::vector<double>& f,
                          const std::vector<double>& g, Matrix& plan) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(cost.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        plan_row_one(cost, gamma, f, g, plan, static_cast<std::size_t>(i));
    }
}

void matvec(const Matrix& m, const std::vector<double>& v, std::vector<double>& out) {
    out.resize(m.rows());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double* mi = m.row(static_cast<std::size_t>(i));
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += mi[j] * v[j];
        out[static_cast<std::size_t>(i)] = s;
    }
}

void matvec_t(const Matrix& m, const std::vector<double>& v, std::vector<double>& out) {
    out.resize(m.cols());
    const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(m.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, static_cast<std::size_t>(j)) * v[i];
        out[static_cast<std::size_t>(j)] = s;
    }
}

void softmax_probs(const Matrix& x, const Matrix& w, const std::vector<double>& bias,
                   Matrix& probs) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        softmax_probs_row(x, w, bias, probs, static_cast<std::size_t>(i));
    }
}

void softmax_grad(const Matrix& x, const std::vector<int>& labels, const Matrix& probs,
                  const Matrix& w, double l2, Matrix& grad_w, std::vector<double>& grad_b) {
    grad_b.resize(w.rows());
    const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(w.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < k; ++c) {
        softmax_grad_class(x, labels, probs, w, l2, grad_w, grad_b, static_cast<std::size_t>(c));
    }
}

void class_mean(const Matrix& x, const std::vector<int>& labels, int num_classes,
                Matrix& means, std::vector<long long>& counts) {
    counts.assign(static_cast<std::size_t>(num_classes), 0);
    const std::ptrdiff_t k = num_classes;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < k; ++j) {
        class_mean_one(x, labels, means, counts, static_cast<std::size_t>(j));
    }
}

}  // namespace otx::kernels
