#pragma once

#include <vector>

#include "otx/matrix.hpp"

namespace otx::kernels {

/// Caps the OpenMP worker count for all kernels. n <= 0 resets to the
/// runtime default. No-op in builds without OpenMP.
void set_threads(int n);
int max_threads();

/// Serial reference kernels. The OpenMP kernels below parallelize only
/// across independent output rows, columns, or classes and keep each
/// output's accumulation order unchanged, so the two variants must agree
/// bit for bit; the tests and the benchmark hold them to that.
namespace ref {

void row_norms(const Matrix& m, std::vector<double>& out);

/// out(i,j) = 1 - <x_i, c_j> * inv_norm_x[i] * inv_norm_c[j]
void cosine_cost(const Matrix& x, const Matrix& c, const std::vector<double>& inv_norm_x,
                 const std::vector<double>& inv_norm_c, Matrix& out);

/// out(i,j) = ||x_i - c_j||_2
void euclidean_cost(const Matrix& x, const Matrix& c, Matrix& out);

/// f[i] = gamma * (log_a[i] - logsumexp_j((g[j] - cost(i,j)) / gamma))
void sinkhorn_row_update(const Matrix& cost, double gamma, const std::vector<double>& log_a,
                         const std::vector<double>& g, std::vector<double>& f);

/// lse[j] = logsumexp_i((f[i] - cost(i,j)) / gamma)
void sinkhorn_col_lse(const Matrix& cost, double gamma, const std::vector<double>& f,
                      std::vector<double>& lse);

/// plan(i,j) = exp((f[i] + g[j] - cost(i,j)) / gamma)
void plan_from_potentials(const Matrix& cost, double gamma, const std::vector<double>& f,
                          const std::vector<double>& g, Matrix& plan);

/// out = m v  (length rows)
void matvec(const Matrix& m, const std::vector<double>& v, std::vector<double>& out);

/// out = m^T v  (length cols)
void matvec_t(const Matrix& m, const std::vector<double>& v, std::vector<double>& out);

/// probs = row-softmax(x w^T + bias)
void softmax_probs(const Matrix& x, const Matrix& w, const std::vector<double>& bias,
                   Matrix& probs);

/// Mean cross-entropy gradient plus l2 * w. grad_w is K x d, grad_b is K.
void softmax_grad(const Matrix& x, const std::vector<int>& labels, const Matrix& probs,
                  const Matrix& w, double l2, Matrix& grad_w, std::vector<double>& grad_b);

/// Per-class feature means; classes with no samples get a zero row and
/// count 0.
void class_mean(const Matrix& x, const std::vector<int>& labels, int num_classes,
                Matrix& means, std::vector<long long>& counts);

}  // namespace ref

void row_norms(const Matrix& m, std::vector<double>& out);
void cosine_cost(const Matrix& x, const Matrix& c, const std::vector<double>& inv_norm_x,
                 const std::vector<double>& inv_norm_c, Matrix& out);
void euclidean_cost(const Matrix& x, const Matrix& c, Matrix& out);
void sinkhorn_row_update(const Matrix& cost, double gamma, const std::vector<double>& log_a,
                         const std::vector<double>& g, std::vector<double>& f);
void sinkhorn_col_lse(const Matrix& cost, double gamma, const std::vector<double>& f,
                      std::vector<double>& lse);
void plan_from_potentials(const Matrix& cost, double gamma, const std::vector<double>& f,
                          const std::vector<double>& g, Matrix& plan);
void matvec(const Matrix& m, const std::vector<double>& v, std::vector<double>& out);
void matvec_t(const Matrix& m, const std::vector<double>& v, std::vector<double>& out);
void softmax_probs(const Matrix& x, const Matrix& w, const std::vector<double>& bias,
                   Matrix& probs);
void softmax_grad(const Matrix& x, const std::vector<int>& labels, const Matrix& probs,
                  const Matrix& w, double l2, Matrix& grad_w, std::vector<double>& grad_b);
void class_mean(const Matrix& x, const std::vector<int>& labels, int num_classes,
                Matrix& means, std::vector<long long>& counts);

}  // namespace otx::kernels
