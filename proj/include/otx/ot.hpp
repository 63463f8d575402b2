#pragma once

#include <vector>

#include "otx/datamodel.hpp"

namespace otx {

struct SinkhornConfig {
    double gamma = 1e-2;
    int max_iterations = 1000;
    double tolerance = 1e-9;  // max-norm marginal residual
    bool stabilized = true;   // log-domain updates
};

/// Entropy-regularized OT between the row marginal `a` and column marginal
/// `b`. Alternates column and row scalings; the row constraint is
/// satisfied exactly after each sweep and the column residual in max-norm
/// is the convergence measure. Returns a best-effort plan with
/// `converged = false` when the iteration budget runs out.
TransportPlan sinkhorn(const Matrix& cost, const std::vector<double>& a,
                       const std::vector<double>& b, const SinkhornConfig& cfg = {});

TransportPlan sinkhorn(const Matrix& cost, const std::vector<double>& a,
                       const ClassWeights& b, const SinkhornConfig& cfg = {});

struct ExactPlan {
    Matrix plan;
    double cost = 0.0;
};

/// Unregularized transportation LP solved exactly with the transportation
/// simplex (north-west-corner start, MODI pricing, Bland entering rule,
/// epsilon-perturbed supplies against degeneracy). Small instances only:
/// n*K must not exceed 1024.
ExactPlan exact_ot(const Matrix& cost, const std::vector<double>& a,
                   const std::vector<double>& b);

struct PlanObjective {
    double transport_cost = 0.0;        // <T, D>
    double entropy = 0.0;               // H(T) with 0*log(0) = 0
    double regularized_objective = 0.0; // <T, D> - gamma * H(T)
};

PlanObjective plan_objective(const TransportPlan& t, const Matrix& cost);

}  // namespace otx
