#include "otx/cost.hpp"

#include <string>

#include "otx/kernels.hpp"

namespace otx {

namespace {

constexpr double kMinNorm = 1e-12;

std::vector<double> checked_inverse_norms(const Matrix& m, const char* what) {
    std::vector<double> norms;
    kernels::row_norms(m, norms);
    for (std::size_t i = 0; i < norms.size(); ++i) {
        if (norms[i] < kMinNorm) {
            throw ZeroNormVector(std::string("cosine_cost: ") + what + " " +
                                 std::to_string(i) + " has norm below 1e-12");
        }
        norms[i] = 1.0 / norms[i];
    }
    return norms;
}

void require_defined(const PrototypeBank& bank) {
    for (int j = 0; j < bank.num_classes(); ++j) {
        if (!bank.is_defined(j)) {
            throw UndefinedPrototype("cost: prototype for class " + std::to_string(j) +
                                     " is undefined");
        }
    }
}

void require_same_dim(const Matrix& features, const Matrix& prototypes) {
    if (features.cols() != prototypes.cols()) {
        throw ShapeMismatch("cost: feature dimension " + std::to_string(features.cols()) +
                            " vs prototype dimension " + std::to_string(prototypes.cols()));
    }
}

}  // namespace

Matrix cosine_cost(const Matrix& features, const Matrix& prototypes) {
    require_same_dim(features, prototypes);
    auto inv_x = checked_inverse_norms(features, "sample row");
    auto inv_c = checked_inverse_norms(prototypes, "prototype");
    Matrix out(features.rows(), prototypes.rows());
    kernels::cosine_cost(features, prototypes, inv_x, inv_c, out);
    return out;
}

Matrix euclidean_cost(const Matrix& features, const Matrix& prototypes) {
    require_same_dim(features, prototypes);
    Matrix out(features.rows(), prototypes.rows());
    kernels::euclidean_cost(features, prototypes, out);
    return out;
}

Matrix cosine_cost(const EmbeddingSet& embeddings, const PrototypeBank& bank) {
    require_defined(bank);
    return cosine_cost(embeddings.features(), bank.prototypes());
}

Matrix euclidean_cost(const EmbeddingSet& embeddings, const PrototypeBank& bank) {
    require_defined(bank);
    return euclidean_cost(embeddings.features(), bank.prototypes());
}

Matrix cost_matrix(CostMetric metric, const Matrix& features, const Matrix& prototypes) {
    return metric == CostMetric::kCosine ? cosine_cost(features, prototypes)
                                         : euclidean_cost(features, prototypes);
}

}  // namespace otx
