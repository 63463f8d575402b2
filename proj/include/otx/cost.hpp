#pragma once

#include "otx/datamodel.hpp"

namespace otx {

enum class CostMetric { kCosine, kEuclidean };

/// D(i,j) = 1 - cos(z_i, c_j), entries in [0, 2]. Rows with norm below
/// 1e-12 on either side are a hard error; a zero prototype means an empty
/// class slipped through upstream.
Matrix cosine_cost(const Matrix& features, const Matrix& prototypes);

/// D(i,j) = ||z_i - c_j||_2.
Matrix euclidean_cost(const Matrix& features, const Matrix& prototypes);

/// Bank-level overloads; reject banks with undefined prototypes.
Matrix cosine_cost(const EmbeddingSet& embeddings, const PrototypeBank& bank);
Matrix euclidean_cost(const EmbeddingSet& embeddings, const PrototypeBank& bank);

Matrix cost_matrix(CostMetric metric, const Matrix& features, const Matrix& prototypes);

}  // namespace otx
