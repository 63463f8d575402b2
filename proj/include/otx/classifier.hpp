#pragma once

#include <vector>

#include "otx/cost.hpp"
#include "otx/datamodel.hpp"

namespace otx {

/// Linear softmax classifier state plus the recorded loss trajectory.
struct LinearModel {
    Matrix weights;              // K x d
    std::vector<double> bias;    // K
    std::vector<double> training_log;  // loss before each step, then the final loss
};

struct TrainConfig {
    int epochs = 200;
    double step = 0.0;  // <= 0 selects 1 / (max ||x||^2 + l2)
    double l2 = 1e-4;
};

/// Full-batch gradient descent from zero initialization on the mean
/// cross-entropy objective with an l2/2 * ||W||^2 penalty. Deterministic:
/// no randomness anywhere in the update path.
LinearModel train_softmax(const Matrix& features, const std::vector<int>& labels,
                          int num_classes, const TrainConfig& cfg = {});

/// Convenience wrapper over the kept rows of an extraction result.
LinearModel train_softmax(const ExtractionResult& subset, const EmbeddingSet& embeddings,
                          int num_classes, const TrainConfig& cfg = {});

/// Mean cross-entropy plus l2 penalty of the model on the given data.
double softmax_loss(const LinearModel& model, const Matrix& features,
                    const std::vector<int>& labels, double l2);

/// Argmax of the logits, lowest class index on ties.
std::vector<int> predict(const LinearModel& model, const Matrix& features);

/// Per-sample argmin distance to the prototypes, lowest index on ties.
std::vector<int> nearest_prototype_predict(const PrototypeBank& bank,
                                           const EmbeddingSet& embeddings, CostMetric metric);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace otx
