#include "otx/classifier.hpp"

#include <cmath>
#include <string>

#include "otx/kernels.hpp"

namespace otx {

namespace {

double loss_from_probs(const Matrix& probs, const std::vector<int>& labels, const Matrix& w,
                       double l2) {
    double ce = 0.0;
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        ce -= std::log(probs(i, static_cast<std::size_t>(labels[i])));
    }
    ce /= static_cast<double>(probs.rows());
    double penalty = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) penalty += w.data()[t] * w.data()[t];
    return ce + 0.5 * l2 * penalty;
}

double default_step(const Matrix& features, double l2) {
    std::vector<double> norms;
    kernels::row_norms(features, norms);
    double max_sq = 0.0;
    for (double v : norms) max_sq = std::max(max_sq, v * v);
    return 1.0 / (max_sq + l2 + 1e-12);
}

void check_labels(const std::vector<int>& labels, int num_classes) {
    for (int y : labels) {
        if (y < 0 || y >= num_classes) {
            throw LabelOutOfRange("train_softmax: label " + std::to_string(y) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
        }
    }
}

}  // namespace

LinearModel train_softmax(const Matrix& features, const std::vector<int>& labels,
                          int num_classes, const TrainConfig& cfg) {
    if (features.rows() == 0) {
        throw EmptySubset("train_softmax: no training samples");
    }
    if (labels.size() != features.rows()) {
        throw LengthMismatch("train_softmax: label count differs from row count");
    }
    check_labels(labels, num_classes);

    const std::size_t k = static_cast<std::size_t>(num_classes), d = features.cols();
    double step = cfg.step > 0.0 ? cfg.step : default_step(features, cfg.l2);

    LinearModel model;
    model.weights = Matrix(k, d, 0.0);
    model.bias.assign(k, 0.0);
    model.training_log.reserve(static_cast<std::size_t>(cfg.epochs) + 1);

    Matrix probs(features.rows(), k);
    Matrix grad_w(k, d);
    std::vector<double> grad_b(k);
    for (int e = 0; e < cfg.epochs; ++e) {
        kernels::softmax_probs(features, model.weights, model.bias, probs);
        model.training_log.push_back(loss_from_probs(probs, labels, model.weights, cfg.l2));
        kernels::softmax_grad(features, labels, probs, model.weights, cfg.l2, grad_w, grad_b);
        for (std::size_t t = 0; t < model.weights.size(); ++t) {
            model.weights.data()[t] -= step * grad_w.data()[t];
        }
        for (std::size_t c = 0; c < k; ++c) model.bias[c] -= step * grad_b[c];
    }
    kernels::softmax_probs(features, model.weights, model.bias, probs);
    model.training_log.push_back(loss_from_probs(probs, labels, model.weights, cfg.l2));
    if (!model.weights.all_finite()) {
        throw Error("train_softmax: parameters diverged, reduce the step size");
    }
    return model;
}

LinearModel train_softmax(const ExtractionResult& subset, const EmbeddingSet& embeddings,
                          int num_classes, const TrainConfig& cfg) {
    if (subset.kept_rows.empty()) {
        throw EmptySubset("train_softmax: extraction result kept no samples");
    }
    Matrix x(subset.kept_rows.size(), embeddings.dim());
    for (std::size_t t = 0; t < subset.kept_rows.size(); ++t) {
        const double* src = embeddings.features().row(subset.kept_rows[t]);
        double* dst = x.row(t);
        for (std::size_t c = 0; c < embeddings.dim(); ++c) dst[c] = src[c];
    }
    return train_softmax(x, subset.kept_labels, num_classes, cfg);
}

double softmax_loss(const LinearModel& model, const Matrix& features,
                    const std::vector<int>& labels, double l2) {
    Matrix probs(features.rows(), model.weights.rows());
    kernels::softmax_probs(features, model.weights, model.bias, probs);
    return loss_from_probs(probs, labels, model.weights, l2);
}

std::vector<int> predict(const LinearModel& model, const Matrix& features) {
    if (features.cols() != model.weights.cols()) {
        throw ShapeMismatch("predict: feature dimension differs from model dimension");
    }
    const std::size_t k = model.weights.rows();
    Matrix probs(features.rows(), k);
    kernels::softmax_probs(features, model.weights, model.bias, probs);
    std::vector<int> labels(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const double* row = probs.row(i);
        int arg = 0;
        for (std::size_t j = 1; j < k; ++j) {
            if (row[j] > row[static_cast<std::size_t>(arg)]) arg = static_cast<int>(j);
        }
        labels[i] = arg;
    }
    return labels;
}

std::vector<int> nearest_prototype_predict(const PrototypeBank& bank,
                                           const EmbeddingSet& embeddings, CostMetric metric) {
    if (!bank.all_defined()) {
        throw UndefinedPrototype("nearest_prototype_predict: bank has undefined prototypes");
    }
    Matrix dist = cost_matrix(metric, embeddings.features(), bank.prototypes());
    std::vector<int> labels(dist.rows());
    for (std::size_t i = 0; i < dist.rows(); ++i) {
        const double* row = dist.row(i);
        int arg = 0;
        for (std::size_t j = 1; j < dist.cols(); ++j) {
            if (row[j] < row[static_cast<std::size_t>(arg)]) arg = static_cast<int>(j);
        }
        labels[i] = static_cast<int>(arg);
    }
    return labels;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size()) {
        throw LengthMismatch("accuracy: length mismatch");
    }
    if (predicted.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == truth[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace otx
