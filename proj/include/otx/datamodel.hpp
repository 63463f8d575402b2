#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "otx/errors.hpp"
#include "otx/matrix.hpp"

namespace otx {

/// Immutable n x d feature matrix with per-row sample ids.
class EmbeddingSet {
public:
    /// Validates on construction: n >= 1, d >= 1, finite entries, unique ids
    /// aligned with rows.
    EmbeddingSet(std::vector<std::uint64_t> ids, Matrix features);

    std::size_t size() const { return features_.rows(); }
    std::size_t dim() const { return features_.cols(); }
    const std::vector<std::uint64_t>& ids() const { return ids_; }
    const Matrix& features() const { return features_; }

private:
    std::vector<std::uint64_t> ids_;
    Matrix features_;
};

/// Observed labels, optional ground-truth labels, and the class count K.
class LabelTable {
public:
    LabelTable(std::vector<int> observed, std::optional<std::vector<int>> truth,
               int num_classes);

    std::size_t size() const { return observed_.size(); }
    int num_classes() const { return num_classes_; }
    const std::vector<int>& observed() const { return observed_; }
    bool has_truth() const { return truth_.has_value(); }
    const std::vector<int>& truth() const;

private:
    std::vector<int> observed_;
    std::optional<std::vector<int>> truth_;
    int num_classes_;
};

/// K x d prototype matrix with per-class support counts. A class whose
/// support never became positive is flagged undefined; operations must
/// reject undefined prototypes instead of consuming a stale zero row.
class PrototypeBank {
public:
    /// defined[j] defaults to support[j] > 0.
    PrototypeBank(Matrix prototypes, std::vector<long long> support);
    PrototypeBank(Matrix prototypes, std::vector<long long> support,
                  std::vector<std::uint8_t> defined);

    int num_classes() const { return static_cast<int>(prototypes_.rows()); }
    std::size_t dim() const { return prototypes_.cols(); }
    const Matrix& prototypes() const { return prototypes_; }
    const std::vector<long long>& support() const { return support_; }
    const std::vector<std::uint8_t>& defined() const { return defined_; }
    bool is_defined(int cls) const { return defined_[static_cast<std::size_t>(cls)] != 0; }
    bool all_defined() const;

    /// Copy with replaced support counts (prototype rows untouched).
    PrototypeBank with_support(std::vector<long long> support) const;

private:
    Matrix prototypes_;
    std::vector<long long> support_;
    std::vector<std::uint8_t> defined_;
};

/// Nonnegative n x K plan with prescribed marginals, as returned by the
/// solvers. `converged` is false when the iteration budget ran out; the
/// plan is still usable and `marginal_violation` holds the achieved
/// residual.
struct TransportPlan {
    Matrix plan;
    std::vector<double> row_marginal;
    std::vector<double> col_marginal;
    double regularization = 0.0;
    int iterations_used = 0;
    double marginal_violation = 0.0;
    bool converged = true;
};

enum class WeightScheme { kUniform, kEffectiveNumber, kInverseFrequency };

/// Probability vector over class prototypes. `classes[i]` is the class
/// index weights[i] belongs to; classes excluded before normalization
/// (zero support) are listed in `excluded`.
struct ClassWeights {
    std::vector<double> weights;
    std::vector<int> classes;
    std::vector<int> excluded;
    WeightScheme scheme = WeightScheme::kUniform;
    double param = 0.0;
};

struct SubsetStats {
    std::optional<double> imbalance_factor;  // empty subset has no IF
    std::optional<double> noise_ratio;       // only when truth is available
    std::vector<long long> per_class_counts;
};

/// Clean-subset extraction output: the kept ids, the pseudo-label for
/// every input sample, and the retained label per kept sample.
struct ExtractionResult {
    std::vector<std::uint64_t> kept_ids;
    std::vector<std::size_t> kept_rows;  // row indices into the input set, ascending
    std::vector<int> pseudo_labels;      // one per input sample
    std::vector<int> kept_labels;        // one per kept sample, equals observed there
    int epoch = 0;
    SubsetStats stats;
};

/// Cross-type validation of an embedding/label pair. Total: returns
/// normally iff all invariants hold, otherwise throws a typed error.
void validate_dataset(const EmbeddingSet& embeddings, const LabelTable& labels);

}  // namespace otx
