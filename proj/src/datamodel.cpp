#include "otx/datamodel.hpp"

#include <string>
#include <unordered_set>

namespace otx {

EmbeddingSet::EmbeddingSet(std::vector<std::uint64_t> ids, Matrix features)
    : ids_(std::move(ids)), features_(std::move(features)) {
    if (features_.rows() == 0 || features_.cols() == 0) {
        throw DimensionMismatch("EmbeddingSet: need at least one row and one column");
    }
    if (ids_.size() != features_.rows()) {
        throw DimensionMismatch("EmbeddingSet: " + std::to_string(ids_.size()) +
                                " ids for " + std::to_string(features_.rows()) + " rows");
    }
    if (!features_.all_finite()) {
        throw NonFiniteFeature("EmbeddingSet: features contain NaN or Inf");
    }
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(ids_.size());
    for (std::uint64_t id : ids_) {
        if (!seen.insert(id).second) {
            throw DimensionMismatch("EmbeddingSet: duplicate id " + std::to_string(id));
        }
    }
}

LabelTable::LabelTable(std::vector<int> observed, std::optional<std::vector<int>> truth,
                       int num_classes)
    : observed_(std::move(observed)), truth_(std::move(truth)), num_classes_(num_classes) {
    if (num_classes_ < 1) {
        throw LabelOutOfRange("LabelTable: num_classes must be positive");
    }
    if (observed_.empty()) {
        throw DimensionMismatch("LabelTable: empty label sequence");
    }
    auto check = [this](const std::vector<int>& labels, const char* what) {
        for (int y : labels) {
            if (y < 0 || y >= num_classes_) {
                throw LabelOutOfRange(std::string("LabelTable: ") + what + " label " +
                                      std::to_string(y) + " outside [0, " +
                                      std::to_string(num_classes_) + ")");
            }
        }
    };
    check(observed_, "observed");
    if (truth_.has_value()) {
        if (truth_->size() != observed_.size()) {
            throw DimensionMismatch("LabelTable: truth length differs from observed");
        }
        check(*truth_, "truth");
    }
}

const std::vector<int>& LabelTable::truth() const {
    if (!truth_.has_value()) {
        throw MissingTruth("LabelTable: ground-truth labels not available");
    }
    return *truth_;
}

PrototypeBank::PrototypeBank(Matrix prototypes, std::vector<long long> support)
    : PrototypeBank(std::move(prototypes), std::move(support), {}) {}

PrototypeBank::PrototypeBank(Matrix prototypes, std::vector<long long> support,
                             std::vector<std::uint8_t> defined)
    : prototypes_(std::move(prototypes)),
      support_(std::move(support)),
      defined_(std::move(defined)) {
    if (prototypes_.rows() == 0 || prototypes_.cols() == 0) {
        throw DimensionMismatch("PrototypeBank: need at least one class and one dimension");
    }
    if (support_.size() != prototypes_.rows()) {
        throw DimensionMismatch("PrototypeBank: support length differs from class count");
    }
    if (!prototypes_.all_finite()) {
        throw NonFiniteFeature("PrototypeBank: prototypes contain NaN or Inf");
    }
    for (long long c : support_) {
        if (c < 0) throw DimensionMismatch("PrototypeBank: negative support count");
    }
    if (defined_.empty()) {
        defined_.resize(support_.size());
        for (std::size_t j = 0; j < support_.size(); ++j) {
            defined_[j] = support_[j] > 0 ? 1 : 0;
        }
    } else if (defined_.size() != support_.size()) {
        throw DimensionMismatch("PrototypeBank: defined-flag length differs from class count");
    }
}

bool PrototypeBank::all_defined() const {
    for (std::uint8_t d : defined_) {
        if (!d) return false;
    }
    return true;
}

PrototypeBank PrototypeBank::with_support(std::vector<long long> support) const {
    return PrototypeBank(prototypes_, std::move(support), defined_);
}

void validate_dataset(const EmbeddingSet& embeddings, const LabelTable& labels) {
    if (labels.size() != embeddings.size()) {
        throw DimensionMismatch("dataset: " + std::to_string(embeddings.size()) +
                                " embeddings vs " + std::to_string(labels.size()) + " labels");
    }
    if (!embeddings.features().all_finite()) {
        throw NonFiniteFeature("dataset: features contain NaN or Inf");
    }
    for (int y : labels.observed()) {
        if (y < 0 || y >= labels.num_classes()) {
            throw LabelOutOfRange("dataset: observed label " + std::to_string(y) +
                                  " outside [0, " + std::to_string(labels.num_classes()) + ")");
        }
    }
    if (labels.has_truth() && labels.truth().size() != embeddings.size()) {
        throw DimensionMismatch("dataset: truth length differs from embedding count");
    }
}

}  // namespace otx
