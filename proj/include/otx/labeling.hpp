#pragma once

#include <cstdint>
#include <vector>

#include "otx/datamodel.hpp"

namespace otx {

/// Per-class feature means with support counts; empty classes come back
/// flagged undefined rather than as zero rows.
PrototypeBank build_prototypes(const EmbeddingSet& embeddings, const std::vector<int>& labels,
                               int num_classes);
PrototypeBank build_prototypes(const Matrix& features, const std::vector<int>& labels,
                               int num_classes);

/// Row argmax of the plan; ties break to the lowest class index.
std::vector<int> pseudo_label(const TransportPlan& t);

/// Row-normalized plan. Rows sum to 1; argmax per row matches pseudo_label.
Matrix soft_scores(const TransportPlan& t);

struct CleanFilterResult {
    std::vector<std::size_t> kept_rows;
    std::vector<std::uint64_t> kept_ids;
    std::vector<int> kept_labels;  // equals the observed label on the kept set
};

/// Agreement filter: keep sample i iff observed[i] == pseudo[i]. An empty
/// result is valid.
CleanFilterResult filter_clean(const std::vector<int>& observed, const std::vector<int>& pseudo,
                               const std::vector<std::uint64_t>& ids);

/// EMA blend alpha * old + (1 - alpha) * current per class. Classes whose
/// current prototype is undefined carry the old row forward unchanged.
PrototypeBank calibrate_prototypes(const PrototypeBank& old_bank, const PrototypeBank& current,
                                   double alpha);

}  // namespace otx
