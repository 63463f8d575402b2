#pragma once

#include <cstdint>
#include <vector>

#include "otx/datamodel.hpp"

namespace otx {

/// Effective-number weights: entries proportional to (1-beta)/(1-beta^N_j),
/// normalized to sum 1. beta = 0 reduces to uniform; beta -> 1 approaches
/// inverse class frequency. Classes with zero support are excluded and the
/// remainder renormalized, unless `defined` marks such a class as live, in
/// which case EmptyClass is thrown.
ClassWeights effective_number_weights(const std::vector<long long>& support, double beta,
                                      const std::vector<std::uint8_t>* defined = nullptr);

/// Inverse-frequency weights: entries proportional to 1/N_j^r.
ClassWeights inverse_frequency_weights(const std::vector<long long>& support, double r,
                                       const std::vector<std::uint8_t>* defined = nullptr);

/// 1/K for every class.
ClassWeights uniform_weights(int num_classes);

}  // namespace otx
