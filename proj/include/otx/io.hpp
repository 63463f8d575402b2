#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otx/datamodel.hpp"

namespace otx {

/// Binary embedding format: magic "OTSB", little-endian u32 version = 1,
/// u32 n, u32 d, then n*d little-endian float32 values row-major. Values
/// are widened to double on load.
void write_embeddings(const std::string& path, const EmbeddingSet& embeddings);
EmbeddingSet read_embeddings(const std::string& path);

/// Label CSV: header "id,observed[,truth]", integer fields, LF endings.
void write_labels_csv(const std::string& path, const std::vector<std::uint64_t>& ids,
                      const std::vector<int>& observed,
                      const std::optional<std::vector<int>>& truth);

struct LabelFile {
    std::vector<std::uint64_t> ids;
    std::vector<int> observed;
    std::optional<std::vector<int>> truth;
};

LabelFile read_labels_csv(const std::string& path);

/// K from a label file: the given override, or 1 + the largest label seen.
int infer_num_classes(const LabelFile& labels, int override_classes = 0);

/// Subset CSV: header "id,pseudo_label,kept" covering the whole training
/// set; kept = 1 rows form the extracted subset.
void write_subset_csv(const std::string& path, const std::vector<std::uint64_t>& ids,
                      const std::vector<int>& pseudo_labels,
                      const std::vector<std::uint8_t>& kept);

struct SubsetFile {
    std::vector<std::uint64_t> ids;
    std::vector<int> pseudo_labels;
    std::vector<std::uint8_t> kept;
};

SubsetFile read_subset_csv(const std::string& path);

/// Numeric CSV without header, one matrix row per line.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

/// One value per line (or comma separated) vector file.
std::vector<double> read_vector_file(const std::string& path);

}  // namespace otx
