#include "otx/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace otx {

namespace {

constexpr char kMagic[4] = {'O', 'T', 'S', 'B'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw IoError("truncated embedding file: " + path);
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ofstream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    unsigned char b[4] = {static_cast<unsigned char>(bits & 0xff),
                          static_cast<unsigned char>((bits >> 8) & 0xff),
                          static_cast<unsigned char>((bits >> 16) & 0xff),
                          static_cast<unsigned char>((bits >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

long long parse_int(const std::string& s, const std::string& path) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("bad integer field '" + s + "' in " + path);
    }
}

}  // namespace

void write_embeddings(const std::string& path, const EmbeddingSet& embeddings) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(embeddings.size()));
    put_u32(out, static_cast<std::uint32_t>(embeddings.dim()));
    const Matrix& f = embeddings.features();
    for (std::size_t i = 0; i < f.size(); ++i) {
        put_f32(out, static_cast<float>(f.data()[i]));
    }
    if (!out) throw IoError("write failed: " + path);
}

EmbeddingSet read_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("not an OTSB embedding file: " + path);
    }
    std::uint32_t version = get_u32(in, path);
    if (version != kVersion) {
        throw IoError("unsupported OTSB version " + std::to_string(version) + ": " + path);
    }
    std::uint32_t n = get_u32(in, path);
    std::uint32_t d = get_u32(in, path);
    Matrix features(n, d);
    std::vector<unsigned char> buf(static_cast<std::size_t>(4) * d);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!in.read(reinterpret_cast<char*>(buf.data()),
                     static_cast<std::streamsize>(buf.size()))) {
            throw IoError("truncated embedding file: " + path);
        }
        for (std::uint32_t j = 0; j < d; ++j) {
            std::uint32_t bits = static_cast<std::uint32_t>(buf[4 * j]) |
                                 (static_cast<std::uint32_t>(buf[4 * j + 1]) << 8) |
                                 (static_cast<std::uint32_t>(buf[4 * j + 2]) << 16) |
                                 (static_cast<std::uint32_t>(buf[4 * j + 3]) << 24);
            float v;
            std::memcpy(&v, &bits, 4);
            features(i, j) = static_cast<double>(v);
        }
    }
    std::vector<std::uint64_t> ids(n);
    for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
    return EmbeddingSet(std::move(ids), std::move(features));
}

void write_labels_csv(const std::string& path, const std::vector<std::uint64_t>& ids,
                      const std::vector<int>& observed,
                      const std::optional<std::vector<int>>& truth) {
    if (ids.size() != observed.size() || (truth && truth->size() != ids.size())) {
        throw LengthMismatch("write_labels_csv: column lengths differ");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << (truth ? "id,observed,truth\n" : "id,observed\n");
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i] << ',' << observed[i];
        if (truth) out << ',' << (*truth)[i];
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

LabelFile read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty label file: " + path);
    auto header = split_csv_line(line);
    bool has_truth = header.size() == 3 && header[2] == "truth";
    if (!(header.size() == 2 || has_truth) || header[0] != "id" || header[1] != "observed") {
        throw IoError("bad label header in " + path + ", expected id,observed[,truth]");
    }
    LabelFile out;
    if (has_truth) out.truth.emplace();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw IoError("bad label row '" + line + "' in " + path);
        }
        out.ids.push_back(static_cast<std::uint64_t>(parse_int(fields[0], path)));
        out.observed.push_back(static_cast<int>(parse_int(fields[1], path)));
        if (has_truth) out.truth->push_back(static_cast<int>(parse_int(fields[2], path)));
    }
    return out;
}

int infer_num_classes(const LabelFile& labels, int override_classes) {
    if (override_classes > 0) return override_classes;
    int max_label = -1;
    for (int y : labels.observed) max_label = std::max(max_label, y);
    if (labels.truth) {
        for (int y : *labels.truth) max_label = std::max(max_label, y);
    }
    if (max_label < 0) throw IoError("cannot infer the class count from an empty label file");
    return max_label + 1;
}

void write_subset_csv(const std::string& path, const std::vector<std::uint64_t>& ids,
                      const std::vector<int>& pseudo_labels,
                      const std::vector<std::uint8_t>& kept) {
    if (ids.size() != pseudo_labels.size() || ids.size() != kept.size()) {
        throw LengthMismatch("write_subset_csv: column lengths differ");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "id,pseudo_label,kept\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i] << ',' << pseudo_labels[i] << ',' << static_cast<int>(kept[i]) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

SubsetFile read_subset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty subset file: " + path);
    auto header = split_csv_line(line);
    if (header.size() != 3 || header[0] != "id" || header[1] != "pseudo_label" ||
        header[2] != "kept") {
        throw IoError("bad subset header in " + path + ", expected id,pseudo_label,kept");
    }
    SubsetFile out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 3) throw IoError("bad subset row '" + line + "' in " + path);
        out.ids.push_back(static_cast<std::uint64_t>(parse_int(fields[0], path)));
        out.pseudo_labels.push_back(static_cast<int>(parse_int(fields[1], path)));
        long long kept = parse_int(fields[2], path);
        if (kept != 0 && kept != 1) throw IoError("kept flag must be 0 or 1 in " + path);
        out.kept.push_back(static_cast<std::uint8_t>(kept));
    }
    return out;
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(f, &pos));
                if (pos != f.size()) throw std::invalid_argument(f);
            } catch (const std::exception&) {
                throw IoError("bad numeric field '" + f + "' in " + path);
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw IoError("ragged rows in " + path);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("empty matrix file: " + path);
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    char buf[64];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<double> read_vector_file(const std::string& path) {
    Matrix m = read_matrix_csv(path);
    std::vector<double> v;
    v.reserve(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) v.push_back(m.data()[i]);
    return v;
}

}  // namespace otx
