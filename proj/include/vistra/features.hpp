#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vistra/graph.hpp"

namespace vistra::features {

/// Weisfeiler-Lehman subtree histogram settings.
struct WlConfig {
    std::size_t h = 3;      // relabeling rounds
    std::size_t dim = 128;  // histogram buckets
};

/// 64-bit FNV-1a over the little-endian bytes of `words`.
/// Offset basis 0xcbf29ce484222325, prime 0x100000001b3.
std::uint64_t fnv1a64(std::span<const std::uint64_t> words);

/// Per-round WL labels: round 0 is fnv1a64({degree}); round r+1 is
/// fnv1a64({own label, sorted neighbor labels...}).
std::vector<std::vector<std::uint64_t>> wl_labels(const Graph& g, std::size_t h);

/// L2-normalized histogram of all labels from rounds 0..h, label L going to
/// bucket L % dim. Throws std::invalid_argument on a graph with no nodes or dim == 0.
std::vector<double> wl_embed(const Graph& g, const WlConfig& cfg);

/// Horizontal concatenation in the given order.
std::vector<double> fuse(std::span<const std::vector<double>> parts);

/// Origin of one feature column.
struct ColumnMeta {
    std::string channel;
    int order = 0;          // 0 = visibility graph, 1 = SGN
    std::size_t window = 0; // peak-detection window, 0 = uncompressed
    std::size_t index = 0;  // position inside the per-graph embedding

    std::string name() const;
    static ColumnMeta parse(const std::string& name);
    friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

/// One row per signal.
struct FeatureMatrix {
    Eigen::MatrixXd rows;
    std::vector<std::string> labels;
    std::vector<std::optional<double>> snr_db;
    std::vector<ColumnMeta> columns;

    std::size_t row_count() const { return static_cast<std::size_t>(rows.rows()); }
    std::size_t col_count() const { return static_cast<std::size_t>(rows.cols()); }

    /// Throws std::invalid_argument when the parts are not aligned.
    void validate() const;

    FeatureMatrix select_rows(std::span<const std::size_t> idx) const;
};

/// Column-wise concatenation of matrices sharing rows and labels.
FeatureMatrix hconcat(std::span<const FeatureMatrix> parts);

/// CSV layout: header "label,snr_db,<column names...>", one row per signal,
/// empty snr_db when unknown. Doubles use shortest round-trip formatting.
void write_csv(const FeatureMatrix& fm, std::ostream& out);
void write_csv(const FeatureMatrix& fm, const std::filesystem::path& path);
FeatureMatrix read_csv(std::istream& in);
FeatureMatrix read_csv(const std::filesystem::path& path);

}  // namespace vistra::features
