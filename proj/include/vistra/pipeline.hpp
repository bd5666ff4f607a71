#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "vistra/evaluation.hpp"
#include "vistra/features.hpp"
#include "vistra/forest.hpp"
#include "vistra/graph.hpp"
#include "vistra/visibility.hpp"

namespace vistra::pipeline {

struct EvaluationMode {
    enum class Kind { Split, CrossValidation } kind = Kind::Split;
    double ratio = 0.8;
    std::size_t k = 10;
};

struct PipelineConfig {
    std::filesystem::path dataset;
    std::string format = "jsonl";
    std::vector<std::string> channels;
    std::map<std::string, double> channel_alpha;  // overrides method.alpha per channel
    visibility::VgParams method;
    std::vector<std::size_t> windows;  // empty: no compression
    bool sgn = true;
    features::WlConfig wl;
    std::optional<std::size_t> pca_theta;
    std::optional<double> pca_variance = 0.95;  // used when theta is unset; empty disables PCA
    classify::ForestParams classifier;
    EvaluationMode evaluation;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;

    double alpha_for(const std::string& channel) const;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

/// Reads a config document. Relative paths resolve against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const PipelineConfig& cfg);

/// Raised when a stage fails; what() names the stage and the signal.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, std::string signal_id, const std::string& detail);
    const std::string& stage() const { return stage_; }
    const std::string& signal_id() const { return signal_id_; }
    enum class Cause { Data, Numeric } cause = Cause::Data;

private:
    std::string stage_;
    std::string signal_id_;
};

struct PipelineResult {
    classify::EvalReport report;
    std::size_t fused_width = 0;
    std::size_t reduced_width = 0;
    std::vector<std::filesystem::path> artifacts;  // relative to out_dir
};

/// Graph of one channel of one signal at one window.
Graph channel_graph(const TimeSeries& series, std::size_t window, const visibility::VgParams& params);

/// Fused embedding of one signal at one window: every channel's graph
/// embedding, then (with sgn) every channel's SGN embedding.
std::vector<double> signal_features(const MultiChannelSignal& signal, const PipelineConfig& cfg, std::size_t window);

/// Ensures A and W exist when requested and I/Q are present.
MultiChannelSignal with_derived_channels(const MultiChannelSignal& signal, const std::vector<std::string>& wanted);

/// Runs every stage and persists artifacts plus manifest.json under out_dir.
PipelineResult run_pipeline(const PipelineConfig& cfg);

/// Plotting helpers: "degree,count" rows, and "snr_db,accuracy,count" rows.
void write_degree_histogram_csv(const DegreeDistribution& dist, const std::filesystem::path& path);
void write_accuracy_vs_snr_csv(const classify::EvalReport& report, const std::filesystem::path& path);

/// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::filesystem::path& path);

}  // namespace vistra::pipeline
