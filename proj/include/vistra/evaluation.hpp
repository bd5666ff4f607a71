#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "vistra/features.hpp"
#include "vistra/forest.hpp"

namespace vistra::classify {

struct ClassScore {
    double precision = 0.0;
    double recall = 0.0;
};

struct SnrScore {
    double accuracy = 0.0;
    std::size_t count = 0;
};

struct EvalReport {
    std::vector<std::string> classes;
    /// confusion[true][predicted]
    std::vector<std::vector<std::size_t>> confusion;
    double accuracy = 0.0;  // trace / total of `confusion`
    std::map<std::string, ClassScore> per_class;
    std::vector<double> fold_accuracies;
    std::optional<double> mean_fold_accuracy;
    std::map<double, SnrScore> per_snr;

    std::size_t total() const;
};

/// Builds a report from aligned truth/prediction lists. `snr` may be empty.
EvalReport make_report(const std::vector<std::string>& classes, const std::vector<std::string>& truth,
                       const std::vector<std::string>& predicted,
                       const std::vector<std::optional<double>>& snr = {});

/// Stratified split: each class contributes round(ratio * n_c) rows to the
/// training side, clamped so both sides are non-empty.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    const std::vector<std::string>& labels, double ratio, std::uint64_t seed);

std::pair<features::FeatureMatrix, features::FeatureMatrix> split_train_test(
    const features::FeatureMatrix& x, double ratio, std::uint64_t seed);

/// Stratified fold assignment: each class is shuffled and dealt round-robin,
/// continuing the deal where the previous class stopped.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<std::string>& labels, std::size_t k,
                                                       std::uint64_t seed);

/// Trains on the training side, evaluates on the test side, with per-SNR
/// accuracy when the test rows carry SNR tags.
EvalReport evaluate_split(const features::FeatureMatrix& x, double ratio, const ForestParams& params,
                          std::uint64_t seed);

/// Stratified k-fold CV. `accuracy` pools all out-of-fold predictions;
/// per-fold values and their mean are reported alongside.
EvalReport kfold_cv(const features::FeatureMatrix& x, std::size_t k, const ForestParams& params,
                    std::uint64_t seed);

nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

/// Fixed-width plain-text summary.
std::string summary_table(const EvalReport& report);

}  // namespace vistra::classify
