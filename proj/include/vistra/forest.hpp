#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vistra/features.hpp"

namespace vistra::classify {

struct ForestParams {
    std::size_t n_trees = 200;
    std::optional<std::size_t> max_depth;  // unlimited when empty
    std::size_t min_leaf = 1;
    /// Features tried per split: empty means sqrt(cols), otherwise
    /// ceil(fraction * cols) with fraction in (0, 1].
    std::optional<double> feature_frac;
    std::uint64_t seed = 0;
};

/// Parses "sqrt" or a fraction in (0, 1].
std::optional<double> parse_feature_frac(const std::string& s);

/// Flat CART tree. Internal nodes send rows with x[feature] <= threshold left.
struct Tree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int label = 0;     // majority class (leaf prediction)
    };
    std::vector<Node> nodes;

    int predict(const double* row) const;
};

struct ForestModel {
    std::vector<std::string> classes;  // sorted; class index = position
    std::size_t n_features = 0;
    std::vector<Tree> trees;
};

/// Bagged Gini CART trees. Tree i draws its bootstrap sample and feature
/// subsets from a generator seeded with seed ^ i. Split ties keep the lowest
/// feature index, then the lowest threshold.
/// Throws std::invalid_argument on fewer than two classes or two rows.
ForestModel rf_train(const features::FeatureMatrix& x, const ForestParams& params);

/// Majority vote; ties go to the smallest label.
std::vector<std::string> rf_predict(const ForestModel& model, const Eigen::MatrixXd& x);

/// Single CART tree on an explicit (possibly repeating) row list; `rng`
/// drives per-split feature sampling only.
Tree train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y, std::size_t n_classes,
                const std::vector<std::size_t>& rows, const ForestParams& params, std::mt19937_64& rng);

}  // namespace vistra::classify
