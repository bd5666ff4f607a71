#include "vistra/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vistra/format.hpp"
#include "vistra/parallel.hpp"

namespace vistra::classify {

std::optional<double> parse_feature_frac(const std::string& s) {
    if (s == "sqrt") return std::nullopt;
    const double f = parse_double(s);
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("feature fraction must be 'sqrt' or in (0, 1]");
    return f;
}

int Tree::predict(const double* row) const {
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const Node& n = nodes[static_cast<std::size_t>(at)];
        at = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(at)].label;
}

namespace {

std::size_t features_per_split(std::size_t cols, const std::optional<double>& frac) {
    if (!frac) return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(cols))));
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(*frac * static_cast<double>(cols))), 1, cols);
}

int majority(const std::vector<std::size_t>& counts) {
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

double sum_of_squares(const std::vector<std::size_t>& counts) {
    double s = 0.0;
    for (std::size_t c : counts) s += static_cast<double>(c) * static_cast<double>(c);
    return s;
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;
};

}  // namespace

Tree train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y, std::size_t n_classes,
                const std::vector<std::size_t>& rows, const ForestParams& params, std::mt19937_64& rng) {
    const std::size_t cols = static_cast<std::size_t>(x.cols());
    const std::size_t mtry = features_per_split(cols, params.feature_frac);
    const std::size_t min_leaf = std::max<std::size_t>(1, params.min_leaf);

    Tree tree;
    struct Pending {
        int node;
        std::vector<std::size_t> rows;
        std::size_t depth;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, rows, 0});

    std::vector<std::size_t> all_features(cols);
    std::iota(all_features.begin(), all_features.end(), 0);
    std::vector<std::pair<double, int>> column;
    std::vector<std::size_t> left_counts(n_classes), right_counts(n_classes);

    while (!stack.empty()) {
        Pending job = std::move(stack.back());
        stack.pop_back();
        const std::size_t n = job.rows.size();

        std::vector<std::size_t> counts(n_classes, 0);
        for (std::size_t r : job.rows) ++counts[static_cast<std::size_t>(y[r])];
        tree.nodes[static_cast<std::size_t>(job.node)].label = majority(counts);

        const bool pure = std::count(counts.begin(), counts.end(), 0) == static_cast<std::ptrdiff_t>(n_classes - 1);
        const bool depth_done = params.max_depth && job.depth >= *params.max_depth;
        if (pure || depth_done || n < 2 * min_leaf) continue;

        std::vector<std::size_t> candidates;
        if (mtry >= cols) {
            candidates = all_features;
        } else {
            std::vector<std::size_t> pool = all_features;
            for (std::size_t i = 0; i < mtry; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, cols - 1);
                std::swap(pool[i], pool[pick(rng)]);
            }
            candidates.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(mtry));
            std::sort(candidates.begin(), candidates.end());
        }

        // Maximizing sum_c n_lc^2/n_l + sum_c n_rc^2/n_r minimizes weighted Gini impurity.
        const double total_sq = sum_of_squares(counts);
        const double parent = total_sq / static_cast<double>(n);
        Split best;
        best.score = parent + 1e-12 * static_cast<double>(n);
        for (std::size_t f : candidates) {
            column.clear();
            for (std::size_t r : job.rows) column.emplace_back(x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)), y[r]);
            std::sort(column.begin(), column.end());
            if (column.front().first == column.back().first) continue;

            std::fill(left_counts.begin(), left_counts.end(), 0);
            right_counts = counts;
            double left_sq = 0.0;
            double right_sq = total_sq;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const auto c = static_cast<std::size_t>(column[i].second);
                left_sq += 2.0 * static_cast<double>(left_counts[c]) + 1.0;
                right_sq -= 2.0 * static_cast<double>(right_counts[c]) - 1.0;
                ++left_counts[c];
                --right_counts[c];
                const std::size_t nl = i + 1;
                const std::size_t nr = n - nl;
                if (column[i].first == column[i + 1].first || nl < min_leaf || nr < min_leaf) continue;
                const double score = left_sq / static_cast<double>(nl) + right_sq / static_cast<double>(nr);
                if (score > best.score) {
                    double mid = 0.5 * (column[i].first + column[i + 1].first);
                    if (!(mid < column[i + 1].first)) mid = column[i].first;
                    best = {static_cast<int>(f), mid, score};
                }
            }
        }
        if (best.feature < 0) continue;

        std::vector<std::size_t> left, right;
        for (std::size_t r : job.rows) {
            (x(static_cast<Eigen::Index>(r), best.feature) <= best.threshold ? left : right).push_back(r);
        }
        const int li = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[static_cast<std::size_t>(job.node)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = li;
        node.right = li + 1;
        stack.push_back({li + 1, std::move(right), job.depth + 1});
        stack.push_back({li, std::move(left), job.depth + 1});
    }
    return tree;
}

ForestModel rf_train(const features::FeatureMatrix& x, const ForestParams& params) {
    x.validate();
    if (x.row_count() < 2) throw std::invalid_argument("random forest needs at least 2 rows");
    if (x.col_count() == 0) throw std::invalid_argument("random forest needs at least 1 feature");
    if (params.n_trees == 0) throw std::invalid_argument("random forest needs at least 1 tree");

    ForestModel model;
    model.classes = x.labels;
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());
    if (model.classes.size() < 2) throw std::invalid_argument("random forest needs at least 2 classes");
    model.n_features = x.col_count();

    std::vector<int> y(x.row_count());
    for (std::size_t r = 0; r < y.size(); ++r) {
        y[r] = static_cast<int>(std::lower_bound(model.classes.begin(), model.classes.end(), x.labels[r]) -
                                model.classes.begin());
    }

    model.trees.resize(params.n_trees);
    const std::size_t n = x.row_count();
    parallel_for(params.n_trees, [&](std::size_t i) {
        std::mt19937_64 rng(params.seed ^ static_cast<std::uint64_t>(i));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::size_t> sample(n);
        for (auto& r : sample) r = pick(rng);
        model.trees[i] = train_tree(x.rows, y, model.classes.size(), sample, params, rng);
    });
    return model;
}

std::vector<std::string> rf_predict(const ForestModel& model, const Eigen::MatrixXd& x) {
    if (static_cast<std::size_t>(x.cols()) != model.n_features) {
        throw std::invalid_argument("expected " + std::to_string(model.n_features) + " features, got " +
                                    std::to_string(x.cols()));
    }
    // Row-major copy so each row is contiguous for Tree::predict.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = x;
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    std::vector<std::size_t> votes(model.classes.size());
    for (Eigen::Index r = 0; r < rm.rows(); ++r) {
        std::fill(votes.begin(), votes.end(), 0);
        for (const auto& t : model.trees) ++votes[static_cast<std::size_t>(t.predict(rm.row(r).data()))];
        out.push_back(model.classes[static_cast<std::size_t>(majority(votes))]);
    }
    return out;
}

}  // namespace vistra::classify
