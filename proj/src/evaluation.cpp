#include "vistra/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "vistra/error.hpp"

namespace vistra::classify {

std::size_t EvalReport::total() const {
    std::size_t t = 0;
    for (const auto& row : confusion) t = std::accumulate(row.begin(), row.end(), t);
    return t;
}

EvalReport make_report(const std::vector<std::string>& classes, const std::vector<std::string>& truth,
                       const std::vector<std::string>& predicted, const std::vector<std::optional<double>>& snr) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("truth and prediction lengths differ");
    if (!snr.empty() && snr.size() != truth.size()) throw std::invalid_argument("SNR tags not aligned");
    EvalReport rep;
    rep.classes = classes;
    const std::size_t k = classes.size();
    rep.confusion.assign(k, std::vector<std::size_t>(k, 0));
    auto index_of = [&](const std::string& label) {
        auto it = std::find(classes.begin(), classes.end(), label);
        if (it == classes.end()) throw std::invalid_argument("label '" + label + "' not in class list");
        return static_cast<std::size_t>(it - classes.begin());
    };
    std::map<double, std::pair<std::size_t, std::size_t>> snr_hits;  // snr -> (correct, total)
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++rep.confusion[index_of(truth[i])][index_of(predicted[i])];
        if (!snr.empty() && snr[i]) {
            auto& h = snr_hits[*snr[i]];
            h.first += truth[i] == predicted[i] ? 1 : 0;
            ++h.second;
        }
    }
    std::size_t trace = 0;
    for (std::size_t c = 0; c < k; ++c) trace += rep.confusion[c][c];
    const std::size_t total = rep.total();
    rep.accuracy = total ? static_cast<double>(trace) / static_cast<double>(total) : 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t row = 0, col = 0;
        for (std::size_t j = 0; j < k; ++j) {
            row += rep.confusion[c][j];
            col += rep.confusion[j][c];
        }
        const double tp = static_cast<double>(rep.confusion[c][c]);
        rep.per_class[classes[c]] = {col ? tp / static_cast<double>(col) : 0.0, row ? tp / static_cast<double>(row) : 0.0};
    }
    for (const auto& [s, h] : snr_hits) {
        rep.per_snr[s] = {static_cast<double>(h.first) / static_cast<double>(h.second), h.second};
    }
    return rep;
}

namespace {

// Row indices per label, labels in sorted order.
std::map<std::string, std::vector<std::size_t>> by_class(const std::vector<std::string>& labels) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    return groups;
}

std::vector<std::string> sorted_classes(const std::vector<std::string>& labels) {
    std::vector<std::string> c = labels;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

}  // namespace

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(const std::vector<std::string>& labels,
                                                                            double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must be in (0, 1)");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> train, test;
    for (auto& [label, idx] : by_class(labels)) {
        if (idx.size() < 2) throw std::invalid_argument("class '" + label + "' has fewer than 2 samples");
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto n = static_cast<double>(idx.size());
        const std::size_t n_train = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(ratio * n)), 1,
                                                            idx.size() - 1);
        train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

std::pair<features::FeatureMatrix, features::FeatureMatrix> split_train_test(const features::FeatureMatrix& x,
                                                                             double ratio, std::uint64_t seed) {
    x.validate();
    const auto [train, test] = split_indices(x.labels, ratio, seed);
    return {x.select_rows(train), x.select_rows(test)};
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<std::string>& labels, std::size_t k,
                                                       std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t deal = 0;
    for (auto& [label, idx] : by_class(labels)) {
        if (idx.size() < k) {
            throw std::invalid_argument("class '" + label + "' has " + std::to_string(idx.size()) +
                                        " samples, fewer than k=" + std::to_string(k));
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i : idx) folds[deal++ % k].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

EvalReport evaluate_split(const features::FeatureMatrix& x, double ratio, const ForestParams& params,
                          std::uint64_t seed) {
    auto [train, test] = split_train_test(x, ratio, seed);
    const ForestModel model = rf_train(train, params);
    const auto pred = rf_predict(model, test.rows);
    return make_report(sorted_classes(x.labels), test.labels, pred, test.snr_db);
}

EvalReport kfold_cv(const features::FeatureMatrix& x, std::size_t k, const ForestParams& params, std::uint64_t seed) {
    x.validate();
    const auto folds = stratified_folds(x.labels, k, seed);
    const auto classes = sorted_classes(x.labels);
    std::vector<std::string> truth, predicted;
    std::vector<std::optional<double>> snr;
    std::vector<double> fold_acc;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> train_idx;
        for (std::size_t g = 0; g < k; ++g) {
            if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(train_idx.begin(), train_idx.end());
        const auto train = x.select_rows(train_idx);
        const auto test = x.select_rows(folds[f]);
        ForestParams p = params;
        p.seed = params.seed + f;
        const auto pred = rf_predict(rf_train(train, p), test.rows);
        std::size_t hit = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == test.labels[i] ? 1 : 0;
        fold_acc.push_back(static_cast<double>(hit) / static_cast<double>(pred.size()));
        truth.insert(truth.end(), test.labels.begin(), test.labels.end());
        predicted.insert(predicted.end(), pred.begin(), pred.end());
        snr.insert(snr.end(), test.snr_db.begin(), test.snr_db.end());
    }
    EvalReport rep = make_report(classes, truth, predicted, snr);
    rep.fold_accuracies = fold_acc;
    rep.mean_fold_accuracy = std::accumulate(fold_acc.begin(), fold_acc.end(), 0.0) / static_cast<double>(k);
    return rep;
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json j;
    j["classes"] = r.classes;
    j["confusion"] = r.confusion;
    j["accuracy"] = r.accuracy;
    nlohmann::json pc = nlohmann::json::object();
    for (const auto& [label, s] : r.per_class) pc[label] = {{"precision", s.precision}, {"recall", s.recall}};
    j["per_class"] = pc;
    if (!r.fold_accuracies.empty()) j["fold_accuracies"] = r.fold_accuracies;
    if (r.mean_fold_accuracy) j["mean_fold_accuracy"] = *r.mean_fold_accuracy;
    if (!r.per_snr.empty()) {
        nlohmann::json ps = nlohmann::json::array();
        for (const auto& [snr, s] : r.per_snr) ps.push_back({{"snr_db", snr}, {"accuracy", s.accuracy}, {"count", s.count}});
        j["per_snr"] = ps;
    }
    return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
    try {
        EvalReport r;
        r.classes = j.at("classes").get<std::vector<std::string>>();
        r.confusion = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
        r.accuracy = j.at("accuracy").get<double>();
        for (const auto& [label, s] : j.at("per_class").items()) {
            r.per_class[label] = {s.at("precision").get<double>(), s.at("recall").get<double>()};
        }
        if (j.contains("fold_accuracies")) r.fold_accuracies = j["fold_accuracies"].get<std::vector<double>>();
        if (j.contains("mean_fold_accuracy")) r.mean_fold_accuracy = j["mean_fold_accuracy"].get<double>();
        if (j.contains("per_snr")) {
            for (const auto& e : j["per_snr"]) {
                r.per_snr[e.at("snr_db").get<double>()] = {e.at("accuracy").get<double>(), e.at("count").get<std::size_t>()};
            }
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("report: ") + e.what());
    }
}

std::string summary_table(const EvalReport& r) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << "accuracy " << r.accuracy << " (" << r.total() << " samples)\n";
    if (r.mean_fold_accuracy) out << "mean fold accuracy " << *r.mean_fold_accuracy << " over " << r.fold_accuracies.size() << " folds\n";
    out << std::left << std::setw(12) << "class" << std::right << std::setw(11) << "precision" << std::setw(9) << "recall" << '\n';
    for (const auto& [label, s] : r.per_class) {
        out << std::left << std::setw(12) << label << std::right << std::setw(11) << s.precision << std::setw(9) << s.recall << '\n';
    }
    if (!r.per_snr.empty()) {
        out << std::left << std::setw(12) << "snr_db" << std::right << std::setw(11) << "accuracy" << std::setw(9) << "count" << '\n';
        for (const auto& [snr, s] : r.per_snr) {
            out << std::left << std::setw(12) << snr << std::right << std::setw(11) << s.accuracy << std::setw(9) << s.count << '\n';
        }
    }
    return out.str();
}

}  // namespace vistra::classify
