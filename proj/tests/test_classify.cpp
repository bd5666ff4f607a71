#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "vistra/evaluation.hpp"
#include "vistra/forest.hpp"

using namespace vistra;
using namespace vistra::classify;
using features::FeatureMatrix;

namespace {

FeatureMatrix blobs(std::size_t per_class, std::uint64_t seed, double gap = 4.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 0.5);
    FeatureMatrix fm;
    fm.rows.resize(static_cast<Eigen::Index>(2 * per_class), 2);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const bool b = i >= per_class;
        fm.rows(static_cast<Eigen::Index>(i), 0) = nd(rng) + (b ? gap : 0.0);
        fm.rows(static_cast<Eigen::Index>(i), 1) = nd(rng) - (b ? gap : 0.0);
        fm.labels.push_back(b ? "b" : "a");
        fm.snr_db.push_back(b ? 10.0 : 0.0);
    }
    fm.columns = {{"x", 0, 0, 0}, {"x", 0, 0, 1}};
    return fm;
}

}  // namespace

TEST_CASE("forest on separable blobs") {
    const auto fm = blobs(20, 1);
    ForestParams p;
    p.n_trees = 25;
    p.seed = 3;
    const auto model = rf_train(fm, p);
    CHECK(rf_predict(model, fm.rows) == fm.labels);
    const auto again = rf_train(fm, p);
    const auto test = blobs(30, 99, 1.0);
    CHECK(rf_predict(model, test.rows) == rf_predict(again, test.rows));
    CHECK_THROWS_AS(rf_predict(model, Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);

    FeatureMatrix one = fm;
    one.labels.assign(one.labels.size(), "a");
    CHECK_THROWS_AS(rf_train(one, p), std::invalid_argument);
}

TEST_CASE("constant features predict the majority") {
    FeatureMatrix fm;
    fm.rows = Eigen::MatrixXd::Constant(7, 3, 1.5);
    fm.labels = {"x", "y", "y", "x", "y", "y", "y"};
    fm.snr_db.assign(7, std::nullopt);
    fm.columns = {{"c", 0, 0, 0}, {"c", 0, 0, 1}, {"c", 0, 0, 2}};
    ForestParams p;
    p.n_trees = 1;
    std::vector<int> y{0, 1, 1, 0, 1, 1, 1};
    std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5, 6};
    std::mt19937_64 rng(0);
    const auto tree = train_tree(fm.rows, y, 2, rows, p, rng);
    CHECK(tree.nodes.size() == 1);
    CHECK(tree.predict(fm.rows.row(0).data()) == 1);
}

TEST_CASE("vote ties go to the smallest label") {
    ForestModel m;
    m.classes = {"a", "b"};
    m.n_features = 1;
    Tree ta, tb;
    ta.nodes = {Tree::Node{-1, 0.0, -1, -1, 1}};
    tb.nodes = {Tree::Node{-1, 0.0, -1, -1, 0}};
    m.trees = {ta, tb};
    CHECK(rf_predict(m, Eigen::MatrixXd::Zero(1, 1)) == std::vector<std::string>{"a"});
    m.trees = {ta};
    CHECK(rf_predict(m, Eigen::MatrixXd::Zero(1, 1)) == std::vector<std::string>{"b"});
}

TEST_CASE("duplicated column keeps single-tree predictions") {
    const auto fm = blobs(15, 4, 1.0);
    Eigen::MatrixXd wide(fm.rows.rows(), 3);
    wide << fm.rows, fm.rows.col(0);
    std::vector<int> y;
    for (const auto& l : fm.labels) y.push_back(l == "b");
    std::vector<std::size_t> rows(fm.row_count());
    std::iota(rows.begin(), rows.end(), 0);
    ForestParams p;
    p.feature_frac = 1.0;
    std::mt19937_64 r1(0), r2(0);
    const auto t1 = train_tree(fm.rows, y, 2, rows, p, r1);
    const auto t2 = train_tree(wide, y, 2, rows, p, r2);
    const auto probe = blobs(40, 77, 2.0);
    for (Eigen::Index i = 0; i < probe.rows.rows(); ++i) {
        Eigen::RowVector3d w3;
        w3 << probe.rows(i, 0), probe.rows(i, 1), probe.rows(i, 0);
        Eigen::RowVector2d w2 = probe.rows.row(i);
        CHECK(t1.predict(w2.data()) == t2.predict(w3.data()));
    }
}

TEST_CASE("stratified split and folds") {
    std::vector<std::string> labels;
    for (int i = 0; i < 100; ++i) labels.push_back("a");
    for (int i = 0; i < 100; ++i) labels.push_back("b");
    const auto [train, test] = split_indices(labels, 0.8, 5);
    std::size_t train_a = 0;
    for (auto i : train) train_a += labels[i] == "a";
    CHECK(train.size() == 160);
    CHECK(test.size() == 40);
    CHECK(train_a == 80);
    CHECK(split_indices(labels, 0.8, 5) == std::pair{train, test});

    const auto [t2, s2] = split_indices({"a", "a", "b", "b"}, 0.5, 1);
    CHECK(t2.size() == 2);
    CHECK(s2.size() == 2);
    CHECK_THROWS_AS(split_indices({"a", "b", "b"}, 0.5, 1), std::invalid_argument);

    std::vector<std::string> nine;
    for (int i = 0; i < 300; ++i) nine.push_back("sin");
    for (int i = 0; i < 600; ++i) nine.push_back("chaos");
    const auto folds = stratified_folds(nine, 10, 2);
    REQUIRE(folds.size() == 10);
    std::set<std::size_t> seen;
    for (const auto& f : folds) {
        CHECK(f.size() == 90);
        for (auto i : f) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == 900);
    CHECK_THROWS_AS(stratified_folds({"a", "a", "b"}, 2, 0), std::invalid_argument);
}

TEST_CASE("reports") {
    const auto r = make_report({"a", "b"}, {"a", "a", "b", "b"}, {"a", "b", "b", "b"}, {0.0, 0.0, 10.0, 10.0});
    CHECK(r.accuracy == 0.75);
    CHECK(r.confusion[0][1] == 1);
    CHECK(r.per_class.at("a").recall == 0.5);
    CHECK(r.per_class.at("b").precision == doctest::Approx(2.0 / 3));
    CHECK(r.per_snr.at(0.0).accuracy == 0.5);
    CHECK(r.per_snr.at(10.0).count == 2);
    const auto back = report_from_json(to_json(r));
    CHECK(to_json(back) == to_json(r));
    CHECK(summary_table(r).find("accuracy") != std::string::npos);

    const auto fm = blobs(20, 8);
    ForestParams p;
    p.n_trees = 10;
    const auto cv = kfold_cv(fm, 2, p, 1);
    CHECK(cv.accuracy == 1.0);
    CHECK(cv.fold_accuracies.size() == 2);
    std::size_t trace = 0;
    for (std::size_t i = 0; i < cv.classes.size(); ++i) trace += cv.confusion[i][i];
    CHECK(cv.accuracy == static_cast<double>(trace) / static_cast<double>(cv.total()));
    const auto sp = evaluate_split(fm, 0.8, p, 1);
    CHECK(sp.total() == 8);
    CHECK(sp.per_snr.size() == 2);
}
