#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vistra/error.hpp"
#include "vistra/format.hpp"
#include "vistra/jsonl.hpp"
#include "vistra/parallel.hpp"
#include "vistra/pipeline.hpp"
#include "vistra/signals.hpp"

namespace fs = std::filesystem;
using namespace vistra;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("vistra_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path write_dataset(const fs::path& dir, std::size_t per_class) {
    std::vector<MultiChannelSignal> out;
    std::size_t idx = 0;
    for (const std::string label : {"BPSK", "QAM16", "WBFM"}) {
        for (std::size_t i = 0; i < per_class; ++i, ++idx) {
            auto s = signals::gen_iq_standin(label, 64, i % 2 ? 10.0 : 0.0, idx);
            s.id = "r" + std::to_string(idx);
            out.push_back(std::move(s));
        }
    }
    const fs::path p = dir / "data.jsonl";
    io::write_signals(out, p);
    return p;
}

}  // namespace

TEST_CASE("double formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("jsonl round trip") {
    MultiChannelSignal s;
    s.id = "a";
    s.label = "QPSK";
    s.snr_db = -4.0;
    s.add_channel("I", TimeSeries({0.1, -2.5, 3.0}, 0.5));
    s.add_channel("Q", TimeSeries({1.0, 2.0, 1e-300}, 0.5));
    const std::string line = io::format_signal(s);
    const auto back = io::parse_signal(line, 0);
    CHECK(back.id == "a");
    CHECK(back.snr_db == s.snr_db);
    CHECK(back.channel_names == s.channel_names);
    CHECK(back.channels == s.channels);

    // Key order decides channel order.
    const auto q_first = io::parse_signal(R"({"label":"x","snr_db":null,"dt":1,"channels":{"Q":[1,2],"I":[3,4]}})", 0);
    CHECK(q_first.channel_names == std::vector<std::string>{"Q", "I"});
    CHECK_FALSE(q_first.snr_db.has_value());

    // Compressed records keep their timestamps.
    MultiChannelSignal c;
    c.label = "x";
    c.add_channel("x", signals::peak_compress(TimeSeries({1, 3, 2, 5, 4}, 0.1), {1}));
    const auto cb = io::parse_signal(io::format_signal(c), 0);
    CHECK(cb.channels == c.channels);

    CHECK_THROWS_AS(io::parse_signal("{", 0), DataError);
    CHECK_THROWS_AS(io::parse_signal(R"({"label":"x","dt":1,"channels":{"I":[1]}})", 0), DataError);
    CHECK_THROWS_AS(io::parse_signal(R"({"label":"x","snr_db":null,"dt":-1,"channels":{"I":[1]}})", 0), DataError);
    CHECK_THROWS_AS(io::parse_signal(R"({"label":"x","snr_db":null,"dt":1,"channels":{"I":[1,2],"Q":[1]}})", 0), DataError);
}

TEST_CASE("validation collects every error") {
    std::istringstream in(
        R"({"label":"BPSK","snr_db":2,"dt":1,"channels":{"I":[1,2],"Q":[1,2]}})"
        "\n"
        R"({"label":"FOO","snr_db":2,"dt":1,"channels":{"I":[1,2],"Q":[1,2]}})"
        "\n"
        R"({"label":"BPSK","snr_db":2,"dt":1,"channels":{"I":[1,2,3],"Q":[1,2,3]}})"
        "\n"
        "not json\n");
    io::ValidationOptions o;
    o.expect_length = 2;
    o.expect_channels = {"I", "Q"};
    o.allowed_labels = {"BPSK"};
    const auto r = io::validate_signals(in, o);
    CHECK(r.records == 4);
    REQUIRE(r.errors.size() == 4);
    CHECK(r.errors[0].rfind("line 2", 0) == 0);
    CHECK(r.errors[1].rfind("line 3", 0) == 0);
    CHECK(r.errors[2].rfind("line 3", 0) == 0);
    CHECK(r.errors[3].rfind("line 4", 0) == 0);
}

TEST_CASE("parallel_for") {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_WITH(parallel_for(10, [](std::size_t i) { if (i == 3 || i == 7) throw std::runtime_error(std::to_string(i)); }, 3),
                      "3");
}

TEST_CASE("pipeline end to end") {
    const fs::path dir = scratch("pipeline");
    const fs::path data = write_dataset(dir, 10);
    nlohmann::json j = {{"dataset", data.string()},
                        {"channels", {"I", "Q", "A", "W"}},
                        {"method", {{"method", "clpvg"}, {"m", 1}, {"alpha", 10}}},
                        {"windows", {3, 4}},
                        {"sgn", true},
                        {"wl", {{"h", 2}, {"dim", 32}}},
                        {"pca", {{"theta", 5}}},
                        {"classifier", {{"n_trees", 15}}},
                        {"evaluation", {{"mode", "split"}, {"ratio", 0.8}}},
                        {"seed", 4},
                        {"out_dir", (dir / "out").string()}};
    auto cfg = pipeline::config_from_json(j);
    const auto r1 = pipeline::run_pipeline(cfg);
    CHECK(r1.fused_width == 2 * 4 * 32 * 2);
    CHECK(r1.reduced_width == 5);
    CHECK(fs::exists(dir / "out" / "graphs" / "w3" / "r0.A.edges"));
    CHECK(fs::exists(dir / "out" / "graphs" / "w4" / "r0.W.sgn.edges"));
    CHECK(fs::exists(dir / "out" / "accuracy_vs_snr.csv"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest["files"].size() == r1.artifacts.size());
    for (const auto& f : manifest["files"]) CHECK(pipeline::file_digest(dir / "out" / f["path"].get<std::string>()) == f["sha256"]);
    const std::string first = slurp(dir / "out" / "report.json");

    cfg.out_dir = dir / "out2";
    pipeline::run_pipeline(cfg);
    CHECK(slurp(dir / "out2" / "report.json") == first);

    // One channel, no SGN, no compression: width K.
    cfg.channels = {"I"};
    cfg.sgn = false;
    cfg.windows = {};
    cfg.pca_theta.reset();
    cfg.pca_variance.reset();
    cfg.out_dir = dir / "out3";
    CHECK(pipeline::run_pipeline(cfg).fused_width == 32);
}

TEST_CASE("pipeline errors name the stage and the signal") {
    const fs::path dir = scratch("pipeline_err");
    const fs::path data = dir / "bad.jsonl";
    {
        std::ofstream f(data);
        f << R"({"id":"ok","label":"a","snr_db":null,"dt":1,"channels":{"x":[1,5,1,5,1,5]}})" << '\n';
        f << R"({"id":"short","label":"b","snr_db":null,"dt":1,"channels":{"x":[1,2,3]}})" << '\n';
    }
    pipeline::PipelineConfig cfg;
    cfg.dataset = data;
    cfg.out_dir = dir / "out";
    cfg.windows = {3};
    cfg.pca_variance.reset();
    try {
        pipeline::run_pipeline(cfg);
        FAIL("expected StageError");
    } catch (const pipeline::StageError& e) {
        CHECK(e.stage() == "compress");
        CHECK(e.signal_id() == "short");
    }
    cfg.dataset = dir / "missing.jsonl";
    CHECK_THROWS_AS(pipeline::run_pipeline(cfg), std::invalid_argument);
}

TEST_CASE("plot helpers") {
    const fs::path dir = scratch("plot");
    DegreeDistribution d;
    pipeline::write_degree_histogram_csv(d, dir / "empty.csv");
    CHECK(slurp(dir / "empty.csv") == "degree,count\n");
    d.counts = {{1, 2}, {2, 1}};
    pipeline::write_degree_histogram_csv(d, dir / "h.csv");
    CHECK(slurp(dir / "h.csv") == "degree,count\n1,2\n2,1\n");
}
