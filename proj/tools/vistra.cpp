// vistra: time series -> visibility graphs -> features -> classification.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vistra/error.hpp"
#include "vistra/evaluation.hpp"
#include "vistra/features.hpp"
#include "vistra/format.hpp"
#include "vistra/graph.hpp"
#include "vistra/jsonl.hpp"
#include "vistra/pca.hpp"
#include "vistra/pipeline.hpp"
#include "vistra/signals.hpp"
#include "vistra/visibility.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vistra;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, sep)) {
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double parse_snr(const std::string& s) {
    if (s == "clean" || s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    return parse_double(s);
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw DataError("cannot write " + p.string());
    return f;
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
    std::string kind = "sin";
    std::size_t n = 1000;
    std::optional<double> dt;
    std::string init;
    std::string snr = "clean";
    std::string snr_levels;
    std::uint64_t seed = 0;
    std::size_t count = 1;
    bool random_init = false;
    std::string out;
};

signals::State3 random_state(const std::string& kind, std::mt19937_64& rng) {
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    if (kind == "lorenz") return {u(-15.0, 15.0), u(-15.0, 15.0), u(5.0, 40.0)};
    if (kind == "rossler") return {u(-8.0, 8.0), u(-8.0, 8.0), u(0.0, 2.0)};
    return {u(0.0, 0.4), 0.0, 0.0};  // sinusoid: phase offset within one period
}

int run_generate(const GenerateOpts& o) {
    std::vector<MultiChannelSignal> out;
    std::vector<double> levels;
    for (const auto& s : split(o.snr_levels, ',')) levels.push_back(parse_snr(s));
    if (o.kind == "iq-standin") {
        if (levels.empty()) {
            for (int s = -20; s <= 18; s += 2) levels.push_back(s);
        }
        std::size_t idx = 0;
        for (const auto& label : signals::iq_standin_labels()) {
            for (std::size_t i = 0; i < o.count; ++i, ++idx) {
                const double snr = levels[i % levels.size()];
                auto s = signals::gen_iq_standin(label, o.n, snr, o.seed * 1000003ULL + idx);
                s.id = "iq-" + std::to_string(idx);
                out.push_back(std::move(s));
            }
        }
    } else {
        if (o.kind != "sin" && o.kind != "lorenz" && o.kind != "rossler") {
            throw UsageError("--kind must be sin, lorenz, rossler or iq-standin");
        }
        const double dt = o.dt.value_or(o.kind == "rossler" ? signals::kRosslerDt : signals::kSinusoidDt);
        signals::State3 init = o.kind == "lorenz" ? signals::kLorenzInit
                               : o.kind == "rossler" ? signals::kRosslerInit : signals::State3{0.0, 0.0, 0.0};
        if (!o.init.empty()) {
            const auto parts = split(o.init, ',');
            if (parts.empty() || parts.size() > 3) throw UsageError("--init expects up to three comma-separated numbers");
            for (std::size_t i = 0; i < parts.size(); ++i) init[i] = parse_double(parts[i]);
        }
        if (levels.empty()) levels.push_back(parse_snr(o.snr));
        std::mt19937_64 rng(o.seed);
        for (std::size_t i = 0; i < o.count; ++i) {
            const signals::State3 s0 = o.random_init ? random_state(o.kind, rng) : init;
            TimeSeries ts = o.kind == "sin"      ? signals::gen_sinusoid(o.n, dt, s0[0])
                            : o.kind == "lorenz" ? signals::integrate_lorenz(o.n, dt, s0)
                                                 : signals::integrate_rossler(o.n, dt, s0);
            const double snr = levels[i % levels.size()];
            MultiChannelSignal sig;
            sig.id = o.kind + "-" + std::to_string(i);
            sig.label = o.kind;
            sig.add_channel("x", std::move(ts));
            if (std::isfinite(snr)) sig = signals::add_awgn(sig, snr, o.seed * 7919ULL + i);
            out.push_back(std::move(sig));
        }
    }
    if (o.out.empty() || o.out == "-") {
        io::write_signals(out, std::cout);
    } else {
        auto f = open_out(o.out);
        io::write_signals(out, f);
    }
    std::cerr << "wrote " << out.size() << " signals\n";
    return 0;
}

// -------------------------------------------------------- convert-validate

int run_validate(const std::string& in, std::optional<std::size_t> length, const std::string& chans,
                 const std::string& labels) {
    io::ValidationOptions opts;
    opts.expect_length = length;
    opts.expect_channels = split(chans, ',');
    opts.allowed_labels = split(labels, ',');
    std::ifstream f(in, std::ios::binary);
    if (!f) throw DataError("cannot read " + in);
    const auto res = io::validate_signals(f, opts);
    for (const auto& e : res.errors) std::cerr << e << '\n';
    std::cout << res.records << " records, " << res.errors.size() << " errors\n";
    return res.ok() ? 0 : kExitData;
}

// ---------------------------------------------------------------- compress

int run_compress(const std::string& in, std::size_t w, const std::vector<std::string>& chans, const std::string& out) {
    auto data = io::read_signals(fs::path(in));
    for (auto& s : data) {
        MultiChannelSignal c;
        c.id = s.id;
        c.label = s.label;
        c.snr_db = s.snr_db;
        for (std::size_t i = 0; i < s.channels.size(); ++i) {
            const bool pick = chans.empty() || std::find(chans.begin(), chans.end(), s.channel_names[i]) != chans.end();
            if (pick) c.add_channel(s.channel_names[i], signals::peak_compress(s.channels[i], {w}));
        }
        s = std::move(c);
    }
    auto f = open_out(out);
    io::write_signals(data, f);
    return 0;
}

// --------------------------------------------------------------- transform

struct TransformOpts {
    std::string in;
    std::string method = "clpvg";
    std::size_t m = 1;
    double alpha = 10.0;
    std::vector<std::string> channels;
    std::vector<std::string> channel_alpha;
    std::size_t window = 0;
    std::string out_dir;
};

const char* kIndexName = "graphs.csv";

int run_transform(const TransformOpts& o) {
    visibility::VgParams base{visibility::parse_method(o.method), o.m, o.alpha};
    std::map<std::string, double> alpha_of;
    for (const auto& kv : o.channel_alpha) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--channel-alpha expects NAME=VALUE");
        alpha_of[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1));
    }
    auto data = io::read_signals(fs::path(o.in));
    fs::create_directories(o.out_dir);
    std::ofstream index(fs::path(o.out_dir) / kIndexName, std::ios::binary);
    index << "file,signal_id,label,snr_db,channel,method,window\n";
    std::size_t written = 0;
    for (const auto& raw : data) {
        const auto s = pipeline::with_derived_channels(raw, o.channels);
        const auto names = o.channels.empty() ? s.channel_names : o.channels;
        for (const auto& ch : names) {
            auto p = base;
            if (auto it = alpha_of.find(ch); it != alpha_of.end()) p.alpha = it->second;
            Graph g;
            try {
                g = pipeline::channel_graph(s.channel(ch), o.window, p);
            } catch (const std::invalid_argument& e) {
                throw DataError("signal '" + s.id + "' channel '" + ch + "': " + e.what());
            }
            const std::string file = s.id + "." + ch + ".edges";
            write_edgelist(g, fs::path(o.out_dir) / file);
            index << file << ',' << s.id << ',' << s.label << ',' << (s.snr_db ? format_double(*s.snr_db) : "") << ','
                  << ch << ',' << visibility::to_string(p.method) << ',' << o.window << '\n';
            ++written;
        }
    }
    std::cerr << "wrote " << written << " graphs\n";
    return 0;
}

struct IndexEntry {
    std::string file, signal_id, label, snr, channel, method;
    std::size_t window = 0;
};

std::vector<IndexEntry> read_index(const fs::path& dir) {
    std::ifstream f(dir / kIndexName, std::ios::binary);
    if (!f) throw DataError("missing " + (dir / kIndexName).string() + " (run 'transform' first)");
    std::vector<IndexEntry> out;
    std::string line;
    std::getline(f, line);
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        std::istringstream ss(line);
        while (std::getline(ss, cur, ',')) cells.push_back(cur);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != 7) throw DataError(kIndexName + std::string(" line ") + std::to_string(lineno) + ": expected 7 fields");
        out.push_back({cells[0], cells[1], cells[2], cells[3], cells[4], cells[5], std::stoul(cells[6])});
    }
    return out;
}

// --------------------------------------------------------------------- sgn

int run_sgn(const std::string& in, const std::string& out, const std::string& map_path) {
    const Graph g = read_edgelist(fs::path(in));
    const Graph s = sgn1(g);
    {
        auto f = open_out(out);
        write_edgelist(s, f);
    }
    if (!map_path.empty()) {
        auto f = open_out(map_path);
        f << "sgn_node,u,v\n";
        const auto edges = g.edges();
        for (std::size_t i = 0; i < edges.size(); ++i) f << i << ',' << edges[i].first << ',' << edges[i].second << '\n';
    }
    return 0;
}

// ----------------------------------------------------------------- metrics

int run_metrics(const std::string& in_dir, const std::string& out, const std::string& hist_dir) {
    const auto entries = read_index(in_dir);
    auto f = open_out(out);
    f << "signal_id,channel,method,n,m_edges,avg_clustering\n";
    if (!hist_dir.empty()) fs::create_directories(hist_dir);
    for (const auto& e : entries) {
        const Graph g = read_edgelist(fs::path(in_dir) / e.file);
        f << e.signal_id << ',' << e.channel << ',' << e.method << ',' << g.node_count() << ',' << g.edge_count() << ','
          << format_double(avg_clustering(g)) << '\n';
        if (!hist_dir.empty()) {
            const auto dd = degree_distribution(g);
            json counts = json::object();
            for (const auto& [d, c] : dd.counts) counts[std::to_string(d)] = c;
            json j{{"signal_id", e.signal_id}, {"channel", e.channel}, {"method", e.method}, {"n", dd.n}, {"degree_counts", counts}};
            auto h = open_out(fs::path(hist_dir) / (e.signal_id + "." + e.channel + ".json"));
            h << j.dump() << '\n';
        }
    }
    return 0;
}

// ------------------------------------------------------------------- embed

int run_embed(const std::string& in_dir, std::size_t h, std::size_t dim, bool with_sgn, const std::string& out) {
    const auto entries = read_index(in_dir);
    const features::WlConfig cfg{h, dim};
    // Group by signal in first-appearance order; channel order as listed.
    std::vector<std::string> order;
    std::map<std::string, std::vector<const IndexEntry*>> groups;
    for (const auto& e : entries) {
        if (!groups.count(e.signal_id)) order.push_back(e.signal_id);
        groups[e.signal_id].push_back(&e);
    }
    features::FeatureMatrix fm;
    std::vector<std::vector<double>> rows;
    for (const auto& id : order) {
        const auto& g = groups[id];
        std::vector<features::ColumnMeta> cols;
        std::vector<std::vector<double>> parts;
        std::vector<Graph> graphs;
        for (const auto* e : g) graphs.push_back(read_edgelist(fs::path(in_dir) / e->file));
        for (int o = 0; o <= (with_sgn ? 1 : 0); ++o) {
            for (std::size_t c = 0; c < g.size(); ++c) {
                parts.push_back(features::wl_embed(o == 0 ? graphs[c] : sgn1(graphs[c]), cfg));
                for (std::size_t k = 0; k < dim; ++k) cols.push_back({g[c]->channel, o, g[c]->window, k});
            }
        }
        if (fm.columns.empty()) {
            fm.columns = cols;
        } else if (cols != fm.columns) {
            throw DataError("signal '" + id + "' has a different channel layout");
        }
        rows.push_back(features::fuse(parts));
        fm.labels.push_back(g.front()->label);
        fm.snr_db.push_back(g.front()->snr.empty() ? std::nullopt : std::optional<double>(parse_double(g.front()->snr)));
    }
    fm.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(fm.columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) fm.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    auto f = open_out(out);
    features::write_csv(fm, f);
    return 0;
}

// --------------------------------------------------------------------- pca

int run_pca(const std::string& in, std::optional<std::size_t> theta, double variance, const std::string& out,
            const std::string& model_out) {
    const auto fm = features::read_csv(fs::path(in));
    const std::size_t t = theta ? *theta : features::theta_for_variance(fm, variance);
    const auto model = features::pca_fit(fm, t);
    {
        auto f = open_out(out);
        features::write_csv(features::pca_transform(model, fm), f);
    }
    if (!model_out.empty()) {
        auto f = open_out(model_out);
        f << features::to_json(model).dump() << '\n';
    }
    std::cerr << "theta=" << t << '\n';
    return 0;
}

// ---------------------------------------------------------------- classify

struct ClassifyOpts {
    std::string in;
    std::string mode = "cv,k=10";
    std::size_t trees = 200;
    std::optional<std::size_t> max_depth;
    std::size_t min_leaf = 1;
    std::string feature_frac = "sqrt";
    std::uint64_t seed = 0;
    std::string report;
};

int run_classify(const ClassifyOpts& o) {
    const auto fm = features::read_csv(fs::path(o.in));
    classify::ForestParams p;
    p.n_trees = o.trees;
    p.max_depth = o.max_depth;
    p.min_leaf = o.min_leaf;
    p.feature_frac = classify::parse_feature_frac(o.feature_frac);
    p.seed = o.seed;

    const auto parts = split(o.mode, ',');
    if (parts.empty()) throw UsageError("--mode must be 'cv,k=N' or 'split,ratio=R'");
    std::map<std::string, std::string> kv;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos) throw UsageError("--mode option '" + parts[i] + "' is not key=value");
        kv[parts[i].substr(0, eq)] = parts[i].substr(eq + 1);
    }
    classify::EvalReport rep;
    if (parts[0] == "cv") {
        const std::size_t k = kv.count("k") ? std::stoul(kv["k"]) : 10;
        rep = classify::kfold_cv(fm, k, p, o.seed);
    } else if (parts[0] == "split") {
        const double ratio = kv.count("ratio") ? parse_double(kv["ratio"]) : 0.8;
        rep = classify::evaluate_split(fm, ratio, p, o.seed);
    } else {
        throw UsageError("--mode must be 'cv,k=N' or 'split,ratio=R'");
    }
    std::cout << classify::summary_table(rep);
    if (!o.report.empty()) {
        auto f = open_out(o.report);
        f << classify::to_json(rep).dump(2) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- pipeline

struct PipelineOpts {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<std::size_t> trees;
    std::string method;
    std::optional<std::size_t> m;
    std::optional<double> alpha;
    std::string windows;
};

int run_pipeline_cmd(const PipelineOpts& o) {
    std::ifstream f(o.config, std::ios::binary);
    if (!f) throw DataError("cannot read " + o.config);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    if (o.seed) j["seed"] = *o.seed;
    if (!o.out_dir.empty()) j["out_dir"] = fs::absolute(o.out_dir).string();
    if (o.trees) j["classifier"]["n_trees"] = *o.trees;
    if (!o.method.empty()) j["method"]["method"] = o.method;
    if (o.m) j["method"]["m"] = *o.m;
    if (o.alpha) j["method"]["alpha"] = *o.alpha;
    if (!o.windows.empty()) {
        std::vector<std::size_t> ws;
        for (const auto& w : split(o.windows, ',')) ws.push_back(std::stoul(w));
        j["windows"] = ws;
    }
    const auto cfg = pipeline::config_from_json(j, fs::path(o.config).parent_path());
    const auto res = pipeline::run_pipeline(cfg);
    std::cout << "fused width " << res.fused_width << ", reduced width " << res.reduced_width << '\n';
    std::cout << classify::summary_table(res.report);
    return 0;
}

// --------------------------------------------------------------- plot-data

int run_plot_data(const std::string& hist_dir, const std::string& report, const std::string& out_dir) {
    fs::create_directories(out_dir);
    if (!hist_dir.empty()) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(hist_dir)) {
            if (e.path().extension() == ".json") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        auto all = open_out(fs::path(out_dir) / "degree_histograms.csv");
        all << "graph,degree,count\n";
        for (const auto& p : files) {
            std::ifstream f(p, std::ios::binary);
            json j;
            try {
                j = json::parse(f);
            } catch (const json::parse_error& e) {
                throw DataError(p.string() + ": " + e.what());
            }
            DegreeDistribution dd;
            dd.n = j.value("n", std::size_t{0});
            for (const auto& [d, c] : j.at("degree_counts").items()) dd.counts[std::stoul(d)] = c.get<std::size_t>();
            pipeline::write_degree_histogram_csv(dd, fs::path(out_dir) / (p.stem().string() + ".degree.csv"));
            for (const auto& [d, c] : dd.counts) all << p.stem().string() << ',' << d << ',' << c << '\n';
        }
    }
    if (!report.empty()) {
        std::ifstream f(report, std::ios::binary);
        if (!f) throw DataError("cannot read " + report);
        json j;
        try {
            j = json::parse(f);
        } catch (const json::parse_error& e) {
            throw DataError(report + ": " + e.what());
        }
        pipeline::write_accuracy_vs_snr_csv(classify::report_from_json(j), fs::path(out_dir) / "accuracy_vs_snr.csv");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vistra: visibility-graph features for time-series classification"};
    app.require_subcommand(1);

    GenerateOpts gen;
    auto* g = app.add_subcommand("generate", "Generate artificial signals as JSONL");
    g->add_option("--kind", gen.kind, "sin | lorenz | rossler | iq-standin")->check(CLI::IsMember({"sin", "lorenz", "rossler", "iq-standin"}));
    g->add_option("--n", gen.n, "Samples per signal");
    g->add_option("--dt", gen.dt, "Sampling interval (default 0.01, 0.1 for rossler)");
    g->add_option("--init", gen.init, "Initial state x,y,z (phase offset for sin)");
    g->add_option("--snr-db", gen.snr, "Noise level in dB, or 'clean'");
    g->add_option("--snr-levels", gen.snr_levels, "Comma-separated SNR levels cycled across signals");
    g->add_option("--seed", gen.seed);
    g->add_option("--count", gen.count, "Signals to emit (per class for iq-standin)");
    g->add_flag("--random-init", gen.random_init, "Draw initial states from the seed");
    g->add_option("--out", gen.out, "Output JSONL (stdout when omitted)");

    std::string val_in, val_chans, val_labels;
    std::optional<std::size_t> val_len;
    auto* v = app.add_subcommand("convert-validate", "Validate a JSONL signal file");
    v->add_option("--in", val_in)->required();
    v->add_option("--expect-length", val_len);
    v->add_option("--expect-channels", val_chans, "Comma-separated channel names");
    v->add_option("--labels", val_labels, "Comma-separated allowed labels");

    std::string cmp_in, cmp_out;
    std::size_t cmp_w = 3;
    std::vector<std::string> cmp_chans;
    auto* c = app.add_subcommand("compress", "Peak-detection compression");
    c->add_option("--in", cmp_in)->required();
    c->add_option("--w", cmp_w, "Window size")->check(CLI::PositiveNumber);
    c->add_option("--channel", cmp_chans);
    c->add_option("--out", cmp_out)->required();

    TransformOpts tr;
    auto* t = app.add_subcommand("transform", "Build visibility graphs");
    t->add_option("--in", tr.in)->required();
    t->add_option("--method", tr.method)->check(CLI::IsMember({"vg", "lpvg", "clpvg"}));
    t->add_option("--m", tr.m, "Penetrable distance");
    t->add_option("--alpha", tr.alpha, "Curvature (CLPVG)");
    t->add_option("--channel", tr.channels, "Channels to transform (A and W are derived from I/Q)");
    t->add_option("--channel-alpha", tr.channel_alpha, "Per-channel curvature NAME=VALUE");
    t->add_option("--w", tr.window, "Peak-detection window applied first (0 = none)");
    t->add_option("--out-dir", tr.out_dir)->required();

    std::string sgn_in, sgn_out, sgn_map;
    auto* s = app.add_subcommand("sgn", "First-order subgraph network of an edge list");
    s->add_option("--in", sgn_in)->required();
    s->add_option("--out", sgn_out)->required();
    s->add_option("--map", sgn_map, "CSV mapping SGN nodes to source edges");

    std::string met_dir, met_out, met_hist;
    auto* mt = app.add_subcommand("metrics", "Graph metrics CSV");
    mt->add_option("--in-dir", met_dir)->required();
    mt->add_option("--out", met_out)->required();
    mt->add_option("--hist-dir", met_hist, "Directory for per-graph degree histogram JSON");

    std::string emb_dir, emb_out;
    std::size_t emb_h = 3, emb_dim = 128;
    bool emb_sgn = false;
    auto* e = app.add_subcommand("embed", "WL-subtree embeddings as a feature CSV");
    e->set_help_flag("--help", "Print this help message and exit");
    e->add_option("--in-dir", emb_dir)->required();
    e->add_option("--h", emb_h);
    e->add_option("--dim", emb_dim)->check(CLI::PositiveNumber);
    e->add_flag("--with-sgn", emb_sgn);
    e->add_option("--out", emb_out)->required();

    std::string pca_in, pca_out, pca_model;
    std::optional<std::size_t> pca_theta;
    double pca_var = 0.95;
    auto* p = app.add_subcommand("pca", "PCA reduction of a feature CSV");
    p->add_option("--in", pca_in)->required();
    auto* theta_opt = p->add_option("--theta", pca_theta);
    p->add_option("--variance", pca_var)->excludes(theta_opt);
    p->add_option("--out", pca_out)->required();
    p->add_option("--model", pca_model);

    ClassifyOpts cl;
    auto* k = app.add_subcommand("classify", "Random forest evaluation");
    k->add_option("--in", cl.in)->required();
    k->add_option("--mode", cl.mode, "cv,k=10 | split,ratio=0.8");
    k->add_option("--trees", cl.trees);
    k->add_option("--max-depth", cl.max_depth);
    k->add_option("--min-leaf", cl.min_leaf);
    k->add_option("--feature-frac", cl.feature_frac);
    k->add_option("--seed", cl.seed);
    k->add_option("--report", cl.report, "JSON report path");

    PipelineOpts pl;
    auto* pp = app.add_subcommand("pipeline", "Run the end-to-end pipeline from a JSON config");
    pp->add_option("--config", pl.config)->required();
    pp->add_option("--seed", pl.seed);
    pp->add_option("--out-dir", pl.out_dir);
    pp->add_option("--trees", pl.trees);
    pp->add_option("--method", pl.method);
    pp->add_option("--m", pl.m);
    pp->add_option("--alpha", pl.alpha);
    pp->add_option("--windows", pl.windows, "Comma-separated window sizes");

    std::string pd_hist, pd_report, pd_out;
    auto* pd = app.add_subcommand("plot-data", "Plot-ready CSVs from metrics and reports");
    pd->add_option("--hist-dir", pd_hist);
    pd->add_option("--report", pd_report);
    pd->add_option("--out-dir", pd_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*g) return run_generate(gen);
        if (*v) return run_validate(val_in, val_len, val_chans, val_labels);
        if (*c) return run_compress(cmp_in, cmp_w, cmp_chans, cmp_out);
        if (*t) return run_transform(tr);
        if (*s) return run_sgn(sgn_in, sgn_out, sgn_map);
        if (*mt) return run_metrics(met_dir, met_out, met_hist);
        if (*e) return run_embed(emb_dir, emb_h, emb_dim, emb_sgn, emb_out);
        if (*p) return run_pca(pca_in, pca_theta, pca_var, pca_out, pca_model);
        if (*k) return run_classify(cl);
        if (*pp) return run_pipeline_cmd(pl);
        if (*pd) return run_plot_data(pd_hist, pd_report, pd_out);
    } catch (const UsageError& err) {
        std::cerr << "usage error: " << err.what() << '\n';
        return kExitUsage;
    } catch (const pipeline::StageError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return err.cause == pipeline::StageError::Cause::Numeric ? kExitNumeric : kExitData;
    } catch (const NumericError& err) {
        std::cerr << "numeric error: " << err.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
