#include "vistra/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "vistra/error.hpp"
#include "vistra/format.hpp"
#include "vistra/jsonl.hpp"
#include "vistra/parallel.hpp"
#include "vistra/pca.hpp"
#include "vistra/signals.hpp"

namespace vistra::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

double PipelineConfig::alpha_for(const std::string& channel) const {
    auto it = channel_alpha.find(channel);
    return it == channel_alpha.end() ? method.alpha : it->second;
}

void PipelineConfig::validate() const {
    if (dataset.empty()) throw std::invalid_argument("config: dataset path is required");
    if (format != "jsonl") throw std::invalid_argument("config: unsupported dataset format '" + format + "'");
    if (!fs::exists(dataset)) throw std::invalid_argument("config: dataset " + dataset.string() + " does not exist");
    if (out_dir.empty()) throw std::invalid_argument("config: out_dir is required");
    if (method.method == visibility::Method::CLPVG) {
        for (const auto& c : channels) {
            const double a = alpha_for(c);
            if (!std::isfinite(a) || a == 0.0) throw std::invalid_argument("config: alpha for channel '" + c + "' must be nonzero");
        }
        if (!std::isfinite(method.alpha) || method.alpha == 0.0) throw std::invalid_argument("config: alpha must be nonzero");
    }
    for (const auto& [c, a] : channel_alpha) {
        if (std::find(channels.begin(), channels.end(), c) == channels.end()) {
            throw std::invalid_argument("config: alpha given for unknown channel '" + c + "'");
        }
    }
    for (std::size_t w : windows) {
        if (w == 0) throw std::invalid_argument("config: window sizes must be positive");
    }
    if (std::set<std::size_t>(windows.begin(), windows.end()).size() != windows.size()) {
        throw std::invalid_argument("config: duplicate window sizes");
    }
    if (wl.dim == 0) throw std::invalid_argument("config: wl.dim must be positive");
    if (pca_variance && !(*pca_variance > 0.0 && *pca_variance <= 1.0)) {
        throw std::invalid_argument("config: pca.variance must be in (0, 1]");
    }
    if (evaluation.kind == EvaluationMode::Kind::Split && !(evaluation.ratio > 0.0 && evaluation.ratio < 1.0)) {
        throw std::invalid_argument("config: split ratio must be in (0, 1)");
    }
    if (evaluation.kind == EvaluationMode::Kind::CrossValidation && evaluation.k < 2) {
        throw std::invalid_argument("config: cv needs k >= 2");
    }
}

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
    PipelineConfig c;
    auto resolve = [&](const std::string& p) {
        fs::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };
    try {
        const auto& ds = j.at("dataset");
        if (ds.is_string()) {
            c.dataset = resolve(ds.get<std::string>());
        } else {
            c.dataset = resolve(ds.at("path").get<std::string>());
            c.format = ds.value("format", "jsonl");
        }
        if (j.contains("channels")) {
            for (const auto& ch : j["channels"]) {
                if (ch.is_string()) {
                    c.channels.push_back(ch.get<std::string>());
                } else {
                    c.channels.push_back(ch.at("name").get<std::string>());
                    if (ch.contains("alpha")) c.channel_alpha[c.channels.back()] = ch["alpha"].get<double>();
                }
            }
        }
        if (j.contains("method")) {
            const auto& m = j["method"];
            c.method.method = visibility::parse_method(m.value("method", "clpvg"));
            c.method.m = m.value("m", std::size_t{1});
            c.method.alpha = m.value("alpha", 10.0);
        }
        if (j.contains("windows")) c.windows = j["windows"].get<std::vector<std::size_t>>();
        c.sgn = j.value("sgn", true);
        if (j.contains("wl")) {
            c.wl.h = j["wl"].value("h", std::size_t{3});
            c.wl.dim = j["wl"].value("dim", std::size_t{128});
        }
        if (j.contains("pca")) {
            const auto& p = j["pca"];
            if (p.is_null() || (p.is_string() && p.get<std::string>() == "off")) {
                c.pca_variance.reset();
            } else if (p.contains("theta") && !p["theta"].is_null()) {
                c.pca_theta = p["theta"].get<std::size_t>();
                c.pca_variance.reset();
            } else {
                c.pca_variance = p.value("variance", 0.95);
            }
        }
        if (j.contains("classifier")) {
            const auto& r = j["classifier"];
            c.classifier.n_trees = r.value("n_trees", std::size_t{200});
            if (r.contains("max_depth") && !r["max_depth"].is_null()) c.classifier.max_depth = r["max_depth"].get<std::size_t>();
            c.classifier.min_leaf = r.value("min_leaf", std::size_t{1});
            if (r.contains("feature_frac")) {
                const auto& f = r["feature_frac"];
                c.classifier.feature_frac = f.is_string() ? classify::parse_feature_frac(f.get<std::string>())
                                                          : std::optional<double>(f.get<double>());
            }
        }
        if (j.contains("evaluation")) {
            const auto& e = j["evaluation"];
            const std::string mode = e.value("mode", "split");
            if (mode == "split") {
                c.evaluation.kind = EvaluationMode::Kind::Split;
                c.evaluation.ratio = e.value("ratio", 0.8);
            } else if (mode == "cv") {
                c.evaluation.kind = EvaluationMode::Kind::CrossValidation;
                c.evaluation.k = e.value("k", std::size_t{10});
            } else {
                throw std::invalid_argument("config: evaluation mode must be 'split' or 'cv'");
            }
        }
        c.seed = j.value("seed", std::uint64_t{0});
        c.out_dir = resolve(j.at("out_dir").get<std::string>());
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    c.classifier.seed = c.seed;
    return c;
}

json to_json(const PipelineConfig& c) {
    json j;
    j["dataset"] = {{"path", c.dataset.generic_string()}, {"format", c.format}};
    json ch = json::array();
    for (const auto& name : c.channels) ch.push_back({{"name", name}, {"alpha", c.alpha_for(name)}});
    j["channels"] = ch;
    j["method"] = {{"method", std::string(visibility::to_string(c.method.method))}, {"m", c.method.m}, {"alpha", c.method.alpha}};
    j["windows"] = c.windows;
    j["sgn"] = c.sgn;
    j["wl"] = {{"h", c.wl.h}, {"dim", c.wl.dim}};
    if (c.pca_theta) {
        j["pca"] = {{"theta", *c.pca_theta}};
    } else if (c.pca_variance) {
        j["pca"] = {{"variance", *c.pca_variance}};
    } else {
        j["pca"] = nullptr;
    }
    j["classifier"] = {{"n_trees", c.classifier.n_trees},
                       {"max_depth", c.classifier.max_depth ? json(*c.classifier.max_depth) : json(nullptr)},
                       {"min_leaf", c.classifier.min_leaf},
                       {"feature_frac", c.classifier.feature_frac ? json(*c.classifier.feature_frac) : json("sqrt")}};
    if (c.evaluation.kind == EvaluationMode::Kind::Split) {
        j["evaluation"] = {{"mode", "split"}, {"ratio", c.evaluation.ratio}};
    } else {
        j["evaluation"] = {{"mode", "cv"}, {"k", c.evaluation.k}};
    }
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir.generic_string();
    return j;
}

StageError::StageError(std::string stage, std::string signal_id, const std::string& detail)
    : std::runtime_error("stage '" + stage + "' failed" + (signal_id.empty() ? "" : " for signal '" + signal_id + "'") +
                         ": " + detail),
      stage_(std::move(stage)),
      signal_id_(std::move(signal_id)) {}

Graph channel_graph(const TimeSeries& series, std::size_t window, const visibility::VgParams& params) {
    if (window == 0) return visibility::build(series, params);
    return visibility::build(signals::peak_compress(series, {window}), params);
}

MultiChannelSignal with_derived_channels(const MultiChannelSignal& signal, const std::vector<std::string>& wanted) {
    const bool need_a = std::find(wanted.begin(), wanted.end(), "A") != wanted.end() && !signal.find_channel("A");
    const bool need_w = std::find(wanted.begin(), wanted.end(), "W") != wanted.end() && !signal.find_channel("W");
    if (!need_a && !need_w) return signal;
    MultiChannelSignal out = signal;
    auto [a, w] = signals::derive_channels(signal.channel("I"), signal.channel("Q"));
    if (need_a) out.add_channel("A", std::move(a));
    if (need_w) out.add_channel("W", std::move(w));
    return out;
}

namespace {

std::vector<std::string> channels_of(const MultiChannelSignal& s, const PipelineConfig& cfg) {
    return cfg.channels.empty() ? s.channel_names : cfg.channels;
}

visibility::VgParams params_for(const PipelineConfig& cfg, const std::string& channel) {
    visibility::VgParams p = cfg.method;
    p.alpha = cfg.alpha_for(channel);
    return p;
}

std::vector<features::ColumnMeta> column_layout(const std::vector<std::string>& channels, std::size_t window,
                                                bool sgn, std::size_t dim) {
    std::vector<features::ColumnMeta> cols;
    for (int order = 0; order <= (sgn ? 1 : 0); ++order) {
        for (const auto& ch : channels) {
            for (std::size_t k = 0; k < dim; ++k) cols.push_back({ch, order, window, k});
        }
    }
    return cols;
}

std::string safe_name(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
    }
    return out;
}

// Graphs of one signal at one window, in fusion order.
struct SignalGraphs {
    std::vector<Graph> graphs;
    std::vector<Graph> sgns;
};

SignalGraphs signal_graphs(const MultiChannelSignal& signal, const PipelineConfig& cfg, std::size_t window) {
    SignalGraphs out;
    const auto chans = channels_of(signal, cfg);
    std::string stage;
    try {
        for (const auto& ch : chans) {
            const TimeSeries& series = signal.channel(ch);
            stage = "compress";
            const TimeSeries compressed = window == 0 ? series : signals::peak_compress(series, {window});
            stage = "transform";
            out.graphs.push_back(visibility::build(compressed, params_for(cfg, ch)));
            if (cfg.sgn) {
                stage = "sgn";
                out.sgns.push_back(sgn1(out.graphs.back()));
            }
        }
    } catch (const NumericError& e) {
        StageError err(stage, signal.id, e.what());
        err.cause = StageError::Cause::Numeric;
        throw err;
    } catch (const std::exception& e) {
        throw StageError(stage, signal.id, e.what());
    }
    return out;
}

std::vector<double> embed_all(const SignalGraphs& g, const PipelineConfig& cfg) {
    std::vector<std::vector<double>> parts;
    for (const auto& graph : g.graphs) parts.push_back(features::wl_embed(graph, cfg.wl));
    for (const auto& graph : g.sgns) parts.push_back(features::wl_embed(graph, cfg.wl));
    return features::fuse(parts);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f << text;
}

}  // namespace

std::vector<double> signal_features(const MultiChannelSignal& signal, const PipelineConfig& cfg, std::size_t window) {
    return embed_all(signal_graphs(signal, cfg, window), cfg);
}

std::string file_digest(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return sha256_hex(ss.str());
}

PipelineResult run_pipeline(const PipelineConfig& cfg_in) {
    PipelineConfig cfg = cfg_in;
    cfg.classifier.seed = cfg.seed;
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    PipelineResult result;

    std::vector<MultiChannelSignal> data;
    try {
        data = io::read_signals(cfg.dataset);
    } catch (const std::exception& e) {
        throw StageError("load", "", e.what());
    }
    if (data.size() < 2) throw StageError("load", "", "dataset needs at least 2 signals");

    const auto wanted = cfg.channels;
    for (auto& s : data) {
        try {
            s = with_derived_channels(s, wanted);
            for (const auto& ch : channels_of(s, cfg)) s.channel(ch);
        } catch (const std::exception& e) {
            throw StageError("derive", s.id, e.what());
        }
    }
    const auto channels = channels_of(data.front(), cfg);
    for (const auto& s : data) {
        if (channels_of(s, cfg) != channels) throw StageError("derive", s.id, "channel list differs from the first signal");
    }

    const std::vector<std::size_t> windows = cfg.windows.empty() ? std::vector<std::size_t>{0} : cfg.windows;
    const std::size_t per_window = (cfg.sgn ? 2 : 1) * channels.size() * cfg.wl.dim;

    std::vector<features::FeatureMatrix> per_window_fm;
    for (std::size_t w : windows) {
        const fs::path graph_dir = cfg.out_dir / "graphs" / ("w" + std::to_string(w));
        fs::create_directories(graph_dir);
        features::FeatureMatrix fm;
        fm.rows.resize(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(per_window));
        fm.columns = column_layout(channels, w, cfg.sgn, cfg.wl.dim);
        std::vector<std::vector<std::string>> files(data.size());

        parallel_for(data.size(), [&](std::size_t i) {
            const auto& s = data[i];
            const SignalGraphs g = signal_graphs(s, cfg, w);
            for (std::size_t c = 0; c < channels.size(); ++c) {
                const std::string stem = safe_name(s.id) + "." + safe_name(channels[c]);
                write_edgelist(g.graphs[c], graph_dir / (stem + ".edges"));
                files[i].push_back(stem + ".edges");
                if (cfg.sgn) {
                    write_edgelist(g.sgns[c], graph_dir / (stem + ".sgn.edges"));
                    files[i].push_back(stem + ".sgn.edges");
                }
            }
            std::vector<double> row;
            try {
                row = embed_all(g, cfg);
            } catch (const std::exception& e) {
                throw StageError("embed", s.id, e.what());
            }
            for (std::size_t k = 0; k < row.size(); ++k) {
                fm.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
            }
        });
        for (const auto& s : data) {
            fm.labels.push_back(s.label);
            fm.snr_db.push_back(s.snr_db);
        }
        for (const auto& f : files) {
            for (const auto& name : f) result.artifacts.push_back(fs::path("graphs") / ("w" + std::to_string(w)) / name);
        }
        const std::string name = "features_w" + std::to_string(w) + ".csv";
        features::write_csv(fm, cfg.out_dir / name);
        result.artifacts.emplace_back(name);
        per_window_fm.push_back(std::move(fm));
    }

    features::FeatureMatrix fused = features::hconcat(per_window_fm);
    result.fused_width = fused.col_count();
    features::write_csv(fused, cfg.out_dir / "features.csv");
    result.artifacts.emplace_back("features.csv");

    features::FeatureMatrix reduced = fused;
    if (cfg.pca_theta || cfg.pca_variance) {
        try {
            const std::size_t theta = cfg.pca_theta ? *cfg.pca_theta : features::theta_for_variance(fused, *cfg.pca_variance);
            const auto model = features::pca_fit(fused, theta);
            reduced = features::pca_transform(model, fused);
            write_text(cfg.out_dir / "pca.json", features::to_json(model).dump() + "\n");
            result.artifacts.emplace_back("pca.json");
        } catch (const std::invalid_argument& e) {
            throw StageError("pca", "", e.what());
        }
        features::write_csv(reduced, cfg.out_dir / "reduced.csv");
        result.artifacts.emplace_back("reduced.csv");
    }
    result.reduced_width = reduced.col_count();

    try {
        result.report = cfg.evaluation.kind == EvaluationMode::Kind::Split
                            ? classify::evaluate_split(reduced, cfg.evaluation.ratio, cfg.classifier, cfg.seed)
                            : classify::kfold_cv(reduced, cfg.evaluation.k, cfg.classifier, cfg.seed);
    } catch (const std::invalid_argument& e) {
        throw StageError("classify", "", e.what());
    }
    write_text(cfg.out_dir / "report.json", classify::to_json(result.report).dump(2) + "\n");
    write_text(cfg.out_dir / "report.txt", classify::summary_table(result.report));
    result.artifacts.emplace_back("report.json");
    result.artifacts.emplace_back("report.txt");
    if (!result.report.per_snr.empty()) {
        write_accuracy_vs_snr_csv(result.report, cfg.out_dir / "accuracy_vs_snr.csv");
        result.artifacts.emplace_back("accuracy_vs_snr.csv");
    }

    const std::string config_text = to_json(cfg).dump();
    json manifest;
    manifest["config"] = to_json(cfg);
    manifest["config_hash"] = sha256_hex(config_text);
    manifest["seed"] = cfg.seed;
    manifest["fused_width"] = result.fused_width;
    manifest["reduced_width"] = result.reduced_width;
    json files = json::array();
    std::sort(result.artifacts.begin(), result.artifacts.end());
    for (const auto& rel : result.artifacts) {
        const fs::path full = cfg.out_dir / rel;
        files.push_back({{"path", rel.generic_string()}, {"sha256", file_digest(full)}, {"bytes", fs::file_size(full)}});
    }
    manifest["files"] = files;
    write_text(cfg.out_dir / "manifest.json", manifest.dump(2) + "\n");
    return result;
}

void write_degree_histogram_csv(const DegreeDistribution& dist, const fs::path& path) {
    std::ostringstream out;
    out << "degree,count\n";
    for (const auto& [d, c] : dist.counts) out << d << ',' << c << '\n';
    write_text(path, out.str());
}

void write_accuracy_vs_snr_csv(const classify::EvalReport& report, const fs::path& path) {
    std::ostringstream out;
    out << "snr_db,accuracy,count\n";
    for (const auto& [snr, s] : report.per_snr) out << format_double(snr) << ',' << format_double(s.accuracy) << ',' << s.count << '\n';
    write_text(path, out.str());
}

}  // namespace vistra::pipeline
