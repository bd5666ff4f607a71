#include "vistra/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "vistra/error.hpp"
#include "vistra/format.hpp"

namespace vistra::features {

std::uint64_t fnv1a64(std::span<const std::uint64_t> words) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t w : words) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (w >> (8 * byte)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::vector<std::vector<std::uint64_t>> wl_labels(const Graph& g, std::size_t h) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<std::uint64_t>> rounds;
    rounds.reserve(h + 1);

    std::vector<std::uint64_t> labels(n);
    for (NodeId v = 0; v < n; ++v) {
        const std::uint64_t deg = g.degree(v);
        labels[v] = fnv1a64({&deg, 1});
    }
    rounds.push_back(labels);

    std::vector<std::uint64_t> buf;
    for (std::size_t r = 0; r < h; ++r) {
        const auto& prev = rounds.back();
        std::vector<std::uint64_t> next(n);
        for (NodeId v = 0; v < n; ++v) {
            buf.clear();
            buf.push_back(prev[v]);
            for (NodeId u : g.neighbors(v)) buf.push_back(prev[u]);
            std::sort(buf.begin() + 1, buf.end());
            next[v] = fnv1a64(buf);
        }
        rounds.push_back(std::move(next));
    }
    return rounds;
}

std::vector<double> wl_embed(const Graph& g, const WlConfig& cfg) {
    if (g.node_count() == 0) throw std::invalid_argument("cannot embed a graph without nodes");
    if (cfg.dim == 0) throw std::invalid_argument("embedding dimension must be positive");
    std::vector<double> hist(cfg.dim, 0.0);
    for (const auto& round : wl_labels(g, cfg.h)) {
        for (std::uint64_t label : round) hist[label % cfg.dim] += 1.0;
    }
    double norm = 0.0;
    for (double v : hist) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : hist) v /= norm;
    return hist;
}

std::vector<double> fuse(std::span<const std::vector<double>> parts) {
    if (parts.empty()) throw std::invalid_argument("nothing to fuse");
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    std::vector<double> out;
    out.reserve(total);
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::string ColumnMeta::name() const {
    return channel + ".o" + std::to_string(order) + ".w" + std::to_string(window) + "." + std::to_string(index);
}

ColumnMeta ColumnMeta::parse(const std::string& name) {
    // <channel>.o<order>.w<window>.<index>; the channel may itself contain dots.
    auto bad = [&] { return DataError("malformed feature column name '" + name + "'"); };
    const auto p3 = name.rfind('.');
    if (p3 == std::string::npos || p3 == 0) throw bad();
    const auto p2 = name.rfind('.', p3 - 1);
    if (p2 == std::string::npos || p2 == 0) throw bad();
    const auto p1 = name.rfind('.', p2 - 1);
    if (p1 == std::string::npos) throw bad();
    const std::string o = name.substr(p1 + 1, p2 - p1 - 1);
    const std::string w = name.substr(p2 + 1, p3 - p2 - 1);
    const std::string idx = name.substr(p3 + 1);
    if (o.size() < 2 || o[0] != 'o' || w.size() < 2 || w[0] != 'w' || idx.empty()) throw bad();
    try {
        ColumnMeta m;
        m.channel = name.substr(0, p1);
        m.order = std::stoi(o.substr(1));
        m.window = std::stoul(w.substr(1));
        m.index = std::stoul(idx);
        return m;
    } catch (const std::logic_error&) {
        throw bad();
    }
}

void FeatureMatrix::validate() const {
    if (labels.size() != row_count()) throw std::invalid_argument("label count differs from row count");
    if (snr_db.size() != row_count()) throw std::invalid_argument("SNR tag count differs from row count");
    if (columns.size() != col_count()) throw std::invalid_argument("column metadata count differs from column count");
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> idx) const {
    FeatureMatrix out;
    out.rows.resize(static_cast<Eigen::Index>(idx.size()), rows.cols());
    out.columns = columns;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        if (idx[r] >= row_count()) throw std::invalid_argument("row index out of range");
        out.rows.row(static_cast<Eigen::Index>(r)) = rows.row(static_cast<Eigen::Index>(idx[r]));
        out.labels.push_back(labels[idx[r]]);
        out.snr_db.push_back(snr_db[idx[r]]);
    }
    return out;
}

FeatureMatrix hconcat(std::span<const FeatureMatrix> parts) {
    if (parts.empty()) throw std::invalid_argument("nothing to concatenate");
    FeatureMatrix out;
    out.labels = parts.front().labels;
    out.snr_db = parts.front().snr_db;
    Eigen::Index cols = 0;
    for (const auto& p : parts) {
        p.validate();
        if (p.labels != out.labels) throw std::invalid_argument("feature matrices are not row-aligned");
        cols += p.rows.cols();
    }
    out.rows.resize(parts.front().rows.rows(), cols);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.rows.middleCols(at, p.rows.cols()) = p.rows;
        at += p.rows.cols();
        out.columns.insert(out.columns.end(), p.columns.begin(), p.columns.end());
    }
    return out;
}

void write_csv(const FeatureMatrix& fm, std::ostream& out) {
    fm.validate();
    out << "label,snr_db";
    for (const auto& c : fm.columns) out << ',' << c.name();
    out << '\n';
    for (std::size_t r = 0; r < fm.row_count(); ++r) {
        if (fm.labels[r].find_first_of(",\"\n") != std::string::npos) {
            throw std::invalid_argument("label '" + fm.labels[r] + "' cannot be written to CSV");
        }
        out << fm.labels[r] << ',';
        if (fm.snr_db[r]) out << format_double(*fm.snr_db[r]);
        for (Eigen::Index c = 0; c < fm.rows.cols(); ++c) {
            out << ',' << format_double(fm.rows(static_cast<Eigen::Index>(r), c));
        }
        out << '\n';
    }
}

void write_csv(const FeatureMatrix& fm, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    write_csv(fm, f);
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

FeatureMatrix read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("feature CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_commas(line);
    if (header.size() < 2 || header[0] != "label" || header[1] != "snr_db") {
        throw DataError("feature CSV header must start with 'label,snr_db'");
    }
    FeatureMatrix fm;
    for (std::size_t c = 2; c < header.size(); ++c) fm.columns.push_back(ColumnMeta::parse(header[c]));
    const std::size_t cols = fm.columns.size();

    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != cols + 2) {
            throw DataError("feature CSV line " + std::to_string(lineno) + ": expected " + std::to_string(cols + 2) +
                            " fields, got " + std::to_string(cells.size()));
        }
        try {
            fm.labels.push_back(cells[0]);
            fm.snr_db.push_back(cells[1].empty() ? std::nullopt : std::optional<double>(parse_double(cells[1])));
            for (std::size_t c = 0; c < cols; ++c) values.push_back(parse_double(cells[c + 2]));
        } catch (const std::invalid_argument& e) {
            throw DataError("feature CSV line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    fm.rows.resize(static_cast<Eigen::Index>(fm.labels.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < fm.labels.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            fm.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
        }
    }
    return fm;
}

FeatureMatrix read_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read " + path.string());
    return read_csv(f);
}

}  // namespace vistra::features
