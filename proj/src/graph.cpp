#include "vistra/graph.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vistra/error.hpp"

namespace vistra {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n) {
    for (auto& [u, v] : edges) {
        if (u == v) throw std::invalid_argument("self-loop on node " + std::to_string(u));
        if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw std::invalid_argument("duplicate edge");
    }
    edges_ = std::move(edges);
    build_adjacency();
}

Graph::Graph(std::size_t n, std::vector<Edge> sorted_edges, Canonical) : n_(n), edges_(std::move(sorted_edges)) {
    build_adjacency();
}

Graph graph_from_sorted_edges(std::size_t n, std::vector<Edge> edges) {
    assert(std::is_sorted(edges.begin(), edges.end()));
    assert(std::adjacent_find(edges.begin(), edges.end()) == edges.end());
    assert(std::all_of(edges.begin(), edges.end(), [n](const Edge& e) { return e.first < e.second && e.second < n; }));
    return Graph(n, std::move(edges), Graph::Canonical{});
}

void Graph::build_adjacency() {
    offsets_.assign(n_ + 1, 0);
    for (const auto& [u, v] : edges_) {
        ++offsets_[u + 1];
        ++offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_[n_]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    // Iterating sorted (u, v) pairs leaves every adjacency list sorted: node x
    // first receives its smaller neighbors (as v) in u order, then larger ones.
    for (const auto& [u, v] : edges_) adjacency_[fill[v]++] = u;
    for (const auto& [u, v] : edges_) adjacency_[fill[u]++] = v;
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    if (u >= n_ || v >= n_) return false;
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

DegreeDistribution degree_distribution(const Graph& g) {
    DegreeDistribution d;
    d.n = g.node_count();
    for (NodeId v = 0; v < g.node_count(); ++v) ++d.counts[g.degree(v)];
    return d;
}

double avg_clustering(const Graph& g) {
    if (g.node_count() == 0) return 0.0;
    double total = 0.0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto nb = g.neighbors(v);
        const std::size_t k = nb.size();
        if (k < 2) continue;
        std::size_t links = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const auto ni = g.neighbors(nb[i]);
            // count neighbors of nb[i] that are also neighbors of v and > nb[i]
            auto a = std::upper_bound(ni.begin(), ni.end(), nb[i]);
            auto b = nb.begin() + static_cast<std::ptrdiff_t>(i) + 1;
            while (a != ni.end() && b != nb.end()) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
                    ++links;
                    ++a;
                    ++b;
                }
            }
        }
        total += 2.0 * static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
    }
    return total / static_cast<double>(g.node_count());
}

Graph sgn1(const Graph& g) {
    if (g.edge_count() == 0) throw std::invalid_argument("subgraph network of an edgeless graph is undefined");
    const auto edges = g.edges();
    // incident[v] lists ids of edges touching v, ascending.
    std::vector<std::vector<NodeId>> incident(g.node_count());
    for (NodeId id = 0; id < edges.size(); ++id) {
        incident[edges[id].first].push_back(id);
        incident[edges[id].second].push_back(id);
    }
    std::vector<Edge> out;
    for (const auto& inc : incident) {
        for (std::size_t i = 0; i < inc.size(); ++i) {
            for (std::size_t j = i + 1; j < inc.size(); ++j) out.emplace_back(inc[i], inc[j]);
        }
    }
    // In a simple graph two distinct edges share at most one endpoint, so no duplicates arise.
    std::sort(out.begin(), out.end());
    return graph_from_sorted_edges(edges.size(), std::move(out));
}

void write_edgelist(const Graph& g, std::ostream& out) {
    out << "n " << g.node_count() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_edgelist(const Graph& g, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    write_edgelist(g, f);
}

namespace {

bool parse_uint(std::string_view tok, std::uint64_t& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

Graph read_edgelist(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) -> DataError {
        return DataError("edge list line " + std::to_string(lineno) + ": " + msg);
    };

    std::optional<std::uint64_t> n;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = tokens(line);
        if (tok.empty()) continue;
        if (!n) {
            std::uint64_t count = 0;
            if (tok.size() != 2 || tok[0] != "n" || !parse_uint(tok[1], count)) {
                throw fail("expected header 'n <node-count>'");
            }
            if (count > std::numeric_limits<NodeId>::max()) throw fail("node count too large");
            n = count;
            continue;
        }
        std::uint64_t u = 0, v = 0;
        if (tok.size() != 2 || !parse_uint(tok[0], u) || !parse_uint(tok[1], v)) throw fail("expected 'u v'");
        if (u >= *n || v >= *n) throw fail("endpoint out of range for n=" + std::to_string(*n));
        if (u == v) throw fail("self-loop");
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    if (!n) throw DataError("edge list: missing header");
    try {
        return Graph(*n, std::move(edges));
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("edge list: ") + e.what());
    }
}

Graph read_edgelist(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read " + path.string());
    try {
        return read_edgelist(f);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace vistra
