#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace vistra {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Undirected simple graph. Edges are stored as (u, v) with u < v in sorted
/// order; adjacency lists are sorted as well. Immutable once built.
class Graph {
public:
    Graph() = default;

    /// Validates and canonicalizes `edges` (orientation and order). Throws
    /// std::invalid_argument on self-loops, duplicates or endpoints >= n.
    Graph(std::size_t n, std::vector<Edge> edges);

    std::size_t node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const NodeId> neighbors(NodeId v) const;
    std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
    bool has_edge(NodeId u, NodeId v) const;

    friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    struct Canonical {};
    Graph(std::size_t n, std::vector<Edge> sorted_edges, Canonical);
    void build_adjacency();

    friend Graph graph_from_sorted_edges(std::size_t n, std::vector<Edge> edges);

    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> adjacency_;
};

/// Fast path for builders that already emit canonical (u < v, sorted, unique)
/// edges. Only checked in debug builds.
Graph graph_from_sorted_edges(std::size_t n, std::vector<Edge> edges);

struct DegreeDistribution {
    std::map<std::size_t, std::size_t> counts;
    std::size_t n = 0;
};

DegreeDistribution degree_distribution(const Graph& g);

/// Mean local clustering coefficient; nodes of degree < 2 contribute 0.
double avg_clustering(const Graph& g);

/// First-order subgraph network (line graph). Node i is the i-th edge of g in
/// canonical order. Throws std::invalid_argument on an edgeless graph.
Graph sgn1(const Graph& g);

/// Edge-list text format: "n <count>" then one "u v" line per edge.
void write_edgelist(const Graph& g, std::ostream& out);
void write_edgelist(const Graph& g, const std::filesystem::path& path);

/// Throws DataError with the 1-based line number on malformed content.
Graph read_edgelist(std::istream& in);
Graph read_edgelist(const std::filesystem::path& path);

}  // namespace vistra
