#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace chromred {

using VertexId = std::uint32_t;

struct Edge {
    VertexId u = 0;
    VertexId v = 0;
    bool is_loop() const { return u == v; }
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected multigraph on vertices 0..n-1. Loops and parallel edges are allowed and the
/// edge order is stable under every operation below.
class MultiGraph {
public:
    MultiGraph() = default;
    explicit MultiGraph(std::size_t n, std::vector<Edge> edges = {});

    std::size_t vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t e) const;

    void add_edge(VertexId u, VertexId v);
    VertexId add_vertex() { return static_cast<VertexId>(n_++); }

    friend bool operator==(const MultiGraph&, const MultiGraph&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
};

/// A multigraph with distinguished terminals s != t.
struct TwoTerminalGraph {
    MultiGraph graph;
    VertexId s = 0;
    VertexId t = 1;
};

MultiGraph delete_edge(const MultiGraph& g, std::size_t e);

/// Contract e = uv: the larger id is merged into the smaller, ids above it shift down by one.
/// Other copies of uv become loops. A loop is simply deleted.
MultiGraph contract_edge(const MultiGraph& g, std::size_t e);

/// Merge vertex b into a (no edge removed); ids above b shift down.
MultiGraph identify_vertices(const MultiGraph& g, VertexId a, VertexId b);

/// Replace e = uv by a copy of H, gluing s to u and t to v. New vertices get ids
/// n(G), n(G)+1, ... in H order; H's edges are appended after G's remaining edges.
MultiGraph splice_gadget(const MultiGraph& g, std::size_t e, const TwoTerminalGraph& h);

/// Adds a triangle on three new vertices and joins each of them to every old vertex.
MultiGraph apex_triple(const MultiGraph& g);

std::size_t connected_components(const MultiGraph& g);

/// Lexicographically least sorted edge list over all vertex relabelings. Brute force, small n.
std::vector<Edge> canonical_form(const MultiGraph& g);

MultiGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const MultiGraph& g);
MultiGraph load_graph(const std::string& path);

} // namespace chromred
