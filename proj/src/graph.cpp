#include "chromred/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "chromred/error.hpp"

namespace chromred {

MultiGraph::MultiGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges))
{
    for (const auto& e : edges_)
        if (e.u >= n_ || e.v >= n_)
            throw InvalidEdge("edge endpoint out of range");
}

const Edge& MultiGraph::edge(std::size_t e) const
{
    if (e >= edges_.size())
        throw InvalidEdge("edge index " + std::to_string(e) + " out of range");
    return edges_[e];
}

void MultiGraph::add_edge(VertexId u, VertexId v)
{
    if (u >= n_ || v >= n_)
        throw InvalidEdge("edge endpoint out of range");
    edges_.push_back({u, v});
}

MultiGraph delete_edge(const MultiGraph& g, std::size_t e)
{
    g.edge(e);
    std::vector<Edge> edges = g.edges();
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(e));
    return MultiGraph(g.vertex_count(), std::move(edges));
}

MultiGraph identify_vertices(const MultiGraph& g, VertexId a, VertexId b)
{
    if (a >= g.vertex_count() || b >= g.vertex_count())
        throw InvalidEdge("vertex out of range");
    if (a == b)
        return g;
    VertexId keep = std::min(a, b), gone = std::max(a, b);
    auto remap = [&](VertexId x) -> VertexId {
        if (x == gone)
            return keep;
        return x > gone ? x - 1 : x;
    };
    std::vector<Edge> edges;
    edges.reserve(g.edge_count());
    for (const auto& e : g.edges())
        edges.push_back({remap(e.u), remap(e.v)});
    return MultiGraph(g.vertex_count() - 1, std::move(edges));
}

MultiGraph contract_edge(const MultiGraph& g, std::size_t e)
{
    Edge uv = g.edge(e);
    MultiGraph rest = delete_edge(g, e);
    if (uv.is_loop())
        return rest;
    return identify_vertices(rest, uv.u, uv.v);
}

MultiGraph splice_gadget(const MultiGraph& g, std::size_t e, const TwoTerminalGraph& h)
{
    Edge uv = g.edge(e);
    if (h.s == h.t || h.s >= h.graph.vertex_count() || h.t >= h.graph.vertex_count())
        throw PreconditionError("gadget terminals must be distinct vertices");
    MultiGraph out = delete_edge(g, e);
    std::vector<VertexId> map(h.graph.vertex_count());
    for (VertexId x = 0; x < h.graph.vertex_count(); ++x) {
        if (x == h.s)
            map[x] = uv.u;
        else if (x == h.t)
            map[x] = uv.v;
        else
            map[x] = out.add_vertex();
    }
    for (const auto& f : h.graph.edges())
        out.add_edge(map[f.u], map[f.v]);
    return out;
}

MultiGraph apex_triple(const MultiGraph& g)
{
    MultiGraph out = g;
    VertexId a = out.add_vertex(), b = out.add_vertex(), c = out.add_vertex();
    out.add_edge(a, b);
    out.add_edge(b, c);
    out.add_edge(a, c);
    for (VertexId apex : {a, b, c})
        for (VertexId x = 0; x < g.vertex_count(); ++x)
            out.add_edge(apex, x);
    return out;
}

std::size_t connected_components(const MultiGraph& g)
{
    std::vector<VertexId> parent(g.vertex_count());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](VertexId x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t k = g.vertex_count();
    for (const auto& e : g.edges()) {
        VertexId a = find(e.u), b = find(e.v);
        if (a != b) {
            parent[a] = b;
            --k;
        }
    }
    return k;
}

std::vector<Edge> canonical_form(const MultiGraph& g)
{
    if (g.vertex_count() > 9)
        throw PreconditionError("canonical_form is brute force; at most 9 vertices");
    std::vector<VertexId> perm(g.vertex_count());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Edge> best;
    bool first = true;
    auto key = [](const Edge& e) { return std::pair(e.u, e.v); };
    do {
        std::vector<Edge> edges;
        edges.reserve(g.edge_count());
        for (const auto& e : g.edges()) {
            VertexId a = perm[e.u], b = perm[e.v];
            edges.push_back({std::min(a, b), std::max(a, b)});
        }
        std::sort(edges.begin(), edges.end(), [&](const Edge& x, const Edge& y) { return key(x) < key(y); });
        bool better = first || std::lexicographical_compare(
                                   edges.begin(), edges.end(), best.begin(), best.end(),
                                   [&](const Edge& x, const Edge& y) { return key(x) < key(y); });
        if (better) {
            best = std::move(edges);
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

MultiGraph graph_from_json(const nlohmann::json& j)
{
    try {
        auto n = j.at("n").get<long long>();
        if (n < 0)
            throw ParseError("graph JSON: negative vertex count");
        MultiGraph g(static_cast<std::size_t>(n));
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2)
                throw ParseError("graph JSON: each edge must be [u,v]");
            auto u = e[0].get<long long>(), v = e[1].get<long long>();
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw InvalidEdge("graph JSON: endpoint out of range");
            g.add_edge(static_cast<VertexId>(u), static_cast<VertexId>(v));
        }
        return g;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("graph JSON: ") + ex.what());
    }
}

nlohmann::json graph_to_json(const MultiGraph& g)
{
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges())
        edges.push_back({e.u, e.v});
    return {{"n", g.vertex_count()}, {"edges", edges}};
}

MultiGraph load_graph(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open graph file " + path);
    try {
        return graph_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError("graph file " + path + ": " + ex.what());
    }
}

} // namespace chromred
