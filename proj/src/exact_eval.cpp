#include "chromred/exact_eval.hpp"

#include <numeric>
#include <unordered_map>

#include "chromred/error.hpp"

namespace chromred {

namespace {

// Tallies subsets by (|A|, k(A)); keep(find) filters on the final partition.
template <class Keep>
SubsetCounts tally(const MultiGraph& g, const BruteForceOptions& opts, Keep keep)
{
    std::size_t m = g.edge_count(), n = g.vertex_count();
    if (m > opts.edge_cap || m >= 63)
        throw EdgeCapExceeded("brute force limited to " + std::to_string(opts.edge_cap) + " edges, graph has " +
                              std::to_string(m));
    SubsetCounts counts(m + 1, std::vector<std::uint64_t>(n + 1, 0));
    std::vector<VertexId> parent(n);
    auto find = [&](VertexId x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    const auto& edges = g.edges();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        std::iota(parent.begin(), parent.end(), 0);
        std::size_t k = n, a = 0;
        for (std::size_t e = 0; e < m; ++e) {
            if (!(mask >> e & 1))
                continue;
            ++a;
            VertexId x = find(edges[e].u), y = find(edges[e].v);
            if (x != y) {
                parent[x] = y;
                --k;
            }
        }
        if (keep(find))
            ++counts[a][k];
    }
    return counts;
}

GaussianRational evaluate_counts(const SubsetCounts& counts, const GaussianRational& q, const GaussianRational& y)
{
    std::size_t kmax = counts.empty() ? 0 : counts.front().size();
    std::vector<GaussianRational> qk(kmax, GaussianRational(1));
    for (std::size_t k = 1; k < kmax; ++k)
        qk[k] = qk[k - 1] * q;
    GaussianRational ym1 = y - 1, ya = 1, total = 0;
    for (const auto& row : counts) {
        GaussianRational inner = 0;
        for (std::size_t k = 0; k < row.size(); ++k)
            if (row[k]) {
                mpz_class c;
                mpz_import(c.get_mpz_t(), 1, 1, sizeof(row[k]), 0, 0, &row[k]);
                inner += GaussianRational(mpq_class(c)) * qk[k];
            }
        total += inner * ya;
        ya *= ym1;
    }
    return total;
}

} // namespace

SubsetCounts subset_counts(const MultiGraph& g, const BruteForceOptions& opts)
{
    return tally(g, opts, [](auto&) { return true; });
}

GaussianRational z_bruteforce(const MultiGraph& g, const GaussianRational& q, const GaussianRational& y,
                              const BruteForceOptions& opts)
{
    return evaluate_counts(subset_counts(g, opts), q, y);
}

GaussianRational z_deletion_contraction(const MultiGraph& g, const GaussianRational& q,
                                        const GaussianRational& y)
{
    if (g.edge_count() == 0)
        return pow(q, g.vertex_count());
    return z_deletion_contraction(delete_edge(g, 0), q, y) +
           (y - 1) * z_deletion_contraction(contract_edge(g, 0), q, y);
}

GaussianRational z_vertex_subsets(const MultiGraph& g, const GaussianRational& q, const GaussianRational& y,
                                  std::size_t vertex_cap)
{
    const std::size_t n = g.vertex_count();
    if (n > vertex_cap || n >= 32)
        throw EdgeCapExceeded("vertex-subset evaluation limited to " + std::to_string(vertex_cap) +
                              " vertices, graph has " + std::to_string(n));
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;
    // inside[S] = number of edges with both ends in S.
    std::vector<std::size_t> inside(full + 1, 0);
    for (const auto& e : g.edges()) {
        std::uint32_t ends = (std::uint32_t{1} << e.u) | (std::uint32_t{1} << e.v);
        for (std::uint32_t s = 0; s <= full; ++s)
            if ((s & ends) == ends)
                ++inside[s];
    }
    std::vector<GaussianRational> ypow(g.edge_count() + 1, GaussianRational(1));
    for (std::size_t k = 1; k < ypow.size(); ++k)
        ypow[k] = ypow[k - 1] * y;

    auto low_bit = [](std::uint32_t s) { return s & (~s + 1); };
    std::vector<GaussianRational> connected(full + 1), parts(full + 1);
    parts[0] = 1;
    for (std::uint32_t s = 1; s <= full; ++s) {
        const std::uint32_t v = low_bit(s), rest = s ^ v;
        GaussianRational c = ypow[inside[s]], z = 0;
        // Proper subsets T of S containing v, enumerated as v | (subset of rest).
        for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
            std::uint32_t t = v | sub;
            if (t != s)
                c -= connected[t] * ypow[inside[s ^ t]];
            if (sub == 0)
                break;
        }
        connected[s] = c;
        // Partitions of S: the block T holding v, each block weighted q C(block).
        for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
            std::uint32_t t = v | sub;
            z += connected[t] * parts[s ^ t];
            if (sub == 0)
                break;
        }
        parts[s] = q * z;
    }
    return parts[full];
}

ExactState state_bruteforce(const TwoTerminalGraph& h, const GaussianRational& q, const GaussianRational& y,
                            const BruteForceOptions& opts)
{
    if (h.s == h.t || h.s >= h.graph.vertex_count() || h.t >= h.graph.vertex_count())
        throw PreconditionError("terminals must be two distinct vertices");
    // Colourings with s and t equal: a subset joining s and t forces it, otherwise the
    // component of t has its colour pinned, which removes one factor of q.
    auto joined = tally(h.graph, opts, [&](auto& find) { return find(h.s) == find(h.t); });
    auto apart = tally(h.graph, opts, [&](auto& find) { return find(h.s) != find(h.t); });
    GaussianRational z_joined = evaluate_counts(joined, q, y), z_apart = evaluate_counts(apart, q, y);
    GaussianRational same = z_joined + z_apart / q;
    GaussianRational z = z_joined + z_apart;
    return {same, z - same};
}

namespace {

template <class Scalar>
InteractionState<Scalar> evaluate_sp(const SpExpr& root, const Scalar& q, const Scalar& y)
{
    require_nondegenerate(q);
    std::unordered_map<const void*, InteractionState<Scalar>> by_node;
    std::unordered_multimap<std::uint64_t, std::pair<SpExpr, InteractionState<Scalar>>> by_shape;
    const InteractionState<Scalar> edge = edge_state(q, y);

    auto lookup = [&](const SpExpr& x) -> const InteractionState<Scalar>* {
        if (auto it = by_node.find(x.id()); it != by_node.end())
            return &it->second;
        auto [lo, hi] = by_shape.equal_range(x.hash());
        for (auto it = lo; it != hi; ++it)
            if (it->second.first == x)
                return &by_node.emplace(x.id(), it->second.second).first->second;
        return nullptr;
    };

    struct Item {
        const SpExpr* expr;
        bool expanded;
    };
    std::vector<Item> todo{{&root, false}};
    while (!todo.empty()) {
        Item it = todo.back();
        todo.pop_back();
        const SpExpr& x = *it.expr;
        if (lookup(x))
            continue;
        if (x.kind() == SpExpr::Kind::Edge) {
            by_node.emplace(x.id(), edge);
            continue;
        }
        if (!it.expanded) {
            todo.push_back({&x, true});
            todo.push_back({&x.right(), false});
            todo.push_back({&x.left(), false});
            continue;
        }
        const auto& a = *lookup(x.left());
        const auto& b = *lookup(x.right());
        auto s = x.kind() == SpExpr::Kind::Series ? compose_series(a, b, q) : compose_parallel(a, b, q);
        by_shape.emplace(x.hash(), std::pair(x, s));
        by_node.emplace(x.id(), std::move(s));
    }
    return *lookup(root);
}

} // namespace

ExactState sp_state(const SpExpr& x, const GaussianRational& q, const GaussianRational& y)
{
    return evaluate_sp(x, q, y);
}

FloatState sp_state(const SpExpr& x, std::complex<double> q, std::complex<double> y)
{
    return evaluate_sp(x, q, y);
}

} // namespace chromred
