#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "chromred/graph.hpp"

namespace chromred {

/// Immutable series-parallel expression. Subtrees are shared, so powers of a gadget cost
/// O(log n) nodes even though they describe n copies.
class SpExpr {
public:
    enum class Kind : std::uint8_t { Edge, Series, Parallel };

    static SpExpr edge();
    static SpExpr series(const SpExpr& a, const SpExpr& b);
    static SpExpr parallel(const SpExpr& a, const SpExpr& b);

    Kind kind() const { return node_->kind; }
    const SpExpr& left() const { return node_->children->first; }
    const SpExpr& right() const { return node_->children->second; }
    std::uint64_t leaf_count() const { return node_->leaves; }
    std::uint64_t hash() const { return node_->hash; }
    const void* id() const { return node_.get(); }

    /// Structural equality; shared subtrees make this cheap in the common case.
    friend bool operator==(const SpExpr& a, const SpExpr& b);

private:
    struct Node {
        Kind kind;
        std::uint64_t leaves;
        std::uint64_t hash;
        std::unique_ptr<std::pair<SpExpr, SpExpr>> children;
    };
    explicit SpExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static SpExpr make(Kind k, const SpExpr& a, const SpExpr& b);

    std::shared_ptr<const Node> node_;
};

SpExpr series_power(const SpExpr& a, std::uint64_t n);
SpExpr parallel_power(const SpExpr& a, std::uint64_t n);

/// `e`, `(S a b)`, `(P a b)`.
SpExpr parse_sp(std::string_view text);
std::string to_string(const SpExpr& x);

/// Realise as a multigraph: s = 0, t = 1, series midpoints numbered in depth-first order.
TwoTerminalGraph flatten(const SpExpr& x);

} // namespace chromred
