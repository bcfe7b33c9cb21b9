#pragma once

#include <cstdint>
#include <vector>

#include "chromred/graph.hpp"
#include "chromred/interaction.hpp"
#include "chromred/number_field.hpp"
#include "chromred/sp_expr.hpp"

namespace chromred {

struct BruteForceOptions {
    std::size_t edge_cap = 20;
};

/// counts[a][k] = number of edge subsets with a edges and k connected components.
using SubsetCounts = std::vector<std::vector<std::uint64_t>>;

SubsetCounts subset_counts(const MultiGraph& g, const BruteForceOptions& opts = {});

/// Z(G; q, y) = sum over A of (y-1)^|A| q^k(A), by enumerating all subsets.
GaussianRational z_bruteforce(const MultiGraph& g, const GaussianRational& q, const GaussianRational& y,
                              const BruteForceOptions& opts = {});

/// Same value by deletion-contraction on the lowest edge. Independent second route.
GaussianRational z_deletion_contraction(const MultiGraph& g, const GaussianRational& q,
                                        const GaussianRational& y);

/// Same value by a recurrence over vertex subsets in O(3^n + 2^n m) field operations, which
/// suits dense graphs on few vertices. Connected spanning weights C(S) come from
/// y^{m(S)} = sum over T containing min S of C(T) y^{m(S \\ T)}, then Z sums q C(block) over
/// set partitions.
GaussianRational z_vertex_subsets(const MultiGraph& g, const GaussianRational& q, const GaussianRational& y,
                                  std::size_t vertex_cap = 16);

ExactState state_bruteforce(const TwoTerminalGraph& h, const GaussianRational& q, const GaussianRational& y,
                            const BruteForceOptions& opts = {});

/// Interaction state of an SP expression by the composition identities, memoized on shared
/// and structurally equal subtrees.
ExactState sp_state(const SpExpr& x, const GaussianRational& q, const GaussianRational& y);
FloatState sp_state(const SpExpr& x, std::complex<double> q, std::complex<double> y);

} // namespace chromred
