#ifndef DAGMCMC_SCORE_TABLES_HPP
#define DAGMCMC_SCORE_TABLES_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "dagmcmc/score.hpp"
#include "dagmcmc/search_space.hpp"

namespace dagmcmc {

namespace detail {

/// Running-max log-sum-exp accumulator.
struct LogSum {
    double maxv = -std::numeric_limits<double>::infinity();
    double sum = 0; // sum of exp(v - maxv)

    void add(double v) {
        if (v == -std::numeric_limits<double>::infinity()) return;
        if (v > maxv) {
            sum = sum * std::exp(maxv - v) + 1.0;
            maxv = v;
        } else {
            sum += std::exp(v - maxv);
        }
    }
    double value() const {
        if (sum == 0) return -std::numeric_limits<double>::infinity();
        return maxv + std::log(sum);
    }
};

/// log(exp(a) - exp(b)) for a > b; throws on nonpositive mass.
inline double logDiffExp(double a, double b) {
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (!(a > b)) throw ScoreError("logDiffExp: nonpositive mass");
    return a + std::log1p(-std::exp(b - a));
}

} // namespace detail

/// Per-node precomputed local scores over candidate-parent subsets, with
/// plus-one layers for the extended space H+. Parent sets are bit-masks
/// over the node's candidate index; the plus-one element is carried
/// separately.
struct NodeTable {
    int node = 0;
    std::vector<int> candidates;     // ascending node ids, size k <= hardlimit
    std::vector<double> base;        // 2^k log-scores, bit b <-> candidates[b]
    std::vector<int> plus1Nodes;     // u outside candidates, ascending
    std::vector<std::vector<double>> plus1; // per u: 2^k log-scores of subset + {u}

    int k() const { return static_cast<int>(candidates.size()); }

    std::vector<int> subsetToParents(std::uint32_t mask, int plus1Node = -1) const {
        std::vector<int> pa;
        for (int b = 0; b < k(); ++b)
            if (mask & (1u << b)) pa.push_back(candidates[b]);
        if (plus1Node >= 0) {
            pa.push_back(plus1Node);
            std::sort(pa.begin(), pa.end());
        }
        return pa;
    }
};

struct ScoreTableSet {
    int n = 0;
    bool plus1 = false;
    std::vector<int> bgnodes;
    std::vector<char> isBg;
    std::vector<NodeTable> tables; // indexed by node id; bgnode entries empty

    const NodeTable& table(int node) const { return tables.at(node); }
};

/// Precompute base and plus-one score tables for every non-root node.
inline ScoreTableSet buildTables(const ScoreContext& ctx, const SearchSpace& space, bool plus1) {
    const int n = ctx.n();
    if (space.n != n) throw ScoreError("buildTables: node count mismatch");
    ScoreTableSet ts;
    ts.n = n;
    ts.plus1 = plus1;
    ts.bgnodes = ctx.bgnodes();
    ts.isBg.assign(n, 0);
    for (int b : ts.bgnodes) ts.isBg[b] = 1;
    ts.tables.resize(n);

    for (int i = 0; i < n; ++i) {
        if (ts.isBg[i]) continue;
        NodeTable& t = ts.tables[i];
        t.node = i;
        t.candidates = space.candidates(i);
        const int k = t.k();
        if (k > space.hardlimit)
            throw ScoreError("buildTables: hardlimit exceeded at node " + std::to_string(i) +
                             " (" + std::to_string(k) + " candidates)");
        const std::uint32_t full = 1u << k;
        t.base.resize(full);
        for (std::uint32_t m = 0; m < full; ++m)
            t.base[m] = localScore(ctx, i, t.subsetToParents(m));
        if (plus1) {
            for (int u = 0; u < n; ++u) {
                if (u == i || space.banned(u, i)) continue;
                if (std::find(t.candidates.begin(), t.candidates.end(), u) != t.candidates.end())
                    continue;
                t.plus1Nodes.push_back(u);
                std::vector<double> layer(full);
                for (std::uint32_t m = 0; m < full; ++m)
                    layer[m] = localScore(ctx, i, t.subsetToParents(m, u));
                t.plus1.push_back(std::move(layer));
            }
        }
    }
    return ts;
}

namespace detail {

inline std::uint32_t allowedMask(const NodeTable& t, const std::vector<char>& allowed) {
    std::uint32_t m = 0;
    for (int b = 0; b < t.k(); ++b)
        if (allowed[t.candidates[b]]) m |= (1u << b);
    return m;
}

template <typename Fn>
inline void forEachSubset(std::uint32_t mask, Fn&& fn) {
    std::uint32_t s = mask;
    while (true) {
        fn(s);
        if (s == 0) break;
        s = (s - 1) & mask;
    }
}

} // namespace detail

/// log-sum over parent sets representable in the (extended) space that lie
/// inside `allowed`: any subset of candidates-in-allowed, optionally joined
/// with one allowed non-candidate.
inline double restrictedSum(const ScoreTableSet& ts, int node, const std::vector<char>& allowed) {
    const NodeTable& t = ts.table(node);
    const std::uint32_t mask = detail::allowedMask(t, allowed);
    detail::LogSum acc;
    detail::forEachSubset(mask, [&](std::uint32_t s) { acc.add(t.base[s]); });
    for (std::size_t li = 0; li < t.plus1Nodes.size(); ++li) {
        if (!allowed[t.plus1Nodes[li]]) continue;
        const auto& layer = t.plus1[li];
        detail::forEachSubset(mask, [&](std::uint32_t s) { acc.add(layer[s]); });
    }
    return acc.value();
}

struct MaxParentSet {
    double logScore = -std::numeric_limits<double>::infinity();
    std::vector<int> parents;
};

/// Maximum and argmax over the same family as restrictedSum. Ties broken
/// toward the lexicographically smallest parent set.
inline MaxParentSet restrictedMax(const ScoreTableSet& ts, int node,
                                  const std::vector<char>& allowed) {
    const NodeTable& t = ts.table(node);
    const std::uint32_t mask = detail::allowedMask(t, allowed);
    MaxParentSet best;
    bool haveBest = false;
    auto consider = [&](double v, std::uint32_t s, int u) {
        if (!haveBest || v > best.logScore) {
            best.logScore = v;
            best.parents = t.subsetToParents(s, u);
            haveBest = true;
        } else if (v == best.logScore) {
            auto pa = t.subsetToParents(s, u);
            if (pa < best.parents) best.parents = std::move(pa);
        }
    };
    detail::forEachSubset(mask, [&](std::uint32_t s) { consider(t.base[s], s, -1); });
    for (std::size_t li = 0; li < t.plus1Nodes.size(); ++li) {
        if (!allowed[t.plus1Nodes[li]]) continue;
        const auto& layer = t.plus1[li];
        detail::forEachSubset(mask, [&](std::uint32_t s) { consider(layer[s], s, t.plus1Nodes[li]); });
    }
    return best;
}

/// Draw a parent set with probability exp(localScore - restrictedSum).
inline std::vector<int> sampleParentSet(const ScoreTableSet& ts, int node,
                                        const std::vector<char>& allowed, std::mt19937_64& rng) {
    const NodeTable& t = ts.table(node);
    const std::uint32_t mask = detail::allowedMask(t, allowed);
    const double total = restrictedSum(ts, node, allowed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double target = unif(rng);
    double acc = 0;
    std::vector<int> result;
    bool found = false;
    auto visit = [&](double v, std::uint32_t s, int u) {
        if (found) return;
        acc += std::exp(v - total);
        if (acc >= target) {
            result = t.subsetToParents(s, u);
            found = true;
        }
    };
    detail::forEachSubset(mask, [&](std::uint32_t s) { visit(t.base[s], s, -1); });
    for (std::size_t li = 0; li < t.plus1Nodes.size() && !found; ++li) {
        if (!allowed[t.plus1Nodes[li]]) continue;
        const auto& layer = t.plus1[li];
        detail::forEachSubset(mask, [&](std::uint32_t s) { visit(layer[s], s, t.plus1Nodes[li]); });
    }
    if (!found) {
        // numerical shortfall: fall back to the maximal entry
        result = restrictedMax(ts, node, allowed).parents;
    }
    return result;
}

} // namespace dagmcmc

#endif
