#ifndef DAGMCMC_PARTITION_MCMC_HPP
#define DAGMCMC_PARTITION_MCMC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "dagmcmc/graph.hpp"
#include "dagmcmc/order_mcmc.hpp"
#include "dagmcmc/rng.hpp"
#include "dagmcmc/score_tables.hpp"

namespace dagmcmc {

/// Canonical layering of a DAG: the last part holds the nodes without
/// (non-root) parents; every node in an earlier part has all parents in
/// later parts and at least one in the part directly after its own.
inline LabelledPartition dagToPartition(const Dag& g, const std::vector<int>& bg = {}) {
    const int n = g.n();
    std::vector<char> isBg(n, 0);
    for (int b : bg) isBg.at(b) = 1;
    std::vector<int> layer(n, -1);
    std::vector<std::vector<int>> layers; // layers[0] = parent-free nodes
    int remaining = 0;
    for (int v = 0; v < n; ++v)
        if (!isBg[v]) ++remaining;
    while (remaining > 0) {
        std::vector<int> next;
        for (int v = 0; v < n; ++v) {
            if (isBg[v] || layer[v] >= 0) continue;
            bool ready = true, adjacent = layers.empty();
            for (int p : g.parents(v)) {
                if (isBg[p]) continue;
                if (layer[p] < 0) ready = false;
                else if (layer[p] == static_cast<int>(layers.size()) - 1) adjacent = true;
            }
            if (ready && adjacent) next.push_back(v);
        }
        if (next.empty()) throw std::invalid_argument("dagToPartition: cyclic input");
        for (int v : next) layer[v] = static_cast<int>(layers.size());
        layers.push_back(std::move(next));
        remaining -= static_cast<int>(layers.back().size());
    }
    LabelledPartition lp;
    lp.parts.assign(layers.rbegin(), layers.rend());
    lp.canonicalize();
    return lp;
}

namespace detail {

/// Sum of scores of all DAGs consistent with the layering: node in part j
/// draws parents from parts after j (plus root nodes) with at least one in
/// part j+1; the last part draws from root nodes only. Returns -inf for
/// layerings with no consistent DAG in the search space.
inline double partitionNodeScore(const ScoreTableSet& ts, const LabelledPartition& lp,
                                 int j, int node, const std::vector<char>& afterNext,
                                 const std::vector<char>& after) {
    const int p = static_cast<int>(lp.parts.size());
    if (j == p - 1) return restrictedSum(ts, node, afterNext); // root nodes only
    const double whole = restrictedSum(ts, node, after);
    const double inner = restrictedSum(ts, node, afterNext);
    if (!(whole > inner)) return -std::numeric_limits<double>::infinity();
    return logDiffExp(whole, inner);
}

} // namespace detail

/// Log-score of a labelled partition: sum over nodes of the layered
/// restricted sums above.
inline double partitionScore(const ScoreTableSet& ts, const LabelledPartition& lp) {
    const int p = static_cast<int>(lp.parts.size());
    // suffix membership masks, built back to front
    std::vector<char> after(ts.n, 0), afterNext(ts.n, 0);
    for (int b : ts.bgnodes) after[b] = afterNext[b] = 1;
    double total = 0;
    for (int j = p - 1; j >= 0; --j) {
        for (int node : lp.parts[j]) {
            const double s = detail::partitionNodeScore(ts, lp, j, node, afterNext, after);
            if (s == -std::numeric_limits<double>::infinity())
                return -std::numeric_limits<double>::infinity();
            total += s;
        }
        if (j > 0) {
            afterNext = after;
            for (int node : lp.parts[j]) after[node] = 1;
            // shift: for part j-1, "after" must include parts j.., "afterNext" parts j+1..
        }
    }
    return total;
}

namespace detail {

/// draw a parent set proportional to its score among sets inside `allowed`
/// that contain at least one node from `required` (CDF inversion over the
/// tables, normalized by the mass difference of the two restricted sums)
inline std::vector<int> sampleParentSetRequiring(const ScoreTableSet& ts, int node,
                                                 const std::vector<char>& allowed,
                                                 const std::vector<char>& required,
                                                 std::mt19937_64& rng) {
    const NodeTable& t = ts.table(node);
    const std::uint32_t mask = allowedMask(t, allowed);
    std::uint32_t reqMask = 0;
    for (std::size_t c = 0; c < t.candidates.size(); ++c)
        if (required[t.candidates[c]]) reqMask |= 1u << c;
    std::vector<char> withoutReq = allowed;
    for (int v = 0; v < ts.n; ++v)
        if (required[v]) withoutReq[v] = 0;
    const double total =
        logDiffExp(restrictedSum(ts, node, allowed), restrictedSum(ts, node, withoutReq));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double target = unif(rng);
    double acc = 0;
    double bestV = -std::numeric_limits<double>::infinity();
    std::vector<int> result, best;
    bool found = false;
    auto visit = [&](double v, std::uint32_t s, int u, bool qualifies) {
        if (!qualifies || found) return;
        if (v > bestV) {
            bestV = v;
            best = t.subsetToParents(s, u);
        }
        acc += std::exp(v - total);
        if (acc >= target) {
            result = t.subsetToParents(s, u);
            found = true;
        }
    };
    forEachSubset(mask, [&](std::uint32_t s) { visit(t.base[s], s, -1, (s & reqMask) != 0); });
    for (std::size_t li = 0; li < t.plus1Nodes.size() && !found; ++li) {
        const int extra = t.plus1Nodes[li];
        if (!allowed[extra]) continue;
        const auto& layer = t.plus1[li];
        forEachSubset(mask, [&](std::uint32_t s) {
            visit(layer[s], s, extra, (s & reqMask) != 0 || required[extra]);
        });
    }
    return found ? result : best; // numerical shortfall: maximal qualifying set
}

/// draw one DAG consistent with the layering, proportional to its score
inline Dag samplePartitionDag(const ScoreTableSet& ts, const LabelledPartition& lp,
                              std::mt19937_64& rng, const std::vector<std::string>& labels) {
    const int n = ts.n;
    const int p = static_cast<int>(lp.parts.size());
    Dag g(n, labels);
    std::vector<char> after(n, 0);
    std::vector<std::vector<char>> suffix(p + 1, std::vector<char>(n, 0));
    for (int b : ts.bgnodes) suffix[p][b] = 1;
    for (int j = p - 1; j >= 0; --j) {
        suffix[j] = suffix[j + 1];
        for (int node : lp.parts[j]) suffix[j][node] = 1;
    }
    for (int j = 0; j < p; ++j) {
        for (int node : lp.parts[j]) {
            if (j == p - 1) {
                for (int q : sampleParentSet(ts, node, suffix[p], rng)) g.setEdge(q, node);
                continue;
            }
            // at least one parent must land in the adjacent part
            std::vector<char> required(n, 0);
            for (int q : lp.parts[j + 1]) required[q] = 1;
            for (int q : sampleParentSetRequiring(ts, node, suffix[j + 1], required, rng))
                g.setEdge(q, node);
        }
    }
    return g;
}

/// split/join neighbourhood size: p-1 adjacent joins plus, per part, the
/// ordered proper bipartitions of its nodes
inline long long splitJoinCount(const LabelledPartition& lp) {
    long long c = static_cast<long long>(lp.parts.size()) - 1;
    for (const auto& part : lp.parts)
        if (part.size() >= 2) c += (1LL << part.size()) - 2;
    return c;
}

} // namespace detail

struct PartitionMoveProbs {
    double splitJoin = 0.25;
    double relocate = 0.25;
    double swapNodes = 0.25;
    double swapParts = 0.25;
};

struct PartitionConfig {
    long long iterations = -1; // -1: resolve default 20 n^2 ln n
    long long stepsave = -1;
    PartitionMoveProbs movePrbs;
    std::optional<LabelledPartition> start;
    std::uint64_t seed = 0;
    bool chainout = true;
};

/// Partition MCMC: Metropolis-Hastings over canonical labelled partitions
/// using split/join, node relocation, node swap and adjacent part swap
/// moves, with neighbourhood-count corrections where the proposal is
/// asymmetric. Saved states yield posterior DAG draws.
inline ChainResult runPartitionChain(const ScoreTableSet& ts, const ScoreContext& ctx,
                                     PartitionConfig cfg) {
    const int n = ts.n;
    std::vector<int> nonBg;
    for (int v = 0; v < n; ++v)
        if (!ts.isBg[v]) nonBg.push_back(v);
    const int m = static_cast<int>(nonBg.size());

    long long stepsave = cfg.stepsave;
    long long iterations = cfg.iterations;
    if (iterations < 0) {
        iterations = resolveIterations(20.0, m, cfg.stepsave, &stepsave);
    } else if (stepsave <= 0) {
        stepsave = std::max<long long>(1, iterations / 1000);
    }

    auto rng = makeRng(cfg.seed, 0);
    LabelledPartition lp;
    if (cfg.start) {
        lp = *cfg.start;
        lp.canonicalize();
    } else {
        // start in a high-mass region: greedy best parent sets along a
        // random order, then that DAG's layering
        std::vector<int> perm = nonBg;
        std::shuffle(perm.begin(), perm.end(), rng);
        Dag g(n);
        std::vector<char> allowed(n, 0);
        for (int b : ts.bgnodes) allowed[b] = 1;
        for (int qi = m - 1; qi >= 0; --qi) {
            const int node = perm[qi];
            for (int pa : restrictedMax(ts, node, allowed).parents) g.setEdge(pa, node);
            allowed[node] = 1;
        }
        lp = dagToPartition(g, ts.bgnodes);
    }
    double cur = partitionScore(ts, lp);
    if (cur == -std::numeric_limits<double>::infinity())
        throw ScoreError("runPartitionChain: start partition has no consistent DAG");

    ChainResult res;
    res.info = ChainInfo{"partition", ChainMode::Sample, iterations, stepsave, 0, ts.plus1};
    res.maxDag = Dag(n, ctx.data().labels());

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto savePoint = [&]() {
        res.trace.push_back(cur);
        Dag g = detail::samplePartitionDag(ts, lp, rng, ctx.data().labels());
        const double gs = totalScore(ctx, g);
        if (gs > res.maxScore) {
            res.maxScore = gs;
            res.maxDag = g;
        }
        if (cfg.chainout) {
            res.sampledDags.push_back(std::move(g));
            res.sampledScores.push_back(gs);
        }
    };
    savePoint();

    auto partOf = [&](int v) {
        for (std::size_t j = 0; j < lp.parts.size(); ++j)
            for (int u : lp.parts[j])
                if (u == v) return static_cast<int>(j);
        throw std::logic_error("partOf: node missing");
    };
    auto accept = [&](const LabelledPartition& prop, double logCorrection) -> bool {
        const double ps = partitionScore(ts, prop);
        if (ps == -std::numeric_limits<double>::infinity()) return false;
        if (std::log(unif(rng)) < ps - cur + logCorrection) {
            lp = prop;
            cur = ps;
            return true;
        }
        return false;
    };

    const double p1 = cfg.movePrbs.splitJoin;
    const double p2 = p1 + cfg.movePrbs.relocate;
    const double p3 = p2 + cfg.movePrbs.swapNodes;
    for (long long it = 1; it <= iterations; ++it) {
        const double u = unif(rng);
        const int p = static_cast<int>(lp.parts.size());
        if (u < p1) {
            const long long nh = detail::splitJoinCount(lp);
            if (nh > 0) {
                long long pick = std::uniform_int_distribution<long long>(0, nh - 1)(rng);
                LabelledPartition prop = lp;
                if (pick < p - 1) {
                    // join parts pick and pick+1
                    auto& a = prop.parts[pick];
                    auto& b = prop.parts[pick + 1];
                    a.insert(a.end(), b.begin(), b.end());
                    std::sort(a.begin(), a.end());
                    prop.parts.erase(prop.parts.begin() + pick + 1);
                } else {
                    pick -= p - 1;
                    int j = 0;
                    while (true) {
                        const long long opts =
                            lp.parts[j].size() >= 2 ? (1LL << lp.parts[j].size()) - 2 : 0;
                        if (pick < opts) break;
                        pick -= opts;
                        ++j;
                    }
                    // mask pick+1 in [1, 2^k - 2]: bit b set -> node goes first
                    const auto& src = lp.parts[j];
                    std::vector<int> first, second;
                    const long long mask = pick + 1;
                    for (std::size_t b = 0; b < src.size(); ++b)
                        ((mask >> b) & 1 ? first : second).push_back(src[b]);
                    prop.parts[j] = std::move(first);
                    prop.parts.insert(prop.parts.begin() + j + 1, std::move(second));
                }
                const long long nhProp = detail::splitJoinCount(prop);
                accept(prop, std::log(static_cast<double>(nh) / nhProp));
            }
        } else if (u < p2) {
            // node relocation, Gibbs flavour: score every placement of v
            // (each existing part, each new-singleton slot — a set that is
            // identical from any of its members, so the draw is exact) and
            // sample one proportionally. Always accepted.
            if (m >= 2) {
                const int v = nonBg[std::uniform_int_distribution<int>(0, m - 1)(rng)];
                const int j = partOf(v);
                LabelledPartition base = lp;
                auto& srcPart = base.parts[j];
                srcPart.erase(std::find(srcPart.begin(), srcPart.end(), v));
                if (srcPart.empty()) base.parts.erase(base.parts.begin() + j);
                const int q = static_cast<int>(base.parts.size());
                std::vector<LabelledPartition> cands;
                for (int t = 0; t < q; ++t) {
                    LabelledPartition c = base;
                    c.parts[t].push_back(v);
                    std::sort(c.parts[t].begin(), c.parts[t].end());
                    cands.push_back(std::move(c));
                }
                for (int s = 0; s <= q; ++s) {
                    LabelledPartition c = base;
                    c.parts.insert(c.parts.begin() + s, std::vector<int>{v});
                    cands.push_back(std::move(c));
                }
                std::vector<double> w(cands.size());
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < cands.size(); ++c) {
                    w[c] = partitionScore(ts, cands[c]);
                    best = std::max(best, w[c]);
                }
                double total = 0;
                for (double& wc : w) {
                    wc = std::exp(wc - best);
                    total += wc;
                }
                double target = unif(rng) * total;
                std::size_t pick = 0;
                for (; pick + 1 < w.size(); ++pick) {
                    target -= w[pick];
                    if (target <= 0) break;
                }
                lp = cands[pick];
                cur = partitionScore(ts, lp);
            }
        } else if (u < p3) {
            // symmetric: swap two nodes of different parts. Mostly proposes
            // adjacent-part pairs (small mass change, far higher acceptance);
            // both variants keep the part layout, so the proposal stays
            // symmetric.
            if (p >= 2) {
                int ja, jb;
                if (unif(rng) < 0.9) {
                    ja = std::uniform_int_distribution<int>(0, p - 2)(rng);
                    jb = ja + 1;
                } else {
                    ja = std::uniform_int_distribution<int>(0, p - 1)(rng);
                    jb = std::uniform_int_distribution<int>(0, p - 1)(rng);
                }
                auto pickFrom = [&](int j) {
                    const auto& part = lp.parts[j];
                    return part[std::uniform_int_distribution<int>(
                        0, static_cast<int>(part.size()) - 1)(rng)];
                };
                const int a = pickFrom(ja), b = pickFrom(jb);
                if (ja != jb) {
                    LabelledPartition prop = lp;
                    auto& pa = prop.parts[ja];
                    auto& pb = prop.parts[jb];
                    *std::find(pa.begin(), pa.end(), a) = b;
                    *std::find(pb.begin(), pb.end(), b) = a;
                    std::sort(pa.begin(), pa.end());
                    std::sort(pb.begin(), pb.end());
                    accept(prop, 0.0);
                }
            }
        } else {
            // symmetric: swap the node sets of two adjacent parts
            if (p >= 2) {
                const int j = std::uniform_int_distribution<int>(0, p - 2)(rng);
                LabelledPartition prop = lp;
                std::swap(prop.parts[j], prop.parts[j + 1]);
                accept(prop, 0.0);
            }
        }
        if (it % stepsave == 0) savePoint();
    }
    return res;
}

} // namespace dagmcmc

#endif
