#ifndef DAGMCMC_ITERATIVE_MCMC_HPP
#define DAGMCMC_ITERATIVE_MCMC_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "dagmcmc/order_mcmc.hpp"
#include "dagmcmc/posterior.hpp"
#include "dagmcmc/score_tables.hpp"
#include "dagmcmc/search_space.hpp"

namespace dagmcmc {

struct IterativeOptions {
    MergeMode merge = MergeMode::Dag;
    ChainMode expandMode = ChainMode::Map; // sample: merge the consensus model instead
    double posteriorThreshold = 0.5;       // consensus cut for sample-mode expansion
    long long expandIterations = -1;       // -1: 3.5 n^2 ln n per expansion step
    long long expandStepsave = -1;
    int maxSteps = 20;
    bool plus1 = true;
    ChainMode finalMode = ChainMode::Sample;
    long long finalIterations = -1; // -1: order-chain default
    long long finalStepsave = -1;
    std::uint64_t seed = 0;
    bool runFinalChain = true;
};

struct IterativeStep {
    double maxScore = 0;     // best DAG score seen up to and including this step
    int coreEdges = 0;       // core size after merging the step's graph
    int addedEdges = 0;      // entries the merge added
    long long iterations = 0;
};

struct IterativeResult {
    SearchSpace space;            // the expanded search space
    std::vector<IterativeStep> steps;
    std::vector<Dag> stepMaxDags;               // running best per step
    std::vector<std::vector<double>> stepTraces;
    std::vector<int> saturatedNodes; // hit the hardlimit during expansion
    Dag maxDag;
    double maxScore = -std::numeric_limits<double>::infinity();
    ChainResult finalChain;       // empty when runFinalChain is false
};

namespace detail {

/// Rebuild tables after a space change, copying tables of nodes whose
/// candidate sets did not change.
inline ScoreTableSet rebuildTables(const ScoreContext& ctx, const SearchSpace& space, bool plus1,
                                   const ScoreTableSet* prev) {
    if (!prev) return buildTables(ctx, space, plus1);
    ScoreTableSet ts;
    ts.n = prev->n;
    ts.plus1 = plus1;
    ts.bgnodes = prev->bgnodes;
    ts.isBg = prev->isBg;
    ts.tables.resize(ts.n);
    for (int i = 0; i < ts.n; ++i) {
        if (ts.isBg[i]) continue;
        if (space.candidates(i) == prev->tables[i].candidates) {
            ts.tables[i] = prev->tables[i];
            continue;
        }
        NodeTable t;
        t.node = i;
        t.candidates = space.candidates(i);
        const int k = static_cast<int>(t.candidates.size());
        if (k > space.hardlimit)
            throw ScoreError("buildTables: hardlimit exceeded at node " + std::to_string(i));
        const std::uint32_t full = 1u << k;
        t.base.resize(full);
        for (std::uint32_t m = 0; m < full; ++m)
            t.base[m] = localScore(ctx, i, t.subsetToParents(m));
        if (plus1) {
            for (int u = 0; u < ts.n; ++u) {
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
        ts.tables[i] = std::move(t);
    }
    return ts;
}

} // namespace detail

/// Iterative order MCMC: run order chains on the extended space H+, merge
/// each step's best DAG (or sample-mode consensus model) into the core H,
/// and repeat until the core stops growing (or maxSteps). Optionally finish
/// with a full-length chain on the expanded space.
inline IterativeResult runIterative(const ScoreContext& ctx, SearchSpace space,
                                    IterativeOptions opts) {
    const int n = ctx.n();
    const int m = n - static_cast<int>(ctx.bgnodes().size());

    IterativeResult res;
    ScoreTableSet ts;
    bool haveTables = false;
    std::uint64_t stream = 1;
    for (int step = 0; step < opts.maxSteps; ++step) {
        ts = detail::rebuildTables(ctx, space, opts.plus1, haveTables ? &ts : nullptr);
        haveTables = true;
        ChainConfig cfg;
        cfg.mode = opts.expandMode;
        cfg.iterations = opts.expandIterations;
        cfg.stepsave = opts.expandStepsave;
        if (cfg.iterations < 0) {
            long long ss = cfg.stepsave;
            cfg.iterations = resolveIterations(3.5, m, cfg.stepsave, &ss);
            cfg.stepsave = ss;
        }
        cfg.seed = splitmix64(opts.seed ^ splitmix64(stream++));
        cfg.chainout = opts.expandMode == ChainMode::Sample;
        auto chain = runOrderChain(ts, ctx, cfg);
        if (chain.maxScore > res.maxScore) {
            res.maxScore = chain.maxScore;
            res.maxDag = chain.maxDag;
        }
        Dag merged = chain.maxDag;
        if (opts.expandMode == ChainMode::Sample) {
            auto post = edgePosterior(chain.sampledDags, false, 0.2);
            merged = consensusModel(post, n, opts.posteriorThreshold, ctx.data().labels());
        }
        const int before = space.edgeCount();
        std::vector<int> saturated;
        space = mergeSpace(space, merged, opts.merge, ctx, &saturated);
        for (int v : saturated)
            if (std::find(res.saturatedNodes.begin(), res.saturatedNodes.end(), v) ==
                res.saturatedNodes.end())
                res.saturatedNodes.push_back(v);
        IterativeStep st;
        st.maxScore = res.maxScore;
        st.coreEdges = space.edgeCount();
        st.addedEdges = space.edgeCount() - before;
        st.iterations = cfg.iterations;
        res.steps.push_back(st);
        res.stepMaxDags.push_back(res.maxDag);
        res.stepTraces.push_back(chain.trace);
        if (st.addedEdges == 0) break; // fixpoint: merged graph already inside H
    }
    res.space = space;

    if (opts.runFinalChain) {
        ts = detail::rebuildTables(ctx, space, opts.plus1, haveTables ? &ts : nullptr);
        ChainConfig cfg;
        cfg.mode = opts.finalMode;
        cfg.iterations = opts.finalIterations;
        cfg.stepsave = opts.finalStepsave;
        cfg.seed = splitmix64(opts.seed ^ splitmix64(0));
        auto chain = runOrderChain(ts, ctx, cfg);
        if (chain.maxScore > res.maxScore) {
            res.maxScore = chain.maxScore;
            res.maxDag = chain.maxDag;
        }
        res.finalChain = std::move(chain);
        res.finalChain.info.kind = "iterative";
        res.finalChain.info.spaceEdges = space.edgeCount();
    }
    return res;
}

/// Per-step comparison of the running best DAG against a reference
/// structure, mirroring the expansion summary table.
struct ItercompRow {
    int step = 0;
    double maxScore = 0;
    DagMetrics metrics;
};

inline std::vector<ItercompRow> itercomp(const IterativeResult& res, const Dag& truth,
                                         bool asCpdag = true) {
    std::vector<ItercompRow> rows;
    for (std::size_t s = 0; s < res.stepMaxDags.size(); ++s)
        rows.push_back({static_cast<int>(s + 1), res.steps[s].maxScore,
                        compareDAGs(res.stepMaxDags[s], truth, asCpdag)});
    return rows;
}

} // namespace dagmcmc

#endif
