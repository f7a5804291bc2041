#ifndef DAGMCMC_DBN_HPP
#define DAGMCMC_DBN_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dagmcmc/data.hpp"
#include "dagmcmc/graph.hpp"
#include "dagmcmc/iterative_mcmc.hpp"
#include "dagmcmc/order_mcmc.hpp"
#include "dagmcmc/partition_mcmc.hpp"
#include "dagmcmc/posterior.hpp"
#include "dagmcmc/score.hpp"
#include "dagmcmc/score_tables.hpp"
#include "dagmcmc/search_space.hpp"

namespace dagmcmc {

/// First-order homogeneous DBN: an initial structure over the static nodes
/// plus the first slice, and a transition structure over statics, the
/// lagged slice, and the current slice. Statics and lagged nodes are roots
/// of the transition.
struct DbnStructure {
    int nStatic = 0;
    int nDynamic = 0;
    Dag initial;    // b + n nodes: [statics | slice 1]
    Dag transition; // b + 2n nodes: [statics | lagged | current]
};

/// Stack the T-1 slice transitions of a wide DBN table: input columns
/// [statics | slice 1 | ... | slice T], output columns
/// [statics | lagged | current] with one row block per t = 2..T.
inline Dataset reshapeTransition(const Dataset& data, const DbnLayout& layout) {
    const int b = layout.nStatic, n = layout.nDynamic, T = layout.slices;
    if (T < 2) throw DataError("reshapeTransition: need at least two slices");
    if (data.cols() != b + n * T)
        throw DataError("reshapeTransition: expected " + std::to_string(b + n * T) +
                        " columns, got " + std::to_string(data.cols()));
    const int N = data.rows();
    std::vector<std::string> labels;
    std::vector<ColumnKind> kinds;
    for (int s = 0; s < b; ++s) {
        labels.push_back(data.labels()[s]);
        kinds.push_back(data.kind(s));
    }
    for (int grp = 0; grp < 2; ++grp)
        for (int i = 0; i < n; ++i) {
            const int src = b + grp * n + i; // slice 1 names the lagged group, slice 2 the current
            labels.push_back(data.labels()[src]);
            kinds.push_back(data.kind(src));
        }
    // column kinds (and categorical levels) must agree across slices
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i) {
            const int src = b + t * n + i;
            if (data.kind(src) != kinds[b + n + i])
                throw DataError("reshapeTransition: column kind changes across slices at " +
                                data.labels()[src]);
        }
    Dataset out(N * (T - 1), b + 2 * n, labels, kinds);
    for (int j = 0; j < b + 2 * n; ++j)
        if (kinds[j] == ColumnKind::Categorical) out.setLevels(j, data.levels(j));
    for (int t = 2; t <= T; ++t) {
        const int rowBase = N * (t - 2);
        for (int r = 0; r < N; ++r) {
            for (int s = 0; s < b; ++s) out.at(rowBase + r, s) = data(r, s);
            for (int i = 0; i < n; ++i) {
                out.at(rowBase + r, b + i) = data(r, b + (t - 2) * n + i);
                out.at(rowBase + r, b + n + i) = data(r, b + (t - 1) * n + i);
            }
        }
    }
    return out;
}

enum class DbnMethod { Order, Partition, Iterative };

struct DbnLearnOptions {
    DbnMethod method = DbnMethod::Order;
    long long iterations = -1;
    long long stepsave = -1;
    std::uint64_t seed = 0;
    double pcAlpha = 0.05;
    bool plus1 = true;
    double consensusThreshold = 0.5; // partition method: consensus edges
};

struct DbnLearnResult {
    DbnStructure structure;
    ChainResult transitionChain;
    ChainResult initialChain; // only populated when samestruct is false
};

namespace detail {

inline Dag learnDag(const ScoreContext& ctx, const DbnLearnOptions& opts, ChainResult* chainOut,
                    std::uint64_t stream) {
    auto space = pcSkeleton(ctx, opts.pcAlpha, 3, defaultHardlimit(opts.plus1));
    const std::uint64_t seed = splitmix64(opts.seed ^ splitmix64(stream));
    if (opts.method == DbnMethod::Iterative) {
        IterativeOptions io;
        io.seed = seed;
        io.plus1 = opts.plus1;
        io.finalMode = ChainMode::Map;
        io.finalIterations = opts.iterations;
        io.finalStepsave = opts.stepsave;
        auto res = runIterative(ctx, space, io);
        if (chainOut) *chainOut = res.finalChain;
        return res.maxDag;
    }
    auto ts = buildTables(ctx, space, opts.plus1);
    if (opts.method == DbnMethod::Partition) {
        PartitionConfig pc;
        pc.iterations = opts.iterations;
        pc.stepsave = opts.stepsave;
        pc.seed = seed;
        auto res = runPartitionChain(ts, ctx, pc);
        auto post = edgePosterior(res.sampledDags, false, 0.2);
        Dag consensus = consensusModel(post, ctx.n(), opts.consensusThreshold,
                                       ctx.data().labels());
        if (chainOut) *chainOut = std::move(res);
        return consensus;
    }
    ChainConfig cc;
    cc.mode = ChainMode::Map;
    cc.iterations = opts.iterations;
    cc.stepsave = opts.stepsave;
    cc.seed = seed;
    auto res = runOrderChain(ts, ctx, cc);
    Dag best = res.maxDag;
    if (chainOut) *chainOut = std::move(res);
    return best;
}

} // namespace detail

/// Learn a first-order DBN from a wide table in the layout of
/// reshapeTransition's input. The transition model is learned on the
/// stacked data with statics and lagged nodes as roots; with samestruct
/// the initial structure inherits the current slice's edges, otherwise it
/// is learned separately from the slice-1 columns.
inline DbnLearnResult learnDbn(const Dataset& data, const DbnLayout& layout,
                               ScoreConfig scoreCfg, const DbnLearnOptions& opts) {
    const int b = layout.nStatic, n = layout.nDynamic;
    Dataset trans = reshapeTransition(data, layout);
    ScoreConfig transCfg = scoreCfg;
    transCfg.bgnodes.clear();
    for (int v = 0; v < b + n; ++v) transCfg.bgnodes.push_back(v); // statics + lagged
    auto transCtx = buildScoreContext(trans, transCfg);

    DbnLearnResult out;
    out.structure.nStatic = b;
    out.structure.nDynamic = n;
    out.structure.transition = detail::learnDag(transCtx, opts, &out.transitionChain, 1);

    Dag initial(b + n);
    {
        std::vector<std::string> labels;
        for (int s = 0; s < b; ++s) labels.push_back(data.labels()[s]);
        for (int i = 0; i < n; ++i) labels.push_back(data.labels()[b + i]);
        initial.setLabels(labels);
    }
    if (layout.samestruct) {
        const Dag& tr = out.structure.transition;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && tr.edge(b + n + i, b + n + j)) initial.setEdge(b + i, b + j);
        for (int s = 0; s < b; ++s)
            for (int j = 0; j < n; ++j)
                if (tr.edge(s, b + n + j)) initial.setEdge(s, b + j);
    } else {
        // learn the initial structure from statics + slice 1
        std::vector<std::string> labels;
        std::vector<ColumnKind> kinds;
        for (int v = 0; v < b + n; ++v) {
            labels.push_back(data.labels()[v]);
            kinds.push_back(data.kind(v));
        }
        Dataset slice1(data.rows(), b + n, labels, kinds);
        for (int v = 0; v < b + n; ++v)
            if (kinds[v] == ColumnKind::Categorical) slice1.setLevels(v, data.levels(v));
        for (int r = 0; r < data.rows(); ++r)
            for (int v = 0; v < b + n; ++v) slice1.at(r, v) = data(r, v);
        ScoreConfig initCfg = scoreCfg;
        initCfg.bgnodes.clear();
        for (int s = 0; s < b; ++s) initCfg.bgnodes.push_back(s);
        auto initCtx = buildScoreContext(slice1, initCfg);
        initial = detail::learnDag(initCtx, opts, &out.initialChain, 2);
    }
    out.structure.initial = initial;
    return out;
}

/// Forward-sample N rows of a wide DBN table (layout as reshapeTransition's
/// input): statics and slice 1 from the initial structure, slices 2..T from
/// the transition structure conditioned on the previous slice.
inline Dataset simulateDbn(const DbnStructure& st, int slices, const SimOptions& opt, int N,
                           std::mt19937_64& rng) {
    const int b = st.nStatic, n = st.nDynamic, T = slices;
    if (T < 2) throw ScoreError("simulateDbn: need at least two slices");
    if (st.initial.n() != b + n || st.transition.n() != b + 2 * n)
        throw ScoreError("simulateDbn: structure shape mismatch");
    for (int v = 0; v < b + n; ++v)
        if (st.transition.inDegree(v) > 0)
            throw ScoreError("simulateDbn: transition has edges into static or lagged nodes");
    if (opt.model != SimModel::LinearGaussian)
        throw ScoreError("simulateDbn: only the linear-Gaussian model is supported");

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto drawWeight = [&]() {
        double w = 0.4 + 1.6 * unif(rng);
        return unif(rng) < 0.5 ? -w : w;
    };
    // edge weights: shared across rows and slices (homogeneous process)
    std::vector<std::vector<std::pair<int, double>>> wInit(b + n), wTrans(b + 2 * n);
    for (int j = 0; j < b + n; ++j)
        for (int p : st.initial.parents(j)) wInit[j].push_back({p, drawWeight()});
    for (int j = b + n; j < b + 2 * n; ++j)
        for (int p : st.transition.parents(j)) wTrans[j].push_back({p, drawWeight()});

    std::vector<int> topoInit, topoTrans;
    topologicalSort(st.initial, &topoInit);
    topologicalSort(st.transition, &topoTrans);

    std::vector<std::string> labels;
    for (int s = 0; s < b; ++s) labels.push_back(st.initial.labels()[s]);
    for (int t = 1; t <= T; ++t)
        for (int i = 0; i < n; ++i)
            labels.push_back(st.initial.labels()[b + i] + "_t" + std::to_string(t));
    Dataset out(N, b + n * T, labels, std::vector<ColumnKind>(b + n * T, ColumnKind::Continuous));

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> cur(b + 2 * n, 0.0);
    for (int r = 0; r < N; ++r) {
        // statics + slice 1
        std::vector<double> init(b + n, 0.0);
        for (int v : topoInit) {
            double x = gauss(rng);
            for (auto [p, w] : wInit[v]) x += w * init[p];
            init[v] = x;
        }
        for (int s = 0; s < b; ++s) out.at(r, s) = init[s];
        for (int i = 0; i < n; ++i) out.at(r, b + i) = init[b + i];
        // slices 2..T
        for (int t = 2; t <= T; ++t) {
            for (int s = 0; s < b; ++s) cur[s] = init[s];
            for (int i = 0; i < n; ++i) cur[b + i] = out(r, b + (t - 2) * n + i);
            for (int v : topoTrans) {
                if (v < b + n) continue;
                double x = gauss(rng);
                for (auto [p, w] : wTrans[v]) x += w * cur[p];
                cur[v] = x;
            }
            for (int i = 0; i < n; ++i) out.at(r, b + (t - 1) * n + i) = cur[b + n + i];
        }
    }
    return out;
}

} // namespace dagmcmc

#endif
