#ifndef DAGMCMC_POSTERIOR_HPP
#define DAGMCMC_POSTERIOR_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dagmcmc/graph.hpp"

namespace dagmcmc {

/// Edge posterior estimate: fraction of post-burn-in sampled graphs
/// containing each directed edge. With pdag=true each DAG is first reduced
/// to its CPDAG, and an undirected edge counts in both directions.
inline std::vector<double> edgePosterior(const std::vector<Dag>& sample, bool pdag = false,
                                         double burnin = 0.2) {
    if (sample.empty()) throw std::invalid_argument("edgePosterior: empty sample");
    if (burnin < 0 || burnin >= 1) throw std::invalid_argument("edgePosterior: burnin outside [0,1)");
    const std::size_t start = static_cast<std::size_t>(std::floor(burnin * sample.size()));
    if (start >= sample.size()) throw std::invalid_argument("edgePosterior: empty post-burn-in sample");
    const int n = sample[0].n();
    std::vector<double> post(static_cast<std::size_t>(n) * n, 0.0);
    for (std::size_t k = start; k < sample.size(); ++k) {
        const Dag& g = pdag ? dagToCpdag(sample[k]).g : sample[k];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (g.edge(i, j)) post[static_cast<std::size_t>(i) * n + j] += 1.0;
    }
    const double m = static_cast<double>(sample.size() - start);
    for (auto& v : post) v /= m;
    return post;
}

/// Threshold the posterior matrix; the result may contain cycles or
/// symmetric pairs (it is a PDAG-shaped indicator, not a DAG).
inline Dag consensusModel(const std::vector<double>& post, int n, double p,
                          const std::vector<std::string>& labels = {}) {
    if (p <= 0 || p >= 1) throw std::invalid_argument("consensusModel: threshold outside (0,1)");
    if (static_cast<int>(post.size()) != n * n)
        throw std::invalid_argument("consensusModel: matrix must be n x n");
    Dag g = labels.empty() ? Dag(n) : Dag(n, labels);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && post[static_cast<std::size_t>(i) * n + j] > p) g.setEdge(i, j);
    return g;
}

/// Running posterior of each edge whose overall frequency ever exceeds the
/// cutoff: series[k] = mean over the first k+1 saved graphs.
struct EdgeTrace {
    int from = 0, to = 0;
    std::vector<double> series;
};

inline std::vector<EdgeTrace> edgePosteriorTrace(const std::vector<Dag>& sample,
                                                 double cutoff = 0.2, bool pdag = false) {
    if (sample.empty()) throw std::invalid_argument("edgePosteriorTrace: empty sample");
    const int n = sample[0].n();
    const std::size_t m = sample.size();
    std::vector<std::vector<double>> running(static_cast<std::size_t>(n) * n,
                                             std::vector<double>());
    std::vector<double> counts(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<char> interesting(static_cast<std::size_t>(n) * n, 0);
    for (std::size_t k = 0; k < m; ++k) {
        const Dag& g = pdag ? dagToCpdag(sample[k]).g : sample[k];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t e = static_cast<std::size_t>(i) * n + j;
                if (g.edge(i, j)) counts[e] += 1.0;
                const double mean = counts[e] / static_cast<double>(k + 1);
                running[e].push_back(mean);
                if (mean > cutoff) interesting[e] = 1;
            }
    }
    std::vector<EdgeTrace> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::size_t e = static_cast<std::size_t>(i) * n + j;
            if (i != j && interesting[e]) out.push_back({i, j, std::move(running[e])});
        }
    return out;
}

/// Per-edge posterior pair from two runs, flagged when they disagree by
/// more than `highlight` (convergence diagnostic).
struct ConcordancePair {
    int from = 0, to = 0;
    double pA = 0, pB = 0;
    bool flagged = false;
};

struct Concordance {
    std::vector<ConcordancePair> pairs; // all i != j entries
    double maxDiscrepancy = 0;
    int flaggedCount = 0;
};

inline Concordance concordance(const std::vector<double>& postA, const std::vector<double>& postB,
                               int n, double highlight = 0.3) {
    if (postA.size() != postB.size() || static_cast<int>(postA.size()) != n * n)
        throw std::invalid_argument("concordance: shape mismatch");
    Concordance c;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const std::size_t e = static_cast<std::size_t>(i) * n + j;
            ConcordancePair pr{i, j, postA[e], postB[e], false};
            const double d = std::abs(pr.pA - pr.pB);
            pr.flagged = d > highlight;
            c.maxDiscrepancy = std::max(c.maxDiscrepancy, d);
            if (pr.flagged) ++c.flaggedCount;
            c.pairs.push_back(pr);
        }
    return c;
}

/// Structure-recovery metrics. TP/FP/FN/TPR/FDR compare skeletons; FPR
/// normalizes FP by the number of absent skeleton edges in the truth, FPRn
/// by the truth's edge count; SHD counts missing, extra, and wrongly
/// oriented edges of the (C)PDAG adjacency once each.
struct DagMetrics {
    int tp = 0, fp = 0, fn = 0, shd = 0;
    double tpr = 0, fpr = 0, fprn = 0, fdr = 0;
};

inline DagMetrics compareDAGs(const Dag& estimateIn, const Dag& truthIn, bool asCpdag = false) {
    if (estimateIn.n() != truthIn.n())
        throw std::invalid_argument("compareDAGs: node count mismatch");
    const Dag estimate = asCpdag ? dagToCpdag(estimateIn).g : estimateIn;
    const Dag truth = asCpdag ? dagToCpdag(truthIn).g : truthIn;
    const int n = truth.n();
    DagMetrics m;
    int trueEdges = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const bool inEst = estimate.edge(i, j) || estimate.edge(j, i);
            const bool inTruth = truth.edge(i, j) || truth.edge(j, i);
            if (inTruth) ++trueEdges;
            if (inEst && inTruth) ++m.tp;
            else if (inEst) ++m.fp;
            else if (inTruth) ++m.fn;
            if (inEst != inTruth) ++m.shd;
            else if (inEst && (estimate.edge(i, j) != truth.edge(i, j) ||
                               estimate.edge(j, i) != truth.edge(j, i)))
                ++m.shd; // same skeleton edge, wrong orientation pattern
        }
    const double possible = n * (n - 1) / 2.0;
    m.tpr = trueEdges == 0 ? 1.0 : static_cast<double>(m.tp) / trueEdges;
    m.fpr = (possible - trueEdges) > 0 ? m.fp / (possible - trueEdges) : 0.0;
    m.fprn = trueEdges == 0 ? 0.0 : static_cast<double>(m.fp) / trueEdges;
    m.fdr = (m.tp + m.fp) > 0 ? static_cast<double>(m.fp) / (m.tp + m.fp) : 0.0;
    return m;
}

/// Consensus models over a threshold grid compared against the truth; one
/// row per threshold with columns TP FP FN TPR FPR FPRn FDR SHD p.
struct SampleCompRow {
    DagMetrics metrics;
    double p = 0;
};

inline std::vector<SampleCompRow> samplecomp(const std::vector<Dag>& sample, const Dag& truth,
                                             const std::vector<double>& thresholds,
                                             bool pdag = true, double burnin = 0.2) {
    auto post = edgePosterior(sample, pdag, burnin);
    const int n = truth.n();
    std::vector<SampleCompRow> rows;
    for (double p : thresholds) {
        Dag consensus = consensusModel(post, n, p, truth.labels());
        rows.push_back({compareDAGs(consensus, truth, false), p});
    }
    return rows;
}

} // namespace dagmcmc

#endif
