#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "dagmcmc/graph.hpp"
#include "dagmcmc/posterior.hpp"
#include "dagmcmc/rng.hpp"
#include "oracles.hpp"

using namespace dagmcmc;

namespace {

Dag pathGraph(int n) {
    Dag g(n);
    for (int i = 0; i + 1 < n; ++i) g.setEdge(i, i + 1);
    return g;
}

} // namespace

TEST(Posterior, IdenticalSampleGivesIndicator) {
    Dag g = pathGraph(3);
    auto post = edgePosterior({g, g, g}, false, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_DOUBLE_EQ(post[i * 3 + j], g.edge(i, j) ? 1.0 : 0.0);
}

TEST(Posterior, HalfAndHalf) {
    Dag g = pathGraph(3);
    Dag empty(3);
    auto post = edgePosterior({g, empty}, false, 0.0);
    EXPECT_DOUBLE_EQ(post[0 * 3 + 1], 0.5);
    EXPECT_DOUBLE_EQ(post[1 * 3 + 2], 0.5);
    EXPECT_DOUBLE_EQ(post[0 * 3 + 2], 0.0);
}

TEST(Posterior, BurninDropsPrefix) {
    Dag g = pathGraph(3);
    Dag empty(3);
    // 10 saves, burnin 0.2 -> drop exactly the two leading empties
    std::vector<Dag> sample(10, g);
    sample[0] = sample[1] = empty;
    auto post = edgePosterior(sample, false, 0.2);
    EXPECT_DOUBLE_EQ(post[0 * 3 + 1], 1.0);
}

TEST(Posterior, PdagCountsUndirectedBothWays) {
    Dag g(3);
    g.setEdge(0, 1); // one edge: its CPDAG is undirected
    auto post = edgePosterior({g}, true, 0.0);
    EXPECT_DOUBLE_EQ(post[0 * 3 + 1], 1.0);
    EXPECT_DOUBLE_EQ(post[1 * 3 + 0], 1.0);
}

TEST(Posterior, EdgePosteriorErrors) {
    EXPECT_THROW(edgePosterior({}, false, 0.0), std::invalid_argument);
    Dag g(2);
    EXPECT_THROW(edgePosterior({g}, false, 1.0), std::invalid_argument);
}

TEST(Posterior, ConsensusThresholdMonotone) {
    std::vector<double> post = {0, 0.6, 0.95, 0, 0, 0.4, 0.2, 0.55, 0};
    Dag hi = consensusModel(post, 3, 0.9);
    Dag lo = consensusModel(post, 3, 0.5);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (hi.edge(i, j)) EXPECT_TRUE(lo.edge(i, j));
    EXPECT_EQ(hi.edgeCount(), 1);
    EXPECT_EQ(lo.edgeCount(), 3);
    EXPECT_THROW(consensusModel(post, 3, 0.0), std::invalid_argument);
    EXPECT_THROW(consensusModel(post, 2, 0.5), std::invalid_argument);
}

TEST(Posterior, TraceConstantSample) {
    Dag g = pathGraph(3);
    auto traces = edgePosteriorTrace({g, g, g, g}, 0.2);
    ASSERT_EQ(traces.size(), 2u); // the two path edges
    for (const auto& t : traces)
        for (double v : t.series) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Posterior, TraceFinalValueEqualsPosterior) {
    auto rng = makeRng(21);
    std::vector<Dag> sample;
    for (int k = 0; k < 40; ++k) sample.push_back(sampleDag(4, 1.0, rng));
    auto traces = edgePosteriorTrace(sample, 0.2);
    auto post = edgePosterior(sample, false, 0.0);
    for (const auto& t : traces)
        EXPECT_DOUBLE_EQ(t.series.back(), post[t.from * 4 + t.to]);
}

TEST(Posterior, TraceAlternatingApproachesHalf) {
    Dag g = pathGraph(2);
    Dag empty(2);
    std::vector<Dag> sample;
    for (int k = 0; k < 100; ++k) sample.push_back(k % 2 ? empty : g);
    auto traces = edgePosteriorTrace(sample, 0.2);
    ASSERT_EQ(traces.size(), 1u);
    EXPECT_NEAR(traces[0].series.back(), 0.5, 1e-12);
}

TEST(Posterior, ConcordanceFlags) {
    std::vector<double> a = {0, 0.9, 0, 0}, b = {0, 0.5, 0, 0};
    auto same = concordance(a, a, 2, 0.3);
    EXPECT_EQ(same.flaggedCount, 0);
    EXPECT_DOUBLE_EQ(same.maxDiscrepancy, 0.0);
    auto diff = concordance(a, b, 2, 0.3);
    EXPECT_EQ(diff.flaggedCount, 1);
    EXPECT_NEAR(diff.maxDiscrepancy, 0.4, 1e-12);
    EXPECT_THROW(concordance(a, std::vector<double>(9, 0.0), 2, 0.3), std::invalid_argument);
}

TEST(Posterior, CompareIdenticalGraphs) {
    Dag g = pathGraph(4);
    auto m = compareDAGs(g, g, false);
    EXPECT_EQ(m.shd, 0);
    EXPECT_EQ(m.fp, 0);
    EXPECT_EQ(m.fn, 0);
    EXPECT_DOUBLE_EQ(m.tpr, 1.0);
}

TEST(Posterior, ReversedEdgeCountsOnceInShd) {
    Dag truth(2), est(2);
    truth.setEdge(0, 1);
    est.setEdge(1, 0);
    auto m = compareDAGs(est, truth, false);
    EXPECT_EQ(m.tp, 1); // skeleton match
    EXPECT_EQ(m.fp, 0);
    EXPECT_EQ(m.shd, 1);
}

TEST(Posterior, MetricsMatchOracleOnRandomPairs) {
    auto rng = makeRng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(trial % 5);
        Dag est = sampleDag(n, 1.2, rng);
        Dag truth = sampleDag(n, 1.2, rng);
        auto got = compareDAGs(est, truth, false);
        auto want = oracle::compareOracle(est, truth);
        EXPECT_EQ(got.tp, want.tp);
        EXPECT_EQ(got.fp, want.fp);
        EXPECT_EQ(got.fn, want.fn);
        EXPECT_EQ(got.shd, want.shd);
        EXPECT_DOUBLE_EQ(got.tpr, want.tpr);
        EXPECT_DOUBLE_EQ(got.fpr, want.fpr);
        EXPECT_DOUBLE_EQ(got.fprn, want.fprn);
        EXPECT_DOUBLE_EQ(got.fdr, want.fdr);
    }
}

TEST(Posterior, ShdSymmetricAndZeroOnlyWhenEqual) {
    auto rng = makeRng(31);
    for (int trial = 0; trial < 100; ++trial) {
        Dag a = sampleDag(4, 1.0, rng);
        Dag b = sampleDag(4, 1.0, rng);
        for (bool cp : {false, true}) {
            auto ab = compareDAGs(a, b, cp);
            auto ba = compareDAGs(b, a, cp);
            EXPECT_EQ(ab.shd, ba.shd);
            const Dag ca = cp ? dagToCpdag(a).g : a;
            const Dag cb = cp ? dagToCpdag(b).g : b;
            EXPECT_EQ(ab.shd == 0, ca == cb);
        }
    }
}

TEST(Posterior, SampleCompDegenerateSample) {
    Dag truth = pathGraph(4);
    std::vector<Dag> sample(10, truth);
    auto rows = samplecomp(sample, truth, {0.5, 0.7, 0.9, 0.95}, false, 0.2);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.metrics.tp, 3);
        EXPECT_EQ(r.metrics.fp, 0);
        EXPECT_EQ(r.metrics.shd, 0);
    }
}

TEST(Posterior, SampleCompMatchesManualComposition) {
    auto rng = makeRng(13);
    std::vector<Dag> sample;
    for (int k = 0; k < 60; ++k) sample.push_back(sampleDag(4, 1.0, rng));
    Dag truth = sampleDag(4, 1.0, rng);
    const bool pdag = true;
    auto rows = samplecomp(sample, truth, {0.5, 0.9}, pdag, 0.2);
    auto post = edgePosterior(sample, pdag, 0.2);
    for (const auto& r : rows) {
        Dag consensus = consensusModel(post, 4, r.p, truth.labels());
        auto want = compareDAGs(consensus, truth, false);
        EXPECT_EQ(r.metrics.tp, want.tp);
        EXPECT_EQ(r.metrics.fp, want.fp);
        EXPECT_EQ(r.metrics.shd, want.shd);
    }
}
