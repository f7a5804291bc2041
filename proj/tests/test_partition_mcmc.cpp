#include <gtest/gtest.h>

#include <map>
#include <random>
#include <vector>

#include "dagmcmc/data.hpp"
#include "dagmcmc/partition_mcmc.hpp"
#include "dagmcmc/rng.hpp"
#include "dagmcmc/score.hpp"
#include "dagmcmc/score_tables.hpp"
#include "dagmcmc/search_space.hpp"
#include "oracles.hpp"

using namespace dagmcmc;

namespace {

Dataset chainData(std::uint64_t seed, int rows, int cols) {
    auto rng = makeRng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<std::string> labels;
    std::vector<ColumnKind> kinds(cols, ColumnKind::Continuous);
    for (int j = 0; j < cols; ++j) labels.push_back("v" + std::to_string(j));
    Dataset d(rows, cols, labels, kinds);
    for (int r = 0; r < rows; ++r) {
        d.at(r, 0) = nd(rng);
        for (int c = 1; c < cols; ++c) d.at(r, c) = 0.8 * d(r, c - 1) + 0.7 * nd(rng);
    }
    return d;
}

ScoreContext bgeCtx(Dataset d, std::vector<int> bgnodes = {}) {
    ScoreConfig cfg;
    cfg.scoreType = ScoreType::Bge;
    cfg.bgnodes = std::move(bgnodes);
    return buildScoreContext(std::move(d), cfg);
}

SearchSpace fullSpace(const ScoreContext& ctx) {
    std::vector<std::uint8_t> m(static_cast<std::size_t>(ctx.n()) * ctx.n(), 1);
    return fromAdjacency(m, {}, ctx, 14);
}

} // namespace

TEST(PartitionMcmc, DagToPartitionIsTheCompatibleLayering) {
    for (int n : {2, 3, 4}) {
        for (const auto& g : oracle::allDags(n)) {
            auto lp = dagToPartition(g);
            EXPECT_TRUE(compatibleWithPartition(g, lp));
        }
    }
}

TEST(PartitionMcmc, DagToPartitionWithRootNodes) {
    Dag g(4, {"a", "b", "c", "d"});
    g.setEdge(0, 1); // root 0 parents 1; ignored in the layering
    g.setEdge(3, 1); // 3 -> 1
    g.setEdge(3, 2); // 3 -> 2
    auto lp = dagToPartition(g, {0});
    ASSERT_EQ(lp.parts.size(), 2u);
    EXPECT_EQ(lp.parts[0], (std::vector<int>{1, 2}));
    EXPECT_EQ(lp.parts[1], (std::vector<int>{3}));
    EXPECT_TRUE(compatibleWithPartition(g, lp, {0}));
}

TEST(PartitionMcmc, SinglePartScoresParentFreeModel) {
    auto ctx = bgeCtx(chainData(1, 25, 3));
    auto ts = buildTables(ctx, fullSpace(ctx), false);
    LabelledPartition lp;
    lp.parts = {{0, 1, 2}};
    double expected = 0;
    for (int i = 0; i < 3; ++i) expected += localScore(ctx, i, {});
    EXPECT_NEAR(partitionScore(ts, lp), expected, 1e-10);
}

TEST(PartitionMcmc, PartitionScoreMatchesDagEnumeration) {
    // each DAG is consistent with exactly one layering, so the score of a
    // layering is the log-sum over its DAGs
    for (int n : {2, 3, 4}) {
        auto ctx = bgeCtx(chainData(n, 25, n));
        auto ts = buildTables(ctx, fullSpace(ctx), false);
        auto dags = oracle::allDags(n);
        for (const auto& lp : oracle::allLabelledPartitions(n)) {
            detail::LogSum sum;
            for (const auto& g : dags)
                if (compatibleWithPartition(g, lp)) sum.add(totalScore(ctx, g));
            const double got = partitionScore(ts, lp);
            if (sum.value() == -std::numeric_limits<double>::infinity())
                EXPECT_EQ(got, -std::numeric_limits<double>::infinity());
            else
                EXPECT_NEAR(got, sum.value(), 1e-9);
        }
    }
}

TEST(PartitionMcmc, CoverageIdentity) {
    // sum over layerings == sum over DAGs (every DAG counted exactly once)
    for (int n : {2, 3, 4}) {
        auto ctx = bgeCtx(chainData(n + 10, 30, n));
        auto ts = buildTables(ctx, fullSpace(ctx), false);
        detail::LogSum overDags, overPartitions;
        for (const auto& g : oracle::allDags(n)) overDags.add(totalScore(ctx, g));
        for (const auto& lp : oracle::allLabelledPartitions(n))
            overPartitions.add(partitionScore(ts, lp));
        EXPECT_NEAR(overPartitions.value(), overDags.value(), 1e-8);
    }
}

TEST(PartitionMcmc, CoverageIdentityWithRootNodes) {
    const int n = 4;
    auto ctx = bgeCtx(chainData(21, 30, n), {1});
    auto ts = buildTables(ctx, fullSpace(ctx), false);
    detail::LogSum overDags, overPartitions;
    for (const auto& g : oracle::allDags(n)) {
        if (!g.parents(1).empty()) continue; // root takes no parents
        overDags.add(totalScore(ctx, g));
    }
    // layerings of the non-root nodes {0, 2, 3}
    for (const auto& lp3 : oracle::allLabelledPartitions(3)) {
        LabelledPartition lp;
        const int map[3] = {0, 2, 3};
        for (const auto& part : lp3.parts) {
            std::vector<int> mapped;
            for (int v : part) mapped.push_back(map[v]);
            lp.parts.push_back(mapped);
        }
        overPartitions.add(partitionScore(ts, lp));
    }
    EXPECT_NEAR(overPartitions.value(), overDags.value(), 1e-8);
}

TEST(PartitionMcmc, DeterministicForFixedSeed) {
    auto ctx = bgeCtx(chainData(2, 30, 4));
    auto ts = buildTables(ctx, fullSpace(ctx), false);
    PartitionConfig cfg;
    cfg.iterations = 2000;
    cfg.stepsave = 50;
    cfg.seed = 3;
    auto a = runPartitionChain(ts, ctx, cfg);
    auto b = runPartitionChain(ts, ctx, cfg);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i], b.trace[i]);
    for (std::size_t i = 0; i < a.sampledDags.size(); ++i)
        EXPECT_TRUE(a.sampledDags[i] == b.sampledDags[i]);
}

TEST(PartitionMcmc, SampledDagsValidAndScored) {
    auto ctx = bgeCtx(chainData(5, 40, 4));
    auto ts = buildTables(ctx, fullSpace(ctx), true);
    PartitionConfig cfg;
    cfg.iterations = 1500;
    cfg.stepsave = 30;
    cfg.seed = 8;
    auto res = runPartitionChain(ts, ctx, cfg);
    ASSERT_FALSE(res.sampledDags.empty());
    for (std::size_t i = 0; i < res.sampledDags.size(); ++i) {
        EXPECT_TRUE(isAcyclic(res.sampledDags[i]));
        EXPECT_NEAR(res.sampledScores[i], totalScore(ctx, res.sampledDags[i]), 1e-9);
    }
}

TEST(PartitionMcmc, ChainSamplesDagsByPosteriorWeight) {
    // saved states draw DAGs from the full posterior: frequencies of the 25
    // three-node DAGs must track exp(total score) / Z
    const int n = 3;
    auto ctx = bgeCtx(chainData(9, 20, n));
    auto ts = buildTables(ctx, fullSpace(ctx), false);
    auto dags = oracle::allDags(n);
    detail::LogSum z;
    std::vector<double> post;
    for (const auto& g : dags) {
        post.push_back(totalScore(ctx, g));
        z.add(post.back());
    }
    PartitionConfig cfg;
    cfg.iterations = 150000;
    cfg.stepsave = 10;
    cfg.seed = 31;
    auto res = runPartitionChain(ts, ctx, cfg);
    std::vector<int> counts(dags.size(), 0);
    for (const auto& g : res.sampledDags)
        for (std::size_t k = 0; k < dags.size(); ++k)
            if (g == dags[k]) {
                ++counts[k];
                break;
            }
    const double total = static_cast<double>(res.sampledDags.size());
    for (std::size_t k = 0; k < dags.size(); ++k)
        EXPECT_NEAR(counts[k] / total, std::exp(post[k] - z.value()), 0.03) << "dag " << k;
}

TEST(PartitionMcmc, StartPartitionRespected) {
    auto ctx = bgeCtx(chainData(4, 30, 3));
    auto ts = buildTables(ctx, fullSpace(ctx), false);
    PartitionConfig cfg;
    cfg.iterations = 0;
    cfg.stepsave = 1;
    LabelledPartition start;
    start.parts = {{0, 2}, {1}};
    cfg.start = start;
    auto res = runPartitionChain(ts, ctx, cfg);
    EXPECT_NEAR(res.trace[0], partitionScore(ts, start), 1e-12);
}

TEST(PartitionMcmc, NeighbourhoodCounts) {
    LabelledPartition lp;
    lp.parts = {{0, 1}, {2}, {3, 4, 5}};
    // joins: 2; splits: (2^2-2) + 0 + (2^3-2) = 2 + 6
    EXPECT_EQ(detail::splitJoinCount(lp), 10);
}
