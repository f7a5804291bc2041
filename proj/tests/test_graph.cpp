#include <gtest/gtest.h>

#include <sstream>

#include "dagmcmc/graph.hpp"
#include "dagmcmc/io.hpp"
#include "dagmcmc/rng.hpp"
#include "oracles.hpp"

using namespace dagmcmc;

TEST(IsAcyclic, EmptyGraph) {
    EXPECT_TRUE(isAcyclic(Dag(3)));
}

TEST(IsAcyclic, TwoCycle) {
    Dag g(2);
    g.setEdge(0, 1);
    g.setEdge(1, 0);
    EXPECT_FALSE(isAcyclic(g));
}

TEST(IsAcyclic, AgreesWithDfsOracle) {
    auto rng = makeRng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        Dag g(6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                if (i != j && unif(rng) < 0.3) g.setEdge(i, j);
        EXPECT_EQ(isAcyclic(g), !oracle::dfsHasCycle(g));
    }
}

TEST(CompatibleWithOrder, EmptyDagAnyOrder) {
    Dag g(3);
    for (auto& o : oracle::allOrders(3)) EXPECT_TRUE(compatibleWithOrder(g, o));
}

TEST(CompatibleWithOrder, DirectDefinition) {
    Dag g(2);
    g.setEdge(1, 0); // 2 -> 1 in 1-based naming
    EXPECT_TRUE(compatibleWithOrder(g, NodeOrder{{0, 1}}));
    EXPECT_FALSE(compatibleWithOrder(g, NodeOrder{{1, 0}}));
}

TEST(CompatibleWithOrder, MatchesBruteForceOnAll3NodeDags) {
    auto dags = oracle::allDags(3);
    EXPECT_EQ(dags.size(), 25u);
    for (const auto& g : dags)
        for (const auto& o : oracle::allOrders(3))
            EXPECT_EQ(compatibleWithOrder(g, o), oracle::orderCompatibleDef(g, o));
}

TEST(CompatibleWithOrder, ReversedOrderIsTopological) {
    auto rng = makeRng(5);
    for (int rep = 0; rep < 20; ++rep) {
        Dag g = sampleDag(6, 1.5, rng);
        for (const auto& o : oracle::allOrders(6)) {
            if (!compatibleWithOrder(g, o)) continue;
            // reversed order must place every parent before its child
            std::vector<int> pos(6);
            for (int k = 0; k < 6; ++k) pos[o.perm[5 - k]] = k;
            for (int j = 0; j < 6; ++j)
                for (int p : g.parents(j)) EXPECT_LT(pos[p], pos[j]);
            break;
        }
    }
}

TEST(CompatibleWithPartition, SinglePartEmptyDag) {
    Dag g(3);
    LabelledPartition lp{{{0, 1, 2}}};
    EXPECT_TRUE(compatibleWithPartition(g, lp));
}

TEST(CompatibleWithPartition, ForcedParent) {
    Dag g(2);
    g.setEdge(1, 0);
    EXPECT_TRUE(compatibleWithPartition(g, LabelledPartition{{{0}, {1}}}));
    EXPECT_FALSE(compatibleWithPartition(g, LabelledPartition{{{0, 1}}}));
}

TEST(CompatibleWithPartition, EveryDagHasExactlyOnePartition) {
    for (int n = 2; n <= 4; ++n) {
        auto dags = oracle::allDags(n);
        auto parts = oracle::allLabelledPartitions(n);
        if (n == 3) EXPECT_EQ(dags.size(), 25u);
        if (n == 4) EXPECT_EQ(dags.size(), 543u);
        for (const auto& g : dags) {
            int matches = 0;
            for (const auto& lp : parts)
                if (compatibleWithPartition(g, lp)) ++matches;
            ASSERT_EQ(matches, 1);
        }
    }
}

TEST(CountLinearExtensions, EmptyAndChain) {
    EXPECT_EQ(countLinearExtensions(Dag(4)), 24);
    Dag chain(5);
    for (int i = 0; i + 1 < 5; ++i) chain.setEdge(i, i + 1);
    EXPECT_EQ(countLinearExtensions(chain), 1);
}

TEST(CountLinearExtensions, MatchesExhaustiveEnumeration) {
    auto rng = makeRng(7);
    auto orders = oracle::allOrders(5);
    for (int rep = 0; rep < 20; ++rep) {
        Dag g = sampleDag(5, 1.5, rng);
        long long direct = 0;
        for (const auto& o : orders)
            if (oracle::orderCompatibleDef(g, o)) ++direct;
        EXPECT_EQ(countLinearExtensions(g), direct);
    }
}

TEST(CountLinearExtensions, SizeGuard) {
    EXPECT_THROW(countLinearExtensions(Dag(13)), std::invalid_argument);
}

TEST(DagToCpdag, ChainBecomesUndirected) {
    Dag g(3);
    g.setEdge(0, 1);
    g.setEdge(1, 2);
    auto c = dagToCpdag(g).g;
    EXPECT_TRUE(c.edge(0, 1) && c.edge(1, 0));
    EXPECT_TRUE(c.edge(1, 2) && c.edge(2, 1));
}

TEST(DagToCpdag, ColliderStaysDirected) {
    Dag g(3);
    g.setEdge(0, 2);
    g.setEdge(1, 2);
    auto c = dagToCpdag(g).g;
    EXPECT_TRUE(c.edge(0, 2) && !c.edge(2, 0));
    EXPECT_TRUE(c.edge(1, 2) && !c.edge(2, 1));
}

TEST(DagToCpdag, EqualityIffSameSkeletonAndVStructures) {
    auto dags = oracle::allDags(4);
    std::vector<decltype(oracle::classFingerprint(dags[0]))> fps;
    std::vector<Dag> cpdags;
    for (const auto& g : dags) {
        fps.push_back(oracle::classFingerprint(g));
        cpdags.push_back(dagToCpdag(g).g);
    }
    for (std::size_t a = 0; a < dags.size(); ++a)
        for (std::size_t b = a + 1; b < dags.size(); ++b)
            ASSERT_EQ(cpdags[a] == cpdags[b], fps[a] == fps[b])
                << "pair " << a << "," << b;
}

TEST(SampleDag, ZeroDensityAndDeterminism) {
    auto rng1 = makeRng(42);
    EXPECT_EQ(sampleDag(5, 0.0, rng1).edgeCount(), 0);
    auto rngA = makeRng(42), rngB = makeRng(42);
    EXPECT_EQ(sampleDag(10, 2.0, rngA), sampleDag(10, 2.0, rngB));
}

TEST(SampleDag, MeanEdgeCountNearTarget) {
    double total = 0;
    for (int s = 0; s < 100; ++s) {
        auto rng = makeRng(1000 + s);
        total += sampleDag(100, 2.0, rng).edgeCount();
    }
    const double mean = total / 100.0;
    EXPECT_NEAR(mean, 200.0, 20.0);
}

TEST(PartitionCoverage, SumOverPartitionsEqualsDagCount) {
    for (int n = 3; n <= 4; ++n) {
        auto dags = oracle::allDags(n);
        auto parts = oracle::allLabelledPartitions(n);
        std::size_t total = 0;
        for (const auto& lp : parts)
            for (const auto& g : dags)
                if (compatibleWithPartition(g, lp)) ++total;
        EXPECT_EQ(total, dags.size());
    }
}

TEST(GraphIo, AdjacencyCsvRoundTrip) {
    auto rng = makeRng(3);
    Dag g = sampleDag(6, 1.0, rng);
    std::stringstream ss;
    writeAdjacencyCsv(ss, g);
    Dag h = readAdjacencyCsv(ss);
    EXPECT_EQ(g, h);
    EXPECT_EQ(g.labels(), h.labels());
}

TEST(GraphIo, DotExport) {
    Dag g(3, {"a", "b", "c"});
    g.setEdge(0, 1);
    g.setEdge(1, 2);
    g.setEdge(2, 1); // undirected pair
    std::stringstream ss;
    writeDot(ss, g);
    const std::string dot = ss.str();
    EXPECT_NE(dot.find("\"a\" -> \"b\";"), std::string::npos);
    EXPECT_NE(dot.find("\"b\" -> \"c\" [dir=none];"), std::string::npos);
}
