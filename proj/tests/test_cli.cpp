// End-to-end tests for the command-line tool. Each test drives the real
// binary through std::system and inspects its outputs.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dagmcmc/io.hpp"

namespace fs = std::filesystem;
using namespace dagmcmc;

namespace {

const std::string kCli = DAGMCMC_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("dagmcmc_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const int rc = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void makeData(const TempDir& d) {
    ASSERT_EQ(0, run("simulate --nodes 5 --rows 120 --seed 7 --out-dir " + (d / "sim")));
}

TEST(Cli, NoArgsIsUsageError) { EXPECT_EQ(1, run("")); }

TEST(Cli, HelpExitsZero) { EXPECT_EQ(0, run("--help")); }

TEST(Cli, MissingDataFileIsDataError) {
    TempDir d;
    EXPECT_EQ(2, run("learn --data " + (d / "nope.csv") + " --out-dir " + (d / "out")));
}

TEST(Cli, PartitionMapIsRejected) {
    TempDir d;
    makeData(d);
    EXPECT_EQ(1, run("learn --data " + (d / "sim/data.csv") + " --method partition --map --out-dir " +
                     (d / "out")));
}

TEST(Cli, UnknownMethodIsUsageError) {
    TempDir d;
    makeData(d);
    EXPECT_EQ(1, run("learn --data " + (d / "sim/data.csv") + " --method annealing --out-dir " +
                     (d / "out")));
}

TEST(Cli, LearnWritesExpectedFilesAndMeta) {
    TempDir d;
    makeData(d);
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") + " --method order --sample --seed 3 " +
                     "--out-dir " + (d / "out")));
    EXPECT_TRUE(fs::exists(d / "out/maxdag.csv"));
    EXPECT_TRUE(fs::exists(d / "out/trace.csv"));
    EXPECT_TRUE(fs::exists(d / "out/sample.graphs"));
    const std::string meta = slurp(d / "out/run_meta.json");
    EXPECT_NE(meta.find("\"alpha\": 0.05"), std::string::npos);
    EXPECT_NE(meta.find("\"am\": 1.0"), std::string::npos);
    EXPECT_NE(meta.find("\"chi\": 0.5"), std::string::npos);
    EXPECT_NE(meta.find("\"edgepf\": 2.0"), std::string::npos);
    EXPECT_NE(meta.find("\"burnin\": 0.2"), std::string::npos);
    EXPECT_NE(meta.find("\"saved_states\": 1001"), std::string::npos);
    EXPECT_NE(meta.find("\"hardlimit\": 14"), std::string::npos);
}

TEST(Cli, FixedSeedReproducesOutputsByteForByte) {
    TempDir d;
    makeData(d);
    const std::string base = "learn --data " + (d / "sim/data.csv") +
                             " --method order --sample --seed 42 --out-dir ";
    ASSERT_EQ(0, run(base + (d / "a")));
    ASSERT_EQ(0, run(base + (d / "b")));
    EXPECT_EQ(slurp(d / "a/maxdag.csv"), slurp(d / "b/maxdag.csv"));
    EXPECT_EQ(slurp(d / "a/trace.csv"), slurp(d / "b/trace.csv"));
    EXPECT_EQ(slurp(d / "a/sample.graphs"), slurp(d / "b/sample.graphs"));
}

TEST(Cli, SeedsChangeOutput) {
    TempDir d;
    makeData(d);
    const std::string base = "learn --data " + (d / "sim/data.csv") +
                             " --method partition --seed ";
    ASSERT_EQ(0, run(base + "1 --out-dir " + (d / "a")));
    ASSERT_EQ(0, run(base + "2 --out-dir " + (d / "b")));
    EXPECT_NE(slurp(d / "a/sample.graphs"), slurp(d / "b/sample.graphs"));
}

TEST(Cli, MultipleChainsWriteSuffixedFiles) {
    TempDir d;
    makeData(d);
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --method order --sample --seed 3 --chains 2 --out-dir " + (d / "out")));
    EXPECT_TRUE(fs::exists(d / "out/sample_c1.graphs"));
    EXPECT_TRUE(fs::exists(d / "out/sample_c2.graphs"));
    EXPECT_NE(slurp(d / "out/sample_c1.graphs"), slurp(d / "out/sample_c2.graphs"));
}

TEST(Cli, IterativeWritesSpaceAndStepSummary) {
    TempDir d;
    makeData(d);
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --method iterative --map --seed 3 --out-dir " + (d / "out")));
    EXPECT_TRUE(fs::exists(d / "out/space_final.csv"));
    EXPECT_TRUE(fs::exists(d / "out/itersummary.csv"));
    EXPECT_TRUE(fs::exists(d / "out/steps.graphs"));
    std::ifstream f(d / "out/itersummary.csv");
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, "step,max_score,core_edges,added_edges,iterations");
}

TEST(Cli, DotFlagWritesDot) {
    TempDir d;
    makeData(d);
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --method order --map --dot --seed 3 --out-dir " + (d / "out")));
    const std::string dot = slurp(d / "out/maxdag.dot");
    EXPECT_NE(dot.find("digraph"), std::string::npos);
}

TEST(Cli, EdgepProducesSquareMatrixMatchingLibrary) {
    TempDir d;
    makeData(d);
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --method order --sample --seed 3 --out-dir " + (d / "out")));
    ASSERT_EQ(0, run("analyze edgep --sample " + (d / "out/sample.graphs") + " --out " +
                     (d / "post.csv")));
    auto m = readMatrixCsv(d / "post.csv");
    EXPECT_EQ(m.n(), 5);
    for (double v : m.values) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Cli, ModelpConsensusIsNestedAcrossThresholds) {
    TempDir d;
    makeData(d);
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --method order --sample --seed 3 --out-dir " + (d / "out")));
    ASSERT_EQ(0, run("analyze modelp --sample " + (d / "out/sample.graphs") +
                     " -p 0.3,0.9 --out-dir " + (d / "cons")));
    Dag lo = readAdjacencyCsv(d / "cons/consensus_p0.3.csv");
    Dag hi = readAdjacencyCsv(d / "cons/consensus_p0.9.csv");
    for (int i = 0; i < lo.n(); ++i)
        for (int j = 0; j < lo.n(); ++j)
            if (hi.edge(i, j)) EXPECT_TRUE(lo.edge(i, j));
}

TEST(Cli, ConcordWithItselfExitsZero) {
    TempDir d;
    makeData(d);
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --method order --sample --seed 3 --out-dir " + (d / "out")));
    EXPECT_EQ(0, run("analyze concord --sample-a " + (d / "out/sample.graphs") + " --sample-b " +
                     (d / "out/sample.graphs") + " --out " + (d / "cc.csv")));
}

TEST(Cli, ConcordFlagsDisagreementWithNonzeroExit) {
    TempDir d;
    makeData(d);
    // a full-length chain against a tiny sliver of itself disagrees somewhere
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --method order --sample --seed 3 --out-dir " + (d / "a")));
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --method order --sample --iterations 10 --stepsave 1 --seed 9 --out-dir " +
                     (d / "b")));
    const int rc = run("analyze concord --sample-a " + (d / "a/sample.graphs") + " --sample-b " +
                       (d / "b/sample.graphs") + " --highlight 0.05 --out " + (d / "cc.csv"));
    EXPECT_EQ(rc, 4);
}

TEST(Cli, SamplecompWritesOneRowPerThreshold) {
    TempDir d;
    makeData(d);
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --method order --sample --seed 3 --out-dir " + (d / "out")));
    ASSERT_EQ(0, run("analyze samplecomp --sample " + (d / "out/sample.graphs") + " --truth " +
                     (d / "sim/truth.csv") + " -p 0.5,0.9 --out " + (d / "sc.csv")));
    std::ifstream f(d / "sc.csv");
    std::string line;
    int rows = 0;
    std::getline(f, line);
    EXPECT_EQ(line, "TP,FP,FN,TPR,FPR,FPRn,FDR,SHD,p");
    while (std::getline(f, line)) ++rows;
    EXPECT_EQ(rows, 2);
}

TEST(Cli, SimulateRowsZeroWritesHeaderOnly) {
    TempDir d;
    ASSERT_EQ(0, run("simulate --nodes 4 --rows 0 --seed 1 --out-dir " + (d / "sim")));
    std::ifstream f(d / "sim/data.csv");
    std::string line;
    int lines = 0;
    while (std::getline(f, line)) ++lines;
    EXPECT_EQ(lines, 1);
    Dag truth = readAdjacencyCsv(d / "sim/truth.csv");
    EXPECT_TRUE(isAcyclic(truth));
}

TEST(Cli, PenaltyMatrixRoundTrips) {
    TempDir d;
    makeData(d);
    {
        std::ofstream f(d / "inter.tsv");
        f << "V1\tV3\nV2\tV4\n";
    }
    ASSERT_EQ(0, run("penalty-from-interactions --interactions " + (d / "inter.tsv") +
                     " --data " + (d / "sim/data.csv") + " --factor 3 --out " + (d / "pen.csv")));
    auto m = readMatrixCsv(d / "pen.csv");
    ASSERT_EQ(m.n(), 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const bool listed = (i == 0 && j == 2) || (i == 2 && j == 0) ||
                                (i == 1 && j == 3) || (i == 3 && j == 1);
            if (i == j || listed) EXPECT_DOUBLE_EQ(m(i, j), 1.0);
            else EXPECT_DOUBLE_EQ(m(i, j), 3.0);
        }
    // and the learn command accepts it
    EXPECT_EQ(0, run("learn --data " + (d / "sim/data.csv") + " --edgepenalty " + (d / "pen.csv") +
                     " --method order --map --seed 1 --out-dir " + (d / "out")));
}

TEST(Cli, PenaltyUnknownLabelIsDataError) {
    TempDir d;
    {
        std::ofstream f(d / "inter.tsv");
        f << "A\tZ\n";
    }
    EXPECT_EQ(2, run("penalty-from-interactions --interactions " + (d / "inter.tsv") +
                     " --labels A,B,C --out " + (d / "pen.csv")));
}

TEST(Cli, DbnLearnWritesInitialTransitionAndDot) {
    TempDir d;
    ASSERT_EQ(0, run("simulate --dbn-dynamic 3 --dbn-static 1 --dbn-slices 4 --rows 200 --seed 2 "
                     "--out-dir " + (d / "sim")));
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --dbn-dynamic 3 --dbn-static 1 --dbn-slices 4 --seed 5 --out-dir " +
                     (d / "out")));
    Dag init = readAdjacencyCsv(d / "out/initial.csv");
    Dag trans = readAdjacencyCsv(d / "out/transition.csv");
    EXPECT_EQ(init.n(), 4);
    EXPECT_EQ(trans.n(), 7);
    const std::string dot = slurp(d / "out/dbn.dot");
    EXPECT_NE(dot.find("lag."), std::string::npos);
}

TEST(Cli, BgnodesBecomeRoots) {
    TempDir d;
    makeData(d);
    ASSERT_EQ(0, run("learn --data " + (d / "sim/data.csv") +
                     " --bgnodes V1 --method order --map --seed 3 --out-dir " + (d / "out")));
    Dag g = readAdjacencyCsv(d / "out/maxdag.csv");
    for (int j = 0; j < g.n(); ++j) EXPECT_FALSE(g.edge(j, 0));
}

} // namespace
