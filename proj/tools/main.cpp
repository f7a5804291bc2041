// dagmcmc: structure learning and posterior sampling for Bayesian networks
// on the command line. Subcommands: learn, analyze, simulate,
// penalty-from-interactions.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dagmcmc/data.hpp"
#include "dagmcmc/dbn.hpp"
#include "dagmcmc/graph.hpp"
#include "dagmcmc/io.hpp"
#include "dagmcmc/iterative_mcmc.hpp"
#include "dagmcmc/order_mcmc.hpp"
#include "dagmcmc/partition_mcmc.hpp"
#include "dagmcmc/posterior.hpp"
#include "dagmcmc/rng.hpp"
#include "dagmcmc/score.hpp"
#include "dagmcmc/score_tables.hpp"
#include "dagmcmc/search_space.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace dagmcmc;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int labelIndex(const std::vector<std::string>& labels, const std::string& name) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == name) return static_cast<int>(i);
    throw DataError("unknown node label '" + name + "'");
}

std::vector<std::string> splitList(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void writeDatasetCsv(const std::string& path, const Dataset& d) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot open " + path);
    f << std::setprecision(17);
    for (int j = 0; j < d.cols(); ++j) f << (j ? "," : "") << d.labels()[j];
    f << "\n";
    for (int r = 0; r < d.rows(); ++r) {
        for (int j = 0; j < d.cols(); ++j) {
            f << (j ? "," : "");
            if (d.kind(j) == ColumnKind::Categorical)
                f << d.levels(j)[static_cast<int>(d(r, j))];
            else if (d.kind(j) == ColumnKind::Binary)
                f << static_cast<int>(d(r, j));
            else
                f << d(r, j);
        }
        f << "\n";
    }
}

void writeTraceCsv(const std::string& path, const std::vector<double>& trace,
                   long long stepsave) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot open " + path);
    f << std::setprecision(17) << "step,logscore\n";
    for (std::size_t k = 0; k < trace.size(); ++k)
        f << static_cast<long long>(k) * stepsave << "," << trace[k] << "\n";
}

Dag spaceToGraph(const SearchSpace& sp, const std::vector<std::string>& labels) {
    Dag g(sp.n, labels);
    for (int i = 0; i < sp.n; ++i)
        for (int j = 0; j < sp.n; ++j)
            if (i != j && sp.inCore(i, j)) g.setEdge(i, j);
    return g;
}

// ---- learn ----

struct LearnArgs {
    std::string data, outDir;
    std::string score = "bge";
    std::string method = "order";
    bool mapMode = false, sampleMode = false;
    long long iterations = -1, stepsave = -1;
    double alpha = 0.05;
    std::string startspace, blacklist, edgepenalty, weights, bgnodes;
    int hardlimit = -1;
    bool plus1 = true;
    std::uint64_t seed = 0;
    int chains = 1;
    bool dot = false;
    double am = 1.0, chi = 0.5, edgepf = 2.0;
    double aw = -1; // <0: default n + am + 1
    // DBN layout (dbnDynamic > 0 switches learn into DBN mode)
    int dbnDynamic = 0, dbnStatic = 0, dbnSlices = 2;
    bool dbnSamestruct = true;
};

ScoreConfig makeScoreConfig(const LearnArgs& a, const std::vector<std::string>& labels) {
    ScoreConfig cfg;
    if (a.score == "bge") cfg.scoreType = ScoreType::Bge;
    else if (a.score == "bde") cfg.scoreType = ScoreType::Bde;
    else if (a.score == "bdecat") cfg.scoreType = ScoreType::BdeCat;
    else throw UsageError("unknown score '" + a.score + "'");
    cfg.bge.am = a.am;
    if (a.aw >= 0) cfg.bge.aw = a.aw;
    cfg.bde.chi = a.chi;
    cfg.bde.edgepf = a.edgepf;
    if (!a.weights.empty()) cfg.weights = loadWeights(a.weights);
    for (const auto& name : splitList(a.bgnodes))
        cfg.bgnodes.push_back(labelIndex(labels, name));
    if (!a.edgepenalty.empty()) {
        auto m = readMatrixCsv(a.edgepenalty);
        if (m.labels.size() != labels.size())
            throw DataError("edge penalty matrix size does not match the data");
        const int n = static_cast<int>(labels.size());
        std::vector<double> mapped(static_cast<std::size_t>(n) * n, 1.0);
        // map penalty rows/columns onto the dataset's label order
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = labelIndex(labels, m.labels[i]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                mapped[static_cast<std::size_t>(idx[i]) * n + idx[j]] = m(i, j);
        cfg.edgePenalty = std::move(mapped);
    }
    return cfg;
}

SearchSpace makeSpace(const LearnArgs& a, const ScoreContext& ctx, int hardlimit) {
    std::vector<std::uint8_t> black;
    const int n = ctx.n();
    if (!a.blacklist.empty()) {
        Dag b = readAdjacencyCsv(a.blacklist);
        if (b.n() != n) throw DataError("blacklist size does not match the data");
        black.assign(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (b.edge(i, j)) black[static_cast<std::size_t>(i) * n + j] = 1;
    }
    if (!a.startspace.empty()) {
        Dag s = readAdjacencyCsv(a.startspace);
        if (s.n() != n) throw DataError("start space size does not match the data");
        std::vector<std::uint8_t> core(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (s.edge(i, j)) core[static_cast<std::size_t>(i) * n + j] = 1;
        return fromAdjacency(core, black, ctx, hardlimit);
    }
    auto sp = pcSkeleton(ctx, a.alpha, 3, hardlimit);
    if (!black.empty()) {
        sp.blacklist = black;
        sp.normalize(ctx);
    }
    return sp;
}

int runLearnDbn(const LearnArgs& a) {
    Dataset data = loadDataset(a.data);
    DbnLayout layout{a.dbnStatic, a.dbnDynamic, a.dbnSlices, a.dbnSamestruct};
    ScoreConfig scoreCfg = makeScoreConfig(a, data.labels());
    if (!scoreCfg.bgnodes.empty())
        throw UsageError("--bgnodes is implied by the DBN layout; do not pass it");
    DbnLearnOptions opts;
    if (a.method == "order") opts.method = DbnMethod::Order;
    else if (a.method == "partition") opts.method = DbnMethod::Partition;
    else if (a.method == "iterative") opts.method = DbnMethod::Iterative;
    else throw UsageError("unknown method '" + a.method + "'");
    opts.iterations = a.iterations;
    opts.stepsave = a.stepsave;
    opts.seed = a.seed;
    opts.pcAlpha = a.alpha;
    opts.plus1 = a.plus1;
    const auto t0 = std::chrono::steady_clock::now();
    auto res = learnDbn(data, layout, scoreCfg, opts);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

    fs::create_directories(a.outDir);
    writeAdjacencyCsv((fs::path(a.outDir) / "initial.csv").string(), res.structure.initial);
    writeAdjacencyCsv((fs::path(a.outDir) / "transition.csv").string(), res.structure.transition);
    {
        // combined DOT: lagged nodes carry a lag. prefix
        Dag dot = res.structure.transition;
        auto labels = dot.labels();
        for (int i = 0; i < a.dbnDynamic; ++i)
            labels[a.dbnStatic + i] = "lag." + labels[a.dbnStatic + i];
        dot.setLabels(labels);
        std::ofstream f(fs::path(a.outDir) / "dbn.dot");
        writeDot(f, dot, "dbn");
    }
    if (!res.transitionChain.trace.empty())
        writeTraceCsv((fs::path(a.outDir) / "trace.csv").string(), res.transitionChain.trace,
                      std::max<long long>(1, res.transitionChain.info.stepsave));

    json meta;
    meta["command"] = "learn";
    meta["dbn"] = {{"static", a.dbnStatic}, {"dynamic", a.dbnDynamic},
                   {"slices", a.dbnSlices}, {"samestruct", a.dbnSamestruct}};
    meta["score"] = a.score;
    meta["method"] = a.method;
    meta["alpha"] = a.alpha;
    meta["seed"] = a.seed;
    meta["elapsed_ms"] = ms;
    std::ofstream f(fs::path(a.outDir) / "run_meta.json");
    f << meta.dump(2) << "\n";
    return 0;
}

int runLearn(const LearnArgs& a) {
    if (a.mapMode && a.sampleMode) throw UsageError("--map and --sample are exclusive");
    if (a.method == "partition" && a.mapMode)
        throw UsageError("partition MCMC only samples; --map is not available");
    if (a.chains < 1) throw UsageError("--chains must be positive");
    if (a.dbnDynamic > 0) return runLearnDbn(a);

    const ChainMode mode = a.mapMode ? ChainMode::Map : ChainMode::Sample;
    Dataset data = loadDataset(a.data);
    ScoreConfig scoreCfg = makeScoreConfig(a, data.labels());
    auto ctx = buildScoreContext(std::move(data), scoreCfg);
    const bool plus1 = a.method == "partition" ? true : a.plus1; // partitions always use H+
    const int hardlimit = a.hardlimit > 0 ? a.hardlimit : defaultHardlimit(plus1);
    auto space = makeSpace(a, ctx, hardlimit);
    const int m = ctx.n() - static_cast<int>(ctx.bgnodes().size());

    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(a.outDir);

    struct ChainOutput {
        ChainResult chain;
        std::optional<IterativeResult> iter;
        std::uint64_t seed = 0;
    };
    std::vector<ChainOutput> outputs(a.chains);
    auto runOne = [&](int c) {
        const std::uint64_t chainSeed = splitmix64(a.seed ^ splitmix64(static_cast<std::uint64_t>(c)));
        outputs[c].seed = chainSeed;
        if (a.method == "iterative") {
            IterativeOptions opts;
            opts.plus1 = plus1;
            opts.finalMode = mode;
            opts.finalIterations = a.iterations;
            opts.finalStepsave = a.stepsave;
            opts.seed = chainSeed;
            auto res = runIterative(ctx, space, opts);
            outputs[c].chain = res.finalChain;
            outputs[c].iter = std::move(res);
        } else if (a.method == "partition") {
            auto ts = buildTables(ctx, space, plus1);
            PartitionConfig cfg;
            cfg.iterations = a.iterations;
            cfg.stepsave = a.stepsave;
            cfg.seed = chainSeed;
            outputs[c].chain = runPartitionChain(ts, ctx, cfg);
        } else if (a.method == "order") {
            auto ts = buildTables(ctx, space, plus1);
            ChainConfig cfg;
            cfg.mode = mode;
            cfg.iterations = a.iterations;
            cfg.stepsave = a.stepsave;
            cfg.seed = chainSeed;
            outputs[c].chain = runOrderChain(ts, ctx, cfg);
        } else {
            throw UsageError("unknown method '" + a.method + "'");
        }
    };
    if (a.chains == 1) {
        runOne(0);
    } else {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(a.chains);
        for (int c = 0; c < a.chains; ++c)
            workers.emplace_back([&, c] {
                try {
                    runOne(c);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            });
        for (auto& w : workers) w.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

    auto suffix = [&](int c) { return a.chains > 1 ? "_c" + std::to_string(c + 1) : std::string(); };
    for (int c = 0; c < a.chains; ++c) {
        const auto& out = outputs[c];
        const fs::path dir(a.outDir);
        writeAdjacencyCsv((dir / ("maxdag" + suffix(c) + ".csv")).string(), out.chain.maxDag);
        writeTraceCsv((dir / ("trace" + suffix(c) + ".csv")).string(), out.chain.trace,
                      std::max<long long>(1, out.chain.info.stepsave));
        if (mode == ChainMode::Sample || a.method == "partition") {
            GraphSample s;
            s.labels = ctx.data().labels();
            s.kind = out.chain.info.kind;
            s.graphs = out.chain.sampledDags;
            s.scores = out.chain.sampledScores;
            writeGraphArchive((dir / ("sample" + suffix(c) + ".graphs")).string(), s);
        }
        if (a.dot) {
            std::ofstream f(dir / ("maxdag" + suffix(c) + ".dot"));
            writeDot(f, out.chain.maxDag, "maxdag");
        }
        if (out.iter) {
            writeAdjacencyCsv((dir / ("space_final" + suffix(c) + ".csv")).string(),
                              spaceToGraph(out.iter->space, ctx.data().labels()));
            std::ofstream f(dir / ("itersummary" + suffix(c) + ".csv"));
            f << std::setprecision(17)
              << "step,max_score,core_edges,added_edges,iterations\n";
            for (std::size_t s = 0; s < out.iter->steps.size(); ++s) {
                const auto& st = out.iter->steps[s];
                f << (s + 1) << "," << st.maxScore << "," << st.coreEdges << ","
                  << st.addedEdges << "," << st.iterations << "\n";
            }
            GraphSample sm;
            sm.labels = ctx.data().labels();
            sm.kind = "iterative-steps";
            sm.graphs = out.iter->stepMaxDags;
            for (const auto& st : out.iter->steps) sm.scores.push_back(st.maxScore);
            writeGraphArchive((dir / ("steps" + suffix(c) + ".graphs")).string(), sm);
        }
    }

    json meta;
    meta["command"] = "learn";
    meta["n"] = ctx.n();
    meta["rows"] = ctx.data().rows();
    meta["score"] = a.score;
    meta["method"] = a.method;
    meta["mode"] = mode == ChainMode::Map ? "map" : "sample";
    meta["alpha"] = a.alpha;
    meta["am"] = a.am;
    meta["aw"] = a.aw >= 0 ? a.aw : ctx.n() + a.am + 1;
    meta["chi"] = a.chi;
    meta["edgepf"] = a.edgepf;
    meta["burnin"] = 0.2; // analysis-stage default, recorded for reproducibility
    meta["plus1"] = plus1;
    meta["hardlimit"] = hardlimit;
    meta["iterations"] = outputs[0].chain.info.iterations;
    meta["stepsave"] = outputs[0].chain.info.stepsave;
    meta["saved_states"] =
        outputs[0].chain.info.stepsave > 0
            ? outputs[0].chain.info.iterations / outputs[0].chain.info.stepsave + 1
            : 1;
    meta["nonroot_nodes"] = m;
    meta["seed"] = a.seed;
    meta["chains"] = a.chains;
    {
        json cs = json::array();
        for (const auto& o : outputs) cs.push_back(o.seed);
        meta["chain_seeds"] = cs;
    }
    if (outputs[0].iter) {
        meta["expansion_steps"] = outputs[0].iter->steps.size();
        meta["expansion_iterations"] = outputs[0].iter->steps[0].iterations;
    }
    {
        json bg = json::array();
        for (int b : ctx.bgnodes()) bg.push_back(ctx.data().labels()[b]);
        meta["bgnodes"] = bg;
    }
    if (!space.warnings.empty()) meta["space_warnings"] = space.warnings.size();
    meta["elapsed_ms"] = ms;
    std::ofstream f(fs::path(a.outDir) / "run_meta.json");
    f << meta.dump(2) << "\n";
    return 0;
}

// ---- analyze ----

GraphSample loadSample(const std::string& path) {
    auto s = readGraphArchive(path);
    if (s.graphs.empty()) throw DataError("sample archive is empty: " + path);
    return s;
}

int runEdgep(const std::string& samplePath, bool pdag, double burnin, const std::string& out) {
    auto s = loadSample(samplePath);
    auto post = edgePosterior(s.graphs, pdag, burnin);
    writeMatrixCsv(out, s.labels, post);
    return 0;
}

int runModelp(const std::string& samplePath, std::vector<double> ps, bool pdag, double burnin,
              const std::string& outDir) {
    auto s = loadSample(samplePath);
    auto post = edgePosterior(s.graphs, pdag, burnin);
    const int n = static_cast<int>(s.labels.size());
    fs::create_directories(outDir);
    for (double p : ps) {
        Dag g = consensusModel(post, n, p, s.labels);
        std::ostringstream name;
        name << "consensus_p" << p << ".csv";
        writeAdjacencyCsv((fs::path(outDir) / name.str()).string(), g);
    }
    return 0;
}

int runTraceAnalysis(const std::string& samplePath, double cutoff, bool pdag,
                     const std::string& out) {
    auto s = loadSample(samplePath);
    auto traces = edgePosteriorTrace(s.graphs, cutoff, pdag);
    std::ofstream f(out);
    if (!f) throw DataError("cannot open " + out);
    f << std::setprecision(17) << "from,to,index,posterior\n";
    for (const auto& t : traces)
        for (std::size_t k = 0; k < t.series.size(); ++k)
            f << s.labels[t.from] << "," << s.labels[t.to] << "," << k << "," << t.series[k]
              << "\n";
    return 0;
}

int runConcord(const std::string& pathA, const std::string& pathB, double highlight, bool pdag,
               double burnin, const std::string& out) {
    auto sa = loadSample(pathA);
    auto sb = loadSample(pathB);
    if (sa.labels != sb.labels) throw DataError("sample archives cover different node sets");
    auto pa = edgePosterior(sa.graphs, pdag, burnin);
    auto pb = edgePosterior(sb.graphs, pdag, burnin);
    auto c = concordance(pa, pb, static_cast<int>(sa.labels.size()), highlight);
    std::ofstream f(out);
    if (!f) throw DataError("cannot open " + out);
    f << std::setprecision(17) << "from,to,pa,pb,flag\n";
    for (const auto& pr : c.pairs)
        f << sa.labels[pr.from] << "," << sa.labels[pr.to] << "," << pr.pA << "," << pr.pB << ","
          << (pr.flagged ? 1 : 0) << "\n";
    std::cout << "flagged " << c.flaggedCount << " edges, max discrepancy " << c.maxDiscrepancy
              << "\n";
    return c.flaggedCount > 0 ? 4 : 0; // nonzero: chains disagree
}

void writeMetricsHeader(std::ofstream& f) { f << "TP,FP,FN,TPR,FPR,FPRn,FDR,SHD"; }

void writeMetricsRow(std::ofstream& f, const DagMetrics& m) {
    f << m.tp << "," << m.fp << "," << m.fn << "," << m.tpr << "," << m.fpr << "," << m.fprn
      << "," << m.fdr << "," << m.shd;
}

int runItercomp(const std::string& stepsPath, const std::string& truthPath, bool cpdag,
                const std::string& out) {
    auto s = loadSample(stepsPath);
    Dag truth = readAdjacencyCsv(truthPath);
    if (truth.labels() != s.labels) throw DataError("step archive and truth differ in node sets");
    std::ofstream f(out);
    if (!f) throw DataError("cannot open " + out);
    f << std::setprecision(17) << "step,score,";
    writeMetricsHeader(f);
    f << "\n";
    for (std::size_t k = 0; k < s.graphs.size(); ++k) {
        f << (k + 1) << "," << s.scores[k] << ",";
        writeMetricsRow(f, compareDAGs(s.graphs[k], truth, cpdag));
        f << "\n";
    }
    return 0;
}

int runSamplecomp(const std::string& samplePath, const std::string& truthPath,
                  std::vector<double> ps, bool pdag, double burnin, const std::string& out) {
    auto s = loadSample(samplePath);
    Dag truth = readAdjacencyCsv(truthPath);
    if (truth.labels() != s.labels) throw DataError("sample and truth differ in node sets");
    auto rows = samplecomp(s.graphs, truth, ps, pdag, burnin);
    std::ofstream f(out);
    if (!f) throw DataError("cannot open " + out);
    f << std::setprecision(17);
    writeMetricsHeader(f);
    f << ",p\n";
    for (const auto& r : rows) {
        writeMetricsRow(f, r.metrics);
        f << "," << r.p << "\n";
    }
    return 0;
}

// ---- simulate ----

struct SimulateArgs {
    int nodes = 10;
    double avgParents = 1.5;
    std::string model = "gaussian";
    int arity = 3;
    int rows = 100;
    std::uint64_t seed = 0;
    std::string outDir;
    int dbnDynamic = 0, dbnStatic = 0, dbnSlices = 2;
};

int runSimulate(const SimulateArgs& a) {
    SimOptions opt;
    if (a.model == "gaussian") opt.model = SimModel::LinearGaussian;
    else if (a.model == "binary") { opt.model = SimModel::CategoricalCpt; opt.arity = 2; }
    else if (a.model == "categorical") { opt.model = SimModel::CategoricalCpt; opt.arity = a.arity; }
    else throw UsageError("unknown model '" + a.model + "'");
    auto rng = makeRng(a.seed, 0);
    fs::create_directories(a.outDir);
    if (a.dbnDynamic > 0) {
        if (opt.model != SimModel::LinearGaussian)
            throw UsageError("DBN simulation supports only the gaussian model");
        const int b = a.dbnStatic, n = a.dbnDynamic;
        DbnStructure st;
        st.nStatic = b;
        st.nDynamic = n;
        // in-slice structure shared by G0 and the transition
        Dag inSlice = sampleDag(n, a.avgParents, rng);
        st.initial = Dag(b + n);
        st.transition = Dag(b + 2 * n);
        std::vector<std::string> initLabels, transLabels;
        for (int s = 0; s < b; ++s) initLabels.push_back("s" + std::to_string(s + 1));
        for (int i = 0; i < n; ++i) initLabels.push_back("x" + std::to_string(i + 1));
        transLabels = initLabels;
        for (int i = 0; i < n; ++i) transLabels.push_back("x" + std::to_string(i + 1) + ".1");
        st.initial.setLabels(initLabels);
        st.transition.setLabels(transLabels);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (inSlice.edge(i, j)) {
                    st.initial.setEdge(b + i, b + j);
                    st.transition.setEdge(b + n + i, b + n + j);
                }
        for (int i = 0; i < n; ++i) st.transition.setEdge(b + i, b + n + i); // self-lag
        for (int s = 0; s < b; ++s)
            for (int j = 0; j < n; ++j)
                if (unif(rng) < 0.3) {
                    st.transition.setEdge(s, b + n + j);
                    st.initial.setEdge(s, b + j);
                }
        auto data = simulateDbn(st, a.dbnSlices, opt, a.rows, rng);
        writeAdjacencyCsv((fs::path(a.outDir) / "truth_initial.csv").string(), st.initial);
        writeAdjacencyCsv((fs::path(a.outDir) / "truth_transition.csv").string(), st.transition);
        writeDatasetCsv((fs::path(a.outDir) / "data.csv").string(), data);
    } else {
        Dag truth = sampleDag(a.nodes, a.avgParents, rng);
        auto data = simulateData(truth, opt, a.rows, rng);
        writeAdjacencyCsv((fs::path(a.outDir) / "truth.csv").string(), truth);
        writeDatasetCsv((fs::path(a.outDir) / "data.csv").string(), data);
    }
    json meta;
    meta["command"] = "simulate";
    meta["seed"] = a.seed;
    meta["rows"] = a.rows;
    meta["model"] = a.model;
    std::ofstream f(fs::path(a.outDir) / "run_meta.json");
    f << meta.dump(2) << "\n";
    return 0;
}

// ---- penalty-from-interactions ----

int runPenalty(const std::string& interactionsPath, double factor, const std::string& labelsArg,
               const std::string& dataPath, const std::string& out) {
    if (factor < 1) throw UsageError("--factor must be at least 1");
    std::vector<std::string> labels;
    if (!labelsArg.empty()) labels = splitList(labelsArg);
    else if (!dataPath.empty()) labels = loadDataset(dataPath).labels();
    else throw UsageError("pass --labels or --data to define the node set");
    const int n = static_cast<int>(labels.size());
    std::vector<double> m(static_cast<std::size_t>(n) * n, factor);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = 1.0;
    std::ifstream f(interactionsPath);
    if (!f) throw DataError("cannot open " + interactionsPath);
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string u, v;
        if (!(ls >> u >> v)) throw DataError("malformed interaction line: " + line);
        const int i = labelIndex(labels, u), j = labelIndex(labels, v);
        m[static_cast<std::size_t>(i) * n + j] = 1.0;
        m[static_cast<std::size_t>(j) * n + i] = 1.0;
    }
    writeMatrixCsv(out, labels, m);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian-network structure learning and posterior sampling"};
    app.require_subcommand(1);

    // learn
    LearnArgs la;
    auto* learn = app.add_subcommand("learn", "learn structures from data via MCMC");
    learn->add_option("--data", la.data, "data CSV (headered)")->required();
    learn->add_option("--score", la.score, "bge | bde | bdecat");
    learn->add_option("--method", la.method, "order | partition | iterative");
    learn->add_flag("--map", la.mapMode, "search for the best-scoring DAG");
    learn->add_flag("--sample", la.sampleMode, "sample DAGs from the posterior (default)");
    learn->add_option("--iterations", la.iterations, "chain length (default by method)");
    learn->add_option("--stepsave", la.stepsave, "iterations between saved states");
    learn->add_option("--alpha", la.alpha, "skeleton significance level");
    learn->add_option("--startspace", la.startspace, "initial search space adjacency CSV");
    learn->add_option("--blacklist", la.blacklist, "forbidden edges adjacency CSV");
    learn->add_option("--bgnodes", la.bgnodes, "comma-separated root node labels");
    learn->add_option("--edgepenalty", la.edgepenalty, "edge penalty matrix CSV");
    learn->add_option("--weights", la.weights, "observation weights CSV");
    learn->add_option("--hardlimit", la.hardlimit, "max candidate parents per node");
    learn->add_flag("--plus1,!--no-plus1", la.plus1, "extend the space by one extra parent");
    learn->add_option("--seed", la.seed, "random seed");
    learn->add_option("--chains", la.chains, "independent chains to run");
    learn->add_flag("--dot", la.dot, "also write DOT output");
    learn->add_option("--am", la.am, "prior precision (bge)");
    learn->add_option("--aw", la.aw, "prior degrees of freedom (bge; default n+am+1)");
    learn->add_option("--chi", la.chi, "equivalent sample size (bde)");
    learn->add_option("--edgepf", la.edgepf, "structure prior edge penalty (bde)");
    learn->add_option("--dbn-dynamic", la.dbnDynamic, "DBN: dynamic variables per slice");
    learn->add_option("--dbn-static", la.dbnStatic, "DBN: static variables");
    learn->add_option("--dbn-slices", la.dbnSlices, "DBN: number of slices");
    learn->add_flag("--dbn-samestruct,!--dbn-separate-initial", la.dbnSamestruct,
                    "DBN: initial slice shares the transition's internal structure");
    learn->add_option("--out-dir", la.outDir, "output directory")->required();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "post-process sampled graphs");
    analyze->require_subcommand(1);
    std::string anSample, anSampleB, anTruth, anOut = "out.csv", anOutDir = ".";
    bool anPdag = false;
    bool anCpdag = true;
    double anBurnin = 0.2, anCutoff = 0.2, anHighlight = 0.3;
    std::vector<double> anPs;

    auto* edgep = analyze->add_subcommand("edgep", "edge posterior matrix");
    edgep->add_option("--sample", anSample)->required();
    edgep->add_flag("--pdag", anPdag);
    edgep->add_option("--burnin", anBurnin);
    edgep->add_option("--out", anOut)->required();

    auto* modelp = analyze->add_subcommand("modelp", "consensus models at thresholds");
    modelp->add_option("--sample", anSample)->required();
    modelp->add_option("-p,--thresholds", anPs, "posterior cutoffs")->delimiter(',');
    modelp->add_flag("--pdag", anPdag);
    modelp->add_option("--burnin", anBurnin);
    modelp->add_option("--out-dir", anOutDir)->required();

    auto* traceCmd = analyze->add_subcommand("trace", "running edge posteriors");
    traceCmd->add_option("--sample", anSample)->required();
    traceCmd->add_option("--cutoff", anCutoff);
    traceCmd->add_flag("--pdag", anPdag);
    traceCmd->add_option("--out", anOut)->required();

    auto* concord = analyze->add_subcommand("concord", "cross-run edge posterior concordance");
    concord->add_option("--sample-a", anSample)->required();
    concord->add_option("--sample-b", anSampleB)->required();
    concord->add_option("--highlight", anHighlight);
    concord->add_flag("--pdag", anPdag);
    concord->add_option("--burnin", anBurnin);
    concord->add_option("--out", anOut)->required();

    auto* itercompCmd = analyze->add_subcommand("itercomp", "per-expansion-step comparison");
    itercompCmd->add_option("--steps", anSample)->required();
    itercompCmd->add_option("--truth", anTruth)->required();
    itercompCmd->add_flag("--cpdag,!--no-cpdag", anCpdag);
    itercompCmd->add_option("--out", anOut)->required();

    auto* samplecompCmd = analyze->add_subcommand("samplecomp", "consensus-vs-truth table");
    samplecompCmd->add_option("--sample", anSample)->required();
    samplecompCmd->add_option("--truth", anTruth)->required();
    samplecompCmd->add_option("-p,--thresholds", anPs)->delimiter(',');
    bool scPdag = true;
    samplecompCmd->add_flag("--pdag,!--no-pdag", scPdag);
    samplecompCmd->add_option("--burnin", anBurnin);
    samplecompCmd->add_option("--out", anOut)->required();

    // simulate
    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "draw a random model and data from it");
    simulate->add_option("--nodes", sa.nodes);
    simulate->add_option("--avg-parents", sa.avgParents);
    simulate->add_option("--model", sa.model, "gaussian | binary | categorical");
    simulate->add_option("--arity", sa.arity);
    simulate->add_option("--rows", sa.rows);
    simulate->add_option("--seed", sa.seed);
    simulate->add_option("--dbn-dynamic", sa.dbnDynamic);
    simulate->add_option("--dbn-static", sa.dbnStatic);
    simulate->add_option("--dbn-slices", sa.dbnSlices);
    simulate->add_option("--out-dir", sa.outDir)->required();

    // penalty-from-interactions
    std::string piInteractions, piLabels, piData, piOut;
    double piFactor = 2.0;
    auto* penalty = app.add_subcommand("penalty-from-interactions",
                                       "edge penalty matrix from known interactions");
    penalty->add_option("--interactions", piInteractions, "TSV of node-name pairs")->required();
    penalty->add_option("--factor", piFactor, "penalty for unlisted pairs");
    penalty->add_option("--labels", piLabels, "comma-separated node labels");
    penalty->add_option("--data", piData, "data CSV to take labels from");
    penalty->add_option("--out", piOut)->required();

    try {
        app.parse(argc, argv);
        if (*learn) return runLearn(la);
        if (*edgep) return runEdgep(anSample, anPdag, anBurnin, anOut);
        if (*modelp)
            return runModelp(anSample, anPs.empty() ? std::vector<double>{0.5} : anPs, anPdag,
                             anBurnin, anOutDir);
        if (*traceCmd) return runTraceAnalysis(anSample, anCutoff, anPdag, anOut);
        if (*concord)
            return runConcord(anSample, anSampleB, anHighlight, anPdag, anBurnin, anOut);
        if (*itercompCmd) return runItercomp(anSample, anTruth, anCpdag, anOut);
        if (*samplecompCmd)
            return runSamplecomp(anSample, anTruth,
                                 anPs.empty() ? std::vector<double>{0.5, 0.7, 0.9, 0.95} : anPs,
                                 scPdag, anBurnin, anOut);
        if (*simulate) return runSimulate(sa);
        if (*penalty) return runPenalty(piInteractions, piFactor, piLabels, piData, piOut);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const ScoreError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
