#ifndef DAGMCMC_ORDER_MCMC_HPP
#define DAGMCMC_ORDER_MCMC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dagmcmc/graph.hpp"
#include "dagmcmc/rng.hpp"
#include "dagmcmc/score_tables.hpp"

namespace dagmcmc {

enum class ChainMode { Map, Sample };

struct MoveProbs {
    double localSwap = 0.45;
    double globalSwap = 0.45;
    double relocation = 0.10;
};

struct ChainConfig {
    ChainMode mode = ChainMode::Map;
    long long iterations = -1; // -1: resolve default 6 n^2 ln n
    long long stepsave = -1;   // -1: resolve so that 1001 states are saved
    MoveProbs movePrbs;
    std::optional<NodeOrder> startOrder;
    std::uint64_t seed = 0;
    bool chainout = true; // store sampled DAGs
};

struct ChainInfo {
    std::string kind;
    ChainMode mode = ChainMode::Map;
    long long iterations = 0;
    long long stepsave = 0;
    int spaceEdges = 0;
    bool plus1 = false;
};

struct ChainResult {
    std::vector<double> trace;  // log-scores of saved states
    std::vector<Dag> sampledDags;
    std::vector<double> sampledScores; // totalScore of each saved DAG
    Dag maxDag;
    double maxScore = -std::numeric_limits<double>::infinity();
    ChainInfo info;
};

/// Default chain lengths: coeff * n^2 ln n, rounded to a stepsave multiple.
/// When stepsave is also defaulted it is chosen as round(raw / 1000) so the
/// trace holds exactly 1001 states (initial state plus 1000 save points).
inline long long resolveIterations(double coeff, int n, long long stepsaveIn,
                                   long long* stepsaveOut, int saves = 1000) {
    const double raw = coeff * static_cast<double>(n) * n * std::log(std::max(2, n));
    long long stepsave = stepsaveIn;
    long long iters;
    if (stepsave <= 0) {
        stepsave = std::max<long long>(1, std::llround(raw / saves));
        iters = stepsave * saves;
    } else {
        iters = std::max<long long>(stepsave, std::llround(raw / stepsave) * stepsave);
    }
    if (stepsaveOut) *stepsaveOut = stepsave;
    return iters;
}

namespace detail {

/// Incrementally rescored order state. allowed(position q) = nodes at
/// positions > q, plus the root nodes.
class OrderState {
public:
    OrderState(const ScoreTableSet& ts, ChainMode mode, std::vector<int> perm)
        : ts_(ts), mode_(mode), perm_(std::move(perm)) {
        allowed_.assign(ts_.n, 0);
        for (int b : ts_.bgnodes) allowed_[b] = 1;
        terms_.assign(ts_.n, 0.0);
        rescoreRange(0, static_cast<int>(perm_.size()) - 1);
    }

    const std::vector<int>& perm() const { return perm_; }
    int size() const { return static_cast<int>(perm_.size()); }

    double score() const {
        double s = 0;
        for (int q = 0; q < size(); ++q) s += terms_[q];
        return s;
    }

    double term(int pos) const { return terms_[pos]; }

    /// node term at position q, given allowed_ holds exactly the nodes at
    /// positions > q plus bgnodes
    double evalTerm(int q) const {
        return mode_ == ChainMode::Sample ? restrictedSum(ts_, perm_[q], allowed_)
                                          : restrictedMax(ts_, perm_[q], allowed_).logScore;
    }

    /// recompute terms for positions lo..hi (inclusive)
    void rescoreRange(int lo, int hi) {
        // build allowed = nodes after hi
        std::fill(allowed_.begin(), allowed_.end(), 0);
        for (int b : ts_.bgnodes) allowed_[b] = 1;
        for (int q = hi + 1; q < size(); ++q) allowed_[perm_[q]] = 1;
        for (int q = hi; q >= lo; --q) {
            terms_[q] = evalTerm(q);
            allowed_[perm_[q]] = 1;
        }
    }

    void swapPositions(int a, int b) {
        std::swap(perm_[a], perm_[b]);
        rescoreRange(std::min(a, b), std::max(a, b));
    }

    void setPerm(std::vector<int> p) {
        perm_ = std::move(p);
        rescoreRange(0, size() - 1);
    }

    /// per-node allowed set for the node at position q (for DAG extraction)
    std::vector<char> allowedAt(int q) const {
        std::vector<char> a(ts_.n, 0);
        for (int b : ts_.bgnodes) a[b] = 1;
        for (int r = q + 1; r < size(); ++r) a[perm_[r]] = 1;
        return a;
    }

private:
    const ScoreTableSet& ts_;
    ChainMode mode_;
    std::vector<int> perm_;
    std::vector<double> terms_;
    std::vector<char> allowed_; // scratch
};

inline Dag extractDag(const ScoreTableSet& ts, const OrderState& st, ChainMode mode,
                      std::mt19937_64& rng, const std::vector<std::string>& labels) {
    Dag g(ts.n, labels);
    for (int q = 0; q < st.size(); ++q) {
        const int node = st.perm()[q];
        auto allowed = st.allowedAt(q);
        std::vector<int> pa = (mode == ChainMode::Sample)
                                  ? sampleParentSet(ts, node, allowed, rng)
                                  : restrictedMax(ts, node, allowed).parents;
        for (int p : pa) g.setEdge(p, node);
    }
    return g;
}

} // namespace detail

/// Order score (Eq. sum or max form): sum over nodes of the restricted
/// sum/max with allowed set = nodes later in the order plus root nodes.
inline double orderScore(const ScoreTableSet& ts, const NodeOrder& o, ChainMode mode) {
    detail::OrderState st(ts, mode, o.perm);
    return st.score();
}

/// Order MCMC chain: adjacent/global swaps accepted with the Metropolis
/// ratio, node relocation scored at all placements and Gibbs-sampled.
inline ChainResult runOrderChain(const ScoreTableSet& ts, const ScoreContext& ctx,
                                 ChainConfig cfg) {
    const int n = ts.n;
    std::vector<int> nonBg;
    for (int v = 0; v < n; ++v)
        if (!ts.isBg[v]) nonBg.push_back(v);
    const int m = static_cast<int>(nonBg.size());

    long long stepsave = cfg.stepsave;
    long long iterations = cfg.iterations;
    if (iterations < 0) {
        iterations = resolveIterations(6.0, m, cfg.stepsave, &stepsave);
    } else if (stepsave <= 0) {
        stepsave = std::max<long long>(1, iterations / 1000);
    }

    auto rng = makeRng(cfg.seed, 0);
    std::vector<int> perm = nonBg;
    if (cfg.startOrder) {
        perm = cfg.startOrder->perm;
        if (static_cast<int>(perm.size()) != m)
            throw ScoreError("runOrderChain: start order does not cover non-root nodes");
    } else {
        std::shuffle(perm.begin(), perm.end(), rng);
    }

    detail::OrderState st(ts, cfg.mode, perm);
    double cur = st.score();

    ChainResult res;
    res.info = ChainInfo{"order", cfg.mode, iterations, stepsave, 0, ts.plus1};
    res.maxDag = Dag(n, ctx.data().labels());

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto savePoint = [&]() {
        res.trace.push_back(cur);
        Dag g = detail::extractDag(ts, st, cfg.mode, rng, ctx.data().labels());
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

    const double pLocal = cfg.movePrbs.localSwap;
    const double pGlobal = pLocal + cfg.movePrbs.globalSwap;
    for (long long it = 1; it <= iterations; ++it) {
        const double u = unif(rng);
        if (m >= 2 && u < pGlobal) {
            int a, b;
            if (u < pLocal) {
                a = std::uniform_int_distribution<int>(0, m - 2)(rng);
                b = a + 1;
            } else {
                a = std::uniform_int_distribution<int>(0, m - 1)(rng);
                b = std::uniform_int_distribution<int>(0, m - 2)(rng);
                if (b >= a) ++b;
                if (a > b) std::swap(a, b);
            }
            st.swapPositions(a, b);
            const double prop = st.score();
            if (std::log(unif(rng)) < prop - cur) {
                cur = prop;
            } else {
                st.swapPositions(a, b); // revert
            }
        } else if (m >= 2) {
            // node relocation: score all m placements, sample one
            const int pos = std::uniform_int_distribution<int>(0, m - 1)(rng);
            const int node = st.perm()[pos];
            std::vector<int> rest;
            rest.reserve(m - 1);
            for (int q = 0; q < m; ++q)
                if (q != pos) rest.push_back(st.perm()[q]);
            std::vector<double> scores(m);
            detail::LogSum z;
            for (int q = 0; q < m; ++q) {
                std::vector<int> cand = rest;
                cand.insert(cand.begin() + q, node);
                detail::OrderState tmp(ts, cfg.mode, cand);
                scores[q] = tmp.score();
                z.add(scores[q]);
            }
            const double total = z.value();
            const double target = unif(rng);
            double acc = 0;
            int chosen = m - 1;
            for (int q = 0; q < m; ++q) {
                acc += std::exp(scores[q] - total);
                if (acc >= target) {
                    chosen = q;
                    break;
                }
            }
            std::vector<int> next = rest;
            next.insert(next.begin() + chosen, node);
            st.setPerm(std::move(next));
            cur = scores[chosen];
        }
        if (it % stepsave == 0) savePoint();
    }
    return res;
}

} // namespace dagmcmc

#endif
