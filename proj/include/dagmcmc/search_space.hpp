#ifndef DAGMCMC_SEARCH_SPACE_HPP
#define DAGMCMC_SEARCH_SPACE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "dagmcmc/graph.hpp"
#include "dagmcmc/score.hpp"

namespace dagmcmc {

inline int defaultHardlimit(bool plus1) { return plus1 ? 14 : 20; }

/// Core search space H: entry (i,j) = 1 permits i as a parent of j.
/// Possibly symmetric. Blacklisted entries are absent from the core and
/// excluded from plus-one layers; bgnode columns are always empty.
struct SearchSpace {
    int n = 0;
    std::vector<std::uint8_t> core;      // row-major n x n
    std::vector<std::uint8_t> blacklist; // row-major n x n
    int hardlimit = 14;
    std::vector<std::string> warnings;

    bool inCore(int i, int j) const { return core[static_cast<std::size_t>(i) * n + j] != 0; }
    bool banned(int i, int j) const { return blacklist[static_cast<std::size_t>(i) * n + j] != 0; }
    void setCore(int i, int j, bool v) { core[static_cast<std::size_t>(i) * n + j] = v ? 1 : 0; }

    std::vector<int> candidates(int j) const {
        std::vector<int> c;
        for (int i = 0; i < n; ++i)
            if (i != j && inCore(i, j)) c.push_back(i);
        return c;
    }
    int edgeCount() const {
        return static_cast<int>(std::count(core.begin(), core.end(), std::uint8_t(1)));
    }

    /// Drop blacklisted entries, clear bgnode columns and the diagonal, then
    /// clamp each column to hardlimit keeping lowest-index parents.
    void normalize(const ScoreContext& ctx) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i == j || banned(i, j) || ctx.isBg(j)) setCore(i, j, false);
        for (int j = 0; j < n; ++j) {
            int kept = 0;
            for (int i = 0; i < n; ++i) {
                if (!inCore(i, j)) continue;
                if (kept == hardlimit) {
                    setCore(i, j, false);
                    warnings.push_back("hardlimit: dropped candidate parent " +
                                       std::to_string(i) + " of node " + std::to_string(j));
                } else {
                    ++kept;
                }
            }
        }
    }
};

namespace detail {

// Weighted correlation matrix; effective sample size = sum of weights.
inline Eigen::MatrixXd weightedCorrelation(const ScoreContext& ctx) {
    const Eigen::MatrixXd& s = ctx.scatter();
    const int n = ctx.n();
    Eigen::MatrixXd corr(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double d = std::sqrt(s(i, i) * s(j, j));
            corr(i, j) = (d > 0) ? s(i, j) / d : (i == j ? 1.0 : 0.0);
        }
    return corr;
}

/// Partial correlation of x,y given set via the precision of the submatrix.
inline double partialCorrelation(const Eigen::MatrixXd& corr, int x, int y,
                                 const std::vector<int>& cond) {
    const int m = 2 + static_cast<int>(cond.size());
    std::vector<int> idx{x, y};
    idx.insert(idx.end(), cond.begin(), cond.end());
    Eigen::MatrixXd sub(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) sub(a, b) = corr(idx[a], idx[b]);
    Eigen::MatrixXd prec = sub.completeOrthogonalDecomposition().pseudoInverse();
    double d = std::sqrt(prec(0, 0) * prec(1, 1));
    if (d == 0) return 0.0;
    double r = -prec(0, 1) / d;
    return std::clamp(r, -1.0, 1.0);
}

struct CiTester {
    const ScoreContext& ctx;
    Eigen::MatrixXd corr;          // continuous only
    bool continuous;
    std::vector<std::string>* warn;

    explicit CiTester(const ScoreContext& c, std::vector<std::string>* w)
        : ctx(c), continuous(c.data().allKind(ColumnKind::Continuous)), warn(w) {
        if (continuous) corr = weightedCorrelation(c);
        else {
            for (int j = 0; j < c.n(); ++j)
                if (c.data().kind(j) == ColumnKind::Continuous)
                    throw ScoreError("pcSkeleton: mixed data kinds unsupported");
        }
    }

    /// p-value of the conditional-independence test of x,y given cond.
    double pValue(int x, int y, const std::vector<int>& cond) const {
        return continuous ? fisherZ(x, y, cond) : gSquared(x, y, cond);
    }

    double fisherZ(int x, int y, const std::vector<int>& cond) const {
        const double nEff = ctx.weightTotal();
        const double dof = nEff - static_cast<double>(cond.size()) - 3.0;
        if (dof <= 0) {
            warn->push_back("fisher-z: insufficient effective sample for |S|=" +
                            std::to_string(cond.size()) + "; treated as non-significant");
            return 1.0;
        }
        double r = partialCorrelation(corr, x, y, cond);
        r = std::clamp(r, -1.0 + 1e-15, 1.0 - 1e-15);
        const double z = std::sqrt(dof) * 0.5 * std::log((1 + r) / (1 - r));
        boost::math::normal norm;
        return 2.0 * boost::math::cdf(boost::math::complement(norm, std::abs(z)));
    }

    double gSquared(int x, int y, const std::vector<int>& cond) const {
        const auto& d = ctx.data();
        const int rx = d.arity(x), ry = d.arity(y);
        double qz = 1;
        for (int c : cond) qz *= d.arity(c);
        const double df = (rx - 1.0) * (ry - 1.0) * qz;
        if (df <= 0 || ctx.weightTotal() <= df) {
            warn->push_back("g2: insufficient sample for df=" + std::to_string(df) +
                            "; treated as non-significant");
            return 1.0;
        }
        // weighted counts n_xyz indexed by (z-config, x, y)
        std::map<long long, std::vector<double>> cells;
        for (int row = 0; row < d.rows(); ++row) {
            const double w = ctx.weights()[row];
            if (w == 0) continue;
            long long zi = 0;
            for (int c : cond) zi = zi * d.arity(c) + static_cast<long long>(d(row, c));
            auto& cell = cells[zi];
            if (cell.empty()) cell.assign(static_cast<std::size_t>(rx) * ry, 0.0);
            cell[static_cast<std::size_t>(d(row, x)) * ry + static_cast<std::size_t>(d(row, y))] += w;
        }
        double g2 = 0;
        for (const auto& [zi, cell] : cells) {
            std::vector<double> nx(rx, 0), ny(ry, 0);
            double nz = 0;
            for (int a = 0; a < rx; ++a)
                for (int b = 0; b < ry; ++b) {
                    nx[a] += cell[static_cast<std::size_t>(a) * ry + b];
                    ny[b] += cell[static_cast<std::size_t>(a) * ry + b];
                    nz += cell[static_cast<std::size_t>(a) * ry + b];
                }
            for (int a = 0; a < rx; ++a)
                for (int b = 0; b < ry; ++b) {
                    const double obs = cell[static_cast<std::size_t>(a) * ry + b];
                    if (obs <= 0) continue; // zero-count cells contribute 0
                    const double expft = nx[a] * ny[b] / nz;
                    g2 += 2.0 * obs * std::log(obs / expft);
                }
        }
        g2 = std::max(0.0, g2);
        boost::math::chi_squared chi2(df);
        return boost::math::cdf(boost::math::complement(chi2, g2));
    }
};

} // namespace detail

/// PC-stable skeleton: edges removed level by level (conditioning-set size
/// 0,1,2,...,lmax) with Fisher-z tests for continuous data and G2 tests for
/// discrete data. Adjacency sets are frozen per level, so the result does
/// not depend on node or edge enumeration order.
inline SearchSpace pcSkeleton(const ScoreContext& ctx, double alpha = 0.05, int lmax = 3,
                              int hardlimit = 14) {
    if (alpha <= 0 || alpha >= 1) throw ScoreError("pcSkeleton: alpha must be in (0,1)");
    const int n = ctx.n();
    SearchSpace sp;
    sp.n = n;
    sp.hardlimit = hardlimit;
    sp.core.assign(static_cast<std::size_t>(n) * n, 0);
    sp.blacklist.assign(static_cast<std::size_t>(n) * n, 0);
    if (n <= 1) return sp;

    detail::CiTester tester(ctx, &sp.warnings);

    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 1));
    for (int i = 0; i < n; ++i) adj[i][i] = 0;

    const int maxL = std::min(lmax, hardlimit);
    for (int l = 0; l <= maxL; ++l) {
        // freeze neighborhoods at level start (stable variant)
        auto frozen = adj;
        auto neighborsOf = [&](int v, int skip) {
            std::vector<int> nb;
            for (int u = 0; u < n; ++u)
                if (u != skip && frozen[v][u]) nb.push_back(u);
            return nb;
        };
        bool anyTestable = false;
        for (int x = 0; x < n; ++x) {
            for (int y = x + 1; y < n; ++y) {
                if (!adj[x][y]) continue;
                bool removed = false;
                for (int side = 0; side < (l == 0 ? 1 : 2) && !removed; ++side) {
                    const int a = side == 0 ? x : y;
                    const int b = side == 0 ? y : x;
                    auto nb = neighborsOf(a, b);
                    if (static_cast<int>(nb.size()) < l) continue;
                    anyTestable = true;
                    // enumerate all size-l subsets of nb
                    std::vector<int> pick(l);
                    std::function<bool(int, int)> rec = [&](int start, int depth) -> bool {
                        if (depth == l) {
                            std::vector<int> cond;
                            for (int k = 0; k < l; ++k) cond.push_back(nb[pick[k]]);
                            if (tester.pValue(a, b, cond) > alpha) return true;
                            return false;
                        }
                        for (int t = start; t <= static_cast<int>(nb.size()) - (l - depth); ++t) {
                            pick[depth] = t;
                            if (rec(t + 1, depth + 1)) return true;
                        }
                        return false;
                    };
                    if (rec(0, 0)) removed = true;
                }
                if (removed) adj[x][y] = adj[y][x] = 0;
            }
        }
        if (!anyTestable) break;
    }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (adj[i][j]) sp.setCore(i, j, true);
    sp.normalize(ctx);
    return sp;
}

/// Search space from a user adjacency matrix (symmetric entries allowed)
/// with an optional blacklist.
inline SearchSpace fromAdjacency(const std::vector<std::uint8_t>& matrix,
                                 const std::vector<std::uint8_t>& blacklist,
                                 const ScoreContext& ctx, int hardlimit = 14) {
    const int n = ctx.n();
    if (static_cast<int>(matrix.size()) != n * n)
        throw ScoreError("fromAdjacency: matrix must be n x n");
    SearchSpace sp;
    sp.n = n;
    sp.hardlimit = hardlimit;
    sp.core = matrix;
    if (blacklist.empty()) sp.blacklist.assign(static_cast<std::size_t>(n) * n, 0);
    else if (static_cast<int>(blacklist.size()) == n * n) sp.blacklist = blacklist;
    else throw ScoreError("fromAdjacency: blacklist must be n x n");
    sp.normalize(ctx);
    return sp;
}

enum class MergeMode { Dag, Cpdag, Skeleton };

/// Union of the core with g (or its CPDAG / skeleton). Edges beyond a
/// node's hardlimit are skipped and reported via `saturated`.
inline SearchSpace mergeSpace(const SearchSpace& space, const Dag& g, MergeMode mode,
                              const ScoreContext& ctx, std::vector<int>* saturated = nullptr) {
    if (g.n() != space.n) throw ScoreError("mergeSpace: node count mismatch");
    SearchSpace out = space;
    Dag add = g;
    if (mode == MergeMode::Cpdag) add = dagToCpdag(g).g;
    if (mode == MergeMode::Skeleton) {
        add = Dag(g.n(), g.labels());
        for (int i = 0; i < g.n(); ++i)
            for (int j = 0; j < g.n(); ++j)
                if (g.edge(i, j)) { add.setEdge(i, j); add.setEdge(j, i); }
    }
    std::vector<int> colCount(out.n, 0);
    for (int j = 0; j < out.n; ++j)
        for (int i = 0; i < out.n; ++i) colCount[j] += out.inCore(i, j);
    for (int j = 0; j < out.n; ++j) {
        if (ctx.isBg(j)) continue;
        bool hitLimit = false;
        for (int i = 0; i < out.n; ++i) {
            if (i == j || !add.edge(i, j) || out.inCore(i, j) || out.banned(i, j)) continue;
            if (colCount[j] >= out.hardlimit) {
                hitLimit = true;
                continue;
            }
            out.setCore(i, j, true);
            ++colCount[j];
        }
        if (hitLimit && saturated) saturated->push_back(j);
    }
    return out;
}

} // namespace dagmcmc

#endif
