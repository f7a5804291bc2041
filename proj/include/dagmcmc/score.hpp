#ifndef DAGMCMC_SCORE_HPP
#define DAGMCMC_SCORE_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dagmcmc/data.hpp"
#include "dagmcmc/graph.hpp"

namespace dagmcmc {

enum class ScoreType { Bge, Bde, BdeCat };

struct ScoreError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BgeParams {
    double am = 1.0;
    std::optional<double> aw; // resolved to n + am + 1 when unset
};

struct BdeParams {
    double chi = 0.5;
    double edgepf = 2.0;
};

/// First-order DBN data layout: width must equal nStatic + nDynamic * slices.
struct DbnLayout {
    int nStatic = 0;
    int nDynamic = 1;
    int slices = 2;
    bool samestruct = true;
};

struct ScoreConfig {
    ScoreType scoreType = ScoreType::Bge;
    BgeParams bge;
    BdeParams bde;
    std::optional<std::vector<double>> weights;
    std::vector<int> bgnodes;
    std::optional<std::vector<double>> edgePenalty; // n x n row-major, entries >= 1
    std::optional<DbnLayout> dbn;
};

/// Immutable scoring context: dataset, score configuration, and the
/// sufficient statistics shared by every local-score evaluation.
class ScoreContext {
public:
    ScoreContext(Dataset data, ScoreConfig cfg) : data_(std::move(data)), cfg_(std::move(cfg)) {
        const int n = data_.cols();
        const int N = data_.rows();
        switch (cfg_.scoreType) {
            case ScoreType::Bge:
                if (!data_.allKind(ColumnKind::Continuous))
                    throw ScoreError("bge requires continuous data");
                break;
            case ScoreType::Bde:
                if (!data_.allKind(ColumnKind::Binary))
                    throw ScoreError("bde requires binary data");
                break;
            case ScoreType::BdeCat:
                for (int j = 0; j < n; ++j)
                    if (data_.kind(j) == ColumnKind::Continuous)
                        throw ScoreError("bdecat requires discrete data");
                break;
        }
        if (cfg_.bge.am <= 0) throw ScoreError("bge: am must be > 0");
        if (!cfg_.bge.aw) cfg_.bge.aw = n + cfg_.bge.am + 1;
        if (*cfg_.bge.aw <= n + 1) throw ScoreError("bge: aw must exceed n + 1");
        if (cfg_.bde.chi <= 0) throw ScoreError("bde: chi must be > 0");
        if (cfg_.bde.edgepf < 1) throw ScoreError("bde: edgepf must be >= 1");

        weights_.assign(N, 1.0);
        if (cfg_.weights) {
            if (static_cast<int>(cfg_.weights->size()) != N)
                throw ScoreError("weights length does not match row count");
            double total = 0;
            for (double w : *cfg_.weights) {
                if (w < 0) throw ScoreError("weights must be nonnegative");
                total += w;
            }
            if (N > 0 && total == 0) throw ScoreError("weights must not be all zero");
            weights_ = *cfg_.weights;
        }

        isBg_.assign(n, 0);
        for (int b : cfg_.bgnodes) {
            if (b < 0 || b >= n) throw ScoreError("bgnodes index out of range");
            isBg_[b] = 1;
        }

        if (cfg_.edgePenalty) {
            if (static_cast<int>(cfg_.edgePenalty->size()) != n * n)
                throw ScoreError("edgePenalty must be n x n");
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j && (*cfg_.edgePenalty)[static_cast<std::size_t>(i) * n + j] < 1)
                        throw ScoreError("edgePenalty entries must be >= 1");
        }

        nTilde_ = 0;
        for (double w : weights_) nTilde_ += w;

        if (cfg_.scoreType == ScoreType::Bge) buildGaussianStats();
    }

    const Dataset& data() const { return data_; }
    int n() const { return data_.cols(); }
    int rows() const { return data_.rows(); }
    ScoreType scoreType() const { return cfg_.scoreType; }
    const BgeParams& bgePar() const { return cfg_.bge; }
    const BdeParams& bdePar() const { return cfg_.bde; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<int>& bgnodes() const { return cfg_.bgnodes; }
    bool isBg(int v) const { return isBg_[v] != 0; }
    const std::optional<DbnLayout>& dbn() const { return cfg_.dbn; }
    double weightTotal() const { return nTilde_; }

    double edgePenaltyLog(int from, int to) const {
        if (!cfg_.edgePenalty) return 0.0;
        return std::log((*cfg_.edgePenalty)[static_cast<std::size_t>(from) * n() + to]);
    }

    // BGe sufficient statistics
    const Eigen::MatrixXd& scatter() const { return scatter_; }
    double priorScale() const { return t0Scale_; }

private:
    void buildGaussianStats() {
        const int n = data_.cols();
        const int N = data_.rows();
        const double am = cfg_.bge.am;
        const double aw = *cfg_.bge.aw;
        t0Scale_ = am * (aw - n - 1) / (am + 1);
        mean_ = Eigen::VectorXd::Zero(n);
        scatter_ = Eigen::MatrixXd::Zero(n, n);
        if (nTilde_ > 0) {
            for (int r = 0; r < N; ++r)
                for (int j = 0; j < n; ++j) mean_(j) += weights_[r] * data_(r, j);
            mean_ /= nTilde_;
            Eigen::VectorXd x(n);
            for (int r = 0; r < N; ++r) {
                if (weights_[r] == 0) continue;
                for (int j = 0; j < n; ++j) x(j) = data_(r, j) - mean_(j);
                scatter_.noalias() += weights_[r] * x * x.transpose();
            }
        }
        int effectiveRows = 0;
        for (double w : weights_)
            if (w > 0) ++effectiveRows;
        if (effectiveRows >= 2) {
            for (int j = 0; j < n; ++j)
                if (scatter_(j, j) < 1e-12 * (1.0 + mean_(j) * mean_(j)))
                    throw ScoreError("degenerate data: zero-variance column " + data_.labels()[j]);
        }
    }

    Dataset data_;
    ScoreConfig cfg_;
    std::vector<double> weights_;
    std::vector<char> isBg_;
    double nTilde_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd scatter_;
    double t0Scale_ = 1.0;
};

inline ScoreContext buildScoreContext(Dataset data, ScoreConfig cfg) {
    return ScoreContext(std::move(data), std::move(cfg));
}

namespace detail {

/// log marginal likelihood of the columns in `set` under the
/// Gaussian-inverse-Wishart prior (data centered at the weighted mean, so
/// the mean-shift term vanishes).
inline double bgeSetMarginal(const ScoreContext& ctx, const std::vector<int>& set) {
    const int l = static_cast<int>(set.size());
    if (l == 0) return 0.0;
    const double N = ctx.weightTotal();
    const double am = ctx.bgePar().am;
    const double aw = *ctx.bgePar().aw;
    const double awl = aw - ctx.n() + l;
    const double t = ctx.priorScale();

    Eigen::MatrixXd R(l, l);
    for (int a = 0; a < l; ++a)
        for (int b = 0; b < l; ++b) R(a, b) = ctx.scatter()(set[a], set[b]);
    for (int a = 0; a < l; ++a) R(a, a) += t;

    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success)
        throw ScoreError("bge: posterior matrix not positive definite");
    double logDetR = 0;
    for (int a = 0; a < l; ++a) logDetR += 2.0 * std::log(llt.matrixL()(a, a));

    double lg = 0;
    for (int j = 1; j <= l; ++j)
        lg += std::lgamma((awl + N + 1 - j) / 2.0) - std::lgamma((awl + 1 - j) / 2.0);

    return -0.5 * l * N * std::log(M_PI) + 0.5 * l * (std::log(am) - std::log(am + N)) + lg
           + 0.5 * awl * l * std::log(t) - 0.5 * (awl + N) * logDetR;
}

/// Dirichlet-multinomial local marginal with equivalent sample size chi and
/// weighted counts. Only observed parent configurations contribute.
inline double bdeLocal(const ScoreContext& ctx, int node, const std::vector<int>& parents) {
    const auto& d = ctx.data();
    const int N = d.rows();
    const double chi = ctx.bdePar().chi;
    const int r = d.arity(node);
    double q = 1;
    for (int p : parents) q *= d.arity(p);
    const double aij = chi / q;
    const double aijk = chi / (q * r);

    // weighted counts per observed (parent config, state)
    std::map<long long, std::vector<double>> counts;
    for (int row = 0; row < N; ++row) {
        const double w = ctx.weights()[row];
        if (w == 0) continue;
        long long cfgIdx = 0;
        for (int p : parents) cfgIdx = cfgIdx * d.arity(p) + static_cast<long long>(d(row, p));
        auto& cell = counts[cfgIdx];
        if (cell.empty()) cell.assign(r, 0.0);
        cell[static_cast<int>(d(row, node))] += w;
    }

    double s = 0;
    for (const auto& [cfgIdx, cell] : counts) {
        double nj = 0;
        for (int k = 0; k < r; ++k) {
            if (cell[k] > 0) s += std::lgamma(aijk + cell[k]) - std::lgamma(aijk);
            nj += cell[k];
        }
        s += std::lgamma(aij) - std::lgamma(aij + nj);
    }
    return s;
}

} // namespace detail

/// Decomposable local score S(X_i, Pa_i | D) in the log domain, including
/// the edge-penalty term and (for BDe scores) the per-edge structure prior.
inline double localScore(const ScoreContext& ctx, int node, const std::vector<int>& parents) {
    if (node < 0 || node >= ctx.n()) throw ScoreError("localScore: node out of range");
    if (ctx.isBg(node)) throw ScoreError("localScore: bgnode cannot be scored");
    for (int p : parents) {
        if (p < 0 || p >= ctx.n()) throw ScoreError("localScore: parent out of range");
        if (p == node) throw ScoreError("localScore: node in its own parent set");
    }
    double s;
    if (ctx.scoreType() == ScoreType::Bge) {
        std::vector<int> fam = parents;
        fam.push_back(node);
        s = detail::bgeSetMarginal(ctx, fam) - detail::bgeSetMarginal(ctx, parents);
    } else {
        s = detail::bdeLocal(ctx, node, parents);
        s -= static_cast<double>(parents.size()) * std::log(ctx.bdePar().edgepf);
    }
    for (int p : parents) s -= ctx.edgePenaltyLog(p, node);
    return s;
}

/// Sum of local scores over all non-root nodes of an acyclic graph.
inline double totalScore(const ScoreContext& ctx, const Dag& g) {
    if (g.n() != ctx.n()) throw ScoreError("totalScore: node count mismatch");
    if (!isAcyclic(g)) throw ScoreError("totalScore: cyclic input");
    for (int b : ctx.bgnodes())
        if (g.inDegree(b) > 0) throw ScoreError("totalScore: bgnode has parents");
    double s = 0;
    for (int i = 0; i < ctx.n(); ++i) {
        if (ctx.isBg(i)) continue;
        s += localScore(ctx, i, g.parents(i));
    }
    return s;
}

enum class SimModel { LinearGaussian, CategoricalCpt };

struct SimOptions {
    SimModel model = SimModel::LinearGaussian;
    int arity = 2;               // categorical-cpt state count
    double dirichletAlpha = 0.5; // CPT rows ~ Dirichlet(alpha)
};

/// Forward-sample N i.i.d. rows from the factorization of g.
/// Linear-Gaussian edge weights are drawn uniformly from +-[0.4, 2], unit
/// noise; categorical conditional tables are drawn from a Dirichlet.
inline Dataset simulateData(const Dag& g, const SimOptions& opt, int N, std::mt19937_64& rng) {
    if (!isAcyclic(g)) throw ScoreError("simulateData: cyclic input");
    const int n = g.n();
    std::vector<int> topo;
    topologicalSort(g, &topo);

    std::vector<ColumnKind> kinds(n, opt.model == SimModel::LinearGaussian
                                         ? ColumnKind::Continuous
                                         : (opt.arity == 2 ? ColumnKind::Binary : ColumnKind::Categorical));
    Dataset out(N, n, g.labels(), kinds);
    if (opt.model == SimModel::CategoricalCpt && opt.arity != 2) {
        for (int j = 0; j < n; ++j) {
            std::vector<std::string> lv;
            for (int k = 0; k < opt.arity; ++k) lv.push_back("s" + std::to_string(k));
            out.setLevels(j, lv);
        }
    }

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (opt.model == SimModel::LinearGaussian) {
        std::vector<std::vector<std::pair<int, double>>> wpar(n);
        for (int j = 0; j < n; ++j)
            for (int p : g.parents(j)) {
                double w = 0.4 + 1.6 * unif(rng);
                if (unif(rng) < 0.5) w = -w;
                wpar[j].push_back({p, w});
            }
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int r = 0; r < N; ++r)
            for (int v : topo) {
                double x = gauss(rng);
                for (auto [p, w] : wpar[v]) x += w * out(r, p);
                out.at(r, v) = x;
            }
    } else {
        const int r = opt.arity;
        std::gamma_distribution<double> gamma(opt.dirichletAlpha, 1.0);
        // one CPT row per parent configuration per node
        std::vector<std::vector<std::vector<double>>> cpt(n);
        std::vector<long long> qsize(n, 1);
        for (int j = 0; j < n; ++j) {
            for (int p : g.parents(j)) qsize[j] *= r;
            cpt[j].resize(qsize[j]);
            for (auto& row : cpt[j]) {
                row.resize(r);
                double tot = 0;
                for (int k = 0; k < r; ++k) {
                    row[k] = gamma(rng);
                    tot += row[k];
                }
                for (int k = 0; k < r; ++k) row[k] /= tot;
            }
        }
        for (int row = 0; row < N; ++row)
            for (int v : topo) {
                long long cfgIdx = 0;
                for (int p : g.parents(v)) cfgIdx = cfgIdx * r + static_cast<long long>(out(row, p));
                const auto& probs = cpt[v][cfgIdx];
                double u = unif(rng), acc = 0;
                int state = r - 1;
                for (int k = 0; k < r; ++k) {
                    acc += probs[k];
                    if (u < acc) { state = k; break; }
                }
                out.at(row, v) = state;
            }
    }
    return out;
}

} // namespace dagmcmc

#endif
