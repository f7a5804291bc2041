#ifndef DAGMCMC_GRAPH_HPP
#define DAGMCMC_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dagmcmc {

/// Directed graph over labelled nodes, dense adjacency.
/// Entry (i,j) = 1 means edge i -> j, i.e. column j holds the parents of j.
/// The same container serves skeletons and PDAGs (symmetric entries allowed
/// there); acyclicity is a property checked by isAcyclic, not enforced on
/// every mutation.
class Dag {
public:
    Dag() : n_(0) {}
    explicit Dag(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0) {
        labels_.reserve(n);
        for (int i = 0; i < n; ++i) labels_.push_back("V" + std::to_string(i + 1));
    }
    Dag(int n, std::vector<std::string> labels)
        : n_(n), labels_(std::move(labels)), a_(static_cast<std::size_t>(n) * n, 0) {
        if (static_cast<int>(labels_.size()) != n)
            throw std::invalid_argument("Dag: label count does not match node count");
    }

    int n() const { return n_; }
    const std::vector<std::string>& labels() const { return labels_; }
    void setLabels(std::vector<std::string> labels) {
        if (static_cast<int>(labels.size()) != n_)
            throw std::invalid_argument("Dag: label count does not match node count");
        labels_ = std::move(labels);
    }

    bool edge(int i, int j) const { return a_[idx(i, j)] != 0; }
    void setEdge(int i, int j) {
        if (i == j) throw std::invalid_argument("Dag: self-loop");
        a_[idx(i, j)] = 1;
    }
    void clearEdge(int i, int j) { a_[idx(i, j)] = 0; }

    std::vector<int> parents(int j) const {
        std::vector<int> p;
        for (int i = 0; i < n_; ++i)
            if (edge(i, j)) p.push_back(i);
        return p;
    }
    std::vector<int> children(int i) const {
        std::vector<int> c;
        for (int j = 0; j < n_; ++j)
            if (edge(i, j)) c.push_back(j);
        return c;
    }
    int inDegree(int j) const {
        int d = 0;
        for (int i = 0; i < n_; ++i) d += edge(i, j);
        return d;
    }
    int edgeCount() const {
        return static_cast<int>(std::count(a_.begin(), a_.end(), std::uint8_t(1)));
    }

    bool operator==(const Dag& o) const { return n_ == o.n_ && a_ == o.a_; }
    bool operator!=(const Dag& o) const { return !(*this == o); }

private:
    std::size_t idx(int i, int j) const {
        if (i < 0 || j < 0 || i >= n_ || j >= n_)
            throw std::out_of_range("Dag: node index out of range");
        return static_cast<std::size_t>(i) * n_ + j;
    }

    int n_;
    std::vector<std::string> labels_;
    std::vector<std::uint8_t> a_;
};

/// CPDAG: same shape as Dag; symmetric entries denote undirected edges.
struct Cpdag {
    Dag g;
    bool operator==(const Cpdag& o) const { return g == o.g; }
};

/// Permutation of the non-root nodes; perm[0] is the first node in the
/// order. A node's parents must appear later in the order.
struct NodeOrder {
    std::vector<int> perm;
};

/// Node permutation split into parts; parts[0] is the first (outermost)
/// part. Canonical form keeps each part sorted ascending, so two states
/// describing the same layering compare equal.
struct LabelledPartition {
    std::vector<std::vector<int>> parts;

    int nodeCount() const {
        int n = 0;
        for (const auto& p : parts) n += static_cast<int>(p.size());
        return n;
    }
    std::vector<int> sizes() const {
        std::vector<int> s;
        s.reserve(parts.size());
        for (const auto& p : parts) s.push_back(static_cast<int>(p.size()));
        return s;
    }
    void canonicalize() {
        for (auto& p : parts) std::sort(p.begin(), p.end());
    }
    bool operator==(const LabelledPartition& o) const { return parts == o.parts; }
};

/// Kahn-style topological sort: emits a node only once all its parents are
/// emitted. Returns false on a cycle.
inline bool topologicalSort(const Dag& g, std::vector<int>* out = nullptr) {
    const int n = g.n();
    std::vector<int> indeg(n, 0);
    for (int j = 0; j < n; ++j) indeg[j] = g.inDegree(j);
    std::vector<int> queue;
    for (int j = 0; j < n; ++j)
        if (indeg[j] == 0) queue.push_back(j);
    std::vector<int> order;
    order.reserve(n);
    // process smallest-index first for determinism
    std::make_heap(queue.begin(), queue.end(), std::greater<>());
    while (!queue.empty()) {
        std::pop_heap(queue.begin(), queue.end(), std::greater<>());
        int v = queue.back();
        queue.pop_back();
        order.push_back(v);
        for (int c : g.children(v)) {
            if (--indeg[c] == 0) {
                queue.push_back(c);
                std::push_heap(queue.begin(), queue.end(), std::greater<>());
            }
        }
    }
    if (static_cast<int>(order.size()) != n) return false;
    if (out) *out = std::move(order);
    return true;
}

inline bool isAcyclic(const Dag& g) {
    for (int i = 0; i < g.n(); ++i)
        if (g.edge(i, i)) throw std::invalid_argument("isAcyclic: nonzero diagonal");
    return topologicalSort(g);
}

/// True iff every (non-root) parent of every node appears later in the
/// order. Nodes in bg are root nodes: always permitted as parents and
/// absent from the order.
inline bool compatibleWithOrder(const Dag& g, const NodeOrder& o,
                                const std::vector<int>& bg = {}) {
    const int n = g.n();
    std::vector<char> isBg(n, 0);
    for (int b : bg) isBg.at(b) = 1;
    std::vector<int> pos(n, -1);
    int ordered = 0;
    for (std::size_t k = 0; k < o.perm.size(); ++k) {
        int v = o.perm[k];
        if (v < 0 || v >= n || isBg[v] || pos[v] != -1)
            throw std::invalid_argument("compatibleWithOrder: invalid order");
        pos[v] = static_cast<int>(k);
        ++ordered;
    }
    if (ordered != n - static_cast<int>(bg.size()))
        throw std::invalid_argument("compatibleWithOrder: order does not cover non-root nodes");
    for (int j = 0; j < n; ++j) {
        if (isBg[j]) continue;
        for (int p : g.parents(j)) {
            if (isBg[p]) continue;
            if (pos[p] <= pos[j]) return false;
        }
    }
    return true;
}

/// True iff for every non-root node in part v_j: all ordered parents lie in
/// parts with index > j, there is at least one parent in v_{j+1} when j < p,
/// and the ordered parent set is empty iff j = p. Root nodes are free
/// parents and do not appear in the partition.
inline bool compatibleWithPartition(const Dag& g, const LabelledPartition& lp,
                                    const std::vector<int>& bg = {}) {
    const int n = g.n();
    std::vector<char> isBg(n, 0);
    for (int b : bg) isBg.at(b) = 1;
    const int p = static_cast<int>(lp.parts.size());
    std::vector<int> partOf(n, -1);
    int covered = 0;
    for (int j = 0; j < p; ++j) {
        if (lp.parts[j].empty())
            throw std::invalid_argument("compatibleWithPartition: empty part");
        for (int v : lp.parts[j]) {
            if (v < 0 || v >= n || isBg[v] || partOf[v] != -1)
                throw std::invalid_argument("compatibleWithPartition: invalid partition");
            partOf[v] = j;
            ++covered;
        }
    }
    if (covered != n - static_cast<int>(bg.size()))
        throw std::invalid_argument("compatibleWithPartition: partition does not cover non-root nodes");
    for (int v = 0; v < n; ++v) {
        if (isBg[v]) continue;
        const int j = partOf[v];
        bool anyOrdered = false, inNext = false;
        for (int q : g.parents(v)) {
            if (isBg[q]) continue;
            anyOrdered = true;
            if (partOf[q] <= j) return false;
            if (partOf[q] == j + 1) inNext = true;
        }
        if (j == p - 1) {
            if (anyOrdered) return false;
        } else {
            if (!inNext) return false;
        }
    }
    return true;
}

/// Number of node orders the DAG is compatible with. Exponential-time
/// subset DP; guarded to n <= 12 (test-scale oracle).
inline long long countLinearExtensions(const Dag& g) {
    const int n = g.n();
    if (n > 12) throw std::invalid_argument("countLinearExtensions: n > 12");
    if (!isAcyclic(g)) throw std::invalid_argument("countLinearExtensions: cyclic input");
    // Build the perm left-to-right; a node may be placed once all its
    // children are placed (children precede parents in the order).
    std::vector<std::uint32_t> childMask(n, 0);
    for (int i = 0; i < n; ++i)
        for (int c : g.children(i)) childMask[i] |= (1u << c);
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
    std::vector<long long> dp(static_cast<std::size_t>(full) + 1, 0);
    dp[0] = 1;
    for (std::uint32_t s = 0; s <= full; ++s) {
        if (dp[s] == 0) continue;
        for (int v = 0; v < n; ++v) {
            if (s & (1u << v)) continue;
            if ((childMask[v] & s) == childMask[v]) dp[s | (1u << v)] += dp[s];
        }
        if (s == full) break;
    }
    return dp[full];
}

namespace detail {

inline bool adjacentAny(const Dag& g, int a, int b) { return g.edge(a, b) || g.edge(b, a); }

} // namespace detail

/// CPDAG of the equivalence class of g: skeleton plus v-structures, closed
/// under the Meek orientation rules.
inline Cpdag dagToCpdag(const Dag& g) {
    if (!isAcyclic(g)) throw std::invalid_argument("dagToCpdag: cyclic input");
    const int n = g.n();
    // start from the pattern: undirected skeleton, v-structure edges directed
    Dag c(n, g.labels());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (g.edge(i, j)) { c.setEdge(i, j); c.setEdge(j, i); }
    for (int j = 0; j < n; ++j) {
        auto pa = g.parents(j);
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y)
                if (!detail::adjacentAny(g, pa[x], pa[y])) {
                    // collider pa[x] -> j <- pa[y]
                    c.clearEdge(j, pa[x]);
                    c.clearEdge(j, pa[y]);
                }
    }
    auto undirected = [&](int a, int b) { return c.edge(a, b) && c.edge(b, a); };
    auto directed = [&](int a, int b) { return c.edge(a, b) && !c.edge(b, a); };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (!undirected(a, b)) continue;
                bool orient = false;
                // Meek R1: x -> a, a - b, x and b nonadjacent  =>  a -> b
                for (int x = 0; x < n && !orient; ++x)
                    if (directed(x, a) && x != b && !detail::adjacentAny(c, x, b)) orient = true;
                // Meek R2: a -> x -> b with a - b  =>  a -> b
                for (int x = 0; x < n && !orient; ++x)
                    if (directed(a, x) && directed(x, b)) orient = true;
                // Meek R3: a - x, a - y, x -> b, y -> b, x and y nonadjacent  =>  a -> b
                for (int x = 0; x < n && !orient; ++x) {
                    if (!undirected(a, x) || !directed(x, b)) continue;
                    for (int y = x + 1; y < n && !orient; ++y)
                        if (undirected(a, y) && directed(y, b) && !detail::adjacentAny(c, x, y))
                            orient = true;
                }
                if (orient) {
                    c.clearEdge(b, a);
                    changed = true;
                }
            }
    }
    return Cpdag{c};
}

/// Random DAG: a uniform random order, then each permissible edge included
/// independently with probability avgParents / ((n-1)/2), so the expected
/// edge count is about n * avgParents.
inline Dag sampleDag(int n, double avgParents, std::mt19937_64& rng) {
    if (n < 1) throw std::invalid_argument("sampleDag: n < 1");
    if (avgParents < 0) throw std::invalid_argument("sampleDag: avgParents < 0");
    Dag g(n);
    if (n == 1 || avgParents == 0.0) return g;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const double meanPermissible = (n - 1) / 2.0;
    const double p = std::min(1.0, avgParents / meanPermissible);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // parents of order[a] are drawn from nodes later in the order
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (unif(rng) < p) g.setEdge(order[b], order[a]);
    return g;
}

} // namespace dagmcmc

#endif
