#ifndef DAGMCMC_IO_HPP
#define DAGMCMC_IO_HPP

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dagmcmc/data.hpp"
#include "dagmcmc/graph.hpp"

namespace dagmcmc {

// ---- adjacency CSV: first row node labels, row i = source node i ----

inline void writeAdjacencyCsv(std::ostream& out, const Dag& g) {
    const int n = g.n();
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << g.labels()[j];
    out << "\n";
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out << (j ? "," : "") << (g.edge(i, j) ? 1 : 0);
        out << "\n";
    }
}

inline void writeAdjacencyCsv(const std::string& path, const Dag& g) {
    std::ofstream f(path);
    if (!f) throw DataError("writeAdjacencyCsv: cannot open " + path);
    writeAdjacencyCsv(f, g);
}

inline Dag readAdjacencyCsv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("readAdjacencyCsv: empty input");
    auto labels = detail::splitCsvLine(line);
    const int n = static_cast<int>(labels.size());
    Dag g(n, labels);
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw DataError("readAdjacencyCsv: missing row " + std::to_string(i));
        auto cells = detail::splitCsvLine(line);
        if (static_cast<int>(cells.size()) != n) throw DataError("readAdjacencyCsv: ragged row");
        for (int j = 0; j < n; ++j) {
            double v;
            if (!detail::parseNumber(cells[j], v) || (v != 0.0 && v != 1.0))
                throw DataError("readAdjacencyCsv: entries must be 0/1");
            if (v == 1.0) {
                if (i == j) throw DataError("readAdjacencyCsv: nonzero diagonal");
                g.setEdge(i, j);
            }
        }
    }
    return g;
}

inline Dag readAdjacencyCsv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("readAdjacencyCsv: cannot open " + path);
    return readAdjacencyCsv(f);
}

// ---- real-valued n x n matrix CSV (edge penalties, posteriors) ----

inline void writeMatrixCsv(std::ostream& out, const std::vector<std::string>& labels,
                           const std::vector<double>& m) {
    const int n = static_cast<int>(labels.size());
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << labels[j];
    out << "\n";
    out << std::setprecision(17);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out << (j ? "," : "") << m[static_cast<std::size_t>(i) * n + j];
        out << "\n";
    }
}

inline void writeMatrixCsv(const std::string& path, const std::vector<std::string>& labels,
                           const std::vector<double>& m) {
    std::ofstream f(path);
    if (!f) throw DataError("writeMatrixCsv: cannot open " + path);
    writeMatrixCsv(f, labels, m);
}

struct LabelledMatrix {
    std::vector<std::string> labels;
    std::vector<double> values; // row-major n x n
    int n() const { return static_cast<int>(labels.size()); }
    double operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * n() + j]; }
};

inline LabelledMatrix readMatrixCsv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("readMatrixCsv: empty input");
    LabelledMatrix m;
    m.labels = detail::splitCsvLine(line);
    const int n = m.n();
    m.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw DataError("readMatrixCsv: missing row");
        auto cells = detail::splitCsvLine(line);
        if (static_cast<int>(cells.size()) != n) throw DataError("readMatrixCsv: ragged row");
        for (int j = 0; j < n; ++j) {
            double v;
            if (!detail::parseNumber(cells[j], v)) throw DataError("readMatrixCsv: non-numeric entry");
            m.values[static_cast<std::size_t>(i) * n + j] = v;
        }
    }
    return m;
}

inline LabelledMatrix readMatrixCsv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("readMatrixCsv: cannot open " + path);
    return readMatrixCsv(f);
}

// ---- DOT export: directed `a -> b`, undirected `a -> b [dir=none]` ----

inline void writeDot(std::ostream& out, const Dag& g, const std::string& name = "g") {
    out << "digraph " << name << " {\n";
    for (int i = 0; i < g.n(); ++i) out << "  \"" << g.labels()[i] << "\";\n";
    for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j) {
            if (!g.edge(i, j)) continue;
            if (g.edge(j, i)) {
                if (i < j)
                    out << "  \"" << g.labels()[i] << "\" -> \"" << g.labels()[j] << "\" [dir=none];\n";
            } else {
                out << "  \"" << g.labels()[i] << "\" -> \"" << g.labels()[j] << "\";\n";
            }
        }
    out << "}\n";
}

// ---- sampled-graph archive: indexed adjacency blocks ----

struct GraphSample {
    std::vector<std::string> labels;
    std::string kind; // chain kind recorded in metadata
    std::vector<Dag> graphs;
    std::vector<double> scores;
};

inline void writeGraphArchive(std::ostream& out, const GraphSample& s) {
    out << "# dagmcmc-graphs v1\n";
    out << "# kind: " << s.kind << "\n";
    out << "# labels:";
    for (const auto& l : s.labels) out << " " << l;
    out << "\n# count: " << s.graphs.size() << "\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < s.graphs.size(); ++k) {
        out << "graph " << k << " score " << (k < s.scores.size() ? s.scores[k] : 0.0) << "\n";
        const Dag& g = s.graphs[k];
        for (int i = 0; i < g.n(); ++i) {
            for (int j = 0; j < g.n(); ++j) out << (g.edge(i, j) ? '1' : '0');
            out << "\n";
        }
    }
}

inline void writeGraphArchive(const std::string& path, const GraphSample& s) {
    std::ofstream f(path);
    if (!f) throw DataError("writeGraphArchive: cannot open " + path);
    writeGraphArchive(f, s);
}

inline GraphSample readGraphArchive(std::istream& in) {
    GraphSample s;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# dagmcmc-graphs", 0) != 0)
        throw DataError("readGraphArchive: bad header");
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (line.rfind("# kind:", 0) == 0) {
            s.kind = line.substr(8);
        } else if (line.rfind("# labels:", 0) == 0) {
            std::istringstream ls(line.substr(9));
            std::string tok;
            while (ls >> tok) s.labels.push_back(tok);
        } else if (line.rfind("# count:", 0) == 0) {
            count = std::stoull(line.substr(8));
        } else if (line.rfind("graph ", 0) == 0) {
            std::istringstream hs(line);
            std::string g1, g2;
            std::size_t idx;
            double score;
            hs >> g1 >> idx >> g2 >> score;
            const int n = static_cast<int>(s.labels.size());
            Dag g(n, s.labels);
            for (int i = 0; i < n; ++i) {
                if (!std::getline(in, line) || static_cast<int>(line.size()) < n)
                    throw DataError("readGraphArchive: truncated graph block");
                for (int j = 0; j < n; ++j)
                    if (line[j] == '1') g.setEdge(i, j);
            }
            s.graphs.push_back(std::move(g));
            s.scores.push_back(score);
        }
    }
    if (s.graphs.size() != count) throw DataError("readGraphArchive: count mismatch");
    return s;
}

inline GraphSample readGraphArchive(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("readGraphArchive: cannot open " + path);
    return readGraphArchive(f);
}

} // namespace dagmcmc

#endif
