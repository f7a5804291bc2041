#ifndef DAGMCMC_DATA_HPP
#define DAGMCMC_DATA_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dagmcmc {

enum class ColumnKind { Continuous, Binary, Categorical };

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// N x n data matrix. Categorical columns are stored as level indices into
/// `levels[col]`; binary columns hold 0/1; continuous columns raw values.
class Dataset {
public:
    Dataset() = default;
    Dataset(int rows, int cols, std::vector<std::string> labels,
            std::vector<ColumnKind> kinds)
        : rows_(rows), cols_(cols), labels_(std::move(labels)), kinds_(std::move(kinds)),
          levels_(cols), values_(static_cast<std::size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw DataError("Dataset: negative shape");
        if (static_cast<int>(labels_.size()) != cols || static_cast<int>(kinds_.size()) != cols)
            throw DataError("Dataset: label/kind count mismatch");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<ColumnKind>& kinds() const { return kinds_; }
    ColumnKind kind(int j) const { return kinds_.at(j); }
    const std::vector<std::string>& levels(int j) const { return levels_.at(j); }
    void setLevels(int j, std::vector<std::string> lv) { levels_.at(j) = std::move(lv); }

    double operator()(int r, int c) const {
        return values_[static_cast<std::size_t>(r) * cols_ + c];
    }
    double& at(int r, int c) { return values_[static_cast<std::size_t>(r) * cols_ + c]; }

    /// Number of states of a discrete column (2 for binary).
    int arity(int j) const {
        switch (kind(j)) {
            case ColumnKind::Binary: return 2;
            case ColumnKind::Categorical: return static_cast<int>(levels_[j].size());
            default: throw DataError("arity: continuous column " + labels_[j]);
        }
    }

    bool allKind(ColumnKind k) const {
        return std::all_of(kinds_.begin(), kinds_.end(), [k](ColumnKind x) { return x == k; });
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<std::string> labels_;
    std::vector<ColumnKind> kinds_;
    std::vector<std::vector<std::string>> levels_;
    std::vector<double> values_;
};

/// Optional per-column kind override for loadDataset.
struct KindsHint {
    std::vector<std::optional<ColumnKind>> kinds;                // by column index
    std::vector<std::optional<std::vector<std::string>>> levels; // declared categorical levels
};

namespace detail {

inline std::vector<std::string> splitCsvLine(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

inline bool parseNumber(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

} // namespace detail

/// Read a headered CSV into a Dataset. Column kinds are inferred
/// (all-numeric 0/1 -> binary, other numeric -> continuous, else
/// categorical with sorted unique levels) unless overridden by the hint.
inline Dataset loadDatasetCsv(std::istream& in, const KindsHint* hint = nullptr) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("loadDataset: empty file");
    auto labels = detail::splitCsvLine(line);
    const int n = static_cast<int>(labels.size());
    std::vector<std::vector<std::string>> raw;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = detail::splitCsvLine(line);
        if (static_cast<int>(cells.size()) != n)
            throw DataError("loadDataset: ragged row " + std::to_string(raw.size() + 2));
        for (const auto& c : cells)
            if (c.empty() || c == "NA" || c == "nan")
                throw DataError("loadDataset: missing value in row " + std::to_string(raw.size() + 2));
        raw.push_back(std::move(cells));
    }
    const int N = static_cast<int>(raw.size());

    std::vector<ColumnKind> kinds(n);
    std::vector<std::vector<std::string>> levels(n);
    for (int j = 0; j < n; ++j) {
        bool numeric = true, binary = true;
        for (int r = 0; r < N && numeric; ++r) {
            double v;
            if (!detail::parseNumber(raw[r][j], v)) numeric = false;
            else if (v != 0.0 && v != 1.0) binary = false;
        }
        std::optional<ColumnKind> forced;
        if (hint && j < static_cast<int>(hint->kinds.size())) forced = hint->kinds[j];
        if (forced) {
            kinds[j] = *forced;
            if (*forced == ColumnKind::Binary && (!numeric || !binary))
                throw DataError("loadDataset: column " + labels[j] + " is not binary");
            if (*forced == ColumnKind::Continuous && !numeric)
                throw DataError("loadDataset: column " + labels[j] + " is not numeric");
        } else {
            kinds[j] = !numeric ? ColumnKind::Categorical
                                : (binary && N > 0 ? ColumnKind::Binary : ColumnKind::Continuous);
        }
        if (kinds[j] == ColumnKind::Categorical) {
            std::optional<std::vector<std::string>> declared;
            if (hint && j < static_cast<int>(hint->levels.size())) declared = hint->levels[j];
            if (declared) {
                levels[j] = *declared;
            } else {
                for (int r = 0; r < N; ++r) levels[j].push_back(raw[r][j]);
                std::sort(levels[j].begin(), levels[j].end());
                levels[j].erase(std::unique(levels[j].begin(), levels[j].end()), levels[j].end());
            }
        }
    }

    Dataset d(N, n, labels, kinds);
    for (int j = 0; j < n; ++j) {
        if (kinds[j] == ColumnKind::Categorical) {
            d.setLevels(j, levels[j]);
            std::map<std::string, int> code;
            for (std::size_t k = 0; k < levels[j].size(); ++k) code[levels[j][k]] = static_cast<int>(k);
            for (int r = 0; r < N; ++r) {
                auto it = code.find(raw[r][j]);
                if (it == code.end())
                    throw DataError("loadDataset: value '" + raw[r][j] + "' outside declared levels of column " + labels[j]);
                d.at(r, j) = it->second;
            }
        } else {
            for (int r = 0; r < N; ++r) {
                double v;
                detail::parseNumber(raw[r][j], v);
                d.at(r, j) = v;
            }
        }
    }
    return d;
}

inline Dataset loadDataset(const std::string& path, const KindsHint* hint = nullptr) {
    std::ifstream f(path);
    if (!f) throw DataError("loadDataset: cannot open " + path);
    return loadDatasetCsv(f, hint);
}

/// Single-column CSV of nonnegative observation weights (with header).
inline std::vector<double> loadWeights(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("loadWeights: cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw DataError("loadWeights: empty file");
    std::vector<double> w;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        double v;
        if (!detail::parseNumber(detail::splitCsvLine(line)[0], v))
            throw DataError("loadWeights: non-numeric entry");
        w.push_back(v);
    }
    return w;
}

} // namespace dagmcmc

#endif
