#include "gisl/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gisl {

namespace fs = std::filesystem;

TableFormat format_from_path(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    return ext == ".tsv" || ext == ".tab" ? TableFormat::Tsv : TableFormat::Csv;
}

namespace {

char sep_of(TableFormat f) { return f == TableFormat::Tsv ? '\t' : ','; }

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::optional<double> to_number(const std::string& raw) {
    std::string s = raw;
    while (!s.empty() && s.back() == ' ') s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && s[b] == ' ') ++b;
    if (b < s.size() && s[b] == '+') ++b;
    double v = 0;
    auto res = std::from_chars(s.data() + b, s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || b == s.size()) return std::nullopt;
    return v;
}

std::string where(const fs::path& p, std::size_t line) { return p.string() + ":" + std::to_string(line) + ": "; }

}  // namespace

ExpressionTable load_expression(const fs::path& path, TableFormat format, const std::string& label_column,
                                const std::string& control_token) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const char sep = sep_of(format);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header row");
    auto header = split_line(line, sep);
    auto lab_it = std::find(header.begin(), header.end(), label_column);
    if (lab_it == header.end()) throw std::runtime_error(path.string() + ": no label column '" + label_column + "'");
    const auto lab = static_cast<std::size_t>(lab_it - header.begin());

    ExpressionTable t;
    t.control_token = control_token;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (c != lab) t.genes.push_back(header[c]);
    std::set<std::string> gene_set(t.genes.begin(), t.genes.end());
    if (gene_set.size() != t.genes.size()) throw std::runtime_error(path.string() + ": duplicate gene column");

    std::vector<double> flat;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_line(line, sep);
        if (f.size() != header.size())
            throw std::runtime_error(where(path, line_no) + "expected " + std::to_string(header.size()) + " fields, found " +
                                     std::to_string(f.size()));
        const std::string& label = f[lab];
        if (label != control_token && !gene_set.count(label))
            throw std::runtime_error(where(path, line_no) + "label '" + label + "' is neither '" + control_token +
                                     "' nor a gene column");
        for (std::size_t c = 0; c < f.size(); ++c) {
            if (c == lab) continue;
            auto v = to_number(f[c]);
            if (!v) throw std::runtime_error(where(path, line_no) + "non-numeric value '" + f[c] + "' in column " + header[c]);
            if (!std::isfinite(*v)) throw std::runtime_error(where(path, line_no) + "non-finite value in column " + header[c]);
            flat.push_back(*v);
        }
        t.labels.push_back(label);
        ++t.label_counts[label];
    }
    const auto rows = static_cast<Eigen::Index>(t.labels.size());
    const auto cols = static_cast<Eigen::Index>(t.genes.size());
    t.values.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) t.values(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
    for (Eigen::Index c = 0; c < cols; ++c)
        if (rows == 0 || (t.values.col(c).array() == t.values(0, c)).all())
            t.zero_variance_genes.push_back(t.genes[static_cast<std::size_t>(c)]);
    return t;
}

void export_expression(const ExpressionTable& t, const fs::path& path, TableFormat format, const std::string& label_column) {
    const char sep = sep_of(format);
    std::ostringstream out;
    for (const auto& g : t.genes) out << g << sep;
    out << label_column << '\n';
    for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < t.values.cols(); ++c) out << format_double(t.values(r, c)) << sep;
        out << t.labels[static_cast<std::size_t>(r)] << '\n';
    }
    write_file_atomic(path, out.str());
}

ExpressionTable expression_from_regimes(const DataMatrix& d0, const std::map<std::string, DataMatrix>& perturbed,
                                        const std::string& control_token) {
    ExpressionTable t;
    t.control_token = control_token;
    t.genes = d0.columns;
    Eigen::Index rows = d0.values.rows();
    for (const auto& [g, m] : perturbed) {
        if (m.columns != d0.columns) throw std::invalid_argument("regime matrices have different columns");
        rows += m.values.rows();
    }
    t.values.resize(rows, d0.values.cols());
    Eigen::Index r = 0;
    auto append = [&](const DataMatrix& m, const std::string& label) {
        t.values.middleRows(r, m.values.rows()) = m.values;
        r += m.values.rows();
        for (Eigen::Index k = 0; k < m.values.rows(); ++k) t.labels.push_back(label);
        t.label_counts[label] += m.rows();
    };
    append(d0, control_token);
    for (const auto& [g, m] : perturbed) append(m, g);
    return t;
}

void apply_log1p(ExpressionTable& t) {
    if ((t.values.array() <= -1.0).any()) throw std::invalid_argument("log1p needs values above -1");
    t.values = t.values.array().log1p().matrix();
}

RegimeSplit split_regimes(const ExpressionTable& t, const std::optional<std::vector<std::string>>& subset) {
    std::vector<std::string> keep = subset ? *subset : t.genes;
    std::vector<Eigen::Index> cols;
    for (const auto& g : keep) {
        auto it = std::find(t.genes.begin(), t.genes.end(), g);
        if (it == t.genes.end()) throw std::invalid_argument("requested gene " + g + " is not in the table");
        cols.push_back(static_cast<Eigen::Index>(it - t.genes.begin()));
    }
    std::set<std::string> keep_set(keep.begin(), keep.end());
    std::map<std::string, std::vector<Eigen::Index>> rows;
    for (std::size_t r = 0; r < t.labels.size(); ++r) {
        const auto& l = t.labels[r];
        if (l == t.control_token || keep_set.count(l)) rows[l].push_back(static_cast<Eigen::Index>(r));
    }
    if (!rows.count(t.control_token)) throw std::invalid_argument("no rows labelled '" + t.control_token + "'");

    auto build = [&](const std::vector<Eigen::Index>& rs, Regime regime) {
        DataMatrix m;
        m.columns = keep;
        m.regime = std::move(regime);
        m.values.resize(static_cast<Eigen::Index>(rs.size()), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t c = 0; c < cols.size(); ++c)
                m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = t.values(rs[i], cols[c]);
        return m;
    };
    RegimeSplit out;
    out.d0 = build(rows.at(t.control_token), Regime::observational());
    for (const auto& [label, rs] : rows)
        if (label != t.control_token) out.perturbed[label] = build(rs, Regime::perturbed(label));
    return out;
}

ZscoreTable load_zscores(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    ZscoreTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        char sep = line.find('\t') != std::string::npos ? '\t' : ',';
        auto f = split_line(line, sep);
        if (f.size() != 2) throw std::runtime_error(where(path, line_no) + "expected two fields (gene, score)");
        auto v = to_number(f[1]);
        if (!v) {
            if (line_no == 1) continue;
            throw std::runtime_error(where(path, line_no) + "non-numeric score '" + f[1] + "'");
        }
        if (!std::isfinite(*v)) throw std::runtime_error(where(path, line_no) + "non-finite score");
        if (!t.emplace(f[0], *v).second) throw std::runtime_error(where(path, line_no) + "duplicate gene " + f[0]);
    }
    return t;
}

}  // namespace gisl
