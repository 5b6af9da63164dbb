#include "gisl/data.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gisl {

std::optional<std::size_t> DataMatrix::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    return std::nullopt;
}

std::size_t DataMatrix::require_column(const std::string& name) const {
    auto idx = column_index(name);
    if (!idx) throw std::invalid_argument("no column named " + name);
    return *idx;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
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

double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && *b == ' ') ++b;
    if (b < e && *b == '+') ++b;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
        throw std::runtime_error("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
    return v;
}

}  // namespace

void write_csv(const DataMatrix& m, const std::filesystem::path& path, char sep) {
    std::ostringstream out;
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? std::string(1, sep) : "") << m.columns[c];
    out << '\n';
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
            if (c) out << sep;
            out << format_double(m.values(r, c));
        }
        out << '\n';
    }
    write_file_atomic(path, out.str());
}

DataMatrix read_csv(const std::filesystem::path& path, char sep) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    DataMatrix m;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header row");
    m.columns = split(line, sep);
    std::vector<double> flat;
    std::size_t line_no = 1, rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split(line, sep);
        if (fields.size() != m.columns.size())
            throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(m.columns.size()));
        for (const auto& f : fields) flat.push_back(parse_double(f, line_no));
        ++rows;
    }
    m.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m.columns.size()));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < m.columns.size(); ++c) m.values(r, c) = flat[r * m.columns.size() + c];
    return m;
}

void save_matrix(const DataMatrix& m, const std::filesystem::path& csv_path) {
    write_csv(m, csv_path);
    nlohmann::json j;
    j["format"] = "gisl-regime";
    j["version"] = 1;
    j["regime"] = m.regime.is_observational() ? "observational" : "perturbed";
    if (m.regime.target) j["target"] = *m.regime.target;
    j["rows"] = m.rows();
    j["columns"] = m.columns;
    write_file_atomic(csv_path.string() + ".json", j.dump(2) + "\n");
}

DataMatrix load_matrix(const std::filesystem::path& csv_path) {
    DataMatrix m = read_csv(csv_path);
    auto side = std::filesystem::path(csv_path.string() + ".json");
    if (std::filesystem::exists(side)) {
        auto j = nlohmann::json::parse(read_file(side));
        if (j.at("regime") == "perturbed") m.regime = Regime::perturbed(j.at("target"));
    }
    return m;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace gisl
