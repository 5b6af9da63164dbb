#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gisl {

// Observational when target is empty, otherwise the label of the perturbed variable.
struct Regime {
    std::optional<std::string> target;

    static Regime observational() { return {}; }
    static Regime perturbed(std::string t) { return {std::move(t)}; }
    bool is_observational() const { return !target.has_value(); }
    std::string name() const { return target ? "perturbed:" + *target : "observational"; }
    bool operator==(const Regime&) const = default;
};

struct DataMatrix {
    std::vector<std::string> columns;
    Eigen::MatrixXd values;  // rows x columns
    Regime regime;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return columns.size(); }
    std::optional<std::size_t> column_index(const std::string& name) const;
    std::size_t require_column(const std::string& name) const;
};

// Shortest round-trip decimal representation.
std::string format_double(double v);

void write_csv(const DataMatrix& m, const std::filesystem::path& path, char sep = ',');
DataMatrix read_csv(const std::filesystem::path& path, char sep = ',');

// CSV plus a sidecar "<path>.json" with the regime descriptor.
void save_matrix(const DataMatrix& m, const std::filesystem::path& csv_path);
DataMatrix load_matrix(const std::filesystem::path& csv_path);

// Writes to a temporary sibling then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace gisl
