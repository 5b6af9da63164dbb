#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gisl/data.hpp"

namespace gisl {

enum class TableFormat { Csv, Tsv };

TableFormat format_from_path(const std::filesystem::path& p);

struct ExpressionTable {
    std::vector<std::string> genes;
    Eigen::MatrixXd values;           // cells x genes
    std::vector<std::string> labels;  // per cell: control token or a gene name
    std::string control_token = "control";
    std::map<std::string, std::size_t> label_counts;
    std::vector<std::string> zero_variance_genes;
};

ExpressionTable load_expression(const std::filesystem::path& path, TableFormat format, const std::string& label_column,
                                const std::string& control_token);
void export_expression(const ExpressionTable& table, const std::filesystem::path& path, TableFormat format,
                       const std::string& label_column);

// Stacks regime matrices into one labelled table.
ExpressionTable expression_from_regimes(const DataMatrix& d0, const std::map<std::string, DataMatrix>& perturbed,
                                        const std::string& control_token = "control");

void apply_log1p(ExpressionTable& table);

struct RegimeSplit {
    DataMatrix d0;
    std::map<std::string, DataMatrix> perturbed;
};

// With a subset, only those gene columns are kept and cells perturbing other genes are dropped.
RegimeSplit split_regimes(const ExpressionTable& table,
                          const std::optional<std::vector<std::string>>& gene_subset = std::nullopt);

using ZscoreTable = std::map<std::string, double>;

// Two columns (gene, score), comma or tab separated; a non-numeric first row is a header.
ZscoreTable load_zscores(const std::filesystem::path& path);

}  // namespace gisl
