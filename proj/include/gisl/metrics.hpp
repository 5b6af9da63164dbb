#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gisl/gisl.hpp"
#include "gisl/graph.hpp"
#include "gisl/scm.hpp"

namespace gisl {

struct DagScores {
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
    std::size_t tp = 0, fp = 0, fn = 0;
};

// A reversed edge counts as one false positive and one false negative.
DagScores dag_scores(const std::set<DirectedEdge>& est, const std::set<DirectedEdge>& truth);
// Orientation ignored.
DagScores adjacency_scores(const std::set<DirectedEdge>& est, const std::set<DirectedEdge>& truth);

// Tail-Arrow edges become directed; Arrow-Arrow edges are dropped; everything else is an
// unoriented adjacency.
struct DirectedProjection {
    std::set<DirectedEdge> directed;
    PairSet undirected;
};

DirectedProjection project(const MixedGraph& g);
std::size_t shd(const DirectedProjection& est, const std::set<DirectedEdge>& truth);

// Empty prediction gives nullopt.
std::optional<double> pair_accuracy(const PairSet& predicted, const PairSet& truth);
std::optional<double> pair_recall(const PairSet& predicted, const PairSet& truth);

struct EmptyEvaluable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZscorePairDetail {
    std::string gene1, gene2;
    std::optional<double> z1, z2;
    bool evaluable = false;
    bool correct = false;
};

struct ZscoreEval {
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t evaluable = 0;
    std::vector<ZscorePairDetail> details;
    std::vector<std::string> missing_genes;
};

// Correct iff both |z| exceed the threshold strictly.
ZscoreEval zscore_eval(const std::vector<std::pair<std::string, std::string>>& pairs,
                       const std::map<std::string, double>& zscores, double threshold);

struct EvalReport {
    DagScores dag;
    DagScores adjacency;
    std::size_t shd = 0;
    std::optional<double> selection_accuracy, confounder_accuracy;
    std::optional<double> selection_recall, confounder_recall;
    std::size_t predicted_selection = 0, predicted_confounded = 0;
    // true relation -> predicted class -> count, over every audited pair
    std::map<std::string, std::map<std::string, std::size_t>> confusion;
};

EvalReport evaluate(const GislResult& result, const GroundTruth& truth);

nlohmann::json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);
std::string to_table(const EvalReport& r);

struct Summary {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
    std::size_t count = 0;
    std::size_t undefined = 0;
};

// Metric name -> summary over reports; Undefined values are excluded and counted.
std::map<std::string, Summary> aggregate(const std::vector<EvalReport>& reports);

}  // namespace gisl
