#include "gisl/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace gisl {

using nlohmann::json;

namespace {

DagScores scores_from(std::size_t tp, std::size_t est, std::size_t truth) {
    DagScores s;
    s.tp = tp;
    s.fp = est - tp;
    s.fn = truth - tp;
    s.precision = est ? static_cast<double>(tp) / static_cast<double>(est) : 1.0;
    s.recall = truth ? static_cast<double>(tp) / static_cast<double>(truth) : 1.0;
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

PairSet adjacencies(const std::set<DirectedEdge>& es) {
    PairSet out;
    for (auto [a, b] : es) out.insert(VarPair(a, b));
    return out;
}

}  // namespace

DagScores dag_scores(const std::set<DirectedEdge>& est, const std::set<DirectedEdge>& truth) {
    std::size_t tp = 0;
    for (const auto& e : est) tp += truth.count(e);
    return scores_from(tp, est.size(), truth.size());
}

DagScores adjacency_scores(const std::set<DirectedEdge>& est, const std::set<DirectedEdge>& truth) {
    auto ea = adjacencies(est), ta = adjacencies(truth);
    std::size_t tp = 0;
    for (auto p : ea) tp += ta.count(p);
    return scores_from(tp, ea.size(), ta.size());
}

DirectedProjection project(const MixedGraph& g) {
    DirectedProjection p;
    for (const auto& e : g.edges()) {
        if (e.at_a == EdgeMark::Arrow && e.at_b == EdgeMark::Arrow) continue;
        if (e.at_a == EdgeMark::Tail && e.at_b == EdgeMark::Arrow)
            p.directed.emplace(e.a, e.b);
        else if (e.at_a == EdgeMark::Arrow && e.at_b == EdgeMark::Tail)
            p.directed.emplace(e.b, e.a);
        else
            p.undirected.insert(VarPair(e.a, e.b));
    }
    return p;
}

std::size_t shd(const DirectedProjection& est, const std::set<DirectedEdge>& truth) {
    // 0 = absent, 1 = a->b, 2 = b->a, 3 = unoriented
    std::map<VarPair, int> e, t;
    for (auto [a, b] : est.directed) e[VarPair(a, b)] = a < b ? 1 : 2;
    for (auto p : est.undirected) e[p] = 3;
    for (auto [a, b] : truth) t[VarPair(a, b)] = a < b ? 1 : 2;
    std::size_t d = 0;
    for (const auto& [p, s] : e) {
        auto it = t.find(p);
        if (it == t.end() || it->second != s) ++d;
    }
    for (const auto& [p, s] : t)
        if (!e.count(p)) ++d;
    return d;
}

std::optional<double> pair_accuracy(const PairSet& predicted, const PairSet& truth) {
    if (predicted.empty()) return std::nullopt;
    std::size_t hit = 0;
    for (auto p : predicted) hit += truth.count(p);
    return static_cast<double>(hit) / static_cast<double>(predicted.size());
}

std::optional<double> pair_recall(const PairSet& predicted, const PairSet& truth) {
    return pair_accuracy(truth, predicted);
}

ZscoreEval zscore_eval(const std::vector<std::pair<std::string, std::string>>& pairs,
                       const std::map<std::string, double>& zscores, double threshold) {
    ZscoreEval out;
    std::set<std::string> missing;
    for (const auto& [g1, g2] : pairs) {
        ZscorePairDetail d;
        d.gene1 = g1;
        d.gene2 = g2;
        if (auto it = zscores.find(g1); it != zscores.end()) d.z1 = it->second;
        else missing.insert(g1);
        if (auto it = zscores.find(g2); it != zscores.end()) d.z2 = it->second;
        else missing.insert(g2);
        d.evaluable = d.z1 && d.z2;
        if (d.evaluable) {
            d.correct = std::abs(*d.z1) > threshold && std::abs(*d.z2) > threshold;
            ++out.evaluable;
            out.correct += d.correct;
        }
        out.details.push_back(d);
    }
    out.missing_genes.assign(missing.begin(), missing.end());
    if (out.evaluable == 0) throw EmptyEvaluable("no predicted pair has Z-scores for both genes");
    out.accuracy = static_cast<double>(out.correct) / static_cast<double>(out.evaluable);
    return out;
}

EvalReport evaluate(const GislResult& result, const GroundTruth& truth) {
    if (result.names != truth.variables)
        throw std::invalid_argument("result and ground truth have different variables");
    EvalReport r;
    auto est = result.causal_edges();
    r.dag = dag_scores(est, truth.causal);
    r.adjacency = adjacency_scores(est, truth.causal);
    r.shd = shd(project(result.graph), truth.causal);
    r.selection_accuracy = pair_accuracy(result.selected, truth.selected);
    r.confounder_accuracy = pair_accuracy(result.confounded, truth.confounded);
    r.selection_recall = pair_recall(result.selected, truth.selected);
    r.confounder_recall = pair_recall(result.confounded, truth.confounded);
    r.predicted_selection = result.selected.size();
    r.predicted_confounded = result.confounded.size();
    for (const auto& e : result.audit) {
        std::string rel;
        auto add = [&](const char* s) { rel += (rel.empty() ? "" : "+") + std::string(s); };
        if (truth.causal.count({e.pair.a, e.pair.b}) || truth.causal.count({e.pair.b, e.pair.a})) add("causal");
        if (truth.confounded.count(e.pair)) add("latent");
        if (truth.selected.count(e.pair)) add("selection");
        if (rel.empty()) rel = "none";
        std::string pred = e.status == PairStatus::Untested ? "untested" : to_string(e.final_class.tag);
        ++r.confusion[rel][pred];
    }
    return r;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json scores_json(const DagScores& s) {
    return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"tp", s.tp}, {"fp", s.fp}, {"fn", s.fn}};
}

DagScores scores_from_json(const json& j) {
    DagScores s;
    s.precision = j.at("precision");
    s.recall = j.at("recall");
    s.f1 = j.at("f1");
    s.tp = j.at("tp");
    s.fp = j.at("fp");
    s.fn = j.at("fn");
    return s;
}

}  // namespace

json to_json(const EvalReport& r) {
    return {{"format", "gisl-eval"},
            {"version", 1},
            {"dag", scores_json(r.dag)},
            {"adjacency", scores_json(r.adjacency)},
            {"shd", r.shd},
            {"selection_accuracy", opt(r.selection_accuracy)},
            {"confounder_accuracy", opt(r.confounder_accuracy)},
            {"selection_recall", opt(r.selection_recall)},
            {"confounder_recall", opt(r.confounder_recall)},
            {"predicted_selection", r.predicted_selection},
            {"predicted_confounded", r.predicted_confounded},
            {"confusion", r.confusion}};
}

EvalReport eval_report_from_json(const json& j) {
    if (j.value("format", "") != "gisl-eval") throw std::invalid_argument("expected a gisl-eval document");
    EvalReport r;
    r.dag = scores_from_json(j.at("dag"));
    r.adjacency = scores_from_json(j.at("adjacency"));
    r.shd = j.at("shd");
    r.selection_accuracy = opt_from(j.at("selection_accuracy"));
    r.confounder_accuracy = opt_from(j.at("confounder_accuracy"));
    r.selection_recall = opt_from(j.at("selection_recall"));
    r.confounder_recall = opt_from(j.at("confounder_recall"));
    r.predicted_selection = j.at("predicted_selection");
    r.predicted_confounded = j.at("predicted_confounded");
    r.confusion = j.at("confusion").get<std::map<std::string, std::map<std::string, std::size_t>>>();
    return r;
}

namespace {

std::map<std::string, std::optional<double>> flatten(const EvalReport& r) {
    return {{"dag_precision", r.dag.precision},
            {"dag_recall", r.dag.recall},
            {"dag_f1", r.dag.f1},
            {"adjacency_f1", r.adjacency.f1},
            {"shd", static_cast<double>(r.shd)},
            {"selection_accuracy", r.selection_accuracy},
            {"confounder_accuracy", r.confounder_accuracy},
            {"selection_recall", r.selection_recall},
            {"confounder_recall", r.confounder_recall}};
}

}  // namespace

std::string to_table(const EvalReport& r) {
    std::ostringstream out;
    out << std::left << std::setw(22) << "metric" << "value\n";
    for (const auto& [k, v] : flatten(r)) {
        out << std::setw(22) << k;
        if (v)
            out << std::fixed << std::setprecision(4) << *v;
        else
            out << "undefined";
        out << '\n';
    }
    return out.str();
}

std::map<std::string, Summary> aggregate(const std::vector<EvalReport>& reports) {
    std::map<std::string, std::vector<double>> values;
    std::map<std::string, Summary> out;
    for (const auto& r : reports) {
        for (const auto& [k, v] : flatten(r)) {
            if (v)
                values[k].push_back(*v);
            else
                ++out[k].undefined;
        }
    }
    for (const auto& [k, vs] : values) {
        Summary& s = out[k];
        s.count = vs.size();
        double sum = 0;
        for (double v : vs) sum += v;
        s.mean = sum / static_cast<double>(vs.size());
        double ss = 0;
        for (double v : vs) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(vs.size()));
    }
    return out;
}

}  // namespace gisl
