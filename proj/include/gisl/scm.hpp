#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gisl/data.hpp"
#include "gisl/graph.hpp"

namespace gisl {

enum class FunctionFamily { Linear, Square, Sin, Log };

std::string to_string(FunctionFamily f);
double apply_family(FunctionFamily f, double u);

// weight * family((x - center) / scale)
struct Term {
    VertexId var = 0;
    FunctionFamily family = FunctionFamily::Linear;
    double weight = 1.0;
    double center = 0.0;
    double scale = 1.0;

    double eval(double x) const { return weight * apply_family(family, (x - center) / scale); }
};

enum class NoiseKind { Gaussian, Uniform };

// Gaussian: a = mean, b = std.  Uniform: support [a, b].
struct NoiseSpec {
    NoiseKind kind = NoiseKind::Gaussian;
    double a = 0.0;
    double b = 1.0;
};

struct MechanismSpec {
    std::vector<Term> terms;
    NoiseSpec noise;
};

struct SelectionSpec {
    VarPair pair;
    VertexId vertex = 0;  // the selection vertex in the structure
    std::vector<Term> terms;
    double threshold = 0.0;  // keep iff sum of terms > threshold

    bool keeps(const std::vector<double>& values) const;
};

enum class InterventionKind { HardUniform, SoftKnockup, SoftKnockdown, Shift };

std::string to_string(InterventionKind k);

struct InterventionSpec {
    VertexId target = 0;
    InterventionKind kind = InterventionKind::HardUniform;
    double a = 0.0;          // HardUniform lower bound
    double b = 0.0;          // HardUniform upper bound
    double magnitude = 0.0;  // c, d, or the shift amount
    // Soft interventions only: replaces the structural terms before the noise is added.
    std::optional<std::vector<Term>> replacement_terms;
};

struct Scm {
    AugmentedDag structure;
    std::map<VertexId, MechanismSpec> mechanisms;  // observed and latent vertices
    std::vector<SelectionSpec> selections;
    std::map<VertexId, InterventionSpec> interventions;

    void validate() const;
};

enum class InterventionFamily { Hard, Soft };

struct ScmConfig {
    double noise_mean_lo = 0.0, noise_mean_hi = 2.0;
    double noise_std_lo = 0.5, noise_std_hi = 1.5;
    double weight_lo = 0.5, weight_hi = 2.0;
    double retention_lo = 0.3, retention_hi = 0.7;
    std::size_t pilot_rows = 10000;
    InterventionFamily intervention = InterventionFamily::Hard;
    // Fraction of the target's [q05, q95] pilot range covered by a hard interval.
    double hard_width_lo = 0.2, hard_width_hi = 0.5;
    double soft_lo = 0.5, soft_hi = 2.0;
    bool soft_scale_by_std = true;
    bool soft_replaces_mechanism = false;
    // Hard intervals are redrawn until the pilot retention under the perturbation reaches this.
    double min_perturbed_retention = 0.02;
};

Scm sample_scm(const AugmentedDag& structure, std::uint64_t seed, const ScmConfig& config = {});

struct AttemptBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SelectionTiming {
    // Perturbed units must pass selection before and after the perturbation.
    BeforeAndAfter,
    // Only the post-perturbation values are filtered.
    AfterOnly,
};

struct SimulateOptions {
    std::size_t budget_factor = 200;
    SelectionTiming timing = SelectionTiming::BeforeAndAfter;
};

struct DrawResult {
    DataMatrix data;
    std::size_t draws = 0;
};

// Exactly n retained rows, or AttemptBudgetExceeded.
DataMatrix simulate(const Scm& scm, const Regime& regime, std::size_t n, std::uint64_t seed,
                    const SimulateOptions& opts = {});
// A fixed number of draws; returns the retained rows.
DrawResult simulate_draws(const Scm& scm, const Regime& regime, std::size_t draws, std::uint64_t seed,
                          const SimulateOptions& opts = {});

struct GroundTruth {
    std::vector<std::string> variables;  // column order
    std::set<DirectedEdge> causal;       // indices into variables
    PairSet confounded;
    PairSet selected;
};

GroundTruth ground_truth_of(const AugmentedDag& aug);

struct BenchmarkConfig {
    std::size_t num_vars = 10;
    std::size_t num_edges = 10;
    std::size_t n = 1500;
    std::size_t n_conf = 1;
    std::size_t n_sel = 1;
    // When above n_conf / n_sel, the count is drawn uniformly from [n_conf, n_conf_max] per seed.
    std::size_t n_conf_max = 0;
    std::size_t n_sel_max = 0;
    std::uint64_t seed = 0;
    ScmConfig scm;
    SimulateOptions simulate;
    // Empty means every observed variable is perturbed.
    std::vector<std::string> targets;
};

struct BenchmarkInstance {
    Scm scm;
    DataMatrix d0;
    std::map<std::string, DataMatrix> perturbed;
    GroundTruth truth;
};

// The pair counts generate_benchmark uses for this seed.
std::pair<std::size_t, std::size_t> resolved_pair_counts(const BenchmarkConfig& config);

BenchmarkInstance generate_benchmark(const BenchmarkConfig& config, std::size_t workers = 1);
BenchmarkInstance build_instance(const Scm& scm, std::size_t n, std::uint64_t seed,
                                 const SimulateOptions& opts = {}, std::size_t workers = 1);

nlohmann::json to_json(const Scm& scm);
nlohmann::json to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BenchmarkConfig& config);
BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j);

void save_instance(const BenchmarkInstance& inst, const std::filesystem::path& dir);

struct LoadedInstance {
    DataMatrix d0;
    std::map<std::string, DataMatrix> perturbed;
    std::optional<GroundTruth> truth;
};

LoadedInstance load_instance(const std::filesystem::path& dir);

}  // namespace gisl
