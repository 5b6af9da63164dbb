#include "gisl/scm.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "gisl/graph_io.hpp"
#include "gisl/parallel.hpp"
#include "gisl/rng.hpp"

namespace gisl {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(FunctionFamily f) {
    switch (f) {
        case FunctionFamily::Linear: return "linear";
        case FunctionFamily::Square: return "square";
        case FunctionFamily::Sin: return "sin";
        case FunctionFamily::Log: return "log";
    }
    return "linear";
}

double apply_family(FunctionFamily f, double u) {
    switch (f) {
        case FunctionFamily::Linear: return u;
        case FunctionFamily::Square: return u * u;
        case FunctionFamily::Sin: return std::sin(u);
        case FunctionFamily::Log: return std::log(std::abs(u) + 1.0);
    }
    return u;
}

std::string to_string(InterventionKind k) {
    switch (k) {
        case InterventionKind::HardUniform: return "hard_uniform";
        case InterventionKind::SoftKnockup: return "soft_knockup";
        case InterventionKind::SoftKnockdown: return "soft_knockdown";
        case InterventionKind::Shift: return "shift";
    }
    return "hard_uniform";
}

bool SelectionSpec::keeps(const std::vector<double>& values) const {
    double f = 0.0;
    for (const auto& t : terms) f += t.eval(values[t.var]);
    return f > threshold;
}

void Scm::validate() const {
    structure.validate();
    for (const auto& [v, m] : mechanisms) {
        if (m.noise.kind == NoiseKind::Gaussian && !(m.noise.b > 0))
            throw std::logic_error("noise std must be positive");
        if (m.noise.kind == NoiseKind::Uniform && !(m.noise.a < m.noise.b))
            throw std::logic_error("uniform noise needs a < b");
    }
    PairSet sel;
    for (const auto& s : selections) sel.insert(s.pair);
    if (sel != structure.selection_pairs) throw std::logic_error("selections do not match the selection pairs");
    for (const auto& [t, iv] : interventions) {
        if (iv.kind == InterventionKind::HardUniform && !(iv.a < iv.b))
            throw std::logic_error("hard intervention needs a < b");
        if ((iv.kind == InterventionKind::SoftKnockup || iv.kind == InterventionKind::SoftKnockdown) &&
            !(iv.magnitude > 0))
            throw std::logic_error("soft intervention magnitude must be positive");
    }
}

namespace {

FunctionFamily random_family(Rng& rng) {
    return static_cast<FunctionFamily>(std::uniform_int_distribution<int>(0, 3)(rng));
}

double random_weight(Rng& rng, const ScmConfig& c) {
    double w = uniform(rng, c.weight_lo, c.weight_hi);
    return std::bernoulli_distribution(0.5)(rng) ? w : -w;
}

double draw_noise(const NoiseSpec& n, Rng& rng) {
    if (n.kind == NoiseKind::Gaussian) return std::normal_distribution<double>(n.a, n.b)(rng);
    return uniform(rng, n.a, n.b);
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double pos = q * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return v[lo] * (1 - frac) + v[hi] * frac;
}

// Evaluation plan shared by all rows of one regime.
struct Plan {
    std::vector<VertexId> order;  // observed and latent vertices, topological
    std::vector<VertexId> observed;
    std::size_t num_vertices = 0;
    const InterventionSpec* intervention = nullptr;
    std::vector<char> affected;  // descendants of the target (including it)
};

Plan make_plan(const Scm& scm, const Regime& regime) {
    const Dag& g = scm.structure.base;
    Plan p;
    p.num_vertices = g.num_vertices();
    for (VertexId v : g.topological_order()) {
        auto k = g.vertex(v).kind;
        if (k == VertexKind::Observed || k == VertexKind::Latent) p.order.push_back(v);
    }
    p.observed = scm.structure.observed();
    if (regime.target) {
        auto t = g.find(*regime.target);
        if (!t || !scm.interventions.count(*t))
            throw std::invalid_argument("no intervention defined for target " + *regime.target);
        p.intervention = &scm.interventions.at(*t);
        p.affected.assign(p.num_vertices, 0);
        for (VertexId d : g.descendants(*t)) p.affected[d] = 1;
    }
    return p;
}

double structural(const MechanismSpec& m, const std::vector<Term>& terms, const std::vector<double>& values,
                  double noise) {
    double s = noise;
    for (const auto& t : terms) s += t.eval(values[t.var]);
    (void)m;
    return s;
}

bool passes(const Scm& scm, const std::vector<double>& values) {
    for (const auto& s : scm.selections)
        if (!s.keeps(values)) return false;
    return true;
}

struct RowSampler {
    const Scm& scm;
    const Plan& plan;
    SelectionTiming timing;
    std::vector<double> noise, pre, post;

    RowSampler(const Scm& s, const Plan& p, SelectionTiming t)
        : scm(s), plan(p), timing(t), noise(p.num_vertices), pre(p.num_vertices), post(p.num_vertices) {}

    // Fills `post` with one unit's values; false when the unit is filtered out.
    bool draw(Rng& rng) {
        for (VertexId v : plan.order) noise[v] = draw_noise(scm.mechanisms.at(v).noise, rng);
        for (VertexId v : plan.order) {
            const auto& m = scm.mechanisms.at(v);
            pre[v] = structural(m, m.terms, pre, noise[v]);
        }
        if (!plan.intervention) {
            post = pre;
            return passes(scm, post);
        }
        if (timing == SelectionTiming::BeforeAndAfter && !passes(scm, pre)) return false;
        const auto& iv = *plan.intervention;
        post = pre;
        for (VertexId v : plan.order) {
            if (!plan.affected[v]) continue;
            const auto& m = scm.mechanisms.at(v);
            if (v == iv.target) {
                switch (iv.kind) {
                    case InterventionKind::HardUniform: post[v] = uniform(rng, iv.a, iv.b); break;
                    case InterventionKind::SoftKnockup:
                    case InterventionKind::SoftKnockdown: {
                        const auto& terms = iv.replacement_terms ? *iv.replacement_terms : m.terms;
                        double eps = iv.kind == InterventionKind::SoftKnockup ? uniform(rng, 0.0, iv.magnitude)
                                                                              : uniform(rng, -iv.magnitude, 0.0);
                        post[v] = structural(m, terms, post, noise[v]) + eps;
                        break;
                    }
                    case InterventionKind::Shift: post[v] = structural(m, m.terms, post, noise[v]) + iv.magnitude; break;
                }
            } else {
                post[v] = structural(m, m.terms, post, noise[v]);
            }
        }
        return passes(scm, post);
    }
};

std::uint64_t regime_seed(std::uint64_t seed, const Regime& regime) {
    return derive_seed(seed, {hash_string(regime.name())});
}

DrawResult run_sampler(const Scm& scm, const Regime& regime, std::size_t max_draws, std::size_t want,
                       std::uint64_t seed, SelectionTiming timing) {
    Plan plan = make_plan(scm, regime);
    RowSampler sampler(scm, plan, timing);
    Rng rng(regime_seed(seed, regime));
    std::vector<double> flat;
    std::size_t kept = 0, draws = 0;
    while (draws < max_draws && kept < want) {
        ++draws;
        if (!sampler.draw(rng)) continue;
        for (VertexId v : plan.observed) flat.push_back(sampler.post[v]);
        ++kept;
    }
    DrawResult out;
    out.draws = draws;
    out.data.regime = regime;
    for (VertexId v : plan.observed) out.data.columns.push_back(scm.structure.base.vertex(v).label);
    auto p = static_cast<Eigen::Index>(plan.observed.size());
    out.data.values.resize(static_cast<Eigen::Index>(kept), p);
    for (std::size_t r = 0; r < kept; ++r)
        for (Eigen::Index c = 0; c < p; ++c) out.data.values(r, c) = flat[r * plan.observed.size() + c];
    return out;
}

double pilot_retention(const Scm& scm, VertexId target, std::size_t rows, std::uint64_t seed) {
    Regime r = Regime::perturbed(scm.structure.base.vertex(target).label);
    auto res = run_sampler(scm, r, rows, rows, seed, SelectionTiming::BeforeAndAfter);
    return static_cast<double>(res.data.rows()) / static_cast<double>(rows);
}

}  // namespace

Scm sample_scm(const AugmentedDag& structure, std::uint64_t seed, const ScmConfig& config) {
    structure.validate();
    const Dag& g = structure.base;
    Scm scm;
    scm.structure = structure;
    Rng rng(derive_seed(seed, {0x5c}));
    Rng pilot_rng(derive_seed(seed, {0x91}));

    std::vector<VertexId> order;
    for (VertexId v : g.topological_order()) {
        auto k = g.vertex(v).kind;
        if (k == VertexKind::Observed || k == VertexKind::Latent) order.push_back(v);
    }

    // Mechanism shapes first, then pilot statistics to standardize parent inputs.
    for (VertexId v : order) {
        MechanismSpec m;
        m.noise = {NoiseKind::Gaussian, uniform(rng, config.noise_mean_lo, config.noise_mean_hi),
                   uniform(rng, config.noise_std_lo, config.noise_std_hi)};
        for (VertexId p : g.parents(v)) {
            auto k = g.vertex(p).kind;
            if (k != VertexKind::Observed && k != VertexKind::Latent) continue;
            Term t;
            t.var = p;
            t.family = random_family(rng);
            t.weight = random_weight(rng, config);
            m.terms.push_back(t);
        }
        scm.mechanisms[v] = m;
    }

    const std::size_t pilot = config.pilot_rows;
    std::vector<std::vector<double>> cols(g.num_vertices());
    std::vector<double> mean(g.num_vertices(), 0.0), sd(g.num_vertices(), 1.0);
    for (VertexId v : order) {
        auto& m = scm.mechanisms[v];
        for (auto& t : m.terms) {
            t.center = mean[t.var];
            t.scale = sd[t.var];
        }
        auto& col = cols[v];
        col.resize(pilot);
        for (std::size_t r = 0; r < pilot; ++r) {
            double s = draw_noise(m.noise, pilot_rng);
            for (const auto& t : m.terms) s += t.eval(cols[t.var][r]);
            col[r] = s;
        }
        double mu = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(pilot);
        double var = 0.0;
        for (double x : col) var += (x - mu) * (x - mu);
        var /= static_cast<double>(pilot - 1);
        mean[v] = mu;
        sd[v] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }

    // The retention band applies to all selections jointly: each threshold keeps the same share
    // of the pilot rows that passed the earlier ones.
    const auto selection_vertices = g.of_kind(VertexKind::Selection);
    std::vector<char> alive(pilot, 1);
    double keep_each = 1.0;
    for (VertexId s : selection_vertices) {
        const auto& pa = g.parents(s);
        if (pa.size() != 2) throw std::invalid_argument("selection vertices must have exactly two parents");
        SelectionSpec spec;
        spec.pair = VarPair(pa[0], pa[1]);
        spec.vertex = s;
        for (VertexId p : pa) {
            Term t;
            t.var = p;
            t.family = random_family(rng);
            t.weight = random_weight(rng, config);
            t.center = mean[p];
            t.scale = sd[p];
            spec.terms.push_back(t);
        }
        std::vector<double> f(pilot, 0.0);
        for (std::size_t r = 0; r < pilot; ++r)
            for (const auto& t : spec.terms) f[r] += t.eval(cols[t.var][r]);
        if (scm.selections.empty())
            keep_each = std::pow(uniform(rng, config.retention_lo, config.retention_hi),
                                 1.0 / static_cast<double>(selection_vertices.size()));
        std::vector<double> passed;
        for (std::size_t r = 0; r < pilot; ++r)
            if (alive[r]) passed.push_back(f[r]);
        spec.threshold = quantile(passed.empty() ? f : passed, 1.0 - keep_each);
        for (std::size_t r = 0; r < pilot; ++r)
            if (!(f[r] > spec.threshold)) alive[r] = 0;
        scm.selections.push_back(spec);
    }

    for (VertexId t : structure.intervention_targets) {
        InterventionSpec iv;
        iv.target = t;
        double q05 = quantile(cols[t], 0.05), q95 = quantile(cols[t], 0.95);
        if (config.intervention == InterventionFamily::Hard) {
            iv.kind = InterventionKind::HardUniform;
            double range = std::max(q95 - q05, 1e-6);
            for (int attempt = 0; attempt < 30; ++attempt) {
                double width = range * uniform(rng, config.hard_width_lo, config.hard_width_hi);
                iv.a = q05 + uniform(rng, 0.0, range - width);
                iv.b = iv.a + width;
                if (scm.selections.empty()) break;
                scm.interventions[t] = iv;
                if (pilot_retention(scm, t, 2000, derive_seed(seed, {0xfe, t, static_cast<std::uint64_t>(attempt)})) >=
                    config.min_perturbed_retention)
                    break;
            }
        } else {
            bool up = std::bernoulli_distribution(0.5)(rng);
            iv.kind = up ? InterventionKind::SoftKnockup : InterventionKind::SoftKnockdown;
            iv.magnitude = uniform(rng, config.soft_lo, config.soft_hi) * (config.soft_scale_by_std ? sd[t] : 1.0);
            if (config.soft_replaces_mechanism) {
                std::vector<Term> terms = scm.mechanisms[t].terms;
                for (auto& term : terms) {
                    term.family = random_family(rng);
                    term.weight = random_weight(rng, config);
                }
                iv.replacement_terms = terms;
            }
        }
        scm.interventions[t] = iv;
    }
    scm.validate();
    return scm;
}

DataMatrix simulate(const Scm& scm, const Regime& regime, std::size_t n, std::uint64_t seed,
                    const SimulateOptions& opts) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    std::size_t budget = opts.budget_factor * n;
    auto res = run_sampler(scm, regime, budget, n, seed, opts.timing);
    if (res.data.rows() < n)
        throw AttemptBudgetExceeded("only " + std::to_string(res.data.rows()) + " of " + std::to_string(n) +
                                    " rows survived selection after " + std::to_string(budget) + " draws (" +
                                    regime.name() + ")");
    return std::move(res.data);
}

DrawResult simulate_draws(const Scm& scm, const Regime& regime, std::size_t draws, std::uint64_t seed,
                          const SimulateOptions& opts) {
    return run_sampler(scm, regime, draws, draws, seed, opts.timing);
}

GroundTruth ground_truth_of(const AugmentedDag& aug) {
    GroundTruth t;
    auto obs = aug.observed();
    std::map<VertexId, std::size_t> pos;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        pos[obs[i]] = i;
        t.variables.push_back(aug.base.vertex(obs[i]).label);
    }
    for (auto [a, b] : aug.base.edges())
        if (pos.count(a) && pos.count(b)) t.causal.emplace(pos[a], pos[b]);
    for (auto p : aug.confounded_pairs) t.confounded.insert(VarPair(pos.at(p.a), pos.at(p.b)));
    for (auto p : aug.selection_pairs) t.selected.insert(VarPair(pos.at(p.a), pos.at(p.b)));
    return t;
}

BenchmarkInstance build_instance(const Scm& scm, std::size_t n, std::uint64_t seed, const SimulateOptions& opts,
                                 std::size_t workers) {
    BenchmarkInstance inst;
    inst.scm = scm;
    inst.truth = ground_truth_of(scm.structure);
    std::vector<Regime> regimes{Regime::observational()};
    for (const auto& [t, iv] : scm.interventions) regimes.push_back(Regime::perturbed(scm.structure.base.vertex(t).label));
    std::vector<DataMatrix> out(regimes.size());
    parallel_for(regimes.size(), workers, [&](std::size_t i) { out[i] = simulate(scm, regimes[i], n, seed, opts); });
    inst.d0 = std::move(out[0]);
    for (std::size_t i = 1; i < regimes.size(); ++i) inst.perturbed[*regimes[i].target] = std::move(out[i]);
    return inst;
}

std::pair<std::size_t, std::size_t> resolved_pair_counts(const BenchmarkConfig& config) {
    Rng rng(derive_seed(config.seed, {5}));
    auto draw = [&](std::size_t lo, std::size_t hi) {
        if (hi <= lo) return lo;
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    std::size_t conf = draw(config.n_conf, config.n_conf_max);
    std::size_t sel = draw(config.n_sel, config.n_sel_max);
    return {conf, sel};
}

BenchmarkInstance generate_benchmark(const BenchmarkConfig& config, std::size_t workers) {
    Dag dag = generate_er_dag(config.num_vars, config.num_edges, derive_seed(config.seed, {1}));
    auto [n_conf, n_sel] = resolved_pair_counts(config);
    AugmentedDag aug = augment_structure(dag, n_conf, n_sel, derive_seed(config.seed, {2}));
    if (!config.targets.empty()) {
        aug.intervention_targets.clear();
        for (const auto& label : config.targets) {
            auto v = aug.base.find(label);
            if (!v || aug.base.vertex(*v).kind != VertexKind::Observed)
                throw std::invalid_argument("unknown target variable " + label);
            aug.intervention_targets.insert(*v);
        }
    }
    Scm scm = sample_scm(aug, derive_seed(config.seed, {3}), config.scm);
    return build_instance(scm, config.n, derive_seed(config.seed, {4}), config.simulate, workers);
}

// ---- serialization ----

namespace {

json terms_json(const Scm& scm, const std::vector<Term>& terms) {
    json arr = json::array();
    for (const auto& t : terms)
        arr.push_back({{"input", scm.structure.base.vertex(t.var).label},
                       {"family", to_string(t.family)},
                       {"weight", t.weight},
                       {"center", t.center},
                       {"scale", t.scale}});
    return arr;
}

json pairs_json(const PairSet& ps) {
    json arr = json::array();
    for (auto p : ps) arr.push_back({p.a, p.b});
    return arr;
}

PairSet pairs_from(const json& j) {
    PairSet ps;
    for (const auto& e : j) ps.insert(VarPair(e.at(0).get<VertexId>(), e.at(1).get<VertexId>()));
    return ps;
}

}  // namespace

json to_json(const Scm& scm) {
    json j;
    j["format"] = "gisl-scm";
    j["version"] = 1;
    j["structure"] = to_json(scm.structure);
    j["mechanisms"] = json::array();
    for (const auto& [v, m] : scm.mechanisms) {
        j["mechanisms"].push_back({{"vertex", scm.structure.base.vertex(v).label},
                                   {"noise", m.noise.kind == NoiseKind::Gaussian ? "gaussian" : "uniform"},
                                   {"noise_a", m.noise.a},
                                   {"noise_b", m.noise.b},
                                   {"terms", terms_json(scm, m.terms)}});
    }
    j["selections"] = json::array();
    for (const auto& s : scm.selections)
        j["selections"].push_back({{"vertex", scm.structure.base.vertex(s.vertex).label},
                                   {"threshold", s.threshold},
                                   {"terms", terms_json(scm, s.terms)}});
    j["interventions"] = json::array();
    for (const auto& [t, iv] : scm.interventions) {
        json e{{"target", scm.structure.base.vertex(t).label}, {"kind", to_string(iv.kind)}};
        if (iv.kind == InterventionKind::HardUniform) {
            e["a"] = iv.a;
            e["b"] = iv.b;
        } else {
            e["magnitude"] = iv.magnitude;
        }
        if (iv.replacement_terms) e["replacement_terms"] = terms_json(scm, *iv.replacement_terms);
        j["interventions"].push_back(e);
    }
    return j;
}

json to_json(const GroundTruth& t) {
    json j;
    j["format"] = "gisl-truth";
    j["version"] = 1;
    j["variables"] = t.variables;
    j["causal_edges"] = json::array();
    for (auto [a, b] : t.causal) j["causal_edges"].push_back({a, b});
    j["confounded_pairs"] = pairs_json(t.confounded);
    j["selection_pairs"] = pairs_json(t.selected);
    return j;
}

GroundTruth ground_truth_from_json(const json& j) {
    if (j.value("format", "") != "gisl-truth") throw std::invalid_argument("expected a gisl-truth document");
    GroundTruth t;
    t.variables = j.at("variables").get<std::vector<std::string>>();
    for (const auto& e : j.at("causal_edges")) t.causal.emplace(e.at(0).get<VertexId>(), e.at(1).get<VertexId>());
    t.confounded = pairs_from(j.at("confounded_pairs"));
    t.selected = pairs_from(j.at("selection_pairs"));
    return t;
}

json to_json(const BenchmarkConfig& c) {
    return {{"num_vars", c.num_vars},
            {"num_edges", c.num_edges},
            {"n", c.n},
            {"n_conf", c.n_conf},
            {"n_sel", c.n_sel},
            {"n_conf_max", c.n_conf_max},
            {"n_sel_max", c.n_sel_max},
            {"seed", c.seed},
            {"intervention", c.scm.intervention == InterventionFamily::Hard ? "hard" : "soft"},
            {"noise_mean", {c.scm.noise_mean_lo, c.scm.noise_mean_hi}},
            {"noise_std", {c.scm.noise_std_lo, c.scm.noise_std_hi}},
            {"retention", {c.scm.retention_lo, c.scm.retention_hi}},
            {"soft_replaces_mechanism", c.scm.soft_replaces_mechanism},
            {"selection_timing", c.simulate.timing == SelectionTiming::BeforeAndAfter ? "before_and_after" : "after_only"},
            {"targets", c.targets}};
}

BenchmarkConfig benchmark_config_from_json(const json& j) {
    BenchmarkConfig c;
    c.num_vars = j.value("num_vars", c.num_vars);
    c.num_edges = j.value("num_edges", c.num_edges);
    c.n = j.value("n", c.n);
    c.n_conf = j.value("n_conf", c.n_conf);
    c.n_sel = j.value("n_sel", c.n_sel);
    c.n_conf_max = j.value("n_conf_max", c.n_conf_max);
    c.n_sel_max = j.value("n_sel_max", c.n_sel_max);
    c.seed = j.value("seed", c.seed);
    std::string kind = j.value("intervention", std::string("hard"));
    if (kind != "hard" && kind != "soft") throw std::invalid_argument("intervention must be hard or soft");
    c.scm.intervention = kind == "hard" ? InterventionFamily::Hard : InterventionFamily::Soft;
    if (j.contains("noise_mean")) {
        c.scm.noise_mean_lo = j["noise_mean"].at(0);
        c.scm.noise_mean_hi = j["noise_mean"].at(1);
    }
    if (j.contains("noise_std")) {
        c.scm.noise_std_lo = j["noise_std"].at(0);
        c.scm.noise_std_hi = j["noise_std"].at(1);
    }
    if (j.contains("retention")) {
        c.scm.retention_lo = j["retention"].at(0);
        c.scm.retention_hi = j["retention"].at(1);
    }
    c.scm.soft_replaces_mechanism = j.value("soft_replaces_mechanism", false);
    std::string timing = j.value("selection_timing", std::string("before_and_after"));
    if (timing != "before_and_after" && timing != "after_only")
        throw std::invalid_argument("selection_timing must be before_and_after or after_only");
    c.simulate.timing = timing == "after_only" ? SelectionTiming::AfterOnly : SelectionTiming::BeforeAndAfter;
    c.targets = j.value("targets", std::vector<std::string>{});
    return c;
}

void save_instance(const BenchmarkInstance& inst, const fs::path& dir) {
    fs::create_directories(dir / "data");
    write_file_atomic(dir / "scm.json", to_json(inst.scm).dump(2) + "\n");
    write_file_atomic(dir / "truth.json", to_json(inst.truth).dump(2) + "\n");
    save_matrix(inst.d0, dir / "data" / "observational.csv");
    for (const auto& [label, m] : inst.perturbed) save_matrix(m, dir / "data" / ("perturbed_" + label + ".csv"));
}

LoadedInstance load_instance(const fs::path& dir) {
    if (!fs::is_directory(dir / "data")) throw std::invalid_argument(dir.string() + " is not an instance directory");
    LoadedInstance out;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir / "data"))
        if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    bool have_d0 = false;
    for (const auto& f : files) {
        DataMatrix m = load_matrix(f);
        if (m.regime.is_observational()) {
            if (have_d0) throw std::invalid_argument("more than one observational matrix in " + dir.string());
            out.d0 = std::move(m);
            have_d0 = true;
        } else {
            std::string t = *m.regime.target;
            out.perturbed[t] = std::move(m);
        }
    }
    if (!have_d0) throw std::invalid_argument("no observational matrix in " + dir.string());
    if (fs::exists(dir / "truth.json"))
        out.truth = ground_truth_from_json(json::parse(read_file(dir / "truth.json")));
    return out;
}

}  // namespace gisl
