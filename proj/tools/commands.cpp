#include "commands.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gisl/backend.hpp"
#include "gisl/data.hpp"
#include "gisl/gisl.hpp"
#include "gisl/graph_io.hpp"
#include "gisl/ingest.hpp"
#include "gisl/manifest.hpp"
#include "gisl/metrics.hpp"
#include "gisl/parallel.hpp"
#include "gisl/scm.hpp"
#include "gisl/skeleton.hpp"

namespace gisl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Shared {
    std::uint64_t seed = 0;
    double alpha = 0.05;
    std::string out;
    std::size_t workers = default_workers();
    std::string config;
};

void add_shared(CLI::App* sub, Shared& s) {
    sub->add_option("--seed", s.seed, "Base random seed");
    sub->add_option("--alpha", s.alpha, "Significance level of every CI test");
    sub->add_option("--out", s.out, "Output directory");
    sub->add_option("--workers", s.workers, "Worker threads");
    sub->add_option("--config", s.config, "TOML or JSON config file (a run manifest also works); flags win");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ','))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

json parse_config(const fs::path& p) {
    std::string text;
    try {
        text = read_file(p);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot read config: ") + e.what());
    }
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(p.string() + ": " + e.what());
        }
        if (j.value("format", "") == "gisl-run-manifest") return j.at("config");
        return j;
    }
    std::istringstream in(text);
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
    json j = json::object();
    for (const auto& it : items) {
        if (it.name == "++" || it.name == "--") continue;
        json* node = &j;
        for (const auto& parent : it.parents) node = &(*node)[parent];
        if (it.inputs.size() == 1)
            (*node)[it.name] = it.inputs[0];
        else
            (*node)[it.name] = it.inputs;
    }
    return j;
}

std::string config_value(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) s += (s.empty() ? "" : ",") + config_value(e);
        return s;
    }
    return v.dump();
}

// Config values become option defaults, so anything given on the command line still wins.
void apply_config(CLI::App* sub, const std::string& path) {
    if (path.empty()) return;
    json cfg = parse_config(path);
    if (!cfg.is_object()) throw ConfigError(path + ": expected a table of settings");
    json flat = json::object();
    for (const auto& [k, v] : cfg.items())
        if (!v.is_object()) flat[k] = v;
    if (cfg.contains(sub->get_name()) && cfg[sub->get_name()].is_object())
        for (const auto& [k, v] : cfg[sub->get_name()].items()) flat[k] = v;
    for (const auto& [k, v] : flat.items()) {
        std::string key = k;
        std::replace(key.begin(), key.end(), '_', '-');
        if (key == "config") continue;
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw ConfigError("unknown setting '" + k + "' for " + sub->get_name());
        if (opt->count() > 0) continue;
        if (v.is_null()) continue;
        opt->run_callback_for_default();
        try {
            opt->default_val(config_value(v));
        } catch (const CLI::Error& e) {
            throw ConfigError("setting '" + k + "': " + e.what());
        }
    }
}

json typed(const std::string& s) {
    if (s.empty()) return nullptr;
    std::uint64_t u = 0;
    auto ru = std::from_chars(s.data(), s.data() + s.size(), u);
    if (ru.ec == std::errc() && ru.ptr == s.data() + s.size()) return u;
    double d = 0;
    auto rd = std::from_chars(s.data(), s.data() + s.size(), d);
    if (rd.ec == std::errc() && rd.ptr == s.data() + s.size()) return d;
    return s;
}

json resolved_config(const CLI::App* sub) {
    json out = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        std::string name = opt->get_single_name();
        if (name == "help" || name == "config") continue;
        std::string s = opt->count() ? opt->results().back() : opt->get_default_str();
        if (opt->get_expected_min() == 0) {
            out[name] = opt->count() > 0 || s == "true" || s == "1";
            continue;
        }
        out[name] = typed(s);
    }
    return out;
}

void check_shared(const Shared& s) {
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
    if (s.workers == 0) throw ConfigError("--workers must be positive");
}

fs::path require_out(const Shared& s) {
    if (s.out.empty()) throw ConfigError("--out is required");
    std::error_code ec;
    fs::create_directories(s.out, ec);
    if (ec) throw ConfigError("cannot create " + s.out + ": " + ec.message());
    return s.out;
}

void write_json(const fs::path& p, const json& j) { write_file_atomic(p, j.dump(2) + "\n"); }

json load_json(const fs::path& p) {
    if (!fs::exists(p)) throw ConfigError(p.string() + " does not exist");
    try {
        return json::parse(read_file(p));
    } catch (const json::parse_error& e) {
        throw std::runtime_error(p.string() + ": " + e.what());
    }
}

// ---- simulate

struct SimulateArgs {
    std::size_t num_vars = 10;
    std::size_t num_edges = 0;  // 0 = num_vars
    std::size_t n = 1500;
    std::size_t n_conf = 1;
    std::size_t n_sel = 1;
    std::size_t n_conf_max = 0;
    std::size_t n_sel_max = 0;
    std::size_t seeds = 1;
    std::string intervention = "hard";
    std::string timing = "before_and_after";
    std::string targets;
    bool soft_replaces = false;
    bool export_expression = false;
};

void add_benchmark_options(CLI::App* sub, SimulateArgs& a) {
    sub->add_option("--num-vars", a.num_vars, "Observed variables");
    sub->add_option("--num-edges", a.num_edges, "Causal edges among observed variables (0 = num-vars)");
    sub->add_option("--n", a.n, "Retained rows per regime");
    sub->add_option("--n-conf", a.n_conf, "Confounded pairs");
    sub->add_option("--n-sel", a.n_sel, "Selection pairs");
    sub->add_option("--n-conf-max", a.n_conf_max, "Draw the confounded pair count from [n-conf, n-conf-max]");
    sub->add_option("--n-sel-max", a.n_sel_max, "Draw the selection pair count from [n-sel, n-sel-max]");
    sub->add_option("--intervention", a.intervention, "hard or soft");
    sub->add_option("--selection-timing", a.timing, "before_and_after or after_only");
    sub->add_flag("--soft-replaces-mechanism", a.soft_replaces, "Soft interventions also redraw the mechanism");
}

BenchmarkConfig benchmark_config(const SimulateArgs& a, std::uint64_t seed) {
    if (a.num_vars < 2) throw ConfigError("--num-vars must be at least 2");
    std::size_t edges = a.num_edges ? a.num_edges : a.num_vars;
    if (edges > a.num_vars * (a.num_vars - 1) / 2)
        throw ConfigError("--num-edges " + std::to_string(edges) + " exceeds the " +
                          std::to_string(a.num_vars * (a.num_vars - 1) / 2) + " possible pairs");
    if (a.n == 0) throw ConfigError("--n must be positive");
    if (a.intervention != "hard" && a.intervention != "soft") throw ConfigError("--intervention must be hard or soft");
    json j = {{"num_vars", a.num_vars},
              {"num_edges", edges},
              {"n", a.n},
              {"n_conf", a.n_conf},
              {"n_sel", a.n_sel},
              {"n_conf_max", a.n_conf_max},
              {"n_sel_max", a.n_sel_max},
              {"seed", seed},
              {"intervention", a.intervention},
              {"selection_timing", a.timing},
              {"soft_replaces_mechanism", a.soft_replaces},
              {"targets", split_list(a.targets)}};
    try {
        return benchmark_config_from_json(j);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

BenchmarkInstance generate_checked(const BenchmarkConfig& cfg, std::size_t workers) {
    try {
        return generate_benchmark(cfg, workers);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

int cmd_simulate(CLI::App* sub, const Shared& sh, const SimulateArgs& a) {
    check_shared(sh);
    fs::path out = require_out(sh);
    if (a.seeds == 0) throw ConfigError("--seeds must be positive");
    RunManifest m{"simulate", resolved_config(sub), sh.seed, {}, {}};
    for (std::size_t r = 0; r < a.seeds; ++r) {
        std::uint64_t seed = sh.seed + r;
        BenchmarkConfig cfg = benchmark_config(a, seed);
        fs::path dir = a.seeds == 1 ? out : out / ("seed_" + std::to_string(seed));
        BenchmarkInstance inst = generate_checked(cfg, sh.workers);
        save_instance(inst, dir);
        write_json(dir / "config.json", to_json(cfg));
        if (a.export_expression)
            export_expression(expression_from_regimes(inst.d0, inst.perturbed), dir / "expression.csv", TableFormat::Csv,
                              "perturbation");
        m.outputs.push_back(dir);
        std::cout << dir.string() << ": " << inst.truth.variables.size() << " variables, " << inst.truth.causal.size()
                  << " edges, " << inst.perturbed.size() << " perturbed regimes\n";
    }
    write_manifest(m, out / "manifest.json");
    return 0;
}

// ---- discover

struct DiscoverArgs {
    std::string instance;
    std::string expression;
    std::string label_column = "perturbation";
    std::string control = "control";
    std::string genes;
    bool genes_closure = false;
    bool log1p = false;
    std::size_t max_cond = 3;
    std::size_t correction_depth = 2;
    std::size_t n_max = 1500;
    std::string null_mode = "gamma";
    std::size_t permutations = 500;
    bool dump_tests = false;
};

void add_analysis_options(CLI::App* sub, DiscoverArgs& a) {
    sub->add_option("--max-cond", a.max_cond, "Largest conditioning set in the skeleton search");
    sub->add_option("--correction-depth", a.correction_depth, "Largest neighbour set tried when correcting patterns");
    sub->add_option("--n-max", a.n_max, "Row cap per CI test");
    sub->add_option("--null", a.null_mode, "gamma or permutation");
    sub->add_option("--permutations", a.permutations, "Permutations for the permutation null");
}

KernelCiConfig ci_config(const DiscoverArgs& a, const Shared& sh) {
    KernelCiConfig ci;
    ci.alpha = sh.alpha;
    ci.n_max = a.n_max;
    ci.seed = sh.seed;
    if (a.null_mode == "gamma")
        ci.null_mode = NullMode::Gamma;
    else if (a.null_mode == "permutation")
        ci.null_mode = NullMode::Permutation;
    else
        throw ConfigError("--null must be gamma or permutation");
    ci.permutations = a.permutations;
    if (a.n_max < 50) throw ConfigError("--n-max must be at least 50");
    return ci;
}

void print_summary(const GislResult& r, std::size_t tests) {
    std::size_t untested = 0;
    for (const auto& e : r.audit) {
        if (e.status != PairStatus::Untested) continue;
        ++untested;
        std::cerr << "warning: " << r.names[e.pair.a] << " - " << r.names[e.pair.b] << " untested: " << e.note << "\n";
    }
    std::cout << r.names.size() << " variables, " << r.skeleton.edges.size() << " adjacencies, "
              << r.causal_edges().size() << " causal, " << r.latent.size() << " latent, "
              << r.causal_and_latent.size() << " causal+latent, " << r.selected.size() << " selection, "
              << r.unknown.size() << " unknown, " << untested << " untested, " << tests << " CI tests\n";
}

int cmd_discover(CLI::App* sub, const Shared& sh, const DiscoverArgs& a) {
    check_shared(sh);
    if (a.instance.empty() == a.expression.empty()) throw ConfigError("give exactly one of --instance or --expression");
    KernelCiConfig ci = ci_config(a, sh);
    fs::path out = require_out(sh);
    RunManifest m{"discover", resolved_config(sub), sh.seed, {}, {}};

    DataMatrix d0;
    std::map<std::string, DataMatrix> perturbed;
    if (!a.instance.empty()) {
        if (!fs::is_directory(a.instance)) throw ConfigError(a.instance + " is not a directory");
        LoadedInstance li = load_instance(a.instance);
        d0 = std::move(li.d0);
        perturbed = std::move(li.perturbed);
        for (const auto& e : fs::directory_iterator(fs::path(a.instance) / "data")) m.inputs.push_back(e.path());
        std::sort(m.inputs.begin(), m.inputs.end());
    } else {
        if (!fs::exists(a.expression)) throw ConfigError(a.expression + " does not exist");
        ExpressionTable t = load_expression(a.expression, format_from_path(a.expression), a.label_column, a.control);
        m.inputs.push_back(a.expression);
        if (a.log1p) apply_log1p(t);
        for (const auto& g : t.zero_variance_genes) std::cerr << "warning: gene " << g << " has zero variance\n";
        std::optional<std::vector<std::string>> subset;
        if (!a.genes.empty()) {
            subset = split_list(a.genes);
            for (const auto& g : *subset)
                if (std::find(t.genes.begin(), t.genes.end(), g) == t.genes.end())
                    throw ConfigError("gene " + g + " is not in " + a.expression);
            if (a.genes_closure) {
                RegimeSplit all = split_regimes(t);
                Skeleton sk = recover_skeleton(all.d0, sh.alpha, a.max_cond);
                std::set<std::string> keep(subset->begin(), subset->end());
                for (const auto& g : *subset) {
                    auto idx = static_cast<std::size_t>(std::find(t.genes.begin(), t.genes.end(), g) - t.genes.begin());
                    for (auto nb : sk.neighbors(idx)) keep.insert(t.genes[nb]);
                }
                subset.emplace();
                for (const auto& g : t.genes)
                    if (keep.count(g)) subset->push_back(g);
            }
        }
        RegimeSplit split = split_regimes(t, subset);
        d0 = std::move(split.d0);
        perturbed = std::move(split.perturbed);
    }

    KernelBackend backend(std::move(d0), std::move(perturbed), ci);
    GislConfig g;
    g.max_cond = a.max_cond;
    g.correction_depth = a.correction_depth;
    g.workers = sh.workers;
    GislResult r = run_gisl(backend, g);

    write_json(out / "result.json", to_json(r));
    write_file_atomic(out / "result.dot", to_dot(r));
    m.outputs = {out / "result.json", out / "result.dot"};
    if (a.dump_tests) {
        backend.write_records_csv(out / "tests.csv");
        m.outputs.push_back(out / "tests.csv");
    }
    write_manifest(m, out / "manifest.json");
    print_summary(r, backend.tests_run());
    return 0;
}

// ---- evaluate

struct EvaluateArgs {
    std::string result;
    std::string truth;
    std::string instance;
    std::string zscores;
    double threshold = 0.15;
};

json zscore_json(const std::optional<ZscoreEval>& z, std::size_t predicted, double threshold) {
    json j = {{"format", "gisl-zscore-eval"}, {"version", 1}, {"threshold", threshold}, {"predicted_pairs", predicted}};
    if (!z) {
        j["accuracy"] = nullptr;
        j["evaluable"] = 0;
        return j;
    }
    j["accuracy"] = z->accuracy;
    j["correct"] = z->correct;
    j["evaluable"] = z->evaluable;
    j["missing_genes"] = z->missing_genes;
    json pairs = json::array();
    for (const auto& d : z->details) {
        pairs.push_back({{"gene1", d.gene1},
                         {"gene2", d.gene2},
                         {"z1", d.z1 ? json(*d.z1) : json(nullptr)},
                         {"z2", d.z2 ? json(*d.z2) : json(nullptr)},
                         {"evaluable", d.evaluable},
                         {"correct", d.correct}});
    }
    j["pairs"] = pairs;
    return j;
}

int cmd_evaluate(CLI::App* sub, const Shared& sh, const EvaluateArgs& a) {
    check_shared(sh);
    if (a.result.empty()) throw ConfigError("--result is required");
    if (a.truth.empty() && a.instance.empty() && a.zscores.empty())
        throw ConfigError("give --truth, --instance or --zscores");
    if (!a.truth.empty() && !a.instance.empty()) throw ConfigError("give only one of --truth or --instance");
    GislResult r = gisl_result_from_json(load_json(a.result));
    RunManifest m{"evaluate", resolved_config(sub), sh.seed, {a.result}, {}};
    fs::path out = sh.out.empty() ? fs::path() : require_out(sh);

    if (!a.truth.empty() || !a.instance.empty()) {
        fs::path tp = !a.truth.empty() ? fs::path(a.truth) : fs::path(a.instance) / "truth.json";
        GroundTruth truth = ground_truth_from_json(load_json(tp));
        m.inputs.push_back(tp);
        EvalReport rep;
        try {
            rep = evaluate(r, truth);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        std::cout << to_table(rep);
        if (!out.empty()) {
            write_json(out / "eval.json", to_json(rep));
            write_file_atomic(out / "eval.txt", to_table(rep));
            m.outputs.push_back(out / "eval.json");
            m.outputs.push_back(out / "eval.txt");
        }
    }
    if (!a.zscores.empty()) {
        if (!fs::exists(a.zscores)) throw ConfigError(a.zscores + " does not exist");
        ZscoreTable z = load_zscores(a.zscores);
        m.inputs.push_back(a.zscores);
        std::vector<std::pair<std::string, std::string>> pairs;
        for (auto p : r.selected) pairs.emplace_back(r.names[p.a], r.names[p.b]);
        std::optional<ZscoreEval> ev;
        try {
            ev = zscore_eval(pairs, z, a.threshold);
        } catch (const EmptyEvaluable& e) {
            std::cerr << "warning: " << e.what() << "\n";
        }
        if (ev) {
            std::cout << "zscore selection accuracy " << std::fixed << std::setprecision(4) << ev->accuracy << " ("
                      << ev->correct << "/" << ev->evaluable << " pairs above " << a.threshold << ")\n";
            for (const auto& g : ev->missing_genes) std::cerr << "warning: no Z-score for " << g << "\n";
        } else {
            std::cout << "zscore selection accuracy undefined\n";
        }
        if (!out.empty()) {
            write_json(out / "zscore_eval.json", zscore_json(ev, pairs.size(), a.threshold));
            m.outputs.push_back(out / "zscore_eval.json");
        }
    }
    if (!out.empty()) write_manifest(m, out / "manifest.json");
    return 0;
}

// ---- bench

struct BenchArgs {
    std::string grid;
    std::string num_vars = "10";
    std::string num_edges = "0";
    std::string n = "1500";
    std::string intervention = "hard";
    std::string n_sel = "1";
    std::string n_conf = "1";
    std::size_t n_sel_max = 0;
    std::size_t n_conf_max = 0;
    std::size_t seeds = 10;
    bool keep_data = false;
};

struct Cell {
    std::size_t num_vars, num_edges, n, n_sel, n_conf;
    std::string intervention;
    std::size_t n_sel_max = 0, n_conf_max = 0;

    static std::string range(std::size_t lo, std::size_t hi) {
        return hi > lo ? std::to_string(lo) + "-" + std::to_string(hi) : std::to_string(lo);
    }
    std::string key() const {
        return "p" + std::to_string(num_vars) + "_e" + std::to_string(num_edges) + "_n" + std::to_string(n) + "_" +
               intervention + "_sel" + range(n_sel, n_sel_max) + "_conf" + range(n_conf, n_conf_max);
    }
};

std::vector<std::string> grid_values(const json& grid, const std::string& key, const std::string& fallback) {
    if (!grid.contains(key)) return split_list(fallback);
    const json& v = grid[key];
    std::vector<std::string> out;
    if (v.is_array())
        for (const auto& e : v) out.push_back(config_value(e));
    else
        out.push_back(config_value(v));
    return out;
}

std::vector<std::size_t> to_sizes(const std::vector<std::string>& vs, const std::string& what) {
    std::vector<std::size_t> out;
    for (const auto& s : vs) {
        std::size_t v = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("bad " + what + " value '" + s + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty " + what + " list");
    return out;
}

std::vector<Cell> grid_cells(const BenchArgs& a) {
    json grid = json::object();
    if (!a.grid.empty()) {
        grid = load_json(a.grid);
        for (const auto& [k, v] : grid.items())
            if (k != "num_vars" && k != "num_edges" && k != "n" && k != "intervention" && k != "n_sel" && k != "n_conf" &&
                k != "n_sel_max" && k != "n_conf_max")
                throw ConfigError("unknown grid key '" + k + "'");
    }
    std::size_t sel_max = grid.contains("n_sel_max") ? grid["n_sel_max"].get<std::size_t>() : a.n_sel_max;
    std::size_t conf_max = grid.contains("n_conf_max") ? grid["n_conf_max"].get<std::size_t>() : a.n_conf_max;
    auto nv = to_sizes(grid_values(grid, "num_vars", a.num_vars), "num_vars");
    auto ne = to_sizes(grid_values(grid, "num_edges", a.num_edges), "num_edges");
    auto ns = to_sizes(grid_values(grid, "n", a.n), "n");
    auto sel = to_sizes(grid_values(grid, "n_sel", a.n_sel), "n_sel");
    auto conf = to_sizes(grid_values(grid, "n_conf", a.n_conf), "n_conf");
    auto kinds = grid_values(grid, "intervention", a.intervention);
    std::vector<Cell> cells;
    for (auto p : nv)
        for (auto e : ne)
            for (auto n : ns)
                for (const auto& k : kinds)
                    for (auto s : sel)
                        for (auto c : conf) cells.push_back({p, e ? e : p, n, s, c, k, sel_max, conf_max});
    return cells;
}

int cmd_bench(CLI::App* sub, const Shared& sh, const BenchArgs& a, const DiscoverArgs& da) {
    check_shared(sh);
    if (a.seeds == 0) throw ConfigError("--seeds must be positive");
    std::vector<Cell> cells = grid_cells(a);
    KernelCiConfig ci = ci_config(da, sh);
    std::vector<BenchmarkConfig> cfgs;
    for (const auto& c : cells) {
        SimulateArgs s;
        s.num_vars = c.num_vars;
        s.num_edges = c.num_edges;
        s.n = c.n;
        s.n_sel = c.n_sel;
        s.n_conf = c.n_conf;
        s.n_sel_max = c.n_sel_max;
        s.n_conf_max = c.n_conf_max;
        s.intervention = c.intervention;
        cfgs.push_back(benchmark_config(s, sh.seed));
    }
    fs::path out = require_out(sh);
    RunManifest m{"bench", resolved_config(sub), sh.seed, {}, {}};
    if (!a.grid.empty()) m.inputs.push_back(a.grid);

    struct Job {
        std::size_t cell;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t r = 0; r < a.seeds; ++r) jobs.push_back({c, sh.seed + r});

    std::vector<std::optional<EvalReport>> reports(jobs.size());
    std::mutex io;
    std::size_t reused = 0;
    parallel_for(jobs.size(), sh.workers, [&](std::size_t idx) {
        const Job& job = jobs[idx];
        fs::path dir = out / "runs" / cells[job.cell].key() / ("seed_" + std::to_string(job.seed));
        fs::path eval_path = dir / "eval.json";
        if (fs::exists(eval_path)) {
            try {
                reports[idx] = eval_report_from_json(json::parse(read_file(eval_path)));
                std::lock_guard lock(io);
                ++reused;
                return;
            } catch (const std::exception&) {
                // rerun a damaged record
            }
        }
        BenchmarkConfig cfg = cfgs[job.cell];
        cfg.seed = job.seed;
        BenchmarkInstance inst = generate_checked(cfg, 1);
        fs::create_directories(dir);
        if (a.keep_data) save_instance(inst, dir / "instance");
        KernelCiConfig run_ci = ci;
        run_ci.seed = job.seed;
        GislConfig g;
        g.max_cond = da.max_cond;
        g.correction_depth = da.correction_depth;
        g.workers = 1;
        GislResult r = run_gisl(inst.d0, inst.perturbed, run_ci, g);
        EvalReport rep = evaluate(r, inst.truth);
        write_json(dir / "result.json", to_json(r));
        write_json(dir / "truth.json", to_json(inst.truth));
        write_json(eval_path, to_json(rep));  // written last; its presence marks the run complete
        reports[idx] = rep;
        std::lock_guard lock(io);
        std::cerr << cells[job.cell].key() << " seed " << job.seed << ": selection accuracy "
                  << (rep.selection_accuracy ? std::to_string(*rep.selection_accuracy) : "undefined") << ", dag f1 "
                  << rep.dag.f1 << "\n";
    });

    std::ostringstream csv, txt;
    csv << "cell,num_vars,num_edges,n,intervention,n_sel,n_conf,metric,mean,std,count,undefined\n";
    for (std::size_t c = 0; c < cells.size(); ++c) {
        std::vector<EvalReport> rs;
        for (std::size_t idx = 0; idx < jobs.size(); ++idx)
            if (jobs[idx].cell == c) rs.push_back(*reports[idx]);
        auto agg = aggregate(rs);
        const Cell& cell = cells[c];
        txt << cell.key() << " (" << rs.size() << " seeds)\n";
        for (const auto& [metric, s] : agg) {
            csv << cell.key() << ',' << cell.num_vars << ',' << cell.num_edges << ',' << cell.n << ',' << cell.intervention << ','
                << cell.n_sel << ',' << cell.n_conf << ',' << metric << ',' << format_double(s.mean) << ','
                << format_double(s.std) << ',' << s.count << ',' << s.undefined << '\n';
            txt << "  " << std::left << std::setw(22) << metric;
            if (s.count)
                txt << std::fixed << std::setprecision(3) << s.mean << " +- " << s.std;
            else
                txt << "undefined";
            if (s.undefined) txt << "  (" << s.undefined << " undefined)";
            txt << '\n';
        }
    }
    write_file_atomic(out / "aggregate.csv", csv.str());
    write_file_atomic(out / "aggregate.txt", txt.str());
    m.outputs = {out / "aggregate.csv", out / "aggregate.txt"};
    write_manifest(m, out / "manifest.json");
    std::cout << txt.str();
    if (reused) std::cerr << "reused " << reused << " completed runs\n";
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Gene regulatory network inference under selection bias and latent confounding"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    app.option_defaults()->always_capture_default();

    Shared sh;
    SimulateArgs sim;
    DiscoverArgs disc;
    EvaluateArgs ev;
    BenchArgs bench;

    CLI::App* s = app.add_subcommand("simulate", "Generate benchmark instances");
    add_shared(s, sh);
    add_benchmark_options(s, sim);
    s->add_option("--targets", sim.targets, "Comma-separated perturbed variables (default: all)");
    s->add_option("--seeds", sim.seeds, "Number of instances, seeded seed, seed+1, ...");
    s->add_flag("--export-expression", sim.export_expression, "Also write one labelled expression table");

    CLI::App* d = app.add_subcommand("discover", "Run the discovery pipeline");
    add_shared(d, sh);
    add_analysis_options(d, disc);
    d->add_option("--instance", disc.instance, "Instance directory written by simulate");
    d->add_option("--expression", disc.expression, "Expression table (CSV or TSV) with a regime label column");
    d->add_option("--label-column", disc.label_column, "Name of the regime label column");
    d->add_option("--control", disc.control, "Label of observational cells");
    d->add_option("--genes", disc.genes, "Comma-separated gene subset");
    d->add_flag("--genes-closure", disc.genes_closure, "Extend the subset by its observational skeleton neighbours");
    d->add_flag("--log1p", disc.log1p, "Apply log(1 + x) to expression values");
    d->add_flag("--dump-tests", disc.dump_tests, "Write every CI test to tests.csv");

    CLI::App* e = app.add_subcommand("evaluate", "Score a result against ground truth or Z-scores");
    add_shared(e, sh);
    e->add_option("--result", ev.result, "result.json from discover");
    e->add_option("--truth", ev.truth, "truth.json");
    e->add_option("--instance", ev.instance, "Instance directory holding truth.json");
    e->add_option("--zscores", ev.zscores, "Two-column gene,score table");
    e->add_option("--threshold", ev.threshold, "Z-score threshold");

    CLI::App* b = app.add_subcommand("bench", "Simulate, discover and evaluate over a grid of settings");
    add_shared(b, sh);
    add_analysis_options(b, disc);
    b->add_option("--grid", bench.grid, "JSON object of setting lists");
    b->add_option("--num-vars", bench.num_vars, "Comma-separated list");
    b->add_option("--num-edges", bench.num_edges, "Comma-separated list (0 = num-vars)");
    b->add_option("--n", bench.n, "Comma-separated list");
    b->add_option("--intervention", bench.intervention, "Comma-separated list of hard, soft");
    b->add_option("--n-sel", bench.n_sel, "Comma-separated list");
    b->add_option("--n-conf", bench.n_conf, "Comma-separated list");
    b->add_option("--n-sel-max", bench.n_sel_max, "Draw each selection pair count from [n-sel, n-sel-max]");
    b->add_option("--n-conf-max", bench.n_conf_max, "Draw each confounded pair count from [n-conf, n-conf-max]");
    b->add_option("--seeds", bench.seeds, "Replicates per cell");
    b->add_flag("--keep-data", bench.keep_data, "Keep the simulated instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForAllHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForVersion& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        apply_config(sub, sh.config);
        if (sub == s) return cmd_simulate(sub, sh, sim);
        if (sub == d) return cmd_discover(sub, sh, disc);
        if (sub == e) return cmd_evaluate(sub, sh, ev);
        return cmd_bench(sub, sh, bench, disc);
    } catch (const ConfigError& err) {
        std::cerr << "configuration error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}

}  // namespace gisl::cli
