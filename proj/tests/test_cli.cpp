#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = GISL_TEST_DATA;

struct Run {
    int code = -1;
    std::string output;
};

fs::path work() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / "gisl_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run gisl(const std::string& args) {
    auto log = work() / "last.log";
    std::string cmd = std::string("\"") + GISL_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Relative path -> content, manifests excluded since they record output paths.
std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().filename() != "manifest.json")
            out[fs::relative(e.path(), root).string()] = slurp(e.path());
    return out;
}

std::string dir(const std::string& name) { return (work() / name).string(); }

}  // namespace

TEST_CASE("help and version exit cleanly") {
    CHECK(gisl("--help").code == 0);
    CHECK(gisl("simulate --help").code == 0);
    auto v = gisl("--version");
    CHECK(v.code == 0);
    CHECK(v.output.find("0.1.0") != std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
    CHECK(gisl("simulate --bogus").code == 2);
    CHECK(gisl("simulate --alpha 1.5 --out " + dir("e1")).code == 2);
    CHECK(gisl("simulate --workers 0 --out " + dir("e1")).code == 2);
    CHECK(gisl("simulate --num-vars 3 --num-edges 9 --out " + dir("e1")).code == 2);
    CHECK(gisl("simulate --intervention medium --out " + dir("e1")).code == 2);
    CHECK(gisl("discover --instance " + dir("absent") + " --out " + dir("e2")).code == 2);
    std::ofstream(work() / "bad.toml") << "nonsense_key = 3\n";
    CHECK(gisl("simulate --config " + dir("bad.toml") + " --out " + dir("e3")).code == 2);
    CHECK(gisl("frobnicate").code == 2);
}

TEST_CASE("analysis failures exit with 1") {
    std::ofstream(work() / "badlabel.csv") << "A,B,perturbation\n1,2,control\n3,4,Q\n";
    auto r = gisl("discover --expression " + dir("badlabel.csv") + " --out " + dir("f1"));
    CHECK(r.code == 1);
    CHECK(r.output.find("'Q'") != std::string::npos);
}

TEST_CASE("simulate and discover are reproducible from the seed") {
    std::string common = "simulate --num-vars 4 --num-edges 3 --n 150 --export-expression ";
    REQUIRE(gisl(common + "--seed 5 --out " + dir("s1")).code == 0);
    REQUIRE(gisl(common + "--seed 5 --out " + dir("s2")).code == 0);
    REQUIRE(gisl(common + "--seed 6 --out " + dir("s3")).code == 0);
    CHECK(tree(dir("s1")) == tree(dir("s2")));
    CHECK(tree(dir("s1")) != tree(dir("s3")));
    auto manifest = json::parse(slurp(work() / "s1" / "manifest.json"));
    CHECK(manifest.at("format") == "gisl-run-manifest");
    CHECK(manifest.at("seed") == 5);

    std::string disc = "discover --max-cond 2 --dump-tests --instance ";
    REQUIRE(gisl(disc + dir("s1") + " --out " + dir("d1")).code == 0);
    REQUIRE(gisl(disc + dir("s2") + " --out " + dir("d2")).code == 0);
    CHECK(tree(dir("d1")) == tree(dir("d2")));
    auto tests = slurp(work() / "d1" / "tests.csv");
    CHECK(tests.rfind("kind,a,b,cond,statistic,p_value,dependent,n_used,error\n", 0) == 0);
    auto result = json::parse(slurp(work() / "d1" / "result.json"));
    CHECK(result.contains("audit"));
    CHECK(fs::exists(work() / "d1" / "result.dot"));

    auto ev = gisl("evaluate --result " + dir("d1") + "/result.json --instance " + dir("s1") + " --out " + dir("v1"));
    CHECK(ev.code == 0);
    auto report = json::parse(slurp(work() / "v1" / "eval.json"));
    CHECK(report.contains("shd"));
}

TEST_CASE("flags override the config file which overrides defaults") {
    std::ofstream(work() / "sim.toml") << "n = 120\nnum_vars = 3\n\n[simulate]\nnum_edges = 2\n";
    REQUIRE(gisl("simulate --config " + dir("sim.toml") + " --n 90 --out " + dir("c1")).code == 0);
    auto cfg = json::parse(slurp(work() / "c1" / "config.json"));
    CHECK(cfg.at("n") == 90);
    CHECK(cfg.at("num_vars") == 3);
    CHECK(cfg.at("num_edges") == 2);
    CHECK(cfg.at("n_sel") == 1);

    // a manifest replays its recorded configuration
    REQUIRE(gisl("simulate --config " + dir("c1") + "/manifest.json --out " + dir("c2")).code == 0);
    CHECK(tree(dir("c1")) == tree(dir("c2")));
}

TEST_CASE("expression input warns about pairs without perturbation data") {
    auto r = gisl("discover --expression " + (kData / "expression_small.csv").string() + " --max-cond 1 --out " +
                  dir("x1"));
    CHECK(r.code == 0);
    CHECK(r.output.find("warning: G1 - G5 untested") != std::string::npos);

    auto sub = gisl("discover --expression " + (kData / "expression_small.csv").string() +
                    " --genes G1,G2 --max-cond 1 --out " + dir("x2"));
    CHECK(sub.code == 0);
    auto result = json::parse(slurp(work() / "x2" / "result.json"));
    CHECK(result.at("variables") == json::array({"G1", "G2"}));
}

TEST_CASE("z-score evaluation of a run without selection pairs") {
    REQUIRE(gisl("simulate --num-vars 3 --num-edges 2 --n-sel 0 --n-conf 0 --n 100 --seed 2 --out " + dir("z0")).code ==
            0);
    REQUIRE(gisl("discover --instance " + dir("z0") + " --out " + dir("z1")).code == 0);
    auto r = gisl("evaluate --result " + dir("z1") + "/result.json --zscores " +
                  (kData / "zscores_small.tsv").string() + " --out " + dir("z2"));
    CHECK(r.code == 0);
    auto j = json::parse(slurp(work() / "z2" / "zscore_eval.json"));
    CHECK(j.at("format") == "gisl-zscore-eval");
    CHECK(j.at("accuracy").is_null());
}

TEST_CASE("bench resumes to identical aggregates") {
    std::string args = "bench --num-vars 3 --num-edges 2 --n 120 --seeds 2 --max-cond 1 --out " + dir("b1");
    REQUIRE(gisl(args).code == 0);
    auto first = slurp(work() / "b1" / "aggregate.csv");
    CHECK(first.rfind("cell,num_vars,num_edges,n,intervention,n_sel,n_conf,metric,mean,std,count,undefined\n", 0) == 0);
    auto resumed = gisl(args);
    REQUIRE(resumed.code == 0);
    CHECK(resumed.output.find("reused 2 completed runs") != std::string::npos);
    CHECK(slurp(work() / "b1" / "aggregate.csv") == first);

    fs::remove(work() / "b1" / "runs" / "p3_e2_n120_hard_sel1_conf1" / "seed_1" / "eval.json");
    REQUIRE(gisl(args).code == 0);
    CHECK(slurp(work() / "b1" / "aggregate.csv") == first);
}
