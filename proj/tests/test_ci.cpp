#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gisl/backend.hpp"
#include "gisl/kernel_ci.hpp"
#include "gisl/rng.hpp"
#include "gisl/scm.hpp"

using namespace gisl;
using fixture::build;

namespace {

Eigen::VectorXd normal(Rng& rng, Eigen::Index n) {
    std::normal_distribution<double> d;
    Eigen::VectorXd v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

Eigen::VectorXd coin(Rng& rng, Eigen::Index n) {
    std::bernoulli_distribution d(0.5);
    Eigen::VectorXd v(n);
    for (auto& x : v) x = d(rng) ? 1.0 : 0.0;
    return v;
}

KernelCiConfig seeded(std::uint64_t s) {
    KernelCiConfig c;
    c.seed = s;
    return c;
}

DataMatrix matrix(std::vector<std::string> cols, Eigen::MatrixXd v, Regime r = {}) {
    return {std::move(cols), std::move(v), std::move(r)};
}

}  // namespace

TEST_CASE("identical columns are dependent") {
    Rng rng(1);
    Eigen::VectorXd x = normal(rng, 200);
    auto v = unconditional_test(Column::real(x), Column::real(x));
    CHECK(v.dependent);
    CHECK(v.p_value < 1e-6);
    CHECK(v.n_used == 200);
}

TEST_CASE("unconditional level on independent pairs") {
    int cc = 0, bc = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        Rng rng(derive_seed(11, {t}));
        Eigen::VectorXd x = normal(rng, 500), y = normal(rng, 500), b = coin(rng, 500);
        cc += unconditional_test(Column::real(x), Column::real(y), seeded(t)).dependent;
        bc += unconditional_test(Column::indicator(b), Column::real(y), seeded(t)).dependent;
    }
    CHECK(cc >= 2);
    CHECK(cc <= 20);
    CHECK(bc >= 2);
    CHECK(bc <= 20);
}

TEST_CASE("conditional level with one conditioning variable") {
    int cc = 0, bc = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        Rng rng(derive_seed(12, {t}));
        Eigen::VectorXd z = normal(rng, 500);
        Eigen::VectorXd x = z + normal(rng, 500), y = z + normal(rng, 500), b = coin(rng, 500);
        cc += conditional_test(Column::real(x), Column::real(y), {Column::real(z)}, seeded(t)).dependent;
        bc += conditional_test(Column::indicator(b), Column::real(y), {Column::real(z)}, seeded(t)).dependent;
    }
    CHECK(cc >= 2);
    CHECK(cc <= 20);
    CHECK(bc >= 2);
    CHECK(bc <= 20);
}

TEST_CASE("nonlinear dependence is detected") {
    int hits = 0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        Rng rng(derive_seed(13, {t}));
        Eigen::VectorXd x = normal(rng, 500);
        Eigen::VectorXd y = x.array().sin().matrix() + 0.3 * normal(rng, 500);
        hits += unconditional_test(Column::real(x), Column::real(y), seeded(t)).dependent;
    }
    CHECK(hits >= 48);
}

TEST_CASE("chain is screened off by its middle variable") {
    int indep = 0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        Rng rng(derive_seed(14, {t}));
        Eigen::VectorXd x = normal(rng, 1000);
        Eigen::VectorXd z = x + 0.7 * normal(rng, 1000);
        Eigen::VectorXd y = z + 0.7 * normal(rng, 1000);
        indep += !conditional_test(Column::real(x), Column::real(y), {Column::real(z)}, seeded(t)).dependent;
    }
    CHECK(indep >= 40);
}

TEST_CASE("irrelevant conditioning keeps a dependence") {
    Rng rng(15);
    Eigen::VectorXd x = normal(rng, 500), z = normal(rng, 500);
    Eigen::VectorXd y = x + normal(rng, 500);
    CHECK(conditional_test(Column::real(x), Column::real(y), {Column::real(z)}).dependent);
    KernelCiConfig perm;
    perm.null_mode = NullMode::Permutation;
    perm.permutations = 200;
    CHECK(conditional_test(Column::real(x), Column::real(y), {Column::real(z)}, perm).dependent);
}

TEST_CASE("selected data are dependent") {
    Rng rng(16);
    std::vector<double> xs, ys;
    while (xs.size() < 800) {
        double x = uniform(rng, 0, 2), y = uniform(rng, 0, 2);
        if (x + y > 2) xs.push_back(x), ys.push_back(y);
    }
    Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(xs.data(), 800), y = Eigen::Map<Eigen::VectorXd>(ys.data(), 800);
    CHECK(unconditional_test(Column::real(x), Column::real(y)).dependent);
}

TEST_CASE("statistic is symmetric and deterministic") {
    Rng rng(17);
    Eigen::VectorXd x = normal(rng, 400);
    Eigen::VectorXd y = x.array().square().matrix() + normal(rng, 400);
    auto a = unconditional_test(Column::real(x), Column::real(y), seeded(3));
    auto b = unconditional_test(Column::real(y), Column::real(x), seeded(3));
    CHECK(a.statistic == b.statistic);
    CHECK(a.p_value == b.p_value);
    auto c = unconditional_test(Column::real(x), Column::real(y), seeded(3));
    CHECK(a.statistic == c.statistic);
}

TEST_CASE("constant columns, short inputs and the row cap") {
    Rng rng(18);
    Eigen::VectorXd x = normal(rng, 200), k = Eigen::VectorXd::Constant(200, 2.0);
    auto v = unconditional_test(Column::real(k), Column::real(x));
    CHECK_FALSE(v.dependent);
    CHECK(v.note == CiNote::ZeroVariance);
    auto w = conditional_test(Column::real(x), Column::real(k), {Column::real(normal(rng, 200))});
    CHECK(w.note == CiNote::ZeroVariance);

    CHECK_THROWS_AS(unconditional_test(Column::real(x.head(20)), Column::real(x.head(20))), InsufficientSamples);
    CHECK_THROWS_AS(conditional_test(Column::real(x.head(40)), Column::real(x.head(40)), {Column::real(x.head(40))}),
                    InsufficientSamples);
    CHECK_THROWS_AS(unconditional_test(Column::real(x), Column::real(x.head(50))), std::invalid_argument);

    Eigen::VectorXd big = normal(rng, 2500);
    KernelCiConfig cfg;
    cfg.n_max = 700;
    CHECK(unconditional_test(Column::real(big), Column::real(normal(rng, 2500)), cfg).n_used == 700);
}

TEST_CASE("pooled data balance the regimes") {
    Rng rng(19);
    auto d0 = matrix({"A", "B"}, Eigen::MatrixXd::Random(500, 2));
    auto dk = matrix({"A", "B"}, Eigen::MatrixXd::Random(500, 2), Regime::perturbed("A"));
    auto p = build_pooled(d0, dk, {"A", "B"}, 1);
    CHECK_THROWS(build_pooled(d0, d0, {"A"}, 1));
    CHECK(p.values.rows() == 1000);
    CHECK(p.indicator.sum() == 500);
    CHECK(p.values(0, 0) == d0.values(0, 0));
    CHECK(p.values(500, 1) == dk.values(0, 1));

    auto big = matrix({"A", "B"}, Eigen::MatrixXd::Random(3000, 2));
    auto q = build_pooled(big, dk, {"A", "B"}, 1);
    CHECK(q.values.rows() == 2000);
    CHECK(q.indicator.sum() == 500);

    auto bad = matrix({"A", "C"}, Eigen::MatrixXd::Random(500, 2), Regime::perturbed("A"));
    CHECK_THROWS(build_pooled(d0, bad, {"A", "B"}, 1));
}

TEST_CASE("pattern quad for a direct causal edge") {
    // X -> Y with strong linear effect
    Scm scm;
    scm.structure = build({"X", "Y"}, {{0, 1}}, {}, {});
    scm.mechanisms[0] = {{}, {NoiseKind::Gaussian, 0.0, 1.0}};
    scm.mechanisms[1] = {{{0, FunctionFamily::Linear, 1.5, 0.0, 1.0}}, {NoiseKind::Gaussian, 0.0, 1.0}};
    scm.interventions[0] = {0, InterventionKind::HardUniform, 2.0, 3.0, 0.0, {}};
    scm.interventions[1] = {1, InterventionKind::HardUniform, -4.0, -3.0, 0.0, {}};
    scm.validate();
    auto inst = build_instance(scm, 800, 5);
    auto q = test_quad(inst.d0, inst.perturbed.at("X"), inst.perturbed.at("Y"), 0, 1, {}, KernelCiConfig{});
    CHECK(q.t1 == Slot::Dep);
    CHECK(q.t2 == Slot::Indep);
    CHECK(q.t3 == Slot::Indep);
    CHECK(q.t4 == Slot::Dep);
}

TEST_CASE("backend caches verdicts and records them") {
    BenchmarkConfig cfg;
    cfg.num_vars = 3;
    cfg.num_edges = 2;
    cfg.n = 300;
    cfg.n_conf = 0;
    cfg.n_sel = 0;
    auto inst = generate_benchmark(cfg);
    KernelBackend be(inst.d0, inst.perturbed, KernelCiConfig{});
    auto a = be.observational(0, 1, {2});
    auto b = be.observational(1, 0, {2});
    CHECK(a.p_value == b.p_value);
    CHECK(be.tests_run() == 1);
    be.indicator(0, 1, {});
    CHECK(be.tests_run() == 2);
    auto recs = be.records();
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].kind == "observational");
    CHECK(recs[1].kind == "indicator");
}
