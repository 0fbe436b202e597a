#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rca_cusum/critical_values.hpp"
#include "oracles.hpp"

using namespace rca_cusum;

TEST_CASE("asymptotic extreme-value quantile formula", "[cv]") {
    REQUIRE(de_asymptotic_cv(0.05) ==
            Catch::Approx(3.663342429602109).margin(1e-12));
    REQUIRE(de_asymptotic_cv(0.10) ==
            Catch::Approx(2.9435145078723908).margin(1e-12));
    REQUIRE_THROWS_AS(de_asymptotic_cv(0.0), InvalidSpec);
    REQUIRE_THROWS_AS(de_asymptotic_cv(1.0), InvalidSpec);
}

TEST_CASE("order statistic convention", "[cv]") {
    const std::vector<double> s{10, 20, 30, 40};
    REQUIRE(detail::order_stat_quantile(s, 0.5) == 20);
    REQUIRE(detail::order_stat_quantile(s, 0.05) == 10);
    REQUIRE(detail::order_stat_quantile(s, 0.95) == 40);
    REQUIRE(detail::order_stat_quantile(s, 1.0) == 40);
}

// grid resolution bounds the discretization bias of a simulated sup, so the
// analytic comparisons run on the fine grid
TEST_CASE("bridge quantiles approach the analytic law", "[cv]") {
    const auto cvs = simulate_bridge_cv(0.0, {0.05, 0.10}, 4000, 2000, 11);
    REQUIRE(cvs[0] == Catch::Approx(oracles::bridge_sup_quantile(0.95)).margin(0.03));
    REQUIRE(cvs[1] == Catch::Approx(oracles::bridge_sup_quantile(0.90)).margin(0.03));
}

TEST_CASE("trimmed-window quantile matches the sup-of-Wiener law at kappa 1",
          "[cv]") {
    const auto cvs = simulate_renyi_cv(1.0, {0.05}, 4000, 2000, 13);
    REQUIRE(cvs[0] ==
            Catch::Approx(oracles::wiener_sup_quantile(std::sqrt(0.95))).margin(0.04));
}

TEST_CASE("quantiles are monotone in the level", "[cv]") {
    const auto b = simulate_bridge_cv(0.25, {0.01, 0.05, 0.10}, 2000, 200, 17);
    REQUIRE(b[0] >= b[1]);
    REQUIRE(b[1] >= b[2]);
    const auto r = simulate_renyi_cv(0.75, {0.01, 0.05, 0.10}, 2000, 200, 19);
    REQUIRE(r[0] >= r[1]);
    REQUIRE(r[1] >= r[2]);
    const auto d = de_finite_sample_cv(200, {0.01, 0.05, 0.10}, 2000, 23);
    REQUIRE(d[0] >= d[1]);
    REQUIRE(d[1] >= d[2]);
}

TEST_CASE("asymmetric trimming shrinks the window and the quantile", "[cv]") {
    const double sym = simulate_renyi_cv(0.75, {0.05}, 3000, 300, 29)[0];
    const double asym = simulate_renyi_cv(0.75, {0.05}, 3000, 300, 29, 1.0, 0.25)[0];
    REQUIRE(asym < sym);
    REQUIRE(asym > 0.5 * sym);
}

TEST_CASE("finite-sample extreme-split quantiles rise toward the limit", "[cv]") {
    const double asym = de_asymptotic_cv(0.05);
    const double at100 = de_finite_sample_cv(100, {0.05}, 3000, 31)[0];
    const double at800 = de_finite_sample_cv(800, {0.05}, 3000, 31)[0];
    const double at1e5 = de_finite_sample_cv(100000, {0.05}, 300, 31)[0];
    REQUIRE(at100 < at800);
    REQUIRE(at800 < asym);
    REQUIRE(std::abs(at1e5 - asym) < std::abs(at100 - asym));
}

TEST_CASE("data-dependent quantiles are deterministic and monotone", "[cv]") {
    RcaSimSpec spec;
    spec.params = {0.5, 0.01, 0.5};
    spec.n = 300;
    spec.seed = 37;
    const TimeSeries s = simulate_rca(spec);
    const CumulantTable t = build_cumulants(s);
    const HeteroKernel k = build_kernel(s, t);
    const WeightSpec w = WeightSpec::kappa_power(0.25);
    const double c05 = hetero_fnl_cv(k, w, 0.05);
    const double c10 = hetero_fnl_cv(k, w, 0.10);
    const double c01 = hetero_fnl_cv(k, w, 0.01);
    REQUIRE(c01 >= c05);
    REQUIRE(c05 >= c10);
    REQUIRE(c10 > 0.0);
    REQUIRE(hetero_fnl_cv(k, w, 0.05) == c05);
}

TEST_CASE("cache round-trips exactly", "[cv]") {
    const std::string path = "cv_cache_test.csv";
    CvCache cache;
    const CvKey k1{"bridge", 0.0, 0.05, 20000, 2000, 20210401};
    const CvKey k2{"renyi", 0.1 + 0.2, 0.05, 1000, 100, 7};
    cache.insert(k1, 1.3581015118983133);
    cache.insert(k2, 1e-17);
    cache.save(path);

    CvCache loaded;
    REQUIRE(loaded.load(path));
    REQUIRE(loaded.size() == 2);
    REQUIRE(loaded.lookup(k1).has_value());
    REQUIRE(*loaded.lookup(k1) == 1.3581015118983133);
    REQUIRE(*loaded.lookup(k2) == 1e-17);
    REQUIRE_FALSE(loaded.lookup(CvKey{"bridge", 0.0, 0.10, 20000, 2000, 20210401})
                      .has_value());
    std::remove(path.c_str());
}

TEST_CASE("cache load failure modes", "[cv]") {
    CvCache cache;
    REQUIRE_FALSE(cache.load("does_not_exist.csv"));

    const std::string path = "cv_cache_bad.csv";
    std::ofstream(path) << "family,kappa,alpha,reps,grid,seed,value\n"
                        << "bridge,0,0.05,100,100,1,1.23\n"
                        << "garbage-without-a-value\n";
    try {
        cache.load(path);
        FAIL("expected a parse error");
    } catch (const DegenerateData& e) {
        REQUIRE(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::remove(path.c_str());
}
