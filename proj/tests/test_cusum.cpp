#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rca_cusum/cusum.hpp"

using namespace rca_cusum;

namespace {

TimeSeries simulate(std::uint64_t seed, int n, double beta0 = 0.5,
                    double s1_sq = 0.01, double s2_sq = 0.5) {
    RcaSimSpec spec;
    spec.params = {beta0, s1_sq, s2_sq};
    spec.n = n;
    spec.seed = seed;
    return simulate_rca(spec);
}

CusumProcess tiny_process(std::vector<double> values, int n) {
    CusumProcess p;
    p.n = n;
    p.values = std::move(values);
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        p.grid.push_back(static_cast<int>(i) + 2);
        p.degenerate.push_back(0);
    }
    return p;
}

}  // namespace

TEST_CASE("weighted sup with unit weights", "[cusum]") {
    const CusumProcess p = tiny_process({0.0, 2.0, 1.0}, 8);
    const SupResult r = weighted_sup(p, WeightSpec::kappa_power(0.0), 2.0);
    REQUIRE(r.stat == 1.0);
    REQUIRE(r.argmax_k.has_value());
    REQUIRE(*r.argmax_k == 3);
}

TEST_CASE("identically zero process has no argmax", "[cusum]") {
    const CusumProcess p = tiny_process({0.0, 0.0, 0.0}, 8);
    const SupResult r = weighted_sup(p, WeightSpec::kappa_power(0.0), 1.0);
    REQUIRE(r.stat == 0.0);
    REQUIRE_FALSE(r.argmax_k.has_value());
}

TEST_CASE("fully degenerate process is an error", "[cusum]") {
    CusumProcess p = tiny_process({0.0, 0.0}, 8);
    p.degenerate = {1, 1};
    REQUIRE_THROWS_AS(weighted_sup(p, WeightSpec::kappa_power(0.0), 1.0),
                      DegenerateData);
}

TEST_CASE("process values match a from-scratch evaluation", "[cusum]") {
    for (int rep = 0; rep < 10; ++rep) {
        const TimeSeries s = simulate(300 + rep, 40 + rep * 16);
        const CumulantTable table = build_cumulants(s);
        const CusumProcess p = q_process(s, table);
        REQUIRE(p.size() == static_cast<std::size_t>(s.n) - 3);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const int k = p.grid[i];
            const double t = k / (s.n + 1.0);
            double num_l = 0.0, den_l = 0.0, num_r = 0.0, den_r = 0.0;
            for (int j = 2; j <= s.n; ++j) {
                const double yl = s.values[j - 1];
                const double d = yl * yl / (1.0 + yl * yl);
                const double c = s.values[j] * yl / (1.0 + yl * yl);
                if (j <= k) {
                    num_l += c;
                    den_l += d;
                } else {
                    num_r += c;
                    den_r += d;
                }
            }
            const double direct = std::sqrt(double(s.n)) * t * (1.0 - t) *
                                  (num_l / den_l - num_r / den_r);
            REQUIRE(p.values[i] == Catch::Approx(direct).margin(1e-9));
        }
    }
}

TEST_CASE("sign flip of the data leaves the process unchanged", "[cusum]") {
    const TimeSeries s = simulate(17, 150);
    TimeSeries neg = s;
    for (auto& v : neg.values) v = -v;
    const CusumProcess a = q_process(s, build_cumulants(s));
    const CusumProcess b = q_process(neg, build_cumulants(neg));
    for (std::size_t i = 0; i < a.size(); ++i)
        REQUIRE(a.values[i] == Catch::Approx(b.values[i]).margin(1e-12));
    REQUIRE(a.eta_hat == Catch::Approx(b.eta_hat).margin(1e-12));
}

TEST_CASE("short series are rejected", "[cusum]") {
    const TimeSeries s = simulate(1, 7);
    REQUIRE_THROWS_AS(q_process(s, build_cumulants(s)), DegenerateData);
}

TEST_CASE("normalization constants", "[cusum]") {
    constexpr double e = 2.718281828459045;
    REQUIRE(de_a(e) == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    REQUIRE(de_b(e) == Catch::Approx(1.4276350570753).margin(1e-12));
}

TEST_CASE("extreme-split statistic grows as the scale shrinks", "[cusum]") {
    const TimeSeries s = simulate(23, 400);
    const CumulantTable t = build_cumulants(s);
    REQUIRE(darling_erdos_stat(t, 0.5) > darling_erdos_stat(t, 1.0));
}

TEST_CASE("widening the trim can only lower the sup statistics", "[cusum]") {
    const TimeSeries s = simulate(29, 500);
    const CumulantTable t = build_cumulants(s);
    const double wide = darling_erdos_stat(t, 1.0, TrimSpec{30, 30});
    const double narrow = darling_erdos_stat(t, 1.0, TrimSpec{30, 80});
    REQUIRE(narrow <= wide);

    const CusumProcess p = q_process(s, t);
    // equal r_min keeps the prefactor fixed, isolating the window effect
    const double r_wide = renyi_stat(p, 0.75, TrimSpec{30, 40}, 1.0);
    const double r_narrow = renyi_stat(p, 0.75, TrimSpec{30, 90}, 1.0);
    REQUIRE(r_narrow <= r_wide);
}

TEST_CASE("trimmed-window statistic matches a hand evaluation", "[cusum]") {
    const TimeSeries s = simulate(31, 60);
    const CumulantTable table = build_cumulants(s);
    const CusumProcess p = q_process(s, table);
    const TrimSpec tr{6, 9};
    const double kappa = 0.8;
    double sup = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double t = p.t_at(i);
        if (t < 6.0 / 60 || t > 1.0 - 9.0 / 60) continue;
        sup = std::max(sup, std::abs(p.values[i]) / std::pow(t * (1.0 - t), kappa));
    }
    const double expected = std::pow(6.0 / 60, kappa - 0.5) * sup / p.eta_hat;
    REQUIRE(renyi_stat(p, kappa, tr, p.eta_hat) ==
            Catch::Approx(expected).margin(1e-12));
    REQUIRE_THROWS_AS(renyi_stat(p, 0.4, tr, 1.0), InvalidSpec);
}

TEST_CASE("near-noiseless null stays below the asymptotic 10% level", "[cusum]") {
    int below = 0;
    const int runs = 40;
    for (int rep = 0; rep < runs; ++rep) {
        const TimeSeries s = simulate(5000 + rep, 500, 0.5, 0.0, 1e-6);
        const CumulantTable t = build_cumulants(s);
        const EtaHatSq eta = eta_hat_sq(s, t);
        REQUIRE_FALSE(eta.degenerate);
        if (darling_erdos_stat(t, std::sqrt(eta.value)) < 2.9435) ++below;
    }
    REQUIRE(below >= 36);
}

TEST_CASE("weight admissibility", "[cusum]") {
    REQUIRE(integrability_check(WeightSpec::kappa_power(0.0), 1.0));
    REQUIRE(integrability_check(WeightSpec::kappa_power(0.3), 1.0));
    REQUIRE_FALSE(integrability_check(WeightSpec::kappa_power(0.5), 1.0));
    REQUIRE_FALSE(integrability_check(WeightSpec::kappa_power(0.8), 1.0));

    const auto root = WeightSpec::custom_fn(
        [](double t) { return std::sqrt(t * (1.0 - t)); });
    REQUIRE_FALSE(integrability_check(root, 1.0));
    const auto mild = WeightSpec::custom_fn(
        [](double t) { return std::pow(t * (1.0 - t), 0.3); });
    REQUIRE(integrability_check(mild, 1.0));
}

TEST_CASE("custom weights are screened", "[cusum]") {
    REQUIRE_THROWS_AS(
        WeightSpec::custom_fn([](double t) { return t - 0.5; }),
        InvalidSpec);
    REQUIRE_THROWS_AS(
        WeightSpec::custom_fn([](double t) { return 1.0 + t; }),
        InvalidSpec);
}

TEST_CASE("trim validation", "[cusum]") {
    REQUIRE_THROWS_AS(validate_trim(TrimSpec{0, 5}, 100), InvalidSpec);
    REQUIRE_THROWS_AS(validate_trim(TrimSpec{60, 40}, 100), InvalidSpec);
    REQUIRE(default_trim(800).r1 == 45);  // ceil(ln(800)^2)
}
