#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rca_cusum/hetero.hpp"
#include "rca_cusum/critical_values.hpp"

using namespace rca_cusum;

namespace {

TimeSeries simulate(std::uint64_t seed, int n, double beta0 = 0.5,
                    double s1_sq = 0.01, double s2_sq = 0.5, bool het2 = false) {
    RcaSimSpec spec;
    spec.params = {beta0, s1_sq, s2_sq};
    spec.n = n;
    spec.seed = seed;
    if (het2) {
        RegimeBreak br;
        br.fraction = 0.5;
        br.variance_scale_2 = 1.5;
        spec.regimes.breaks.push_back(br);
    }
    return simulate_rca(spec);
}

}  // namespace

TEST_CASE("complement identity holds on the grid", "[hetero]") {
    const TimeSeries s = simulate(41, 300);
    const CumulantTable t = build_cumulants(s);
    const HeteroKernel k = build_kernel(s, t);
    double prev = k.c1_total;
    for (std::size_t i = 0; i < k.c1.size(); ++i) {
        const double c2 = k.c1_total - k.c1[i];
        REQUIRE(c2 >= 0.0);
        REQUIRE(c2 <= prev);
        REQUIRE(std::abs(k.c1[i] + c2 - k.c1_total) <= 4e-16 * k.c1_total);
        prev = c2;
    }
}

TEST_CASE("prefix curves are nondecreasing", "[hetero]") {
    const TimeSeries s = simulate(43, 300);
    const HeteroKernel k = build_kernel(s, build_cumulants(s));
    for (std::size_t i = 1; i < k.c1.size(); ++i) {
        REQUIRE(k.c1[i] >= k.c1[i - 1]);
        REQUIRE(k.b[i] >= k.b[i - 1]);
    }
    REQUIRE(k.c1_total >= k.c1.back());
    REQUIRE(k.b_total >= k.b.back());
}

TEST_CASE("kernel is symmetric, nonnegative on the diagonal, zero at the ends",
          "[hetero]") {
    const TimeSeries s = simulate(47, 400, 0.5, 0.01, 0.5, true);
    const HeteroKernel k = build_kernel(s, build_cumulants(s));
    for (double v : k.g_diag) REQUIRE(v >= -1e-12);
    const double ts[] = {0.1, 0.25, 0.4, 0.62, 0.88};
    for (double t : ts)
        for (double u : ts) REQUIRE(k.g_of(t, u) == k.g_of(u, t));
    REQUIRE(k.g_of(1.0, 1.0) == 0.0);
    REQUIRE(k.g_of(0.001, 0.5) == 0.0);  // below the first grid point
}

TEST_CASE("kernel values match the defining formula", "[hetero]") {
    const TimeSeries s = simulate(53, 250);
    const HeteroKernel k = build_kernel(s, build_cumulants(s));
    const double ts[] = {0.13, 0.37, 0.5, 0.71, 0.94};
    for (double t : ts)
        for (double u : ts) {
            const double expected =
                k.c1_total * k.c1_total * k.b_at(std::min(t, u)) -
                k.c1_total * (k.c1_at(t) * k.b_at(u) + k.c1_at(u) * k.b_at(t)) +
                k.c1_at(t) * k.c1_at(u) * k.b_total;
            REQUIRE(k.g_of(t, u) == Catch::Approx(expected).margin(1e-12));
        }
}

TEST_CASE("the two floor conventions are kept distinct", "[hetero]") {
    const TimeSeries s = simulate(59, 120);
    const HeteroKernel k = build_kernel(s, build_cumulants(s));
    const int n = k.n;
    // c1 accumulates through i = floor((n+1)t_k) = k, b through floor(n t_k) = k-1
    REQUIRE(k.b[0] == 0.0);
    for (int kk = 2; kk <= n - 2; ++kk) {
        REQUIRE(k.c1[static_cast<std::size_t>(kk) - 2] == k.c1_steps[kk - 2]);
        if (kk >= 3)
            REQUIRE(k.b[static_cast<std::size_t>(kk) - 2] == k.b_steps[kk - 3]);
    }
}

TEST_CASE("diagonal tracks the bridge variance profile under the null", "[hetero]") {
    const TimeSeries s = simulate(61, 4000);
    const HeteroKernel k = build_kernel(s, build_cumulants(s));
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const double m = static_cast<double>(k.g_diag.size());
    for (std::size_t i = 0; i < k.g_diag.size(); ++i) {
        const double t = (i + 2) / (k.n + 1.0);
        const double x = t * (1.0 - t);
        const double y = k.g_diag[i];
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double corr = (m * sxy - sx * sy) /
                        std::sqrt((m * sxx - sx * sx) * (m * syy - sy * sy));
    REQUIRE(corr > 0.99);
}

TEST_CASE("scaled process converges to the plain process times the variance scale",
          "[hetero]") {
    const TimeSeries s = simulate(67, 4000);
    const CumulantTable t = build_cumulants(s);
    const HeteroKernel k = build_kernel(s, t);
    const CusumProcess q = q_process(s, t);
    const CusumProcess qb = qbar_process(s, t, k);
    const double a2 = eta_hat_sq(s, t).a_hat_2;
    const std::size_t mid = q.size() / 2;
    const double ratio = qb.values[mid] / q.values[mid];
    REQUIRE(ratio == Catch::Approx(k.c1_total * a2).epsilon(0.05));
}

TEST_CASE("mismatched inputs are rejected", "[hetero]") {
    const TimeSeries s = simulate(71, 100);
    const TimeSeries other = simulate(72, 90);
    const CumulantTable t = build_cumulants(s);
    const HeteroKernel k = build_kernel(s, t);
    REQUIRE_THROWS_AS(qbar_process(other, build_cumulants(other), k), InvalidSpec);
}

TEST_CASE("robust sup skips no scaling", "[hetero]") {
    const TimeSeries s = simulate(73, 120);
    const CumulantTable t = build_cumulants(s);
    const CusumProcess qb = qbar_process(s, t, build_kernel(s, t));
    const SupResult r = hetero_weighted_sup(qb, WeightSpec::kappa_power(0.0));
    double expected = 0.0;
    for (std::size_t i = 0; i < qb.size(); ++i)
        expected = std::max(expected, std::abs(qb.values[i]));
    REQUIRE(r.stat == expected);
    REQUIRE(r.argmax_k.has_value());
}

TEST_CASE("robust extreme-split test holds its level", "[hetero]") {
    const int n = 800;
    const int reps = 600;
    const double cv = de_finite_sample_cv(n, {0.05}, 4000, 909)[0];
    int rejections = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const TimeSeries s = simulate(80000 + rep, n, 0.5, 0.01, 0.5, true);
        const CumulantTable t = build_cumulants(s);
        const HeteroKernel k = build_kernel(s, t);
        const CusumProcess qb = qbar_process(s, t, k);
        if (hetero_de_stat(qb, k) > cv) ++rejections;
    }
    const double freq = static_cast<double>(rejections) / reps;
    REQUIRE(freq >= 0.02);
    REQUIRE(freq <= 0.08);
}
