#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rca_cusum/detector.hpp"

using namespace rca_cusum;

namespace {

TimeSeries simulate(std::uint64_t seed, int n, double beta0 = 0.5,
                    double s1_sq = 0.01, double s2_sq = 0.5,
                    double jump_to = 0.0, double at = 0.5) {
    RcaSimSpec spec;
    spec.params = {beta0, s1_sq, s2_sq};
    spec.n = n;
    spec.seed = seed;
    if (jump_to != 0.0) {
        RegimeBreak br;
        br.fraction = at;
        br.new_beta = jump_to;
        spec.regimes.breaks.push_back(br);
    }
    return simulate_rca(spec);
}

TestConfig sup_config(CvCache* cache, double kappa = 0.0) {
    TestConfig cfg;
    cfg.statistic = StatisticKind::WeightedSup;
    cfg.weight = WeightSpec::kappa_power(kappa);
    cfg.cv_source = CvSource::Cached;
    cfg.cv_reps = 4000;
    cfg.cv_grid = 400;
    cfg.cache = cache;
    return cfg;
}

}  // namespace

TEST_CASE("noiseless jump is rejected with the exact breakdate", "[detector]") {
    RcaSimSpec spec;
    spec.params = {0.5, 0.0, 0.0};
    spec.n = 100;
    spec.burn_in = 0;
    spec.y0 = 1.0;
    RegimeBreak br;
    br.fraction = 0.5;
    br.new_beta = 0.9;
    spec.regimes.breaks.push_back(br);
    const TimeSeries s = simulate_rca(spec);

    CvCache cache;
    const TestReport r = run_test(s, sup_config(&cache));
    REQUIRE(r.reject);
    REQUIRE(r.breakdate.has_value());
    REQUIRE(*r.breakdate == 50);
    REQUIRE(r.t_hat == Catch::Approx(50.0 / 101.0));
    REQUIRE(r.eta_hat_sq.has_value());
}

TEST_CASE("reports are bit-for-bit reproducible", "[detector]") {
    const TimeSeries s = simulate(5, 300);
    CvCache cache;
    const TestConfig cfg = sup_config(&cache);
    const TestReport a = run_test(s, cfg);
    const TestReport b = run_test(s, cfg);
    REQUIRE(a.statistic_value == b.statistic_value);
    REQUIRE(a.critical_value == b.critical_value);
    REQUIRE(a.reject == b.reject);
    REQUIRE(a.breakdate == b.breakdate);
}

TEST_CASE("analytic source plugs in the formula quantile", "[detector]") {
    const TimeSeries s = simulate(9, 400);
    TestConfig cfg;
    cfg.statistic = StatisticKind::DarlingErdos;
    cfg.cv_source = CvSource::Analytic;
    const TestReport r = run_test(s, cfg);
    REQUIRE(r.critical_value == de_asymptotic_cv(0.05));
    REQUIRE(r.reject == (r.statistic_value > r.critical_value));
}

TEST_CASE("trimmed-window test runs end to end", "[detector]") {
    const TimeSeries s = simulate(13, 400);
    CvCache cache;
    TestConfig cfg;
    cfg.statistic = StatisticKind::Renyi;
    cfg.kappa = 0.75;
    cfg.cv_source = CvSource::Cached;
    cfg.cv_reps = 2000;
    cfg.cv_grid = 300;
    cfg.cache = &cache;
    const TestReport r = run_test(s, cfg);
    REQUIRE(r.critical_value > 0.0);
    REQUIRE(r.statistic_value > 0.0);
    REQUIRE(r.reject == (r.statistic_value > r.critical_value));
    REQUIRE(cache.size() == 1);
}

TEST_CASE("config validation", "[detector]") {
    const TimeSeries s = simulate(17, 100);
    TestConfig cfg;

    cfg.statistic = StatisticKind::Renyi;
    cfg.kappa = 0.4;
    REQUIRE_THROWS_AS(run_test(s, cfg), InvalidSpec);

    cfg = TestConfig{};
    cfg.statistic = StatisticKind::WeightedSup;
    cfg.variance_mode = VarianceMode::HeteroRobust;
    cfg.cv_source = CvSource::Simulated;
    REQUIRE_THROWS_AS(run_test(s, cfg), InvalidSpec);

    cfg = TestConfig{};
    cfg.weight = WeightSpec::kappa_power(0.6);
    REQUIRE_THROWS_AS(run_test(s, cfg), InvalidSpec);

    cfg = TestConfig{};
    cfg.statistic = StatisticKind::DarlingErdos;
    cfg.cv_source = CvSource::Fnl;
    REQUIRE_THROWS_AS(run_test(s, cfg), InvalidSpec);

    cfg = TestConfig{};
    cfg.alpha = 0.0;
    REQUIRE_THROWS_AS(run_test(s, cfg), InvalidSpec);

    const TimeSeries tiny = simulate(19, 15);
    REQUIRE_THROWS_AS(run_test(tiny, TestConfig{}), DegenerateData);
}

TEST_CASE("robust data-dependent test holds its level", "[detector]") {
    TestConfig cfg;
    cfg.statistic = StatisticKind::WeightedSup;
    cfg.variance_mode = VarianceMode::HeteroRobust;
    cfg.cv_source = CvSource::Fnl;
    cfg.weight = WeightSpec::kappa_power(0.25);

    const int reps = 1000;
    int rejections = 0;
    for (int rep = 0; rep < reps; ++rep) {
        cfg.fnl_seed = 600000 + static_cast<std::uint64_t>(rep);
        const TimeSeries s = simulate(400000 + rep, 800);
        if (run_test(s, cfg).reject) ++rejections;
    }
    const double freq = static_cast<double>(rejections) / reps;
    REQUIRE(freq >= 0.03);
    REQUIRE(freq <= 0.07);
}

TEST_CASE("two noiseless jumps are located exactly", "[detector]") {
    RcaSimSpec spec;
    spec.params = {1.0, 0.0, 0.0};
    spec.n = 256;
    spec.burn_in = 0;
    spec.y0 = 1.0;
    spec.regimes.breaks.push_back({0.25, -1.0, {}, {}});
    spec.regimes.breaks.push_back({0.625, 1.0, {}, {}});
    const TimeSeries s = simulate_rca(spec);

    CvCache cache;
    const ChangepointSet found = binary_segmentation(s, sup_config(&cache));
    REQUIRE(found.breaks.size() == 2);
    REQUIRE(found.breaks[0].first == 64);
    REQUIRE(found.breaks[1].first == 160);

    const ChangepointSet again = binary_segmentation(s, sup_config(&cache));
    REQUIRE(again.breaks.size() == 2);
    REQUIRE(again.breaks[0].first == found.breaks[0].first);
    REQUIRE(again.breaks[1].first == found.breaks[1].first);
}

TEST_CASE("null data yields an empty break set at roughly the nominal rate",
          "[detector]") {
    CvCache cache;
    const TestConfig cfg = sup_config(&cache);
    const int reps = 300;
    int empty = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const TimeSeries s = simulate(700000 + rep, 300);
        if (binary_segmentation(s, cfg).breaks.empty()) ++empty;
    }
    const double freq = static_cast<double>(empty) / reps;
    REQUIRE(freq >= 0.90);
    REQUIRE(freq <= 0.995);
}

TEST_CASE("a mid-sample break under noise is found once and near the truth",
          "[detector]") {
    CvCache cache;
    const TestConfig cfg = sup_config(&cache);
    const int reps = 250;
    const int n = 400;
    int exactly_one = 0, near = 0, wide = 0, detected = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const TimeSeries s = simulate(800000 + rep, n, 0.4, 0.01, 0.5, 0.7, 0.5);
        const ChangepointSet cs = binary_segmentation(s, cfg);
        if (cs.breaks.size() == 1) ++exactly_one;
        if (!cs.breaks.empty()) {
            ++detected;
            const int err = std::abs(cs.breaks.front().first - 200);
            if (err <= 20) ++near;
            if (err <= 60) ++wide;
        }
    }
    REQUIRE(exactly_one >= static_cast<int>(0.70 * reps));
    // At this signal-to-noise ratio about 60% of detections land within
    // 0.05 N of the truth and 90% within 0.15 N; the bars sit below those
    // rates so the check fails on a broken argmax, not on a perturbed cv.
    REQUIRE(near >= static_cast<int>(0.50 * detected));
    REQUIRE(wide >= static_cast<int>(0.82 * detected));
}

TEST_CASE("segmentation validates min_segment", "[detector]") {
    const TimeSeries s = simulate(23, 100);
    CvCache cache;
    REQUIRE_THROWS_AS(binary_segmentation(s, sup_config(&cache), 10), InvalidSpec);
}
