#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rca_cusum/critical_values.hpp"

namespace rca_cusum {

enum class StatisticKind { WeightedSup, DarlingErdos, Renyi };
enum class VarianceMode { Homoskedastic, HeteroRobust };
enum class CvSource { Analytic, Simulated, Fnl, Cached };

struct TestConfig {
    StatisticKind statistic = StatisticKind::WeightedSup;
    VarianceMode variance_mode = VarianceMode::Homoskedastic;
    double alpha = 0.05;

    WeightSpec weight = WeightSpec::kappa_power(0.0);  // WeightedSup
    double kappa = 0.75;                               // Renyi
    std::optional<TrimSpec> trim;                      // Renyi / DarlingErdos

    CvSource cv_source = CvSource::Simulated;
    long cv_reps = 20000;       // Simulated
    long cv_grid = 2000;        // Simulated
    std::uint64_t cv_seed = 20210401;
    int L = 200;                // Fnl
    std::uint64_t fnl_seed = 20210404;
    std::string cache_path;    // Cached: backing file
    CvCache* cache = nullptr;  // Cached: shared in-memory cache, wins over path

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
        switch (statistic) {
            case StatisticKind::WeightedSup:
                if (variance_mode == VarianceMode::HeteroRobust) {
                    if (cv_source != CvSource::Fnl)
                        throw InvalidSpec(
                            "hetero-robust weighted sup requires the Fnl cv source");
                } else {
                    if (cv_source != CvSource::Simulated && cv_source != CvSource::Cached)
                        throw InvalidSpec(
                            "homoskedastic weighted sup needs a Simulated or Cached cv");
                    if (weight.kind != WeightSpec::Kind::KappaPower || weight.kappa >= 0.5)
                        throw InvalidSpec(
                            "homoskedastic weighted sup: critical values exist for "
                            "(t(1-t))^kappa weights with kappa < 1/2 only");
                }
                break;
            case StatisticKind::DarlingErdos:
                if (cv_source == CvSource::Fnl)
                    throw InvalidSpec("Darling-Erdos has no Fnl cv source");
                break;
            case StatisticKind::Renyi:
                if (!(kappa > 0.5)) throw InvalidSpec("Renyi requires kappa > 0.5");
                if (cv_source != CvSource::Simulated && cv_source != CvSource::Cached)
                    throw InvalidSpec("Renyi needs a Simulated or Cached cv");
                break;
        }
    }
};

struct TestReport {
    double statistic_value = 0.0;
    double critical_value = 0.0;
    bool reject = false;
    std::optional<int> breakdate;  // argmax split, present only on rejection
    double t_hat = 0.0;            // breakdate / (N+1)
    std::optional<double> eta_hat_sq;
    std::vector<std::string> diagnostics;
};

struct ChangepointSet {
    std::vector<std::pair<int, TestReport>> breaks;  // chronological
    int min_segment = 20;
};

namespace detail {

struct StatWithArgmax {
    double stat = 0.0;
    std::optional<int> argmax_k;
};

inline StatWithArgmax de_stat_with_argmax(const CumulantTable& table, double eta_hat,
                                          const TrimSpec& tr) {
    const int n = table.n;
    const int lo = std::max(2, tr.r1);
    const int hi = std::min(n - 1, n - tr.r2);
    StatWithArgmax out;
    double m = -1.0;
    for (int k = lo; k <= hi; ++k) {
        const double dl = table.den_prefix(k);
        const double dr = table.den_suffix(k);
        if (dl <= 0.0 || dr <= 0.0) continue;
        const double bl = table.num_prefix(k) / dl;
        const double br = table.num_suffix(k) / dr;
        const double v =
            std::sqrt(static_cast<double>(k) * (n - k) / n) * std::abs(bl - br);
        if (v > m) {
            m = v;
            out.argmax_k = k;
        }
    }
    if (m < 0.0) throw DegenerateData("darling_erdos_stat: no usable split");
    const double x = std::log(static_cast<double>(n));
    out.stat = de_a(x) * (m / eta_hat) - de_b(x);
    return out;
}

inline StatWithArgmax hetero_de_with_argmax(const CusumProcess& qbar,
                                            const HeteroKernel& kernel,
                                            const TrimSpec& tr) {
    const int n = qbar.n;
    const int lo = std::max(2, tr.r1);
    const int hi = std::min(n - 2, n - tr.r2);
    StatWithArgmax out;
    double sup = -1.0;
    for (std::size_t i = 0; i < qbar.size(); ++i) {
        const int k = qbar.grid[i];
        if (k < lo || k > hi || qbar.degenerate[i]) continue;
        const double g = kernel.g_diag[i];
        if (g <= kKernelFloor) continue;
        const double v = std::abs(qbar.values[i]) / std::sqrt(g);
        if (v > sup) {
            sup = v;
            out.argmax_k = k;
        }
    }
    if (sup < 0.0) throw DegenerateData("hetero_de_stat: empty usable grid");
    const double x = std::log(static_cast<double>(n));
    out.stat = de_a(x) * sup - de_b(x);
    return out;
}

inline StatWithArgmax renyi_with_argmax(const CusumProcess& process,
                                        const HeteroKernel* kernel, double kappa,
                                        const TrimSpec& tr, double eta_hat) {
    const int n = process.n;
    const double t_lo = static_cast<double>(tr.r1) / n;
    const double t_hi = 1.0 - static_cast<double>(tr.r2) / n;
    StatWithArgmax out;
    double sup = -1.0;
    for (std::size_t i = 0; i < process.size(); ++i) {
        const double t = process.t_at(i);
        if (t < t_lo || t > t_hi) continue;
        if (sup < 0.0) sup = 0.0;
        if (process.degenerate[i]) continue;
        double v;
        if (kernel) {
            const double g = kernel->g_diag[i];
            if (g <= kKernelFloor) continue;
            v = std::pow(t * (1.0 - t), 0.5 - kappa) * std::abs(process.values[i]) /
                std::sqrt(g);
        } else {
            v = std::abs(process.values[i]) / std::pow(t * (1.0 - t), kappa);
        }
        if (v > sup) {
            sup = v;
            out.argmax_k = process.grid[i];
        }
    }
    if (sup < 0.0) throw DegenerateData("renyi_stat: trimmed window empty");
    const double rn = static_cast<double>(tr.r_min()) / n;
    out.stat = std::pow(rn, kappa - 0.5) * sup / (kernel ? 1.0 : eta_hat);
    return out;
}

inline double cached_or_simulated_cv(const TestConfig& config, const CvKey& key,
                                     const std::function<double()>& simulate,
                                     std::vector<std::string>& diagnostics) {
    if (config.cv_source != CvSource::Cached) return simulate();
    CvCache local;
    CvCache* cache = config.cache;
    if (!cache) {
        cache = &local;
        if (!config.cache_path.empty()) local.load(config.cache_path);
    }
    if (const auto hit = cache->lookup(key)) {
        diagnostics.push_back("cv cache hit: " + CvCache::key_string(key));
        return *hit;
    }
    const double value = simulate();
    cache->insert(key, value);
    if (!config.cache && !config.cache_path.empty()) cache->save(config.cache_path);
    diagnostics.push_back("cv cache miss, simulated: " + CvCache::key_string(key));
    return value;
}

}  // namespace detail

// Runs the configured test end to end: cumulants (+ kernel when robust),
// statistic, critical value, decision, and the argmax breakdate on rejection.
inline TestReport run_test(const TimeSeries& series, const TestConfig& config) {
    config.validate();
    if (series.n < 20) throw DegenerateData("run_test: need n >= 20");
    const int n = series.n;
    const TrimSpec tr = config.trim ? *config.trim : default_trim(n);
    validate_trim(tr, n);

    TestReport report;
    const CumulantTable table = build_cumulants(series);

    const bool robust = config.variance_mode == VarianceMode::HeteroRobust;
    std::optional<HeteroKernel> kernel;
    std::optional<CusumProcess> qbar;
    if (robust || config.statistic == StatisticKind::WeightedSup) {
        kernel = build_kernel(series, table);
        qbar = qbar_process(series, table, *kernel);
    }

    // A bitwise-exact autoregressive fit leaves no residual scale at all; the
    // kernel's variance total is the shared floor for every statistic that is
    // normalized by it.
    if (kernel && !(kernel->b_total > 0.0))
        throw DegenerateData("run_test: degenerate variance scale");

    // Only the eta-scaled statistics need a usable variance estimate up
    // front. The self-normalized forms divide the process by its own residual
    // scale, so a common collapse (a break left in a series with no noise)
    // cancels instead of blowing up.
    const EtaHatSq eta = eta_hat_sq(series, table);
    const auto require_eta_hat = [&eta]() -> double {
        if (eta.degenerate || !(eta.value > 0.0))
            throw DegenerateData("run_test: degenerate variance estimate");
        return std::sqrt(eta.value);
    };
    if (!robust) report.eta_hat_sq = eta.value;

    detail::StatWithArgmax sa;
    double cv = 0.0;
    switch (config.statistic) {
        case StatisticKind::WeightedSup: {
            if (robust) {
                const SupResult s = hetero_weighted_sup(*qbar, config.weight);
                sa.stat = s.stat;
                sa.argmax_k = s.argmax_k;
                cv = hetero_fnl_cv(*kernel, config.weight, config.alpha, config.L,
                                   config.fnl_seed);
            } else {
                // The statistic is evaluated in the process's own operational
                // time: sup |Qbar|/w scaled by c1(1) b(1)^{1/2}. This has the
                // same weighted-bridge limit as |Q|/(eta w) but keeps the
                // finite-sample variance profile exactly proportional to
                // t(1-t), which the calendar-time form only attains as
                // N -> infinity.
                const SupResult s = hetero_weighted_sup(*qbar, config.weight);
                sa.stat = s.stat / (kernel->c1_total * std::sqrt(kernel->b_total));
                // The breakdate comes from the calendar-time process: its
                // t(1-t) profile keeps O(1) scale at every split, while the
                // c1 c2 profile can collapse on segments whose weights decay.
                // The argmax does not move under a constant scale, so the
                // variance estimate is not needed here.
                const CusumProcess q = q_process(series, table);
                sa.argmax_k = weighted_sup(q, config.weight, 1.0).argmax_k;
                const CvKey key{"bridge", config.weight.kappa, config.alpha,
                                config.cv_reps, config.cv_grid, config.cv_seed};
                cv = detail::cached_or_simulated_cv(
                    config, key,
                    [&] {
                        return simulate_bridge_cv(config.weight.kappa, {config.alpha},
                                                  config.cv_reps, config.cv_grid,
                                                  config.cv_seed)[0];
                    },
                    report.diagnostics);
            }
            break;
        }
        case StatisticKind::DarlingErdos: {
            if (robust)
                sa = detail::hetero_de_with_argmax(*qbar, *kernel, tr);
            else
                sa = detail::de_stat_with_argmax(table, require_eta_hat(), tr);
            if (config.cv_source == CvSource::Analytic) {
                cv = de_asymptotic_cv(config.alpha);
            } else {
                const CvKey key{"de_finite", 0.5, config.alpha, config.cv_reps,
                                static_cast<long>(n), config.cv_seed};
                cv = detail::cached_or_simulated_cv(
                    config, key,
                    [&] {
                        return de_finite_sample_cv(n, {config.alpha}, config.cv_reps,
                                                   config.cv_seed, tr)[0];
                    },
                    report.diagnostics);
            }
            break;
        }
        case StatisticKind::Renyi: {
            if (robust)
                sa = detail::renyi_with_argmax(*qbar, &*kernel, config.kappa, tr, 0.0);
            else {
                const CusumProcess q = q_process(series, table);
                sa = detail::renyi_with_argmax(q, nullptr, config.kappa, tr,
                                               require_eta_hat());
            }
            const double g1 = static_cast<double>(tr.r_min()) / tr.r1;
            const double g2 = static_cast<double>(tr.r_min()) / tr.r2;
            const CvKey key{"renyi", config.kappa, config.alpha, config.cv_reps,
                            config.cv_grid, config.cv_seed};
            const auto simulate = [&] {
                return simulate_renyi_cv(config.kappa, {config.alpha}, config.cv_reps,
                                         config.cv_grid, config.cv_seed, g1, g2)[0];
            };
            if (g1 == 1.0 && g2 == 1.0)
                cv = detail::cached_or_simulated_cv(config, key, simulate,
                                                    report.diagnostics);
            else
                cv = simulate();
            break;
        }
    }

    report.statistic_value = sa.stat;
    report.critical_value = cv;
    report.reject = sa.stat > cv;
    if (report.reject && sa.argmax_k) {
        report.breakdate = sa.argmax_k;
        report.t_hat = static_cast<double>(*sa.argmax_k) / (n + 1.0);
    }
    return report;
}

namespace detail {

inline void segment_recurse(const TimeSeries& series, const TestConfig& config,
                            int min_segment, int lo, int hi, ChangepointSet& out) {
    const int len = hi - lo;
    if (len < min_segment) return;
    TimeSeries seg;
    seg.n = len;
    seg.values.assign(series.values.begin() + lo, series.values.begin() + hi + 1);
    seg.label = series.label;
    TestReport report;
    try {
        report = run_test(seg, config);
    } catch (const DegenerateData&) {
        return;
    }
    if (!report.reject || !report.breakdate) return;
    const int k_abs = lo + *report.breakdate;
    out.breaks.emplace_back(k_abs, report);
    segment_recurse(series, config, min_segment, lo, k_abs, out);
    segment_recurse(series, config, min_segment, k_abs, hi, out);
}

}  // namespace detail

// Binary segmentation: test, split at the detected breakdate, recurse on both
// halves. Critical values are recomputed per segment (they depend on segment
// length for Simulated DE quantiles and on the segment's own kernel for Fnl).
inline ChangepointSet binary_segmentation(const TimeSeries& series,
                                          const TestConfig& config,
                                          int min_segment = 20) {
    if (min_segment < 20) throw InvalidSpec("binary_segmentation: min_segment >= 20");
    ChangepointSet out;
    out.min_segment = min_segment;
    detail::segment_recurse(series, config, min_segment, 0, series.n, out);
    std::sort(out.breaks.begin(), out.breaks.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace rca_cusum
