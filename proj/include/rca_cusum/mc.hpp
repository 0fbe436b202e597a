#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rca_cusum/detector.hpp"

namespace rca_cusum {

enum class HeteroCase { HomoHomo, HomoHet2, Het1Homo, Het1Het2 };
enum class BreakKind { None, Mid, End };

inline const char* to_string(HeteroCase c) {
    switch (c) {
        case HeteroCase::HomoHomo: return "homo-homo";
        case HeteroCase::HomoHet2: return "homo-het2";
        case HeteroCase::Het1Homo: return "het1-homo";
        case HeteroCase::Het1Het2: return "het1-het2";
    }
    return "?";
}

struct ExperimentSpec {
    RcaSimSpec dgp;  // template; n is taken from n_list, seed is the master seed
    BreakKind break_kind = BreakKind::None;
    std::vector<double> deltas;  // coefficient jumps, used when break_kind != None
    HeteroCase hetero_case = HeteroCase::HomoHomo;
    std::vector<double> kappas;
    std::vector<int> n_list;
    long reps = 2000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    int L = 200;
    std::optional<TestConfig> config_override;  // replaces the kappa routing

    // Simulation design of the source study: sigma1^2 = 0.01, sigma2^2 = 0.5,
    // burn-in 1000, variances scaled by 1.5 after N/2 in the hetero cases,
    // mid break at 0.5N, end break at 0.9N.
    static ExperimentSpec paper_2021(double beta0, HeteroCase hc,
                                     std::vector<int> n_list,
                                     std::vector<double> kappas,
                                     std::uint64_t seed = 1) {
        ExperimentSpec s;
        s.dgp.params = RcaParams{beta0, 0.01, 0.5};
        s.dgp.burn_in = 1000;
        s.dgp.y0 = 0.0;
        s.hetero_case = hc;
        s.n_list = std::move(n_list);
        s.kappas = std::move(kappas);
        s.seed = seed;
        s.deltas = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50};
        return s;
    }
};

struct RejectionCell {
    double beta0 = 0.0;
    int n = 0;
    double kappa = 0.0;
    double delta = 0.0;  // 0 under the null
    double frequency = 0.0;
    long rejections = 0;
    long reps = 0;
    double half_width = 0.0;  // 1.96 sqrt(p(1-p)/reps)
    long overflow_redraws = 0;
};

struct RejectionTable {
    std::vector<RejectionCell> cells;
    long reps = 0;

    const RejectionCell* find(int n, double kappa, double delta = 0.0) const {
        for (const auto& c : cells)
            if (c.n == n && c.kappa == kappa && c.delta == delta) return &c;
        return nullptr;
    }
};

namespace detail {

// kappa < 1/2: robust weighted sup with data-dependent cv; kappa = 1/2:
// robust Darling-Erdos against its finite-sample quantile; kappa > 1/2:
// robust Renyi against the asymptotic quantile.
inline TestConfig route_kappa(double kappa, const ExperimentSpec& spec,
                              CvCache* cache) {
    TestConfig cfg;
    cfg.alpha = spec.alpha;
    cfg.variance_mode = VarianceMode::HeteroRobust;
    cfg.L = spec.L;
    cfg.cache = cache;
    if (kappa < 0.5) {
        cfg.statistic = StatisticKind::WeightedSup;
        cfg.weight = WeightSpec::kappa_power(kappa);
        cfg.cv_source = CvSource::Fnl;
    } else if (kappa == 0.5) {
        cfg.statistic = StatisticKind::DarlingErdos;
        cfg.cv_source = CvSource::Cached;
    } else {
        cfg.statistic = StatisticKind::Renyi;
        cfg.kappa = kappa;
        cfg.cv_source = CvSource::Cached;
    }
    return cfg;
}

inline RcaSimSpec build_dgp(const ExperimentSpec& spec, int n, double delta,
                            std::uint64_t path_seed) {
    RcaSimSpec sim = spec.dgp;
    sim.n = n;
    sim.seed = path_seed;
    sim.regimes.breaks.clear();

    const bool het1 = spec.hetero_case == HeteroCase::Het1Homo ||
                      spec.hetero_case == HeteroCase::Het1Het2;
    const bool het2 = spec.hetero_case == HeteroCase::HomoHet2 ||
                      spec.hetero_case == HeteroCase::Het1Het2;

    RegimeBreak mid;
    mid.fraction = 0.5;
    bool use_mid = false;
    if (het1) {
        mid.variance_scale_1 = 1.5;
        use_mid = true;
    }
    if (het2) {
        mid.variance_scale_2 = 1.5;
        use_mid = true;
    }
    if (spec.break_kind == BreakKind::Mid && delta != 0.0) {
        mid.new_beta = spec.dgp.params.beta0 + delta;
        use_mid = true;
    }
    if (use_mid) sim.regimes.breaks.push_back(mid);
    if (spec.break_kind == BreakKind::End && delta != 0.0) {
        RegimeBreak end;
        end.fraction = 0.9;
        end.new_beta = spec.dgp.params.beta0 + delta;
        sim.regimes.breaks.push_back(end);
    }
    return sim;
}

inline RejectionCell run_cell(const ExperimentSpec& spec, int n, std::size_t n_idx,
                              double kappa, double delta, CvCache* cache) {
    TestConfig cfg = spec.config_override ? *spec.config_override
                                          : route_kappa(kappa, spec, cache);
    RejectionCell cell;
    cell.beta0 = spec.dgp.params.beta0;
    cell.n = n;
    cell.kappa = kappa;
    cell.delta = delta;
    cell.reps = spec.reps;

    const std::uint64_t cell_master = detail::derive_seed(spec.seed, n_idx + 1);
    for (long rep = 0; rep < spec.reps; ++rep) {
        TimeSeries series;
        long attempt = 0;
        for (;;) {
            try {
                series = simulate_rca(build_dgp(
                    spec, n, delta,
                    detail::derive_seed(cell_master, static_cast<std::uint64_t>(rep),
                                        1, static_cast<std::uint64_t>(attempt))));
                break;
            } catch (const OverflowError&) {
                ++cell.overflow_redraws;
                if (++attempt > 200)
                    throw DegenerateData("run_cell: persistent overflow at n=" +
                                         std::to_string(n));
            }
        }
        cfg.fnl_seed = detail::derive_seed(cell_master, static_cast<std::uint64_t>(rep), 2);
        if (run_test(series, cfg).reject) ++cell.rejections;
    }
    cell.frequency = static_cast<double>(cell.rejections) / spec.reps;
    cell.half_width =
        1.96 * std::sqrt(cell.frequency * (1.0 - cell.frequency) / spec.reps);
    return cell;
}

}  // namespace detail

// Null rejection frequencies per (n, kappa) cell.
inline RejectionTable size_experiment(const ExperimentSpec& spec) {
    if (spec.break_kind != BreakKind::None)
        throw InvalidSpec("size_experiment: break_kind must be None");
    if (spec.reps < 1) throw InvalidSpec("size_experiment: reps must be >= 1");
    if (spec.n_list.empty() || spec.kappas.empty())
        throw InvalidSpec("size_experiment: empty n_list or kappas");
    for (double k : spec.kappas)
        if (k < 0.0) throw InvalidSpec("size_experiment: kappa must be >= 0");

    RejectionTable table;
    table.reps = spec.reps;
    CvCache cache;
    for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni)
        for (double kappa : spec.kappas)
            table.cells.push_back(
                detail::run_cell(spec, spec.n_list[ni], ni, kappa, 0.0, &cache));
    return table;
}

// Rejection frequencies per (n, kappa, delta) under the break DGPs. Paths use
// common random numbers across deltas and kappas, so delta = 0 reproduces the
// size cells exactly.
inline RejectionTable power_experiment(const ExperimentSpec& spec) {
    if (spec.break_kind == BreakKind::None)
        throw InvalidSpec("power_experiment: break_kind must not be None");
    if (spec.reps < 1) throw InvalidSpec("power_experiment: reps must be >= 1");
    if (spec.deltas.empty()) throw InvalidSpec("power_experiment: empty deltas");
    for (double k : spec.kappas)
        if (k < 0.0) throw InvalidSpec("power_experiment: kappa must be >= 0");

    RejectionTable table;
    table.reps = spec.reps;
    CvCache cache;
    for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni)
        for (double kappa : spec.kappas)
            for (double delta : spec.deltas)
                table.cells.push_back(
                    detail::run_cell(spec, spec.n_list[ni], ni, kappa, delta, &cache));
    return table;
}

}  // namespace rca_cusum
