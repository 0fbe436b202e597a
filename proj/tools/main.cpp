#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rca_cusum.hpp"

namespace {

using namespace rca_cusum;

std::string ds(double v) { return CvCache::format_double(v); }

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw DegenerateData(out_path + ": cannot write");
    out << text;
}

ReportFormat parse_format(const std::string& s) {
    if (s == "structured") return ReportFormat::Structured;
    if (s == "delimited") return ReportFormat::Delimited;
    return ReportFormat::PlotData;
}

struct SimulateFlags {
    int n = 500;
    double beta0 = 0.5, sigma1_sq = 0.01, sigma2_sq = 0.5, y0 = 0.0;
    int burn_in = 1000;
    std::uint64_t seed = 1;
    std::vector<std::string> breaks;  // frac:beta[:scale1[:scale2]]
    std::string out, format = "plot";
};

struct TestFlags {
    std::string input, column, transform = "none", date_column, delimiter;
    std::string statistic = "sup", cv_source, weight = "power", cache_path;
    std::string out, format = "structured";
    double kappa = 0.0, alpha = 0.05;
    bool hetero = false, fail_on_reject = false;
    std::vector<int> trim;
    long reps = 20000, grid = 2000;
    std::uint64_t cv_seed = 20210401, fnl_seed = 20210404;
    int L = 200;
    int min_segment = 20;
};

struct CvFlags {
    std::string family, cache_path, out, format = "structured";
    double kappa = -1.0;
    std::vector<double> alphas = {0.05, 0.10};
    long reps = 20000, grid = 2000;
    std::uint64_t seed = 0;
    int n = 800;
    double gamma1 = 1.0, gamma2 = 1.0;
};

struct BenchFlags {
    double beta0 = 0.5, alpha = 0.05;
    std::string hetero_case = "homo-homo", break_kind = "none";
    std::vector<double> deltas, kappas = {0.0};
    std::vector<int> ns = {800};
    long reps = 2000;
    std::uint64_t seed = 1;
    int L = 200;
    double sigma1_sq = 0.01, sigma2_sq = 0.5;
    int burn_in = 1000;
    std::string out, format = "structured";
};

RegimeBreak parse_break(const std::string& text) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    RegimeBreak br;
    try {
        br.fraction = std::stod(fields.at(0));
        if (fields.size() > 1 && !fields[1].empty()) br.new_beta = std::stod(fields[1]);
        if (fields.size() > 2 && !fields[2].empty())
            br.variance_scale_1 = std::stod(fields[2]);
        if (fields.size() > 3 && !fields[3].empty())
            br.variance_scale_2 = std::stod(fields[3]);
    } catch (const std::exception&) {
        throw InvalidSpec("--break expects frac:beta[:scale1[:scale2]], got '" + text +
                          "'");
    }
    return br;
}

int run_simulate(const SimulateFlags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    RcaSimSpec spec;
    spec.params = {f.beta0, f.sigma1_sq, f.sigma2_sq};
    spec.n = f.n;
    spec.burn_in = f.burn_in;
    spec.y0 = f.y0;
    spec.seed = f.seed;
    for (const auto& b : f.breaks) spec.regimes.breaks.push_back(parse_break(b));
    const TimeSeries series = simulate_rca(spec);

    ReportDocument doc;
    doc.command = "simulate";
    doc.input_label = "synthetic seed " + std::to_string(f.seed);
    doc.config["n"] = std::to_string(f.n);
    doc.config["beta0"] = ds(f.beta0);
    doc.config["sigma1_sq"] = ds(f.sigma1_sq);
    doc.config["sigma2_sq"] = ds(f.sigma2_sq);
    doc.config["y0"] = ds(f.y0);
    doc.config["burn_in"] = std::to_string(f.burn_in);
    doc.config["seed"] = std::to_string(f.seed);
    for (std::size_t i = 0; i < f.breaks.size(); ++i)
        doc.config["break_" + std::to_string(i + 1)] = f.breaks[i];
    doc.plot.reserve(series.values.size());
    for (std::size_t i = 0; i < series.values.size(); ++i)
        doc.plot.push_back({static_cast<double>(i), series.values[i], 0.0});
    doc.elapsed_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_output(emit_report(doc, parse_format(f.format)), f.out);
    return 0;
}

TimeSeries ingest(const TestFlags& f) {
    IngestSpec spec;
    spec.path = f.input;
    spec.column = f.column;
    spec.transform = transform_from_string(f.transform);
    if (!f.date_column.empty()) spec.date_column = f.date_column;
    if (!f.delimiter.empty()) spec.delimiter = f.delimiter[0];
    return load_series(spec);
}

TestConfig make_config(const TestFlags& f, bool cv_source_given, bool kappa_given) {
    TestConfig cfg;
    if (f.statistic == "sup")
        cfg.statistic = StatisticKind::WeightedSup;
    else if (f.statistic == "de")
        cfg.statistic = StatisticKind::DarlingErdos;
    else
        cfg.statistic = StatisticKind::Renyi;
    cfg.variance_mode =
        f.hetero ? VarianceMode::HeteroRobust : VarianceMode::Homoskedastic;
    if (f.weight != "power")
        throw InvalidSpec("--weight: only the 'power' family is available here");

    const double kappa = kappa_given
                             ? f.kappa
                             : (cfg.statistic == StatisticKind::Renyi ? 0.75 : 0.0);
    cfg.kappa = kappa;
    cfg.weight = WeightSpec::kappa_power(cfg.statistic == StatisticKind::Renyi ? 0.0
                                                                               : kappa);

    std::string source = f.cv_source;
    if (!cv_source_given) {
        if (cfg.statistic == StatisticKind::WeightedSup && f.hetero)
            source = "fnl";
        else if (cfg.statistic == StatisticKind::DarlingErdos)
            source = "analytic";
        else
            source = f.cache_path.empty() ? "simulated" : "cached";
    }
    if (source == "simulated")
        cfg.cv_source = CvSource::Simulated;
    else if (source == "cached")
        cfg.cv_source = CvSource::Cached;
    else if (source == "analytic")
        cfg.cv_source = CvSource::Analytic;
    else
        cfg.cv_source = CvSource::Fnl;

    if (!f.trim.empty()) {
        if (f.trim.size() > 2) throw InvalidSpec("--trim takes one or two values");
        cfg.trim = TrimSpec{f.trim[0], f.trim.size() == 2 ? f.trim[1] : f.trim[0]};
    }
    cfg.alpha = f.alpha;
    cfg.cv_reps = f.reps;
    cfg.cv_grid = f.grid;
    cfg.cv_seed = f.cv_seed;
    cfg.fnl_seed = f.fnl_seed;
    cfg.L = f.L;
    cfg.cache_path = f.cache_path;
    return cfg;
}

const char* source_name(CvSource s) {
    switch (s) {
        case CvSource::Simulated: return "simulated";
        case CvSource::Cached: return "cached";
        case CvSource::Analytic: return "analytic";
        case CvSource::Fnl: return "fnl";
    }
    return "?";
}

void echo_test_config(ReportDocument& doc, const TestFlags& f, const TestConfig& cfg,
                      int n) {
    const TrimSpec tr = cfg.trim ? *cfg.trim : default_trim(n);
    doc.config["statistic"] = f.statistic;
    doc.config["variance_mode"] =
        cfg.variance_mode == VarianceMode::HeteroRobust ? "hetero-robust"
                                                        : "homoskedastic";
    doc.config["kappa"] = ds(cfg.statistic == StatisticKind::Renyi ? cfg.kappa
                                                                   : cfg.weight.kappa);
    doc.config["weight"] = f.weight;
    doc.config["alpha"] = ds(cfg.alpha);
    doc.config["cv_source"] = source_name(cfg.cv_source);
    doc.config["cv_reps"] = std::to_string(cfg.cv_reps);
    doc.config["cv_grid"] = std::to_string(cfg.cv_grid);
    doc.config["cv_seed"] = std::to_string(cfg.cv_seed);
    doc.config["fnl_seed"] = std::to_string(cfg.fnl_seed);
    doc.config["L"] = std::to_string(cfg.L);
    doc.config["trim_r1"] = std::to_string(tr.r1);
    doc.config["trim_r2"] = std::to_string(tr.r2);
    doc.config["transform"] = f.transform;
    doc.config["n"] = std::to_string(n);
    if (!f.cache_path.empty()) doc.config["cache"] = f.cache_path;
}

// The per-split profile in decision units: its sup is the reported statistic,
// so the constant critical value is the rejection envelope.
std::vector<PlotRow> build_profile(const TimeSeries& series, const TestConfig& cfg,
                                   const TestReport& report) {
    std::vector<PlotRow> rows;
    const CumulantTable table = build_cumulants(series);
    const int n = series.n;
    const TrimSpec tr = cfg.trim ? *cfg.trim : default_trim(n);
    const bool robust = cfg.variance_mode == VarianceMode::HeteroRobust;
    const double la = de_a(std::log(static_cast<double>(n)));
    const double lb = de_b(std::log(static_cast<double>(n)));

    const HeteroKernel kernel = build_kernel(series, table);
    const bool use_qbar = robust || cfg.statistic == StatisticKind::WeightedSup;
    CusumProcess proc = use_qbar ? qbar_process(series, table, kernel)
                                 : q_process(series, table);
    const double eta_hat = use_qbar ? 0.0 : proc.eta_hat;
    const double op_scale = kernel.c1_total * std::sqrt(std::max(kernel.b_total, 0.0));

    for (std::size_t i = 0; i < proc.size(); ++i) {
        if (proc.degenerate[i]) continue;
        const int k = proc.grid[i];
        const double t = proc.t_at(i);
        const double tt = t * (1.0 - t);
        const double q = std::abs(proc.values[i]);
        double value = 0.0;
        switch (cfg.statistic) {
            case StatisticKind::WeightedSup: {
                value = q / cfg.weight(t);
                if (!robust) {
                    if (!(op_scale > 0.0)) continue;
                    value /= op_scale;
                }
                break;
            }
            case StatisticKind::DarlingErdos: {
                if (k < std::max(2, tr.r1) || k > std::min(n - 2, n - tr.r2)) continue;
                const double scale = robust ? std::sqrt(kernel.g_diag[i])
                                            : eta_hat * std::sqrt(tt);
                if (!(scale > 1e-12)) continue;
                value = la * (q / scale) - lb;
                break;
            }
            case StatisticKind::Renyi: {
                if (k < tr.r1 || k > n - tr.r2) continue;
                const double pre =
                    std::pow(static_cast<double>(tr.r_min()) / n, cfg.kappa - 0.5);
                if (robust) {
                    const double g = kernel.g_diag[i];
                    if (!(g > 1e-12)) continue;
                    value = pre * std::pow(tt, 0.5 - cfg.kappa) * q / std::sqrt(g);
                } else {
                    value = pre * q / (eta_hat * std::pow(tt, cfg.kappa));
                }
                break;
            }
        }
        rows.push_back({t, value, report.critical_value});
    }
    return rows;
}

int run_test_cmd(const TestFlags& f, bool cv_source_given, bool kappa_given) {
    const auto t0 = std::chrono::steady_clock::now();
    const TimeSeries series = ingest(f);
    const TestConfig cfg = make_config(f, cv_source_given, kappa_given);
    const TestReport report = run_test(series, cfg);

    ReportDocument doc;
    doc.command = "test";
    doc.input_label = series.label;
    echo_test_config(doc, f, cfg, series.n);
    doc.test = report;
    doc.plot = build_profile(series, cfg, report);
    doc.elapsed_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_output(emit_report(doc, parse_format(f.format)), f.out);
    return f.fail_on_reject && report.reject ? 3 : 0;
}

int run_segment_cmd(const TestFlags& f, bool cv_source_given, bool kappa_given) {
    const auto t0 = std::chrono::steady_clock::now();
    const TimeSeries series = ingest(f);
    const TestConfig cfg = make_config(f, cv_source_given, kappa_given);
    const ChangepointSet found = binary_segmentation(series, cfg, f.min_segment);

    ReportDocument doc;
    doc.command = "segment";
    doc.input_label = series.label;
    echo_test_config(doc, f, cfg, series.n);
    doc.config["min_segment"] = std::to_string(f.min_segment);
    doc.segmentation = found;
    doc.elapsed_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_output(emit_report(doc, parse_format(f.format)), f.out);
    return f.fail_on_reject && !found.breaks.empty() ? 3 : 0;
}

int run_cv_cmd(const CvFlags& f, bool seed_given, bool kappa_given) {
    const auto t0 = std::chrono::steady_clock::now();
    const double kappa =
        kappa_given ? f.kappa : (f.family == "renyi" ? 0.75 : (f.family == "bridge" ? 0.0 : 0.5));
    const std::uint64_t seed =
        seed_given ? f.seed
                   : (f.family == "bridge" ? 20210401
                                           : (f.family == "renyi" ? 20210402 : 20210403));
    const bool symmetric = f.gamma1 == 1.0 && f.gamma2 == 1.0;
    const long key_grid = f.family == "de-finite" ? f.n : f.grid;
    const std::string key_family = f.family == "de-finite" ? "de_finite" : f.family;
    const double key_kappa = f.family == "de-finite" ? 0.5 : kappa;

    CvCache cache;
    const bool use_cache = !f.cache_path.empty() && symmetric;
    if (use_cache) cache.load(f.cache_path);

    std::vector<double> values(f.alphas.size());
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < f.alphas.size(); ++i) {
        const CvKey key{key_family, key_kappa, f.alphas[i], f.reps, key_grid, seed};
        if (use_cache) {
            if (const auto hit = cache.lookup(key)) {
                values[i] = *hit;
                continue;
            }
        }
        missing.push_back(i);
    }
    if (!missing.empty()) {
        std::vector<double> fresh;
        if (f.family == "bridge")
            fresh = simulate_bridge_cv(kappa, f.alphas, f.reps, f.grid, seed);
        else if (f.family == "renyi")
            fresh = simulate_renyi_cv(kappa, f.alphas, f.reps, f.grid, seed, f.gamma1,
                                      f.gamma2);
        else
            fresh = de_finite_sample_cv(f.n, f.alphas, f.reps, seed);
        for (std::size_t i = 0; i < f.alphas.size(); ++i) {
            values[i] = fresh[i];
            if (use_cache)
                cache.insert(
                    CvKey{key_family, key_kappa, f.alphas[i], f.reps, key_grid, seed},
                    fresh[i]);
        }
        if (use_cache) cache.save(f.cache_path);
    }

    ReportDocument doc;
    doc.command = "cv";
    doc.input_label = key_family;
    doc.config["family"] = f.family;
    doc.config["kappa"] = ds(kappa);
    doc.config["reps"] = std::to_string(f.reps);
    doc.config["grid"] = std::to_string(f.grid);
    doc.config["seed"] = std::to_string(seed);
    if (f.family == "de-finite") doc.config["n"] = std::to_string(f.n);
    if (f.family == "renyi") {
        doc.config["gamma1"] = ds(f.gamma1);
        doc.config["gamma2"] = ds(f.gamma2);
    }
    if (use_cache) doc.config["cache"] = f.cache_path;
    for (std::size_t i = 0; i < f.alphas.size(); ++i) {
        doc.config["cv_" + nlohmann::json(f.alphas[i]).dump()] = ds(values[i]);
        doc.plot.push_back({f.alphas[i], values[i], 0.0});
    }
    doc.elapsed_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_output(emit_report(doc, parse_format(f.format)), f.out);
    return 0;
}

int run_bench_cmd(const BenchFlags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    HeteroCase hc = HeteroCase::HomoHomo;
    if (f.hetero_case == "homo-het2") hc = HeteroCase::HomoHet2;
    else if (f.hetero_case == "het1-homo") hc = HeteroCase::Het1Homo;
    else if (f.hetero_case == "het1-het2") hc = HeteroCase::Het1Het2;

    ExperimentSpec spec =
        ExperimentSpec::paper_2021(f.beta0, hc, f.ns, f.kappas, f.seed);
    spec.reps = f.reps;
    spec.alpha = f.alpha;
    spec.L = f.L;
    spec.dgp.params.sigma1_sq = f.sigma1_sq;
    spec.dgp.params.sigma2_sq = f.sigma2_sq;
    spec.dgp.burn_in = f.burn_in;
    if (!f.deltas.empty()) spec.deltas = f.deltas;
    if (f.break_kind == "mid") spec.break_kind = BreakKind::Mid;
    else if (f.break_kind == "end") spec.break_kind = BreakKind::End;

    const RejectionTable table = spec.break_kind == BreakKind::None
                                     ? size_experiment(spec)
                                     : power_experiment(spec);

    ReportDocument doc;
    doc.command = "bench";
    doc.input_label = "synthetic seed " + std::to_string(f.seed);
    doc.config["beta0"] = ds(f.beta0);
    doc.config["hetero_case"] = f.hetero_case;
    doc.config["break"] = f.break_kind;
    doc.config["reps"] = std::to_string(f.reps);
    doc.config["alpha"] = ds(f.alpha);
    doc.config["seed"] = std::to_string(f.seed);
    doc.config["L"] = std::to_string(f.L);
    doc.config["sigma1_sq"] = ds(f.sigma1_sq);
    doc.config["sigma2_sq"] = ds(f.sigma2_sq);
    doc.config["burn_in"] = std::to_string(f.burn_in);
    doc.table = table;
    doc.elapsed_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_output(emit_report(doc, parse_format(f.format)), f.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coefficient-stability tests for random coefficient autoregressions"};
    app.require_subcommand(1);
    const std::vector<std::string> formats = {"structured", "delimited", "plot"};

    SimulateFlags sf;
    auto* sim = app.add_subcommand("simulate", "Draw a synthetic series");
    sim->add_option("--n", sf.n, "Series length");
    sim->add_option("--beta0", sf.beta0, "Autoregressive coefficient");
    sim->add_option("--sigma1-sq", sf.sigma1_sq, "Coefficient noise variance");
    sim->add_option("--sigma2-sq", sf.sigma2_sq, "Innovation variance");
    sim->add_option("--y0", sf.y0, "Starting value");
    sim->add_option("--burn-in", sf.burn_in, "Discarded warm-up steps");
    sim->add_option("--seed", sf.seed, "Simulation seed");
    sim->add_option("--break", sf.breaks,
                    "Regime change frac:beta[:scale1[:scale2]] (repeatable)");
    sim->add_option("--out", sf.out, "Write output to a file instead of stdout");
    sim->add_option("--format", sf.format, "Output format")
        ->check(CLI::IsMember(formats));

    TestFlags tf;
    auto* test = app.add_subcommand("test", "Test a series for a coefficient change");
    auto* seg = app.add_subcommand("segment", "Locate multiple coefficient changes");
    for (CLI::App* cmd : {test, seg}) {
        TestFlags& t = tf;
        cmd->add_option("--input", t.input, "Delimited input file")->required();
        cmd->add_option("--column", t.column, "Column name or 0-based index");
        cmd->add_option("--date-column", t.date_column, "Column to skip as dates");
        cmd->add_option("--delimiter", t.delimiter, "Field delimiter (default: auto)");
        cmd->add_option("--transform", t.transform, "none|log|log-diff|log-plus-one");
        cmd->add_option("--statistic", t.statistic, "sup|de|renyi")
            ->check(CLI::IsMember({"sup", "de", "renyi"}));
        cmd->add_option("--kappa", t.kappa, "Weight exponent / window exponent");
        cmd->add_option("--alpha", t.alpha, "Test level");
        cmd->add_option("--weight", t.weight, "Weight family (power)");
        cmd->add_flag("--hetero", t.hetero, "Variance-change-robust statistic");
        cmd->add_option("--cv-source", t.cv_source, "simulated|cached|analytic|fnl")
            ->check(CLI::IsMember({"simulated", "cached", "analytic", "fnl"}));
        cmd->add_option("--trim", t.trim, "Window trim r1 [r2]")->expected(1, 2);
        cmd->add_option("--reps", t.reps, "Critical-value simulation replications");
        cmd->add_option("--grid", t.grid, "Critical-value simulation grid");
        cmd->add_option("--seed", t.cv_seed, "Critical-value simulation seed");
        cmd->add_option("--fnl-seed", t.fnl_seed, "Plug-in quantile seed");
        cmd->add_option("--L", t.L, "Plug-in simulation count");
        cmd->add_option("--cache", t.cache_path, "Critical-value cache file");
        cmd->add_option("--out", t.out, "Write output to a file instead of stdout");
        cmd->add_option("--format", t.format, "Output format")
            ->check(CLI::IsMember(formats));
        cmd->add_flag("--fail-on-reject", t.fail_on_reject,
                      "Exit 3 when a change is detected");
    }
    seg->add_option("--min-segment", tf.min_segment, "Smallest testable segment");

    CvFlags cf;
    auto* cv = app.add_subcommand("cv", "Tabulate critical values");
    cv->add_option("--family", cf.family, "bridge|renyi|de-finite")
        ->required()
        ->check(CLI::IsMember({"bridge", "renyi", "de-finite"}));
    cv->add_option("--kappa", cf.kappa, "Weight / window exponent");
    cv->add_option("--alpha", cf.alphas, "Levels (repeatable)");
    cv->add_option("--reps", cf.reps, "Simulation replications");
    cv->add_option("--grid", cf.grid, "Simulation grid");
    cv->add_option("--seed", cf.seed, "Simulation seed");
    cv->add_option("--n", cf.n, "Series length (de-finite family)");
    cv->add_option("--gamma1", cf.gamma1, "Left trim ratio (renyi family)");
    cv->add_option("--gamma2", cf.gamma2, "Right trim ratio (renyi family)");
    cv->add_option("--cache", cf.cache_path, "Critical-value cache file");
    cv->add_option("--out", cf.out, "Write output to a file instead of stdout");
    cv->add_option("--format", cf.format, "Output format")->check(CLI::IsMember(formats));

    BenchFlags bf;
    auto* bench = app.add_subcommand("bench", "Rejection-frequency experiments");
    bench->add_option("--beta0", bf.beta0, "Autoregressive coefficient");
    bench->add_option("--hetero-case", bf.hetero_case,
                      "homo-homo|homo-het2|het1-homo|het1-het2")
        ->check(CLI::IsMember({"homo-homo", "homo-het2", "het1-homo", "het1-het2"}));
    bench->add_option("--break", bf.break_kind, "none|mid|end")
        ->check(CLI::IsMember({"none", "mid", "end"}));
    bench->add_option("--delta", bf.deltas, "Coefficient jumps (repeatable)");
    bench->add_option("--n", bf.ns, "Series lengths (repeatable)");
    bench->add_option("--kappa", bf.kappas, "Exponents (repeatable)");
    bench->add_option("--reps", bf.reps, "Monte Carlo replications");
    bench->add_option("--alpha", bf.alpha, "Test level");
    bench->add_option("--seed", bf.seed, "Master seed");
    bench->add_option("--L", bf.L, "Plug-in simulation count");
    bench->add_option("--sigma1-sq", bf.sigma1_sq, "Coefficient noise variance");
    bench->add_option("--sigma2-sq", bf.sigma2_sq, "Innovation variance");
    bench->add_option("--burn-in", bf.burn_in, "Discarded warm-up steps");
    bench->add_option("--out", bf.out, "Write output to a file instead of stdout");
    bench->add_option("--format", bf.format, "Output format")
        ->check(CLI::IsMember(formats));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim->parsed()) return run_simulate(sf);
        if (test->parsed())
            return run_test_cmd(tf, test->count("--cv-source") > 0,
                                test->count("--kappa") > 0);
        if (seg->parsed())
            return run_segment_cmd(tf, seg->count("--cv-source") > 0,
                                   seg->count("--kappa") > 0);
        if (cv->parsed()) return run_cv_cmd(cf, cv->count("--seed") > 0,
                                            cv->count("--kappa") > 0);
        if (bench->parsed()) return run_bench_cmd(bf);
    } catch (const InvalidSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DegenerateData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const OverflowError& e) {
        std::cerr << "error: simulated series overflowed at index " << e.index << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
