#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rca_cusum/hetero.hpp"

namespace rca_cusum {

namespace detail {

// 1-based ceil(m * level)-th order statistic of an ascending sample.
inline double order_stat_quantile(const std::vector<double>& sorted, double level) {
    const std::size_t m = sorted.size();
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(static_cast<double>(m) * level));
    if (idx < 1) idx = 1;
    if (idx > m) idx = m;
    return sorted[idx - 1];
}

// Uniform grid on (0,1) plus geometrically refined points toward both
// endpoints. A plain uniform grid clips the endpoint contribution of
// (t(1-t))^kappa weights and biases quantiles low for kappa near 1/2.
inline std::vector<double> refined_unit_grid(long grid, int per_decade,
                                             double depth) {
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(grid) + 4096);
    for (long j = 1; j < grid; ++j)
        ts.push_back(static_cast<double>(j) / static_cast<double>(grid));
    const double coarse = 1.0 / static_cast<double>(grid);
    const int steps = static_cast<int>(
        std::ceil(per_decade * std::log10(coarse / depth)));
    for (int i = 0; i < steps; ++i) {
        const double t = depth * std::pow(10.0, static_cast<double>(i) / per_decade);
        if (t >= coarse) break;
        ts.push_back(t);
        ts.push_back(1.0 - t);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

}  // namespace detail

// Gumbel-type asymptotic quantile: P(stat <= x) -> exp(-2 e^{-x}).
inline double de_asymptotic_cv(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
    return -std::log(-0.5 * std::log(1.0 - alpha));
}

// Quantiles of sup_(0,1) |B(t)| / (t(1-t))^kappa for a Brownian bridge B,
// simulated on a uniform grid with geometric endpoint refinement. Valid for
// kappa in [0, 1/2).
inline std::vector<double> simulate_bridge_cv(double kappa,
                                              const std::vector<double>& alphas,
                                              long reps = 20000, long grid = 2000,
                                              std::uint64_t seed = 20210401,
                                              int per_decade = 256,
                                              double depth = 1e-8) {
    if (!(kappa >= 0.0 && kappa < 0.5))
        throw InvalidSpec("simulate_bridge_cv: kappa must be in [0, 1/2)");
    if (reps < 100 || grid < 16) throw InvalidSpec("simulate_bridge_cv: reps/grid too small");
    const std::vector<double> ts = detail::refined_unit_grid(grid, per_decade, depth);
    const std::size_t m = ts.size();
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j)
        w[j] = kappa == 0.0 ? 1.0 : std::pow(ts[j] * (1.0 - ts[j]), kappa);

    std::vector<double> sups(static_cast<std::size_t>(reps));
    std::vector<double> path(m);
    for (long rep = 0; rep < reps; ++rep) {
        detail::Rng rng = detail::Rng::stream(seed, 0xB81D6Eu, static_cast<std::uint64_t>(rep));
        double wt = 0.0, prev = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            wt += std::sqrt(ts[j] - prev) * rng.normal();
            path[j] = wt;
            prev = ts[j];
        }
        const double w1 = wt + std::sqrt(1.0 - prev) * rng.normal();
        double sup = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double v = std::abs(path[j] - ts[j] * w1) / w[j];
            if (v > sup) sup = v;
        }
        sups[static_cast<std::size_t>(rep)] = sup;
    }
    std::sort(sups.begin(), sups.end());
    std::vector<double> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
        out.push_back(detail::order_stat_quantile(sups, 1.0 - a));
    }
    return out;
}

// Quantiles of the trimmed-window limit for kappa > 1/2: via time inversion
// the one-sided law is that of sup_{0<s<=1} s^{kappa-1} |W(s)|. Symmetric
// trimming makes the statistic the max of two independent copies, so the
// returned cv solves F(c/g1^{kappa-1/2}) F(c/g2^{kappa-1/2}) = 1 - alpha.
inline std::vector<double> simulate_renyi_cv(double kappa,
                                             const std::vector<double>& alphas,
                                             long reps = 20000, long grid = 2000,
                                             std::uint64_t seed = 20210402,
                                             double gamma1 = 1.0, double gamma2 = 1.0,
                                             int per_decade = 16,
                                             double depth = 1e-8) {
    if (!(kappa > 0.5)) throw InvalidSpec("simulate_renyi_cv: kappa must be > 1/2");
    if (!(gamma1 > 0.0 && gamma2 > 0.0))
        throw InvalidSpec("simulate_renyi_cv: gammas must be > 0");
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(grid) + 512);
    for (long j = 1; j <= grid; ++j)
        ts.push_back(static_cast<double>(j) / static_cast<double>(grid));
    const double coarse = 1.0 / static_cast<double>(grid);
    const int steps = static_cast<int>(
        std::ceil(per_decade * std::log10(coarse / depth)));
    for (int i = 0; i < steps; ++i) {
        const double t = depth * std::pow(10.0, static_cast<double>(i) / per_decade);
        if (t >= coarse) break;
        ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    const std::size_t m = ts.size();

    std::vector<double> sups(static_cast<std::size_t>(reps));
    for (long rep = 0; rep < reps; ++rep) {
        detail::Rng rng = detail::Rng::stream(seed, 0x4E4E1u, static_cast<std::uint64_t>(rep));
        double wt = 0.0, prev = 0.0, sup = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            wt += std::sqrt(ts[j] - prev) * rng.normal();
            prev = ts[j];
            const double v = std::pow(ts[j], kappa - 1.0) * std::abs(wt);
            if (v > sup) sup = v;
        }
        sups[static_cast<std::size_t>(rep)] = sup;
    }
    std::sort(sups.begin(), sups.end());

    const double s1 = std::pow(gamma1, kappa - 0.5);
    const double s2 = std::pow(gamma2, kappa - 0.5);
    const auto cdf = [&](double x) {
        const auto it = std::upper_bound(sups.begin(), sups.end(), x);
        return static_cast<double>(it - sups.begin()) / static_cast<double>(reps);
    };
    std::vector<double> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
        const double target = 1.0 - a;
        if (s1 == s2) {
            out.push_back(s1 * detail::order_stat_quantile(sups, std::sqrt(target)));
            continue;
        }
        double lo = 0.0, hi = sups.back() * std::max(s1, s2) + 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (cdf(mid / s1) * cdf(mid / s2) < target)
                lo = mid;
            else
                hi = mid;
        }
        out.push_back(hi);
    }
    return out;
}

// Finite-sample quantiles of the trimmed Darling-Erdos functional at sample
// size n, from Brownian bridges on the k/(n+1) grid. These sit well below the
// asymptotic quantile and increase toward it as n grows.
inline std::vector<double> de_finite_sample_cv(int n, const std::vector<double>& alphas,
                                               long reps = 20000,
                                               std::uint64_t seed = 20210403,
                                               std::optional<TrimSpec> trim = std::nullopt) {
    if (n < 20) throw InvalidSpec("de_finite_sample_cv: need n >= 20");
    const TrimSpec tr = trim ? *trim : default_trim(n);
    validate_trim(tr, n);
    const int lo = std::max(2, tr.r1);
    const int hi = std::min(n - 1, n - tr.r2);
    if (lo > hi) throw InvalidSpec("de_finite_sample_cv: empty trimmed window");
    const double x = std::log(static_cast<double>(n));
    const double aa = de_a(x), bb = de_b(x);

    std::vector<double> sups(static_cast<std::size_t>(reps));
    std::vector<double> path(static_cast<std::size_t>(n));
    std::vector<double> ts(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k)
        ts[static_cast<std::size_t>(k) - 1] = k / (n + 1.0);
    for (long rep = 0; rep < reps; ++rep) {
        detail::Rng rng = detail::Rng::stream(seed, 0xDEF1u, static_cast<std::uint64_t>(rep));
        double wt = 0.0, prev = 0.0;
        for (std::size_t j = 0; j < ts.size(); ++j) {
            wt += std::sqrt(ts[j] - prev) * rng.normal();
            path[j] = wt;
            prev = ts[j];
        }
        const double w1 = wt + std::sqrt(1.0 - prev) * rng.normal();
        double sup = 0.0;
        for (int k = lo; k <= hi; ++k) {
            const double t = ts[static_cast<std::size_t>(k) - 1];
            const double v = std::abs(path[static_cast<std::size_t>(k) - 1] - t * w1) /
                             std::sqrt(t * (1.0 - t));
            if (v > sup) sup = v;
        }
        sups[static_cast<std::size_t>(rep)] = aa * sup - bb;
    }
    std::sort(sups.begin(), sups.end());
    std::vector<double> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
        out.push_back(detail::order_stat_quantile(sups, 1.0 - a));
    }
    return out;
}

// Data-dependent critical value for the robust weighted sup: simulates L
// copies of Theta_i(t) = c2(t) W(b(t)) - c1(t) (W(b(1)) - W(b(t))) along the
// kernel's own time scale and returns the ceil(L(1-alpha))-th order statistic
// of sup |Theta_i| / w.
inline double hetero_fnl_cv(const HeteroKernel& kernel, const WeightSpec& weight,
                            double alpha, int L = 200,
                            std::uint64_t seed = 20210404) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
    if (L < 20) throw InvalidSpec("hetero_fnl_cv: L must be >= 20");
    weight.validate();
    const std::size_t m = kernel.b.size();
    if (m == 0) throw DegenerateData("hetero_fnl_cv: empty kernel grid");

    std::vector<double> sups(static_cast<std::size_t>(L));
    std::vector<double> path(m);
    for (int i = 0; i < L; ++i) {
        detail::Rng rng = detail::Rng::stream(seed, 0xF9Du, static_cast<std::uint64_t>(i));
        double wt = 0.0, prev = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double db = kernel.b[j] - prev;
            wt += (db > 0.0 ? std::sqrt(db) * rng.normal() : 0.0);
            path[j] = wt;
            prev = kernel.b[j];
        }
        const double dbl = kernel.b_total - prev;
        const double w1 = wt + (dbl > 0.0 ? std::sqrt(dbl) * rng.normal() : 0.0);
        double sup = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double t = (static_cast<double>(j) + 2.0) / (kernel.n + 1.0);
            const double c1t = kernel.c1[j];
            const double c2t = kernel.c2[j];
            const double v =
                std::abs(c2t * path[j] - c1t * (w1 - path[j])) / weight(t);
            if (v > sup) sup = v;
        }
        sups[static_cast<std::size_t>(i)] = sup;
    }
    std::sort(sups.begin(), sups.end());
    return detail::order_stat_quantile(sups, 1.0 - alpha);
}

struct CvKey {
    std::string family;  // "bridge", "renyi", "de_finite"
    double kappa = 0.0;
    double alpha = 0.05;
    long reps = 0;
    long grid = 0;  // sample size n for "de_finite"
    std::uint64_t seed = 0;
};

// Delimited-text cache of simulated critical values. Doubles are written with
// 17 significant digits so every value round-trips exactly.
class CvCache {
public:
    static std::string format_double(double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    static std::string key_string(const CvKey& k) {
        return k.family + "," + format_double(k.kappa) + "," +
               format_double(k.alpha) + "," + std::to_string(k.reps) + "," +
               std::to_string(k.grid) + "," + std::to_string(k.seed);
    }

    std::optional<double> lookup(const CvKey& k) const {
        const auto it = entries_.find(key_string(k));
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void insert(const CvKey& k, double value) { entries_[key_string(k)] = value; }

    std::size_t size() const { return entries_.size(); }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw DegenerateData("cv cache: cannot write " + path);
        out << "family,kappa,alpha,reps,grid,seed,value\n";
        for (const auto& [key, value] : entries_)
            out << key << "," << format_double(value) << "\n";
    }

    // Merges entries from `path`; a missing file is treated as empty.
    bool load(const std::string& path) {
        std::ifstream in(path);
        if (!in) return false;
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (lineno == 1 && line.rfind("family,", 0) == 0) continue;
            if (line.empty()) continue;
            const auto pos = line.rfind(',');
            if (pos == std::string::npos)
                throw DegenerateData("cv cache: malformed line " +
                                     std::to_string(lineno) + " in " + path);
            const std::string val = line.substr(pos + 1);
            double v = 0.0;
            const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
            if (res.ec != std::errc() || res.ptr != val.data() + val.size())
                throw DegenerateData("cv cache: bad value on line " +
                                     std::to_string(lineno) + " in " + path);
            entries_[line.substr(0, pos)] = v;
        }
        return true;
    }

private:
    std::map<std::string, double> entries_;
};

}  // namespace rca_cusum
