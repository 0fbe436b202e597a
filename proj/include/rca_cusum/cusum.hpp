#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rca_cusum/estimators.hpp"

namespace rca_cusum {

struct TrimSpec {
    int r1 = 1;
    int r2 = 1;
    int r_min() const { return std::min(r1, r2); }
};

// ceil(ln(n)^2) on both ends; grows without bound while r/n -> 0.
inline TrimSpec default_trim(int n) {
    const double l = std::log(static_cast<double>(n));
    const int r = static_cast<int>(std::ceil(l * l));
    return {r, r};
}

inline void validate_trim(const TrimSpec& trim, int n) {
    if (trim.r1 < 1 || trim.r2 < 1) throw InvalidSpec("trim: r1, r2 must be >= 1");
    if (trim.r1 + trim.r2 >= n) throw InvalidSpec("trim: r1 + r2 must be < n");
}

struct WeightSpec {
    enum class Kind { KappaPower, Custom };

    Kind kind = Kind::KappaPower;
    double kappa = 0.0;
    std::function<double(double)> custom;
    std::optional<TrimSpec> trim;

    static WeightSpec kappa_power(double kappa) {
        if (kappa < 0.0) throw InvalidSpec("weight: kappa must be >= 0");
        WeightSpec w;
        w.kappa = kappa;
        return w;
    }

    static WeightSpec custom_fn(std::function<double(double)> fn) {
        WeightSpec w;
        w.kind = Kind::Custom;
        w.custom = std::move(fn);
        w.validate();
        return w;
    }

    double operator()(double t) const {
        if (kind == Kind::KappaPower)
            return kappa == 0.0 ? 1.0 : std::pow(t * (1.0 - t), kappa);
        return custom(t);
    }

    // Custom weights are screened on a grid: positive on [delta, 1-delta],
    // nondecreasing near 0 and nonincreasing near 1.
    void validate() const {
        if (kind == Kind::KappaPower) {
            if (kappa < 0.0) throw InvalidSpec("weight: kappa must be >= 0");
            return;
        }
        if (!custom) throw InvalidSpec("weight: custom function not set");
        const double delta = 1e-3;
        const int m = 999;
        double prev = custom(delta);
        for (int j = 0; j <= m; ++j) {
            const double t = delta + (1.0 - 2.0 * delta) * j / m;
            if (!(custom(t) > 0.0))
                throw InvalidSpec("weight: custom w must be positive on [delta, 1-delta]");
        }
        for (int j = 1; j <= 50; ++j) {
            const double t = delta + (0.05 - delta) * j / 50.0;
            const double v = custom(t);
            if (v < prev * (1.0 - 1e-9))
                throw InvalidSpec("weight: custom w must be nondecreasing near 0");
            prev = v;
        }
        prev = custom(0.95);
        for (int j = 1; j <= 50; ++j) {
            const double t = 0.95 + (1.0 - delta - 0.95) * j / 50.0;
            const double v = custom(t);
            if (v > prev * (1.0 + 1e-9))
                throw InvalidSpec("weight: custom w must be nonincreasing near 1");
            prev = v;
        }
    }
};

enum class Scaling { Homoskedastic, Hetero };

// CUSUM-type process on the split grid t_k = k/(N+1), k = 2..N-2. Values are
// zero (and flagged) at splits where either segment is degenerate; the
// definition is zero outside [2/(N+1), 1-2/(N+1)) by construction.
struct CusumProcess {
    std::vector<double> values;
    std::vector<int> grid;                 // the k indices
    std::vector<unsigned char> degenerate;
    Scaling scaling = Scaling::Homoskedastic;
    double eta_hat = 0.0;  // set for homoskedastic scaling
    int n = 0;

    double t_at(std::size_t idx) const {
        return static_cast<double>(grid[idx]) / (n + 1.0);
    }
    std::size_t size() const { return values.size(); }
};

// Q_N(t_k) = N^{1/2} t(1-t) (bhat_left(k) - bhat_right(k)) on k = 2..N-2.
inline CusumProcess q_process(const TimeSeries& series, const CumulantTable& table) {
    const int n = table.n;
    if (n < 8) throw DegenerateData("series too short: need n >= 8");
    CusumProcess p;
    p.n = n;
    p.scaling = Scaling::Homoskedastic;
    const EtaHatSq eta = eta_hat_sq(series, table);
    p.eta_hat = eta.degenerate ? 0.0 : std::sqrt(eta.value);
    const double sqn = std::sqrt(static_cast<double>(n));
    p.values.reserve(static_cast<std::size_t>(n) - 3);
    p.grid.reserve(static_cast<std::size_t>(n) - 3);
    p.degenerate.reserve(static_cast<std::size_t>(n) - 3);
    for (int k = 2; k <= n - 2; ++k) {
        const double t = k / (n + 1.0);
        const double dl = table.den_prefix(k);
        const double dr = table.den_suffix(k);
        p.grid.push_back(k);
        if (dl <= 0.0 || dr <= 0.0) {
            p.values.push_back(0.0);
            p.degenerate.push_back(1);
            continue;
        }
        const double bl = table.num_prefix(k) / dl;
        const double br = table.num_suffix(k) / dr;
        p.values.push_back(sqn * t * (1.0 - t) * (bl - br));
        p.degenerate.push_back(0);
    }
    return p;
}

struct SupResult {
    double stat = 0.0;
    std::optional<int> argmax_k;
};

// sup over the grid of |Q| / (eta_hat * w(t)), with the maximising k for
// breakdate estimation. Ties resolve to the smallest k.
inline SupResult weighted_sup(const CusumProcess& process, const WeightSpec& weight,
                              double eta_hat) {
    weight.validate();
    if (!(eta_hat > 0.0)) throw InvalidSpec("weighted_sup: eta_hat must be > 0");
    bool any_usable = false;
    SupResult out;
    for (std::size_t i = 0; i < process.size(); ++i) {
        if (process.degenerate[i]) continue;
        any_usable = true;
        const double v =
            std::abs(process.values[i]) / (eta_hat * weight(process.t_at(i)));
        if (v > out.stat) {
            out.stat = v;
            out.argmax_k = process.grid[i];
        }
    }
    if (!any_usable) throw DegenerateData("weighted_sup: all grid values degenerate");
    return out;
}

inline double de_a(double x) { return std::sqrt(2.0 * std::log(x)); }

inline double de_b(double x) {
    const double lx = std::log(x);
    return 2.0 * lx + 0.5 * std::log(lx) - 0.5 * std::log(std::numbers::pi);
}

// Darling-Erdos statistic a(ln N) * M_N - b(ln N) with
// M_N = max_k sqrt(k(N-k)/N) |bhat_left - bhat_right| / eta_hat. The max runs
// over k in [r1, N-r2]: the extreme splits are ratios of near-Gaussians whose
// heavy tails never reach the Gumbel regime at finite N.
inline double darling_erdos_stat(const CumulantTable& table, double eta_hat,
                                 std::optional<TrimSpec> trim = std::nullopt) {
    const int n = table.n;
    if (n < 20) throw InvalidSpec("darling_erdos_stat: need n >= 20");
    if (!(eta_hat > 0.0)) throw InvalidSpec("darling_erdos_stat: eta_hat must be > 0");
    const TrimSpec tr = trim ? *trim : default_trim(n);
    validate_trim(tr, n);
    const int lo = std::max(2, tr.r1);
    const int hi = std::min(n - 1, n - tr.r2);
    double m = -1.0;
    for (int k = lo; k <= hi; ++k) {
        const double dl = table.den_prefix(k);
        const double dr = table.den_suffix(k);
        if (dl <= 0.0 || dr <= 0.0) continue;
        const double bl = table.num_prefix(k) / dl;
        const double br = table.num_suffix(k) / dr;
        const double v = std::sqrt(static_cast<double>(k) * (n - k) / n) *
                         std::abs(bl - br);
        if (v > m) m = v;
    }
    if (m < 0.0) throw DegenerateData("darling_erdos_stat: no usable split");
    const double x = std::log(static_cast<double>(n));
    return de_a(x) * (m / eta_hat) - de_b(x);
}

// (r_N/N)^{kappa-1/2} sup_{r1/N <= t <= 1-r2/N} |Q(t)| / (eta_hat (t(1-t))^kappa)
inline double renyi_stat(const CusumProcess& process, double kappa,
                         const TrimSpec& trim, double eta_hat) {
    if (!(kappa > 0.5)) throw InvalidSpec("renyi_stat: kappa must be > 1/2");
    if (!(eta_hat > 0.0)) throw InvalidSpec("renyi_stat: eta_hat must be > 0");
    const int n = process.n;
    validate_trim(trim, n);
    const double t_lo = static_cast<double>(trim.r1) / n;
    const double t_hi = 1.0 - static_cast<double>(trim.r2) / n;
    double sup = -1.0;
    for (std::size_t i = 0; i < process.size(); ++i) {
        const double t = process.t_at(i);
        if (t < t_lo || t > t_hi) continue;
        if (sup < 0.0) sup = 0.0;
        if (process.degenerate[i]) continue;
        const double v = std::abs(process.values[i]) / std::pow(t * (1.0 - t), kappa);
        if (v > sup) sup = v;
    }
    if (sup < 0.0) throw DegenerateData("renyi_stat: trimmed window empty");
    const double rn = static_cast<double>(trim.r_min()) / n;
    return std::pow(rn, kappa - 0.5) * sup / eta_hat;
}

// Convergence check for I(w,c) = int_0^1 exp(-c w^2(t)/(t(1-t))) / (t(1-t)) dt.
// KappaPower weights are decided analytically; custom weights by dyadic
// quadrature toward both endpoints, declared finite when the endpoint decades
// stop contributing.
inline bool integrability_check(const WeightSpec& weight, double c) {
    if (!(c > 0.0)) throw InvalidSpec("integrability_check: c must be > 0");
    if (weight.kind == WeightSpec::Kind::KappaPower) return weight.kappa < 0.5;
    weight.validate();
    const auto integrand = [&](double t) {
        const double tt = t * (1.0 - t);
        const double w = weight.custom(t);
        return std::exp(-c * w * w / tt) / tt;
    };
    // Simpson on dyadic shells [2^-(d+1), 2^-d] from each endpoint.
    const auto shell = [&](int d, bool upper) {
        const double a = std::ldexp(1.0, -(d + 1));
        const double b = std::ldexp(1.0, -d);
        const int m = 32;
        double acc = 0.0;
        const double h = (b - a) / m;
        for (int j = 0; j < m; ++j) {
            const double x0 = a + j * h;
            double f0 = x0, f1 = x0 + 0.5 * h, f2 = x0 + h;
            if (upper) {
                f0 = 1.0 - f0;
                f1 = 1.0 - f1;
                f2 = 1.0 - f2;
            }
            acc += h / 6.0 * (integrand(f0) + 4.0 * integrand(f1) + integrand(f2));
        }
        return acc;
    };
    double total = shell(1, false) + shell(1, true);
    for (int d = 2; d <= 60; ++d) {
        const double add = shell(d, false) + shell(d, true);
        total += add;
        if (add < 1e-9 * std::max(total, 1.0)) return true;
        if (d >= 40 && add > 1e-6 * std::max(total, 1.0)) return false;
    }
    return false;
}

}  // namespace rca_cusum
