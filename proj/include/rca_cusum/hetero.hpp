#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rca_cusum/cusum.hpp"

namespace rca_cusum {

namespace detail {
inline constexpr double kKernelFloor = 1e-12;
}

// Estimated covariance structure of the weighted partial sums:
// c1(t) = N^-1 sum_{i=2}^{floor((N+1)t)} y_{i-1}^2/(1+y_{i-1}^2)
// b(t)  = N^-1 sum_{i=2}^{floor(Nt)} ((y_i - bhat y_{i-1}) y_{i-1}/(1+y_{i-1}^2))^2
// g(t,s) = c1(1)^2 b(min) - c1(1)(c1(t)b(s) + c1(s)b(t)) + c1(t)c1(s)b(1).
// The two floor conventions differ on purpose; they follow the defining sums.
struct HeteroKernel {
    std::vector<double> c1;      // at grid t_k = k/(N+1), k = 2..N-2
    std::vector<double> c2;      // c1(1) - c1(t_k), summed from the right
    std::vector<double> b;       // same grid
    std::vector<double> g_diag;  // g(t_k, t_k)
    double c1_total = 0.0;       // c1(1)
    double b_total = 0.0;        // b(1)
    int n = 0;

    // full prefix tables, index j-2 holds the sum over i = 2..j
    std::vector<double> c1_steps;
    std::vector<double> b_steps;

    double c1_at(double t) const {
        const long j = static_cast<long>(std::floor((n + 1) * t));
        if (j < 2) return 0.0;
        if (j >= n) return c1_total;
        return c1_steps[static_cast<std::size_t>(j) - 2];
    }

    double b_at(double t) const {
        const long j = static_cast<long>(std::floor(n * t));
        if (j < 2) return 0.0;
        if (j >= n) return b_total;
        return b_steps[static_cast<std::size_t>(j) - 2];
    }

    double g_of(double t, double s) const {
        const double bmin = b_at(std::min(t, s));
        const double c1t = c1_at(t), c1s = c1_at(s);
        return c1_total * c1_total * bmin -
               c1_total * (c1t * b_at(s) + c1s * b_at(t)) + c1t * c1s * b_total;
    }
};

inline HeteroKernel build_kernel(const TimeSeries& series, const CumulantTable& table) {
    const int n = table.n;
    const double den = table.den_total();
    if (den <= 0.0) throw DegenerateData("build_kernel: all-zero series");
    const double bhat = table.num_total() / den;

    HeteroKernel k;
    k.n = n;
    k.c1_steps.resize(static_cast<std::size_t>(n) - 1);
    k.b_steps.resize(static_cast<std::size_t>(n) - 1);
    detail::KahanSum r2;
    const auto& y = series.values;
    for (int i = 2; i <= n; ++i) {
        const double r = detail::weighted_resid(
            y[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i) - 1],
            bhat);
        r2.add(r * r);
        k.c1_steps[static_cast<std::size_t>(i) - 2] = table.den_prefix(i) / n;
        k.b_steps[static_cast<std::size_t>(i) - 2] = r2.value() / n;
    }
    k.c1_total = k.c1_steps.back();
    k.b_total = k.b_steps.back();

    k.c1.reserve(static_cast<std::size_t>(n) - 3);
    k.c2.reserve(static_cast<std::size_t>(n) - 3);
    k.b.reserve(static_cast<std::size_t>(n) - 3);
    k.g_diag.reserve(static_cast<std::size_t>(n) - 3);
    for (int kk = 2; kk <= n - 2; ++kk) {
        // On the grid the floor conventions reduce to index arithmetic:
        // floor((n+1) t_k) = k for c1, floor(n t_k) = k-1 for b.
        const double c1t = k.c1_steps[static_cast<std::size_t>(kk) - 2];
        const double c2t = table.den_suffix(kk) / n;
        const double bt = kk >= 3 ? k.b_steps[static_cast<std::size_t>(kk) - 3] : 0.0;
        k.c1.push_back(c1t);
        k.c2.push_back(c2t);
        k.b.push_back(bt);
        k.g_diag.push_back(k.c1_total * k.c1_total * bt -
                           2.0 * k.c1_total * c1t * bt + c1t * c1t * k.b_total);
    }
    return k;
}

// Qbar_N(t_k) = N^{1/2} c1(t) c2(t) (bhat_left - bhat_right), with
// c2(t) = c1(1) - c1(t) taken from the kernel's right-accumulated table.
inline CusumProcess qbar_process(const TimeSeries& series, const CumulantTable& table,
                                 const HeteroKernel& kernel) {
    const int n = table.n;
    if (series.n != n || kernel.n != n)
        throw InvalidSpec("qbar_process: series, table and kernel disagree on n");
    if (n < 8) throw DegenerateData("series too short: need n >= 8");
    CusumProcess p;
    p.n = n;
    p.scaling = Scaling::Hetero;
    const double sqn = std::sqrt(static_cast<double>(n));
    p.values.reserve(static_cast<std::size_t>(n) - 3);
    p.grid.reserve(static_cast<std::size_t>(n) - 3);
    p.degenerate.reserve(static_cast<std::size_t>(n) - 3);
    for (int k = 2; k <= n - 2; ++k) {
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
        const double c1t = kernel.c1[static_cast<std::size_t>(k) - 2];
        const double c2t = kernel.c2[static_cast<std::size_t>(k) - 2];
        p.values.push_back(sqn * c1t * c2t * (bl - br));
        p.degenerate.push_back(0);
    }
    return p;
}

// a(ln N) sup |Qbar| / g(t,t)^{1/2} - b(ln N) over k in [r1, N-r2], skipping
// points where g is below the floor (Qbar vanishes there as well).
inline double hetero_de_stat(const CusumProcess& qbar, const HeteroKernel& kernel,
                             std::optional<TrimSpec> trim = std::nullopt) {
    const int n = qbar.n;
    const TrimSpec tr = trim ? *trim : default_trim(n);
    validate_trim(tr, n);
    const int lo = std::max(2, tr.r1);
    const int hi = std::min(n - 2, n - tr.r2);
    double sup = -1.0;
    for (std::size_t i = 0; i < qbar.size(); ++i) {
        const int k = qbar.grid[i];
        if (k < lo || k > hi) continue;
        if (qbar.degenerate[i]) continue;
        const double g = kernel.g_diag[i];
        if (g <= detail::kKernelFloor) continue;
        const double v = std::abs(qbar.values[i]) / std::sqrt(g);
        if (v > sup) sup = v;
    }
    if (sup < 0.0) throw DegenerateData("hetero_de_stat: empty usable grid");
    const double x = std::log(static_cast<double>(n));
    return de_a(x) * sup - de_b(x);
}

// (r_N/N)^{kappa-1/2} sup (t(1-t))^{1/2-kappa} |Qbar| / g(t,t)^{1/2} over the
// trimmed window.
inline double hetero_renyi_stat(const CusumProcess& qbar, const HeteroKernel& kernel,
                                double kappa, const TrimSpec& trim) {
    if (!(kappa > 0.5)) throw InvalidSpec("hetero_renyi_stat: kappa must be > 1/2");
    const int n = qbar.n;
    validate_trim(trim, n);
    const double t_lo = static_cast<double>(trim.r1) / n;
    const double t_hi = 1.0 - static_cast<double>(trim.r2) / n;
    double sup = -1.0;
    for (std::size_t i = 0; i < qbar.size(); ++i) {
        const double t = qbar.t_at(i);
        if (t < t_lo || t > t_hi) continue;
        if (sup < 0.0) sup = 0.0;
        if (qbar.degenerate[i]) continue;
        const double g = kernel.g_diag[i];
        if (g <= detail::kKernelFloor) continue;
        const double v = std::pow(t * (1.0 - t), 0.5 - kappa) *
                         std::abs(qbar.values[i]) / std::sqrt(g);
        if (v > sup) sup = v;
    }
    if (sup < 0.0) throw DegenerateData("hetero_renyi_stat: trimmed window empty");
    const double rn = static_cast<double>(trim.r_min()) / n;
    return std::pow(rn, kappa - 0.5) * sup;
}

// sup |Qbar| / w(t); no variance division, the nuisance structure is handled
// by the simulated critical values.
inline SupResult hetero_weighted_sup(const CusumProcess& qbar, const WeightSpec& weight) {
    weight.validate();
    bool any_usable = false;
    SupResult out;
    for (std::size_t i = 0; i < qbar.size(); ++i) {
        if (qbar.degenerate[i]) continue;
        any_usable = true;
        const double v = std::abs(qbar.values[i]) / weight(qbar.t_at(i));
        if (v > out.stat) {
            out.stat = v;
            out.argmax_k = qbar.grid[i];
        }
    }
    if (!any_usable)
        throw DegenerateData("hetero_weighted_sup: all grid values degenerate");
    return out;
}

}  // namespace rca_cusum
