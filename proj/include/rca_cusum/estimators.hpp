#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rca_cusum/core.hpp"

namespace rca_cusum {

namespace detail {

// y^2 / (1 + y^2), safe across the whole double range.
inline double weight_den(double ylag) {
    if (ylag == 0.0) return 0.0;
    const double r = 1.0 / ylag;
    return 1.0 / (1.0 + r * r);
}

// y * ylag / (1 + ylag^2) without forming ylag^2.
inline double cross_num(double y, double ylag) {
    if (ylag == 0.0) return 0.0;
    return y / (ylag + 1.0 / ylag);
}

// (y - beta * ylag) * ylag / (1 + ylag^2)
inline double weighted_resid(double y, double ylag, double beta) {
    if (ylag == 0.0) return 0.0;
    return (y - beta * ylag) / (ylag + 1.0 / ylag);
}

class KahanSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace detail

// Prefix and suffix sums of the weighted-least-squares building blocks,
// enabling O(1) split estimates at every k. Prefix entry j holds the sum over
// i = 2..j+2; suffix entry j holds the sum over i = j+2..N. Right windows are
// accumulated from the right rather than subtracted from the total: when the
// series decays, the late summands sit many orders of magnitude below the
// early mass and a subtraction would cancel them to zero.
struct CumulantTable {
    std::vector<double> s_den;      // sums of y_{i-1}^2 / (1 + y_{i-1}^2)
    std::vector<double> s_num;      // sums of y_i y_{i-1} / (1 + y_{i-1}^2)
    std::vector<double> s_den_suf;  // the same summands, accumulated backward
    std::vector<double> s_num_suf;
    int n = 0;

    double den_prefix(int k) const {
        return k < 2 ? 0.0 : s_den[static_cast<std::size_t>(k) - 2];
    }
    double num_prefix(int k) const {
        return k < 2 ? 0.0 : s_num[static_cast<std::size_t>(k) - 2];
    }
    double den_total() const { return s_den.back(); }
    double num_total() const { return s_num.back(); }
    // Sum over i = k+1..N, i.e. the window behind the split at k.
    double den_suffix(int k) const {
        if (k >= n) return 0.0;
        return k < 1 ? s_den_suf.front() : s_den_suf[static_cast<std::size_t>(k) - 1];
    }
    double num_suffix(int k) const {
        if (k >= n) return 0.0;
        return k < 1 ? s_num_suf.front() : s_num_suf[static_cast<std::size_t>(k) - 1];
    }
};

inline CumulantTable build_cumulants(const TimeSeries& series) {
    const int n = series.n;
    if (n < 4) throw DegenerateData("series too short: need n >= 4");
    CumulantTable table;
    table.n = n;
    table.s_den.resize(static_cast<std::size_t>(n) - 1);
    table.s_num.resize(static_cast<std::size_t>(n) - 1);
    table.s_den_suf.resize(static_cast<std::size_t>(n) - 1);
    table.s_num_suf.resize(static_cast<std::size_t>(n) - 1);
    detail::KahanSum den, num;
    const auto& y = series.values;
    for (int i = 2; i <= n; ++i) {
        const double ylag = y[static_cast<std::size_t>(i) - 1];
        den.add(detail::weight_den(ylag));
        num.add(detail::cross_num(y[static_cast<std::size_t>(i)], ylag));
        table.s_den[static_cast<std::size_t>(i) - 2] = den.value();
        table.s_num[static_cast<std::size_t>(i) - 2] = num.value();
    }
    detail::KahanSum den_suf, num_suf;
    for (int i = n; i >= 2; --i) {
        const double ylag = y[static_cast<std::size_t>(i) - 1];
        den_suf.add(detail::weight_den(ylag));
        num_suf.add(detail::cross_num(y[static_cast<std::size_t>(i)], ylag));
        table.s_den_suf[static_cast<std::size_t>(i) - 2] = den_suf.value();
        table.s_num_suf[static_cast<std::size_t>(i) - 2] = num_suf.value();
    }
    return table;
}

// WLS estimate over observations 2..k.
inline double beta_hat_left(const CumulantTable& table, int k) {
    if (k < 2 || k > table.n) throw InvalidSpec("beta_hat_left: k out of range");
    const double den = table.den_prefix(k);
    if (den <= 0.0)
        throw DegenerateData("beta_hat_left: degenerate segment at k=" +
                             std::to_string(k));
    return table.num_prefix(k) / den;
}

// WLS estimate over observations k+1..N.
inline double beta_hat_right(const CumulantTable& table, int k) {
    if (k < 1 || k > table.n - 1)
        throw InvalidSpec("beta_hat_right: k out of range");
    const double den = table.den_suffix(k);
    if (den <= 0.0)
        throw DegenerateData("beta_hat_right: degenerate segment at k=" +
                             std::to_string(k));
    return table.num_suffix(k) / den;
}

struct EtaHatSq {
    double a_hat_1 = 0.0;
    double a_hat_2 = 0.0;
    double value = 0.0;
    bool degenerate = false;  // residuals at rounding-noise level (exact fit)
};

namespace detail {

// Residuals smaller than this, relative to the fitted values, are
// indistinguishable from rounding noise of the recursion itself.
inline constexpr double kExactFitTol = 1e-12;

}  // namespace detail

// Variance estimator for the homoskedastic scaling: a1 / a2^2 with
// a1 = (N-1)^-1 sum (y_i - bhat y_{i-1})^2 y_{i-1}^2 / (1+y_{i-1}^2)^2
// a2 = (N-1)^-1 sum y_{i-1}^2 / (1+y_{i-1}^2).
inline EtaHatSq eta_hat_sq(const TimeSeries& series, const CumulantTable& table) {
    const int n = table.n;
    const double den = table.den_total();
    if (den <= 0.0) throw DegenerateData("eta_hat_sq: all-zero series");
    const double bhat = table.num_total() / den;
    detail::KahanSum a1, scale;
    const auto& y = series.values;
    for (int i = 2; i <= n; ++i) {
        const double yl = y[static_cast<std::size_t>(i) - 1];
        const double r =
            detail::weighted_resid(y[static_cast<std::size_t>(i)], yl, bhat);
        a1.add(r * r);
        if (yl != 0.0) {
            const double f = y[static_cast<std::size_t>(i)] / (yl + 1.0 / yl);
            scale.add(f * f);
        }
    }
    EtaHatSq out;
    out.a_hat_1 = a1.value() / (n - 1);
    out.a_hat_2 = den / (n - 1);
    out.value = out.a_hat_1 / (out.a_hat_2 * out.a_hat_2);
    const double floor =
        detail::kExactFitTol * detail::kExactFitTol * scale.value() / (n - 1);
    out.degenerate = out.a_hat_1 <= floor;
    if (out.degenerate) out.value = 0.0;
    return out;
}

}  // namespace rca_cusum
