#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rca_cusum/detail/rng.hpp"

namespace rca_cusum {

// Invalid parameters, specs, or configuration.
struct InvalidSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Data that cannot support the requested computation (too short, all-zero
// segments, zero denominators).
struct DegenerateData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A simulated path left the representable range. `index` is the 1-based
// retained index reached; values <= 0 indicate the burn-in phase.
struct OverflowError : std::runtime_error {
    long index;
    explicit OverflowError(long idx, const std::string& what)
        : std::runtime_error(what), index(idx) {}
};

struct RcaParams {
    double beta0 = 0.0;
    double sigma1_sq = 0.0;  // Var of the coefficient noise
    double sigma2_sq = 1.0;  // Var of the additive noise
};

// One regime change at sample fraction `fraction`. New values take effect at
// retained index floor(N * fraction) + 1. Variance scales multiply the base
// sigma1_sq / sigma2_sq.
struct RegimeBreak {
    double fraction = 0.5;
    std::optional<double> new_beta;
    std::optional<double> variance_scale_1;
    std::optional<double> variance_scale_2;
};

struct RegimeSpec {
    std::vector<RegimeBreak> breaks;
    bool empty() const { return breaks.empty(); }
};

struct RcaSimSpec {
    RcaParams params;
    RegimeSpec regimes;
    int n = 0;
    int burn_in = 1000;
    double y0 = 0.0;
    std::uint64_t seed = 0;
};

struct TimeSeries {
    std::vector<double> values;  // y_0 .. y_N
    int n = 0;                   // N, count excluding y_0
    std::string label;
};

namespace detail {

inline constexpr double kOverflowLimit = 1e300;

inline void validate_sim_spec(const RcaSimSpec& spec) {
    // Noise-off and short runs are allowed: they are the exactness fixtures.
    // The statistical modules impose their own, stricter length floors.
    if (spec.n < 1) throw InvalidSpec("n must be >= 1");
    if (spec.burn_in < 0) throw InvalidSpec("burn_in must be >= 0");
    if (spec.params.sigma2_sq < 0.0)
        throw InvalidSpec("sigma2_sq must be >= 0");
    if (spec.params.sigma1_sq < 0.0)
        throw InvalidSpec("sigma1_sq must be >= 0");
    double prev = 0.0;
    long prev_idx = -1;
    for (const auto& b : spec.regimes.breaks) {
        if (!(b.fraction > 0.0 && b.fraction < 1.0))
            throw InvalidSpec("break fraction must lie in (0,1)");
        if (b.fraction <= prev)
            throw InvalidSpec("break fractions must be strictly increasing");
        if (!b.new_beta && !b.variance_scale_1 && !b.variance_scale_2)
            throw InvalidSpec("a break must change at least one field");
        if (b.variance_scale_1 && !(*b.variance_scale_1 > 0.0))
            throw InvalidSpec("variance_scale_1 must be > 0");
        if (b.variance_scale_2 && !(*b.variance_scale_2 > 0.0))
            throw InvalidSpec("variance_scale_2 must be > 0");
        const long idx = static_cast<long>(std::floor(spec.n * b.fraction));
        if (idx == prev_idx)
            throw InvalidSpec("two breaks map to the same index");
        prev = b.fraction;
        prev_idx = idx;
    }
}

}  // namespace detail

// Simulate y_i = (beta + e_{i,1}) y_{i-1} + e_{i,2} with Gaussian errors.
// Burn-in uses the first regime's parameters and is discarded; the last
// burn-in value becomes y_0. Identical (spec, seed) gives identical output.
inline TimeSeries simulate_rca(const RcaSimSpec& spec) {
    detail::validate_sim_spec(spec);
    detail::Rng rng(spec.seed);

    const int n = spec.n;
    double beta = spec.params.beta0;
    double s1 = std::sqrt(spec.params.sigma1_sq);
    double s2 = std::sqrt(spec.params.sigma2_sq);

    double y = spec.y0;
    for (long j = 0; j < spec.burn_in; ++j) {
        y = (beta + s1 * rng.normal()) * y + s2 * rng.normal();
        if (!(std::abs(y) <= detail::kOverflowLimit))
            throw OverflowError(j - spec.burn_in,
                                "overflow during burn-in at step " +
                                    std::to_string(j + 1));
    }

    TimeSeries out;
    out.n = n;
    out.values.resize(static_cast<std::size_t>(n) + 1);
    out.values[0] = y;

    std::size_t next_break = 0;
    const auto& breaks = spec.regimes.breaks;
    for (long i = 1; i <= n; ++i) {
        while (next_break < breaks.size() &&
               i > static_cast<long>(std::floor(n * breaks[next_break].fraction))) {
            const auto& b = breaks[next_break];
            if (b.new_beta) beta = *b.new_beta;
            if (b.variance_scale_1)
                s1 = std::sqrt(spec.params.sigma1_sq * *b.variance_scale_1);
            if (b.variance_scale_2)
                s2 = std::sqrt(spec.params.sigma2_sq * *b.variance_scale_2);
            ++next_break;
        }
        y = (beta + s1 * rng.normal()) * y + s2 * rng.normal();
        if (!(std::abs(y) <= detail::kOverflowLimit))
            throw OverflowError(i, "overflow at index " + std::to_string(i));
        out.values[static_cast<std::size_t>(i)] = y;
    }
    return out;
}

// Monte Carlo estimate of E ln|beta0 + e_{0,1}|. Negative means the strictly
// stationary regime. Infinite log contributions are clipped to +-708 and
// counted through `clipped` when provided.
inline double estimate_lyapunov(const RcaParams& params, long n_draws,
                                std::uint64_t seed = 0x1c0ffee1,
                                long* clipped = nullptr) {
    if (n_draws < 10000) throw InvalidSpec("n_draws must be >= 10^4");
    detail::Rng rng = detail::Rng::stream(seed, 0x4c59u);
    const double s1 = std::sqrt(params.sigma1_sq);
    double sum = 0.0, comp = 0.0;
    long nclip = 0;
    for (long i = 0; i < n_draws; ++i) {
        double v = std::log(std::abs(params.beta0 + s1 * rng.normal()));
        if (v < -708.0) {
            v = -708.0;
            ++nclip;
        } else if (v > 708.0) {
            v = 708.0;
            ++nclip;
        }
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    if (clipped) *clipped = nclip;
    return (sum + comp) / static_cast<double>(n_draws);
}

}  // namespace rca_cusum
