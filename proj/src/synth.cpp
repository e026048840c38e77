#include "cointopo/synth.hpp"

#include <cmath>
#include <numeric>

namespace cointopo {

double GaussianSampler::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - static_cast<double>(rng_() >> 11) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;        // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

TimeSeries gen_sine_mix(int n, double dt) {
    if (n < 2) throw ParamError("gen_sine_mix: need n >= 2");
    if (!(dt > 0.0)) throw ParamError("gen_sine_mix: dt must be positive");
    TimeSeries out;
    out.label = "sine_mix";
    out.values.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        out.values[static_cast<std::size_t>(k)] =
            std::sin(t) + std::sin(2.0 * t) + std::sin(3.0 * t);
    }
    return out;
}

TimeSeries gen_random_walk(int n, std::uint64_t seed) {
    if (n < 1) throw ParamError("gen_random_walk: need n >= 1");
    GaussianSampler gauss(seed);
    TimeSeries out;
    out.label = "walk";
    out.values.resize(static_cast<std::size_t>(n));
    double acc = 0.0;
    for (int t = 0; t < n; ++t) {
        acc += gauss();
        out.values[static_cast<std::size_t>(t)] = acc;
    }
    return out;
}

MultiSeries gen_cointegrated_system(int n, int m, const std::vector<double>& beta_true,
                                    std::uint64_t seed) {
    if (m < 2) throw ParamError("gen_cointegrated_system: need m >= 2 channels");
    if (static_cast<int>(beta_true.size()) != m) {
        throw ParamError("gen_cointegrated_system: beta_true size does not match m");
    }
    if (n < 2) throw ParamError("gen_cointegrated_system: need n >= 2");
    const double beta_norm2 =
        std::inner_product(beta_true.begin(), beta_true.end(), beta_true.begin(), 0.0);
    if (!(beta_norm2 > 0.0)) {
        throw ParamError("gen_cointegrated_system: beta_true must be nonzero");
    }

    // Trend loading a orthogonal to beta with all entries nonzero, so every
    // channel carries the walk while beta kills it exactly.
    std::vector<double> a(static_cast<std::size_t>(m), 1.0);
    for (int attempt = 0; attempt < m + 1; ++attempt) {
        const double proj =
            std::inner_product(a.begin(), a.end(), beta_true.begin(), 0.0) / beta_norm2;
        for (int k = 0; k < m; ++k) a[static_cast<std::size_t>(k)] -= proj * beta_true[static_cast<std::size_t>(k)];
        bool ok = true;
        for (double v : a) ok = ok && std::abs(v) > 1e-6;
        if (ok) break;
        // Nudge any vanished loading and re-project.
        for (int k = 0; k < m; ++k) {
            if (std::abs(a[static_cast<std::size_t>(k)]) <= 1e-6) {
                a[static_cast<std::size_t>(k)] += 1.0 + static_cast<double>(k);
            }
        }
    }

    GaussianSampler gauss(seed);
    MultiSeries out;
    out.channels.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        out.channels[static_cast<std::size_t>(k)].label = "y" + std::to_string(k + 1);
        out.channels[static_cast<std::size_t>(k)].values.resize(static_cast<std::size_t>(n));
    }
    out.index.resize(static_cast<std::size_t>(n));
    double walk = 0.0;
    for (int t = 0; t < n; ++t) {
        walk += gauss();
        const double eta = gauss();  // the injected stationary combination
        for (int k = 0; k < m; ++k) {
            out.channels[static_cast<std::size_t>(k)].values[static_cast<std::size_t>(t)] =
                a[static_cast<std::size_t>(k)] * walk +
                beta_true[static_cast<std::size_t>(k)] / beta_norm2 * eta;
        }
        out.index[static_cast<std::size_t>(t)] = static_cast<std::size_t>(t);
    }
    return out;
}

namespace {

double smoothstep01(double s) {
    s = std::clamp(s, 0.0, 1.0);
    return s * s * (3.0 - 2.0 * s);
}

// Plateau bump over [0,1]: smooth rise on the first quarter, flat middle,
// smooth fall on the last quarter.
double plateau_bump(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return smoothstep01(s / 0.45) * smoothstep01((1.0 - s) / 0.45);
}

constexpr double kSnapDepth = 3.0;
constexpr double kFreezeThreshold = -1.5;
constexpr double kFreezeRampWidth = 2.8;
constexpr double kDriverWalkStd = 0.25;  // total std over the whole series
constexpr double kIdioWalkStd = 0.1;     // per-channel walk remnant
// Slow deterministic drifts (full span over the series). No channel
// combination cancels all of them, so every residual keeps a mild trend.
constexpr double kChannelTrend[4] = {0.35, -0.45, 0.3, -0.35};

}  // namespace

MultiSeries gen_z24_mimic(const Z24MimicConfig& cfg) {
    if (cfg.n < 2) throw ParamError("gen_z24_mimic: need n >= 2");
    if (cfg.period < 8) throw ParamError("gen_z24_mimic: period must be >= 8");
    if (cfg.regime_end > static_cast<std::size_t>(cfg.n) ||
        cfg.regime_start >= cfg.regime_end) {
        throw ParamError("gen_z24_mimic: regime out of range");
    }
    if (cfg.noise_std < 0.0) throw ParamError("gen_z24_mimic: noise_std must be >= 0");

    const std::size_t n = static_cast<std::size_t>(cfg.n);
    const double sqrt_n = std::sqrt(static_cast<double>(cfg.n));

    GaussianSampler gauss(cfg.seed);
    std::vector<double> driver(n);
    double walk = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        walk += gauss() * kDriverWalkStd / sqrt_n;
        const double seasonal =
            std::sin(2.0 * M_PI * static_cast<double>(t) / static_cast<double>(cfg.period));
        double snap = 0.0;
        if (t >= cfg.regime_start && t < cfg.regime_end) {
            const double s = static_cast<double>(t - cfg.regime_start) /
                             static_cast<double>(cfg.regime_end - cfg.regime_start);
            snap = kSnapDepth * plateau_bump(s);
        }
        driver[t] = seasonal + walk - snap;
    }

    MultiSeries out;
    out.channels.resize(4);
    out.index.resize(n);
    for (std::size_t t = 0; t < n; ++t) out.index[t] = t;
    for (int k = 0; k < 4; ++k) {
        auto& ch = out.channels[static_cast<std::size_t>(k)];
        ch.label = "w" + std::to_string(k + 1);
        ch.values.resize(n);
        double idio = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            idio += gauss() * kIdioWalkStd / sqrt_n;
            const double trend = kChannelTrend[k] * (static_cast<double>(t) /
                                                     static_cast<double>(n - 1) -
                                                 0.5);
            double v = cfg.channel_couplings[static_cast<std::size_t>(k)] * driver[t] + idio +
                       trend + cfg.noise_std * gauss();
            if (k == 1) {
                // One-sided freezing response: nonzero only when the driver
                // dips below the threshold, which the snap confines to the
                // regime window.
                v += cfg.excursion_amplitude *
                     smoothstep01((kFreezeThreshold - driver[t]) / kFreezeRampWidth);
            }
            ch.values[t] = v;
        }
    }
    return out;
}

}  // namespace cointopo
