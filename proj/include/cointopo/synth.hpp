#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "cointopo/series.hpp"

namespace cointopo {

/// Deterministic standard-normal stream (Box-Muller over mt19937_64), so
/// generated fixtures are bit-identical across platforms and runs.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()();

private:
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// sin(t) + sin(2t) + sin(3t) sampled at t = k*dt.
TimeSeries gen_sine_mix(int n, double dt);

/// Cumulative sum of unit Gaussian innovations.
TimeSeries gen_random_walk(int n, std::uint64_t seed);

/// Channels share one random-walk trend, loaded so that beta_true . y(t)
/// equals the injected white noise exactly.
MultiSeries gen_cointegrated_system(int n, int m, const std::vector<double>& beta_true,
                                    std::uint64_t seed);

/// Four-channel stand-in for seasonal frequency data. All channels respond
/// linearly to a shared driver (seasonal sinusoid plus a slow random walk,
/// with a cold-snap dip inside `regime`); channel 2 additionally responds
/// one-sidedly (smoothstep ramp) once the driver drops below a freezing
/// threshold, which only happens inside the regime.
struct Z24MimicConfig {
    int n = 2000;
    int period = 300;  // samples per seasonal cycle
    std::size_t regime_start = 1200;
    std::size_t regime_end = 1500;
    double excursion_amplitude = 2.5;
    double noise_std = 0.02;
    std::array<double, 4> channel_couplings{1.0, 0.8, 1.2, 0.9};
    std::uint64_t seed = 1;
};

MultiSeries gen_z24_mimic(const Z24MimicConfig& cfg);

}  // namespace cointopo
