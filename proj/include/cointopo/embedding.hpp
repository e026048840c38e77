#pragma once

#include <span>
#include <string>
#include <vector>

#include "cointopo/series.hpp"

namespace cointopo {

/// Point cloud in R^d, row-major storage.
struct PointCloud {
    std::vector<double> coords;  // size = count * dim
    int dim = 0;
    std::string source;

    std::size_t size() const {
        return dim > 0 ? coords.size() / static_cast<std::size_t>(dim) : 0;
    }
    double operator()(std::size_t i, int k) const {
        return coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)];
    }
    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
};

/// Time-delay embedding: point k is (y_k, y_{k+alpha}, ..., y_{k+(d-1)alpha}),
/// giving N - (d-1)*alpha points. `alpha` is a delay in index steps.
/// Advisory strings (delay too small to unfold, or so large the window spans
/// most of the series) are appended to *advisories when provided; they never
/// fail the call.
PointCloud delay_embed(const TimeSeries& ts, int d, int alpha,
                       std::vector<std::string>* advisories = nullptr);

}  // namespace cointopo
