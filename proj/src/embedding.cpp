#include "cointopo/embedding.hpp"

namespace cointopo {

PointCloud delay_embed(const TimeSeries& ts, int d, int alpha,
                       std::vector<std::string>* advisories) {
    if (d < 1) throw ParamError("delay_embed: dimension must be >= 1");
    if (alpha < 1) throw ParamError("delay_embed: delay must be >= 1");
    const std::size_t n = ts.size();
    const std::size_t window = static_cast<std::size_t>(d - 1) * static_cast<std::size_t>(alpha);
    if (n <= window) {
        throw DataError("delay_embed: series of length " + std::to_string(n) +
                        " too short for d=" + std::to_string(d) +
                        ", alpha=" + std::to_string(alpha));
    }
    if (advisories) {
        if (alpha < 2) {
            advisories->push_back("delay alpha=" + std::to_string(alpha) +
                                  " is very small; the embedding may hug the diagonal");
        }
        if (window > n / 2) {
            advisories->push_back("embedding window (d-1)*alpha=" + std::to_string(window) +
                                  " exceeds half the series length; points may lose locality");
        }
    }

    PointCloud pc;
    pc.dim = d;
    pc.source = ts.label;
    const std::size_t count = n - window;
    pc.coords.resize(count * static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < count; ++k) {
        for (int j = 0; j < d; ++j) {
            pc.coords[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
                ts.values[k + static_cast<std::size_t>(j) * static_cast<std::size_t>(alpha)];
        }
    }
    return pc;
}

}  // namespace cointopo
