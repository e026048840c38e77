#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "cointopo/gp.hpp"
#include "cointopo/johansen.hpp"
#include "cointopo/series.hpp"
#include "cointopo/wasserstein.hpp"

namespace cointopo {

inline constexpr const char* kVersion = "0.1.0";

struct PipelineConfig {
    std::string input_path;
    std::string target;
    std::vector<std::string> regressors;
    IndexRange gp1_window;
    IndexRange gp2_window;
    int alpha = 75;
    int embed_dim = 3;
    int max_dim = 3;  // simplex bound; homology through max_dim-1
    double wasserstein_p = 2.0;
    int subsample_cap = 400;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool drop_essential = false;  // default: truncate essential classes
    int johansen_lag = 1;
    GpConfig gp;
    int jobs = 0;

    EssentialMode essential_mode() const {
        return drop_essential ? EssentialMode::Drop : EssentialMode::Truncate;
    }
};

nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const nlohmann::json& j);

struct PipelineResult {
    DiagramDistanceMatrix distances;
    std::vector<std::string> files;      // artifacts written, relative to out_dir
    nlohmann::json manifest;
};

/// The six-series workflow: RAW, GP1, GP2 (predictions), LIN CO (leading
/// Johansen residual), GP1 CO, GP2 CO (GP residuals); every series is
/// standardized, delay-embedded, subsampled past the cap, run through
/// persistence, and compared pairwise. Artifacts land in cfg.out_dir.
PipelineResult run_six_series(const PipelineConfig& cfg);
PipelineResult run_six_series(const PipelineConfig& cfg, const MultiSeries& input);

/// Channels plus all Johansen residuals (eps1..epsm by descending
/// eigenvalue), same per-series treatment, 2m x 2m distance matrices.
PipelineResult run_linear_residuals(const PipelineConfig& cfg);
PipelineResult run_linear_residuals(const PipelineConfig& cfg, const MultiSeries& input);

}  // namespace cointopo
