#include "cointopo/pipeline.hpp"

#include <atomic>
#include <cctype>
#include <filesystem>
#include <mutex>
#include <thread>

#include "cointopo/embedding.hpp"
#include "cointopo/io.hpp"
#include "cointopo/rips.hpp"

namespace cointopo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Rethrows library errors with the failing stage prepended, keeping the
// concrete type so exit-code mapping still works.
template <typename F>
auto with_stage(const std::string& stage, F&& fn) -> decltype(fn()) {
    auto tag = [&](const char* what) { return "stage " + stage + ": " + what; };
    try {
        return fn();
    } catch (const ParseError& e) {
        throw ParseError(tag(e.what()));
    } catch (const SchemaError& e) {
        throw SchemaError(tag(e.what()));
    } catch (const DataError& e) {
        throw DataError(tag(e.what()));
    } catch (const ShapeError& e) {
        throw ShapeError(tag(e.what()));
    } catch (const ParamError& e) {
        throw ParamError(tag(e.what()));
    } catch (const NumericalError& e) {
        throw NumericalError(tag(e.what()));
    } catch (const SizeLimitError& e) {
        throw SizeLimitError(tag(e.what()));
    }
}

std::string sanitize_label(const std::string& label) {
    std::string out;
    for (char c : label) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_');
    }
    return out;
}

template <typename F>
void parallel_for(std::size_t count, int jobs, F&& body) {
    unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                                : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct SeriesJob {
    std::string label;
    TimeSeries series;
};

struct SeriesArtifacts {
    PersistenceDiagram diagram;
    std::size_t points_embedded = 0;
    std::size_t points_used = 0;
    double max_scale = 0.0;
};

PipelineResult analyze_series_set(const PipelineConfig& cfg, std::vector<SeriesJob> jobs,
                                  const char* mode, json manifest_extra) {
    if (cfg.embed_dim < 2) throw ParamError("pipeline: embedding dim must be >= 2");
    if (cfg.alpha < 1) throw ParamError("pipeline: alpha must be >= 1");
    if (cfg.subsample_cap < 1) throw ParamError("pipeline: subsample cap must be >= 1");

    std::vector<SeriesArtifacts> artifacts(jobs.size());
    parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
        with_stage("embed+persistence[" + jobs[i].label + "]", [&] {
            TimeSeries std_series = standardize(jobs[i].series);
            PointCloud cloud = delay_embed(std_series, cfg.embed_dim, cfg.alpha);
            artifacts[i].points_embedded = cloud.size();
            if (cloud.size() > static_cast<std::size_t>(cfg.subsample_cap)) {
                cloud = maxmin_subsample(cloud, cfg.subsample_cap, cfg.seed + i);
            }
            artifacts[i].points_used = cloud.size();
            DistanceMatrix dm = pairwise_distances(cloud);
            const double radius = enclosing_radius(dm);
            artifacts[i].max_scale = radius;
            artifacts[i].diagram = rips_persistence(dm, cfg.max_dim, radius);
        });
    });

    std::vector<std::pair<std::string, const PersistenceDiagram*>> labeled;
    labeled.reserve(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        labeled.emplace_back(jobs[i].label, &artifacts[i].diagram);
    }
    std::vector<int> dims(static_cast<std::size_t>(cfg.max_dim));
    for (int k = 0; k < cfg.max_dim; ++k) dims[static_cast<std::size_t>(k)] = k;

    PipelineResult result;
    result.distances = with_stage("distances", [&] {
        return diagram_distance_matrix(labeled, cfg.wasserstein_p, dims,
                                       cfg.essential_mode(), cfg.jobs);
    });

    json manifest;
    manifest["mode"] = mode;
    manifest["config"] = config_to_json(cfg);
    manifest["versions"] = {{"cointopo", kVersion}};
    json series_info = json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        series_info.push_back({{"label", jobs[i].label},
                               {"points_embedded", artifacts[i].points_embedded},
                               {"points_used", artifacts[i].points_used},
                               {"max_scale", artifacts[i].max_scale}});
    }
    manifest["series"] = series_info;
    for (auto& [key, value] : manifest_extra.items()) manifest[key] = value;
    result.manifest = manifest;

    // Single writer at the end; on failure remove whatever was created.
    with_stage("write", [&] {
        fs::create_directories(cfg.out_dir);
        std::vector<std::string> written;
        auto emit = [&](const std::string& name, const std::string& content) {
            write_text_file((fs::path(cfg.out_dir) / name).string(), content);
            written.push_back(name);
        };
        try {
            emit("distances_combined.csv",
                 labeled_matrix_csv(result.distances.labels, result.distances.combined));
            for (std::size_t kd = 0; kd < dims.size(); ++kd) {
                emit("distances_h" + std::to_string(dims[kd]) + ".csv",
                     labeled_matrix_csv(result.distances.labels,
                                        result.distances.per_dimension[kd]));
            }
            for (std::size_t i = 0; i < jobs.size(); ++i) {
                const std::string base = "diagram_" + sanitize_label(jobs[i].label);
                emit(base + ".csv", diagram_csv(artifacts[i].diagram));
                emit(base + ".svg", diagram_svg(artifacts[i].diagram, jobs[i].label));
            }
            emit("manifest.json", manifest.dump(2) + "\n");
        } catch (...) {
            for (const auto& name : written) {
                std::error_code ec;
                fs::remove(fs::path(cfg.out_dir) / name, ec);
            }
            throw;
        }
        result.files = written;
    });
    return result;
}

MultiSeries load_pipeline_input(const PipelineConfig& cfg) {
    return with_stage("load", [&] {
        MultiSeries raw = load_csv(cfg.input_path);
        return drop_missing(raw);
    });
}

}  // namespace

json config_to_json(const PipelineConfig& cfg) {
    json j;
    j["input"] = cfg.input_path;
    j["target"] = cfg.target;
    j["regressors"] = cfg.regressors;
    j["gp1_window"] = {cfg.gp1_window.start, cfg.gp1_window.end};
    j["gp2_window"] = {cfg.gp2_window.start, cfg.gp2_window.end};
    j["alpha"] = cfg.alpha;
    j["dim"] = cfg.embed_dim;
    j["max_dim"] = cfg.max_dim;
    j["p"] = cfg.wasserstein_p;
    j["subsample_cap"] = cfg.subsample_cap;
    j["out"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    j["drop_essential"] = cfg.drop_essential;
    j["johansen_lag"] = cfg.johansen_lag;
    j["gp"] = {{"multi_starts", cfg.gp.multi_starts},
               {"max_iterations", cfg.gp.max_iterations},
               {"grad_tol", cfg.gp.grad_tol},
               {"seed", cfg.gp.seed}};
    j["jobs"] = cfg.jobs;
    return j;
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig cfg;
    auto get = [&](const char* key, auto& target) {
        if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
    };
    get("input", cfg.input_path);
    get("target", cfg.target);
    get("regressors", cfg.regressors);
    if (j.contains("gp1_window")) {
        cfg.gp1_window = {j["gp1_window"][0].get<std::size_t>(),
                          j["gp1_window"][1].get<std::size_t>()};
    }
    if (j.contains("gp2_window")) {
        cfg.gp2_window = {j["gp2_window"][0].get<std::size_t>(),
                          j["gp2_window"][1].get<std::size_t>()};
    }
    get("alpha", cfg.alpha);
    get("dim", cfg.embed_dim);
    get("max_dim", cfg.max_dim);
    get("p", cfg.wasserstein_p);
    get("subsample_cap", cfg.subsample_cap);
    get("out", cfg.out_dir);
    get("seed", cfg.seed);
    get("drop_essential", cfg.drop_essential);
    get("johansen_lag", cfg.johansen_lag);
    if (j.contains("gp")) {
        const json& g = j["gp"];
        if (g.contains("multi_starts")) cfg.gp.multi_starts = g["multi_starts"].get<int>();
        if (g.contains("max_iterations")) {
            cfg.gp.max_iterations = g["max_iterations"].get<int>();
        }
        if (g.contains("grad_tol")) cfg.gp.grad_tol = g["grad_tol"].get<double>();
        if (g.contains("seed")) cfg.gp.seed = g["seed"].get<std::uint64_t>();
    }
    get("jobs", cfg.jobs);
    return cfg;
}

PipelineResult run_six_series(const PipelineConfig& cfg, const MultiSeries& input) {
    with_stage("validate", [&]() -> int {
        if (input.channel_count() < 4) {
            throw DataError("six-series run needs at least 4 channels");
        }
        if (!input.has_channel(cfg.target)) {
            throw SchemaError("target channel '" + cfg.target + "' not in input");
        }
        if (cfg.regressors.empty()) throw ParamError("no regressor channels given");
        for (const auto& r : cfg.regressors) {
            if (!input.has_channel(r)) {
                throw SchemaError("regressor channel '" + r + "' not in input");
            }
            if (r == cfg.target) throw ParamError("target cannot be a regressor");
        }
        const std::size_t n = input.length();
        if (cfg.gp1_window.end > n || cfg.gp2_window.end > n) {
            throw ParamError("GP training window exceeds input length");
        }
        return 0;
    });

    const TimeSeries& raw = input.channel(cfg.target);

    GpModel gp1_model, gp2_model;
    TimeSeries gp1_resid = with_stage("gp1", [&] {
        return gp_residuals(input, cfg.target, cfg.regressors, cfg.gp1_window, cfg.gp,
                            &gp1_model);
    });
    TimeSeries gp2_resid = with_stage("gp2", [&] {
        return gp_residuals(input, cfg.target, cfg.regressors, cfg.gp2_window, cfg.gp,
                            &gp2_model);
    });

    auto prediction_from = [&](const TimeSeries& resid, const char* label) {
        TimeSeries pred;
        pred.label = label;
        pred.values.resize(raw.size());
        for (std::size_t t = 0; t < raw.size(); ++t) {
            pred.values[t] = raw.values[t] - resid.values[t];
        }
        return pred;
    };

    JohansenResult jr = with_stage("johansen", [&] {
        return johansen(input, cfg.johansen_lag);
    });
    TimeSeries lin_co = residual_series(input, jr.leading_vector());

    std::vector<SeriesJob> jobs;
    jobs.push_back({"RAW", raw});
    jobs.push_back({"GP1", prediction_from(gp1_resid, "GP1")});
    jobs.push_back({"GP2", prediction_from(gp2_resid, "GP2")});
    jobs.push_back({"LIN CO", lin_co});
    jobs.push_back({"GP1 CO", gp1_resid});
    jobs.push_back({"GP2 CO", gp2_resid});

    json extra;
    extra["johansen_eigenvalues"] = jr.eigenvalues;
    extra["gp1"] = {{"lengthscales", gp1_model.lengthscales},
                    {"kernel_variance", gp1_model.kernel_variance},
                    {"noise_variance", gp1_model.noise_variance},
                    {"log_marginal", gp1_model.log_marginal}};
    extra["gp2"] = {{"lengthscales", gp2_model.lengthscales},
                    {"kernel_variance", gp2_model.kernel_variance},
                    {"noise_variance", gp2_model.noise_variance},
                    {"log_marginal", gp2_model.log_marginal}};
    return analyze_series_set(cfg, std::move(jobs), "six-series", std::move(extra));
}

PipelineResult run_six_series(const PipelineConfig& cfg) {
    return run_six_series(cfg, load_pipeline_input(cfg));
}

PipelineResult run_linear_residuals(const PipelineConfig& cfg, const MultiSeries& input) {
    if (input.channel_count() < 2) {
        throw DataError("linear-residuals run needs at least 2 channels");
    }
    JohansenResult jr = with_stage("johansen", [&] {
        return johansen(input, cfg.johansen_lag);
    });

    std::vector<SeriesJob> jobs;
    for (const auto& ch : input.channels) jobs.push_back({ch.label, ch});
    for (std::size_t i = 0; i < jr.vectors.size(); ++i) {
        TimeSeries resid = residual_series(input, jr.vectors[i]);
        resid.label = "eps" + std::to_string(i + 1);
        jobs.push_back({resid.label, std::move(resid)});
    }

    json extra;
    extra["johansen_eigenvalues"] = jr.eigenvalues;
    return analyze_series_set(cfg, std::move(jobs), "linear-residuals", std::move(extra));
}

PipelineResult run_linear_residuals(const PipelineConfig& cfg) {
    return run_linear_residuals(cfg, load_pipeline_input(cfg));
}

}  // namespace cointopo
