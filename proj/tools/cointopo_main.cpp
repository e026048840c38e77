// Command-line front end: synth data generators, the individual analysis
// steps (adf, cointegrate, gp-fit, embed, persist, distance), and the two
// orchestrated runs (run-six, run-linear).

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cointopo/embedding.hpp"
#include "cointopo/gp.hpp"
#include "cointopo/io.hpp"
#include "cointopo/johansen.hpp"
#include "cointopo/pipeline.hpp"
#include "cointopo/rips.hpp"
#include "cointopo/series.hpp"
#include "cointopo/stationarity.hpp"
#include "cointopo/synth.hpp"
#include "cointopo/wasserstein.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cointopo;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

IndexRange parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ParamError("expected start:end range, got '" + text + "'");
    }
    IndexRange r;
    r.start = std::stoull(text.substr(0, colon));
    r.end = std::stoull(text.substr(colon + 1));
    if (r.start >= r.end) throw ParamError("empty range '" + text + "'");
    return r;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    for (const auto& tok : split_list(text)) out.push_back(std::stod(tok));
    return out;
}

void setup_synth(CLI::App& app) {
    auto* synth = app.add_subcommand("synth", "generate synthetic CSV data");
    synth->require_subcommand(1);

    {
        auto* sine = synth->add_subcommand("sine", "sin(t)+sin(2t)+sin(3t) samples");
        auto n = std::make_shared<int>(700);
        auto dt = std::make_shared<double>(0.1);
        auto out = std::make_shared<std::string>();
        sine->add_option("--n", *n, "sample count");
        sine->add_option("--dt", *dt, "time step");
        sine->add_option("--out", *out, "output CSV path")->required();
        sine->callback([n, dt, out] {
            MultiSeries ms;
            ms.channels.push_back(gen_sine_mix(*n, *dt));
            for (std::size_t i = 0; i < ms.channels[0].size(); ++i) ms.index.push_back(i);
            write_series_csv(*out, ms);
        });
    }
    {
        auto* walk = synth->add_subcommand("walk", "random walk");
        auto n = std::make_shared<int>(1000);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto out = std::make_shared<std::string>();
        walk->add_option("--n", *n, "sample count");
        walk->add_option("--seed", *seed, "RNG seed");
        walk->add_option("--out", *out, "output CSV path")->required();
        walk->callback([n, seed, out] {
            MultiSeries ms;
            ms.channels.push_back(gen_random_walk(*n, *seed));
            for (std::size_t i = 0; i < ms.channels[0].size(); ++i) ms.index.push_back(i);
            write_series_csv(*out, ms);
        });
    }
    {
        auto* co = synth->add_subcommand("coint", "cointegrated random-walk system");
        auto n = std::make_shared<int>(2000);
        auto beta = std::make_shared<std::string>("1,-2");
        auto seed = std::make_shared<std::uint64_t>(1);
        auto out = std::make_shared<std::string>();
        co->add_option("--n", *n, "sample count");
        co->add_option("--beta", *beta, "true cointegrating vector, comma separated");
        co->add_option("--seed", *seed, "RNG seed");
        co->add_option("--out", *out, "output CSV path")->required();
        co->callback([n, beta, seed, out] {
            const std::vector<double> b = parse_doubles(*beta);
            write_series_csv(*out, gen_cointegrated_system(
                                       *n, static_cast<int>(b.size()), b, *seed));
        });
    }
    {
        auto* mimic = synth->add_subcommand("mimic", "seasonal four-channel system with a "
                                                     "regime of nonlinear response");
        auto cfg = std::make_shared<Z24MimicConfig>();
        auto regime = std::make_shared<std::string>("1200:1500");
        auto couplings = std::make_shared<std::string>("1,0.8,1.2,0.9");
        auto out = std::make_shared<std::string>();
        mimic->add_option("--n", cfg->n, "sample count");
        mimic->add_option("--period", cfg->period, "seasonal period in samples");
        mimic->add_option("--regime", *regime, "excursion window start:end");
        mimic->add_option("--amplitude", cfg->excursion_amplitude, "excursion amplitude");
        mimic->add_option("--noise", cfg->noise_std, "per-channel noise std");
        mimic->add_option("--couplings", *couplings, "four channel couplings");
        mimic->add_option("--seed", cfg->seed, "RNG seed");
        mimic->add_option("--out", *out, "output CSV path")->required();
        mimic->callback([cfg, regime, couplings, out] {
            const IndexRange r = parse_range(*regime);
            cfg->regime_start = r.start;
            cfg->regime_end = r.end;
            const std::vector<double> c = parse_doubles(*couplings);
            if (c.size() != 4) throw ParamError("--couplings needs exactly 4 values");
            for (std::size_t i = 0; i < 4; ++i) cfg->channel_couplings[i] = c[i];
            write_series_csv(*out, gen_z24_mimic(*cfg));
        });
    }
}

void setup_adf(CLI::App& app) {
    auto* adf = app.add_subcommand("adf", "augmented Dickey-Fuller unit-root test");
    auto input = std::make_shared<std::string>();
    auto channel = std::make_shared<std::string>();
    auto lags = std::make_shared<int>(-1);
    auto no_intercept = std::make_shared<bool>(false);
    auto dump_cv = std::make_shared<std::string>();
    adf->add_option("--input", *input, "input CSV")->required();
    adf->add_option("--channel", *channel, "channel label")->required();
    adf->add_option("--lags", *lags, "lagged differences (default: Schwert rule)");
    adf->add_flag("--no-intercept", *no_intercept, "drop the constant term");
    adf->add_option("--dump-critical-values", *dump_cv,
                    "also write the embedded reference table to this CSV");
    adf->callback([input, channel, lags, no_intercept, dump_cv] {
        if (!dump_cv->empty()) write_text_file(*dump_cv, dickey_fuller_table_csv());
        MultiSeries ms = drop_missing(load_csv(*input));
        const TimeSeries& ts = ms.channel(*channel);
        const int use_lags = *lags >= 0 ? *lags : schwert_lags(ts.size());
        AdfResult res = adf_test(ts, use_lags, !*no_intercept);
        std::cout << "channel: " << *channel << "\n"
                  << "n_used: " << res.n_used << "\n"
                  << "lags: " << res.lags << "\n"
                  << "t_stat: " << format_double(res.t_stat) << "\n";
        for (std::size_t i = 0; i < res.levels.size(); ++i) {
            std::cout << res.levels[i] << "%: critical "
                      << format_double(res.critical_values[i]) << " -> "
                      << (res.reject_unit_root[i] ? "reject unit root (stationary)"
                                                  : "fail to reject unit root")
                      << "\n";
        }
    });
}

void setup_cointegrate(CLI::App& app) {
    auto* co = app.add_subcommand("cointegrate", "Johansen eigenvalues, vectors, residuals");
    auto input = std::make_shared<std::string>();
    auto lag = std::make_shared<int>(1);
    auto out = std::make_shared<std::string>();
    co->add_option("--input", *input, "input CSV")->required();
    co->add_option("--lag", *lag, "VECM lag");
    co->add_option("--out", *out, "output directory")->required();
    co->callback([input, lag, out] {
        MultiSeries ms = drop_missing(load_csv(*input));
        JohansenResult jr = johansen(ms, *lag);
        fs::create_directories(*out);

        std::string table = "eigenvalue";
        for (const auto& label : ms.labels()) table += ",beta_" + label;
        table += "\n";
        for (std::size_t i = 0; i < jr.eigenvalues.size(); ++i) {
            table += format_double(jr.eigenvalues[i]);
            for (double v : jr.vectors[i]) table += "," + format_double(v);
            table += "\n";
        }
        write_text_file((fs::path(*out) / "johansen.csv").string(), table);

        MultiSeries resid;
        for (std::size_t i = 0; i < jr.vectors.size(); ++i) {
            TimeSeries z = residual_series(ms, jr.vectors[i]);
            z.label = "eps" + std::to_string(i + 1);
            resid.channels.push_back(std::move(z));
        }
        resid.index = ms.index;
        write_series_csv((fs::path(*out) / "residuals.csv").string(), resid);
        std::cout << "leading eigenvalue: " << format_double(jr.eigenvalues.front())
                  << "\n";
    });
}

void setup_gp_fit(CLI::App& app) {
    auto* gp = app.add_subcommand("gp-fit", "GP regression residuals for one channel");
    auto input = std::make_shared<std::string>();
    auto target = std::make_shared<std::string>();
    auto regressors = std::make_shared<std::string>();
    auto window = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto cfg = std::make_shared<GpConfig>();
    gp->add_option("--input", *input, "input CSV")->required();
    gp->add_option("--target", *target, "target channel")->required();
    gp->add_option("--regressors", *regressors, "comma-separated regressor channels")
        ->required();
    gp->add_option("--train-window", *window, "training rows start:end")->required();
    gp->add_option("--out", *out, "output directory")->required();
    gp->add_option("--starts", cfg->multi_starts, "optimizer multi-starts");
    gp->add_option("--max-iter", cfg->max_iterations, "optimizer iteration cap");
    gp->add_option("--seed", cfg->seed, "optimizer start seed");
    gp->callback([input, target, regressors, window, out, cfg] {
        MultiSeries ms = drop_missing(load_csv(*input));
        GpModel model;
        TimeSeries resid = gp_residuals(ms, *target, split_list(*regressors),
                                        parse_range(*window), *cfg, &model);
        fs::create_directories(*out);
        MultiSeries rms;
        rms.channels.push_back(resid);
        rms.index = ms.index;
        write_series_csv((fs::path(*out) / "residual.csv").string(), rms);

        json side;
        side["target"] = *target;
        side["regressors"] = split_list(*regressors);
        side["lengthscales"] = model.lengthscales;
        side["kernel_variance"] = model.kernel_variance;
        side["noise_variance"] = model.noise_variance;
        side["log_marginal"] = model.log_marginal;
        write_text_file((fs::path(*out) / "gp_hyperparameters.json").string(),
                        side.dump(2) + "\n");
        std::cout << "log marginal likelihood: " << format_double(model.log_marginal)
                  << "\n";
    });
}

void setup_embed(CLI::App& app) {
    auto* embed = app.add_subcommand("embed", "time-delay embedding to a point cloud");
    auto input = std::make_shared<std::string>();
    auto channel = std::make_shared<std::string>();
    auto d = std::make_shared<int>(3);
    auto alpha = std::make_shared<int>(75);
    auto do_std = std::make_shared<bool>(false);
    auto out = std::make_shared<std::string>();
    embed->add_option("--input", *input, "input CSV")->required();
    embed->add_option("--channel", *channel, "channel label")->required();
    embed->add_option("--dim", *d, "embedding dimension");
    embed->add_option("--alpha", *alpha, "delay in samples");
    embed->add_flag("--standardize", *do_std, "standardize before embedding");
    embed->add_option("--out", *out, "output cloud CSV")->required();
    embed->callback([input, channel, d, alpha, do_std, out] {
        MultiSeries ms = drop_missing(load_csv(*input));
        TimeSeries ts = ms.channel(*channel);
        if (*do_std) ts = standardize(ts);
        std::vector<std::string> advisories;
        PointCloud pc = delay_embed(ts, *d, *alpha, &advisories);
        for (const auto& a : advisories) std::cerr << "advisory: " << a << "\n";
        write_cloud_csv(*out, pc);
        std::cout << pc.size() << " points in R^" << *d << "\n";
    });
}

void setup_persist(CLI::App& app) {
    auto* persist = app.add_subcommand("persist", "Vietoris-Rips persistence of a cloud");
    auto input = std::make_shared<std::string>();
    auto max_dim = std::make_shared<int>(3);
    auto max_scale = std::make_shared<double>(-1.0);
    auto cap = std::make_shared<int>(400);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out = std::make_shared<std::string>();
    persist->add_option("--input", *input, "cloud CSV (one point per row)")->required();
    persist->add_option("--max-dim", *max_dim, "max simplex dimension");
    persist->add_option("--max-scale", *max_scale,
                        "truncation scale (default: enclosing radius)");
    persist->add_option("--subsample-cap", *cap, "maxmin subsample cap");
    persist->add_option("--seed", *seed, "subsample seed");
    persist->add_option("--out", *out, "output directory")->required();
    persist->callback([input, max_dim, max_scale, cap, seed, out] {
        PointCloud pc = read_cloud_csv(*input);
        if (pc.size() > static_cast<std::size_t>(*cap)) {
            std::cerr << "subsampling " << pc.size() << " -> " << *cap << " points\n";
            pc = maxmin_subsample(pc, *cap, *seed);
        }
        DistanceMatrix dm = pairwise_distances(pc);
        const double scale = *max_scale >= 0.0 ? *max_scale : enclosing_radius(dm);
        PersistenceDiagram pd = rips_persistence(dm, *max_dim, scale);
        fs::create_directories(*out);
        write_diagram_csv((fs::path(*out) / "diagram.csv").string(), pd);
        write_diagram_svg((fs::path(*out) / "diagram.svg").string(), pd);
        for (int k = 0; k < pd.homology_dims(); ++k) {
            std::cout << "H" << k << ": " << pd.intervals[static_cast<std::size_t>(k)].size()
                      << " intervals\n";
        }
    });
}

void setup_distance(CLI::App& app) {
    auto* dist = app.add_subcommand("distance", "Wasserstein distances between diagrams");
    auto inputs = std::make_shared<std::string>();
    auto p = std::make_shared<double>(2.0);
    auto dims = std::make_shared<std::string>("0,1,2");
    auto drop_essential = std::make_shared<bool>(false);
    auto out = std::make_shared<std::string>();
    dist->add_option("--inputs", *inputs, "comma-separated diagram CSV files (>= 2)")
        ->required();
    dist->add_option("--p", *p, "Wasserstein order");
    dist->add_option("--dims", *dims, "homology dimensions to include");
    dist->add_flag("--drop-essential", *drop_essential, "exclude essential classes");
    dist->add_option("--out", *out, "output directory for distance matrices");
    dist->callback([inputs, p, dims, drop_essential, out] {
        const std::vector<std::string> files = split_list(*inputs);
        if (files.size() < 2) throw ParamError("distance: need at least two diagrams");
        std::vector<PersistenceDiagram> diagrams;
        diagrams.reserve(files.size());
        for (const auto& f : files) diagrams.push_back(read_diagram_csv(f));

        std::vector<int> kdims;
        for (const auto& tok : split_list(*dims)) kdims.push_back(std::stoi(tok));
        // Distances only use dimensions every diagram carries.
        int common = kdims.empty() ? 0 : 1 << 30;
        for (const auto& d : diagrams) common = std::min(common, d.homology_dims());
        std::vector<int> usable;
        for (int k : kdims) {
            if (k < common) usable.push_back(k);
        }
        if (usable.empty()) throw ParamError("distance: no usable homology dimensions");

        std::vector<std::pair<std::string, const PersistenceDiagram*>> labeled;
        for (std::size_t i = 0; i < files.size(); ++i) {
            labeled.emplace_back(fs::path(files[i]).stem().string() + "#" +
                                     std::to_string(i),
                                 &diagrams[i]);
        }
        DiagramDistanceMatrix m = diagram_distance_matrix(
            labeled, *p, usable,
            *drop_essential ? EssentialMode::Drop : EssentialMode::Truncate);
        if (files.size() == 2) {
            std::cout << format_double(m.combined[0][1]) << "\n";
        } else {
            std::cout << labeled_matrix_csv(m.labels, m.combined);
        }
        if (!out->empty()) {
            fs::create_directories(*out);
            write_labeled_matrix_csv((fs::path(*out) / "distances_combined.csv").string(),
                                     m.labels, m.combined);
            for (std::size_t kd = 0; kd < usable.size(); ++kd) {
                write_labeled_matrix_csv(
                    (fs::path(*out) / ("distances_h" + std::to_string(usable[kd]) + ".csv"))
                        .string(),
                    m.labels, m.per_dimension[kd]);
            }
        }
    });
}

// Options shared by run-six and run-linear. JSON config (when given) fills
// anything the command line did not set; explicit flags win.
struct PipelineFlags {
    std::string config_path;
    std::string gp1_window_text, gp2_window_text;
    std::string regressors_text;
    PipelineConfig cfg;

    void add_common(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file mirroring the flags");
        cmd->add_option("--input", cfg.input_path, "input CSV");
        cmd->add_option("--alpha", cfg.alpha, "embedding delay");
        cmd->add_option("--dim", cfg.embed_dim, "embedding dimension");
        cmd->add_option("--max-dim", cfg.max_dim, "max simplex dimension");
        cmd->add_option("--p", cfg.wasserstein_p, "Wasserstein order");
        cmd->add_option("--subsample-cap", cfg.subsample_cap, "maxmin subsample cap");
        cmd->add_option("--seed", cfg.seed, "run seed");
        cmd->add_flag("--drop-essential", cfg.drop_essential, "exclude essential classes");
        cmd->add_option("--johansen-lag", cfg.johansen_lag, "VECM lag");
        cmd->add_option("--jobs", cfg.jobs, "worker threads (0 = hardware)");
        cmd->add_option("--gp-starts", cfg.gp.multi_starts, "GP optimizer starts");
        cmd->add_option("--gp-max-iter", cfg.gp.max_iterations, "GP iteration cap");
        cmd->add_option("--gp-seed", cfg.gp.seed, "GP start seed");
        cmd->add_option("--out", cfg.out_dir, "output directory");
    }

    // Overlay: JSON values for options the user did not pass on the CLI.
    void finalize(CLI::App* cmd) {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw DataError("cannot open config '" + config_path + "'");
            json j = json::parse(in, nullptr, true, true);
            if (j.contains("config")) j = j["config"];  // accept a run manifest too
            PipelineConfig from_file = config_from_json(j);
            auto keep = [&](const char* flag) { return cmd->count(flag) > 0; };
            PipelineConfig merged = from_file;
            if (keep("--input")) merged.input_path = cfg.input_path;
            if (keep("--target")) merged.target = cfg.target;
            if (cmd->get_option_no_throw("--regressors") && keep("--regressors")) {
                merged.regressors = cfg.regressors;
            }
            if (cmd->get_option_no_throw("--gp1-window") && keep("--gp1-window")) {
                merged.gp1_window = cfg.gp1_window;
            }
            if (cmd->get_option_no_throw("--gp2-window") && keep("--gp2-window")) {
                merged.gp2_window = cfg.gp2_window;
            }
            if (keep("--alpha")) merged.alpha = cfg.alpha;
            if (keep("--dim")) merged.embed_dim = cfg.embed_dim;
            if (keep("--max-dim")) merged.max_dim = cfg.max_dim;
            if (keep("--p")) merged.wasserstein_p = cfg.wasserstein_p;
            if (keep("--subsample-cap")) merged.subsample_cap = cfg.subsample_cap;
            if (keep("--seed")) merged.seed = cfg.seed;
            if (keep("--drop-essential")) merged.drop_essential = cfg.drop_essential;
            if (keep("--johansen-lag")) merged.johansen_lag = cfg.johansen_lag;
            if (keep("--jobs")) merged.jobs = cfg.jobs;
            if (keep("--gp-starts")) merged.gp.multi_starts = cfg.gp.multi_starts;
            if (keep("--gp-max-iter")) merged.gp.max_iterations = cfg.gp.max_iterations;
            if (keep("--gp-seed")) merged.gp.seed = cfg.gp.seed;
            if (keep("--out")) merged.out_dir = cfg.out_dir;
            cfg = merged;
        }
        if (cfg.input_path.empty()) throw ParamError("missing --input (or config entry)");
        if (cfg.out_dir.empty()) throw ParamError("missing --out (or config entry)");
    }
};

void setup_run_six(CLI::App& app) {
    auto* run = app.add_subcommand("run-six", "the six-series comparison workflow");
    auto flags = std::make_shared<PipelineFlags>();
    flags->add_common(run);
    run->add_option("--target", flags->cfg.target, "target channel");
    run->add_option("--regressors", flags->regressors_text, "comma-separated regressors");
    run->add_option("--gp1-window", flags->gp1_window_text, "first GP window start:end");
    run->add_option("--gp2-window", flags->gp2_window_text, "second GP window start:end");
    run->callback([flags, run] {
        if (!flags->regressors_text.empty()) {
            flags->cfg.regressors = split_list(flags->regressors_text);
        }
        if (!flags->gp1_window_text.empty()) {
            flags->cfg.gp1_window = parse_range(flags->gp1_window_text);
        }
        if (!flags->gp2_window_text.empty()) {
            flags->cfg.gp2_window = parse_range(flags->gp2_window_text);
        }
        flags->finalize(run);
        PipelineResult res = run_six_series(flags->cfg);
        std::cout << labeled_matrix_csv(res.distances.labels, res.distances.combined);
    });
}

void setup_run_linear(CLI::App& app) {
    auto* run = app.add_subcommand("run-linear",
                                   "channels vs Johansen residuals comparison");
    auto flags = std::make_shared<PipelineFlags>();
    flags->add_common(run);
    run->callback([flags, run] {
        flags->finalize(run);
        PipelineResult res = run_linear_residuals(flags->cfg);
        std::cout << labeled_matrix_csv(res.distances.labels, res.distances.combined);
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cointegration + topological analysis of multichannel time series"};
    app.require_subcommand(1);

    setup_synth(app);
    setup_adf(app);
    setup_cointegrate(app);
    setup_gp_fit(app);
    setup_embed(app);
    setup_persist(app);
    setup_distance(app);
    setup_run_six(app);
    setup_run_linear(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {  // parse/schema/data/shape/size-limit
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
