// fracdim: synthesize point sets, estimate class-boundary correlation
// dimensions, compute the mixup boundary-complexity measure, run
// configuration sweeps and score measure records.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fracdim/fracdim.hpp"

namespace fs = std::filesystem;
using namespace fracdim;

namespace {

enum ExitCode : int { kOk = 0, kFlags = 2, kData = 3, kDegenerate = 4, kIo = 5 };

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return kFlags;
        case ErrorCode::IoFailure: return kIo;
        case ErrorCode::DegenerateScale:
        case ErrorCode::DegenerateBaseDimension:
        case ErrorCode::TooManyInvalidBatches:
        case ErrorCode::NoCrossPairs:
        case ErrorCode::InsufficientNonzeroCounts: return kDegenerate;
        default: return kData;
    }
}

struct FlagError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Logger {
    bool quiet = false;
    void stage(const std::string& msg) const {
        if (!quiet) std::cerr << "[fracdim] " << msg << "\n";
    }
};

DataFormat resolve_format(const std::string& flag, const fs::path& path) {
    if (flag == "csv") return DataFormat::Csv;
    if (flag == "fdbin") return DataFormat::Fdbin;
    return format_from_path(path);
}

std::size_t resolve_threads(std::optional<std::size_t> flag) {
    std::size_t t = flag ? *flag : threads_from_env(1);
    if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
    return t;
}

void write_text(const fs::path& path, const std::string& text) { detail::write_file(path, text, false); }

// Estimator flags shared by dim, measure and sweep.
struct EstimatorFlags {
    std::size_t batches = 100;
    std::size_t batch_size = 128;
    double p_lo = 0.01;
    double p_hi = 0.3;
    std::size_t scales = 20;
    std::size_t pilot_pairs = 200'000;

    void add_to(CLI::App* app) {
        app->add_option("--batches", batches, "Number of batches")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--batch-size", batch_size, "Points per batch")->capture_default_str();
        app->add_option("--p-lo", p_lo, "Lower distance percentile of the radius range")->capture_default_str();
        app->add_option("--p-hi", p_hi, "Upper distance percentile of the radius range")->capture_default_str();
        app->add_option("--scales", scales, "Number of log-spaced radii")->capture_default_str();
        app->add_option("--pilot-pairs", pilot_pairs, "Maximum random pairs used to place the radii")
            ->capture_default_str();
    }

    void validate() const {
        if (batch_size < 2) throw FlagError("--batch-size must be at least 2");
        if (!(p_lo > 0.0 && p_lo < p_hi && p_hi < 1.0)) throw FlagError("--p-lo/--p-hi must satisfy 0 < p-lo < p-hi < 1");
        if (scales < 2) throw FlagError("--scales must be at least 2");
        if (pilot_pairs < 2) throw FlagError("--pilot-pairs must be at least 2");
    }

    MeasureConfig to_config(std::uint64_t seed) const {
        MeasureConfig c;
        c.num_batches = batches;
        c.batch_size = batch_size;
        c.percentile_lo = p_lo;
        c.percentile_hi = p_hi;
        c.num_scales = scales;
        c.pilot_pairs = pilot_pairs;
        c.seed = RngSeed{seed};
        return c;
    }
};

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string kind;
    std::size_t n = 0;
    std::size_t dim = 2;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "auto";
};

int run_synth(const SynthArgs& a, const Logger& log) {
    SynthSpec spec;
    try {
        spec.kind = parse_synth_kind(a.kind);
    } catch (const Error& e) {
        throw FlagError(std::string("--kind: ") + e.what());
    }
    if (a.n < 2) throw FlagError("--n must be at least 2");
    if (spec.kind == SynthKind::UniformCube && (a.dim < 1 || a.dim > 10)) throw FlagError("--dim must be in 1..10");
    if (spec.kind == SynthKind::TwoClassLinear && a.dim < 1) throw FlagError("--dim must be at least 1");
    spec.n = a.n;
    spec.dim = a.dim;
    spec.seed = RngSeed{a.seed};
    log.stage("generating " + a.kind + " (n=" + std::to_string(a.n) + ")");
    const Dataset data = generate(spec);
    save_dataset(data, a.out, resolve_format(a.format, a.out));
    log.stage("wrote " + a.out);
    return kOk;
}

// ---------------------------------------------------------------- dim

struct DimArgs {
    std::string data;
    std::string format = "auto";
    std::string mode = "cross-class";
    EstimatorFlags est;
    std::uint64_t seed = 0;
    std::optional<std::size_t> threads;
    std::string loglog_out;
    bool per_batch = false;
    bool pretty = false;
};

int run_dim(const DimArgs& a, const Logger& log) {
    a.est.validate();
    const PairMode mode = a.mode == "all-pairs" ? PairMode::AllPairs : PairMode::CrossClass;

    log.stage("loading " + a.data);
    const Dataset data = load_dataset(a.data, resolve_format(a.format, a.data));
    if (a.est.batch_size > data.size()) {
        fail(ErrorCode::BatchTooLarge, "batch size " + std::to_string(a.est.batch_size) + " exceeds dataset size " +
                                           std::to_string(data.size()));
    }
    const MeasureConfig mc = a.est.to_config(a.seed);
    log.stage("placing radii from pilot distances");
    DimensionConfig config;
    config.num_batches = mc.num_batches;
    config.batch_size = mc.batch_size;
    config.mode = mode;
    config.threads = resolve_threads(a.threads);
    config.radius_set = measure_radius_set(data, mc.percentile_lo, mc.percentile_hi, mc.num_scales, mc.seed,
                                           mc.pilot_pairs);
    log.stage("estimating dimension over " + std::to_string(config.num_batches) + " batches");
    const DimensionEstimate est = estimate_dimension(data, config, mc.seed);

    if (!a.loglog_out.empty()) write_text(a.loglog_out, format_mean_curve_csv(est));

    json out = to_json(est, a.per_batch);
    out["mode"] = to_string(mode);
    out["radius_set"] = to_json(config.radius_set);
    json cfg = to_json(mc);
    cfg.erase("mixup");
    out["config"] = cfg;
    if (a.pretty) {
        std::printf("mode               %s\n", to_string(mode).c_str());
        std::printf("mean_slope         %.6f\n", est.mean_slope);
        std::printf("slope_std          %.6f\n", est.slope_std);
        std::printf("batches_valid      %zu / %zu\n", est.batches_valid, est.batches_requested);
        std::printf("radius range       [%.6g, %.6g] (%zu scales)\n", config.radius_set.r_min(),
                    config.radius_set.r_max(), config.radius_set.num_scales());
    } else {
        std::cout << canonical_dump(out);
    }
    return kOk;
}

// ---------------------------------------------------------------- measure

struct MixupFlags {
    std::string lambda_dist = "uniform";
    double alpha = 0.2;
    double lambda = 1.0;
    std::optional<std::size_t> virtual_per_batch;
    bool virtual_only = false;

    void add_to(CLI::App* app) {
        app->add_option("--lambda-dist", lambda_dist, "Mixup weight distribution")
            ->check(CLI::IsMember({"uniform", "beta", "constant"}))
            ->capture_default_str();
        app->add_option("--alpha", alpha, "Beta(alpha, alpha) parameter for --lambda-dist beta")->capture_default_str();
        app->add_option("--lambda", lambda, "Fixed weight for --lambda-dist constant")->capture_default_str();
        app->add_option("--virtual-per-batch", virtual_per_batch,
                        "Virtual points per batch (default: batch size)");
        app->add_flag("--virtual-only", virtual_only, "Count pairs among virtual points only");
    }

    MixupConfig to_config() const {
        MixupConfig m;
        if (lambda_dist == "beta") {
            if (!(alpha > 0.0)) throw FlagError("--alpha must be positive");
            m.lambda = LambdaDistribution::beta(alpha);
        } else if (lambda_dist == "constant") {
            if (!(lambda >= 0.0 && lambda <= 1.0)) throw FlagError("--lambda must lie in [0, 1]");
            m.lambda = LambdaDistribution::constant(lambda);
        }
        m.virtual_per_batch = virtual_per_batch;
        m.include_originals = !virtual_only;
        if (virtual_only && virtual_per_batch && *virtual_per_batch < 2) {
            throw FlagError("--virtual-only needs --virtual-per-batch >= 2");
        }
        return m;
    }
};

struct MeasureArgs {
    std::string data;
    std::string format = "auto";
    std::string model;
    EstimatorFlags est;
    MixupFlags mixup;
    std::uint64_t seed = 0;
    std::optional<std::size_t> threads;
    std::string loglog_out;
    bool per_batch = false;
    bool pretty = false;
};

int run_measure(const MeasureArgs& a, const Logger& log) {
    a.est.validate();
    MeasureConfig config = a.est.to_config(a.seed);
    config.mixup = a.mixup.to_config();
    config.threads = resolve_threads(a.threads);

    log.stage("loading " + a.data);
    const Dataset data = load_dataset(a.data, resolve_format(a.format, a.data));
    log.stage("loading model " + a.model);
    const auto classifier = load_classifier(a.model);
    log.stage("computing measure (" + std::to_string(config.num_batches) + " batches x " +
              std::to_string(config.batch_size) + ")");
    const MeasureResult result = compute_measure(data, *classifier, config);

    if (!a.loglog_out.empty()) write_text(a.loglog_out, format_measure_curves_csv(result));
    if (a.pretty) {
        std::printf("M                  %.6f\n", result.m);
        std::printf("D2(X)              %.6f (std %.6f, %zu/%zu batches)\n", result.d2_data.mean_slope,
                    result.d2_data.slope_std, result.d2_data.batches_valid, result.d2_data.batches_requested);
        std::printf("D2(X_mixup)        %.6f (std %.6f, %zu/%zu batches)\n", result.d2_mixup.mean_slope,
                    result.d2_mixup.slope_std, result.d2_mixup.batches_valid, result.d2_mixup.batches_requested);
    } else {
        std::cout << canonical_dump(to_json(result, config, a.per_batch));
    }
    return kOk;
}

// ---------------------------------------------------------------- sweep

// "batches,batch_size,p_lo,p_hi"
MeasureConfig parse_sweep_config(const std::string& text, const MeasureConfig& base) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
    if (parts.size() != 4) throw FlagError("--config expects 'batches,batch_size,p_lo,p_hi', got '" + text + "'");
    MeasureConfig c = base;
    try {
        c.num_batches = std::stoul(parts[0]);
        c.batch_size = std::stoul(parts[1]);
        c.percentile_lo = std::stod(parts[2]);
        c.percentile_hi = std::stod(parts[3]);
    } catch (const std::exception&) {
        throw FlagError("--config '" + text + "' is not numeric");
    }
    if (c.num_batches == 0 || c.batch_size < 2) throw FlagError("--config '" + text + "' has invalid batch settings");
    if (!(c.percentile_lo > 0.0 && c.percentile_lo < c.percentile_hi && c.percentile_hi < 1.0)) {
        throw FlagError("--config '" + text + "' has invalid percentiles");
    }
    return c;
}

// Configurations scored in the reference results table.
const std::vector<std::string> kDefaultSweepConfigs{"100,128,0.01,0.3", "100,128,0.01,0.5", "150,128,0.01,0.5",
                                                    "150,128,0.01,0.3", "100,96,0.01,0.3"};

struct SweepArgs {
    std::string data;
    std::string format = "auto";
    std::vector<std::string> models;
    std::string gaps;
    std::vector<std::string> configs;
    std::size_t scales = 20;
    MixupFlags mixup;
    std::uint64_t seed = 0;
    std::optional<std::size_t> threads;
    std::string records_out;
    bool pretty = false;
};

int run_sweep_cmd(const SweepArgs& a, const Logger& log) {
    if (a.scales < 2) throw FlagError("--scales must be at least 2");
    MeasureConfig base;
    base.num_scales = a.scales;
    base.seed = RngSeed{a.seed};
    base.mixup = a.mixup.to_config();
    base.threads = resolve_threads(a.threads);
    std::vector<MeasureConfig> configs;
    for (const auto& text : a.configs.empty() ? kDefaultSweepConfigs : a.configs) {
        configs.push_back(parse_sweep_config(text, base));
    }

    log.stage("loading " + a.data);
    const Dataset data = load_dataset(a.data, resolve_format(a.format, a.data));
    const auto truth = parse_gaps_csv(detail::read_file(a.gaps, false));
    std::vector<std::unique_ptr<Classifier>> owned;
    std::vector<SweepModel> models;
    for (const auto& path : a.models) {
        owned.push_back(load_classifier(path));
        models.push_back({fs::path(path).stem().string(), owned.back().get()});
    }
    log.stage("sweeping " + std::to_string(models.size()) + " models x " + std::to_string(configs.size()) +
              " configurations");
    const SweepReport report = run_sweep(data, models, configs, truth);
    if (!a.records_out.empty()) write_text(a.records_out, format_records_csv(report.records()));
    if (a.pretty) {
        std::cout << format_report_table(report);
    } else {
        std::cout << canonical_dump(to_json(report));
    }
    return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string records;
    bool pretty = false;
};

int run_eval(const EvalArgs& a, const Logger&) {
    const auto records = parse_records_csv(detail::read_file(a.records, false));
    const CmiScore score = conditional_mutual_information(records);
    if (a.pretty) {
        std::printf("# plug-in conditional mutual information, median-binarized, conditioned on group\n");
        std::printf("bits               %.6f\n", score.bits);
        std::printf("records            %zu (dropped %zu in %zu singleton groups)\n", score.num_records,
                    score.dropped_records, score.dropped_groups);
        std::printf("groups             %zu\n", score.num_groups);
    } else {
        std::cout << canonical_dump(to_json(score));
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Class-boundary correlation dimension and mixup decision-boundary measure"};
    app.require_subcommand(1);
    Logger log;
    app.add_flag("-q,--quiet", log.quiet, "Suppress stage log on stderr");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth_cmd->add_option("--kind", synth.kind,
                          "sierpinski | cantor_dust | uniform_cube | two_class_linear | two_class_circle")
        ->required();
    synth_cmd->add_option("--n", synth.n, "Number of points")->required();
    synth_cmd->add_option("--dim", synth.dim, "Dimension (uniform_cube, two_class_linear)")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Random seed")->required();
    synth_cmd->add_option("--out", synth.out, "Output file (.csv or .fdbin)")->required();
    synth_cmd->add_option("--format", synth.format, "auto | csv | fdbin")
        ->check(CLI::IsMember({"auto", "csv", "fdbin"}))
        ->capture_default_str();

    DimArgs dim;
    auto* dim_cmd = app.add_subcommand("dim", "Estimate the correlation dimension of a dataset");
    dim_cmd->add_option("--data", dim.data, "Input dataset")->required();
    dim_cmd->add_option("--format", dim.format, "auto | csv | fdbin")
        ->check(CLI::IsMember({"auto", "csv", "fdbin"}))
        ->capture_default_str();
    dim_cmd->add_option("--mode", dim.mode, "Pairs to count: cross-class | all-pairs")
        ->check(CLI::IsMember({"cross-class", "all-pairs"}))
        ->capture_default_str();
    dim.est.add_to(dim_cmd);
    dim_cmd->add_option("--seed", dim.seed, "Random seed")->required();
    dim_cmd->add_option("--threads", dim.threads, "Worker threads (0 = all cores; env FRACDIM_THREADS)");
    dim_cmd->add_option("--loglog-out", dim.loglog_out, "Write mean count per radius as CSV");
    dim_cmd->add_flag("--per-batch", dim.per_batch, "Include per-batch fits in the JSON");
    dim_cmd->add_flag("--pretty", dim.pretty, "Human-readable output");

    MeasureArgs measure;
    auto* measure_cmd = app.add_subcommand("measure", "Compute the boundary-complexity measure M for a model");
    measure_cmd->add_option("--data", measure.data, "Training dataset")->required();
    measure_cmd->add_option("--format", measure.format, "auto | csv | fdbin")
        ->check(CLI::IsMember({"auto", "csv", "fdbin"}))
        ->capture_default_str();
    measure_cmd->add_option("--model", measure.model, "Model document (JSON)")->required();
    measure.est.add_to(measure_cmd);
    measure.mixup.add_to(measure_cmd);
    measure_cmd->add_option("--seed", measure.seed, "Random seed")->required();
    measure_cmd->add_option("--threads", measure.threads, "Worker threads (0 = all cores; env FRACDIM_THREADS)");
    measure_cmd->add_option("--loglog-out", measure.loglog_out, "Write both mean pair-count curves as CSV");
    measure_cmd->add_flag("--per-batch", measure.per_batch, "Include per-batch fits in the JSON");
    measure_cmd->add_flag("--pretty", measure.pretty, "Human-readable output");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Measure several models under several configurations and score them");
    sweep_cmd->add_option("--data", sweep.data, "Training dataset")->required();
    sweep_cmd->add_option("--format", sweep.format, "auto | csv | fdbin")
        ->check(CLI::IsMember({"auto", "csv", "fdbin"}))
        ->capture_default_str();
    sweep_cmd->add_option("--model", sweep.models, "Model document (repeatable)")->required();
    sweep_cmd->add_option("--gaps", sweep.gaps, "Ground-truth CSV 'model_id,gap[,group]'")->required();
    sweep_cmd->add_option("--config", sweep.configs,
                          "'batches,batch_size,p_lo,p_hi' (repeatable; default: 100,128,0.01,0.3  100,128,0.01,0.5  "
                          "150,128,0.01,0.5  150,128,0.01,0.3  100,96,0.01,0.3)");
    sweep_cmd->add_option("--scales", sweep.scales, "Number of log-spaced radii")->capture_default_str();
    sweep.mixup.add_to(sweep_cmd);
    sweep_cmd->add_option("--seed", sweep.seed, "Random seed")->required();
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores; env FRACDIM_THREADS)");
    sweep_cmd->add_option("--records-out", sweep.records_out, "Write records CSV 'model_id,measure,gap,group'");
    sweep_cmd->add_flag("--pretty", sweep.pretty, "Print the aligned score table instead of JSON");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score records by conditional mutual information");
    eval_cmd->add_option("--records", eval.records, "Records CSV 'model_id,measure,gap,group'")->required();
    eval_cmd->add_flag("--pretty", eval.pretty, "Human-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kFlags;
    }

    try {
        if (*synth_cmd) return run_synth(synth, log);
        if (*dim_cmd) return run_dim(dim, log);
        if (*measure_cmd) return run_measure(measure, log);
        if (*sweep_cmd) return run_sweep_cmd(sweep, log);
        if (*eval_cmd) return run_eval(eval, log);
    } catch (const FlagError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFlags;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kFlags;
}
