#include "ssgn/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ssgn/checkpoint.hpp"
#include "ssgn/error.hpp"
#include "ssgn/gradient_ops.hpp"
#include "ssgn/metrics.hpp"
#include "ssgn/noise_sim.hpp"
#include "ssgn/training.hpp"

namespace ssgn {

namespace {

SsgnInput<float> stack_to_input(const GradientStack& stack) {
    const int h = stack.y.rows, w = stack.y.cols;
    const int K = int(stack.g_z.size());
    SsgnInput<float> in{Tensor4<float>(1, 1, h, w), Tensor4<float>(1, 2, h, w),
                        Tensor4<float>(1, K, h, w)};
    auto fill = [](const Band& b, float* dst) {
        for (std::size_t i = 0; i < b.data.size(); ++i) dst[i] = float(b.data[i]);
    };
    fill(stack.y, in.y.plane(0, 0));
    fill(stack.g_x, in.gxy.plane(0, 0));
    fill(stack.g_y, in.gxy.plane(0, 1));
    for (int j = 0; j < K; ++j) fill(stack.g_z[std::size_t(j)], in.gz.plane(0, j));
    return in;
}

HsiCube load_normalized(const std::string& path) {
    HsiCube cube = load_cube(path);
    return cube.norm ? cube : normalize_per_band(cube);
}

// Band counts of the simulated cases scale with the band count; the ratios
// reproduce the reference counts (10 striped, 20 dead of 191 bands).
int scaled_band_count(int bands, double per191) {
    return std::max(1, int(std::llround(double(bands) * per191 / 191.0)));
}

NoiseSpec case_preset(int case_id, int bands) {
    NoiseSpec spec;
    switch (case_id) {
        case 1:
            spec.case_id = NoiseCase::Gaussian;
            break;
        case 2:
            spec.case_id = NoiseCase::Stripe;
            spec.stripe_band_count = scaled_band_count(bands, 10.0);
            break;
        case 3:
            spec.case_id = NoiseCase::GaussianStripe;
            spec.stripe_band_count = scaled_band_count(bands, 10.0);
            break;
        case 4:
            spec.case_id = NoiseCase::GaussianDeadline;
            spec.deadline_band_count = scaled_band_count(bands, 20.0);
            break;
        case 5:
            spec.case_id = NoiseCase::Mixture;
            spec.stripe_band_count = scaled_band_count(bands, 10.0);
            spec.deadline_band_count = scaled_band_count(bands, 20.0);
            break;
        default:
            fail("unknown case " + std::to_string(case_id));
    }
    return spec;
}

} // namespace

HsiCube denoise_cube(const HsiCube& normalized, const SsgnModel<float>& model) {
    require(normalized.norm.has_value(), "denoise_cube: cube must be normalized");
    const int K = model.arch.K;
    require(K < normalized.bands,
            "denoise_cube: checkpoint window K must be smaller than the band count");

    HsiCube out = normalized;
    for (int k = 0; k < normalized.bands; ++k) {
        GradientStack stack = build_gradient_stack(normalized, k, K);
        SsgnInput<float> in = stack_to_input(stack);
        SsgnOutput<float> net = forward(model, in);
        Band res(normalized.rows, normalized.cols);
        const float* res_p = net.res.plane(0, 0);
        for (std::size_t i = 0; i < res.data.size(); ++i) res.data[i] = res_p[i];
        Band denoised = reconstruct(stack.y, res);
        std::copy(denoised.data.begin(), denoised.data.end(), out.band(k).begin());
    }
    return out;
}

namespace cli {

void cmd_simulate(const SimulateArgs& args) {
    HsiCube normalized = load_normalized(args.input);
    NoiseSpec spec = case_preset(args.case_id, normalized.bands);
    spec.seed = args.seed;
    spec.sigma_lo = args.sigma_lo;
    spec.sigma_hi = args.sigma_hi;
    if (args.snr_db) spec.target_snr_db = args.snr_db;
    require(args.case_id != 5 || args.snr_db.has_value(),
            "case 5 requires a target --snr");

    SimulateResult result = simulate_case(normalized, spec);
    save_cube(result.noisy, args.output);
    std::ofstream manifest(args.output + ".manifest");
    if (!manifest) fail("cannot write manifest: " + args.output + ".manifest");
    manifest << render_manifest(result.manifest);
    std::cout << "measured_snr_db " << result.manifest.measured_snr_db << "\n";
}

void cmd_train(const TrainArgs& args) {
    TrainConfig cfg = load_train_config(args.config);

    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(args.clean_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".hsic")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    require(!paths.empty(), "no .hsic cubes found in " + args.clean_dir);

    std::vector<HsiCube> cubes;
    cubes.reserve(paths.size());
    for (const auto& p : paths) cubes.push_back(load_normalized(p.string()));

    TrainResult result = train(cubes, cfg);
    save_model(result.model, args.out);

    std::ofstream log(args.out + ".log");
    if (!log) fail("cannot write loss log: " + args.out + ".log");
    log.precision(10);
    for (const EpochLog& e : result.epoch_log)
        log << "epoch " << e.epoch << " lr " << e.lr << " loss " << e.mean_loss
            << "\n";
}

void cmd_denoise(const DenoiseJob& job) {
    Checkpoint ck = load_model(job.model_path);
    if (job.k_override && *job.k_override != ck.model.arch.K)
        fail("requested K " + std::to_string(*job.k_override) +
             " does not match the checkpoint K " + std::to_string(ck.model.arch.K));

    HsiCube normalized = load_normalized(job.input_path);
    HsiCube denoised = denoise_cube(normalized, ck.model);
    save_cube(denormalize_per_band(denoised), job.output_path);
}

void cmd_evaluate(const EvaluateArgs& args) {
    HsiCube ref = load_normalized(args.ref);
    HsiCube test = load_normalized(args.test);
    MetricsReport report = evaluate(ref, test);
    std::ofstream out(args.report);
    if (!out) fail("cannot write report: " + args.report);
    out << render_report(report);
}

int run(int argc, const char* const* argv) {
    CLI::App app{"SSGN hyperspectral mixed-noise denoising toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "apply simulated mixed noise");
    simulate->add_option("--input", sim.input, "clean HSIC cube")->required();
    simulate->add_option("--case", sim.case_id, "noise case 1-5")
        ->required()
        ->check(CLI::Range(1, 5));
    double snr_value = 0.0;
    auto* snr_opt = simulate->add_option("--snr", snr_value, "target SNR in dB");
    simulate->add_option("--seed", sim.seed, "simulation seed");
    simulate->add_option("--sigma-lo", sim.sigma_lo, "Gaussian sigma range low");
    simulate->add_option("--sigma-hi", sim.sigma_hi, "Gaussian sigma range high");
    simulate->add_option("--output", sim.output, "noisy HSIC cube")->required();

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "train a denoising model");
    train_cmd->add_option("--clean-dir", tr.clean_dir, "directory of clean .hsic cubes")
        ->required();
    train_cmd->add_option("--config", tr.config, "training config file")->required();
    train_cmd->add_option("--out", tr.out, "output checkpoint path")->required();

    DenoiseJob job;
    auto* denoise = app.add_subcommand("denoise", "denoise a cube with a checkpoint");
    denoise->add_option("--input", job.input_path, "noisy HSIC cube")->required();
    denoise->add_option("--model", job.model_path, "SSGN checkpoint")->required();
    denoise->add_option("--output", job.output_path, "denoised HSIC cube")->required();

    EvaluateArgs ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "compare two cubes");
    evaluate_cmd->add_option("--ref", ev.ref, "reference HSIC cube")->required();
    evaluate_cmd->add_option("--test", ev.test, "test HSIC cube")->required();
    evaluate_cmd->add_option("--report", ev.report, "output report path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (simulate->parsed()) {
            if (snr_opt->count() > 0) sim.snr_db = snr_value;
            cmd_simulate(sim);
        } else if (train_cmd->parsed()) {
            cmd_train(tr);
        } else if (denoise->parsed()) {
            cmd_denoise(job);
        } else if (evaluate_cmd->parsed()) {
            cmd_evaluate(ev);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}

} // namespace cli
} // namespace ssgn
