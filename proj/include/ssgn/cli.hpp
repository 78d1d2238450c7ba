#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ssgn/hsi_cube.hpp"
#include "ssgn/model.hpp"

namespace ssgn {

struct DenoiseJob {
    std::string input_path;
    std::string model_path;
    std::string output_path;
    // Must match the checkpoint's K when set; the checkpoint format stores a
    // single architecture, so this only guards against mismatched requests.
    std::optional<int> k_override;
};

// Band-by-band traversal: build the gradient stack for each band, run one
// whole-band forward pass (fully convolutional, no patching) and subtract
// the predicted residual. Input and output are in the normalized domain.
HsiCube denoise_cube(const HsiCube& normalized, const SsgnModel<float>& model);

namespace cli {

struct SimulateArgs {
    std::string input;
    std::string output;
    int case_id = 1; // 1..5
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
    double sigma_lo = 0.04; // Gaussian intensity range, normalized units
    double sigma_hi = 0.16;
};

struct TrainArgs {
    std::string clean_dir;
    std::string config;
    std::string out;
};

struct EvaluateArgs {
    std::string ref;
    std::string test;
    std::string report;
};

void cmd_simulate(const SimulateArgs& args);
void cmd_train(const TrainArgs& args);
void cmd_denoise(const DenoiseJob& job);
void cmd_evaluate(const EvaluateArgs& args);

// Full argv entry point; prints a single-line diagnostic and returns
// nonzero on failure.
int run(int argc, const char* const* argv);

} // namespace cli
} // namespace ssgn
