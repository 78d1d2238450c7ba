#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssgn/model.hpp"
#include "ssgn/noise_sim.hpp"

namespace ssgn {

struct TrainConfig {
    double alpha = 0.001;
    double lr0 = 0.001;
    double lr_decay = 0.5;
    int decay_every = 10;
    int epochs = 50;
    int batch_size = 64;
    int patch = 25;
    int stride = 25;
    int K = 24;
    int blocks = 5;
    int c_scale = 10;
    NoiseSpec noise; // template; per-sample seeds are derived from `seed`
    std::uint64_t seed = 1;
    bool augmentation = true;
    bool deterministic_reduction = true;
    // When set, every epoch reuses this epoch's noise realizations
    // (fixed-dataset mode); otherwise noise is re-simulated per epoch.
    std::optional<int> pin_noise_epoch;

    SsgnArch arch() const { return SsgnArch{K, blocks, c_scale}; }
    void validate() const;
};

// Named parameter bundles. The desk profile trains in minutes on a CPU;
// the full profile is the production-scale configuration and is far outside
// desk budgets.
TrainConfig desk_profile();
TrainConfig full_profile();

// Line-oriented "key = value" text; '#' starts a comment. Unknown keys are
// an error (reported with the line number). A `profile` line loads a named
// bundle; later keys override individual fields.
TrainConfig parse_train_config(std::istream& in);
TrainConfig load_train_config(const std::string& path);

// One assembled training batch (all planes cropped to patch x patch).
struct TrainBatch {
    Tensor4<float> y;          // (T, 1, P, P) noisy band
    Tensor4<float> gxy;        // (T, 2, P, P) noisy spatial gradients
    Tensor4<float> gz;         // (T, K, P, P) noisy spectral gradients
    Tensor4<float> res_target; // (T, 1, P, P) Y_k - X_k
    Tensor4<float> phi_target; // (T, K, P, P) clean spectral gradients
};

// Deterministic function of (config.seed, epoch, batch_index): picks cube,
// band, augmentation variant and patch origin per sample, simulates noise
// on the sample's band window, and builds inputs from the noisy data with
// targets from the clean data.
TrainBatch sample_batch(const std::vector<HsiCube>& cubes, const TrainConfig& cfg,
                        int epoch, int batch_index);

// Dataset-derived iteration count: tiled patches across all cubes and bands
// divided by the batch size (at least 1).
int batches_per_epoch(const std::vector<HsiCube>& cubes, const TrainConfig& cfg);

struct EpochLog {
    int epoch = 0;
    double lr = 0.0;
    double mean_loss = 0.0;
};

struct TrainResult {
    SsgnModel<float> model;
    std::vector<EpochLog> epoch_log;
    std::vector<double> batch_losses;
};

TrainResult train(const std::vector<HsiCube>& cubes, const TrainConfig& cfg);

} // namespace ssgn
