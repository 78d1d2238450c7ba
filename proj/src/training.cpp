#include "ssgn/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ssgn/adam.hpp"
#include "ssgn/gradient_ops.hpp"
#include "ssgn/loss.hpp"
#include "ssgn/rng.hpp"

namespace ssgn {

namespace {

constexpr std::uint64_t kTagSample = 0x5350; // sample picks
constexpr std::uint64_t kTagNoise = 0x4e4f;  // per-sample noise streams

constexpr double kAugScales[4] = {0.8, 1.0, 1.2, 1.4};

void copy_patch(const Band& src, int r0, int c0, int patch, float* dst) {
    for (int r = 0; r < patch; ++r)
        for (int c = 0; c < patch; ++c)
            dst[std::size_t(r) * patch + c] = float(src.at(r0 + r, c0 + c));
}

} // namespace

void TrainConfig::validate() const {
    require(alpha >= 0.0 && alpha <= 1.0, "config: alpha must lie in [0, 1]");
    require(lr0 > 0.0, "config: lr0 must be positive");
    require(lr_decay > 0.0 && lr_decay <= 1.0, "config: lr_decay must lie in (0, 1]");
    require(decay_every >= 1, "config: decay_every must be >= 1");
    require(epochs >= 0, "config: epochs must be >= 0");
    require(batch_size >= 1, "config: batch_size must be >= 1");
    require(patch >= 1 && stride >= 1, "config: patch and stride must be >= 1");
    arch().validate();
}

TrainConfig desk_profile() {
    TrainConfig cfg;
    cfg.blocks = 2;
    cfg.c_scale = 4;
    cfg.K = 4;
    cfg.patch = 25;
    cfg.stride = 12;
    cfg.batch_size = 8;
    cfg.epochs = 28;
    cfg.noise.case_id = NoiseCase::GaussianStripe;
    cfg.noise.stripe_band_count = 1;
    return cfg;
}

TrainConfig full_profile() {
    TrainConfig cfg;
    cfg.blocks = 5;
    cfg.c_scale = 10;
    cfg.K = 24;
    cfg.patch = 25;
    cfg.stride = 25;
    cfg.batch_size = 64;
    cfg.epochs = 200;
    cfg.noise.case_id = NoiseCase::Mixture;
    cfg.noise.stripe_band_count = 10;
    cfg.noise.deadline_band_count = 20;
    return cfg;
}

namespace {

bool parse_bool(const std::string& v, int line) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    fail("config line " + std::to_string(line) + ": expected on/off, got '" + v + "'");
}

} // namespace

TrainConfig parse_train_config(std::istream& in) {
    TrainConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string key, eq, value;
        if (!(ls >> key)) continue; // blank line
        if (!(ls >> eq >> value) || eq != "=")
            fail("config line " + std::to_string(lineno) +
                 ": expected 'key = value'");

        try {
            if (key == "profile") {
                if (value == "desk")
                    cfg = desk_profile();
                else if (value == "full")
                    cfg = full_profile();
                else
                    fail("unknown profile '" + value + "'");
            } else if (key == "alpha") cfg.alpha = std::stod(value);
            else if (key == "lr0") cfg.lr0 = std::stod(value);
            else if (key == "lr_decay") cfg.lr_decay = std::stod(value);
            else if (key == "decay_every") cfg.decay_every = std::stoi(value);
            else if (key == "epochs") cfg.epochs = std::stoi(value);
            else if (key == "batch_size") cfg.batch_size = std::stoi(value);
            else if (key == "patch") cfg.patch = std::stoi(value);
            else if (key == "stride") cfg.stride = std::stoi(value);
            else if (key == "K") cfg.K = std::stoi(value);
            else if (key == "blocks") cfg.blocks = std::stoi(value);
            else if (key == "c_scale") cfg.c_scale = std::stoi(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "augmentation") cfg.augmentation = parse_bool(value, lineno);
            else if (key == "deterministic_reduction")
                cfg.deterministic_reduction = parse_bool(value, lineno);
            else if (key == "pin_noise_epoch") cfg.pin_noise_epoch = std::stoi(value);
            else if (key == "noise_case") cfg.noise.case_id = noise_case_from_name(value);
            else if (key == "noise_target_snr_db") cfg.noise.target_snr_db = std::stod(value);
            else if (key == "noise_sigma_lo") cfg.noise.sigma_lo = std::stod(value);
            else if (key == "noise_sigma_hi") cfg.noise.sigma_hi = std::stod(value);
            else if (key == "noise_stripe_bands") cfg.noise.stripe_band_count = std::stoi(value);
            else if (key == "noise_stripe_frac_lo") cfg.noise.stripe_frac_lo = std::stod(value);
            else if (key == "noise_stripe_frac_hi") cfg.noise.stripe_frac_hi = std::stod(value);
            else if (key == "noise_deadline_bands") cfg.noise.deadline_band_count = std::stoi(value);
            else if (key == "noise_deadline_width_min") cfg.noise.deadline_width_min = std::stoi(value);
            else if (key == "noise_deadline_width_max") cfg.noise.deadline_width_max = std::stoi(value);
            else fail("unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            fail("config line " + std::to_string(lineno) + ": bad value '" + value +
                 "' for key '" + key + "'");
        } catch (const Error& e) {
            std::string msg = e.what();
            if (msg.rfind("config line", 0) == 0) throw;
            fail("config line " + std::to_string(lineno) + ": " + msg);
        }
    }
    cfg.validate();
    return cfg;
}

TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file: " + path);
    return parse_train_config(in);
}

TrainBatch sample_batch(const std::vector<HsiCube>& cubes, const TrainConfig& cfg,
                        int epoch, int batch_index) {
    require(!cubes.empty(), "sample_batch: no clean cubes");
    for (const HsiCube& c : cubes)
        require(c.norm.has_value(), "sample_batch: clean cubes must be normalized");

    const int P = cfg.patch;
    const int K = cfg.K;
    TrainBatch batch{
        Tensor4<float>(cfg.batch_size, 1, P, P),
        Tensor4<float>(cfg.batch_size, 2, P, P),
        Tensor4<float>(cfg.batch_size, K, P, P),
        Tensor4<float>(cfg.batch_size, 1, P, P),
        Tensor4<float>(cfg.batch_size, K, P, P),
    };

    for (int i = 0; i < cfg.batch_size; ++i) {
        const std::uint64_t sample_tag =
            std::uint64_t(batch_index) * std::uint64_t(cfg.batch_size) + std::uint64_t(i);
        Rng pick(derive_seed(cfg.seed, kTagSample, std::uint64_t(epoch), sample_tag));

        const HsiCube& cube = cubes[pick.below(cubes.size())];
        int rot = 0;
        double scale = 1.0;
        if (cfg.augmentation) {
            rot = int(pick.below(4));
            scale = kAugScales[pick.below(4)];
        }

        const int k = int(pick.below(std::uint64_t(cube.bands)));
        std::vector<int> window = spectral_window(k, cube.bands, K);

        // Sorted band list {k} + window; augmentation and noise act on these
        // full bands so stripe/dead-line structure spans whole rows/columns.
        std::vector<int> band_ids = window;
        band_ids.insert(std::lower_bound(band_ids.begin(), band_ids.end(), k), k);

        std::vector<Band> aug;
        aug.reserve(band_ids.size());
        for (int b : band_ids)
            aug.push_back(resize_bilinear(rotate90(cube.band_copy(b), rot), scale));

        const int ar = aug.front().rows, ac = aug.front().cols;
        require(P <= ar && P <= ac,
                "sample_batch: patch does not fit inside the augmented band");
        auto origins = patch_origins(ar, ac, P, cfg.stride);
        auto [r0, c0] = origins[pick.below(origins.size())];

        HsiCube sub(ar, ac, int(band_ids.size()));
        std::vector<BandRange> sub_norm;
        for (std::size_t bi = 0; bi < band_ids.size(); ++bi) {
            std::copy(aug[bi].data.begin(), aug[bi].data.end(),
                      sub.band(int(bi)).begin());
            sub_norm.push_back((*cube.norm)[std::size_t(band_ids[bi])]);
        }
        sub.norm = std::move(sub_norm);

        const int epoch_eff = cfg.pin_noise_epoch.value_or(epoch);
        NoiseSpec spec = cfg.noise;
        spec.seed = derive_seed(cfg.seed, kTagNoise, std::uint64_t(epoch_eff), sample_tag);
        spec.stripe_band_count = std::min(spec.stripe_band_count, sub.bands);
        spec.deadline_band_count = std::min(spec.deadline_band_count, sub.bands);
        HsiCube noisy = simulate_case(sub, spec).noisy;

        const int k_local =
            int(std::lower_bound(band_ids.begin(), band_ids.end(), k) - band_ids.begin());
        GradientStack stack = build_gradient_stack(noisy, k_local, K);

        PatchSample sample;
        sample.band_index = k;
        sample.window_band_indices = window;
        sample.noisy_patch = Band(P, P);
        sample.clean_patch = Band(P, P);
        for (int r = 0; r < P; ++r)
            for (int c = 0; c < P; ++c) {
                sample.noisy_patch.at(r, c) = noisy.at(k_local, r0 + r, c0 + c);
                sample.clean_patch.at(r, c) = sub.at(k_local, r0 + r, c0 + c);
            }

        copy_patch(stack.y, r0, c0, P, batch.y.plane(i, 0));
        copy_patch(stack.g_x, r0, c0, P, batch.gxy.plane(i, 0));
        copy_patch(stack.g_y, r0, c0, P, batch.gxy.plane(i, 1));
        for (int j = 0; j < K; ++j)
            copy_patch(stack.g_z[std::size_t(j)], r0, c0, P, batch.gz.plane(i, j));

        // residual target Y_k - X_k straight from the patch pair
        float* res_dst = batch.res_target.plane(i, 0);
        for (std::size_t p = 0; p < sample.noisy_patch.data.size(); ++p)
            res_dst[p] =
                float(sample.noisy_patch.data[p] - sample.clean_patch.data[p]);

        std::vector<Band> phi_t =
            spectral_gradients(sub, k_local, stack.window_band_indices);
        for (int j = 0; j < K; ++j)
            copy_patch(phi_t[std::size_t(j)], r0, c0, P, batch.phi_target.plane(i, j));
    }
    return batch;
}

int batches_per_epoch(const std::vector<HsiCube>& cubes, const TrainConfig& cfg) {
    std::size_t total = 0;
    for (const HsiCube& c : cubes)
        total += patch_origins(c.rows, c.cols, cfg.patch, cfg.stride).size() *
                 std::size_t(c.bands);
    return std::max<int>(1, int(total / std::size_t(cfg.batch_size)));
}

TrainResult train(const std::vector<HsiCube>& cubes, const TrainConfig& cfg) {
    cfg.validate();
    require(!cubes.empty(), "train: no clean cubes");
    for (const HsiCube& c : cubes) {
        require(c.norm.has_value(), "train: clean cubes must be normalized");
        require(cfg.K < c.bands, "train: K must be smaller than every cube's band count");
    }

    TrainResult result;
    result.model = init_model<float>(cfg.arch(), cfg.seed);
    AdamState<float> adam = make_adam_state(result.model);
    const int bpe = batches_per_epoch(cubes, cfg);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = lr_at_epoch(cfg.lr0, cfg.lr_decay, cfg.decay_every, epoch);
        double loss_sum = 0.0;
        for (int b = 0; b < bpe; ++b) {
            TrainBatch batch = sample_batch(cubes, cfg, epoch, b);
            SsgnCache<float> cache;
            SsgnInput<float> in{batch.y, batch.gxy, batch.gz};
            SsgnOutput<float> out = forward(result.model, in, &cache);
            LossResult<float> loss = spatial_spectral_loss(
                out.res, out.phi, batch.res_target, batch.phi_target, cfg.alpha);
            if (!std::isfinite(loss.value))
                fail("train: non-finite loss at epoch " + std::to_string(epoch) +
                     " batch " + std::to_string(b));
            SsgnModel<float> grads = backward(result.model, cache, loss.grad_res,
                                              loss.grad_phi);
            adam_step(result.model, grads, adam, lr);
            loss_sum += loss.value;
            result.batch_losses.push_back(loss.value);
        }
        result.epoch_log.push_back({epoch, lr, loss_sum / double(bpe)});
    }
    return result;
}

} // namespace ssgn
