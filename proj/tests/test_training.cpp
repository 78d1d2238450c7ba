#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ssgn/adam.hpp"
#include "ssgn/grad_check.hpp"
#include "ssgn/loss.hpp"
#include "ssgn/training.hpp"
#include "test_support.hpp"

using namespace ssgn;
using namespace ssgn::test;

namespace {

// quick config for train() tests: tiny cube, tiny model
TrainConfig tiny_config() {
    TrainConfig cfg;
    cfg.K = 2;
    cfg.blocks = 1;
    cfg.c_scale = 2;
    cfg.patch = 8;
    cfg.stride = 8;
    cfg.batch_size = 2;
    cfg.epochs = 1;
    cfg.seed = 3;
    cfg.noise.case_id = NoiseCase::Gaussian;
    cfg.noise.sigma_lo = 0.02;
    cfg.noise.sigma_hi = 0.08;
    return cfg;
}

} // namespace

TEST_CASE("spatial_spectral_loss") {
    Tensor4<float> res = random_tensor<float>(3, 1, 4, 4, 1);
    Tensor4<float> phi = random_tensor<float>(3, 2, 4, 4, 2);

    SUBCASE("perfect predictions give zero loss and gradients") {
        auto out = spatial_spectral_loss(res, phi, res, phi, 0.3);
        CHECK(out.value == 0.0);
        for (float v : out.grad_res.data) CHECK(v == 0.0f);
        for (float v : out.grad_phi.data) CHECK(v == 0.0f);
    }
    SUBCASE("alpha 0 drops the spectral term") {
        Tensor4<float> rt = random_tensor<float>(3, 1, 4, 4, 3);
        Tensor4<float> pt = random_tensor<float>(3, 2, 4, 4, 4);
        auto out = spatial_spectral_loss(res, phi, rt, pt, 0.0);
        CHECK(out.value == doctest::Approx(out.spatial).epsilon(1e-15));
        for (float v : out.grad_phi.data) CHECK(v == 0.0f);
    }
    SUBCASE("unit residual error over a 2x2 patch, T=1, alpha 0 gives 2") {
        Tensor4<float> r(1, 1, 2, 2), rt(1, 1, 2, 2);
        Tensor4<float> p(1, 1, 2, 2), pt(1, 1, 2, 2);
        for (float& v : r.data) v = 1.0f;
        auto out = spatial_spectral_loss(r, p, rt, pt, 0.0);
        CHECK(out.value == 2.0);
        for (float v : out.grad_res.data) CHECK(v == 1.0f);
    }
    SUBCASE("loss is affine in alpha") {
        Tensor4<float> rt = random_tensor<float>(3, 1, 4, 4, 5);
        Tensor4<float> pt = random_tensor<float>(3, 2, 4, 4, 6);
        double v0 = spatial_spectral_loss(res, phi, rt, pt, 0.0).value;
        double v1 = spatial_spectral_loss(res, phi, rt, pt, 1.0).value;
        for (double a : {0.001, 0.25, 0.5, 0.9}) {
            double va = spatial_spectral_loss(res, phi, rt, pt, a).value;
            CHECK(va == doctest::Approx((1 - a) * v0 + a * v1).epsilon(1e-12));
        }
    }
    SUBCASE("non-negative, zero only at exact match") {
        Tensor4<float> rt = res;
        rt.data[5] += 0.25f;
        auto out = spatial_spectral_loss(res, phi, rt, phi, 0.5);
        CHECK(out.value > 0.0);
    }
    SUBCASE("gradients match finite differences at 1e-6") {
        Tensor4<double> r = random_tensor<double>(2, 1, 3, 3, 7);
        Tensor4<double> p = random_tensor<double>(2, 2, 3, 3, 8);
        Tensor4<double> rt = random_tensor<double>(2, 1, 3, 3, 9);
        Tensor4<double> pt = random_tensor<double>(2, 2, 3, 3, 10);
        const double alpha = 0.4;
        auto out = spatial_spectral_loss(r, p, rt, pt, alpha);

        auto f_res = [&](std::span<const double> vals) {
            Tensor4<double> t = r;
            std::copy(vals.begin(), vals.end(), t.data.begin());
            return spatial_spectral_loss(t, p, rt, pt, alpha).value;
        };
        CHECK(check_gradients(f_res, std::span<double>(r.data),
                              std::span<const double>(out.grad_res.data), 1e-5, 1e-6)
                  .passed);
        auto f_phi = [&](std::span<const double> vals) {
            Tensor4<double> t = p;
            std::copy(vals.begin(), vals.end(), t.data.begin());
            return spatial_spectral_loss(r, t, rt, pt, alpha).value;
        };
        CHECK(check_gradients(f_phi, std::span<double>(p.data),
                              std::span<const double>(out.grad_phi.data), 1e-5, 1e-6)
                  .passed);
    }
    SUBCASE("alpha outside [0,1] rejected") {
        CHECK_THROWS_AS(spatial_spectral_loss(res, phi, res, phi, 1.5), Error);
    }
}

TEST_CASE("adam_step") {
    SUBCASE("zero gradient leaves parameters unchanged") {
        std::vector<double> p{1.0, -2.0}, g{0.0, 0.0}, m{0.0, 0.0}, v{0.0, 0.0};
        adam_step_flat<double>(p, g, m, v, 1, 0.1);
        CHECK(p[0] == 1.0);
        CHECK(p[1] == -2.0);
    }
    SUBCASE("first step moves by about lr, sign of the gradient") {
        for (double g0 : {3.0, -0.5, 1e-3}) {
            std::vector<double> p{0.0}, g{g0}, m{0.0}, v{0.0};
            adam_step_flat<double>(p, g, m, v, 1, 0.01);
            CHECK(p[0] == doctest::Approx(-0.01 * (g0 > 0 ? 1.0 : -1.0)).epsilon(1e-6));
        }
    }
    SUBCASE("gradient scaling barely changes the first update") {
        std::vector<double> p1{0.0}, g1{0.5}, m1{0.0}, v1{0.0};
        std::vector<double> p2{0.0}, g2{500.0}, m2{0.0}, v2{0.0};
        adam_step_flat<double>(p1, g1, m1, v1, 1, 0.01);
        adam_step_flat<double>(p2, g2, m2, v2, 1, 0.01);
        CHECK(std::fabs(p1[0] - p2[0]) < 1e-6);
    }
    SUBCASE("100 steps on f(w) = w^2/2 converge from w = 1") {
        double w = 1.0;
        std::vector<double> m{0.0}, v{0.0};
        std::vector<double> history{w};
        for (int t = 1; t <= 100; ++t) {
            std::vector<double> p{w}, g{w}; // f'(w) = w
            adam_step_flat<double>(p, g, m, v, t, 0.1);
            w = p[0];
            history.push_back(w);
        }
        CHECK(std::fabs(w) < 0.1);
        // simulation-derived behavior: |w| shrinks monotonically until the
        // first zero crossing (step 11), then oscillates with a decaying
        // envelope
        for (std::size_t i = 0; i < 11; ++i)
            CHECK(std::fabs(history[i + 1]) < std::fabs(history[i]));
        auto envelope = [&](std::size_t lo, std::size_t hi) {
            double peak = 0.0;
            for (std::size_t i = lo; i < hi; ++i)
                peak = std::max(peak, std::fabs(history[i]));
            return peak;
        };
        CHECK(envelope(40, 70) < envelope(10, 40));
        CHECK(envelope(70, 101) < envelope(40, 70));

        // independent scalar Adam simulation reproduces the trajectory
        double ws = 1.0, ms = 0.0, vs = 0.0;
        for (int t = 1; t <= 100; ++t) {
            double g = ws;
            ms = 0.9 * ms + 0.1 * g;
            vs = 0.999 * vs + 0.001 * g * g;
            double mhat = ms / (1.0 - std::pow(0.9, t));
            double vhat = vs / (1.0 - std::pow(0.999, t));
            ws -= 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
        }
        CHECK(w == doctest::Approx(ws).epsilon(1e-12));
    }
    SUBCASE("non-finite gradients abort") {
        std::vector<double> p{0.0}, g{std::nan("")}, m{0.0}, v{0.0};
        CHECK_THROWS_WITH_AS(
            (adam_step_flat<double>(p, g, m, v, 1, 0.1)),
            doctest::Contains("non-finite"), Error);
    }
}

TEST_CASE("lr_at_epoch") {
    CHECK(lr_at_epoch(0.001, 0.5, 10, 0) == 0.001);
    CHECK(lr_at_epoch(0.001, 0.5, 10, 10) == doctest::Approx(0.0005).epsilon(1e-15));
    CHECK(lr_at_epoch(0.001, 0.5, 10, 25) == doctest::Approx(0.00025).epsilon(1e-15));
    SUBCASE("non-increasing in epoch") {
        double prev = lr_at_epoch(0.001, 0.5, 10, 0);
        for (int e = 1; e < 60; ++e) {
            double cur = lr_at_epoch(0.001, 0.5, 10, e);
            CHECK(cur <= prev);
            prev = cur;
        }
    }
}

TEST_CASE("sample_batch") {
    std::vector<HsiCube> cubes{random_normalized_cube(100, 100, 16, 55)};
    TrainConfig cfg;
    cfg.K = 4;
    cfg.blocks = 2;
    cfg.c_scale = 2;
    cfg.patch = 25;
    cfg.stride = 25;
    cfg.batch_size = 8;
    cfg.seed = 9;
    cfg.noise.case_id = NoiseCase::GaussianStripe;
    cfg.noise.stripe_band_count = 1;

    SUBCASE("shape contract: 8 stacks of 25x25 with K gradient planes") {
        TrainBatch batch = sample_batch(cubes, cfg, 0, 0);
        CHECK(batch.y.n == 8);
        CHECK(batch.y.c == 1);
        CHECK(batch.y.h == 25);
        CHECK(batch.y.w == 25);
        CHECK(batch.gxy.c == 2);
        CHECK(batch.gz.c == 4);
        CHECK(batch.phi_target.c == 4);
        CHECK(batch.res_target.c == 1);
    }
    SUBCASE("same (seed, epoch, index) reproduces bits, augmentation off") {
        cfg.augmentation = false;
        TrainBatch a = sample_batch(cubes, cfg, 2, 5);
        TrainBatch b = sample_batch(cubes, cfg, 2, 5);
        CHECK(a.y.data == b.y.data);
        CHECK(a.gxy.data == b.gxy.data);
        CHECK(a.gz.data == b.gz.data);
        CHECK(a.res_target.data == b.res_target.data);
        CHECK(a.phi_target.data == b.phi_target.data);
    }
    SUBCASE("same triple reproduces bits with augmentation on") {
        TrainBatch a = sample_batch(cubes, cfg, 1, 3);
        TrainBatch b = sample_batch(cubes, cfg, 1, 3);
        CHECK(a.y.data == b.y.data);
        CHECK(a.res_target.data == b.res_target.data);
        TrainBatch c = sample_batch(cubes, cfg, 1, 4);
        CHECK(a.y.data != c.y.data);
    }
    SUBCASE("zero-intensity noise gives zero residual targets") {
        cfg.noise.case_id = NoiseCase::Gaussian;
        cfg.noise.sigma_lo = cfg.noise.sigma_hi = 0.0;
        TrainBatch batch = sample_batch(cubes, cfg, 0, 0);
        for (float v : batch.res_target.data) CHECK(v == 0.0f);
    }
    SUBCASE("pinned noise epoch reuses realizations across epochs") {
        cfg.augmentation = false;
        cfg.pin_noise_epoch = 0;
        TrainBatch a = sample_batch(cubes, cfg, 0, 1);
        TrainBatch b = sample_batch(cubes, cfg, 5, 1);
        // same patch picks only when the sample stream also matches; compare
        // noise by re-deriving the same sample under a different epoch
        CHECK(a.res_target.same_shape(b.res_target));
    }
}

TEST_CASE("config parsing") {
    SUBCASE("round trip of explicit keys") {
        std::istringstream in(
            "# comment line\n"
            "profile = desk\n"
            "alpha = 0.25\n"
            "epochs = 3\n"
            "noise_case = mixture\n"
            "noise_stripe_bands = 2\n"
            "seed = 77\n"
            "augmentation = off\n");
        TrainConfig cfg = parse_train_config(in);
        CHECK(cfg.blocks == 2); // from the desk profile
        CHECK(cfg.c_scale == 4);
        CHECK(cfg.alpha == 0.25);
        CHECK(cfg.epochs == 3);
        CHECK(cfg.noise.case_id == NoiseCase::Mixture);
        CHECK(cfg.noise.stripe_band_count == 2);
        CHECK(cfg.seed == 77);
        CHECK_FALSE(cfg.augmentation);
    }
    SUBCASE("profiles carry the documented bundles") {
        TrainConfig desk = desk_profile();
        CHECK(desk.blocks == 2);
        CHECK(desk.c_scale == 4);
        CHECK(desk.K == 4);
        CHECK(desk.patch == 25);
        TrainConfig full = full_profile();
        CHECK(full.blocks == 5);
        CHECK(full.c_scale == 10);
        CHECK(full.K == 24);
        CHECK(full.epochs == 200);
        CHECK(full.stride == 25);
    }
    SUBCASE("unknown keys fail with the line number") {
        std::istringstream in("alpha = 0.5\nbogus_key = 1\n");
        CHECK_THROWS_WITH_AS(parse_train_config(in), doctest::Contains("line 2"),
                             Error);
    }
    SUBCASE("bad values fail with the line number") {
        std::istringstream in("epochs = banana\n");
        CHECK_THROWS_WITH_AS(parse_train_config(in), doctest::Contains("line 1"),
                             Error);
    }
    SUBCASE("malformed lines fail") {
        std::istringstream in("alpha 0.5\n");
        CHECK_THROWS_WITH_AS(parse_train_config(in),
                             doctest::Contains("key = value"), Error);
    }
}

TEST_CASE("train") {
    std::vector<HsiCube> cubes{random_normalized_cube(16, 16, 6, 5)};

    SUBCASE("zero epochs returns the seeded initialization") {
        TrainConfig cfg = tiny_config();
        cfg.epochs = 0;
        TrainResult r = train(cubes, cfg);
        auto init = init_model<float>(cfg.arch(), cfg.seed);
        auto a = param_spans(r.model), b = param_spans(init);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a[i].size(); ++j) CHECK(a[i][j] == b[i][j]);
        CHECK(r.epoch_log.empty());
    }
    SUBCASE("two identical runs give bit-identical parameters") {
        TrainConfig cfg = tiny_config();
        cfg.epochs = 2;
        TrainResult r1 = train(cubes, cfg);
        TrainResult r2 = train(cubes, cfg);
        auto a = param_spans(r1.model), b = param_spans(r2.model);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a[i].size(); ++j) CHECK(a[i][j] == b[i][j]);
        CHECK(r1.batch_losses == r2.batch_losses);
    }
    SUBCASE("logs one entry per epoch with the scheduled lr") {
        TrainConfig cfg = tiny_config();
        cfg.epochs = 3;
        cfg.decay_every = 2;
        TrainResult r = train(cubes, cfg);
        REQUIRE(r.epoch_log.size() == 3);
        CHECK(r.epoch_log[0].lr == cfg.lr0);
        CHECK(r.epoch_log[2].lr == doctest::Approx(cfg.lr0 * 0.5));
        for (const EpochLog& e : r.epoch_log) CHECK(std::isfinite(e.mean_loss));
        CHECK(int(r.batch_losses.size()) == 3 * batches_per_epoch(cubes, cfg));
    }
    SUBCASE("unnormalized cubes rejected") {
        std::vector<HsiCube> raw{random_cube(16, 16, 6, 5)};
        CHECK_THROWS_AS(train(raw, tiny_config()), Error);
    }
}
