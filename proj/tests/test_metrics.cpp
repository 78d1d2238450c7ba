#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ssgn/metrics.hpp"
#include "ssgn/noise_sim.hpp"
#include "metric_oracles.hpp"
#include "test_support.hpp"

using namespace ssgn;
using namespace ssgn::test;

namespace {

Band random_band(int rows, int cols, std::uint64_t seed) {
    Band b(rows, cols);
    Rng rng(seed);
    for (double& v : b.data) v = rng.uniform();
    return b;
}

} // namespace

TEST_CASE("psnr") {
    SUBCASE("identical bands cap at 99 dB") {
        Band b = random_band(8, 8, 1);
        CHECK(psnr(b, b) == 99.0);
    }
    SUBCASE("uniform 0.5 vs 0.6 is exactly 20 dB") {
        Band a(16, 16), b(16, 16);
        for (double& v : a.data) v = 0.5;
        for (double& v : b.data) v = 0.6;
        CHECK(std::fabs(psnr(a, b) - 20.0) <= 1e-9);
    }
    SUBCASE("matches the direct formula on random bands") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            Band a = random_band(12, 9, seed * 2 + 1);
            Band b = random_band(12, 9, seed * 2 + 2);
            CHECK(std::fabs(psnr(a, b) - oracle_psnr(a, b)) <= 1e-9);
        }
    }
    SUBCASE("dimension mismatch rejected") {
        Band a(4, 4), b(4, 5);
        CHECK_THROWS_AS(psnr(a, b), Error);
    }
}

TEST_CASE("ssim") {
    SUBCASE("identical bands give exactly 1") {
        Band b = random_band(16, 16, 2);
        CHECK(ssim(b, b) == 1.0);
    }
    SUBCASE("constant bands match the closed form") {
        const double c = 0.4, d = 0.2;
        Band a(12, 12), b(12, 12);
        for (double& v : a.data) v = c;
        for (double& v : b.data) v = c + d;
        double expect = (2 * c * (c + d) + 1e-4) / (c * c + (c + d) * (c + d) + 1e-4);
        CHECK(ssim(a, b) == doctest::Approx(expect).epsilon(1e-9));
    }
    SUBCASE("matches the direct 2-D window oracle") {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            Band a = random_band(32, 32, 100 + seed);
            Band b = random_band(32, 32, 200 + seed);
            CHECK(std::fabs(ssim(a, b) - oracle_ssim(a, b)) <= 1e-6);
        }
    }
    SUBCASE("symmetric") {
        Band a = random_band(20, 24, 5);
        Band b = random_band(20, 24, 6);
        CHECK(std::fabs(ssim(a, b) - ssim(b, a)) <= 1e-9);
    }
    SUBCASE("band smaller than the window rejected") {
        Band a(10, 12), b(10, 12);
        CHECK_THROWS_WITH_AS(ssim(a, b), doctest::Contains("window"), Error);
    }
}

TEST_CASE("msa") {
    SUBCASE("identical cubes give 0 degrees") {
        HsiCube cube = random_cube(6, 6, 4, 3);
        CHECK(msa(cube, cube) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("orthogonal spectra give exactly 90 degrees") {
        HsiCube ref(4, 4, 2), test(4, 4, 2);
        for (auto& v : ref.band(0)) v = 1.0;
        for (auto& v : test.band(1)) v = 1.0;
        CHECK(std::fabs(msa(ref, test) - 90.0) <= 1e-9);
    }
    SUBCASE("matches the direct formula") {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            HsiCube a = random_cube(7, 8, 6, 300 + seed);
            HsiCube b = random_cube(7, 8, 6, 400 + seed);
            CHECK(std::fabs(msa(a, b) - oracle_msa(a, b)) <= 1e-6);
        }
    }
    SUBCASE("scaling the test spectra leaves the angle unchanged") {
        HsiCube a = random_cube(6, 6, 5, 7);
        HsiCube b = random_cube(6, 6, 5, 8);
        HsiCube b3 = b;
        for (double& v : b3.data) v *= 3.0;
        CHECK(std::fabs(msa(a, b) - msa(a, b3)) <= 1e-9);
    }
    SUBCASE("zero spectra contribute zero angle") {
        HsiCube a = random_cube(2, 2, 3, 9);
        HsiCube b = a;
        for (int band = 0; band < 3; ++band) b.at(band, 0, 0) = 0.0;
        // pixel (0,0) contributes 0; all others are identical (angle 0)
        CHECK(msa(a, b) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("band count below 2 rejected") {
        HsiCube a(2, 2, 1), b(2, 2, 1);
        CHECK_THROWS_AS(msa(a, b), Error);
    }
}

TEST_CASE("evaluate") {
    SUBCASE("self-comparison") {
        HsiCube cube = random_cube(16, 16, 3, 11);
        MetricsReport rep = evaluate(cube, cube);
        CHECK(rep.mpsnr == 99.0);
        CHECK(rep.mssim == 1.0);
        CHECK(rep.msa == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("a single degraded band moves the means accordingly") {
        HsiCube ref = random_cube(16, 16, 4, 12);
        HsiCube test = ref;
        for (auto& v : test.band(2)) v = std::min(1.0, v + 0.25);
        MetricsReport rep = evaluate(ref, test);
        for (int b : {0, 1, 3}) {
            CHECK(rep.per_band_psnr[b] == 99.0);
            CHECK(rep.per_band_ssim[b] == 1.0);
        }
        CHECK(rep.per_band_psnr[2] < 99.0);
        CHECK(rep.mpsnr == doctest::Approx((3 * 99.0 + rep.per_band_psnr[2]) / 4.0)
                               .epsilon(1e-12));
    }
    SUBCASE("aggregates are the means of the per-band values") {
        HsiCube ref = random_cube(14, 14, 5, 13);
        HsiCube test = random_cube(14, 14, 5, 14);
        MetricsReport rep = evaluate(ref, test);
        double ps = 0, ss = 0;
        for (int b = 0; b < 5; ++b) {
            ps += rep.per_band_psnr[b];
            ss += rep.per_band_ssim[b];
        }
        CHECK(std::fabs(rep.mpsnr - ps / 5.0) <= 1e-9);
        CHECK(std::fabs(rep.mssim - ss / 5.0) <= 1e-9);
    }
    SUBCASE("PSNR decreases as noise grows, 10 seeds per level") {
        HsiCube ref = random_cube(24, 24, 2, 15);
        double mean_psnr[3] = {0, 0, 0};
        const double sigmas[3] = {0.02, 0.05, 0.1};
        for (int level = 0; level < 3; ++level)
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                HsiCube noisy =
                    add_gaussian(ref, sigmas[level], sigmas[level], seed).noisy;
                mean_psnr[level] += evaluate(ref, noisy).mpsnr / 10.0;
            }
        CHECK(mean_psnr[0] > mean_psnr[1]);
        CHECK(mean_psnr[1] > mean_psnr[2]);
    }
    SUBCASE("report text carries the header and per-band lines") {
        HsiCube cube = random_cube(12, 12, 2, 16);
        std::string text = render_report(evaluate(cube, cube));
        CHECK(text.find("MPSNR") == 0);
        CHECK(text.find("MSSIM") != std::string::npos);
        CHECK(text.find("band 0 psnr") != std::string::npos);
        CHECK(text.find("band 1 psnr") != std::string::npos);
    }
}
