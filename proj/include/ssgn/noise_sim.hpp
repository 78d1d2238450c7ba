#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssgn/hsi_cube.hpp"

namespace ssgn {

enum class NoiseCase {
    Gaussian,         // case 1: dense noise on every band
    Stripe,           // case 2: stripes on a subset of bands
    GaussianStripe,   // case 3
    GaussianDeadline, // case 4
    Mixture,          // case 5: stripes + dead lines + Gaussian at a target SNR
};

const char* noise_case_name(NoiseCase c);
NoiseCase noise_case_from_name(const std::string& name);

struct NoiseSpec {
    NoiseCase case_id = NoiseCase::Gaussian;
    std::optional<double> target_snr_db;
    double sigma_lo = 0.04; // normalized units
    double sigma_hi = 0.16;
    int stripe_band_count = 0;
    double stripe_frac_lo = 0.05;
    double stripe_frac_hi = 0.30;
    int deadline_band_count = 0;
    int deadline_width_min = 1;
    int deadline_width_max = 3;
    std::uint64_t seed = 0;

    bool has_gaussian() const { return case_id != NoiseCase::Stripe; }
    bool has_stripes() const {
        return case_id == NoiseCase::Stripe || case_id == NoiseCase::GaussianStripe ||
               case_id == NoiseCase::Mixture;
    }
    bool has_deadlines() const {
        return case_id == NoiseCase::GaussianDeadline || case_id == NoiseCase::Mixture;
    }
};

struct StripeRecord {
    int band = 0;
    double mean = 0.0;            // amplitude added/subtracted
    std::vector<int> add_rows;    // sorted
    std::vector<int> sub_rows;    // sorted
};

struct DeadlineRecord {
    int band = 0;
    int col = 0;
    int width = 0;
};

// Everything needed to account for (and re-apply) the sparse component and
// to audit the dense component of one simulation run.
struct NoiseManifest {
    NoiseCase case_id = NoiseCase::Gaussian;
    std::uint64_t seed = 0;
    std::optional<double> target_snr_db;
    double measured_snr_db = 0.0;
    double sigma_scale = 1.0;          // global Gaussian calibration factor
    std::vector<double> sigmas;        // per band, after calibration; empty if no Gaussian
    std::vector<StripeRecord> stripes;
    std::vector<DeadlineRecord> deadlines;
};

struct GaussianResult {
    HsiCube noisy;
    std::vector<double> sigmas;
};

struct StripeResult {
    HsiCube noisy;
    std::vector<StripeRecord> records;
};

struct DeadlineResult {
    HsiCube noisy;
    std::vector<DeadlineRecord> records;
};

// Per band b: sigma_b ~ U[lo, hi] from a (seed, band)-derived stream, then
// i.i.d. zero-mean Gaussian noise with std sigma_b. No clipping.
GaussianResult add_gaussian(const HsiCube& cube, double sigma_lo, double sigma_hi,
                            std::uint64_t seed);

// Stripe a seeded subset of bands: a drawn fraction of rows per band, half
// offset by +mean(band), half by -mean(band) (odd counts favor the + half).
StripeResult add_stripes(const HsiCube& cube, int band_count, double frac_lo,
                         double frac_hi, std::uint64_t seed);

// Zero out 1-3 column runs per selected band.
DeadlineResult add_dead_lines(const HsiCube& cube, int band_count, int width_min,
                              int width_max, std::uint64_t seed);

// 10*log10(sum clean^2 / sum (noisy-clean)^2) over the whole cube, capped
// to [-99, 99]; identical cubes report the 99 dB cap.
double measure_snr(const HsiCube& clean, const HsiCube& noisy);

struct SimulateResult {
    HsiCube noisy;
    NoiseManifest manifest;
};

// Applies stripes, then dead lines, then Gaussian noise as requested by the
// case. With a target SNR the Gaussian component is rescaled by one global
// factor (bisection on the noise power) to land within +-0.5 dB.
SimulateResult simulate_case(const HsiCube& cube, const NoiseSpec& spec);

// Line-oriented manifest text (keys: case, seed, target_snr_db,
// measured_snr_db, sigma_scale, sigma, stripe, deadline).
std::string render_manifest(const NoiseManifest& m);

} // namespace ssgn
