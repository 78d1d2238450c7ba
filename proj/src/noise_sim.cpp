#include "ssgn/noise_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ssgn/error.hpp"
#include "ssgn/rng.hpp"

namespace ssgn {

namespace {

// Stream tags: sparse-noise draws must not depend on the Gaussian settings,
// so each component derives its own sub-streams from the master seed.
constexpr std::uint64_t kTagGauss = 0x6761;
constexpr std::uint64_t kTagStripe = 0x7374;
constexpr std::uint64_t kTagDeadline = 0x646c;

struct GaussField {
    std::vector<double> sigmas; // per band
    std::vector<double> values; // sigma_b * standard normal, cube-sized
};

GaussField make_gaussian_field(const HsiCube& cube, double sigma_lo,
                               double sigma_hi, std::uint64_t seed) {
    require(sigma_lo >= 0.0 && sigma_hi >= sigma_lo,
            "gaussian sigma range must satisfy 0 <= low <= high");
    GaussField field;
    field.sigmas.resize(cube.bands);
    field.values.resize(cube.size());
    const std::size_t bsz = cube.band_size();
    for (int b = 0; b < cube.bands; ++b) {
        Rng rng(derive_seed(seed, kTagGauss, std::uint64_t(b)));
        double sigma = rng.uniform(sigma_lo, sigma_hi);
        field.sigmas[b] = sigma;
        double* dst = field.values.data() + std::size_t(b) * bsz;
        for (std::size_t i = 0; i < bsz; ++i) dst[i] = sigma * rng.normal();
    }
    return field;
}

double band_mean(const HsiCube& cube, int b) {
    auto v = cube.band(b);
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

} // namespace

const char* noise_case_name(NoiseCase c) {
    switch (c) {
        case NoiseCase::Gaussian: return "gaussian";
        case NoiseCase::Stripe: return "stripe";
        case NoiseCase::GaussianStripe: return "gaussian_stripe";
        case NoiseCase::GaussianDeadline: return "gaussian_deadline";
        case NoiseCase::Mixture: return "mixture";
    }
    return "unknown";
}

NoiseCase noise_case_from_name(const std::string& name) {
    if (name == "gaussian") return NoiseCase::Gaussian;
    if (name == "stripe") return NoiseCase::Stripe;
    if (name == "gaussian_stripe") return NoiseCase::GaussianStripe;
    if (name == "gaussian_deadline") return NoiseCase::GaussianDeadline;
    if (name == "mixture") return NoiseCase::Mixture;
    fail("unknown noise case: " + name);
}

GaussianResult add_gaussian(const HsiCube& cube, double sigma_lo, double sigma_hi,
                            std::uint64_t seed) {
    GaussField field = make_gaussian_field(cube, sigma_lo, sigma_hi, seed);
    GaussianResult out{cube, std::move(field.sigmas)};
    for (std::size_t i = 0; i < out.noisy.data.size(); ++i)
        out.noisy.data[i] += field.values[i];
    return out;
}

StripeResult add_stripes(const HsiCube& cube, int band_count, double frac_lo,
                         double frac_hi, std::uint64_t seed) {
    require(band_count >= 0 && band_count <= cube.bands,
            "add_stripes: band_count exceeds the band count");
    require(frac_lo > 0.0 && frac_hi < 1.0 && frac_lo <= frac_hi,
            "add_stripes: row fraction range must lie inside (0, 1)");

    StripeResult out{cube, {}};
    Rng select(derive_seed(seed, kTagStripe, 0));
    std::vector<int> bands = select.sample_distinct(cube.bands, band_count);
    std::sort(bands.begin(), bands.end());

    for (int b : bands) {
        Rng rng(derive_seed(seed, kTagStripe, 1, std::uint64_t(b)));
        double frac = rng.uniform(frac_lo, frac_hi);
        int count = std::clamp(int(std::llround(frac * cube.rows)), 1, cube.rows);
        std::vector<int> rows = rng.sample_distinct(cube.rows, count);

        double mean = band_mean(cube, b);
        int add_count = (count + 1) / 2; // odd counts favor the additive half
        StripeRecord rec;
        rec.band = b;
        rec.mean = mean;
        for (int i = 0; i < count; ++i) {
            int r = rows[i];
            double delta = (i < add_count) ? mean : -mean;
            for (int c = 0; c < cube.cols; ++c) out.noisy.at(b, r, c) += delta;
            (i < add_count ? rec.add_rows : rec.sub_rows).push_back(r);
        }
        std::sort(rec.add_rows.begin(), rec.add_rows.end());
        std::sort(rec.sub_rows.begin(), rec.sub_rows.end());
        out.records.push_back(std::move(rec));
    }
    return out;
}

DeadlineResult add_dead_lines(const HsiCube& cube, int band_count, int width_min,
                              int width_max, std::uint64_t seed) {
    require(band_count >= 0 && band_count <= cube.bands,
            "add_dead_lines: band_count exceeds the band count");
    require(width_min >= 1 && width_min <= width_max,
            "add_dead_lines: invalid width range");
    require(width_max < cube.cols,
            "add_dead_lines: dead-line width must be smaller than the column count");

    DeadlineResult out{cube, {}};
    Rng select(derive_seed(seed, kTagDeadline, 0));
    std::vector<int> bands = select.sample_distinct(cube.bands, band_count);
    std::sort(bands.begin(), bands.end());

    for (int b : bands) {
        Rng rng(derive_seed(seed, kTagDeadline, 1, std::uint64_t(b)));
        int events = 1 + int(rng.below(3));
        for (int e = 0; e < events; ++e) {
            int width = width_min + int(rng.below(std::uint64_t(width_max - width_min + 1)));
            int col = int(rng.below(std::uint64_t(cube.cols - width + 1)));
            for (int r = 0; r < cube.rows; ++r)
                for (int c = col; c < col + width; ++c) out.noisy.at(b, r, c) = 0.0;
            out.records.push_back({b, col, width});
        }
    }
    return out;
}

double measure_snr(const HsiCube& clean, const HsiCube& noisy) {
    require(clean.rows == noisy.rows && clean.cols == noisy.cols &&
                clean.bands == noisy.bands,
            "measure_snr: cube dimensions differ");
    double signal = 0.0, noise = 0.0;
    for (std::size_t i = 0; i < clean.data.size(); ++i) {
        double d = noisy.data[i] - clean.data[i];
        signal += clean.data[i] * clean.data[i];
        noise += d * d;
    }
    if (noise == 0.0) return 99.0;
    double snr = 10.0 * std::log10(signal / noise);
    return std::clamp(snr, -99.0, 99.0);
}

SimulateResult simulate_case(const HsiCube& cube, const NoiseSpec& spec) {
    require(cube.norm.has_value(), "simulate_case: cube must be normalized");

    NoiseManifest manifest;
    manifest.case_id = spec.case_id;
    manifest.seed = spec.seed;
    manifest.target_snr_db = spec.target_snr_db;

    // Sparse components first: stripes, then dead lines.
    HsiCube sparse = cube;
    if (spec.has_stripes() && spec.stripe_band_count > 0) {
        StripeResult s = add_stripes(sparse, spec.stripe_band_count,
                                     spec.stripe_frac_lo, spec.stripe_frac_hi,
                                     spec.seed);
        sparse = std::move(s.noisy);
        manifest.stripes = std::move(s.records);
    }
    if (spec.has_deadlines() && spec.deadline_band_count > 0) {
        DeadlineResult d = add_dead_lines(sparse, spec.deadline_band_count,
                                          spec.deadline_width_min,
                                          spec.deadline_width_max, spec.seed);
        sparse = std::move(d.noisy);
        manifest.deadlines = std::move(d.records);
    }

    HsiCube noisy = sparse;
    if (spec.has_gaussian()) {
        GaussField field = make_gaussian_field(cube, spec.sigma_lo, spec.sigma_hi,
                                               spec.seed);
        double scale = 1.0;
        if (spec.target_snr_db) {
            double target = *spec.target_snr_db;
            double signal = 0.0, spow = 0.0, cross = 0.0, gpow = 0.0;
            for (std::size_t i = 0; i < cube.data.size(); ++i) {
                double s = sparse.data[i] - cube.data[i];
                double g = field.values[i];
                signal += cube.data[i] * cube.data[i];
                spow += s * s;
                cross += s * g;
                gpow += g * g;
            }
            require(signal > 0.0, "simulate_case: clean cube has zero power");
            // Noise power as a function of the Gaussian scale c.
            auto power = [&](double c) { return spow + 2.0 * cross * c + gpow * c * c; };
            double target_power = signal / std::pow(10.0, target / 10.0);

            double snr0 = (power(0.0) == 0.0)
                              ? std::numeric_limits<double>::infinity()
                              : 10.0 * std::log10(signal / power(0.0));
            if (snr0 < target - 0.5)
                fail("simulate_case: target SNR unreachable, sparse noise alone is "
                     "already below the target");
            if (power(0.0) >= target_power) {
                scale = 0.0; // sparse noise already at (or within 0.5 dB of) target
            } else {
                require(gpow > 0.0,
                        "simulate_case: target SNR unreachable with zero Gaussian power");
                double hi = 1.0;
                while (power(hi) < target_power) hi *= 2.0;
                double lo = 0.0;
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (lo + hi);
                    (power(mid) < target_power ? lo : hi) = mid;
                }
                scale = 0.5 * (lo + hi);
            }
        }
        manifest.sigma_scale = scale;
        manifest.sigmas.resize(field.sigmas.size());
        for (std::size_t b = 0; b < field.sigmas.size(); ++b)
            manifest.sigmas[b] = field.sigmas[b] * scale;
        for (std::size_t i = 0; i < noisy.data.size(); ++i)
            noisy.data[i] = sparse.data[i] + scale * field.values[i];
    } else {
        require(!spec.target_snr_db,
                "simulate_case: target SNR requires a case with a Gaussian component");
    }

    manifest.measured_snr_db = measure_snr(cube, noisy);
    return {std::move(noisy), std::move(manifest)};
}

std::string render_manifest(const NoiseManifest& m) {
    std::ostringstream out;
    out.precision(17);
    out << "case " << noise_case_name(m.case_id) << "\n";
    out << "seed " << m.seed << "\n";
    if (m.target_snr_db) out << "target_snr_db " << *m.target_snr_db << "\n";
    out << "measured_snr_db " << m.measured_snr_db << "\n";
    if (!m.sigmas.empty()) {
        out << "sigma_scale " << m.sigma_scale << "\n";
        for (std::size_t b = 0; b < m.sigmas.size(); ++b)
            out << "sigma " << b << " " << m.sigmas[b] << "\n";
    }
    for (const auto& s : m.stripes) {
        out << "stripe " << s.band << " mean " << s.mean << " add";
        for (int r : s.add_rows) out << " " << r;
        out << " sub";
        for (int r : s.sub_rows) out << " " << r;
        out << "\n";
    }
    for (const auto& d : m.deadlines)
        out << "deadline " << d.band << " " << d.col << " " << d.width << "\n";
    return out.str();
}

} // namespace ssgn
