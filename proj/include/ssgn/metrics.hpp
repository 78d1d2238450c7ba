#pragma once

#include <string>
#include <vector>

#include "ssgn/hsi_cube.hpp"

namespace ssgn {

struct MetricsReport {
    std::vector<double> per_band_psnr; // dB
    std::vector<double> per_band_ssim;
    double mpsnr = 0.0;
    double mssim = 0.0;
    double msa = 0.0; // degrees
};

// Peak signal-to-noise ratio with peak 1 (normalized domain), capped at
// 99 dB for identical bands.
double psnr(const Band& ref, const Band& test);

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), C1=(0.01)^2,
// C2=(0.03)^2, windows fully inside the image.
double ssim(const Band& ref, const Band& test);

// Mean spectral angle between per-pixel spectra, in degrees. Pixels where
// either spectrum has zero norm contribute 0.
double msa(const HsiCube& ref, const HsiCube& test);

MetricsReport evaluate(const HsiCube& ref, const HsiCube& test);

// Header line with the aggregates, then one line per band.
std::string render_report(const MetricsReport& report);

} // namespace ssgn
