#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ssgn {

// One 2-D spatial plane, row-major.
struct Band {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Band() = default;
    Band(int r, int c) : rows(r), cols(c), data(std::size_t(r) * c, 0.0) {}

    double& at(int r, int c) { return data[std::size_t(r) * cols + c]; }
    double at(int r, int c) const { return data[std::size_t(r) * cols + c]; }
    std::size_t size() const { return data.size(); }
};

// Pre-normalization value range of one band.
struct BandRange {
    double min = 0.0;
    double max = 0.0;
};

// M x N x B cube, band-sequential (band-major, row-major within a band).
// Values are kept in double in memory; the on-disk HSIC format stores
// 32-bit floats. When `norm` is present the cube is in the normalized
// [0,1] domain and each entry records the original per-band range.
// Downstream noise simulation is purely additive, so a noisy cube may
// carry `norm` while holding values slightly outside [0,1].
struct HsiCube {
    int rows = 0;  // M
    int cols = 0;  // N
    int bands = 0; // B
    std::vector<double> data;
    std::optional<std::vector<BandRange>> norm;

    HsiCube() = default;
    HsiCube(int m, int n, int b)
        : rows(m), cols(n), bands(b), data(std::size_t(m) * n * b, 0.0) {}

    std::size_t band_size() const { return std::size_t(rows) * cols; }
    std::size_t size() const { return band_size() * bands; }

    double& at(int b, int r, int c) {
        return data[(std::size_t(b) * rows + r) * cols + c];
    }
    double at(int b, int r, int c) const {
        return data[(std::size_t(b) * rows + r) * cols + c];
    }

    std::span<double> band(int b) {
        return {data.data() + std::size_t(b) * band_size(), band_size()};
    }
    std::span<const double> band(int b) const {
        return {data.data() + std::size_t(b) * band_size(), band_size()};
    }

    Band band_copy(int b) const;
};

// Tiled patch origin produced by extract_patches.
struct PatchOrigin {
    int band = 0;
    int row = 0;
    int col = 0;
};

// One training sample before gradient features are attached: the noisy and
// clean P x P patches of band k plus the adjacent-band window used for the
// spectral features.
struct PatchSample {
    int band_index = 0;
    Band noisy_patch;
    Band clean_patch;
    std::vector<int> window_band_indices; // K distinct, sorted, k excluded
};

// --- file I/O (HSIC format, little-endian) ---
HsiCube load_cube(const std::string& path);
void save_cube(const HsiCube& cube, const std::string& path);

// --- per-band [0,1] normalization ---
HsiCube normalize_per_band(const HsiCube& cube);
HsiCube denormalize_per_band(const HsiCube& cube);

// --- patch tiling ---
// Origins tile each band left-to-right, top-to-bottom; partial patches at
// the right/bottom margins are dropped.
std::vector<PatchOrigin> extract_patches(const HsiCube& cube, int patch, int stride);
// Same tiling for a single plane of the given size.
std::vector<std::pair<int, int>> patch_origins(int rows, int cols, int patch, int stride);

// --- augmentation primitives ---
// Counterclockwise rotation: one turn maps out(r, c) = in(c, rows_in - 1 - r).
Band rotate90(const Band& band, int quarter_turns);
// Bilinear resize to round(scale * rows) x round(scale * cols) with
// half-pixel centers: src = (dst + 0.5) / scale - 0.5, clamped.
Band resize_bilinear(const Band& band, double scale);

} // namespace ssgn
