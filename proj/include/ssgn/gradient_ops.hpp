#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ssgn/hsi_cube.hpp"

namespace ssgn {

// Network input bundle for one band: the band itself, its two spatial
// gradients, and the K adjacent-band spectral gradient planes.
struct GradientStack {
    int band_index = 0;
    std::vector<int> window_band_indices; // K sorted indices, band_index excluded
    Band y;
    Band g_x;
    Band g_y;
    std::vector<Band> g_z; // K planes, ordered like the window
};

// Forward differences along rows (g_x) and columns (g_y); the trailing
// row/column is zero so outputs keep the input size.
std::pair<Band, Band> spatial_gradients(const Band& band);

// The K band indices nearest k, excluding k. Near the spectrum edges the
// window slides inward so it always holds exactly K valid indices.
std::vector<int> spectral_window(int k, int bands, int K);

// Plane j = cube.band(window[j]) - cube.band(k), elementwise.
std::vector<Band> spectral_gradients(const HsiCube& cube, int k,
                                     std::span<const int> window);

GradientStack build_gradient_stack(const HsiCube& cube, int k, int K);

} // namespace ssgn
