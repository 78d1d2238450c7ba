#include "ssgn/gradient_ops.hpp"

#include <algorithm>

#include "ssgn/error.hpp"

namespace ssgn {

std::pair<Band, Band> spatial_gradients(const Band& band) {
    require(band.rows >= 1 && band.cols >= 1, "spatial_gradients: empty band");
    Band gx(band.rows, band.cols);
    Band gy(band.rows, band.cols);
    for (int r = 0; r < band.rows; ++r) {
        for (int c = 0; c < band.cols; ++c) {
            gx.at(r, c) = (r + 1 < band.rows) ? band.at(r + 1, c) - band.at(r, c) : 0.0;
            gy.at(r, c) = (c + 1 < band.cols) ? band.at(r, c + 1) - band.at(r, c) : 0.0;
        }
    }
    return {std::move(gx), std::move(gy)};
}

std::vector<int> spectral_window(int k, int bands, int K) {
    require(K >= 2 && K % 2 == 0, "spectral_window: K must be even and >= 2");
    require(K < bands, "spectral_window: K must be smaller than the band count");
    require(k >= 0 && k < bands, "spectral_window: band index out of range");

    // Contiguous run of K+1 indices containing k, clamped inside [0, bands).
    int lo = std::clamp(k - K / 2, 0, bands - 1 - K);
    std::vector<int> window;
    window.reserve(K);
    for (int i = lo; i <= lo + K; ++i)
        if (i != k) window.push_back(i);
    return window;
}

std::vector<Band> spectral_gradients(const HsiCube& cube, int k,
                                     std::span<const int> window) {
    require(k >= 0 && k < cube.bands, "spectral_gradients: band index out of range");
    std::vector<Band> planes;
    planes.reserve(window.size());
    auto base = cube.band(k);
    for (int j : window) {
        require(j >= 0 && j < cube.bands, "spectral_gradients: window index out of range");
        Band plane(cube.rows, cube.cols);
        auto adj = cube.band(j);
        for (std::size_t i = 0; i < base.size(); ++i)
            plane.data[i] = adj[i] - base[i];
        planes.push_back(std::move(plane));
    }
    return planes;
}

GradientStack build_gradient_stack(const HsiCube& cube, int k, int K) {
    require(cube.norm.has_value(), "build_gradient_stack: cube must be normalized");
    GradientStack stack;
    stack.band_index = k;
    stack.y = cube.band_copy(k);
    auto [gx, gy] = spatial_gradients(stack.y);
    stack.g_x = std::move(gx);
    stack.g_y = std::move(gy);
    stack.window_band_indices = spectral_window(k, cube.bands, K);
    stack.g_z = spectral_gradients(cube, k, stack.window_band_indices);
    return stack;
}

} // namespace ssgn
