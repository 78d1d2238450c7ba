#include "ssgn/hsi_cube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ssgn/error.hpp"

namespace ssgn {

namespace {

constexpr char kMagic[4] = {'H', 'S', 'I', 'C'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kDtypeF32 = 0;
constexpr std::uint16_t kFlagNorm = 1;

void put_bytes(std::ostream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), std::streamsize(n));
}

void put_u8(std::ostream& out, std::uint8_t v) { put_bytes(out, &v, 1); }

void put_u16(std::ostream& out, std::uint16_t v) {
    std::uint8_t b[2] = {std::uint8_t(v), std::uint8_t(v >> 8)};
    put_bytes(out, b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    std::uint8_t b[4] = {std::uint8_t(v), std::uint8_t(v >> 8),
                         std::uint8_t(v >> 16), std::uint8_t(v >> 24)};
    put_bytes(out, b, 4);
}

void put_f32(std::ostream& out, float v) {
    put_u32(out, std::bit_cast<std::uint32_t>(v));
}

void get_bytes(std::istream& in, void* p, std::size_t n, const char* what) {
    in.read(static_cast<char*>(p), std::streamsize(n));
    if (std::size_t(in.gcount()) != n)
        fail(std::string("HSIC file truncated while reading ") + what);
}

std::uint8_t get_u8(std::istream& in, const char* what) {
    std::uint8_t v;
    get_bytes(in, &v, 1, what);
    return v;
}

std::uint16_t get_u16(std::istream& in, const char* what) {
    std::uint8_t b[2];
    get_bytes(in, b, 2, what);
    return std::uint16_t(b[0]) | std::uint16_t(b[1]) << 8;
}

std::uint32_t get_u32(std::istream& in, const char* what) {
    std::uint8_t b[4];
    get_bytes(in, b, 4, what);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
           std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

float get_f32(std::istream& in, const char* what) {
    return std::bit_cast<float>(get_u32(in, what));
}

} // namespace

Band HsiCube::band_copy(int b) const {
    Band out(rows, cols);
    auto src = band(b);
    std::copy(src.begin(), src.end(), out.data.begin());
    return out;
}

HsiCube load_cube(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open cube file: " + path);

    char magic[4];
    get_bytes(in, magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        fail("bad magic in cube file: " + path);

    std::uint8_t version = get_u8(in, "version");
    if (version != kVersion)
        fail("unsupported HSIC version " + std::to_string(version) + ": " + path);
    std::uint8_t dtype = get_u8(in, "dtype");
    if (dtype != kDtypeF32)
        fail("unsupported HSIC dtype " + std::to_string(dtype) + ": " + path);

    std::uint16_t flags = get_u16(in, "flags");
    std::uint32_t m = get_u32(in, "rows");
    std::uint32_t n = get_u32(in, "cols");
    std::uint32_t b = get_u32(in, "bands");
    if (m == 0 || n == 0 || b == 0)
        fail("zero dimension in cube file: " + path);

    HsiCube cube{int(m), int(n), int(b)};
    if constexpr (std::endian::native == std::endian::little) {
        std::vector<float> payload(cube.size());
        get_bytes(in, payload.data(), payload.size() * sizeof(float), "payload");
        std::copy(payload.begin(), payload.end(), cube.data.begin());
    } else {
        for (double& v : cube.data) v = get_f32(in, "payload");
    }

    if (flags & kFlagNorm) {
        std::vector<BandRange> norm(b);
        for (auto& r : norm) {
            r.min = get_f32(in, "norm block");
            r.max = get_f32(in, "norm block");
        }
        cube.norm = std::move(norm);
    }
    return cube;
}

void save_cube(const HsiCube& cube, const std::string& path) {
    require(cube.rows > 0 && cube.cols > 0 && cube.bands > 0,
            "save_cube: cube has a zero dimension");
    require(cube.data.size() == cube.size(), "save_cube: data length mismatch");
    if (cube.norm)
        require(int(cube.norm->size()) == cube.bands,
                "save_cube: norm block must have one entry per band");

    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write cube file: " + path);

    put_bytes(out, kMagic, 4);
    put_u8(out, kVersion);
    put_u8(out, kDtypeF32);
    put_u16(out, cube.norm ? kFlagNorm : 0);
    put_u32(out, std::uint32_t(cube.rows));
    put_u32(out, std::uint32_t(cube.cols));
    put_u32(out, std::uint32_t(cube.bands));
    for (double v : cube.data) put_f32(out, float(v));
    if (cube.norm) {
        for (const auto& r : *cube.norm) {
            put_f32(out, float(r.min));
            put_f32(out, float(r.max));
        }
    }
    if (!out) fail("write failed: " + path);
}

HsiCube normalize_per_band(const HsiCube& cube) {
    require(!cube.norm, "normalize_per_band: cube is already normalized");
    HsiCube out = cube;
    std::vector<BandRange> norm(cube.bands);
    for (int b = 0; b < cube.bands; ++b) {
        auto src = cube.band(b);
        auto [lo_it, hi_it] = std::minmax_element(src.begin(), src.end());
        double lo = *lo_it, hi = *hi_it;
        auto dst = out.band(b);
        if (hi == lo) {
            std::fill(dst.begin(), dst.end(), 0.0);
            norm[b] = {lo, lo};
        } else {
            double inv = 1.0 / (hi - lo);
            for (std::size_t i = 0; i < src.size(); ++i)
                dst[i] = (src[i] - lo) * inv;
            norm[b] = {lo, hi};
        }
    }
    out.norm = std::move(norm);
    return out;
}

HsiCube denormalize_per_band(const HsiCube& cube) {
    require(cube.norm.has_value(),
            "denormalize_per_band: cube carries no norm metadata");
    HsiCube out = cube;
    for (int b = 0; b < cube.bands; ++b) {
        const BandRange& r = (*cube.norm)[b];
        auto src = cube.band(b);
        auto dst = out.band(b);
        for (std::size_t i = 0; i < src.size(); ++i)
            dst[i] = src[i] * (r.max - r.min) + r.min;
    }
    out.norm.reset();
    return out;
}

std::vector<std::pair<int, int>> patch_origins(int rows, int cols, int patch,
                                               int stride) {
    require(patch >= 1 && stride >= 1, "patch and stride must be >= 1");
    require(patch <= rows && patch <= cols,
            "patch larger than the spatial extent");
    std::vector<std::pair<int, int>> out;
    for (int r = 0; r + patch <= rows; r += stride)
        for (int c = 0; c + patch <= cols; c += stride)
            out.emplace_back(r, c);
    return out;
}

std::vector<PatchOrigin> extract_patches(const HsiCube& cube, int patch,
                                         int stride) {
    auto plane = patch_origins(cube.rows, cube.cols, patch, stride);
    std::vector<PatchOrigin> out;
    out.reserve(plane.size() * std::size_t(cube.bands));
    for (int b = 0; b < cube.bands; ++b)
        for (auto [r, c] : plane) out.push_back({b, r, c});
    return out;
}

Band rotate90(const Band& band, int quarter_turns) {
    require(quarter_turns >= 0 && quarter_turns <= 3,
            "rotate90: quarter_turns must be in {0,1,2,3}");
    Band cur = band;
    for (int t = 0; t < quarter_turns; ++t) {
        Band next(cur.cols, cur.rows);
        for (int r = 0; r < next.rows; ++r)
            for (int c = 0; c < next.cols; ++c)
                next.at(r, c) = cur.at(c, cur.cols - 1 - r);
        cur = std::move(next);
    }
    return cur;
}

Band resize_bilinear(const Band& band, double scale) {
    require(scale > 0.0, "resize_bilinear: scale must be positive");
    int out_rows = int(std::llround(scale * band.rows));
    int out_cols = int(std::llround(scale * band.cols));
    require(out_rows >= 1 && out_cols >= 1,
            "resize_bilinear: output dimension would be zero");

    Band out(out_rows, out_cols);
    auto src_coord = [scale](int dst, int limit) {
        double s = (dst + 0.5) / scale - 0.5;
        return std::clamp(s, 0.0, double(limit - 1));
    };
    for (int r = 0; r < out_rows; ++r) {
        double sr = src_coord(r, band.rows);
        int r0 = int(std::floor(sr));
        int r1 = std::min(r0 + 1, band.rows - 1);
        double fr = sr - r0;
        for (int c = 0; c < out_cols; ++c) {
            double sc = src_coord(c, band.cols);
            int c0 = int(std::floor(sc));
            int c1 = std::min(c0 + 1, band.cols - 1);
            double fc = sc - c0;
            double top = band.at(r0, c0) * (1.0 - fc) + band.at(r0, c1) * fc;
            double bot = band.at(r1, c0) * (1.0 - fc) + band.at(r1, c1) * fc;
            out.at(r, c) = top * (1.0 - fr) + bot * fr;
        }
    }
    return out;
}

} // namespace ssgn
