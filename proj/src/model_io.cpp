#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ssgn/checkpoint.hpp"
#include "ssgn/model.hpp"

namespace ssgn {

Band reconstruct(const Band& y, const Band& res) {
    require(y.rows == res.rows && y.cols == res.cols,
            "reconstruct: dimension mismatch");
    Band out(y.rows, y.cols);
    for (std::size_t i = 0; i < y.data.size(); ++i)
        out.data[i] = std::clamp(y.data[i] - res.data[i], 0.0, 1.0);
    return out;
}

namespace {

constexpr char kMagic[4] = {'S', 'S', 'G', 'N'};
constexpr std::uint8_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    std::uint8_t b[4] = {std::uint8_t(v), std::uint8_t(v >> 8),
                         std::uint8_t(v >> 16), std::uint8_t(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    put_u32(out, std::uint32_t(v));
    put_u32(out, std::uint32_t(v >> 32));
}

std::uint32_t get_u32(std::istream& in, const char* what) {
    std::uint8_t b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4)
        fail(std::string("checkpoint truncated while reading ") + what);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
           std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

std::uint64_t get_u64(std::istream& in, const char* what) {
    std::uint64_t lo = get_u32(in, what);
    std::uint64_t hi = get_u32(in, what);
    return lo | hi << 32;
}

void put_tensor(std::ostream& out, const std::uint32_t dims[4],
                const float* data, std::size_t count) {
    for (int i = 0; i < 4; ++i) put_u32(out, dims[i]);
    for (std::size_t i = 0; i < count; ++i)
        put_u32(out, std::bit_cast<std::uint32_t>(data[i]));
}

void put_params(std::ostream& out, const SsgnModel<float>& m) {
    visit_convs(m, [&](const ConvParams<float>& c) {
        const Tensor4<float>& k = c.kernel;
        std::uint32_t kd[4] = {std::uint32_t(k.n), std::uint32_t(k.c),
                               std::uint32_t(k.h), std::uint32_t(k.w)};
        put_tensor(out, kd, k.data.data(), k.data.size());
        std::uint32_t bd[4] = {std::uint32_t(c.bias.size()), 1, 1, 1};
        put_tensor(out, bd, c.bias.data(), c.bias.size());
    });
}

void get_tensor(std::istream& in, const std::uint32_t expect[4], float* data,
                std::size_t count, const char* what) {
    for (int i = 0; i < 4; ++i) {
        std::uint32_t d = get_u32(in, what);
        if (d != expect[i])
            fail(std::string("checkpoint tensor dimensions inconsistent with the "
                             "architecture descriptor (") + what + ")");
    }
    for (std::size_t i = 0; i < count; ++i)
        data[i] = std::bit_cast<float>(get_u32(in, what));
}

void get_params(std::istream& in, SsgnModel<float>& m, const char* what) {
    visit_convs(m, [&](ConvParams<float>& c) {
        Tensor4<float>& k = c.kernel;
        std::uint32_t kd[4] = {std::uint32_t(k.n), std::uint32_t(k.c),
                               std::uint32_t(k.h), std::uint32_t(k.w)};
        get_tensor(in, kd, k.data.data(), k.data.size(), what);
        std::uint32_t bd[4] = {std::uint32_t(c.bias.size()), 1, 1, 1};
        get_tensor(in, bd, c.bias.data(), c.bias.size(), what);
    });
}

} // namespace

void save_model(const SsgnModel<float>& model, const std::string& path,
                const AdamState<float>* adam) {
    model.validate_shapes();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write checkpoint: " + path);

    out.write(kMagic, 4);
    out.put(char(kVersion));
    put_u32(out, std::uint32_t(model.arch.K));
    put_u32(out, std::uint32_t(model.arch.blocks));
    put_u32(out, std::uint32_t(model.arch.c_scale));
    put_params(out, model);

    out.put(adam ? char(1) : char(0));
    if (adam) {
        put_u64(out, std::uint64_t(adam->t));
        put_params(out, adam->m);
        put_params(out, adam->v);
    }
    if (!out) fail("write failed: " + path);
}

Checkpoint load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open checkpoint: " + path);

    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
        fail("bad magic in checkpoint: " + path);
    int version = in.get();
    if (version != kVersion)
        fail("unsupported checkpoint version " + std::to_string(version) + ": " + path);

    SsgnArch arch;
    arch.K = int(get_u32(in, "arch"));
    arch.blocks = int(get_u32(in, "arch"));
    arch.c_scale = int(get_u32(in, "arch"));
    arch.validate();

    Checkpoint ck;
    ck.model = init_model<float>(arch, 0);
    get_params(in, ck.model, "parameters");

    int flag = in.get();
    if (flag == std::istream::traits_type::eof())
        fail("checkpoint truncated while reading the optimizer flag: " + path);
    if (flag == 1) {
        AdamState<float> st = make_adam_state(ck.model);
        st.t = long(get_u64(in, "optimizer state"));
        get_params(in, st.m, "optimizer state");
        get_params(in, st.v, "optimizer state");
        ck.adam = std::move(st);
    } else if (flag != 0) {
        fail("invalid optimizer flag in checkpoint: " + path);
    }
    return ck;
}

} // namespace ssgn
