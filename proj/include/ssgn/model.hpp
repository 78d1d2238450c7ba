#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ssgn/hsi_cube.hpp"
#include "ssgn/rng.hpp"
#include "ssgn/tensor_ops.hpp"

namespace ssgn {

// Architecture descriptor. Channel bookkeeping:
//   each multi-scale unit concatenates 3x3/5x5/7x7 conv outputs of c_scale
//   channels each; three input branches fuse to 9*c_scale channels; cascade
//   block l additionally sees every earlier block's output (dense
//   connectivity); both heads read the fusion plus all block outputs.
struct SsgnArch {
    int K = 24;       // adjacent spectral bands
    int blocks = 5;   // cascade depth L
    int c_scale = 10; // channels per kernel size per unit

    static constexpr std::array<int, 3> kernel_sizes{3, 5, 7};

    void validate() const {
        require(K >= 2 && K % 2 == 0, "SsgnArch: K must be even and >= 2");
        require(blocks >= 1, "SsgnArch: at least one cascade block");
        require(c_scale >= 1, "SsgnArch: c_scale must be >= 1");
    }

    int unit_out_channels() const { return 3 * c_scale; }
    int fusion_channels() const { return 9 * c_scale; }
    int block_input_channels(int l) const { // l is 0-based
        return fusion_channels() + l * unit_out_channels();
    }
    int head_input_channels() const {
        return fusion_channels() + blocks * unit_out_channels();
    }

    bool operator==(const SsgnArch&) const = default;
};

// One multi-scale unit: parallel 3/5/7 convolutions over the same input,
// each ReLU-activated, concatenated channelwise.
template <typename T>
struct MsUnit {
    ConvParams<T> conv3, conv5, conv7;
};

template <typename T>
struct SsgnModel {
    SsgnArch arch;
    MsUnit<T> branch_spatial;      // Y_k, 1 input channel
    MsUnit<T> branch_spatial_grad; // [G_x, G_y], 2 input channels
    MsUnit<T> branch_spectral;     // G_z, K input channels
    std::vector<MsUnit<T>> blocks; // cascade
    ConvParams<T> head_res;        // 3x3 -> 1 channel, linear
    ConvParams<T> head_spec;       // 3x3 -> K channels, linear

    template <typename U>
    SsgnModel<U> cast() const;

    void validate_shapes() const;
};

// Checkpoint / iteration order of the parameter tensors. Every traversal
// below follows it: the three branches (spatial, spatial-gradient,
// spectral), each unit as conv3, conv5, conv7; then the cascade blocks in
// order; then head_res, head_spec. Kernel precedes bias within a conv.
template <typename T, typename Fn>
void visit_convs(SsgnModel<T>& m, Fn&& fn) {
    for (MsUnit<T>* u : {&m.branch_spatial, &m.branch_spatial_grad, &m.branch_spectral}) {
        fn(u->conv3);
        fn(u->conv5);
        fn(u->conv7);
    }
    for (MsUnit<T>& u : m.blocks) {
        fn(u.conv3);
        fn(u.conv5);
        fn(u.conv7);
    }
    fn(m.head_res);
    fn(m.head_spec);
}

template <typename T, typename Fn>
void visit_convs(const SsgnModel<T>& m, Fn&& fn) {
    for (const MsUnit<T>* u :
         {&m.branch_spatial, &m.branch_spatial_grad, &m.branch_spectral}) {
        fn(u->conv3);
        fn(u->conv5);
        fn(u->conv7);
    }
    for (const MsUnit<T>& u : m.blocks) {
        fn(u.conv3);
        fn(u.conv5);
        fn(u.conv7);
    }
    fn(m.head_res);
    fn(m.head_spec);
}

// Flat views over all parameters (kernels and biases interleaved in the
// canonical order). The same enumeration drives Adam updates and gradient
// checks, so parameter/gradient spans always line up.
template <typename T>
std::vector<std::span<T>> param_spans(SsgnModel<T>& m) {
    std::vector<std::span<T>> spans;
    visit_convs(m, [&](ConvParams<T>& c) {
        spans.emplace_back(c.kernel.data);
        spans.emplace_back(c.bias);
    });
    return spans;
}

template <typename T>
std::vector<std::span<const T>> param_spans(const SsgnModel<T>& m) {
    std::vector<std::span<const T>> spans;
    visit_convs(m, [&](const ConvParams<T>& c) {
        spans.emplace_back(std::span<const T>(c.kernel.data));
        spans.emplace_back(std::span<const T>(c.bias));
    });
    return spans;
}

template <typename T>
std::size_t param_count(const SsgnModel<T>& m) {
    std::size_t total = 0;
    for (auto s : param_spans(m)) total += s.size();
    return total;
}

template <typename T>
SsgnModel<T> zeros_like(const SsgnModel<T>& m) {
    SsgnModel<T> z = m;
    visit_convs(z, [](ConvParams<T>& c) {
        std::fill(c.kernel.data.begin(), c.kernel.data.end(), T(0));
        std::fill(c.bias.begin(), c.bias.end(), T(0));
    });
    return z;
}

namespace detail {

template <typename T>
MsUnit<T> make_unit(int in_c, int c_scale) {
    MsUnit<T> u;
    u.conv3 = ConvParams<T>(c_scale, in_c, 3);
    u.conv5 = ConvParams<T>(c_scale, in_c, 5);
    u.conv7 = ConvParams<T>(c_scale, in_c, 7);
    return u;
}

} // namespace detail

// He-style initialization: kernel weights ~ N(0, 2 / fan_in) with
// fan_in = in_channels * k^2, biases zero, fully determined by the seed.
// Draws happen in double so float and double instantiations agree.
template <typename T>
SsgnModel<T> init_model(const SsgnArch& arch, std::uint64_t seed) {
    arch.validate();
    SsgnModel<T> m;
    m.arch = arch;
    m.branch_spatial = detail::make_unit<T>(1, arch.c_scale);
    m.branch_spatial_grad = detail::make_unit<T>(2, arch.c_scale);
    m.branch_spectral = detail::make_unit<T>(arch.K, arch.c_scale);
    m.blocks.reserve(arch.blocks);
    for (int l = 0; l < arch.blocks; ++l)
        m.blocks.push_back(
            detail::make_unit<T>(arch.block_input_channels(l), arch.c_scale));
    m.head_res = ConvParams<T>(1, arch.head_input_channels(), 3);
    m.head_spec = ConvParams<T>(arch.K, arch.head_input_channels(), 3);

    Rng rng(derive_seed(seed, 0x1217));
    visit_convs(m, [&](ConvParams<T>& c) {
        double fan_in = double(c.in_channels()) * c.ksize() * c.ksize();
        double std_dev = std::sqrt(2.0 / fan_in);
        for (T& v : c.kernel.data) v = T(std_dev * rng.normal());
    });
    return m;
}

template <typename T>
template <typename U>
SsgnModel<U> SsgnModel<T>::cast() const {
    SsgnModel<U> out = init_model<U>(arch, 0);
    auto dst = param_spans(out);
    auto src = param_spans(*this);
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t j = 0; j < src[i].size(); ++j) dst[i][j] = U(src[i][j]);
    return out;
}

template <typename T>
void SsgnModel<T>::validate_shapes() const {
    arch.validate();
    auto check_unit = [&](const MsUnit<T>& u, int in_c) {
        for (const ConvParams<T>* c : {&u.conv3, &u.conv5, &u.conv7}) {
            require(c->in_channels() == in_c, "SsgnModel: unit input channel mismatch");
            require(c->out_channels() == arch.c_scale,
                    "SsgnModel: unit output channel mismatch");
        }
        require(u.conv3.ksize() == 3 && u.conv5.ksize() == 5 && u.conv7.ksize() == 7,
                "SsgnModel: unexpected kernel sizes");
    };
    check_unit(branch_spatial, 1);
    check_unit(branch_spatial_grad, 2);
    check_unit(branch_spectral, arch.K);
    require(int(blocks.size()) == arch.blocks, "SsgnModel: cascade depth mismatch");
    for (int l = 0; l < arch.blocks; ++l)
        check_unit(blocks[std::size_t(l)], arch.block_input_channels(l));
    require(head_res.in_channels() == arch.head_input_channels() &&
                head_res.out_channels() == 1 && head_res.ksize() == 3,
            "SsgnModel: head_res shape mismatch");
    require(head_spec.in_channels() == arch.head_input_channels() &&
                head_spec.out_channels() == arch.K && head_spec.ksize() == 3,
            "SsgnModel: head_spec shape mismatch");
}

// --- forward / backward ---

template <typename T>
struct SsgnInput {
    Tensor4<T> y;   // (n, 1, h, w)
    Tensor4<T> gxy; // (n, 2, h, w)
    Tensor4<T> gz;  // (n, K, h, w)
};

template <typename T>
struct SsgnOutput {
    Tensor4<T> res; // (n, 1, h, w)
    Tensor4<T> phi; // (n, K, h, w)
};

template <typename T>
struct UnitCache {
    Tensor4<T> input;
    Tensor4<T> z3, z5, z7; // pre-activations
};

template <typename T>
struct SsgnCache {
    UnitCache<T> branch_spatial, branch_spatial_grad, branch_spectral;
    std::vector<UnitCache<T>> blocks;
    Tensor4<T> head_in; // fusion ++ block outputs
};

namespace detail {

template <typename T>
Tensor4<T> unit_forward(const MsUnit<T>& u, const Tensor4<T>& x, UnitCache<T>* cache) {
    Tensor4<T> z3 = conv2d_forward(x, u.conv3);
    Tensor4<T> z5 = conv2d_forward(x, u.conv5);
    Tensor4<T> z7 = conv2d_forward(x, u.conv7);
    Tensor4<T> a3 = relu_forward(z3);
    Tensor4<T> a5 = relu_forward(z5);
    Tensor4<T> a7 = relu_forward(z7);
    if (cache) {
        cache->input = x;
        cache->z3 = std::move(z3);
        cache->z5 = std::move(z5);
        cache->z7 = std::move(z7);
    }
    return concat_channels<T>({&a3, &a5, &a7});
}

// Accumulates this unit's parameter gradients and returns the gradient
// w.r.t. the unit input.
template <typename T>
Tensor4<T> unit_backward(const MsUnit<T>& u, const UnitCache<T>& cache,
                         const Tensor4<T>& grad_out, MsUnit<T>& grads) {
    const int c = u.conv3.out_channels();
    auto parts = split_channels(grad_out, {c, c, c});
    Tensor4<T> grad_in(cache.input.n, cache.input.c, cache.input.h, cache.input.w);
    const ConvParams<T>* convs[3] = {&u.conv3, &u.conv5, &u.conv7};
    ConvParams<T>* gconvs[3] = {&grads.conv3, &grads.conv5, &grads.conv7};
    const Tensor4<T>* preacts[3] = {&cache.z3, &cache.z5, &cache.z7};
    for (int i = 0; i < 3; ++i) {
        Tensor4<T> gz = relu_backward(*preacts[i], parts[std::size_t(i)]);
        Conv2dGrads<T> cg = conv2d_backward(cache.input, *convs[i], gz);
        add_into(gconvs[i]->kernel, cg.grad_kernel);
        for (std::size_t j = 0; j < cg.grad_bias.size(); ++j)
            gconvs[i]->bias[j] += cg.grad_bias[j];
        add_into(grad_in, cg.grad_x);
    }
    return grad_in;
}

} // namespace detail

template <typename T>
SsgnOutput<T> forward(const SsgnModel<T>& m, const SsgnInput<T>& in,
                      SsgnCache<T>* cache = nullptr) {
    require(in.y.c == 1 && in.gxy.c == 2 && in.gz.c == m.arch.K,
            "forward: input channel counts do not match the architecture");
    require(in.y.n == in.gxy.n && in.y.n == in.gz.n && in.y.h == in.gxy.h &&
                in.y.h == in.gz.h && in.y.w == in.gxy.w && in.y.w == in.gz.w,
            "forward: input tensors disagree on batch or spatial dims");

    Tensor4<T> f_y = detail::unit_forward(m.branch_spatial, in.y,
                                          cache ? &cache->branch_spatial : nullptr);
    Tensor4<T> f_sg = detail::unit_forward(m.branch_spatial_grad, in.gxy,
                                           cache ? &cache->branch_spatial_grad : nullptr);
    Tensor4<T> f_zg = detail::unit_forward(m.branch_spectral, in.gz,
                                           cache ? &cache->branch_spectral : nullptr);
    Tensor4<T> running = concat_channels<T>({&f_y, &f_sg, &f_zg}); // fusion

    if (cache) cache->blocks.resize(m.blocks.size());
    for (std::size_t l = 0; l < m.blocks.size(); ++l) {
        Tensor4<T> out_l = detail::unit_forward(m.blocks[l], running,
                                                cache ? &cache->blocks[l] : nullptr);
        running = concat_channels<T>({&running, &out_l});
    }

    if (cache) cache->head_in = running;
    SsgnOutput<T> out;
    out.res = conv2d_forward(running, m.head_res);
    out.phi = conv2d_forward(running, m.head_spec);
    return out;
}

// Reverse pass over the cached forward; returns parameter gradients in a
// model-shaped container.
template <typename T>
SsgnModel<T> backward(const SsgnModel<T>& m, const SsgnCache<T>& cache,
                      const Tensor4<T>& grad_res, const Tensor4<T>& grad_phi) {
    SsgnModel<T> grads = zeros_like(m);
    const int L = int(m.blocks.size());
    const int fusion_c = m.arch.fusion_channels();
    const int unit_c = m.arch.unit_out_channels();

    Conv2dGrads<T> hr = conv2d_backward(cache.head_in, m.head_res, grad_res);
    Conv2dGrads<T> hs = conv2d_backward(cache.head_in, m.head_spec, grad_phi);
    grads.head_res.kernel = std::move(hr.grad_kernel);
    grads.head_res.bias = std::move(hr.grad_bias);
    grads.head_spec.kernel = std::move(hs.grad_kernel);
    grads.head_spec.bias = std::move(hs.grad_bias);

    Tensor4<T> grad_head_in = std::move(hr.grad_x);
    add_into(grad_head_in, hs.grad_x);

    // Segment the head-input gradient into fusion + per-block pieces.
    std::vector<int> sizes{fusion_c};
    for (int l = 0; l < L; ++l) sizes.push_back(unit_c);
    auto segs = split_channels(grad_head_in, sizes);
    Tensor4<T> grad_fusion = std::move(segs[0]);
    std::vector<Tensor4<T>> grad_block_out(segs.begin() + 1, segs.end());

    for (int l = L - 1; l >= 0; --l) {
        Tensor4<T> grad_in = detail::unit_backward(
            m.blocks[std::size_t(l)], cache.blocks[std::size_t(l)],
            grad_block_out[std::size_t(l)], grads.blocks[std::size_t(l)]);
        // Block input was [fusion, out_0 .. out_{l-1}].
        std::vector<int> in_sizes{fusion_c};
        for (int j = 0; j < l; ++j) in_sizes.push_back(unit_c);
        auto in_segs = split_channels(grad_in, in_sizes);
        add_into(grad_fusion, in_segs[0]);
        for (int j = 0; j < l; ++j)
            add_into(grad_block_out[std::size_t(j)], in_segs[std::size_t(j) + 1]);
    }

    const int bc = 3 * m.arch.c_scale;
    auto branch_segs = split_channels(grad_fusion, {bc, bc, bc});
    detail::unit_backward(m.branch_spatial, cache.branch_spatial, branch_segs[0],
                          grads.branch_spatial);
    detail::unit_backward(m.branch_spatial_grad, cache.branch_spatial_grad,
                          branch_segs[1], grads.branch_spatial_grad);
    detail::unit_backward(m.branch_spectral, cache.branch_spectral, branch_segs[2],
                          grads.branch_spectral);
    return grads;
}

// Residual reconstruction: the network output estimates the noise of band k,
// so the denoised band is y - res, clamped to the normalized range.
Band reconstruct(const Band& y, const Band& res);

} // namespace ssgn
