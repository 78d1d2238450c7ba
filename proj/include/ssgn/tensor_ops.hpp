#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "ssgn/tensor.hpp"

namespace ssgn {

// Convolution weights: (out_channels, in_channels, k, k) plus per-channel
// bias. "Convolution" throughout is cross-correlation with SAME zero
// padding and stride 1, so spatial dimensions are preserved.
template <typename T>
struct ConvParams {
    Tensor4<T> kernel;
    std::vector<T> bias;

    ConvParams() = default;
    ConvParams(int out_c, int in_c, int k)
        : kernel(out_c, in_c, k, k), bias(std::size_t(out_c), T(0)) {
        require(k % 2 == 1, "ConvParams: kernel size must be odd");
    }

    int out_channels() const { return kernel.n; }
    int in_channels() const { return kernel.c; }
    int ksize() const { return kernel.h; }
    int pad() const { return (kernel.h - 1) / 2; }

    template <typename U>
    ConvParams<U> cast() const {
        ConvParams<U> out;
        out.kernel = kernel.template cast<U>();
        out.bias.resize(bias.size());
        for (std::size_t i = 0; i < bias.size(); ++i) out.bias[i] = U(bias[i]);
        return out;
    }
};

template <typename T>
struct Conv2dGrads {
    Tensor4<T> grad_x;
    Tensor4<T> grad_kernel;
    std::vector<T> grad_bias;
};

template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& x, const ConvParams<T>& p);

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor4<T>& x, const ConvParams<T>& p,
                               const Tensor4<T>& grad_out);

template <typename T>
Tensor4<T> relu_forward(const Tensor4<T>& x) {
    Tensor4<T> out = x;
    for (T& v : out.data) v = std::max(v, T(0));
    return out;
}

// Subgradient at zero is zero.
template <typename T>
Tensor4<T> relu_backward(const Tensor4<T>& x, const Tensor4<T>& grad_out) {
    require(x.same_shape(grad_out), "relu_backward: shape mismatch");
    Tensor4<T> grad = grad_out;
    for (std::size_t i = 0; i < x.data.size(); ++i)
        if (!(x.data[i] > T(0))) grad.data[i] = T(0);
    return grad;
}

template <typename T>
Tensor4<T> concat_channels(const std::vector<const Tensor4<T>*>& parts) {
    require(!parts.empty(), "concat_channels: no parts");
    int total_c = 0;
    const Tensor4<T>& first = *parts.front();
    for (const Tensor4<T>* p : parts) {
        require(p->n == first.n && p->h == first.h && p->w == first.w,
                "concat_channels: batch/spatial dimensions differ");
        total_c += p->c;
    }
    Tensor4<T> out(first.n, total_c, first.h, first.w);
    for (int ni = 0; ni < first.n; ++ni) {
        int co = 0;
        for (const Tensor4<T>* p : parts) {
            std::copy_n(p->plane(ni, 0), std::size_t(p->c) * p->plane_size(),
                        out.plane(ni, co));
            co += p->c;
        }
    }
    return out;
}

// Channel slice [c0, c0+count); the backward of concat is slicing grad_out
// back to each part.
template <typename T>
Tensor4<T> slice_channels(const Tensor4<T>& t, int c0, int count) {
    require(c0 >= 0 && count >= 1 && c0 + count <= t.c,
            "slice_channels: channel range out of bounds");
    Tensor4<T> out(t.n, count, t.h, t.w);
    for (int ni = 0; ni < t.n; ++ni)
        std::copy_n(t.plane(ni, c0), std::size_t(count) * t.plane_size(),
                    out.plane(ni, 0));
    return out;
}

template <typename T>
std::vector<Tensor4<T>> split_channels(const Tensor4<T>& t,
                                       const std::vector<int>& sizes) {
    int total = 0;
    for (int s : sizes) total += s;
    require(total == t.c, "split_channels: sizes do not sum to the channel count");
    std::vector<Tensor4<T>> out;
    out.reserve(sizes.size());
    int c0 = 0;
    for (int s : sizes) {
        out.push_back(slice_channels(t, c0, s));
        c0 += s;
    }
    return out;
}

// Elementwise accumulate: dst += src.
template <typename T>
void add_into(Tensor4<T>& dst, const Tensor4<T>& src) {
    require(dst.same_shape(src), "add_into: shape mismatch");
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

// 1/2 sum of squared differences (no averaging; callers apply their own
// prefactor) and its gradient w.r.t. pred.
template <typename T>
std::pair<double, Tensor4<T>> mse(const Tensor4<T>& pred, const Tensor4<T>& target) {
    require(pred.same_shape(target), "mse: shape mismatch");
    Tensor4<T> grad = pred;
    double value = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        double d = double(pred.data[i]) - double(target.data[i]);
        value += d * d;
        grad.data[i] = T(d);
    }
    return {0.5 * value, std::move(grad)};
}

} // namespace ssgn
