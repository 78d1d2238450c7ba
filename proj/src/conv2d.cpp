#include <algorithm>
#include <vector>

#include "ssgn/tensor_ops.hpp"

// Direct convolution kernels. Each output row is accumulated in a local
// buffer so it is written to memory once; inner loops run over contiguous
// row segments and vectorize. Every output element is produced by exactly
// one thread with a fixed summation order (ci, then ky, then kx), so
// results are bit-identical regardless of the thread count.

namespace ssgn {

namespace {

template <typename T>
void check_forward_shapes(const Tensor4<T>& x, const ConvParams<T>& p) {
    require(x.c == p.in_channels(),
            "conv2d: input channels do not match the kernel");
    require(int(p.bias.size()) == p.out_channels(),
            "conv2d: bias length does not match output channels");
}

} // namespace

template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& x, const ConvParams<T>& p) {
    check_forward_shapes(x, p);
    const int k = p.ksize(), pad = p.pad();
    const int h = x.h, w = x.w, in_c = x.c, out_c = p.out_channels();
    Tensor4<T> out(x.n, out_c, h, w);
    // threading pays off only past a few MFLOPs; both paths are bit-identical
    const bool wide = double(x.n) * out_c * in_c * h * w * k * k > 2e5;

#pragma omp parallel for collapse(2) schedule(static) if (wide)
    for (int ni = 0; ni < x.n; ++ni) {
        for (int co = 0; co < out_c; ++co) {
            std::vector<T> acc(static_cast<std::size_t>(w));
            T* out_p = out.plane(ni, co);
            for (int oy = 0; oy < h; ++oy) {
                std::fill(acc.begin(), acc.end(), p.bias[std::size_t(co)]);
                for (int ci = 0; ci < in_c; ++ci) {
                    const T* x_p = x.plane(ni, ci);
                    const T* k_base = p.kernel.plane(co, ci);
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy + ky - pad;
                        if (iy < 0 || iy >= h) continue;
                        const T* xrow = x_p + std::size_t(iy) * w;
                        const T* krow = k_base + std::size_t(ky) * k;
                        for (int kx = 0; kx < k; ++kx) {
                            const int dx = kx - pad;
                            const T wv = krow[kx];
                            const int ox_lo = std::max(0, -dx);
                            const int ox_hi = std::min(w, w - dx);
                            T* a = acc.data();
                            for (int ox = ox_lo; ox < ox_hi; ++ox)
                                a[ox] += wv * xrow[ox + dx];
                        }
                    }
                }
                std::copy(acc.begin(), acc.end(), out_p + std::size_t(oy) * w);
            }
        }
    }
    return out;
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor4<T>& x, const ConvParams<T>& p,
                               const Tensor4<T>& grad_out) {
    check_forward_shapes(x, p);
    require(grad_out.n == x.n && grad_out.c == p.out_channels() &&
                grad_out.h == x.h && grad_out.w == x.w,
            "conv2d_backward: grad_out shape mismatch");

    const int k = p.ksize(), pad = p.pad();
    const int h = x.h, w = x.w, in_c = x.c, out_c = p.out_channels();

    Conv2dGrads<T> g;
    g.grad_x = Tensor4<T>(x.n, in_c, h, w);
    g.grad_kernel = Tensor4<T>(out_c, in_c, k, k);
    g.grad_bias.assign(std::size_t(out_c), T(0));
    const bool wide = double(x.n) * out_c * in_c * h * w * k * k > 2e5;

    // d loss / d x: correlate grad_out with the kernel at mirrored offsets.
#pragma omp parallel for collapse(2) schedule(static) if (wide)
    for (int ni = 0; ni < x.n; ++ni) {
        for (int ci = 0; ci < in_c; ++ci) {
            std::vector<T> acc(static_cast<std::size_t>(w));
            T* gx_p = g.grad_x.plane(ni, ci);
            for (int iy = 0; iy < h; ++iy) {
                std::fill(acc.begin(), acc.end(), T(0));
                for (int co = 0; co < out_c; ++co) {
                    const T* go_p = grad_out.plane(ni, co);
                    const T* k_base = p.kernel.plane(co, ci);
                    for (int ky = 0; ky < k; ++ky) {
                        const int gy = iy - (ky - pad);
                        if (gy < 0 || gy >= h) continue;
                        const T* gorow = go_p + std::size_t(gy) * w;
                        const T* krow = k_base + std::size_t(ky) * k;
                        for (int kx = 0; kx < k; ++kx) {
                            const int dx = kx - pad;
                            const T wv = krow[kx];
                            const int ix_lo = std::max(0, dx);
                            const int ix_hi = std::min(w, w + dx);
                            T* a = acc.data();
                            for (int ix = ix_lo; ix < ix_hi; ++ix)
                                a[ix] += wv * gorow[ix - dx];
                        }
                    }
                }
                std::copy(acc.begin(), acc.end(), gx_p + std::size_t(iy) * w);
            }
        }
    }

    // d loss / d kernel: shifted dot products, batch summed in fixed order.
#pragma omp parallel for collapse(2) schedule(static) if (wide)
    for (int co = 0; co < out_c; ++co) {
        for (int ci = 0; ci < in_c; ++ci) {
            T* k_out = g.grad_kernel.plane(co, ci);
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - pad;
                const int oy_lo = std::max(0, -dy);
                const int oy_hi = std::min(h, h - dy);
                for (int kx = 0; kx < k; ++kx) {
                    const int dx = kx - pad;
                    const int ox_lo = std::max(0, -dx);
                    const int ox_hi = std::min(w, w - dx);
                    T acc = T(0);
                    for (int ni = 0; ni < x.n; ++ni) {
                        const T* go_p = grad_out.plane(ni, co);
                        const T* x_p = x.plane(ni, ci);
                        for (int oy = oy_lo; oy < oy_hi; ++oy) {
                            const T* gorow = go_p + std::size_t(oy) * w;
                            const T* xrow = x_p + std::size_t(oy + dy) * w + dx;
                            // four fixed partial sums break the fp dependency
                            // chain; the summation order stays deterministic
                            T a0 = 0, a1 = 0, a2 = 0, a3 = 0;
                            int ox = ox_lo;
                            for (; ox + 4 <= ox_hi; ox += 4) {
                                a0 += gorow[ox] * xrow[ox];
                                a1 += gorow[ox + 1] * xrow[ox + 1];
                                a2 += gorow[ox + 2] * xrow[ox + 2];
                                a3 += gorow[ox + 3] * xrow[ox + 3];
                            }
                            T row_acc = (a0 + a1) + (a2 + a3);
                            for (; ox < ox_hi; ++ox) row_acc += gorow[ox] * xrow[ox];
                            acc += row_acc;
                        }
                    }
                    k_out[std::size_t(ky) * k + kx] = acc;
                }
            }
        }
    }

    for (int co = 0; co < out_c; ++co) {
        T acc = T(0);
        for (int ni = 0; ni < x.n; ++ni) {
            const T* go_p = grad_out.plane(ni, co);
            for (std::size_t i = 0; i < grad_out.plane_size(); ++i) acc += go_p[i];
        }
        g.grad_bias[std::size_t(co)] = acc;
    }

    return g;
}

template Tensor4<float> conv2d_forward<float>(const Tensor4<float>&,
                                              const ConvParams<float>&);
template Tensor4<double> conv2d_forward<double>(const Tensor4<double>&,
                                                const ConvParams<double>&);
template Conv2dGrads<float> conv2d_backward<float>(const Tensor4<float>&,
                                                   const ConvParams<float>&,
                                                   const Tensor4<float>&);
template Conv2dGrads<double> conv2d_backward<double>(const Tensor4<double>&,
                                                     const ConvParams<double>&,
                                                     const Tensor4<double>&);

} // namespace ssgn
