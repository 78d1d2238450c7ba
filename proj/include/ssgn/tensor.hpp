#pragma once

#include <cstddef>
#include <vector>

#include "ssgn/error.hpp"

namespace ssgn {

// Dense 4-D array in (batch, channels, height, width) order, row-major.
// Templated so the same kernels run in float for training and in double
// for gradient verification.
template <typename T>
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> data;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          data(std::size_t(n_) * c_ * h_ * w_, T(0)) {
        require(n_ >= 1 && c_ >= 1 && h_ >= 1 && w_ >= 1,
                "Tensor4: all dimensions must be >= 1");
    }

    std::size_t size() const { return data.size(); }
    std::size_t plane_size() const { return std::size_t(h) * w; }

    T* plane(int ni, int ci) {
        return data.data() + (std::size_t(ni) * c + ci) * plane_size();
    }
    const T* plane(int ni, int ci) const {
        return data.data() + (std::size_t(ni) * c + ci) * plane_size();
    }

    T& at(int ni, int ci, int y, int x) {
        return data[((std::size_t(ni) * c + ci) * h + y) * w + x];
    }
    T at(int ni, int ci, int y, int x) const {
        return data[((std::size_t(ni) * c + ci) * h + y) * w + x];
    }

    bool same_shape(const Tensor4& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    template <typename U>
    Tensor4<U> cast() const {
        Tensor4<U> out(n, c, h, w);
        for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = U(data[i]);
        return out;
    }
};

} // namespace ssgn
