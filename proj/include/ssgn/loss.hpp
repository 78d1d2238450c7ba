#pragma once

#include "ssgn/tensor_ops.hpp"

namespace ssgn {

template <typename T>
struct LossResult {
    double value = 0.0;
    double spatial = 0.0;
    double spectral = 0.0;
    Tensor4<T> grad_res;
    Tensor4<T> grad_phi;
};

// Spatial-spectral training loss over a batch of T samples:
//   (1-alpha) * (1/2T) sum ||res - res_target||^2
//   +   alpha * (1/2T) sum ||phi - phi_target||^2
// Targets are the noise residual (Y_k - X_k) and the clean spectral
// gradients of the window. Returns exact gradients w.r.t. both predictions.
template <typename T>
LossResult<T> spatial_spectral_loss(const Tensor4<T>& res, const Tensor4<T>& phi,
                                    const Tensor4<T>& res_target,
                                    const Tensor4<T>& phi_target, double alpha) {
    require(alpha >= 0.0 && alpha <= 1.0, "loss: alpha must lie in [0, 1]");
    require(res.same_shape(res_target), "loss: residual target shape mismatch");
    require(phi.same_shape(phi_target), "loss: spectral target shape mismatch");
    require(res.n == phi.n, "loss: residual/spectral batch sizes differ");

    const double inv_t = 1.0 / double(res.n);
    auto [sp_half, grad_res] = mse(res, res_target);
    auto [ss_half, grad_phi] = mse(phi, phi_target);

    LossResult<T> out;
    out.spatial = sp_half * inv_t;
    out.spectral = ss_half * inv_t;
    out.value = (1.0 - alpha) * out.spatial + alpha * out.spectral;
    const T res_scale = T((1.0 - alpha) * inv_t);
    const T phi_scale = T(alpha * inv_t);
    for (T& g : grad_res.data) g *= res_scale;
    for (T& g : grad_phi.data) g *= phi_scale;
    out.grad_res = std::move(grad_res);
    out.grad_phi = std::move(grad_phi);
    return out;
}

} // namespace ssgn
