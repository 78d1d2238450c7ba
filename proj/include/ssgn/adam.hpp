#pragma once

#include <cmath>
#include <span>
#include <string>

#include "ssgn/model.hpp"

namespace ssgn {

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One bias-corrected Adam update over a flat parameter block. `t` is the
// 1-based step count including this step.
template <typename T>
void adam_step_flat(std::span<T> params, std::span<const T> grads,
                    std::span<T> m, std::span<T> v, long t, double lr,
                    const AdamHyper& hp = {}) {
    require(params.size() == grads.size() && params.size() == m.size() &&
                params.size() == v.size(),
            "adam_step: parameter/gradient/state lengths differ");
    require(t >= 1, "adam_step: step count must be >= 1");
    const double bc1 = 1.0 - std::pow(hp.beta1, double(t));
    const double bc2 = 1.0 - std::pow(hp.beta2, double(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double g = double(grads[i]);
        if (!std::isfinite(g))
            fail("adam_step: non-finite gradient at coordinate " + std::to_string(i));
        double mi = hp.beta1 * double(m[i]) + (1.0 - hp.beta1) * g;
        double vi = hp.beta2 * double(v[i]) + (1.0 - hp.beta2) * g * g;
        m[i] = T(mi);
        v[i] = T(vi);
        double m_hat = mi / bc1;
        double v_hat = vi / bc2;
        params[i] = T(double(params[i]) - lr * m_hat / (std::sqrt(v_hat) + hp.eps));
    }
}

// Moment state shaped like the model it optimizes.
template <typename T>
struct AdamState {
    SsgnModel<T> m;
    SsgnModel<T> v;
    long t = 0;
    AdamHyper hyper;
};

template <typename T>
AdamState<T> make_adam_state(const SsgnModel<T>& model) {
    return {zeros_like(model), zeros_like(model), 0, {}};
}

template <typename T>
void adam_step(SsgnModel<T>& params, const SsgnModel<T>& grads, AdamState<T>& st,
               double lr) {
    ++st.t;
    auto p = param_spans(params);
    auto g = param_spans(grads);
    auto m = param_spans(st.m);
    auto v = param_spans(st.v);
    for (std::size_t i = 0; i < p.size(); ++i)
        adam_step_flat<T>(p[i], g[i], m[i], v[i], st.t, lr, st.hyper);
}

// lr0 * decay^floor(epoch / every)
inline double lr_at_epoch(double lr0, double decay, int every, int epoch) {
    require(epoch >= 0, "lr_at_epoch: epoch must be >= 0");
    require(every >= 1, "lr_at_epoch: decay interval must be >= 1");
    return lr0 * std::pow(decay, double(epoch / every));
}

} // namespace ssgn
