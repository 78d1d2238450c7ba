#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "ssgn/error.hpp"

namespace ssgn {

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::size_t worst_coord = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

// Central finite differences against an analytic gradient. `f` is evaluated
// at perturbed copies of x (x is restored after each coordinate); relative
// error per coordinate is |a - n| / max(|a|, |n|, 1e-8).
template <typename F>
GradCheckReport check_gradients(F&& f, std::span<double> x,
                                std::span<const double> analytic, double step,
                                double tolerance) {
    require(x.size() == analytic.size(),
            "check_gradients: gradient length does not match input length");
    require(step > 0.0, "check_gradients: step must be positive");

    GradCheckReport report;
    report.tolerance = tolerance;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + step;
        double fp = f(std::span<const double>(x.data(), x.size()));
        x[i] = saved - step;
        double fm = f(std::span<const double>(x.data(), x.size()));
        x[i] = saved;

        if (!std::isfinite(fp) || !std::isfinite(fm))
            fail("check_gradients: non-finite function value encountered");
        double numeric = (fp - fm) / (2.0 * step);
        double a = analytic[i];
        double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
        double rel = std::fabs(a - numeric) / denom;
        if (rel > report.max_rel_err) {
            report.max_rel_err = rel;
            report.worst_coord = i;
            report.worst_analytic = a;
            report.worst_numeric = numeric;
        }
    }
    report.passed = report.max_rel_err <= tolerance;
    return report;
}

} // namespace ssgn
