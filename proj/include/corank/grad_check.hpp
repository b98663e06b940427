#pragma once

#include "corank/parameters.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace corank {

struct GradCheckReport {
    std::map<std::string, double> max_rel_error;  // per parameter
    double max_error = 0.0;
    std::size_t coordinates = 0;
    std::string worst_parameter;
};

struct GradCheckOptions {
    double eps = 1e-5;
    std::size_t coords_per_parameter = 4;
    std::uint64_t seed = 7;
    // Relative error is |a - n| / max(|a|, |n|, floor); coordinates whose
    // gradients are both below the floor are compared absolutely.
    double floor = 1e-6;
};

/// Compares reverse-mode gradients with central differences on sampled coordinates.
inline GradCheckReport grad_check(ParameterStore<double>& params, const std::function<Tensor()>& loss_fn,
                                  GradCheckOptions opts = {})
{
    if (opts.eps < 1e-7 || opts.eps > 1e-3) {
        throw std::invalid_argument("grad_check: eps must lie in [1e-7, 1e-3]");
    }
    params.zero_grad();
    Tensor loss = loss_fn();
    if (loss.size() != 1) {
        throw shape_error("grad_check: loss must be a scalar");
    }
    loss.backward();

    GradCheckReport report;
    std::mt19937_64 rng(opts.seed);
    for (auto& [name, p] : params) {
        if (!p.trainable) {
            continue;
        }
        const Matrix<double> analytic = p.tensor.grad();
        auto& values = p.tensor.mutable_value();
        const auto n = static_cast<std::size_t>(values.size());
        std::vector<std::size_t> coords(n);
        for (std::size_t i = 0; i < n; ++i) {
            coords[i] = i;
        }
        std::shuffle(coords.begin(), coords.end(), rng);
        coords.resize(std::min(n, opts.coords_per_parameter));

        double worst = 0.0;
        for (std::size_t c : coords) {
            double& slot = values.data()[c];
            const double saved = slot;
            slot = saved + opts.eps;
            const double up = loss_fn().item();
            slot = saved - opts.eps;
            const double down = loss_fn().item();
            slot = saved;
            const double numeric = (up - down) / (2.0 * opts.eps);
            const double a = analytic.data()[c];
            const double denom = std::max({std::abs(a), std::abs(numeric), opts.floor});
            worst = std::max(worst, std::abs(a - numeric) / denom);
            ++report.coordinates;
        }
        report.max_rel_error[name] = worst;
        if (worst >= report.max_error) {
            report.max_error = worst;
            report.worst_parameter = name;
        }
    }
    params.zero_grad();
    return report;
}

}  // namespace corank
