#include "pplda/sphere_opt.hpp"

#include <algorithm>
#include <cmath>

namespace pplda {

SphereMaxResult maximize_on_sphere(const SphereObjective& objective,
                                   const Vector& start,
                                   const OptimizerOptions& opts) {
    opts.validate();
    SphereMaxResult res;
    Vector u = normalized(start);

    auto [value, grad] = objective.value_and_grad(u);
    double step = opts.initial_step;

    for (std::size_t iter = 1; iter <= opts.max_iter; ++iter) {
        res.iterations = iter;

        Vector pg = grad;
        axpy(-dot(grad, u), u, pg); // project onto the tangent space at u
        const double gn = norm(pg);
        res.projected_grad_norm = gn;
        if (gn <= opts.tol * (1.0 + std::abs(value))) {
            res.converged = true;
            break;
        }

        // Backtracking line search along the normalized ascent direction;
        // the Armijo slope along pg/gn is gn.
        const Vector dir = scaled(pg, 1.0 / gn);
        bool accepted = false;
        Vector candidate;
        for (double s = step; s >= opts.min_step; s *= 0.5) {
            Vector trial = u;
            axpy(s, dir, trial);
            trial = normalized(trial);
            if (objective.value(trial) > value + opts.armijo * s * gn) {
                candidate = std::move(trial);
                step = std::min(opts.initial_step, 2.0 * s);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No ascent representable in double precision: numerically
            // stationary when the projected gradient is already tiny.
            res.converged = gn <= opts.stall_tol * (1.0 + std::abs(value) + norm(grad));
            break;
        }

        // Direction change modulo sign.
        const double d_plus = norm(sub(candidate, u));
        const double d_minus = norm(add(candidate, u));
        const double du = std::min(d_plus, d_minus);
        u = std::move(candidate);
        std::tie(value, grad) = objective.value_and_grad(u);
        if (du < opts.tol) {
            Vector pg2 = grad;
            axpy(-dot(grad, u), u, pg2);
            res.projected_grad_norm = norm(pg2);
            res.converged = true;
            break;
        }
    }

    res.direction = std::move(u);
    res.value = value;
    return res;
}

} // namespace pplda
