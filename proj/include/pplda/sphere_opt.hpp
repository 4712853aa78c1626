#ifndef PPLDA_SPHERE_OPT_HPP
#define PPLDA_SPHERE_OPT_HPP

#include <cstddef>
#include <functional>
#include <utility>

#include "pplda/linalg.hpp"

namespace pplda {

/// Options for projected gradient ascent on the unit sphere.
struct OptimizerOptions {
    std::size_t max_iter = 2000;
    double tol = 1e-10;       // on direction change / relative gradient norm
    std::size_t restarts = 10;
    double initial_step = 1.0;
    double min_step = 1e-16;  // line search gives up below this
    double armijo = 1e-4;
    // When the line search exhausts machine precision, the run still counts
    // as converged if the projected gradient is below this (relative) level;
    // double-precision index evaluations bottom out around 1e-9.
    double stall_tol = 1e-7;

    void validate() const {
        if (max_iter == 0 || !(tol > 0.0) || !(initial_step > 0.0) ||
            !(min_step > 0.0) || !(armijo > 0.0) || !(stall_tol > 0.0))
            throw ValidationError("OptimizerOptions: all parameters must be positive");
    }
};

/// Objective on the sphere: a full evaluation returns (value, Euclidean
/// gradient); the value-only form backs the line search.
struct SphereObjective {
    std::function<std::pair<double, Vector>(const Vector&)> value_and_grad;
    std::function<double(const Vector&)> value;
};

struct SphereMaxResult {
    Vector direction;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double projected_grad_norm = 0.0;
};

/// Maximizes the objective over the unit sphere by projected gradient
/// ascent with normalization retraction and backtracking (halving) line
/// search. Convergence means projected gradient norm < tol*(1+|value|)
/// or direction change < tol. A failed line search terminates the run
/// with converged=false rather than throwing.
SphereMaxResult maximize_on_sphere(const SphereObjective& objective,
                                   const Vector& start,
                                   const OptimizerOptions& opts);

} // namespace pplda

#endif
