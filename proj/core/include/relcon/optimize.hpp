#pragma once

#include <functional>
#include <span>
#include <vector>

namespace relcon {

struct NelderMeadOptions {
    std::size_t max_evaluations = 6000;
    double initial_step = 0.5;  // simplex edge length around the start point
    double x_tolerance = 1e-8;  // simplex diameter
    double f_tolerance = 1e-10; // spread of function values
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimization (standard reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Deterministic for a deterministic objective.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opt = {});

}  // namespace relcon
