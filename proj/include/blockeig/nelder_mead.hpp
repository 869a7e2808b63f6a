#pragma once

#include <functional>

#include "blockeig/types.hpp"

namespace blockeig {

struct NelderMeadOptions {
  double xtol = 1e-10;   // max infinity-norm spread of the simplex
  double ftol = 1e-12;   // max spread of the vertex values
  Index max_iters = 0;   // 0 selects 2000 * dimension
};

struct NelderMeadResult {
  RVector x;
  double f = 0.0;
  Index iterations = 0;
  Index evaluations = 0;
  bool converged = false;
};

/// Downhill simplex minimization with the fminsearch coefficient set
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2). The initial
/// simplex is x0 plus x0 + initial_step * e_i. Fully deterministic.
NelderMeadResult nelder_mead_minimize(
    const std::function<double(const RVector&)>& f, const RVector& x0,
    double initial_step, const NelderMeadOptions& options);

}  // namespace blockeig
