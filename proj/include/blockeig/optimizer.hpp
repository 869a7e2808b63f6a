#pragma once

#include <span>
#include <utility>
#include <vector>

#include "blockeig/objective.hpp"
#include "blockeig/structured_blocks.hpp"
#include "blockeig/types.hpp"

namespace blockeig {

struct OptimizerConfig {
  std::uint64_t seed = 1;
  int restarts = 8;
  double xtol = 1e-10;
  double ftol = 1e-12;
  Index max_iters = 0;       // per restart; 0 selects 2000 * dimension
  double init_radius = 10.0;
};

struct MaximizerResult {
  GammaPoint gamma_star;
  double alpha_star = 0.0;
  ObjectiveEval eval;
  std::vector<std::pair<Index, double>> trace;  // (cumulative evals, best value)
  int restarts_used = 0;
  bool simple = false;     // governing singular value separated at gamma_star
  bool converged = false;  // the restart that produced gamma_star converged
};

/// Maximizes s_kappa over the real coordinates of gamma by multistart
/// Nelder-Mead: the origin first, then restarts-1 seeded uniform points in
/// [-init_radius, init_radius]^dim, then any caller-provided extra starts.
/// Ties between restarts resolve to the earlier one. k = 1 has an empty
/// gamma space and returns the single evaluation directly.
MaximizerResult maximize(const SouthEastForm& se,
                         std::span<const Complex> lambdas,
                         const OptimizerConfig& config,
                         std::span<const GammaPoint> extra_starts = {});

}  // namespace blockeig
