#pragma once

#include "blockeig/optimizer.hpp"
#include "blockeig/perturbation.hpp"
#include "blockeig/structured_blocks.hpp"

namespace blockeig {

/// Which certificate components to compute beyond the always-on ones
/// (membership residuals, Gram residual, achieved norm).
struct CheckFlags {
  bool stationarity = true;
  bool invariant_pair = true;
  int lower_bound_samples = 50;
};

struct SolveRequest {
  ProblemInstance instance;
  OptimizerConfig optimizer;
  CheckFlags checks;
};

/// End-to-end pipeline: validate -> southeast form -> maximize s_kappa ->
/// split singular vectors -> Delta* = -alpha* U V^# -> certificates ->
/// un-permute into the original block layout. Deterministic for a fixed
/// request (all randomness flows from optimizer.seed). Throws
/// ValidationError on invalid instances; optimizer non-convergence is
/// reported through the certificate flags, not an exception.
PerturbationResult solve(const SolveRequest& request);

}  // namespace blockeig
