#pragma once

#include <span>
#include <string>
#include <vector>

#include "blockeig/objective.hpp"
#include "blockeig/structured_blocks.hpp"
#include "blockeig/types.hpp"

namespace blockeig {

/// Columns are the k consecutive m-blocks of the governing singular vectors.
/// gram_residual = ||U^*U - V^*V||_2 is the optimality witness; rank_ok
/// requires both matrices to have numerical full column rank
/// (smallest singular value > 1e-8 * largest).
struct SingularVectorMats {
  CMatrix U;  // m x k
  CMatrix V;  // m x k
  double gram_residual = 0.0;
  bool rank_ok = false;
};

SingularVectorMats extract_uv(const ObjectiveEval& eval, Index m, Index k);

/// Delta = -alpha_star * U * V^#. Satisfies Delta * v_i = -alpha_star * u_i
/// when V has full column rank.
CMatrix build_delta(const SingularVectorMats& sv, double alpha_star);

/// Tall invariant-subspace pair: W stacks the cascaded resolvent vectors w_i
/// over the v_i columns in reversed order; E is upper triangular with the
/// lambdas (reversed) on its diagonal, so K_X W = W E certifies membership.
struct InvariantPair {
  CMatrix W;  // (n + m) x k
  CMatrix E;  // k x k upper triangular
};

InvariantPair build_invariant_pair(const SouthEastForm& se,
                                   std::span<const Complex> lambdas,
                                   const GammaPoint& g,
                                   const SingularVectorMats& sv);

/// Per-lambda relative residual smallest_singular(K - lambda I) / ||K||_2.
std::vector<double> verify_membership(const CMatrix& K_perturbed,
                                      std::span<const Complex> lambdas);

struct GammaSample {
  GammaPoint gamma;
  double s_kappa = 0.0;
};

struct SolveCertificate {
  GammaPoint gamma_star;
  double alpha_star = 0.0;
  double gram_residual = 0.0;
  std::vector<double> membership_residuals;
  double we_residual = 0.0;
  double stationarity = 0.0;
  std::vector<GammaSample> lower_bound_samples;
  bool simple = false;
  bool converged = false;
  bool rank_ok = false;
  bool zero_perturbation = false;  // maximum was ~0, Delta = 0 returned

  /// True when every hypothesis of the optimality argument held and all
  /// residual gates passed; front ends report success (exit 0) only then.
  /// A zero perturbation is certified by membership alone (norm 0 cannot
  /// be improved).
  bool certified(double achieved_norm) const;
};

struct PerturbationResult {
  CMatrix delta;        // m x m, the target-block perturbation
  CMatrix X_star;       // m x m, D + delta
  CMatrix K_perturbed;  // full matrix, original block layout
  double achieved_norm = 0.0;
  double alpha_star = 0.0;
  SolveCertificate certificate;
  // diagnostics
  double simplicity_gap = 0.0;
  std::vector<std::pair<Index, double>> trace;
  int restarts_used = 0;
  std::vector<std::string> warnings;
};

/// Embeds X_slot in the southeast corner and undoes the permutation,
/// leaving every other block bit-identical to the original K.
CMatrix assemble_full_matrix(const SouthEastForm& se, const CMatrix& X_slot);

}  // namespace blockeig
