#include "blockeig/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "blockeig/nelder_mead.hpp"
#include "blockeig/rng.hpp"

namespace blockeig {

MaximizerResult maximize(const SouthEastForm& se,
                         std::span<const Complex> lambdas,
                         const OptimizerConfig& config,
                         std::span<const GammaPoint> extra_starts) {
  if (config.restarts < 1) {
    throw ValidationError("restarts", "must be at least 1");
  }
  const ObjectiveFunction objective(se, lambdas);
  const Index k = objective.k();
  const Index dim = objective.dim();

  MaximizerResult result;
  if (dim == 0) {
    result.eval = objective(GammaPoint::zero(k));
    result.gamma_star = result.eval.gamma;
    result.alpha_star = result.eval.value;
    result.trace.emplace_back(1, result.alpha_star);
    result.restarts_used = 0;
    result.simple = result.eval.gap > kSimplicityTol;
    result.converged = true;
    return result;
  }

  std::vector<RVector> starts;
  starts.push_back(RVector::Zero(dim));
  SplitMix64 rng(config.seed);
  for (int r = 1; r < config.restarts; ++r) {
    RVector x(dim);
    for (Index i = 0; i < dim; ++i) {
      x(i) = rng.uniform(-config.init_radius, config.init_radius);
    }
    starts.push_back(std::move(x));
  }
  for (const GammaPoint& g : extra_starts) {
    if (g.k() != k) {
      throw ValidationError("extra_starts", "gamma arity does not match lambdas");
    }
    starts.push_back(g.to_real());
  }

  Index total_evals = 0;
  auto negated = [&](const RVector& x) {
    return -objective(GammaPoint::from_real(k, x)).value;
  };

  NelderMeadOptions nm;
  nm.xtol = config.xtol;
  nm.ftol = config.ftol;
  nm.max_iters = config.max_iters;

  bool have_best = false;
  double best_value = 0.0;
  RVector best_x;
  bool best_converged = false;
  for (const RVector& x0 : starts) {
    const double step = std::max(1.0, 0.05 * x0.cwiseAbs().maxCoeff());
    const NelderMeadResult run = nelder_mead_minimize(negated, x0, step, nm);
    total_evals += run.evaluations;
    const double value = -run.f;
    if (!have_best || value > best_value) {
      have_best = true;
      best_value = value;
      best_x = run.x;
      best_converged = run.converged;
      result.trace.emplace_back(total_evals, value);
    }
  }

  result.eval = objective(GammaPoint::from_real(k, best_x));
  result.gamma_star = result.eval.gamma;
  result.alpha_star = result.eval.value;
  result.restarts_used = static_cast<int>(starts.size());
  result.simple = result.eval.gap > kSimplicityTol;
  result.converged = best_converged;
  return result;
}

}  // namespace blockeig
