#include "blockeig/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blockeig/matrix_core.hpp"
#include "blockeig/rng.hpp"

namespace blockeig {
namespace {

std::vector<GammaPoint> draw_samples(Index k, int count, double radius,
                                     std::uint64_t seed) {
  std::vector<GammaPoint> samples;
  if (k < 2) {
    samples.push_back(GammaPoint::zero(std::max<Index>(k, 1)));
    return samples;
  }
  SplitMix64 rng(seed);
  const Index dim = k * (k - 1);
  for (int s = 0; s < count; ++s) {
    RVector x(dim);
    for (Index i = 0; i < dim; ++i) x(i) = rng.uniform(-radius, radius);
    samples.push_back(GammaPoint::from_real(k, x));
  }
  return samples;
}

}  // namespace

PerturbationResult solve(const SolveRequest& request) {
  validate(request.instance);
  const ProblemInstance& inst = request.instance;
  const std::span<const Complex> lambdas(inst.lambdas);
  const Index k = static_cast<Index>(inst.lambdas.size());

  const SouthEastForm se = to_southeast(inst);
  const Index m = se.D.rows();
  const double k_norm = spectral_norm(inst.K);

  PerturbationResult result;

  MaximizerResult mr = maximize(se, lambdas, request.optimizer);

  // Any gamma yields a valid lower bound, so a sample that beats the search
  // exposes a missed maximizer; restart from it until none is left.
  const std::uint64_t sample_seed = request.optimizer.seed ^ 0x9E3779B97F4A7C15ULL;
  std::vector<GammaPoint> samples =
      draw_samples(k, request.checks.lower_bound_samples,
                   request.optimizer.init_radius, sample_seed);
  const ObjectiveFunction objective(se, lambdas);
  std::vector<double> sample_values;
  sample_values.reserve(samples.size());
  for (const GammaPoint& g : samples) sample_values.push_back(objective(g).value);
  for (int round = 0; round < 3; ++round) {
    std::vector<GammaPoint> offenders;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (sample_values[i] > mr.alpha_star * (1.0 + 1e-12) + 1e-15) {
        offenders.push_back(samples[i]);
      }
    }
    if (offenders.empty()) break;
    mr = maximize(se, lambdas, request.optimizer, offenders);
  }

  SolveCertificate& cert = result.certificate;
  cert.gamma_star = mr.gamma_star;
  cert.alpha_star = mr.alpha_star;
  cert.simple = mr.simple;
  cert.converged = mr.converged;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    cert.lower_bound_samples.push_back({samples[i], sample_values[i]});
  }

  result.alpha_star = mr.alpha_star;
  result.simplicity_gap = mr.eval.gap;
  result.trace = mr.trace;
  result.restarts_used = mr.restarts_used;

  const ObjectiveFunction& f = objective;
  if (f.conditioning().ill_conditioned) {
    std::ostringstream msg;
    msg << "shifted resolvent condition estimate "
        << f.conditioning().max_resolvent_condition
        << " exceeds 1e8; results may lose accuracy";
    result.warnings.push_back(msg.str());
  }

  const bool zero_case = mr.alpha_star <= 1e-12 * k_norm;
  SingularVectorMats sv = extract_uv(mr.eval, m, k);
  cert.gram_residual = sv.gram_residual;
  cert.rank_ok = sv.rank_ok;

  if (zero_case) {
    cert.zero_perturbation = true;
    result.delta = CMatrix::Zero(m, m);
    result.X_star = se.D;
  } else {
    result.delta = build_delta(sv, mr.alpha_star);
    result.X_star = se.D + result.delta;
  }
  result.achieved_norm = zero_case ? 0.0 : spectral_norm(result.delta);
  result.K_perturbed = assemble_full_matrix(se, result.X_star);
  cert.membership_residuals = verify_membership(result.K_perturbed, lambdas);

  if (request.checks.invariant_pair) {
    const InvariantPair pair = build_invariant_pair(se, lambdas, mr.gamma_star, sv);
    const Index n = se.A.rows();
    CMatrix K_se(n + m, n + m);
    K_se.topLeftCorner(n, n) = se.A;
    K_se.topRightCorner(n, m) = se.B;
    K_se.bottomLeftCorner(m, n) = se.C;
    K_se.bottomRightCorner(m, m) = result.X_star;
    cert.we_residual =
        spectral_norm(K_se * pair.W - pair.W * pair.E) / (k_norm > 0.0 ? k_norm : 1.0);
  }

  if (request.checks.stationarity && mr.simple && !zero_case) {
    cert.stationarity = check_stationarity(se, lambdas, mr.eval);
  }

  if (!mr.converged) {
    result.warnings.push_back(
        "optimizer hit the iteration cap; alpha_star is still a valid lower "
        "bound but optimality is not certified");
  }
  if (!mr.simple && !zero_case) {
    result.warnings.push_back(
        "governing singular value is not simple at gamma_star (sharp point, "
        "typical for normal K); the Gram optimality certificate is advisory "
        "only");
  }
  if (!sv.rank_ok && !zero_case) {
    result.warnings.push_back(
        "U or V is numerically rank deficient; Delta uses the pseudoinverse "
        "and the norm-optimality certificate is advisory only");
  }
  return result;
}

}  // namespace blockeig
