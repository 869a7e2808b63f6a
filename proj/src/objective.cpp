#include "blockeig/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blockeig/matrix_core.hpp"

namespace blockeig {

ObjectiveFunction::ObjectiveFunction(const SouthEastForm& se,
                                     std::span<const Complex> lambdas)
    : lambdas_(lambdas.begin(), lambdas.end()),
      D_(se.D),
      cache_(make_resolvent_cache(se, lambdas)) {
  if (k() > m()) {
    throw ValidationError("lambdas", "more eigenvalues than target block rows");
  }
}

CMatrix ObjectiveFunction::schur_at(const GammaPoint& g) const {
  return build_sk_explicit_cached(cache_, D_, lambdas_, g);
}

ObjectiveEval ObjectiveFunction::operator()(const GammaPoint& g) const {
  if (!g.all_finite()) {
    throw ValidationError("gamma", "non-finite gamma coordinates");
  }
  const CMatrix sk = schur_at(g);
  const SvdResult dec = svd(sk);
  const Index kappa = kappa_index_for(k(), m());
  const Index idx = kappa - 1;

  ObjectiveEval eval;
  eval.gamma = g;
  eval.kappa_index = kappa;
  eval.value = dec.singular_values(idx);
  eval.left_vec = dec.left_vectors.col(idx);
  eval.right_vec = dec.right_vectors.col(idx);

  const double s1 = dec.singular_values(0);
  double gap_abs = std::numeric_limits<double>::infinity();
  if (idx > 0) {
    gap_abs = std::min(gap_abs, dec.singular_values(idx - 1) - dec.singular_values(idx));
  }
  if (idx + 1 < dec.singular_values.size()) {
    gap_abs = std::min(gap_abs, dec.singular_values(idx) - dec.singular_values(idx + 1));
  }
  if (!std::isfinite(gap_abs)) {
    eval.gap = 1.0;  // single singular value, nothing to collide with
  } else {
    eval.gap = (s1 > 0.0) ? gap_abs / s1 : 0.0;
  }
  return eval;
}

ObjectiveEval eval_objective(const SouthEastForm& se,
                             std::span<const Complex> lambdas,
                             const GammaPoint& g) {
  return ObjectiveFunction(se, lambdas)(g);
}

std::vector<std::pair<double, double>> sweep_slice(
    const SouthEastForm& se, std::span<const Complex> lambdas,
    const GammaPoint& base, const GammaPoint& direction,
    std::span<const double> t_grid) {
  if (direction.packed().norm() == 0.0) {
    throw ValidationError("direction", "must be nonzero");
  }
  const ObjectiveFunction f(se, lambdas);
  std::vector<std::pair<double, double>> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    out.emplace_back(t, f(gamma_on_ray(base, direction, t)).value);
  }
  return out;
}

double check_stationarity(const SouthEastForm& se,
                          std::span<const Complex> lambdas,
                          const ObjectiveEval& eval) {
  const ObjectiveFunction f(se, lambdas);
  const Index k = f.k();
  if (k == 1) return 0.0;

  const RVector x = eval.gamma.to_real();
  double worst = 0.0;
  for (Index t = 0; t < x.size(); ++t) {
    const double h = 1e-6 * (1.0 + std::abs(x(t)));
    RVector xp = x, xm = x;
    xp(t) += h;
    xm(t) -= h;
    const CMatrix d_sk = (f.schur_at(GammaPoint::from_real(k, xp)) -
                          f.schur_at(GammaPoint::from_real(k, xm))) /
                         (2.0 * h);
    const Complex derivative = eval.left_vec.dot(d_sk * eval.right_vec);
    worst = std::max(worst, std::abs(derivative.real()));
  }
  return worst;
}

}  // namespace blockeig
