#pragma once

#include <span>
#include <utility>
#include <vector>

#include "blockeig/structured_blocks.hpp"
#include "blockeig/types.hpp"

namespace blockeig {

/// 1-based position (descending order) of the governing singular value of
/// S_k(D, gamma): k(m-1)+1, i.e. the k-th smallest of the km values.
inline Index kappa_index_for(Index k, Index m) { return k * (m - 1) + 1; }

/// One evaluation of s_kappa(gamma) with its singular triplet.
/// gap is the distance from s_kappa to its nearest existing neighbour,
/// relative to s_1 (a 1x1 spectrum counts as trivially well separated).
struct ObjectiveEval {
  GammaPoint gamma;
  double value = 0.0;
  Index kappa_index = 0;  // 1-based, descending order
  CVector left_vec;       // unit, length k*m
  CVector right_vec;      // unit, length k*m
  double gap = 0.0;
};

/// Evaluates s_kappa(gamma) = s_{k(m-1)+1}(S_k(D, gamma)) at fixed
/// (se, lambdas), caching the shifted resolvents across calls.
class ObjectiveFunction {
 public:
  ObjectiveFunction(const SouthEastForm& se, std::span<const Complex> lambdas);

  ObjectiveEval operator()(const GammaPoint& g) const;
  double value(const GammaPoint& g) const { return (*this)(g).value; }

  Index k() const { return static_cast<Index>(lambdas_.size()); }
  Index m() const { return D_.rows(); }
  Index dim() const { return k() * (k() - 1); }  // real search dimension
  const ConditionReport& conditioning() const { return cache_.condition; }

  /// S_k(D, gamma) by the explicit route.
  CMatrix schur_at(const GammaPoint& g) const;

 private:
  std::vector<Complex> lambdas_;
  CMatrix D_;
  ResolventCache cache_;
};

ObjectiveEval eval_objective(const SouthEastForm& se,
                             std::span<const Complex> lambdas,
                             const GammaPoint& g);

/// s_kappa along gamma(t) = base + t * direction over the given grid.
std::vector<std::pair<double, double>> sweep_slice(
    const SouthEastForm& se, std::span<const Complex> lambdas,
    const GammaPoint& base, const GammaPoint& direction,
    std::span<const double> t_grid);

/// Max over all real gamma coordinates of |Re(u^* dS/dt v)| with the
/// derivative taken by central differences (step 1e-6 * (1 + |coordinate|)).
/// Small values certify first-order stationarity; k = 1 returns 0.
double check_stationarity(const SouthEastForm& se,
                          std::span<const Complex> lambdas,
                          const ObjectiveEval& eval);

}  // namespace blockeig
