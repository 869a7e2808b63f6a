#include "blockeig/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "blockeig/matrix_core.hpp"

namespace blockeig {

SingularVectorMats extract_uv(const ObjectiveEval& eval, Index m, Index k) {
  if (eval.left_vec.size() != k * m || eval.right_vec.size() != k * m) {
    throw ValidationError("eval", "singular vectors do not have length k*m");
  }
  SingularVectorMats sv;
  sv.U.resize(m, k);
  sv.V.resize(m, k);
  for (Index j = 0; j < k; ++j) {
    sv.U.col(j) = eval.left_vec.segment(j * m, m);
    sv.V.col(j) = eval.right_vec.segment(j * m, m);
  }
  sv.gram_residual = spectral_norm(sv.U.adjoint() * sv.U - sv.V.adjoint() * sv.V);

  const SvdResult du = svd(sv.U);
  const SvdResult dv = svd(sv.V);
  const auto full_rank = [](const RVector& s) {
    return s(s.size() - 1) > 1e-8 * s(0);
  };
  sv.rank_ok = full_rank(du.singular_values) && full_rank(dv.singular_values);
  return sv;
}

CMatrix build_delta(const SingularVectorMats& sv, double alpha_star) {
  if (alpha_star == 0.0) {
    return CMatrix::Zero(sv.U.rows(), sv.U.rows());
  }
  return -alpha_star * sv.U * pinv(sv.V);
}

InvariantPair build_invariant_pair(const SouthEastForm& se,
                                   std::span<const Complex> lambdas,
                                   const GammaPoint& g,
                                   const SingularVectorMats& sv) {
  const Index k = static_cast<Index>(lambdas.size());
  const Index n = se.A.rows();
  const Index m = se.D.rows();
  if (sv.V.cols() != k) {
    throw ValidationError("sv", "column count does not match lambdas");
  }
  const ResolventCache cache = make_resolvent_cache(se, lambdas);

  // w_c = -R_c (B v_c + sum_{r>c} gamma_cr w_r), computed from c = k-1 down.
  std::vector<CVector> w(static_cast<std::size_t>(k));
  for (Index c = k - 1; c >= 0; --c) {
    CVector rhs = se.B * sv.V.col(c);
    for (Index r = c + 1; r < k; ++r) {
      rhs += g(c, r) * w[static_cast<std::size_t>(r)];
    }
    w[static_cast<std::size_t>(c)] = -(cache.R[static_cast<std::size_t>(c)] * rhs);
  }

  InvariantPair pair;
  pair.W.resize(n + m, k);
  pair.E = CMatrix::Zero(k, k);
  for (Index col = 0; col < k; ++col) {
    const Index c = k - 1 - col;  // column `col` carries (w_c, v_c)
    pair.W.col(col).head(n) = w[static_cast<std::size_t>(c)];
    pair.W.col(col).tail(m) = sv.V.col(c);
    pair.E(col, col) = lambdas[static_cast<std::size_t>(c)];
  }
  // Superdiagonals carry the couplings reversed and negated: entry (p, q),
  // p < q, couples column q (index k-1-q) to column p (index k-1-p).
  for (Index p = 0; p < k; ++p) {
    for (Index q = p + 1; q < k; ++q) {
      pair.E(p, q) = -g(k - 1 - q, k - 1 - p);
    }
  }
  return pair;
}

std::vector<double> verify_membership(const CMatrix& K_perturbed,
                                      std::span<const Complex> lambdas) {
  const Index d = K_perturbed.rows();
  const double scale = spectral_norm(K_perturbed);
  std::vector<double> residuals;
  residuals.reserve(lambdas.size());
  for (const Complex& lambda : lambdas) {
    const CMatrix shifted = K_perturbed - lambda * CMatrix::Identity(d, d);
    residuals.push_back(smallest_singular(shifted) / (scale > 0.0 ? scale : 1.0));
  }
  return residuals;
}

bool SolveCertificate::certified(double achieved_norm) const {
  if (zero_perturbation) {
    if (!converged) return false;
    for (double r : membership_residuals) {
      if (r > 1e-6) return false;
    }
    return true;
  }
  if (!converged || !simple || !rank_ok) return false;
  if (std::abs(achieved_norm - alpha_star) > 1e-8 * (1.0 + alpha_star)) return false;
  for (double r : membership_residuals) {
    if (r > 1e-6) return false;
  }
  if (gram_residual > 1e-4) return false;
  if (we_residual > 1e-8) return false;
  if (stationarity > 1e-4 * alpha_star) return false;
  for (const GammaSample& sample : lower_bound_samples) {
    if (sample.s_kappa > achieved_norm + 1e-6) return false;
  }
  return true;
}

CMatrix assemble_full_matrix(const SouthEastForm& se, const CMatrix& X_slot) {
  return reassemble(se, X_slot);
}

}  // namespace blockeig
