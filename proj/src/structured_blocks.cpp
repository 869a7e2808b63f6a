#include "blockeig/structured_blocks.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "blockeig/matrix_core.hpp"

namespace blockeig {
namespace {

// Truncated pseudoinverse with an absolute singular-value cutoff.
CMatrix pinv_with_cutoff(const CMatrix& m, double cutoff) {
  const SvdResult dec = svd(m);
  const Index r = dec.singular_values.size();
  RVector inv_s = RVector::Zero(r);
  for (Index i = 0; i < r; ++i) {
    if (dec.singular_values(i) > cutoff) inv_s(i) = 1.0 / dec.singular_values(i);
  }
  return dec.right_vectors.leftCols(r) * inv_s.asDiagonal() *
         dec.left_vectors.leftCols(r).adjoint();
}

// Upper-triangle blocks a[i][j] (j >= i) of the pseudoinverse of stacked_A,
// from the back-substitution recursion; block (i, j) lives at a[i][j - i].
std::vector<std::vector<CMatrix>> pinv_blocks(const ResolventCache& cache,
                                              const GammaPoint& g) {
  const Index k = static_cast<Index>(cache.R.size());
  const Index n = cache.R.front().rows();
  std::vector<std::vector<CMatrix>> a(static_cast<std::size_t>(k));
  for (Index i = k - 1; i >= 0; --i) {
    a[i].resize(static_cast<std::size_t>(k - i));
    a[i][0] = cache.R[i];
    for (Index j = i + 1; j < k; ++j) {
      CMatrix t = CMatrix::Zero(n, n);
      for (Index r = i + 1; r <= j; ++r) {
        t += g(i, r) * a[r][j - r];
      }
      a[i][j - i] = -cache.R[i] * t;
    }
  }
  return a;
}

void check_lambda_count(std::span<const Complex> lambdas) {
  if (lambdas.empty()) {
    throw ValidationError("lambdas", "at least one prescribed eigenvalue required");
  }
}

}  // namespace

void validate(const ProblemInstance& instance) {
  const Index d = instance.K.rows();
  if (d < 1 || instance.K.cols() != d) {
    throw ValidationError("matrix", "K must be square and nonempty");
  }
  if (!is_finite(instance.K)) {
    throw ValidationError("matrix", "K has non-finite entries");
  }
  if (instance.block_sizes.size() < 2) {
    throw ValidationError("block_sizes",
                          "need at least two diagonal blocks (one must stay untouched)");
  }
  Index sum = 0;
  for (std::size_t b = 0; b < instance.block_sizes.size(); ++b) {
    if (instance.block_sizes[b] < 1) {
      throw ValidationError("block_sizes", "block " + std::to_string(b + 1) +
                                               " has non-positive size");
    }
    sum += instance.block_sizes[b];
  }
  if (sum != d) {
    std::ostringstream msg;
    msg << "block sizes sum to " << sum << " but K is " << d << "x" << d;
    throw ValidationError("block_sizes", msg.str());
  }
  if (instance.target_block < 0 ||
      instance.target_block >= static_cast<Index>(instance.block_sizes.size())) {
    throw ValidationError("target_block", "index out of range");
  }
  const Index k = static_cast<Index>(instance.lambdas.size());
  check_lambda_count(instance.lambdas);
  const Index m = instance.block_sizes[static_cast<std::size_t>(instance.target_block)];
  if (k > m) {
    std::ostringstream msg;
    msg << k << " eigenvalues prescribed but the target block is only " << m << "x" << m;
    throw ValidationError("lambdas", msg.str());
  }
  double lam_scale = 0.0;
  for (const Complex& l : instance.lambdas) {
    if (!std::isfinite(l.real()) || !std::isfinite(l.imag())) {
      throw ValidationError("lambdas", "non-finite eigenvalue");
    }
    lam_scale = std::max(lam_scale, std::abs(l));
  }
  for (std::size_t i = 0; i < instance.lambdas.size(); ++i) {
    for (std::size_t j = i + 1; j < instance.lambdas.size(); ++j) {
      if (std::abs(instance.lambdas[i] - instance.lambdas[j]) <=
          1e-12 * (1.0 + lam_scale)) {
        std::ostringstream msg;
        msg << "lambda " << (i + 1) << " and lambda " << (j + 1)
            << " are not distinct";
        throw ValidationError("lambdas", msg.str());
      }
    }
  }

  const SouthEastForm se = to_southeast(instance);
  const double a_norm = spectral_norm(se.A);
  const Index n = se.A.rows();
  for (std::size_t i = 0; i < instance.lambdas.size(); ++i) {
    const CMatrix shifted =
        se.A - instance.lambdas[i] * CMatrix::Identity(n, n);
    if (smallest_singular(shifted) <= kEigTol * a_norm) {
      std::ostringstream msg;
      msg << "lambda " << (i + 1)
          << " is (numerically) an eigenvalue of the untouched part";
      throw ValidationError("lambdas", msg.str());
    }
  }
}

SouthEastForm to_southeast(const ProblemInstance& instance) {
  SouthEastForm se;
  se.permutation = southeast_permutation(instance.block_sizes, instance.target_block);
  const CMatrix permuted = apply_symmetric_permutation(instance.K, se.permutation);
  const Index m = instance.block_sizes[static_cast<std::size_t>(instance.target_block)];
  const Index n = instance.K.rows() - m;
  se.A = permuted.topLeftCorner(n, n);
  se.B = permuted.topRightCorner(n, m);
  se.C = permuted.bottomLeftCorner(m, n);
  se.D = permuted.bottomRightCorner(m, m);
  return se;
}

CMatrix reassemble(const SouthEastForm& se, const CMatrix& D_slot) {
  const Index n = se.A.rows();
  const Index m = se.D.rows();
  if (D_slot.rows() != m || D_slot.cols() != m) {
    throw ValidationError("D_slot", "size does not match the target block");
  }
  CMatrix full(n + m, n + m);
  full.topLeftCorner(n, n) = se.A;
  full.topRightCorner(n, m) = se.B;
  full.bottomLeftCorner(m, n) = se.C;
  full.bottomRightCorner(m, m) = D_slot;
  return apply_symmetric_permutation(full, se.permutation.inverse());
}

GammaPoint GammaPoint::zero(Index k) {
  if (k < 1) throw ValidationError("gamma", "k must be at least 1");
  GammaPoint g;
  g.k_ = k;
  g.values_ = CVector::Zero(k * (k - 1) / 2);
  return g;
}

Index GammaPoint::pack(Index k, Index i, Index j) {
  if (i < 0 || j <= i || j >= k) {
    throw ValidationError("gamma", "pair index out of the strict upper triangle");
  }
  return i * (2 * k - i - 1) / 2 + (j - i - 1);
}

RVector GammaPoint::to_real() const {
  RVector x(2 * pair_count());
  for (Index t = 0; t < pair_count(); ++t) {
    x(2 * t) = values_(t).real();
    x(2 * t + 1) = values_(t).imag();
  }
  return x;
}

GammaPoint GammaPoint::from_real(Index k, const RVector& x) {
  GammaPoint g = GammaPoint::zero(k);
  if (x.size() != 2 * g.pair_count()) {
    throw ValidationError("gamma", "real coordinate vector has wrong length");
  }
  for (Index t = 0; t < g.pair_count(); ++t) {
    g.values_(t) = Complex(x(2 * t), x(2 * t + 1));
  }
  return g;
}

GammaPoint gamma_on_ray(const GammaPoint& base, const GammaPoint& direction,
                        double t) {
  if (base.k() != direction.k()) {
    throw ValidationError("gamma", "base and direction have different k");
  }
  GammaPoint g = base;
  g.packed() += t * direction.packed();
  return g;
}

ResolventCache make_resolvent_cache(const SouthEastForm& se,
                                    std::span<const Complex> lambdas) {
  check_lambda_count(lambdas);
  const Index n = se.A.rows();
  ResolventCache cache;
  cache.B = se.B;
  cache.C = se.C;
  cache.R.reserve(lambdas.size());
  cache.CR.reserve(lambdas.size());
  cache.RB.reserve(lambdas.size());
  for (const Complex& lambda : lambdas) {
    const CMatrix shifted = se.A - lambda * CMatrix::Identity(n, n);
    const SvdResult dec = svd(shifted);
    const double s_min = dec.singular_values(dec.singular_values.size() - 1);
    if (s_min == 0.0) {
      throw ValidationError("lambdas",
                            "A - lambda*I is exactly singular; instance invalid");
    }
    const double cond = dec.singular_values(0) / s_min;
    cache.condition.max_resolvent_condition =
        std::max(cache.condition.max_resolvent_condition, cond);
    if (cond > 1.0 / kEigTol) cache.condition.ill_conditioned = true;
    Eigen::PartialPivLU<CMatrix> lu(shifted);
    const CMatrix inv = lu.inverse();
    cache.R.push_back(inv);
    cache.CR.push_back(se.C * inv);
    cache.RB.push_back(inv * se.B);
  }
  return cache;
}

SkIntermediates build_structured(const SouthEastForm& se, const CMatrix& X,
                                 std::span<const Complex> lambdas,
                                 const GammaPoint& g) {
  check_lambda_count(lambdas);
  const Index k = static_cast<Index>(lambdas.size());
  if (g.k() != k) throw ValidationError("gamma", "gamma arity does not match lambdas");
  const Index n = se.A.rows();
  const Index m = se.D.rows();
  if (X.rows() != m || X.cols() != m) {
    throw ValidationError("X", "size does not match the target block");
  }

  SkIntermediates out;
  out.stacked_A = CMatrix::Zero(k * n, k * n);
  out.stacked_B = CMatrix::Zero(k * n, k * m);
  out.stacked_C = CMatrix::Zero(k * m, k * n);
  out.stacked_X = CMatrix::Zero(k * m, k * m);
  const CMatrix I_n = CMatrix::Identity(n, n);
  const CMatrix I_m = CMatrix::Identity(m, m);
  for (Index i = 0; i < k; ++i) {
    out.stacked_A.block(i * n, i * n, n, n) = se.A - lambdas[i] * I_n;
    out.stacked_B.block(i * n, i * m, n, m) = se.B;
    out.stacked_C.block(i * m, i * n, m, n) = se.C;
    out.stacked_X.block(i * m, i * m, m, m) = X - lambdas[i] * I_m;
    for (Index j = i + 1; j < k; ++j) {
      out.stacked_A.block(i * n, j * n, n, n) = g(i, j) * I_n;
      out.stacked_X.block(i * m, j * m, m, m) = g(i, j) * I_m;
    }
  }
  return out;
}

SkIntermediates build_structured(const SouthEastForm& se,
                                 std::span<const Complex> lambdas,
                                 const GammaPoint& g) {
  return build_structured(se, se.D, lambdas, g);
}

CMatrix pinv_stacked_a_recursive(const SouthEastForm& se,
                                 std::span<const Complex> lambdas,
                                 const GammaPoint& g, ConditionReport* report) {
  const ResolventCache cache = make_resolvent_cache(se, lambdas);
  if (report != nullptr) *report = cache.condition;
  const Index k = static_cast<Index>(lambdas.size());
  const Index n = se.A.rows();
  const auto a = pinv_blocks(cache, g);
  CMatrix out = CMatrix::Zero(k * n, k * n);
  for (Index i = 0; i < k; ++i) {
    for (Index j = i; j < k; ++j) {
      out.block(i * n, j * n, n, n) = a[i][j - i];
    }
  }
  return out;
}

SkIntermediates build_sk_pinv(const SouthEastForm& se, const CMatrix& X,
                              std::span<const Complex> lambdas,
                              const GammaPoint& g) {
  SkIntermediates out = build_structured(se, X, lambdas, g);
  const Index kn = out.stacked_A.rows();
  const Index km = out.stacked_X.rows();
  const CMatrix I_kn = CMatrix::Identity(kn, kn);
  const CMatrix I_km = CMatrix::Identity(km, km);

  out.stacked_A_pinv = pinv(out.stacked_A);
  out.range_defect_B = (I_kn - out.stacked_A * out.stacked_A_pinv) * out.stacked_B;
  out.corange_defect_C = out.stacked_C * (I_kn - out.stacked_A_pinv * out.stacked_A);

  // The defects vanish identically when stacked_A is invertible, so their
  // numerical rank must be judged against the scale of B and C, not against
  // their own roundoff-sized leading singular value.
  const double tol = default_rank_tol(kn, km);
  const double cut_M = tol * spectral_norm(out.stacked_B);
  const double cut_N = tol * spectral_norm(out.stacked_C);
  const CMatrix M_pinv = pinv_with_cutoff(out.range_defect_B, cut_M);
  const CMatrix N_pinv = pinv_with_cutoff(out.corange_defect_C, cut_N);

  out.schur = (I_km - out.corange_defect_C * N_pinv) *
              (out.stacked_X - out.stacked_C * out.stacked_A_pinv * out.stacked_B) *
              (I_km - M_pinv * out.range_defect_B);
  return out;
}

SkIntermediates build_sk_pinv(const SouthEastForm& se,
                              std::span<const Complex> lambdas,
                              const GammaPoint& g) {
  return build_sk_pinv(se, se.D, lambdas, g);
}

CMatrix build_sk_explicit_cached(const ResolventCache& cache, const CMatrix& X,
                                 std::span<const Complex> lambdas,
                                 const GammaPoint& g, BlockFormulaParts* parts) {
  const Index k = static_cast<Index>(lambdas.size());
  if (g.k() != k) throw ValidationError("gamma", "gamma arity does not match lambdas");
  const Index m = X.rows();
  const CMatrix I_m = CMatrix::Identity(m, m);
  const auto a = pinv_blocks(cache, g);

  CMatrix sk = CMatrix::Zero(k * m, k * m);
  if (parts != nullptr) {
    parts->schur_diag.clear();
    parts->couplings.clear();
  }
  for (Index i = 0; i < k; ++i) {
    CMatrix M_i = (X - lambdas[i] * I_m) - cache.CR[i] * cache.B;
    sk.block(i * m, i * m, m, m) = M_i;
    if (parts != nullptr) parts->schur_diag.push_back(std::move(M_i));
    for (Index j = i + 1; j < k; ++j) {
      CMatrix t = CMatrix::Zero(cache.R[i].rows(), cache.R[i].cols());
      for (Index r = i + 1; r <= j; ++r) {
        t += g(i, r) * a[r][j - r];
      }
      sk.block(i * m, j * m, m, m) = g(i, j) * I_m + cache.CR[i] * t * cache.B;
      if (parts != nullptr) {
        parts->couplings.emplace(std::make_pair(i, j),
                                 I_m + cache.CR[i] * cache.RB[j]);
      }
    }
  }
  return sk;
}

std::pair<CMatrix, BlockFormulaParts> build_sk_explicit(
    const SouthEastForm& se, const CMatrix& X, std::span<const Complex> lambdas,
    const GammaPoint& g, ConditionReport* report) {
  const ResolventCache cache = make_resolvent_cache(se, lambdas);
  if (report != nullptr) *report = cache.condition;
  BlockFormulaParts parts;
  CMatrix sk = build_sk_explicit_cached(cache, X, lambdas, g, &parts);
  return {std::move(sk), std::move(parts)};
}

std::pair<CMatrix, BlockFormulaParts> build_sk_explicit(
    const SouthEastForm& se, std::span<const Complex> lambdas,
    const GammaPoint& g, ConditionReport* report) {
  return build_sk_explicit(se, se.D, lambdas, g, report);
}

CMatrix resolvent_chain(const SouthEastForm& se, std::span<const Complex> lambdas,
                        std::span<const Index> sequence) {
  if (sequence.empty()) throw ValidationError("sequence", "must be nonempty");
  for (std::size_t t = 0; t + 1 < sequence.size(); ++t) {
    if (sequence[t] >= sequence[t + 1]) {
      throw ValidationError("sequence", "must be strictly increasing");
    }
  }
  const ResolventCache cache = make_resolvent_cache(se, lambdas);
  CMatrix acc = se.B;
  for (std::size_t t = sequence.size(); t-- > 0;) {
    acc = cache.R[static_cast<std::size_t>(sequence[t])] * acc;
  }
  return se.C * acc;
}

Index rho(const SouthEastForm& se, std::span<const Complex> lambdas,
          const GammaPoint& g) {
  const SkIntermediates s = build_structured(se, lambdas, g);
  const Index kn = s.stacked_A.rows();
  const Index km = s.stacked_C.rows();
  CMatrix row_concat(kn, kn + s.stacked_B.cols());
  row_concat << s.stacked_A, s.stacked_B;
  CMatrix col_concat(kn + km, kn);
  col_concat << s.stacked_A, s.stacked_C;
  return numerical_rank(row_concat) + numerical_rank(col_concat) -
         numerical_rank(s.stacked_A);
}

CMatrix build_q_t(const CMatrix& T, std::span<const Complex> lambdas,
                  const GammaPoint& g) {
  check_lambda_count(lambdas);
  if (T.rows() != T.cols()) throw ValidationError("T", "must be square");
  const Index k = static_cast<Index>(lambdas.size());
  if (g.k() != k) throw ValidationError("gamma", "gamma arity does not match lambdas");
  const Index l = T.rows();
  const CMatrix I_l = CMatrix::Identity(l, l);
  CMatrix q = CMatrix::Zero(k * l, k * l);
  for (Index i = 0; i < k; ++i) {
    q.block(i * l, i * l, l, l) = T - lambdas[i] * I_l;
    for (Index j = i + 1; j < k; ++j) {
      q.block(i * l, j * l, l, l) = g(i, j) * I_l;
    }
  }
  return q;
}

}  // namespace blockeig
