#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "blockeig/types.hpp"

namespace blockeig {

/// Square matrix K with square diagonal blocks, one of which (target_block,
/// 0-based) is the only part allowed to change, and the list of eigenvalues
/// the perturbed matrix must acquire.
struct ProblemInstance {
  CMatrix K;
  std::vector<Index> block_sizes;
  Index target_block = 0;
  std::vector<Complex> lambdas;
};

/// Checks all instance invariants; throws ValidationError naming the first
/// violated one. In particular every lambda must stay clear of the spectrum
/// of the aggregated untouched part A: smallest_singular(A - lambda*I) must
/// exceed kEigTol * ||A||_2.
void validate(const ProblemInstance& instance);

/// K conjugated so the target block occupies the southeast corner:
/// [[A, B], [C, D]] with D the target block and A everything else.
struct SouthEastForm {
  CMatrix A, B, C, D;
  PermutationSpec permutation;  // original -> southeast relabeling
};

SouthEastForm to_southeast(const ProblemInstance& instance);

/// Rebuilds [[A, B], [C, D_slot]] and undoes the permutation. With
/// D_slot = se.D this reproduces the original K bit-exactly.
CMatrix reassemble(const SouthEastForm& se, const CMatrix& D_slot);

/// The k(k-1)/2 complex coupling scalars gamma_ij for 0 <= i < j < k,
/// packed row by row: (0,1), (0,2), ..., (0,k-1), (1,2), ...
class GammaPoint {
 public:
  GammaPoint() = default;
  static GammaPoint zero(Index k);

  Index k() const { return k_; }
  Index pair_count() const { return k_ * (k_ - 1) / 2; }

  Complex operator()(Index i, Index j) const { return values_(pack(k_, i, j)); }
  Complex& at(Index i, Index j) { return values_(pack(k_, i, j)); }

  const CVector& packed() const { return values_; }
  CVector& packed() { return values_; }

  /// Real coordinates (re, im) per entry, in packed order; length k(k-1).
  RVector to_real() const;
  static GammaPoint from_real(Index k, const RVector& x);

  static Index pack(Index k, Index i, Index j);

  bool all_finite() const { return values_.array().isFinite().all(); }

 private:
  Index k_ = 0;
  CVector values_;
};

/// gamma = base + t * direction, component-wise.
GammaPoint gamma_on_ray(const GammaPoint& base, const GammaPoint& direction, double t);

/// Conditioning of the shifted resolvents (A - lambda_i I)^{-1} feeding the
/// explicit formulas. ill_conditioned flags condition estimates above
/// 1/kEigTol; the computation still proceeds.
struct ConditionReport {
  double max_resolvent_condition = 0.0;
  bool ill_conditioned = false;
};

/// Shifted resolvents of the untouched block plus the couplings, shared by
/// every evaluation at fixed (se, lambdas).
struct ResolventCache {
  CMatrix B, C;
  std::vector<CMatrix> R;    // (A - lambda_i I)^{-1}
  std::vector<CMatrix> CR;   // C * R_i
  std::vector<CMatrix> RB;   // R_i * B
  ConditionReport condition;
};

ResolventCache make_resolvent_cache(const SouthEastForm& se,
                                    std::span<const Complex> lambdas);

/// Stacked matrices entering the generalized Schur complement, plus the
/// pseudoinverse route intermediates when build_sk_pinv fills them.
struct SkIntermediates {
  CMatrix stacked_A;        // kn x kn, upper block triangular
  CMatrix stacked_B;        // kn x km, block diagonal
  CMatrix stacked_C;        // km x kn, block diagonal
  CMatrix stacked_X;        // km x km, upper block triangular
  CMatrix stacked_A_pinv;   // kn x kn
  CMatrix range_defect_B;   // (I - A A#) B, zero when stacked_A is invertible
  CMatrix corange_defect_C; // C (I - A# A), zero when stacked_A is invertible
  CMatrix schur;            // S_k(X, gamma), km x km
};

/// Fills stacked_A/B/C/X only. The X slot is `X` shifted by the lambdas,
/// with gamma couplings on identity blocks.
SkIntermediates build_structured(const SouthEastForm& se, const CMatrix& X,
                                 std::span<const Complex> lambdas,
                                 const GammaPoint& g);
SkIntermediates build_structured(const SouthEastForm& se,
                                 std::span<const Complex> lambdas,
                                 const GammaPoint& g);

/// Pseudoinverse of stacked_A assembled by block back-substitution:
/// zero below the diagonal, (A - lambda_i I)^{-1} on it, and
/// a_ij = -(A - lambda_i I)^{-1} * sum_{r>i} gamma_ir a_rj above.
CMatrix pinv_stacked_a_recursive(const SouthEastForm& se,
                                 std::span<const Complex> lambdas,
                                 const GammaPoint& g,
                                 ConditionReport* report = nullptr);

/// Generalized-Schur route: S_k = (I - N N#)(X - C A# B)(I - M# M) with every
/// pseudoinverse computed numerically. Defect-matrix truncations are scaled
/// against ||stacked_B|| / ||stacked_C|| so an exactly-rank-deficient defect
/// of size ~eps does not produce a spurious projector.
SkIntermediates build_sk_pinv(const SouthEastForm& se, const CMatrix& X,
                              std::span<const Complex> lambdas,
                              const GammaPoint& g);
SkIntermediates build_sk_pinv(const SouthEastForm& se,
                              std::span<const Complex> lambdas,
                              const GammaPoint& g);

/// Diagonal and coupling blocks of the explicit formula.
struct BlockFormulaParts {
  std::vector<CMatrix> schur_diag;                       // M_i = (X - l_i I) - C R_i B
  std::map<std::pair<Index, Index>, CMatrix> couplings;  // N_ij = I + C R_i R_j B, i < j
};

/// Explicit route: upper block triangular S_k with M_i on the diagonal and
/// gamma_ij I + C R_i (sum_{r>i} gamma_ir a_rj) B above it.
std::pair<CMatrix, BlockFormulaParts> build_sk_explicit(
    const SouthEastForm& se, const CMatrix& X, std::span<const Complex> lambdas,
    const GammaPoint& g, ConditionReport* report = nullptr);
std::pair<CMatrix, BlockFormulaParts> build_sk_explicit(
    const SouthEastForm& se, std::span<const Complex> lambdas,
    const GammaPoint& g, ConditionReport* report = nullptr);

/// Same explicit route, reusing a prebuilt resolvent cache.
CMatrix build_sk_explicit_cached(const ResolventCache& cache, const CMatrix& X,
                                 std::span<const Complex> lambdas,
                                 const GammaPoint& g,
                                 BlockFormulaParts* parts = nullptr);

/// C R_{a_1} R_{a_2} ... R_{a_t} B over a strictly increasing index sequence.
CMatrix resolvent_chain(const SouthEastForm& se, std::span<const Complex> lambdas,
                        std::span<const Index> sequence);

/// rank([A, B]) + rank([A; C]) - rank(A) over the stacked matrices; equals
/// k*n whenever the instance invariants hold.
Index rho(const SouthEastForm& se, std::span<const Complex> lambdas,
          const GammaPoint& g);

/// The kl x kl upper block matrix with T - lambda_i I on the diagonal and
/// gamma_ij I off it.
CMatrix build_q_t(const CMatrix& T, std::span<const Complex> lambdas,
                  const GammaPoint& g);

}  // namespace blockeig
