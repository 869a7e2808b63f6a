#pragma once

#include <span>

#include "blockeig/types.hpp"

namespace blockeig {

/// Full singular value decomposition m = U diag(s) V^*.
/// Deterministic for a fixed input. Throws ValidationError on non-finite
/// input and SvdError if the iteration does not converge.
SvdResult svd(const CMatrix& m);

/// Moore-Penrose pseudoinverse via SVD truncation: singular values
/// <= rank_tol * s_1 are treated as zero.
CMatrix pinv(const CMatrix& m, double rank_tol);
CMatrix pinv(const CMatrix& m);  // rank_tol = default_rank_tol(rows, cols)

/// Largest singular value.
double spectral_norm(const CMatrix& m);

/// Smallest singular value (s_min(m), i.e. s_{min(rows,cols)}).
double smallest_singular(const CMatrix& m);

/// Number of singular values above rank_tol * s_1.
Index numerical_rank(const CMatrix& m, double rank_tol);
Index numerical_rank(const CMatrix& m);

PermutationSpec identity_permutation(Index size);

/// Relabeling that moves block `target_block` (0-based) to the southeast
/// corner by exchanging it with the last block.
PermutationSpec southeast_permutation(std::span<const Index> block_sizes,
                                      Index target_block);

/// Symmetric application: result(i, j) = m(p.map[i], p.map[j]).
CMatrix apply_symmetric_permutation(const CMatrix& m, const PermutationSpec& p);

}  // namespace blockeig
