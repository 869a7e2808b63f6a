#include "blockeig/matrix_core.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <numeric>

namespace blockeig {

bool PermutationSpec::is_identity() const {
  for (Index i = 0; i < static_cast<Index>(map.size()); ++i) {
    if (map[i] != i) return false;
  }
  return true;
}

bool PermutationSpec::is_involution() const {
  for (Index i = 0; i < static_cast<Index>(map.size()); ++i) {
    if (map[map[i]] != i) return false;
  }
  return true;
}

PermutationSpec PermutationSpec::inverse() const {
  PermutationSpec inv;
  inv.size = size;
  inv.swapped_blocks = swapped_blocks;
  inv.map.resize(map.size());
  for (Index i = 0; i < static_cast<Index>(map.size()); ++i) {
    inv.map[map[i]] = i;
  }
  return inv;
}

SvdResult svd(const CMatrix& m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw ValidationError("matrix", "svd requires a nonempty matrix");
  }
  if (!is_finite(m)) {
    throw ValidationError("matrix", "svd input has non-finite entries");
  }
  Eigen::JacobiSVD<CMatrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success) {
    throw SvdError("SVD did not converge (Jacobi sweep cap reached)");
  }
  SvdResult out;
  out.singular_values = dec.singularValues();
  out.left_vectors = dec.matrixU();
  out.right_vectors = dec.matrixV();
  return out;
}

CMatrix pinv(const CMatrix& m, double rank_tol) {
  if (rank_tol <= 0.0) {
    throw ValidationError("rank_tol", "must be positive");
  }
  const SvdResult dec = svd(m);
  const Index r = dec.singular_values.size();
  const double cutoff = rank_tol * dec.singular_values(0);
  RVector inv_s = RVector::Zero(r);
  for (Index i = 0; i < r; ++i) {
    if (dec.singular_values(i) > cutoff) inv_s(i) = 1.0 / dec.singular_values(i);
  }
  return dec.right_vectors.leftCols(r) * inv_s.asDiagonal() *
         dec.left_vectors.leftCols(r).adjoint();
}

CMatrix pinv(const CMatrix& m) {
  return pinv(m, default_rank_tol(m.rows(), m.cols()));
}

double spectral_norm(const CMatrix& m) {
  return svd(m).singular_values(0);
}

double smallest_singular(const CMatrix& m) {
  const RVector s = svd(m).singular_values;
  return s(s.size() - 1);
}

Index numerical_rank(const CMatrix& m, double rank_tol) {
  const RVector s = svd(m).singular_values;
  if (s(0) == 0.0) return 0;
  const double cutoff = rank_tol * s(0);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++rank;
  }
  return rank;
}

Index numerical_rank(const CMatrix& m) {
  return numerical_rank(m, default_rank_tol(m.rows(), m.cols()));
}

PermutationSpec identity_permutation(Index size) {
  PermutationSpec p;
  p.size = size;
  p.map.resize(static_cast<std::size_t>(size));
  std::iota(p.map.begin(), p.map.end(), Index{0});
  return p;
}

PermutationSpec southeast_permutation(std::span<const Index> block_sizes,
                                      Index target_block) {
  const Index n_blocks = static_cast<Index>(block_sizes.size());
  if (target_block < 0 || target_block >= n_blocks) {
    throw ValidationError("target_block", "block index out of range");
  }
  const Index total = std::accumulate(block_sizes.begin(), block_sizes.end(), Index{0});
  const Index last = n_blocks - 1;
  if (target_block == last) return identity_permutation(total);

  std::vector<Index> offsets(block_sizes.size());
  Index off = 0;
  for (Index b = 0; b < n_blocks; ++b) {
    offsets[b] = off;
    off += block_sizes[b];
  }

  // New block order: target and last exchanged, everything else in place.
  PermutationSpec p;
  p.size = total;
  p.swapped_blocks = {target_block, last};
  p.map.reserve(static_cast<std::size_t>(total));
  for (Index b = 0; b < n_blocks; ++b) {
    const Index src = (b == target_block) ? last : (b == last ? target_block : b);
    for (Index j = 0; j < block_sizes[src]; ++j) {
      p.map.push_back(offsets[src] + j);
    }
  }
  return p;
}

CMatrix apply_symmetric_permutation(const CMatrix& m, const PermutationSpec& p) {
  if (m.rows() != m.cols()) {
    throw ValidationError("matrix", "symmetric permutation requires a square matrix");
  }
  if (p.size != m.rows() || static_cast<Index>(p.map.size()) != m.rows()) {
    throw ValidationError("permutation", "size does not match matrix");
  }
  CMatrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out(i, j) = m(p.map[i], p.map[j]);
    }
  }
  return out;
}

}  // namespace blockeig
