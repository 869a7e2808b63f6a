#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace blockeig {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when an input violates a documented precondition. `field` names
/// the offending quantity so front ends can point at it.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Thrown when the SVD iteration fails to converge.
class SvdError : public std::runtime_error {
 public:
  explicit SvdError(const std::string& message) : std::runtime_error(message) {}
};

inline bool is_finite(const CMatrix& m) {
  return m.array().isFinite().all();
}

/// Default relative threshold below which singular values count as zero.
inline double default_rank_tol(Index rows, Index cols) {
  return 1e-12 * static_cast<double>(std::max(rows, cols));
}

/// Relative gate on smallest_singular(A - lambda*I) used to decide whether a
/// prescribed eigenvalue sits too close to the spectrum of the untouched part.
inline constexpr double kEigTol = 1e-8;

/// A singular value is treated as non-simple when its distance to either
/// neighbour falls below this fraction of the largest singular value.
inline constexpr double kSimplicityTol = 1e-8;

struct SvdResult {
  RVector singular_values;  // nonincreasing, >= 0
  CMatrix left_vectors;     // m x m unitary
  CMatrix right_vectors;    // n x n unitary
};

/// Symmetric relabeling of a square matrix: block `swapped_blocks.first` is
/// exchanged with block `swapped_blocks.second` while all other blocks keep
/// their relative order. `map[p]` is the original index now sitting at
/// position p. The relabeling is an involution exactly when the two swapped
/// blocks have equal size (always true for the identity); for unequal sizes
/// use inverse() to undo it.
struct PermutationSpec {
  Index size = 0;
  std::pair<Index, Index> swapped_blocks{-1, -1};
  std::vector<Index> map;

  bool is_identity() const;
  bool is_involution() const;
  PermutationSpec inverse() const;
};

}  // namespace blockeig
