#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>

#include "meanslab/errors.hpp"

namespace meanslab {

/// Tight two-sided spectral bounds m <= lambda <= M for a positive matrix,
/// with condition ratio h = M/m.
struct SpectralBounds {
  double m = 1.0;
  double M = 1.0;

  SpectralBounds(double lower, double upper);
  double h() const { return M / m; }
};

/// Real symmetric positive-definite matrix with its eigendecomposition
/// cached at construction.
///
/// Construction validates symmetry (|a_ij - a_ji| <= 1e-12 * max(1, max|a|))
/// and strict positive-definiteness; the stored entries are the symmetrized
/// input (X + X^T)/2. Instances are immutable and safe to share across
/// threads.
class SpdMatrix {
 public:
  explicit SpdMatrix(Eigen::MatrixXd entries);

  static SpdMatrix identity(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }

  /// Eigenvalues in ascending order.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Orthonormal eigenvector columns, matching eigenvalues().
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

  double lambda_min() const { return eigenvalues_(0); }
  double lambda_max() const { return eigenvalues_(eigenvalues_.size() - 1); }

  bool is_diagonal(double tol = 1e-13) const;

 private:
  Eigen::MatrixXd entries_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

/// (X + X^T) / 2.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& X);

struct EigSym {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Eigendecomposition of a symmetric matrix. Validates symmetry up to the
/// SpdMatrix tolerance; reconstruction Q diag(v) Q^T holds to 1e-10 relative.
EigSym eig_sym(const Eigen::MatrixXd& symmetric);

/// Functional calculus: Q diag(f(lambda)) Q^T, symmetrized. Throws
/// DomainError naming the eigenvalue if f is non-finite there.
Eigen::MatrixXd matrix_fn(const SpdMatrix& A, const std::function<double(double)>& f,
                          const std::string& fn_name = "f");

/// A^r through the spectral cache. r = 1 returns A unchanged.
SpdMatrix mat_pow(const SpdMatrix& A, double r);

Eigen::MatrixXd mat_log(const SpdMatrix& A);

/// exp of a symmetric matrix; the result is positive definite.
SpdMatrix mat_exp(const Eigen::MatrixXd& symmetric);

SpdMatrix mat_inv(const SpdMatrix& A);

/// Congruence S^T A S (symmetrized). S must be invertible; a condition
/// number estimate is included in the error on near-singular input.
SpdMatrix congruence(const Eigen::MatrixXd& S, const SpdMatrix& A);

struct LoewnerResult {
  bool holds = false;
  double margin = 0.0;  // min eigenvalue of B - A
};

/// Loewner comparison A <= B with relative tolerance: holds iff
/// lambda_min(B - A) >= -tol * max(1, ||A||, ||B||).
LoewnerResult loewner_leq(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double tol);

/// Operator norm (largest |eigenvalue|) of a symmetric matrix.
double op_norm(const Eigen::MatrixXd& symmetric);

/// Seeded random SPD matrix with eigenvalues in [m, M]. For dim >= 2 the
/// endpoints are forced (lambda_min = m, lambda_max = M) so the bounds are
/// tight; the eigenbasis is the Q factor of a seeded Gaussian matrix.
/// Deterministic in (dim, bounds, seed).
SpdMatrix random_spd(int dim, const SpectralBounds& bounds, std::uint64_t seed);

/// Same spectrum recipe as random_spd but with the identity eigenbasis;
/// used for commuting-instance oracles.
SpdMatrix random_spd_diagonal(int dim, const SpectralBounds& bounds, std::uint64_t seed);

SpectralBounds spectral_bounds(const SpdMatrix& A);

/// splitmix64-style stream derivation for reproducible sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace meanslab
