#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "meanslab/meansn.hpp"

namespace meanslab {

/// Unital positive linear map on symmetric matrices. Built-ins:
/// identity, compression A -> V^T A V (V an isometry, V^T V = I),
/// pinching to a block partition, and the normalized trace A -> (tr A / dim).
class PositiveMapSpec {
 public:
  enum class Kind { identity, compression, pinching, normalized_trace };

  static PositiveMapSpec identity();
  static PositiveMapSpec compression(Eigen::MatrixXd isometry);
  static PositiveMapSpec pinching(std::vector<std::vector<int>> blocks, int dim);
  static PositiveMapSpec normalized_trace();

  Kind kind() const { return kind_; }
  const Eigen::MatrixXd& isometry() const { return isometry_; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }

  bool accepts_dim(int input_dim) const;
  int output_dim(int input_dim) const;

 private:
  PositiveMapSpec() = default;

  Kind kind_ = Kind::identity;
  Eigen::MatrixXd isometry_;            // compression only
  std::vector<std::vector<int>> blocks_;  // pinching only
  int pinch_dim_ = 0;
};

Eigen::MatrixXd apply_map(const PositiveMapSpec& phi, const Eigen::MatrixXd& symmetric);

/// Psi_{Phi,w}(A_1 (+) ... (+) A_n) = sum_j w_j Phi(A_j).
struct PsiMapSpec {
  PositiveMapSpec phi;
  Weights weights;
};

Eigen::MatrixXd apply_psi(const PsiMapSpec& psi, std::span<const Eigen::MatrixXd> as);

/// QR-orthonormalized seeded Gaussian isometry, k < dim columns.
PositiveMapSpec random_compression(int dim, int k, std::uint64_t seed);

}  // namespace meanslab
