#include "meanslab/posmaps.hpp"

#include <random>
#include <sstream>

namespace meanslab {

PositiveMapSpec PositiveMapSpec::identity() { return PositiveMapSpec{}; }

PositiveMapSpec PositiveMapSpec::compression(Eigen::MatrixXd isometry) {
  if (isometry.rows() < 1 || isometry.cols() < 1 || isometry.cols() > isometry.rows())
    throw ValidationError("compression: isometry must be dim x k with 1 <= k <= dim");
  const Eigen::MatrixXd gram = isometry.transpose() * isometry;
  const double defect =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "compression: columns are not orthonormal (V^T V deviates from I by " << defect << ")";
    throw ValidationError(os.str());
  }
  PositiveMapSpec s;
  s.kind_ = Kind::compression;
  s.isometry_ = std::move(isometry);
  return s;
}

PositiveMapSpec PositiveMapSpec::pinching(std::vector<std::vector<int>> blocks, int dim) {
  std::vector<bool> seen(static_cast<std::size_t>(dim), false);
  std::size_t covered = 0;
  for (const auto& block : blocks) {
    for (int i : block) {
      if (i < 0 || i >= dim || seen[static_cast<std::size_t>(i)]) {
        std::ostringstream os;
        os << "pinching: blocks must partition {0..," << dim - 1 << "}, bad index " << i;
        throw ValidationError(os.str());
      }
      seen[static_cast<std::size_t>(i)] = true;
      ++covered;
    }
  }
  if (covered != static_cast<std::size_t>(dim))
    throw ValidationError("pinching: blocks do not cover every index");
  PositiveMapSpec s;
  s.kind_ = Kind::pinching;
  s.blocks_ = std::move(blocks);
  s.pinch_dim_ = dim;
  return s;
}

PositiveMapSpec PositiveMapSpec::normalized_trace() {
  PositiveMapSpec s;
  s.kind_ = Kind::normalized_trace;
  return s;
}

bool PositiveMapSpec::accepts_dim(int input_dim) const {
  switch (kind_) {
    case Kind::identity:
    case Kind::normalized_trace:
      return input_dim >= 1;
    case Kind::compression:
      return input_dim == isometry_.rows();
    case Kind::pinching:
      return input_dim == pinch_dim_;
  }
  return false;
}

int PositiveMapSpec::output_dim(int input_dim) const {
  switch (kind_) {
    case Kind::identity:
      return input_dim;
    case Kind::normalized_trace:
      return 1;
    case Kind::compression:
      return static_cast<int>(isometry_.cols());
    case Kind::pinching:
      return input_dim;
  }
  return 0;
}

Eigen::MatrixXd apply_map(const PositiveMapSpec& phi, const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() != symmetric.cols() || !phi.accepts_dim(static_cast<int>(symmetric.rows()))) {
    std::ostringstream os;
    os << "apply_map: map does not accept a " << symmetric.rows() << "x" << symmetric.cols()
       << " operand";
    throw ValidationError(os.str());
  }
  switch (phi.kind()) {
    case PositiveMapSpec::Kind::identity:
      return symmetric;
    case PositiveMapSpec::Kind::compression:
      return symmetrize(phi.isometry().transpose() * symmetric * phi.isometry());
    case PositiveMapSpec::Kind::pinching: {
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(symmetric.rows(), symmetric.cols());
      for (const auto& block : phi.blocks())
        for (int i : block)
          for (int j : block) out(i, j) = symmetric(i, j);
      return out;
    }
    case PositiveMapSpec::Kind::normalized_trace: {
      Eigen::MatrixXd out(1, 1);
      out(0, 0) = symmetric.trace() / static_cast<double>(symmetric.rows());
      return out;
    }
  }
  throw ValidationError("apply_map: unknown map kind");
}

Eigen::MatrixXd apply_psi(const PsiMapSpec& psi, std::span<const Eigen::MatrixXd> as) {
  if (as.empty()) throw ValidationError("apply_psi: empty operand list");
  if (psi.weights.size() != as.size()) {
    std::ostringstream os;
    os << "apply_psi: " << psi.weights.size() << " weights vs " << as.size() << " operands";
    throw ValidationError(os.str());
  }
  Eigen::MatrixXd sum;
  for (std::size_t j = 0; j < as.size(); ++j) {
    Eigen::MatrixXd term = psi.weights[j] * apply_map(psi.phi, as[j]);
    sum = (j == 0) ? term : Eigen::MatrixXd(sum + term);
  }
  return sum;
}

PositiveMapSpec random_compression(int dim, int k, std::uint64_t seed) {
  if (k < 1 || k >= dim)
    throw ValidationError("random_compression: need 1 <= k < dim for a lossy compression");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd Z(dim, k);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < k; ++j) Z(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, k);
  return PositiveMapSpec::compression(std::move(Q));
}

}  // namespace meanslab
