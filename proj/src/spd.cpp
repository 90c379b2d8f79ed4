#include "meanslab/spd.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

namespace meanslab {

namespace {

void check_symmetric(const Eigen::MatrixXd& X, const char* who) {
  if (X.rows() != X.cols()) {
    std::ostringstream os;
    os << who << ": matrix is " << X.rows() << "x" << X.cols() << ", expected square";
    throw ValidationError(os.str());
  }
  const double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < X.cols(); ++j) {
      if (std::abs(X(i, j) - X(j, i)) > 1e-12 * scale) {
        std::ostringstream os;
        os << who << ": entries not symmetric at (" << i << "," << j << "): " << X(i, j)
           << " vs " << X(j, i);
        throw ValidationError(os.str());
      }
    }
  }
}

}  // namespace

SpectralBounds::SpectralBounds(double lower, double upper) : m(lower), M(upper) {
  if (!(m > 0.0) || !(M >= m)) {
    std::ostringstream os;
    os << "SpectralBounds: need 0 < m <= M, got m=" << m << " M=" << M;
    throw ValidationError(os.str());
  }
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& X) { return (X + X.transpose()) / 2.0; }

EigSym eig_sym(const Eigen::MatrixXd& symmetric) {
  check_symmetric(symmetric, "eig_sym");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrize(symmetric));
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eig_sym: eigensolver did not converge within its internal iteration limit (dim="
       << symmetric.rows() << ")";
    throw NumericError(os.str());
  }
  return EigSym{solver.eigenvalues(), solver.eigenvectors()};
}

SpdMatrix::SpdMatrix(Eigen::MatrixXd entries) {
  check_symmetric(entries, "SpdMatrix");
  entries_ = symmetrize(entries);
  EigSym eig = eig_sym(entries_);
  eigenvalues_ = std::move(eig.values);
  eigenvectors_ = std::move(eig.vectors);
  if (eigenvalues_(0) <= 0.0) {
    std::ostringstream os;
    os << "SpdMatrix: not positive definite, smallest eigenvalue is " << eigenvalues_(0);
    throw DomainError(os.str());
  }
}

SpdMatrix SpdMatrix::identity(int dim) {
  if (dim < 1) throw ValidationError("SpdMatrix::identity: dim must be >= 1");
  return SpdMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

bool SpdMatrix::is_diagonal(double tol) const {
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    for (Eigen::Index j = 0; j < entries_.cols(); ++j)
      if (i != j && std::abs(entries_(i, j)) > tol * scale) return false;
  return true;
}

Eigen::MatrixXd matrix_fn(const SpdMatrix& A, const std::function<double(double)>& f,
                          const std::string& fn_name) {
  const Eigen::VectorXd& lam = A.eigenvalues();
  Eigen::VectorXd mapped(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    mapped(i) = f(lam(i));
    if (!std::isfinite(mapped(i))) {
      std::ostringstream os;
      os << "matrix_fn: " << fn_name << " is not finite at eigenvalue " << lam(i);
      throw DomainError(os.str());
    }
  }
  const Eigen::MatrixXd& Q = A.eigenvectors();
  return symmetrize(Q * mapped.asDiagonal() * Q.transpose());
}

SpdMatrix mat_pow(const SpdMatrix& A, double r) {
  if (r == 1.0) return A;
  return SpdMatrix(matrix_fn(
      A, [r](double t) { return std::pow(t, r); }, "t^r"));
}

Eigen::MatrixXd mat_log(const SpdMatrix& A) {
  return matrix_fn(
      A, [](double t) { return std::log(t); }, "log");
}

SpdMatrix mat_exp(const Eigen::MatrixXd& symmetric) {
  EigSym eig = eig_sym(symmetric);
  Eigen::VectorXd mapped = eig.values.array().exp();
  return SpdMatrix(symmetrize(eig.vectors * mapped.asDiagonal() * eig.vectors.transpose()));
}

SpdMatrix mat_inv(const SpdMatrix& A) {
  return SpdMatrix(matrix_fn(
      A, [](double t) { return 1.0 / t; }, "1/t"));
}

SpdMatrix congruence(const Eigen::MatrixXd& S, const SpdMatrix& A) {
  if (S.rows() != A.dim() || S.cols() != A.dim()) {
    std::ostringstream os;
    os << "congruence: S is " << S.rows() << "x" << S.cols() << ", operand dim is " << A.dim();
    throw ValidationError(os.str());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin <= 0.0 || smax / smin > 1e12) {
    std::ostringstream os;
    os << "congruence: S is singular or near-singular (condition number "
       << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity()) << ")";
    throw ValidationError(os.str());
  }
  return SpdMatrix(symmetrize(S.transpose() * A.entries() * S));
}

LoewnerResult loewner_leq(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double tol) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    std::ostringstream os;
    os << "loewner_leq: dimension mismatch " << A.rows() << "x" << A.cols() << " vs " << B.rows()
       << "x" << B.cols();
    throw ValidationError(os.str());
  }
  const double margin = eig_sym(symmetrize(B - A)).values(0);
  const double scale = std::max({1.0, op_norm(A), op_norm(B)});
  return LoewnerResult{margin >= -tol * scale, margin};
}

double op_norm(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrize(symmetric),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("op_norm: eigensolver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

std::vector<double> draw_spectrum(int dim, const SpectralBounds& bounds, std::mt19937_64& rng) {
  std::vector<double> lam(static_cast<std::size_t>(dim));
  if (bounds.m == bounds.M) {
    std::fill(lam.begin(), lam.end(), bounds.m);
    return lam;
  }
  std::uniform_real_distribution<double> unif(bounds.m, bounds.M);
  for (double& v : lam) v = unif(rng);
  std::sort(lam.begin(), lam.end());
  if (dim >= 2) {
    lam.front() = bounds.m;  // forced endpoints keep h = M/m tight
    lam.back() = bounds.M;
  }
  return lam;
}

}  // namespace

SpdMatrix random_spd(int dim, const SpectralBounds& bounds, std::uint64_t seed) {
  if (dim < 1) throw ValidationError("random_spd: dim must be >= 1");
  std::mt19937_64 rng(seed);
  const std::vector<double> lam = draw_spectrum(dim, bounds, rng);

  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd Z(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) Z(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;  // unique Q with positive R diagonal

  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(lam.data(), dim);
  return SpdMatrix(symmetrize(Q * d.asDiagonal() * Q.transpose()));
}

SpdMatrix random_spd_diagonal(int dim, const SpectralBounds& bounds, std::uint64_t seed) {
  if (dim < 1) throw ValidationError("random_spd_diagonal: dim must be >= 1");
  std::mt19937_64 rng(seed);
  const std::vector<double> lam = draw_spectrum(dim, bounds, rng);
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(lam.data(), dim);
  return SpdMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

SpectralBounds spectral_bounds(const SpdMatrix& A) {
  if (A.lambda_min() <= 0.0) {
    std::ostringstream os;
    os << "spectral_bounds: non-positive eigenvalue " << A.lambda_min();
    throw DomainError(os.str());
  }
  return SpectralBounds(A.lambda_min(), A.lambda_max());
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace meanslab
