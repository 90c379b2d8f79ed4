#include "meanslab/means2.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace meanslab {

namespace {

void require_weight(double alpha, const char* who) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << who << ": weight alpha must lie in [0, 1], got " << alpha;
    throw ValidationError(os.str());
  }
}

}  // namespace

MeanTwoSpec MeanTwoSpec::geometric(double alpha) {
  require_weight(alpha, "MeanTwoSpec::geometric");
  MeanTwoSpec s;
  s.kind_ = MeanKind::geometric;
  s.alpha_ = alpha;
  s.alpha0_ = alpha;
  s.f_ = [alpha](double x) { return std::pow(x, alpha); };
  s.label_ = "geometric";
  s.monotone_asserted_ = true;
  return s;
}

MeanTwoSpec MeanTwoSpec::arithmetic(double alpha) {
  require_weight(alpha, "MeanTwoSpec::arithmetic");
  MeanTwoSpec s;
  s.kind_ = MeanKind::arithmetic;
  s.alpha_ = alpha;
  s.alpha0_ = alpha;
  s.f_ = [alpha](double x) { return (1.0 - alpha) + alpha * x; };
  s.label_ = "arithmetic";
  s.monotone_asserted_ = true;
  return s;
}

MeanTwoSpec MeanTwoSpec::harmonic(double alpha) {
  require_weight(alpha, "MeanTwoSpec::harmonic");
  MeanTwoSpec s;
  s.kind_ = MeanKind::harmonic;
  s.alpha_ = alpha;
  s.alpha0_ = alpha;
  s.f_ = [alpha](double x) { return 1.0 / ((1.0 - alpha) + alpha / x); };
  s.label_ = "harmonic";
  s.monotone_asserted_ = true;
  return s;
}

MeanTwoSpec MeanTwoSpec::left_trivial() {
  MeanTwoSpec s;
  s.kind_ = MeanKind::left_trivial;
  s.alpha_ = 0.0;
  s.alpha0_ = 0.0;
  s.f_ = [](double) { return 1.0; };
  s.label_ = "left_trivial";
  s.monotone_asserted_ = true;
  return s;
}

MeanTwoSpec MeanTwoSpec::custom(std::string label, std::function<double(double)> f,
                                bool operator_monotone_asserted) {
  if (!f) throw ValidationError("MeanTwoSpec::custom: empty function");
  const double f1 = f(1.0);
  if (!(std::abs(f1 - 1.0) <= 1e-12)) {
    std::ostringstream os;
    os << "MeanTwoSpec::custom(" << label << "): representing function must satisfy f(1) = 1, got "
       << f1;
    throw ValidationError(os.str());
  }
  MeanTwoSpec s;
  s.kind_ = MeanKind::custom;
  const double step = 1e-6;
  s.alpha0_ = (f(1.0 + step) - f(1.0 - step)) / (2.0 * step);
  s.f_ = std::move(f);
  s.label_ = std::move(label);
  s.monotone_asserted_ = operator_monotone_asserted;
  return s;
}

SpdMatrix mean2(const MeanTwoSpec& spec, const SpdMatrix& A, const SpdMatrix& B) {
  if (A.dim() != B.dim()) {
    std::ostringstream os;
    os << "mean2: dimension mismatch " << A.dim() << " vs " << B.dim();
    throw ValidationError(os.str());
  }
  const Eigen::MatrixXd Ah = matrix_fn(A, [](double t) { return std::sqrt(t); }, "sqrt");
  const Eigen::MatrixXd Aih =
      matrix_fn(A, [](double t) { return 1.0 / std::sqrt(t); }, "1/sqrt");
  SpdMatrix C(symmetrize(Aih * B.entries() * Aih));
  const Eigen::MatrixXd FC =
      matrix_fn(C, [&spec](double t) { return spec.f(t); }, "f_sigma(" + spec.label() + ")");
  return SpdMatrix(symmetrize(Ah * FC * Ah));
}

MeanTwoSpec adjoint2(const MeanTwoSpec& spec) {
  switch (spec.kind()) {
    case MeanKind::geometric:
      return MeanTwoSpec::geometric(spec.alpha());
    case MeanKind::arithmetic:
      return MeanTwoSpec::harmonic(spec.alpha());
    case MeanKind::harmonic:
      return MeanTwoSpec::arithmetic(spec.alpha());
    case MeanKind::left_trivial:
      return MeanTwoSpec::left_trivial();
    case MeanKind::custom: {
      auto f = [spec](double x) { return 1.0 / spec.f(1.0 / x); };
      return MeanTwoSpec::custom(spec.label() + "*", f, spec.monotone_asserted());
    }
  }
  throw ValidationError("adjoint2: unknown mean kind");
}

bool is_pmi(const MeanTwoSpec& spec, std::span<const double> x_grid,
            std::span<const double> r_grid) {
  for (double r : r_grid) {
    if (!(r >= 1.0)) {
      std::ostringstream os;
      os << "is_pmi: r grid must satisfy r >= 1, got " << r;
      throw ValidationError(os.str());
    }
  }
  for (double x : x_grid) {
    if (!(x > 0.0)) throw ValidationError("is_pmi: x grid must be positive");
    for (double r : r_grid) {
      const double lhs = spec.f(std::pow(x, r));
      const double rhs = std::pow(spec.f(x), r);
      if (lhs - rhs < -1e-12 * std::max(1.0, std::abs(rhs))) return false;
    }
  }
  return true;
}

}  // namespace meanslab
