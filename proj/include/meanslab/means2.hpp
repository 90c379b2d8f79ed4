#pragma once

#include <functional>
#include <span>
#include <string>

#include "meanslab/spd.hpp"

namespace meanslab {

enum class MeanKind { geometric, arithmetic, harmonic, left_trivial, custom };

/// Two-variable operator mean given by its representing function f on
/// (0, inf) with f(1) = 1; the mean of positive matrices is
///
///   A sigma B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}.
///
/// Built-ins (weight alpha in [0, 1]):
///   geometric   f(x) = x^alpha
///   arithmetic  f(x) = (1 - alpha) + alpha x
///   harmonic    f(x) = ((1 - alpha) + alpha / x)^{-1}
///   left_trivial f(x) = 1  (A sigma B = A)
///
/// alpha0() is f'(1), the derivative at 1 (closed form for built-ins,
/// central difference for custom functions). Operator monotonicity of a
/// custom f is a caller obligation and is not machine-checked; likewise
/// strict monotonicity of f where a construction requires it.
class MeanTwoSpec {
 public:
  static MeanTwoSpec geometric(double alpha);
  static MeanTwoSpec arithmetic(double alpha);
  static MeanTwoSpec harmonic(double alpha);
  static MeanTwoSpec left_trivial();
  /// Custom representing function; f(1) must equal 1 within 1e-12, and the
  /// caller asserts operator monotonicity via the flag.
  static MeanTwoSpec custom(std::string label, std::function<double(double)> f,
                            bool operator_monotone_asserted);

  MeanKind kind() const { return kind_; }
  /// Weight of a built-in; meaningless for left_trivial/custom.
  double alpha() const { return alpha_; }
  double alpha0() const { return alpha0_; }
  double f(double x) const { return f_(x); }
  const std::string& label() const { return label_; }
  bool monotone_asserted() const { return monotone_asserted_; }

 private:
  MeanTwoSpec() = default;

  MeanKind kind_ = MeanKind::custom;
  double alpha_ = 0.0;
  double alpha0_ = 0.0;
  std::function<double(double)> f_;
  std::string label_;
  bool monotone_asserted_ = false;
};

/// A sigma B through the functional calculus; result is positive definite.
SpdMatrix mean2(const MeanTwoSpec& spec, const SpdMatrix& A, const SpdMatrix& B);

/// Adjoint mean sigma*: A sigma* B = (A^{-1} sigma B^{-1})^{-1}, i.e.
/// f*(x) = 1 / f(1/x). Built-ins map to built-ins (arithmetic <-> harmonic,
/// geometric and left_trivial to themselves).
MeanTwoSpec adjoint2(const MeanTwoSpec& spec);

/// Power monotone increasing test: f(x^r) >= f(x)^r at every (x, r) grid
/// point (x > 0, r >= 1) within 1e-12 relative slack.
bool is_pmi(const MeanTwoSpec& spec, std::span<const double> x_grid,
            std::span<const double> r_grid);

}  // namespace meanslab
