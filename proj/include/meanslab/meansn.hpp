#pragma once

#include <optional>
#include <span>
#include <vector>

#include "meanslab/means2.hpp"
#include "meanslab/spd.hpp"

namespace meanslab {

/// Probability vector: nonnegative entries summing to 1 within 1e-12.
/// Zero weights are permitted and drop the corresponding operand.
class Weights {
 public:
  Weights() : w_{1.0} {}  // the one-operand vector (1)
  explicit Weights(std::vector<double> w);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& values() const { return w_; }

 private:
  std::vector<double> w_;
};

enum class BaseMean { arithmetic, harmonic };

/// n-variable mean specification: a base mean (weighted arithmetic or
/// harmonic) optionally deformed by a two-variable mean sigma. With deform
/// present, the value is the unique positive solution of
///
///   X = M(X sigma A_1, ..., X sigma A_n).
///
/// sigma must not be the left trivial mean and needs alpha0 in (0, 1].
struct NMeanSpec {
  BaseMean base = BaseMean::arithmetic;
  Weights weights;
  std::optional<MeanTwoSpec> deform;
};

struct SolverConfig {
  double tol = 1e-12;    // relative residual target
  int max_iter = 500;
  double damping = 1.0;  // in (0, 1]; fallback knob for slow instances
};

struct SolveTrace {
  int iterations = 0;
  double residual = 0.0;  // relative residual at exit
  bool converged = false;
};

/// Solver failure carrying the trace at the iteration limit.
class SolverError : public NumericError {
 public:
  SolverError(const std::string& what, SolveTrace trace)
      : NumericError(what), trace(trace) {}
  SolveTrace trace;
};

struct MeanResult {
  SpdMatrix value;
  SolveTrace trace;
};

SpdMatrix arithmetic_mean(const Weights& w, std::span<const SpdMatrix> as);
SpdMatrix harmonic_mean(const Weights& w, std::span<const SpdMatrix> as);

/// Deformed mean via damped fixed-point iteration
///
///   X_{k+1} = (1 - damping) X_k + damping * M(X_k sigma A_1, ..., X_k sigma A_n)
///
/// started at the weighted arithmetic mean. Convergence is certified on
/// the defining equation itself: the returned X satisfies
/// ||X - M(X sigma A_j)|| / ||X|| <= tol. Non-convergence within max_iter
/// throws SolverError with the trace.
MeanResult deformed_mean(const NMeanSpec& spec, std::span<const SpdMatrix> as,
                         const SolverConfig& cfg = {});

/// Power mean P_{w,alpha} for alpha in [-1, 1] \ {0}: for alpha > 0 the
/// deformed mean with arithmetic base and sigma = geometric(alpha); for
/// alpha < 0 the adjoint route (P_{w,|alpha|} on inverses, inverted).
/// P_{w,1} is the arithmetic and P_{w,-1} the harmonic mean.
SpdMatrix power_mean(const Weights& w, double alpha, std::span<const SpdMatrix> as,
                     const SolverConfig& cfg = {});

/// Karcher mean: the unique solution of sum_j w_j log(X^{-1/2} A_j X^{-1/2}) = 0,
/// computed by the damped exponential-barycenter iteration
///
///   X <- X^{1/2} exp(d * sum_j w_j log(X^{-1/2} A_j X^{-1/2})) X^{1/2}
///
/// started at P_{w,1/8}. The step d starts at cfg.damping and adapts under
/// a residual-decrease safeguard: it halves when a step fails to decrease
/// the gradient norm (wide spectra make the full step oscillate) and grows
/// while steps keep succeeding (up to 64 * damping; the same spectra make
/// the unit step creep). Converged means
/// ||sum_j w_j log(X^{-1/2} A_j X^{-1/2})|| <= tol * scale with
/// scale = mean_j ||log A_j|| + 1; the trace stores the residual relative
/// to that scale.
MeanResult karcher_mean(const Weights& w, std::span<const SpdMatrix> as,
                        const SolverConfig& cfg = {});

/// exp(sum_j w_j log A_j).
SpdMatrix log_euclidean(const Weights& w, std::span<const SpdMatrix> as);

/// Adjoint mean M*(A_1, ..., A_n) = M(A_1^{-1}, ..., A_n^{-1})^{-1} for the
/// given spec (deformed or base-only).
MeanResult adjoint_nmean(const NMeanSpec& spec, std::span<const SpdMatrix> as,
                         const SolverConfig& cfg = {});

/// Dispatch: deformed_mean when spec.deform is present, otherwise the base
/// mean with a trivial trace.
MeanResult evaluate_nmean(const NMeanSpec& spec, std::span<const SpdMatrix> as,
                          const SolverConfig& cfg = {});

}  // namespace meanslab
