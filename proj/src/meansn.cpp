#include "meanslab/meansn.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace meanslab {

namespace {

void check_operands(const Weights& w, std::span<const SpdMatrix> as, const char* who) {
  if (as.empty()) {
    std::ostringstream os;
    os << who << ": empty operand list";
    throw ValidationError(os.str());
  }
  if (w.size() != as.size()) {
    std::ostringstream os;
    os << who << ": " << w.size() << " weights vs " << as.size() << " operands";
    throw ValidationError(os.str());
  }
  const int dim = as[0].dim();
  for (const SpdMatrix& a : as) {
    if (a.dim() != dim) {
      std::ostringstream os;
      os << who << ": operand dimension mismatch " << a.dim() << " vs " << dim;
      throw ValidationError(os.str());
    }
  }
}

// Index of the only operand with nonzero weight, or -1.
int sole_survivor(const Weights& w) {
  int k = -1;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) {
      if (k >= 0) return -1;
      k = static_cast<int>(j);
    }
  }
  return k;
}

void check_config(const SolverConfig& cfg, const char* who) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || !(cfg.damping > 0.0 && cfg.damping <= 1.0)) {
    std::ostringstream os;
    os << who << ": invalid solver config (tol=" << cfg.tol << " max_iter=" << cfg.max_iter
       << " damping=" << cfg.damping << ")";
    throw ValidationError(os.str());
  }
}

SpdMatrix base_mean(BaseMean base, const Weights& w, std::span<const SpdMatrix> as) {
  return base == BaseMean::arithmetic ? arithmetic_mean(w, as) : harmonic_mean(w, as);
}

}  // namespace

Weights::Weights(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw ValidationError("Weights: empty weight vector");
  double sum = 0.0;
  for (double v : w_) {
    if (!(v >= 0.0)) {
      std::ostringstream os;
      os << "Weights: negative weight " << v;
      throw ValidationError(os.str());
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "Weights: entries sum to " << sum << ", expected 1 within 1e-12";
    throw ValidationError(os.str());
  }
}

SpdMatrix arithmetic_mean(const Weights& w, std::span<const SpdMatrix> as) {
  check_operands(w, as, "arithmetic_mean");
  const int k = sole_survivor(w);
  if (k >= 0) return as[k];
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(as[0].dim(), as[0].dim());
  for (std::size_t j = 0; j < as.size(); ++j)
    if (w[j] != 0.0) sum += w[j] * as[j].entries();
  return SpdMatrix(symmetrize(sum));
}

SpdMatrix harmonic_mean(const Weights& w, std::span<const SpdMatrix> as) {
  check_operands(w, as, "harmonic_mean");
  const int k = sole_survivor(w);
  if (k >= 0) return as[k];
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(as[0].dim(), as[0].dim());
  for (std::size_t j = 0; j < as.size(); ++j)
    if (w[j] != 0.0) sum += w[j] * matrix_fn(as[j], [](double t) { return 1.0 / t; }, "1/t");
  return mat_inv(SpdMatrix(symmetrize(sum)));
}

MeanResult deformed_mean(const NMeanSpec& spec, std::span<const SpdMatrix> as,
                         const SolverConfig& cfg) {
  check_operands(spec.weights, as, "deformed_mean");
  check_config(cfg, "deformed_mean");
  if (!spec.deform) throw ValidationError("deformed_mean: spec has no deforming mean sigma");
  const MeanTwoSpec& sigma = *spec.deform;
  if (sigma.kind() == MeanKind::left_trivial)
    throw ValidationError("deformed_mean: sigma must not be the left trivial mean");
  if (!(sigma.alpha0() > 0.0 && sigma.alpha0() <= 1.0)) {
    std::ostringstream os;
    os << "deformed_mean: sigma (" << sigma.label() << ") has alpha0 = " << sigma.alpha0()
       << ", required in (0, 1]";
    throw ValidationError(os.str());
  }

  const Weights& w = spec.weights;
  SpdMatrix x = arithmetic_mean(w, as);
  std::vector<SpdMatrix> mixed;
  mixed.reserve(as.size());
  SolveTrace trace;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    mixed.clear();
    for (std::size_t j = 0; j < as.size(); ++j)
      mixed.push_back(w[j] != 0.0 ? mean2(sigma, x, as[j]) : as[j]);
    SpdMatrix tx = base_mean(spec.base, w, mixed);
    const double res = op_norm(x.entries() - tx.entries()) / op_norm(x.entries());
    trace.iterations = it;
    trace.residual = res;
    if (res <= cfg.tol) {
      trace.converged = true;
      return MeanResult{std::move(x), trace};
    }
    x = cfg.damping == 1.0
            ? std::move(tx)
            : SpdMatrix(symmetrize((1.0 - cfg.damping) * x.entries() +
                                   cfg.damping * tx.entries()));
  }
  std::ostringstream os;
  os << "deformed_mean: no convergence after " << cfg.max_iter
     << " iterations (residual " << trace.residual << ", tol " << cfg.tol << ")";
  throw SolverError(os.str(), trace);
}

SpdMatrix power_mean(const Weights& w, double alpha, std::span<const SpdMatrix> as,
                     const SolverConfig& cfg) {
  check_operands(w, as, "power_mean");
  if (std::abs(alpha) < 1e-12 || alpha < -1.0 || alpha > 1.0) {
    std::ostringstream os;
    os << "power_mean: alpha must lie in [-1, 1] \\ {0}, got " << alpha
       << " (use karcher_mean for the alpha -> 0 limit)";
    throw ValidationError(os.str());
  }
  if (alpha > 0.0) {
    NMeanSpec spec{BaseMean::arithmetic, w, MeanTwoSpec::geometric(alpha)};
    return deformed_mean(spec, as, cfg).value;
  }
  std::vector<SpdMatrix> inverses;
  inverses.reserve(as.size());
  for (const SpdMatrix& a : as) inverses.push_back(mat_inv(a));
  return mat_inv(power_mean(w, -alpha, inverses, cfg));
}

MeanResult karcher_mean(const Weights& w, std::span<const SpdMatrix> as,
                        const SolverConfig& cfg) {
  check_operands(w, as, "karcher_mean");
  check_config(cfg, "karcher_mean");

  double scale = 0.0;
  for (const SpdMatrix& a : as) scale += op_norm(mat_log(a));
  scale = scale / static_cast<double>(as.size()) + 1.0;

  // Coarse power-mean start; the Karcher loop does the refinement.
  SolverConfig init_cfg = cfg;
  init_cfg.tol = std::max(cfg.tol, 1e-8);
  init_cfg.max_iter = std::max(cfg.max_iter, 500);
  SpdMatrix x = power_mean(w, 1.0 / 8.0, as, init_cfg);

  struct State {
    Eigen::MatrixXd sqrt;
    Eigen::MatrixXd grad;
    double res;
  };
  auto eval = [&](const SpdMatrix& X) {
    const Eigen::MatrixXd Xh = matrix_fn(X, [](double t) { return std::sqrt(t); }, "sqrt");
    const Eigen::MatrixXd Xih =
        matrix_fn(X, [](double t) { return 1.0 / std::sqrt(t); }, "1/sqrt");
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(X.dim(), X.dim());
    for (std::size_t j = 0; j < as.size(); ++j) {
      if (w[j] == 0.0) continue;
      grad += w[j] * mat_log(SpdMatrix(symmetrize(Xih * as[j].entries() * Xih)));
    }
    return State{Xh, grad, op_norm(grad)};
  };

  State st = eval(x);
  double step = cfg.damping;
  SolveTrace trace;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    trace.iterations = it;
    trace.residual = st.res / scale;
    if (st.res <= cfg.tol * scale) {
      trace.converged = true;
      return MeanResult{std::move(x), trace};
    }
    SpdMatrix cand(
        symmetrize(st.sqrt * mat_exp(step * st.grad).entries() * st.sqrt));
    State cand_st = eval(cand);
    if (cand_st.res < st.res || cand_st.res <= cfg.tol * scale) {
      x = std::move(cand);
      st = std::move(cand_st);
      // over-relax while the residual keeps dropping; wide-spread instances
      // creep at the unit step, and the residual check guards the growth
      step = std::min(64.0 * cfg.damping, step * 1.25);
    } else {
      step = std::max(step / 2.0, cfg.damping / 1024.0);
    }
  }
  std::ostringstream os;
  os << "karcher_mean: no convergence after " << cfg.max_iter << " iterations (residual "
     << trace.residual << ", tol " << cfg.tol << ")";
  throw SolverError(os.str(), trace);
}

SpdMatrix log_euclidean(const Weights& w, std::span<const SpdMatrix> as) {
  check_operands(w, as, "log_euclidean");
  const int k = sole_survivor(w);
  if (k >= 0) return as[k];
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(as[0].dim(), as[0].dim());
  for (std::size_t j = 0; j < as.size(); ++j)
    if (w[j] != 0.0) sum += w[j] * mat_log(as[j]);
  return mat_exp(symmetrize(sum));
}

MeanResult adjoint_nmean(const NMeanSpec& spec, std::span<const SpdMatrix> as,
                         const SolverConfig& cfg) {
  check_operands(spec.weights, as, "adjoint_nmean");
  std::vector<SpdMatrix> inverses;
  inverses.reserve(as.size());
  for (const SpdMatrix& a : as) inverses.push_back(mat_inv(a));
  MeanResult inner = evaluate_nmean(spec, inverses, cfg);
  return MeanResult{mat_inv(inner.value), inner.trace};
}

MeanResult evaluate_nmean(const NMeanSpec& spec, std::span<const SpdMatrix> as,
                          const SolverConfig& cfg) {
  if (spec.deform) return deformed_mean(spec, as, cfg);
  check_operands(spec.weights, as, "evaluate_nmean");
  SolveTrace trace;
  trace.converged = true;
  return MeanResult{base_mean(spec.base, spec.weights, as), trace};
}

}  // namespace meanslab
