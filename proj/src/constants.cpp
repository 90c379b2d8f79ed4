#include "meanslab/constants.hpp"

#include <cmath>
#include <sstream>

#include "meanslab/errors.hpp"

namespace meanslab {

namespace {

void require_h(double h, const char* who) {
  if (!(h >= 1.0)) {
    std::ostringstream os;
    os << who << ": need h >= 1, got " << h;
    throw ValidationError(os.str());
  }
}

void require_bounds(double m, double M, const char* who) {
  if (!(m > 0.0) || !(m < M)) {
    std::ostringstream os;
    os << who << ": need 0 < m < M, got m=" << m << " M=" << M;
    throw ValidationError(os.str());
  }
}

void require_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0)) {
    std::ostringstream os;
    os << who << ": need alpha > 0, got " << alpha;
    throw ValidationError(os.str());
  }
}

}  // namespace

double kantorovich(double h, double p) {
  require_h(h, "kantorovich");
  if (std::abs(h - 1.0) < 1e-8) return 1.0;
  if (std::abs(p) < 1e-10 || std::abs(p - 1.0) < 1e-10) return 1.0;
  // expm1 keeps h^p - h and h^p - 1 accurate near the removable
  // singularities; the outer power runs in the log domain.
  const double lh = std::log(h);
  const double hp_minus_h = h * std::expm1((p - 1.0) * lh);
  const double hp_minus_1 = std::expm1(p * lh);
  const double front = hp_minus_h / ((p - 1.0) * (h - 1.0));
  const double base = (p - 1.0) / p * hp_minus_1 / hp_minus_h;
  return front * std::exp(p * std::log(base));
}

double specht(double h) {
  require_h(h, "specht");
  if (std::abs(h - 1.0) < 1e-8) return 1.0;
  return (h - 1.0) * std::pow(h, 1.0 / (h - 1.0)) / (std::exp(1.0) * std::log(h));
}

double beta(double m, double M, double alpha) {
  require_bounds(m, M, "beta");
  require_alpha(alpha, "beta");
  const double s = std::sqrt(alpha * M * m);
  if (m <= s && s <= M) return M + m - 2.0 * s;
  if (s >= M) return (1.0 - alpha) * m;
  return (1.0 - alpha) * M;
}

double gamma(double m, double M, double r, double alpha) {
  require_bounds(m, M, "gamma");
  require_alpha(alpha, "gamma");
  if (std::abs(r) < 1e-10 || std::abs(r - 1.0) < 1e-10) {
    std::ostringstream os;
    os << "gamma: exponent singularity at r=" << r << " (r in {0,1} is excluded)";
    throw DomainError(os.str());
  }
  const double mu = (std::pow(M, r) - std::pow(m, r)) / (M - m);
  const double nu = (M * std::pow(m, r) - m * std::pow(M, r)) / (M - m);
  const double ratio = mu / (alpha * r);  // positive for every admissible (m, M, r, alpha)
  const double tstar = std::exp(std::log(ratio) / (r - 1.0));
  if (m <= tstar && tstar <= M)
    return alpha * (r - 1.0) * std::exp(r / (r - 1.0) * std::log(ratio)) + nu;
  if (tstar >= M) return (1.0 - alpha) * std::pow(M, r);
  return (1.0 - alpha) * std::pow(m, r);
}

bool kantorovich_logconvexity_check(double h, double r) {
  if (!(h > 1.0)) throw ValidationError("kantorovich_logconvexity_check: need h > 1");
  if (!(r > 0.0)) throw ValidationError("kantorovich_logconvexity_check: need r > 0");
  const double lhs = kantorovich(h, -r);
  const double rhs = std::pow(kantorovich(h, -1.0), r);
  const double slack = 1e-12 * std::max(1.0, std::max(lhs, rhs));
  if (r < 1.0) return lhs <= rhs + slack;
  return lhs >= rhs - slack;
}

}  // namespace meanslab
