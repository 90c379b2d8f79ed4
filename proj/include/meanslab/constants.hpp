#pragma once

namespace meanslab {

/// Generalized Kantorovich constant
///
///   K(h, p) = (h^p - h) / ((p-1)(h-1)) * ((p-1)/p * (h^p - 1)/(h^p - h))^p
///
/// for h >= 1 and real p. The removable singularities at h = 1 and
/// p in {0, 1} evaluate to 1 (guard bands |h-1| < 1e-8, |p| < 1e-10,
/// |p-1| < 1e-10). K(h, 2) = K(h, -1) = (h+1)^2 / (4h).
double kantorovich(double h, double p);

/// Specht ratio S(h) = (h-1) h^{1/(h-1)} / (e log h) for h > 1, S(1) = 1.
/// Strictly increasing on [1, inf).
double specht(double h);

/// Bound for Phi(A) - alpha * Phi(A^{-1})^{-1} over spectra in [m, M]:
///
///   beta(m, M, alpha) = M + m - 2 sqrt(alpha M m)   if m <= sqrt(alpha M m) <= M
///                       (1 - alpha) m               if M <= sqrt(alpha M m)
///                       (1 - alpha) M               if sqrt(alpha M m) <= m
///
/// Equals max over t in [m, M] of t - alpha * M m / (M + m - t).
double beta(double m, double M, double alpha);

/// Bound for Phi(X^r) - alpha * Phi(X)^r over spectra in [m, M], r outside
/// [0, 1] (for r in (0,1) the same expression is the reverse-direction
/// bound). Piecewise in t* = ((M^r - m^r) / (alpha r (M - m)))^{1/(r-1)};
/// ties at the interval endpoints resolve to the middle branch.
double gamma(double m, double M, double r, double alpha);

/// True iff K(h, -r) <= K(h, -1)^r when r in (0, 1), resp. >= when r >= 1,
/// within 1e-12 relative slack (log-convexity of r -> K(h, -r)).
bool kantorovich_logconvexity_check(double h, double r);

}  // namespace meanslab
