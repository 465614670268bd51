#pragma once

namespace nk {

// log Γ(x) for x > 0 (Lanczos approximation, ~1e-13 relative).
double log_gamma(double x);

// Regularized incomplete gamma functions: gamma_p(a,x) = P(a,x) is the
// lower tail, gamma_q(a,x) = Q(a,x) = 1 - P(a,x) the upper tail.  P(m,s)
// is the Erlang(m) CDF at s, which is what the sum-of-exponentials code
// needs.  Requires a > 0, x >= 0.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Standard normal density and CDF.
double norm_pdf(double x);
double norm_cdf(double x);

// log Φ(x), stable far into the left tail (asymptotic expansion once the
// erfc path would underflow, around x < -36).
double log_norm_cdf(double x);

// Inverse of norm_cdf on (0,1): rational initial guess polished by one
// Halley step, good to ~1e-15 across the full double range of p.
double norm_quantile(double p);

// CDF of a sum of m independent U(0,1) variables.
//
// The alternating closed form is numerically exact for small m but loses
// digits to cancellation as m grows; past kIrwinHallClosedFormMax the
// dispatcher switches to a cached grid convolution (documented
// approximation, absolute error ~1e-5).  Both routes are exposed so they
// can be cross-checked against each other in the overlap region.
inline constexpr int kIrwinHallClosedFormMax = 25;
double irwin_hall_cdf(int m, double s);
double irwin_hall_cdf_closed(int m, double s);
double irwin_hall_cdf_grid(int m, double s);

// log of irwin_hall_cdf with an exact single-term branch for s <= 1
// (F(s) = s^m/m! there), where the plain CDF would underflow first.
double log_irwin_hall_cdf(int m, double s);

} // namespace nk
