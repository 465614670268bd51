#pragma once

#include <cstdint>
#include <vector>

#include "nk/estimate.hpp"
#include "nk/rational.hpp"

namespace nk {

// p_0..p_n as exact rationals: the probability that a non-cyclic chain of
// n windows (n+1 base values, two mutant values per window) has every
// window maximum on the base side.
using RationalSeq = std::vector<Rational>;

// The same sequence as natural logs, for lengths far past where the raw
// probabilities underflow.
struct ScaledFloatSeq {
    std::vector<double> log_values;
};

// (3n+1) p_n = 2 p_{n-1} + sum_{a+b=n-2} p_a p_b, p_0 = 1, computed
// exactly.  Guarded to n_max <= 500.
RationalSeq recursion_exact(int n_max);

// Same recursion in floating point, carrying the sequence rescaled by
// exp(n*c) with c re-based online, so the convolution never leaves the
// double range.  Guarded to n_max <= 100000; matches recursion_exact to 12
// significant digits through n = 200.
ScaledFloatSeq recursion_float(int n_max);

struct GrowthReport {
    double rate = 0.0;        // Aitken-accelerated limit of log(p_n/p_{n-1})
    double rate_raw = 0.0;    // last raw increment log(p_n/p_{n-1})
    double z0_estimate = 0.0; // p_{n-1}/p_n: radius-of-convergence estimate
};

// Extrapolates log p_n / n from the tail of the sequence.  Requires at
// least 100 entries.
GrowthReport growth_rate(const ScaledFloatSeq& seq);

// The sequence is the coefficient list of the unique formal power series
// solving f + 3z f' = 1 + 2z f + z^2 f^2.  Returns the largest absolute
// coefficient residual of that equation through the sequence's order —
// exactly zero for output of recursion_exact.
Rational riccati_residual(const RationalSeq& seq);

enum class BesselKind { I, K };

// Modified Bessel functions at the rational orders the closed form of
// sum p_n z^n needs: nu in {±1/3, ±2/3, 1/2}, x in (0, 10], relative
// accuracy 1e-12.  I_nu by the ascending series, K_nu by reflection.
double bessel_modified(BesselKind kind, const Rational& nu, double x);

// sqrt(z) * (-A sqrt(2) I_{2/3}(w) + A sqrt(z) I_{-1/3}(w)
//            + sqrt(2) K_{2/3}(w) + sqrt(z) K_{1/3}(w)),
// with w = (2/3) sqrt(2z) and A = -pi sqrt(3)/3: the denominator of the
// Bessel closed form of sum p_n z^n.  Its smallest root in (1,3) is the
// radius of convergence z0, so log p_n / n -> -log z0.
double series_denominator(double z);

// Smallest root of series_denominator in (1, 3), by scan plus bisection
// to within tol (tol >= 1e-10).  Throws numeric_error if no sign change
// is found.
double find_z0(double tol);

// Direct Monte Carlo of the n-window chain event; unbiased for p_n.
Estimate mc_h_star(int n_chain, std::uint64_t n_samples, std::uint64_t seed,
                   int jobs = 1);

} // namespace nk
