#pragma once

#include <cstdint>
#include <string>

#include "nk/model.hpp"

namespace nk {

// A Monte Carlo result: point estimate, standard error (sample standard
// deviation / √n), and the inputs needed to reproduce it.  The probability
// estimators keep p_hat in [0,1]; the torus integrals reuse this type with
// integrand means that may legitimately exceed 1.
struct Estimate {
    double p_hat = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::string method;
};

// Plain estimator: mean of the local-maximum indicator over independent
// neighborhood samples.
Estimate direct_mc(const ModelParams& params, std::uint64_t n_samples,
                   std::uint64_t seed, int jobs = 1);

// Rao-Blackwellized estimator: draws only the base values and integrates
// the mutants out exactly, averaging the per-sample conditional
// probability Π_j F^(k+1)(window sum at j).  Same target as direct_mc,
// never higher variance.
Estimate conditional_mc(const ModelParams& params, std::uint64_t n_samples,
                        std::uint64_t seed, int jobs = 1);

// log of the integrand of the normal-case bound:
//   n_loci · log Φ(x·√((k+1)/n_loci)) + log φ(x).
double log_normal_integrand(double x, int n_loci, int k);

// ∫ Φ(x√((k+1)/N))^N φ(x) dx by adaptive quadrature to relative accuracy
// tol: an upper bound for p(N,K) under the normal distribution.
double normal_upper_bound(int n_loci, int k, double tol = 1e-10);

// Where the mass of that integral sits.
struct SaddleReport {
    double x_max = 0.0;     // argmax of the log integrand
    double log_i_max = 0.0; // maximum of the log integrand
    double x0 = 0.0;        // analytic probe point √((2N/(k+1)) log(k+1))
    double log_i_x0 = 0.0;  // log integrand at the probe
};

// Golden-section maximization of the strictly concave log integrand.
// Requires k >= 2.
SaddleReport normal_saddle(int n_loci, int k, double x_tol = 1e-8);

} // namespace nk
