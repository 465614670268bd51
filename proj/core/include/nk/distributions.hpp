#pragma once

#include <string>
#include <string_view>

namespace nk {

// The five supported fitness distributions.  All are continuous, so ties
// among sampled values happen with probability zero (and the sampler
// rejects the few that float rounding produces anyway).
//
// Conventions: exponential is rate 1; negexponential is the negative of a
// rate-1 exponential (support (-inf, 0]); cauchy is the standard symmetric
// Cauchy; normal is standard.
enum class DistributionKind {
    normal,
    uniform01,
    exponential,
    negexponential,
    cauchy,
};

// Name <-> tag mapping used by the CLI ("normal", "uniform01",
// "exponential", "negexponential", "cauchy").
DistributionKind parse_distribution(std::string_view name);
std::string to_string(DistributionKind dist);

// Quantile transform: maps u in (0,1) to a draw from dist.  Every branch
// is strictly increasing in u, which is what makes verdicts of the
// rank-based events identical across distributions driven by the same
// uniform stream.
double quantile(DistributionKind dist, double u);

// CDF of a sum of m independent draws, evaluated at s.  Exact closed or
// special-function forms everywhere except uniform01 sums with
// m > kIrwinHallClosedFormMax, which use a documented grid approximation.
double cdf_sum(DistributionKind dist, int m, double s);

// log of cdf_sum, stable deep in the lower tail (the normal branch in
// particular would underflow to 0 long before its log stops being useful).
double log_cdf_sum(DistributionKind dist, int m, double s);

} // namespace nk
