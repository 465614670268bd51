#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nk/estimate.hpp"
#include "nk/model.hpp"
#include "nk/rational.hpp"

namespace nk {

// An ordered list of distinct window starts j1..jr on the cycle
// {1..n_loci}; window j covers the k+1 loci j, j+1, ..., j+k (cyclic).
struct CoverSequence {
    int n_loci = 0;
    int k = 0;
    std::vector<int> indices;
};

// What the cover-checking procedure produced: the verdict and the window
// starts it recorded, in pick order, up to the step where it stopped.
struct AlgorithmOutput {
    bool verdict = false;
    CoverSequence sequence;
};

// Order-statistics window event at j: the largest base value in the window
// {j-k..j} beats the largest of the k+1 mutant values attached to j.
bool h_prime_event(const NeighborhoodSample& sample, int j);

// Conjunction of h_prime_event over all loci.  Depends only on ranks, so
// its probability is the same for every continuous distribution.
bool check_direct(const NeighborhoodSample& sample);

// The greedy cover check: repeatedly take the largest still-active value;
// a mutant on top means FALSE, a base value gets recorded and deactivates
// the k+1 mutant groups its window guarantees; TRUE once no mutant group
// is active.  Verdict equals check_direct pointwise.
AlgorithmOutput run_cover_algorithm(const NeighborhoodSample& sample);

// M(s): number of loci not covered by the first s-1 windows of the prefix
// (so missed_count(prefix, 1) == n_loci).  Requires 1 <= s <= len+1.
int missed_count(const CoverSequence& prefix, int s);

// Exact probability that the cover procedure picks exactly this sequence
// of window starts (as its first len picks, with no FALSE before then):
//   prod_{s=1}^{len} 1 / (n - (s-1) + (k+1) M(s)).
Rational sequence_probability(const CoverSequence& seq);

// Exact probability that the procedure eventually returns TRUE given that
// its first picks were `prefix` (in any order — only the set matters).
// Memoized DFS; guarded to n_loci <= 12.
Rational q_exact(const CoverSequence& prefix);

struct EnumerationResult {
    Rational total;                // sum of enumerated covering-sequence masses
    std::map<int, Rational> per_r; // mass of covers completing at exactly r picks
    double remainder_bound = 0.0;  // bound on the un-enumerated r > r_max mass
    bool full = false;             // true when no sequence length was cut off
    std::uint64_t sequences = 0;   // covering sequences accounted for exactly
};

// Exact enumeration of p_fat(N,K).  Full mode (r_max = -1) sums every
// covering sequence and needs n_loci <= 12.  Restricted mode enumerates
// covers of at most r_max <= 4 windows (n_loci <= 2048) and bounds the
// rest, reporting partial sum and remainder separately.
EnumerationResult enumerate_exact(int n_loci, int k, int r_max = -1);

// Plain Monte Carlo for p_fat: mean of check_direct over uniform01
// samples (ranks suffice, so no other distribution is ever needed).
Estimate mc_p_fat(int n_loci, int k, std::uint64_t n_samples,
                  std::uint64_t seed, int jobs = 1);

// ---- continuum (torus) analogue ------------------------------------------
//
// x is a point of the r-dimensional unit torus, r = x.size().  T(y) is the
// set where the windows [x_i - beta, x_i], beta = 1/(r-y), cover the
// circle; eta is the continuum analogue of the discrete sequence weights.

// Membership in T(y): every cyclic gap between sorted coordinates is at
// most beta.  Requires 0 <= y <= r-1 (so beta <= 1).
bool torus_member(const std::vector<double>& x, double y);

// eta(x) = prod_{s=1}^{r} 1/Mtilde(s), where Mtilde(s) is the measure left
// uncovered by the windows of x_1..x_{s-1} (Mtilde(1) = 1).  Requires
// y <= 1, where the product is a.s. finite on T(y).
double eta_weight(const std::vector<double>& x, double y);

// f_r(y) = integral of eta over T(y), by Monte Carlo on the torus.
// Requires r >= 3 and y in [0,1]; for r = 3, y < 1 (f_3 diverges at 1).
Estimate f_r_mc(int r, double y, std::uint64_t n_samples, std::uint64_t seed,
                int jobs = 1);

// The same integral with eta capped at `cap`, plus the cap-halving
// sensitivity |estimate(cap) - estimate(cap/2)|.  This is the device used
// for the improper integral over T(1), whose uncapped variance diverges.
struct TruncatedIntegral {
    Estimate estimate;
    double cap = 0.0;
    double sensitivity = 0.0;
};
TruncatedIntegral f_r_truncated(int r, double y, double cap,
                                std::uint64_t n_samples, std::uint64_t seed,
                                int jobs = 1);

// Plain Monte Carlo estimate of the measure of T(y, r).
Estimate torus_measure_mc(int r, double y, std::uint64_t n_samples,
                          std::uint64_t seed, int jobs = 1);

// Asymptotic two-term prediction of p_fat(N,K) for large K.
struct Table1Prediction {
    double value = 0.0;
    int row = 0;    // 1: k+2 <= n <= 2(k+1); 2: 2 < n/(k+1) <= 8
    int j = -1;     // row 1 offset 2(k+1) - n
    int r = 0;      // row 2 window count ceil(n/(k+1))
    double y = 0.0; // row 2 slack r - n/(k+1)
    double term_main = 0.0;
    double term_correction = 0.0;
    Estimate f_r_estimate;    // row 2 only
    TruncatedIntegral f_next; // row 2 only
    std::vector<std::string> warnings;
};
Table1Prediction table1_predict(int n_loci, int k, std::uint64_t n_samples,
                                std::uint64_t seed, int jobs = 1);

} // namespace nk
