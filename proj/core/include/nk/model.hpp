#pragma once

#include <cstdint>
#include <vector>

#include "nk/distributions.hpp"
#include "nk/rng.hpp"

namespace nk {

// Parameters of the random landscape: genome length n_loci, epistasis
// range k (each locus's contribution depends on itself and the next k loci
// cyclically), and the fitness distribution.
struct ModelParams {
    int n_loci = 0;
    int k = 0;
    DistributionKind dist = DistributionKind::uniform01;
};

// Enforces n_loci >= 2 and 1 <= k <= n_loci - 1.
void validate(const ModelParams& params);

// k == n_loci - 1 makes every window cover the whole genome; the model
// degenerates to n_loci+1 exchangeable sums.  Legal, but callers may want
// to flag it in output metadata.
bool is_exchangeable_case(const ModelParams& params);

// The fitness variables relevant to the all-zero genome and its single-bit
// neighbors: base values y[j-1] = Y_j for 1 <= j <= n_loci, and mutant
// values y_mut[(j-1)*(k+1)+i] = Y_{j,i} for 0 <= i <= k.  Y_{j,i} is the
// fresh contribution of the window starting at locus j-i when locus j
// flips, so for fixed j the Y_{j,i} run over the k+1 windows containing j.
struct NeighborhoodSample {
    int n_loci = 0;
    int k = 0;
    std::vector<double> y;
    std::vector<double> y_mut;

    double base(int j) const { return y[j - 1]; }
    double mutant(int j, int i) const { return y_mut[(j - 1) * (k + 1) + i]; }
};

// n_loci*(k+2) i.i.d. draws, deterministic in (seed, stream).  Exact ties
// between any two drawn values are resolved by redrawing, so all values
// are pairwise distinct and order-based events are unambiguous.
NeighborhoodSample sample_neighborhood(const ModelParams& params,
                                       std::uint64_t seed,
                                       std::uint64_t stream = 0);

// Allocation-free variant for hot sampling loops; `scratch` is workspace
// for the tie check and is resized as needed.
void sample_neighborhood_into(NeighborhoodSample& out,
                              std::vector<double>& scratch,
                              const ModelParams& params, StreamRng& rng);

// Event H_j: the zero genome beats the flip at locus j, i.e.
// sum_{i=j-k}^{j} Y_i >= sum_{i=0}^{k} Y_{j,i} (locus indices mod n_loci).
bool h_event(const NeighborhoodSample& sample, int j);

// Conjunction of h_event over j = 1..n_loci: the zero genome is a local
// fitness maximum.
bool zero_is_lfm(const NeighborhoodSample& sample);

using Genome = std::vector<std::uint8_t>;

// Complete table of window contributions: entry (j, s) is the contribution
// of the window starting at locus j when its k+1 loci j, j+1, ..., j+k
// (cyclic) carry bit pattern s, with bit i of s = allele at locus j+i.
struct FullLandscape {
    int n_loci = 0;
    int k = 0;
    std::vector<double> table; // n_loci * 2^(k+1) entries, row-major by window

    double value(int j, unsigned pattern) const {
        return table[(static_cast<std::size_t>(j - 1) << (k + 1)) | pattern];
    }
};

// Exhaustive landscape table; guarded to n_loci <= 24 and k <= 16.  All
// entries are pairwise distinct (tie redraw, as in sample_neighborhood).
FullLandscape sample_landscape(const ModelParams& params, std::uint64_t seed,
                               std::uint64_t stream = 0);

// Fitness of an arbitrary genome: sum over the n_loci windows.
double genome_fitness(const FullLandscape& landscape, const Genome& genome);

// Number of genomes whose fitness strictly exceeds all n_loci single-bit
// neighbors.  The expected count is 2^n_loci * p(N,K).  Materializes the
// full 2^n_loci fitness table; rejected above n_loci = 24.
long long count_lfm(const FullLandscape& landscape);

// Extracts from a full landscape exactly the variables that decide whether
// the zero genome is a local maximum, in NeighborhoodSample layout.
NeighborhoodSample neighborhood_of_zero(const FullLandscape& landscape);

} // namespace nk
