#include "nk/model.hpp"

#include <algorithm>
#include <stdexcept>

#include "nk/errors.hpp"

namespace nk {

namespace {

// Locus index arithmetic is 1-based modulo n_loci.
int wrap(int j, int n) {
    j %= n;
    if (j <= 0) j += n;
    return j;
}

// Redraws entries until all values in `values` are pairwise distinct.
// Collisions have probability ~n²·2⁻⁵³ per sample, so this almost never
// loops, but order-based events downstream require strict ordering.
void reject_ties(std::vector<double>& values, std::vector<double>& scratch,
                 DistributionKind dist, StreamRng& rng) {
    for (;;) {
        scratch.assign(values.begin(), values.end());
        std::sort(scratch.begin(), scratch.end());
        const auto dup = std::adjacent_find(scratch.begin(), scratch.end());
        if (dup == scratch.end()) return;
        // Redraw the second occurrence of the duplicated value.
        bool seen = false;
        for (auto& v : values) {
            if (v == *dup) {
                if (seen) {
                    v = quantile(dist, rng.next_uniform());
                    break;
                }
                seen = true;
            }
        }
    }
}

} // namespace

void validate(const ModelParams& params) {
    if (params.n_loci < 2) {
        throw std::invalid_argument("model requires n_loci >= 2");
    }
    if (params.k < 1 || params.k > params.n_loci - 1) {
        throw std::invalid_argument("model requires 1 <= k <= n_loci - 1");
    }
}

bool is_exchangeable_case(const ModelParams& params) {
    return params.k == params.n_loci - 1;
}

void sample_neighborhood_into(NeighborhoodSample& out,
                              std::vector<double>& scratch,
                              const ModelParams& params, StreamRng& rng) {
    const int n = params.n_loci;
    const int k = params.k;
    out.n_loci = n;
    out.k = k;
    out.y.resize(n);
    out.y_mut.resize(static_cast<std::size_t>(n) * (k + 1));
    for (auto& v : out.y) v = quantile(params.dist, rng.next_uniform());
    for (auto& v : out.y_mut) v = quantile(params.dist, rng.next_uniform());

    // Tie rejection over the union of base and mutant values.
    scratch.resize(out.y.size() + out.y_mut.size());
    for (;;) {
        scratch.assign(out.y.begin(), out.y.end());
        scratch.insert(scratch.end(), out.y_mut.begin(), out.y_mut.end());
        std::sort(scratch.begin(), scratch.end());
        if (std::adjacent_find(scratch.begin(), scratch.end()) == scratch.end()) {
            break;
        }
        // Rare path: redraw everything that collides, one entry at a time.
        std::vector<double> all(out.y);
        all.insert(all.end(), out.y_mut.begin(), out.y_mut.end());
        reject_ties(all, scratch, params.dist, rng);
        std::copy(all.begin(), all.begin() + out.y.size(), out.y.begin());
        std::copy(all.begin() + out.y.size(), all.end(), out.y_mut.begin());
    }
}

NeighborhoodSample sample_neighborhood(const ModelParams& params,
                                       std::uint64_t seed,
                                       std::uint64_t stream) {
    validate(params);
    StreamRng rng(seed, stream);
    NeighborhoodSample out;
    std::vector<double> scratch;
    sample_neighborhood_into(out, scratch, params, rng);
    return out;
}

bool h_event(const NeighborhoodSample& sample, int j) {
    const int n = sample.n_loci;
    const int k = sample.k;
    if (j < 1 || j > n) {
        throw std::invalid_argument("h_event: locus index out of range");
    }
    double lhs = 0.0;
    for (int i = j - k; i <= j; ++i) {
        lhs += sample.base(wrap(i, n));
    }
    double rhs = 0.0;
    for (int i = 0; i <= k; ++i) {
        rhs += sample.mutant(j, i);
    }
    return lhs >= rhs;
}

bool zero_is_lfm(const NeighborhoodSample& sample) {
    for (int j = 1; j <= sample.n_loci; ++j) {
        if (!h_event(sample, j)) return false;
    }
    return true;
}

FullLandscape sample_landscape(const ModelParams& params, std::uint64_t seed,
                               std::uint64_t stream) {
    validate(params);
    if (params.n_loci > 24 || params.k > 16) {
        throw infeasible_error("sample_landscape: table limited to n_loci <= 24, k <= 16");
    }
    StreamRng rng(seed, stream);
    FullLandscape out;
    out.n_loci = params.n_loci;
    out.k = params.k;
    out.table.resize(static_cast<std::size_t>(params.n_loci) << (params.k + 1));
    for (auto& v : out.table) v = quantile(params.dist, rng.next_uniform());
    std::vector<double> scratch;
    reject_ties(out.table, scratch, params.dist, rng);
    return out;
}

double genome_fitness(const FullLandscape& landscape, const Genome& genome) {
    const int n = landscape.n_loci;
    const int k = landscape.k;
    if (static_cast<int>(genome.size()) != n) {
        throw std::invalid_argument("genome_fitness: genome length mismatch");
    }
    double fitness = 0.0;
    for (int j = 1; j <= n; ++j) {
        unsigned pattern = 0;
        for (int i = 0; i <= k; ++i) {
            pattern |= static_cast<unsigned>(genome[wrap(j + i, n) - 1] & 1) << i;
        }
        fitness += landscape.value(j, pattern);
    }
    return fitness;
}

long long count_lfm(const FullLandscape& landscape) {
    const int n = landscape.n_loci;
    const int k = landscape.k;
    if (n > 24) {
        throw infeasible_error("count_lfm: exhaustive scan limited to n_loci <= 24");
    }
    const std::uint32_t size = std::uint32_t{1} << n;
    const std::uint32_t genome_mask = size - 1;
    const unsigned window_mask = (1u << (k + 1)) - 1;

    // Fitness of every genome.  The window pattern at j is a k+1 bit slice
    // of the genome rotated so locus j sits at bit 0.
    std::vector<double> fitness(size);
    for (std::uint32_t g = 0; g < size; ++g) {
        double f = 0.0;
        for (int j = 1; j <= n; ++j) {
            const unsigned rot =
                ((g >> (j - 1)) | (g << (n - j + 1))) & genome_mask;
            f += landscape.value(j, rot & window_mask);
        }
        fitness[g] = f;
    }

    long long count = 0;
    for (std::uint32_t g = 0; g < size; ++g) {
        bool is_max = true;
        for (int l = 0; l < n && is_max; ++l) {
            is_max = fitness[g] > fitness[g ^ (std::uint32_t{1} << l)];
        }
        count += is_max;
    }
    return count;
}

NeighborhoodSample neighborhood_of_zero(const FullLandscape& landscape) {
    const int n = landscape.n_loci;
    const int k = landscape.k;
    NeighborhoodSample out;
    out.n_loci = n;
    out.k = k;
    out.y.resize(n);
    out.y_mut.resize(static_cast<std::size_t>(n) * (k + 1));
    for (int j = 1; j <= n; ++j) {
        out.y[j - 1] = landscape.value(j, 0);
        // Y_{j,i} is the contribution of window j-i with the single set bit
        // at offset i, i.e. at locus j.
        for (int i = 0; i <= k; ++i) {
            out.y_mut[(j - 1) * (k + 1) + i] =
                landscape.value(wrap(j - i, n), 1u << i);
        }
    }
    return out;
}

} // namespace nk
