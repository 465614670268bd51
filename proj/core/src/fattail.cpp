#include "nk/fattail.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "nk/errors.hpp"
#include "nk/parallel.hpp"

namespace nk {
namespace {

int wrap_locus(int j, int n) { return ((j - 1) % n + n) % n + 1; }

void validate_pair(int n_loci, int k) {
    ModelParams params{n_loci, k, DistributionKind::uniform01};
    validate(params);
}

void validate_sequence(const CoverSequence& seq) {
    validate_pair(seq.n_loci, seq.k);
    std::vector<char> seen(static_cast<std::size_t>(seq.n_loci) + 1, 0);
    for (int j : seq.indices) {
        if (j < 1 || j > seq.n_loci)
            throw std::invalid_argument("window start out of range");
        if (seen[j]) throw std::invalid_argument("window starts must be distinct");
        seen[j] = 1;
    }
}

void check_samples(std::uint64_t n_samples) {
    if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");
}

// exact num/den with a 128-bit denominator (products of at most a dozen
// step denominators fit comfortably)
Rational make_ratio(unsigned long num, unsigned __int128 den) {
    mpz_class d = static_cast<unsigned long>(den >> 64);
    d <<= 64;
    d += static_cast<unsigned long>(den);
    Rational q(mpz_class(num), d);
    q.canonicalize();
    return q;
}

// ---- full enumeration over bitmask states (n_loci <= 12) -----------------

struct FullEnumerator {
    int n = 0;
    int k = 0;
    std::uint32_t all = 0;
    std::vector<std::uint32_t> window; // window[j-1]: loci covered by start j
    std::map<int, Rational> per_r;
    std::uint64_t leaves = 0;

    void dfs(std::uint32_t used, std::uint32_t covered, int depth,
             unsigned __int128 den) {
        if (covered == all) {
            per_r[depth] += make_ratio(static_cast<unsigned long>(n), den);
            ++leaves;
            return;
        }
        const int missed = n - std::popcount(covered);
        const unsigned __int128 child_den =
            den * static_cast<unsigned long>(n - depth + (k + 1) * missed);
        for (int j = 0; j < n; ++j) {
            if (used >> j & 1u) continue;
            dfs(used | (std::uint32_t{1} << j), covered | window[j], depth + 1,
                child_den);
        }
    }
};

// ---- restricted enumeration over coverage arcs (n_loci <= 2048) ----------

// Disjoint sorted inclusive segments [a,b] of 0-based positions.
using ArcList = std::vector<std::pair<int, int>>;

void insert_arc(ArcList& segs, int a, int b) {
    ArcList merged;
    merged.reserve(segs.size() + 1);
    bool placed = false;
    for (const auto& s : segs) {
        if (s.second + 1 < a) {
            merged.push_back(s);
        } else if (b + 1 < s.first) {
            if (!placed) {
                merged.emplace_back(a, b);
                placed = true;
            }
            merged.push_back(s);
        } else { // overlaps or touches: absorb into [a,b]
            a = std::min(a, s.first);
            b = std::max(b, s.second);
        }
    }
    if (!placed) merged.emplace_back(a, b);
    segs = std::move(merged);
}

int arc_overlap(const ArcList& segs, int a, int b) {
    int total = 0;
    for (const auto& s : segs) {
        const int lo = std::max(a, s.first);
        const int hi = std::min(b, s.second);
        if (hi >= lo) total += hi - lo + 1;
    }
    return total;
}

struct RestrictedEnumerator {
    int n = 0;
    int k = 0;
    int r_max = 0;
    std::map<int, Rational> per_r;
    double remainder = 0.0;
    std::uint64_t leaves = 0;

    // window start j (1-based) as one or two linear segments
    void window_pieces(int j, int piece[2][2], int& n_pieces) const {
        const int a = j - 1;
        const int b = a + k;
        if (b <= n - 1) {
            piece[0][0] = a;
            piece[0][1] = b;
            n_pieces = 1;
        } else {
            piece[0][0] = a;
            piece[0][1] = n - 1;
            piece[1][0] = 0;
            piece[1][1] = b - n;
            n_pieces = 2;
        }
    }

    int gain(const ArcList& segs, int j) const {
        int piece[2][2];
        int n_pieces = 0;
        window_pieces(j, piece, n_pieces);
        int overlap = 0;
        for (int p = 0; p < n_pieces; ++p)
            overlap += arc_overlap(segs, piece[p][0], piece[p][1]);
        return (k + 1) - overlap;
    }

    void add_window(ArcList& segs, int j) const {
        int piece[2][2];
        int n_pieces = 0;
        window_pieces(j, piece, n_pieces);
        for (int p = 0; p < n_pieces; ++p)
            insert_arc(segs, piece[p][0], piece[p][1]);
    }

    static bool contains(const std::vector<int>& used, int j) {
        return std::find(used.begin(), used.end(), j) != used.end();
    }

    double continuation_bound(int missed) const {
        return std::min(1.0, 1.0 / missed + 1.0 / k);
    }

    void dfs(const ArcList& segs, std::vector<int>& used,
             unsigned __int128 den, int depth) {
        int covered = 0;
        for (const auto& s : segs) covered += s.second - s.first + 1;
        const int missed = n - covered;
        if (missed == 0) {
            per_r[depth] += make_ratio(static_cast<unsigned long>(n), den);
            ++leaves;
            return;
        }
        if (depth == r_max) {
            remainder += static_cast<double>(n) / static_cast<double>(den) *
                         continuation_bound(missed);
            return;
        }
        const unsigned long d =
            static_cast<unsigned long>(n - depth) +
            static_cast<unsigned long>(k + 1) * static_cast<unsigned long>(missed);
        const unsigned __int128 child_den = den * d;
        if (depth + 1 == r_max) {
            // Last enumerated level: count the window starts that finish the
            // cover (they share the denominator), and bound the continuation
            // mass of every other start without recursing.
            unsigned long completions = 0;
            const double child_den_dbl = static_cast<double>(child_den);
            for (int j = 1; j <= n; ++j) {
                if (contains(used, j)) continue;
                const int g = gain(segs, j);
                if (g == missed) {
                    ++completions;
                } else {
                    remainder += static_cast<double>(n) / child_den_dbl *
                                 continuation_bound(missed - g);
                }
            }
            if (completions > 0) {
                per_r[r_max] += make_ratio(
                    static_cast<unsigned long>(n) * completions, child_den);
                leaves += completions;
            }
            return;
        }
        for (int j = 1; j <= n; ++j) {
            if (contains(used, j)) continue;
            ArcList child = segs;
            add_window(child, j);
            used.push_back(j);
            dfs(child, used, child_den, depth + 1);
            used.pop_back();
        }
    }
};

EnumerationResult finish_result(std::map<int, Rational>&& per_r,
                                double remainder, std::uint64_t leaves,
                                int n) {
    EnumerationResult res;
    res.per_r = std::move(per_r);
    for (const auto& [r, mass] : res.per_r) {
        (void)r;
        res.total += mass;
    }
    res.remainder_bound = remainder;
    res.full = (remainder == 0.0);
    res.sequences = leaves * static_cast<std::uint64_t>(n);
    return res;
}

// ---- torus helpers --------------------------------------------------------

void validate_torus_point(const std::vector<double>& x) {
    if (x.size() < 2)
        throw std::invalid_argument("torus point needs at least 2 coordinates");
    for (double v : x)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("torus coordinates must lie in [0,1]");
}

bool member_impl(const std::vector<double>& x, double beta,
                 std::vector<double>& sort_buf) {
    sort_buf.assign(x.begin(), x.end());
    std::sort(sort_buf.begin(), sort_buf.end());
    double prev = sort_buf.back() - 1.0;
    for (double v : sort_buf) {
        if (v - prev > beta) return false;
        prev = v;
    }
    return true;
}

// measure of [0,1)-intervals kept disjoint and sorted
void add_interval(std::vector<std::pair<double, double>>& segs, double lo,
                  double hi) {
    if (hi <= lo) return;
    segs.emplace_back(lo, hi);
    std::sort(segs.begin(), segs.end());
    std::size_t out = 0;
    for (std::size_t i = 1; i < segs.size(); ++i) {
        if (segs[i].first <= segs[out].second) {
            segs[out].second = std::max(segs[out].second, segs[i].second);
        } else {
            segs[++out] = segs[i];
        }
    }
    segs.resize(out + 1);
}

// prod over s of 1/(uncovered measure before window s); the windows are
// [x_s - beta, x_s), wrapped
double eta_impl(const std::vector<double>& x, double beta,
                std::vector<std::pair<double, double>>& segs) {
    segs.clear();
    double eta = 1.0;
    for (std::size_t s = 0; s < x.size(); ++s) {
        if (s > 0) {
            double covered = 0.0;
            for (const auto& seg : segs) covered += seg.second - seg.first;
            const double m = 1.0 - covered;
            if (m <= 0.0) return std::numeric_limits<double>::infinity();
            eta /= m;
        }
        const double hi = x[s];
        const double lo = hi - beta;
        if (lo < 0.0) {
            add_interval(segs, lo + 1.0, 1.0);
            add_interval(segs, 0.0, hi);
        } else {
            add_interval(segs, lo, hi);
        }
    }
    return eta;
}

void validate_fr_args(int r, double y) {
    if (r < 3) throw std::invalid_argument("f_r is defined for r >= 3");
    if (!(y >= 0.0 && y <= 1.0))
        throw std::invalid_argument("f_r argument y must lie in [0,1]");
}

struct TwoMeans {
    MeanAccumulator main;
    MeanAccumulator half;
    TwoMeans& operator+=(const TwoMeans& o) {
        main += o.main;
        half += o.half;
        return *this;
    }
};

} // namespace

bool h_prime_event(const NeighborhoodSample& sample, int j) {
    const int n = sample.n_loci;
    const int k = sample.k;
    if (j < 1 || j > n) throw std::invalid_argument("locus index out of range");
    double best_base = -std::numeric_limits<double>::infinity();
    for (int t = j - k; t <= j; ++t)
        best_base = std::max(best_base, sample.base(wrap_locus(t, n)));
    double best_mut = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= k; ++i)
        best_mut = std::max(best_mut, sample.mutant(j, i));
    return best_base >= best_mut;
}

bool check_direct(const NeighborhoodSample& sample) {
    for (int j = 1; j <= sample.n_loci; ++j)
        if (!h_prime_event(sample, j)) return false;
    return true;
}

AlgorithmOutput run_cover_algorithm(const NeighborhoodSample& sample) {
    const int n = sample.n_loci;
    const int k = sample.k;
    struct Entry {
        double value;
        int j;
        bool mutant;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(n) * (k + 2));
    for (int j = 1; j <= n; ++j) entries.push_back({sample.base(j), j, false});
    for (int j = 1; j <= n; ++j)
        for (int i = 0; i <= k; ++i)
            entries.push_back({sample.mutant(j, i), j, true});
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.value > b.value; });

    std::vector<char> active(static_cast<std::size_t>(n) + 1, 1);
    int n_active = n;
    AlgorithmOutput out;
    out.sequence.n_loci = n;
    out.sequence.k = k;
    for (const auto& e : entries) {
        if (e.mutant) {
            // a mutant value on top of an active group: some window event
            // already lost
            if (active[e.j]) {
                out.verdict = false;
                return out;
            }
        } else {
            // a base value on top: it wins every window event it belongs to
            out.sequence.indices.push_back(e.j);
            for (int t = e.j; t <= e.j + k; ++t) {
                const int idx = wrap_locus(t, n);
                if (active[idx]) {
                    active[idx] = 0;
                    --n_active;
                }
            }
            if (n_active == 0) {
                out.verdict = true;
                return out;
            }
        }
    }
    out.verdict = (n_active == 0);
    return out;
}

int missed_count(const CoverSequence& prefix, int s) {
    validate_sequence(prefix);
    const int len = static_cast<int>(prefix.indices.size());
    if (s < 1 || s > len + 1)
        throw std::invalid_argument("step index must be in 1..len+1");
    const int n = prefix.n_loci;
    std::vector<char> covered(static_cast<std::size_t>(n) + 1, 0);
    for (int t = 0; t < s - 1; ++t)
        for (int u = prefix.indices[t]; u <= prefix.indices[t] + prefix.k; ++u)
            covered[wrap_locus(u, n)] = 1;
    int missed = 0;
    for (int j = 1; j <= n; ++j)
        if (!covered[j]) ++missed;
    return missed;
}

Rational sequence_probability(const CoverSequence& seq) {
    validate_sequence(seq);
    const int n = seq.n_loci;
    const int k = seq.k;
    std::vector<char> covered(static_cast<std::size_t>(n) + 1, 0);
    int missed = n;
    Rational prob(1);
    for (std::size_t t = 0; t < seq.indices.size(); ++t) {
        const long denom =
            (n - static_cast<long>(t)) + static_cast<long>(k + 1) * missed;
        prob /= denom;
        for (int u = seq.indices[t]; u <= seq.indices[t] + k; ++u) {
            const int idx = wrap_locus(u, n);
            if (!covered[idx]) {
                covered[idx] = 1;
                --missed;
            }
        }
    }
    return prob;
}

Rational q_exact(const CoverSequence& prefix) {
    validate_sequence(prefix);
    const int n = prefix.n_loci;
    const int k = prefix.k;
    if (n > 12)
        throw infeasible_error(
            "exact continuation probability needs n_loci <= 12");
    std::vector<std::uint32_t> window(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < n; ++j)
        for (int t = 0; t <= k; ++t)
            window[j] |= std::uint32_t{1} << ((j + t) % n);
    const std::uint32_t all = (std::uint32_t{1} << n) - 1;

    std::unordered_map<std::uint32_t, Rational> memo;
    auto go = [&](auto&& self, std::uint32_t used) -> Rational {
        std::uint32_t covered = 0;
        for (int j = 0; j < n; ++j)
            if (used >> j & 1u) covered |= window[j];
        if (covered == all) return Rational(1);
        if (auto it = memo.find(used); it != memo.end()) return it->second;
        const int picks = std::popcount(used);
        const int missed = n - std::popcount(covered);
        const long denom = (n - picks) + static_cast<long>(k + 1) * missed;
        Rational sum(0);
        for (int j = 0; j < n; ++j)
            if (!(used >> j & 1u)) sum += self(self, used | (std::uint32_t{1} << j));
        sum /= denom;
        memo.emplace(used, sum);
        return sum;
    };

    std::uint32_t used = 0;
    for (int j : prefix.indices) used |= std::uint32_t{1} << (j - 1);
    return go(go, used);
}

EnumerationResult enumerate_exact(int n_loci, int k, int r_max) {
    validate_pair(n_loci, k);
    if (r_max == 0 || r_max < -1)
        throw std::invalid_argument("r_max must be -1 (full) or in 1..4");
    if (r_max < 0) {
        if (n_loci > 12)
            throw infeasible_error(
                "full enumeration needs n_loci <= 12; pass r_max to bound the "
                "cover length instead");
        FullEnumerator e;
        e.n = n_loci;
        e.k = k;
        e.all = (std::uint32_t{1} << n_loci) - 1;
        e.window.assign(static_cast<std::size_t>(n_loci), 0);
        for (int j = 0; j < n_loci; ++j)
            for (int t = 0; t <= k; ++t)
                e.window[j] |= std::uint32_t{1} << ((j + t) % n_loci);
        // canonical first pick j1 = 1, multiplied back by n_loci: rotating a
        // sequence never fixes it, so the orbit of every sequence has
        // exactly n_loci members of equal probability
        const unsigned __int128 d1 =
            static_cast<unsigned long>(n_loci) * static_cast<unsigned long>(k + 2);
        e.dfs(std::uint32_t{1}, e.window[0], 1, d1);
        return finish_result(std::move(e.per_r), 0.0, e.leaves, n_loci);
    }
    if (r_max > 4)
        throw infeasible_error("restricted enumeration supports r_max <= 4");
    if (n_loci > 2048)
        throw infeasible_error("restricted enumeration supports n_loci <= 2048");
    RestrictedEnumerator e;
    e.n = n_loci;
    e.k = k;
    e.r_max = r_max;
    ArcList segs;
    e.add_window(segs, 1);
    std::vector<int> used{1};
    const unsigned __int128 d1 =
        static_cast<unsigned long>(n_loci) * static_cast<unsigned long>(k + 2);
    e.dfs(segs, used, d1, 1);
    return finish_result(std::move(e.per_r), e.remainder, e.leaves, n_loci);
}

Estimate mc_p_fat(int n_loci, int k, std::uint64_t n_samples,
                  std::uint64_t seed, int jobs) {
    ModelParams params{n_loci, k, DistributionKind::uniform01};
    validate(params);
    check_samples(n_samples);
    auto acc = mc_accumulate<MeanAccumulator>(
        n_samples, jobs,
        [&](std::uint64_t chunk, std::uint64_t count, MeanAccumulator& a) {
            StreamRng rng(seed, chunk);
            NeighborhoodSample sample;
            std::vector<double> scratch;
            for (std::uint64_t i = 0; i < count; ++i) {
                sample_neighborhood_into(sample, scratch, params, rng);
                a.add(check_direct(sample) ? 1.0 : 0.0);
            }
        });
    return Estimate{acc.mean(), acc.std_error(), n_samples, seed, "fat-mc"};
}

bool torus_member(const std::vector<double>& x, double y) {
    validate_torus_point(x);
    const int r = static_cast<int>(x.size());
    if (!(y >= 0.0 && y <= r - 1.0))
        throw std::invalid_argument("membership needs y in [0, r-1]");
    std::vector<double> buf;
    return member_impl(x, 1.0 / (r - y), buf);
}

double eta_weight(const std::vector<double>& x, double y) {
    validate_torus_point(x);
    if (!(y >= 0.0 && y <= 1.0))
        throw std::invalid_argument("eta weight needs y in [0,1]");
    const double beta = 1.0 / (static_cast<double>(x.size()) - y);
    std::vector<std::pair<double, double>> segs;
    return eta_impl(x, beta, segs);
}

Estimate f_r_mc(int r, double y, std::uint64_t n_samples, std::uint64_t seed,
                int jobs) {
    validate_fr_args(r, y);
    if (r == 3 && y == 1.0)
        throw std::invalid_argument(
            "f_3 diverges at y = 1; use the truncated integral");
    check_samples(n_samples);
    const double beta = 1.0 / (r - y);
    auto acc = mc_accumulate<MeanAccumulator>(
        n_samples, jobs,
        [&](std::uint64_t chunk, std::uint64_t count, MeanAccumulator& a) {
            StreamRng rng(seed, chunk);
            std::vector<double> x(static_cast<std::size_t>(r));
            std::vector<double> sort_buf;
            std::vector<std::pair<double, double>> segs;
            for (std::uint64_t i = 0; i < count; ++i) {
                for (auto& v : x) v = rng.next_uniform();
                a.add(member_impl(x, beta, sort_buf) ? eta_impl(x, beta, segs)
                                                     : 0.0);
            }
        });
    return Estimate{acc.mean(), acc.std_error(), n_samples, seed, "fr-mc"};
}

TruncatedIntegral f_r_truncated(int r, double y, double cap,
                                std::uint64_t n_samples, std::uint64_t seed,
                                int jobs) {
    validate_fr_args(r, y);
    if (!(cap > 0.0) || !std::isfinite(cap))
        throw std::invalid_argument("truncation cap must be positive and finite");
    check_samples(n_samples);
    const double beta = 1.0 / (r - y);
    auto acc = mc_accumulate<TwoMeans>(
        n_samples, jobs,
        [&](std::uint64_t chunk, std::uint64_t count, TwoMeans& a) {
            StreamRng rng(seed, chunk);
            std::vector<double> x(static_cast<std::size_t>(r));
            std::vector<double> sort_buf;
            std::vector<std::pair<double, double>> segs;
            for (std::uint64_t i = 0; i < count; ++i) {
                for (auto& v : x) v = rng.next_uniform();
                double e = 0.0;
                if (member_impl(x, beta, sort_buf)) e = eta_impl(x, beta, segs);
                a.main.add(std::min(e, cap));
                a.half.add(std::min(e, cap / 2));
            }
        });
    TruncatedIntegral out;
    out.estimate = Estimate{acc.main.mean(), acc.main.std_error(), n_samples,
                            seed, "fr-truncated"};
    out.cap = cap;
    out.sensitivity = std::abs(acc.main.mean() - acc.half.mean());
    return out;
}

Estimate torus_measure_mc(int r, double y, std::uint64_t n_samples,
                          std::uint64_t seed, int jobs) {
    if (r < 2) throw std::invalid_argument("torus dimension must be >= 2");
    if (!(y >= 0.0 && y <= r - 1.0))
        throw std::invalid_argument("measure needs y in [0, r-1]");
    check_samples(n_samples);
    const double beta = 1.0 / (r - y);
    auto acc = mc_accumulate<MeanAccumulator>(
        n_samples, jobs,
        [&](std::uint64_t chunk, std::uint64_t count, MeanAccumulator& a) {
            StreamRng rng(seed, chunk);
            std::vector<double> x(static_cast<std::size_t>(r));
            std::vector<double> sort_buf;
            for (std::uint64_t i = 0; i < count; ++i) {
                for (auto& v : x) v = rng.next_uniform();
                a.add(member_impl(x, beta, sort_buf) ? 1.0 : 0.0);
            }
        });
    return Estimate{acc.mean(), acc.std_error(), n_samples, seed,
                    "torus-measure"};
}

Table1Prediction table1_predict(int n_loci, int k, std::uint64_t n_samples,
                                std::uint64_t seed, int jobs) {
    validate_pair(n_loci, k);
    check_samples(n_samples);
    Table1Prediction out;
    if (k < 50)
        out.warnings.push_back(
            "k < 50: the large-k asymptotic prediction may be inaccurate");

    if (n_loci >= k + 2 && n_loci <= 2 * (k + 1)) {
        // two-window regime: exact two-window mass plus twice the
        // log-order three-window mass, the latter kept in its exact
        // pre-asymptotic shape so it stays finite across the whole row
        out.row = 1;
        out.j = 2 * (k + 1) - n_loci;
        const double kk = k;
        out.term_main = (1.0 / kk) * (1.0 / (kk + 3 - out.j) - 1.0 / kk);
        const double prefactor =
            (kk + 2.0) * ((n_loci - 1.0) + (kk + 1.0 - out.j) * (kk + 1.0));
        out.term_correction = 2.0 * std::log(kk) / prefactor;
        out.value = out.term_main + out.term_correction;
        return out;
    }

    const double q = static_cast<double>(n_loci) / (k + 1);
    if (n_loci > 2 * (k + 1) && static_cast<double>(n_loci) / k <= 8.0) {
        out.row = 2;
        out.r = static_cast<int>(std::ceil(q));
        out.y = out.r - q;
        out.f_r_estimate = f_r_mc(out.r, out.y, n_samples, seed, jobs);
        // the order-(r+1) correction integrates over the full-cover limit
        // set, where the weight is improperly integrable: cap it and track
        // the cap sensitivity
        constexpr double kEtaCap = 1000.0;
        out.f_next = f_r_truncated(out.r + 1, 1.0, kEtaCap, n_samples,
                                   seed ^ 0x517cc1b727220a95ULL, jobs);
        const double kk = k;
        out.term_main = out.f_r_estimate.p_hat / std::pow(kk, out.r);
        out.term_correction = out.f_next.estimate.p_hat / std::pow(kk, out.r + 1);
        out.value = out.term_main + out.term_correction;
        if (out.f_next.sensitivity >
            0.1 * std::max(out.f_next.estimate.p_hat, 1e-300))
            out.warnings.push_back(
                "order-(r+1) correction is sensitive to the weight cap");
        return out;
    }

    throw std::invalid_argument(
        "prediction covers k+2 <= n_loci with n_loci/k <= 8");
}

} // namespace nk
