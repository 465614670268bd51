#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "nk/errors.hpp"
#include "nk/fattail.hpp"
#include "nk/k1exact.hpp"
#include "nk/model.hpp"

using namespace nk;

namespace {

// ---- test-local reference enumerator --------------------------------------
// Sums the exact pick-sequence masses over ALL ordered sequences of
// distinct window starts, with no symmetry shortcut whatsoever.  This is
// the blunt instrument the production enumerator must reproduce.

struct RawEnumeration {
    std::map<int, Rational> per_r;
    std::uint64_t leaves = 0;

    Rational total() const {
        Rational t = 0;
        for (const auto& [r, mass] : per_r) t += mass;
        return t;
    }
    Rational tail_beyond(int r_max) const {
        Rational t = 0;
        for (const auto& [r, mass] : per_r)
            if (r > r_max) t += mass;
        return t;
    }
};

RawEnumeration raw_enumerate(int n, int k) {
    std::vector<std::uint32_t> window(n + 1, 0);
    for (int j = 1; j <= n; ++j)
        for (int t = 0; t < k + 1; ++t)
            window[j] |= std::uint32_t{1} << ((j - 1 + t) % n);
    const std::uint32_t all = (n == 32) ? ~std::uint32_t{0}
                                        : ((std::uint32_t{1} << n) - 1);
    RawEnumeration out;
    auto dfs = [&](auto&& self, std::uint32_t used, std::uint32_t covered,
                   int depth, const Rational& mass) -> void {
        if (covered == all) {
            out.per_r[depth] += mass;
            ++out.leaves;
            return;
        }
        const int missed = n - __builtin_popcount(covered);
        const Rational step =
            mass / Rational((n - depth) + (k + 1) * missed);
        for (int j = 1; j <= n; ++j) {
            const auto bit = std::uint32_t{1} << (j - 1);
            if (used & bit) continue;
            self(self, used | bit, covered | window[j], depth + 1, step);
        }
    };
    dfs(dfs, 0, 0, 0, Rational(1));
    return out;
}

// Circular coverage probability for r arcs of length beta dropped
// uniformly on the unit circle (inclusion-exclusion over uncovered gaps):
//   sum_k (-1)^k C(r,k) (1 - k beta)_+^{r-1}.
double torus_cover_measure_reference(int r, double y) {
    const double beta = 1.0 / (r - y);
    double sum = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= r; ++k) {
        const double base = 1.0 - k * beta;
        if (base > 0.0)
            sum += (k % 2 ? -1.0 : 1.0) * binom * std::pow(base, r - 1);
        binom = binom * (r - k) / (k + 1);
    }
    return sum;
}

CoverSequence seq(int n, int k, std::vector<int> indices) {
    return CoverSequence{n, k, std::move(indices)};
}

} // namespace

TEST_SUITE("fattail") {

TEST_CASE("h_prime_event compares window maxima, with wraparound") {
    NeighborhoodSample s;
    s.n_loci = 4;
    s.k = 1;
    s.y = {0.1, 0.9, 0.15, 0.8};
    s.y_mut.assign(8, 0.01);
    s.y_mut[2] = 0.85; // j=2 mutants: {0.85, 0.01}
    s.y_mut[3] = 0.01;
    CHECK(h_prime_event(s, 2)); // max(0.1, 0.9) >= 0.85
    s.y_mut[2] = 0.95;
    CHECK_FALSE(h_prime_event(s, 2));

    // j=1 window bases are {Y_4, Y_1}: the wrap matters
    s.y_mut.assign(8, 0.01);
    s.y_mut[0] = 0.5;
    CHECK(h_prime_event(s, 1)); // max(0.8, 0.1) >= 0.5
    s.y = {0.1, 0.9, 0.15, 0.4};
    CHECK_FALSE(h_prime_event(s, 1)); // max(0.4, 0.1) < 0.5

    // ties go to the base, mirroring the >= in the sum event
    s.y = {0.5, 0.9, 0.15, 0.3};
    s.y_mut[0] = 0.5;
    CHECK(h_prime_event(s, 1));
}

TEST_CASE("check_direct is the conjunction over loci") {
    NeighborhoodSample s;
    s.n_loci = 3;
    s.k = 1;
    s.y = {0.9, 0.8, 0.7};
    s.y_mut = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    CHECK(check_direct(s)); // every base beats every mutant
    s.y_mut[4] = 0.95;      // j=3 group now tops its window
    CHECK_FALSE(check_direct(s));
    for (int j = 1; j <= 3; ++j)
        if (j != 3) CHECK(h_prime_event(s, j));
    CHECK_FALSE(h_prime_event(s, 3));
}

TEST_CASE("the order-statistics event depends only on ranks") {
    const ModelParams params{7, 2, DistributionKind::normal};
    for (std::uint64_t stream = 0; stream < 300; ++stream) {
        auto s = sample_neighborhood(params, 13, stream);
        const bool before = check_direct(s);
        const auto out_before = run_cover_algorithm(s);
        for (double& v : s.y) v = std::exp(v);
        for (double& v : s.y_mut) v = std::exp(v);
        INFO("stream ", stream);
        CHECK(check_direct(s) == before);
        const auto out_after = run_cover_algorithm(s);
        CHECK(out_after.verdict == out_before.verdict);
        CHECK(out_after.sequence.indices == out_before.sequence.indices);
    }
}

TEST_CASE("greedy cover verdict equals the direct check pointwise") {
    for (auto [n, k] : {std::pair{6, 2}, {8, 1}, {5, 4}}) {
        const ModelParams params{n, k, DistributionKind::uniform01};
        std::vector<std::uint32_t> window(n + 1, 0);
        for (int j = 1; j <= n; ++j)
            for (int t = 0; t < k + 1; ++t)
                window[j] |= std::uint32_t{1} << ((j - 1 + t) % n);
        const std::uint32_t all = (std::uint32_t{1} << n) - 1;
        int trues = 0;
        for (std::uint64_t stream = 0; stream < 20000; ++stream) {
            const auto s = sample_neighborhood(params, 14, stream);
            const auto out = run_cover_algorithm(s);
            INFO("n ", n, " k ", k, " stream ", stream);
            REQUIRE(out.verdict == check_direct(s));
            // recorded picks are distinct, in range
            std::uint32_t used = 0, covered = 0;
            for (std::size_t idx = 0; idx < out.sequence.indices.size();
                 ++idx) {
                const int j = out.sequence.indices[idx];
                REQUIRE(j >= 1);
                REQUIRE(j <= n);
                const auto bit = std::uint32_t{1} << (j - 1);
                REQUIRE((used & bit) == 0);
                used |= bit;
                if (idx + 1 < out.sequence.indices.size()) {
                    // the procedure stops the moment the cycle is covered,
                    // so every proper prefix must leave a hole
                    REQUIRE((covered | window[j]) != all);
                }
                covered |= window[j];
            }
            if (out.verdict) {
                ++trues;
                REQUIRE(covered == all); // a TRUE run records a full cover
            } else {
                REQUIRE(covered != all);
            }
        }
        CHECK(trues > 0);
    }
}

TEST_CASE("missed_count on hand prefixes, with range guards") {
    const auto prefix = seq(4, 1, {1, 3});
    CHECK(missed_count(prefix, 1) == 4);
    CHECK(missed_count(prefix, 2) == 2); // window 1 covered loci {1,2}
    CHECK(missed_count(prefix, 3) == 0);
    CHECK_THROWS(missed_count(prefix, 0));
    CHECK_THROWS(missed_count(prefix, 4));
    // overlapping windows: (5,2) prefix (1,2) covers {1,2,3} then {1..4}
    const auto overlap = seq(5, 2, {1, 2});
    CHECK(missed_count(overlap, 2) == 2);
    CHECK(missed_count(overlap, 3) == 1);
    CHECK_THROWS(sequence_probability(seq(4, 1, {1, 1})));
    CHECK_THROWS(sequence_probability(seq(4, 1, {0})));
    CHECK_THROWS(sequence_probability(seq(4, 1, {5})));
}

TEST_CASE("missed counts respect the coverage bounds") {
    // n >= M(s) >= n - (s-1)(k+1), and M never increases along a prefix
    const int n = 11, k = 3;
    StreamRng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> pool(n);
        for (int i = 0; i < n; ++i) pool[i] = i + 1;
        const int len = 1 + static_cast<int>(rng.next_u64() % 3);
        std::vector<int> indices;
        for (int s = 0; s < len; ++s) {
            const auto pick = rng.next_u64() % pool.size();
            indices.push_back(pool[pick]);
            pool.erase(pool.begin() + static_cast<long>(pick));
        }
        const auto prefix = seq(n, k, indices);
        int prev = n;
        for (int s = 1; s <= len + 1; ++s) {
            const int m = missed_count(prefix, s);
            INFO("trial ", trial, " s ", s);
            CHECK(m <= n);
            CHECK(m >= std::max(0, n - (s - 1) * (k + 1)));
            CHECK(m <= prev);
            prev = m;
        }
    }
}

TEST_CASE("sequence_probability: worked example at (4,1)") {
    CHECK(sequence_probability(seq(4, 1, {1, 3})) == Rational(1, 84));
    CHECK(sequence_probability(seq(4, 1, {1, 2})) == Rational(1, 84));
    CHECK(sequence_probability(seq(4, 1, {1})) == Rational(1, 12));
    CHECK(sequence_probability(seq(4, 1, {})) == Rational(1));
}

TEST_CASE("the greedy procedure emits sequences at their computed mass") {
    // P(picks are exactly 1 then 3 at (4,1)) = 1/84; windows {1,2},{3,4}
    // cover, so those runs end TRUE with the recorded pair
    const ModelParams params{4, 1, DistributionKind::uniform01};
    const int n = 1000000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        const auto out =
            run_cover_algorithm(sample_neighborhood(params, 2718, i));
        if (out.verdict && out.sequence.indices == std::vector<int>{1, 3})
            ++hits;
    }
    const double p = 1.0 / 84.0;
    const double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(static_cast<double>(hits) / n - p) <= 4 * sigma);
}

TEST_CASE("full enumeration equals the no-shortcut reference") {
    for (auto [n, k] :
         {std::pair{4, 1}, {5, 1}, {6, 1}, {7, 1}, {4, 2}, {5, 2}, {7, 2},
          {4, 3}, {6, 3}, {7, 3}}) {
        const auto raw = raw_enumerate(n, k);
        const auto lib = enumerate_exact(n, k);
        INFO("n ", n, " k ", k);
        REQUIRE(lib.full);
        CHECK(lib.remainder_bound == 0.0);
        CHECK(lib.total == raw.total());
        CHECK(lib.sequences == raw.leaves);
        REQUIRE(lib.per_r.size() == raw.per_r.size());
        for (const auto& [r, mass] : raw.per_r) {
            INFO("r ", r);
            REQUIRE(lib.per_r.count(r) == 1);
            CHECK(lib.per_r.at(r) == mass);
        }
    }
}

TEST_CASE("restricted enumeration matches the reference prefix and bounds "
          "the tail") {
    for (auto [n, k] : {std::pair{7, 2}, {8, 1}, {9, 2}}) {
        const auto raw = raw_enumerate(n, k);
        for (int r_max = 2; r_max <= 4; ++r_max) {
            const auto lib = enumerate_exact(n, k, r_max);
            INFO("n ", n, " k ", k, " r_max ", r_max);
            Rational expect_total = 0;
            for (const auto& [r, mass] : raw.per_r) {
                if (r > r_max) continue;
                REQUIRE(lib.per_r.count(r) == 1);
                CHECK(lib.per_r.at(r) == mass);
                expect_total += mass;
            }
            CHECK(lib.total == expect_total);
            const double tail = to_double(raw.tail_beyond(r_max));
            CHECK(lib.remainder_bound >= tail);
            CHECK(lib.full == (tail == 0.0));
            for (const auto& [r, mass] : lib.per_r) CHECK(r <= r_max);
        }
    }
}

TEST_CASE("exact fat-tail anchors") {
    CHECK(enumerate_exact(2, 1).total == Rational(1, 3));
    CHECK(enumerate_exact(3, 1).total == Rational(1, 6));
    CHECK(enumerate_exact(4, 1).total == Rational(2, 21));
    CHECK(enumerate_exact(4, 3).total == Rational(1, 5));
    CHECK(enumerate_exact(6, 5).total == Rational(1, 7));
    // two-window covers only at (4,1,r_max=2)
    const auto restricted = enumerate_exact(4, 1, 2);
    CHECK(restricted.total == Rational(1, 21));
    CHECK(restricted.per_r.at(2) == Rational(1, 21));
    // the full (4,1) run splits 2/21 evenly across r = 2 and r = 3
    const auto full = enumerate_exact(4, 1);
    CHECK(full.per_r.at(2) == Rational(1, 21));
    CHECK(full.per_r.at(3) == Rational(1, 21));
    CHECK(full.sequences == 20);
}

TEST_CASE("two-window mass closed form near the window-size boundary") {
    // for n = 2(k+1) - j with 0 <= j <= k, the mass of two-window covers
    // is exactly (j+1) / ((k+2) (n-1 + (k+1)(n-k-1)))
    const int k = 10;
    for (int j : {0, 3, 5, 10}) {
        const int n = 2 * (k + 1) - j;
        const auto lib = enumerate_exact(n, k, 2);
        const Rational expect =
            Rational(j + 1) /
            (Rational(k + 2) * Rational(n - 1 + (k + 1) * (n - k - 1)));
        INFO("j ", j, " n ", n);
        CHECK(lib.per_r.at(2) == expect);
        CHECK(lib.total == expect); // no shorter cover exists here
    }
}

TEST_CASE("enumeration argument guards") {
    CHECK_THROWS_AS(enumerate_exact(4, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_exact(4, 1, -2), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_exact(13, 2), infeasible_error);
    CHECK_THROWS_AS(enumerate_exact(13, 2, 5), infeasible_error);
    CHECK_THROWS_AS(enumerate_exact(3000, 2, 3), infeasible_error);
    CHECK_THROWS_AS(enumerate_exact(4, 0, 2), std::invalid_argument);
}

TEST_CASE("conditional completion probabilities tie out exactly") {
    // unconditional start: Q(empty) is p_fat itself
    CHECK(q_exact(seq(4, 1, {})) == Rational(2, 21));
    CHECK(q_exact(seq(4, 1, {1})) == Rational(2, 7));
    CHECK(q_exact(seq(5, 2, {})) == enumerate_exact(5, 2).total);
    // first-pick decomposition: Q(empty) = sum_j Q({j}) / (n(k+2))
    for (auto [n, k] : {std::pair{5, 2}, {6, 1}, {7, 3}}) {
        Rational sum = 0;
        for (int j = 1; j <= n; ++j)
            sum += q_exact(seq(n, k, {j}));
        INFO("n ", n, " k ", k);
        CHECK(sum / (Rational(n) * Rational(k + 2)) ==
              q_exact(seq(n, k, {})));
    }
    // a prefix that already covers completes with certainty
    CHECK(q_exact(seq(4, 1, {1, 3})) == Rational(1));
    CHECK_THROWS_AS(q_exact(seq(13, 2, {})), infeasible_error);
}

TEST_CASE("conditional completion obeys the coupon-style bound") {
    // Q(prefix) <= 1/M(len+1) + 1/k whenever the prefix leaves a hole
    for (auto [n, k] : {std::pair{8, 2}, {10, 3}}) {
        StreamRng rng(909);
        for (int trial = 0; trial < 120; ++trial) {
            std::vector<int> pool(n);
            for (int i = 0; i < n; ++i) pool[i] = i + 1;
            const int len = static_cast<int>(rng.next_u64() % 3);
            std::vector<int> indices;
            for (int s = 0; s < len; ++s) {
                const auto pick = rng.next_u64() % pool.size();
                indices.push_back(pool[pick]);
                pool.erase(pool.begin() + static_cast<long>(pick));
            }
            const auto prefix = seq(n, k, indices);
            const int m = missed_count(prefix, len + 1);
            if (m == 0) continue;
            const Rational bound = Rational(1, m) + Rational(1, k);
            INFO("n ", n, " k ", k, " trial ", trial);
            CHECK(q_exact(prefix) <= bound);
        }
    }
}

TEST_CASE("monte carlo fat-tail estimate agrees with enumeration") {
    const auto exact = enumerate_exact(5, 2);
    const auto est = mc_p_fat(5, 2, 200000, 1234);
    CHECK(est.method == "fat-mc");
    CHECK(std::abs(est.p_hat - to_double(exact.total)) <= 4 * est.std_error);
    // determinism and jobs-independence
    const auto a = mc_p_fat(6, 2, 150000, 55, 1);
    const auto b = mc_p_fat(6, 2, 150000, 55, 4);
    CHECK(a.p_hat == b.p_hat);
    CHECK(a.std_error == b.std_error);
    CHECK_THROWS(mc_p_fat(6, 2, 0, 1));
}

TEST_CASE("fat-tail probability is sandwiched by the chain probability") {
    // p_{n-1}/2 <= p_fat(n,1) <= p_{n-1}, where p_m is the k=1 chain
    // sequence: the cycle event drops one chain constraint (upper), and
    // Harris plus the 50% top-rank event restores half of it (lower)
    const auto chain = recursion_exact(6);
    for (int n = 2; n <= 6; ++n) {
        const auto fat = enumerate_exact(n, 1).total;
        INFO("n ", n);
        CHECK(fat <= chain[n - 1]);
        CHECK(fat >= chain[n - 1] / 2);
    }
}

TEST_CASE("a window's top-rank event has probability exactly 1/2 at k=1") {
    // four exchangeable values, two of them bases: counting all 4! rank
    // orders, the overall max lands on a base in exactly half
    std::vector<int> ranks = {1, 2, 3, 4};
    std::sort(ranks.begin(), ranks.end());
    int trues = 0, total = 0;
    do {
        NeighborhoodSample s;
        s.n_loci = 2;
        s.k = 1;
        s.y = {0.1 * ranks[0], 0.1 * ranks[1]};
        s.y_mut = {0.1 * ranks[2], 0.1 * ranks[3], 0.001, 0.002};
        trues += h_prime_event(s, 1);
        ++total;
    } while (std::next_permutation(ranks.begin(), ranks.end()));
    CHECK(total == 24);
    CHECK(trues == 12);
}

TEST_CASE("torus membership: gap criterion with wraparound") {
    CHECK(torus_member({0.0, 0.5}, 0.0));        // gaps exactly 1/2
    CHECK_FALSE(torus_member({0.0, 0.4}, 0.0));  // gap 0.6 > 1/2
    CHECK(torus_member({0.67, 0.0, 0.34}, 0.1)); // unsorted input is fine
    // quarter-spaced points sit exactly on the gap bound beta = 1/4
    CHECK(torus_member({0.0, 0.25, 0.5, 0.75}, 0.0));
    CHECK_FALSE(torus_member({0.0, 0.3, 0.4}, 0.0)); // gap 0.6
    CHECK_THROWS(torus_member({0.5}, 0.0));
    CHECK_THROWS(torus_member({0.0, 0.5}, 1.5));
    CHECK_THROWS(torus_member({0.0, 1.5}, 0.0));
    CHECK_THROWS(torus_member({0.0, 0.5, 0.5, 0.5}, -0.1));
}

TEST_CASE("eta weight: evenly spaced points give r^r / r!") {
    CHECK(eta_weight({0.0, 1.0 / 3, 2.0 / 3}, 0.0) ==
          doctest::Approx(4.5).epsilon(1e-12));
    CHECK_THROWS(eta_weight({0.0, 0.5}, 1.5));
}

TEST_CASE("eta weight is order-dependent from r = 4 on") {
    // same point set, different visit order: the third uncovered measure
    // differs (0.7 vs 0.5), so the products differ
    const double a = eta_weight({0.0, 0.05, 0.5, 0.55}, 0.0);
    const double b = eta_weight({0.0, 0.5, 0.05, 0.55}, 0.0);
    CHECK(a == doctest::Approx(1.0 / (0.75 * 0.70 * 0.45)).epsilon(1e-12));
    CHECK(b == doctest::Approx(1.0 / (0.75 * 0.50 * 0.45)).epsilon(1e-12));
    CHECK(a != b);
    // r = 3 is the last order-independent case: the second factor is
    // always 1 - beta, the third is set-determined
    const double c = eta_weight({0.1, 0.3, 0.8}, 0.5);
    const double d = eta_weight({0.3, 0.1, 0.8}, 0.5);
    CHECK(c == doctest::Approx(d).epsilon(1e-13));
}

TEST_CASE("torus measure matches the coverage closed form") {
    for (auto [r, y] : {std::pair{3, 0.1}, {4, 0.7}}) {
        const double ref = torus_cover_measure_reference(r, y);
        const auto est = torus_measure_mc(r, y, 400000, 321);
        INFO("r ", r, " y ", y, " ref ", ref, " est ", est.p_hat);
        CHECK(est.method == "torus-measure");
        CHECK(std::abs(est.p_hat - ref) <= 4 * est.std_error + 1e-12);
    }
    CHECK_THROWS(torus_measure_mc(1, 0.0, 1000, 1));
}

TEST_CASE("f_r vanishes identically at y = 0") {
    for (int r : {3, 4, 5}) {
        const auto est = f_r_mc(r, 0.0, 10000, 99);
        INFO("r ", r);
        CHECK(est.p_hat == 0.0);
        CHECK(est.std_error == 0.0);
    }
}

TEST_CASE("f_4 grows along y") {
    const auto lo = f_r_mc(4, 0.3, 300000, 4242);
    const auto mid = f_r_mc(4, 0.6, 300000, 4243);
    const auto hi = f_r_mc(4, 0.9, 300000, 4244);
    CHECK(mid.p_hat - lo.p_hat >= -4 * (mid.std_error + lo.std_error));
    CHECK(hi.p_hat - mid.p_hat >= -4 * (hi.std_error + mid.std_error));
    CHECK(lo.p_hat > 0.0);
}

TEST_CASE("f_3 blows up logarithmically toward y = 1") {
    const double t = 0.01;
    const auto est = f_r_mc(3, 1.0 - t, 2000000, 777);
    const double ratio = est.p_hat / (2.0 * std::log(1.0 / t));
    INFO("estimate ", est.p_hat, " ratio ", ratio);
    CHECK(ratio > 0.6);
    CHECK(ratio < 1.4);
    CHECK_THROWS(f_r_mc(3, 1.0, 1000, 1));
    CHECK_THROWS(f_r_mc(2, 0.5, 1000, 1));
    CHECK_THROWS(f_r_mc(4, 1.5, 1000, 1));
}

TEST_CASE("truncated integral: huge caps reproduce the plain estimate") {
    const auto plain = f_r_mc(4, 0.5, 200000, 31415);
    const auto capped = f_r_truncated(4, 0.5, 1e18, 200000, 31415);
    CHECK(capped.estimate.p_hat == plain.p_hat);
    CHECK(capped.estimate.std_error == plain.std_error);
    CHECK(capped.estimate.method == "fr-truncated");
    CHECK(capped.sensitivity == 0.0);
    CHECK(capped.cap == 1e18);
}

TEST_CASE("truncated integral handles the divergent-variance edge") {
    // y = 1 is exactly the case the cap exists for
    const auto t4 = f_r_truncated(4, 1.0, 1000.0, 200000, 2020);
    CHECK(t4.estimate.p_hat > 0.0);
    CHECK(std::isfinite(t4.estimate.p_hat));
    CHECK(t4.sensitivity >= 0.0);
    const auto t3 = f_r_truncated(3, 1.0, 1000.0, 100000, 2021);
    CHECK(std::isfinite(t3.estimate.p_hat));
    CHECK_THROWS(f_r_truncated(4, 0.5, 0.0, 1000, 1));
    CHECK_THROWS(f_r_truncated(4, 0.5,
                               std::numeric_limits<double>::infinity(), 1000,
                               1));
}

TEST_CASE("asymptotic prediction: boundary regime fields and formula") {
    // n between k+2 and 2(k+1): offset j = 2(k+1) - n
    const auto p = table1_predict(7, 3, 1000, 1);
    CHECK(p.row == 1);
    CHECK(p.j == 1);
    const double main = (1.0 / 3) * (1.0 / (3 + 3 - 1) - 1.0 / 3);
    const double corr =
        2.0 * std::log(3.0) / ((3 + 2) * (7 - 1 + (4 - 1) * 4));
    CHECK(p.term_main == doctest::Approx(main).epsilon(1e-12));
    CHECK(p.term_correction == doctest::Approx(corr).epsilon(1e-12));
    CHECK(p.value == doctest::Approx(main + corr).epsilon(1e-12));
    CHECK_FALSE(p.warnings.empty()); // k = 3 is far below asymptopia
}

TEST_CASE("asymptotic prediction: the log correction is subordinate") {
    // j = k/2: the rational term dwarfs the log term
    const auto mid = table1_predict(752, 500, 1000, 1);
    CHECK(mid.row == 1);
    CHECK(mid.j == 250);
    CHECK(mid.term_main > 10.0 * mid.term_correction);
    CHECK(mid.warnings.empty());
    // j = 0 flips the sign of the rational term; the log term keeps the
    // prediction positive
    const auto edge = table1_predict(1002, 500, 1000, 1);
    CHECK(edge.row == 1);
    CHECK(edge.j == 0);
    CHECK(edge.term_main < 0.0);
    CHECK(edge.value > 0.0);
}

TEST_CASE("asymptotic prediction: interior regime composes the torus "
          "integrals") {
    const auto p = table1_predict(503, 200, 20000, 606);
    CHECK(p.row == 2);
    CHECK(p.r == 3);
    CHECK(p.y == doctest::Approx(3.0 - 503.0 / 201.0).epsilon(1e-12));
    const double kk = 200.0;
    CHECK(p.term_main ==
          doctest::Approx(p.f_r_estimate.p_hat / std::pow(kk, 3))
              .epsilon(1e-12));
    CHECK(p.term_correction ==
          doctest::Approx(p.f_next.estimate.p_hat / std::pow(kk, 4))
              .epsilon(1e-12));
    CHECK(p.value == doctest::Approx(p.term_main + p.term_correction)
                         .epsilon(1e-12));
    CHECK(p.value > 0.0);

    // integer n/(k+1) sits on the regime boundary with y = 0
    const auto q = table1_predict(12, 3, 5000, 607);
    CHECK(q.row == 2);
    CHECK(q.r == 3);
    CHECK(q.y == doctest::Approx(0.0));
    CHECK(q.term_main == 0.0);
    CHECK_FALSE(q.warnings.empty()); // k = 3 warning again
}

TEST_CASE("asymptotic prediction rejects out-of-range shapes") {
    CHECK_THROWS_AS(table1_predict(85, 10, 1000, 1), std::invalid_argument);
    CHECK_THROWS_AS(table1_predict(12, 11, 1000, 1), std::invalid_argument);
    CHECK_THROWS_AS(table1_predict(11, 10, 1000, 1), std::invalid_argument);
    CHECK_NOTHROW(table1_predict(79, 10, 2000, 1));
}

} // TEST_SUITE
