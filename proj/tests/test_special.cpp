#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nk/distributions.hpp"
#include "nk/rng.hpp"
#include "nk/special.hpp"

using namespace nk;

namespace {

// Erlang CDF by the plain partial exponential sum: an independent route to
// gamma_p at integer shape.
double erlang_cdf_reference(int m, double s) {
    if (s <= 0.0) return 0.0;
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < m; ++i) {
        term *= s / i;
        sum += term;
    }
    return 1.0 - std::exp(-s) * sum;
}

// Dvoretzky–Kiefer–Wolfowitz sup-distance check of a CDF against n
// quantile-transformed samples; bound at confidence ~1 - 1e-6.
template <typename Cdf>
void check_dkw(DistributionKind dist, int m, std::uint64_t seed, Cdf&& cdf) {
    const int n = 100000;
    StreamRng rng(seed);
    std::vector<double> sums(n);
    for (auto& v : sums) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += quantile(dist, rng.next_uniform());
        v = s;
    }
    std::sort(sums.begin(), sums.end());
    const double bound = std::sqrt(std::log(2.0 / 1e-6) / (2.0 * n));
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = cdf(sums[i]);
        worst = std::max(worst, std::abs(f - static_cast<double>(i) / n));
        worst = std::max(worst, std::abs(f - static_cast<double>(i + 1) / n));
    }
    INFO("dist ", to_string(dist), " m ", m, " sup distance ", worst,
         " bound ", bound);
    CHECK(worst <= bound);
}

} // namespace

TEST_SUITE("special") {

TEST_CASE("log_gamma matches the library lgamma on positives") {
    for (double x : {0.01, 0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.3, 100.5, 500.0}) {
        INFO("x = ", x);
        CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
    }
}

TEST_CASE("log_gamma rejects non-positive arguments") {
    for (double x : {0.0, -0.5, -3.0}) {
        INFO("x = ", x);
        CHECK_THROWS(log_gamma(x));
    }
}

TEST_CASE("incomplete gamma halves sum to one and match Erlang sums") {
    for (double a : {0.5, 1.0, 3.0, 17.0, 80.0}) {
        for (double x : {0.01, 0.5, 1.0, 3.0, 17.0, 120.0}) {
            INFO("a = ", a, " x = ", x);
            CHECK(gamma_p(a, x) + gamma_q(a, x) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    for (int m : {1, 2, 5, 12}) {
        for (double s : {0.1, 1.0, 4.0, 15.0}) {
            INFO("m = ", m, " s = ", s);
            CHECK(gamma_p(m, s) ==
                  doctest::Approx(erlang_cdf_reference(m, s)).epsilon(1e-12));
        }
    }
    CHECK(gamma_p(1.0, 2.0) ==
          doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("normal cdf anchors and tail log") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-12));
    for (double x : {-3.0, -1.0, 0.3, 2.5}) {
        CHECK(norm_cdf(x) + norm_cdf(-x) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(log_norm_cdf(x) == doctest::Approx(std::log(norm_cdf(x))).epsilon(1e-13));
    }
    // deep left tail: compare against the leading Mills-ratio asymptotic
    for (double x : {-40.0, -120.0}) {
        const double lead =
            -0.5 * x * x - 0.5 * std::log(2.0 * M_PI) - std::log(-x);
        INFO("x = ", x);
        CHECK(log_norm_cdf(x) == doctest::Approx(lead).epsilon(1e-3));
        CHECK(log_norm_cdf(x) < log_norm_cdf(x + 1.0));
    }
}

TEST_CASE("norm_quantile round-trips the cdf") {
    for (double p :
         {1e-10, 1e-6, 0.02, 0.3, 0.5, 0.7, 0.97, 1.0 - 1e-6, 1.0 - 1e-10}) {
        INFO("p = ", p);
        CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    }
    for (double x = -8.0; x <= 5.0; x += 0.5) {
        INFO("x = ", x);
        CHECK(norm_quantile(norm_cdf(x)) == doctest::Approx(x).epsilon(1e-8));
    }
}

TEST_CASE("uniform-sum cdf: exact small cases") {
    // m = 1: F(s) = s on [0,1]
    CHECK(irwin_hall_cdf(1, 0.25) == doctest::Approx(0.25).epsilon(1e-14));
    // m = 2: F(s) = s^2/2 for s <= 1, symmetric about 1
    CHECK(irwin_hall_cdf(2, 0.5) == doctest::Approx(0.125).epsilon(1e-13));
    CHECK(irwin_hall_cdf(2, 1.0) == doctest::Approx(0.5).epsilon(1e-13));
    // symmetry about m/2 for a few m and offsets
    for (int m : {3, 7, 20}) {
        for (double d : {0.3, 1.1}) {
            INFO("m = ", m, " d = ", d);
            CHECK(irwin_hall_cdf(m, m / 2.0 - d) +
                      irwin_hall_cdf(m, m / 2.0 + d) ==
                  doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    // support edges
    CHECK(irwin_hall_cdf(5, -0.1) == 0.0);
    CHECK(irwin_hall_cdf(5, 5.1) == 1.0);
}

TEST_CASE("uniform-sum cdf: closed form and grid agree in the overlap") {
    for (int m : {24, 25, 26, 30}) {
        for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double s = m * frac;
            INFO("m = ", m, " s = ", s);
            CHECK(irwin_hall_cdf_grid(m, s) ==
                  doctest::Approx(irwin_hall_cdf_closed(m, s)).epsilon(2e-4));
            CHECK(std::abs(irwin_hall_cdf_grid(m, s) -
                           irwin_hall_cdf_closed(m, s)) <= 2e-5);
        }
    }
}

TEST_CASE("log uniform-sum cdf: exact lower-wedge branch") {
    // F(s) = s^m / m! for s <= 1: check far below where the plain CDF
    // underflows
    const int m = 40;
    const double s = 0.01;
    const double expected = m * std::log(s) - std::lgamma(m + 1.0);
    CHECK(log_irwin_hall_cdf(m, s) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(irwin_hall_cdf(m, s) == doctest::Approx(std::exp(expected)));
    // consistency with the plain CDF where both are representable
    for (int mm : {3, 12, 30}) {
        for (double frac : {0.3, 0.5, 0.8}) {
            const double ss = mm * frac;
            INFO("m = ", mm, " s = ", ss);
            CHECK(log_irwin_hall_cdf(mm, ss) ==
                  doctest::Approx(std::log(irwin_hall_cdf(mm, ss)))
                      .epsilon(1e-8));
        }
    }
}

TEST_CASE("cdf_sum anchors") {
    CHECK(cdf_sum(DistributionKind::cauchy, 5, 0.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(cdf_sum(DistributionKind::normal, 4, 2.0) ==
          doctest::Approx(norm_cdf(1.0)).epsilon(1e-14));
    CHECK(cdf_sum(DistributionKind::uniform01, 2, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-13));
    CHECK_THROWS(cdf_sum(DistributionKind::normal, 0, 0.0));
}

TEST_CASE("cdf_sum is monotone with limits 0 and 1") {
    for (auto dist :
         {DistributionKind::normal, DistributionKind::uniform01,
          DistributionKind::exponential, DistributionKind::negexponential,
          DistributionKind::cauchy}) {
        for (int m : {1, 2, 5, 26}) {
            INFO("dist ", to_string(dist), " m ", m);
            double prev = -1.0;
            for (double s = -3.0 * m; s <= 3.0 * m; s += 0.25) {
                const double f = cdf_sum(dist, m, s);
                CHECK(f >= prev - 1e-12);
                CHECK(f >= 0.0);
                CHECK(f <= 1.0);
                prev = f;
            }
            CHECK(cdf_sum(dist, m, -1e8) <= 1e-4);
            CHECK(cdf_sum(dist, m, 1e8) >= 1.0 - 1e-4);
        }
    }
}

TEST_CASE("cdf_sum matches empirical sums (DKW, all five distributions)") {
    std::uint64_t seed = 2024;
    for (auto dist :
         {DistributionKind::normal, DistributionKind::uniform01,
          DistributionKind::exponential, DistributionKind::negexponential,
          DistributionKind::cauchy}) {
        for (int m : {1, 5}) {
            check_dkw(dist, m, seed++,
                      [&](double s) { return cdf_sum(dist, m, s); });
        }
    }
    // grid path of the uniform sum
    check_dkw(DistributionKind::uniform01, 30, seed++, [&](double s) {
        return cdf_sum(DistributionKind::uniform01, 30, s);
    });
}

TEST_CASE("log_cdf_sum agrees with cdf_sum and survives deep tails") {
    for (auto dist :
         {DistributionKind::normal, DistributionKind::uniform01,
          DistributionKind::exponential, DistributionKind::negexponential,
          DistributionKind::cauchy}) {
        for (int m : {1, 4}) {
            for (double s : {-2.0, -0.3, 0.4, 2.5}) {
                const double f = cdf_sum(dist, m, s);
                if (f <= 0.0) continue;
                INFO("dist ", to_string(dist), " m ", m, " s ", s);
                CHECK(log_cdf_sum(dist, m, s) ==
                      doctest::Approx(std::log(f)).epsilon(1e-9));
            }
        }
    }
    // normal branch far below the underflow point of the plain CDF
    const double deep = log_cdf_sum(DistributionKind::normal, 17, -500.0);
    const double z = -500.0 / std::sqrt(17.0);
    CHECK(deep == doctest::Approx(log_norm_cdf(z)).epsilon(1e-12));
    CHECK(std::isfinite(deep));
    // exponential lower wedge: F(s) = s^m e^{-s} type leading behavior
    const double le = log_cdf_sum(DistributionKind::exponential, 5, 1e-3);
    const double expect =
        5 * std::log(1e-3) - 1e-3 - std::lgamma(6.0); // leading term
    CHECK(le == doctest::Approx(expect).epsilon(1e-2));
}

TEST_CASE("quantile transforms are strictly increasing and in-support") {
    for (auto dist :
         {DistributionKind::normal, DistributionKind::uniform01,
          DistributionKind::exponential, DistributionKind::negexponential,
          DistributionKind::cauchy}) {
        double prev = -std::numeric_limits<double>::infinity();
        for (double u = 0.02; u < 1.0; u += 0.02) {
            const double x = quantile(dist, u);
            INFO("dist ", to_string(dist), " u ", u);
            CHECK(x > prev);
            prev = x;
        }
        CHECK_THROWS(quantile(dist, 0.0));
        CHECK_THROWS(quantile(dist, 1.0));
    }
    // support conventions
    CHECK(quantile(DistributionKind::exponential, 0.5) > 0.0);
    CHECK(quantile(DistributionKind::negexponential, 0.5) < 0.0);
    CHECK(quantile(DistributionKind::uniform01, 0.25) ==
          doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("distribution names round-trip") {
    for (auto dist :
         {DistributionKind::normal, DistributionKind::uniform01,
          DistributionKind::exponential, DistributionKind::negexponential,
          DistributionKind::cauchy}) {
        CHECK(parse_distribution(to_string(dist)) == dist);
    }
    CHECK_THROWS(parse_distribution("triangular"));
}

} // TEST_SUITE
