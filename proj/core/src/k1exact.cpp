#include "nk/k1exact.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nk/errors.hpp"
#include "nk/parallel.hpp"
#include "nk/rng.hpp"

namespace nk {
namespace {

void check_samples(std::uint64_t n_samples) {
    if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");
}

// ---- quad-precision Bessel core -------------------------------------------
//
// The K branch is a difference of two nearly equal I values (off by
// ~1e-8 relative at x = 10), so the series runs in __float128 and only the
// final result is rounded to double.

using f128 = __float128;

// Gamma(nu + 1) seeds for every order the series needs, to 36 digits.
struct OrderSeed {
    long num;
    long den;
    const char* gamma_nu_plus_1;
};

constexpr OrderSeed kOrderSeeds[] = {
    {1, 3, "0.892979511569249211218564313658225881"},  // Gamma(4/3)
    {-1, 3, "1.35411793942640041694528802815451379"},  // Gamma(2/3)
    {2, 3, "0.902745292950933611296858685436342524"},  // Gamma(5/3)
    {-2, 3, "2.67893853470774763365569294097467764"},  // Gamma(1/3)
    {1, 2, "0.886226925452758013649083741670572591"},  // Gamma(3/2)
    {-1, 2, "1.77245385090551602729816748334114518"},  // Gamma(1/2)
};

const OrderSeed* find_seed(long num, long den) {
    for (const auto& s : kOrderSeeds)
        if (s.num == num && s.den == den) return &s;
    return nullptr;
}

// I_nu(x) = sum_m (x/2)^(2m+nu) / (m! Gamma(m+nu+1)) by forward recursion
// on the term ratio; all terms positive, no cancellation.
f128 bessel_i_series(f128 nu, f128 gamma_seed, f128 x) {
    const f128 half = x / 2;
    f128 term = powq(half, nu) / gamma_seed;
    f128 sum = term;
    const f128 half_sq = half * half;
    for (int m = 1; m <= 500; ++m) {
        term *= half_sq / (static_cast<f128>(m) * (static_cast<f128>(m) + nu));
        sum += term;
        if (term < sum * 1e-36Q) return sum;
    }
    throw numeric_error("Bessel series failed to converge");
}

f128 order_value(const OrderSeed& s) {
    return static_cast<f128>(s.num) / static_cast<f128>(s.den);
}

f128 gamma_seed_value(const OrderSeed& s) {
    return strtoflt128(s.gamma_nu_plus_1, nullptr);
}

} // namespace

double bessel_modified(BesselKind kind, const Rational& nu, double x) {
    if (!(x > 0.0 && x <= 10.0))
        throw std::invalid_argument("bessel_modified needs x in (0, 10]");
    Rational order = nu;
    order.canonicalize();
    const mpz_class& num_z = order.get_num();
    const mpz_class& den_z = order.get_den();
    if (!num_z.fits_slong_p() || !den_z.fits_slong_p())
        throw std::invalid_argument("unsupported Bessel order");
    const long num = num_z.get_si();
    const long den = den_z.get_si();
    // supported orders: +-1/3, +-2/3, 1/2 (and -1/2 internally for K_{1/2})
    const bool allowed =
        (den == 3 && (num == 1 || num == -1 || num == 2 || num == -2)) ||
        (den == 2 && num == 1);
    if (!allowed)
        throw std::invalid_argument(
            "bessel_modified supports orders +-1/3, +-2/3 and 1/2");

    const OrderSeed* seed = find_seed(num, den);
    const f128 xq = static_cast<f128>(x);
    if (kind == BesselKind::I)
        return static_cast<double>(
            bessel_i_series(order_value(*seed), gamma_seed_value(*seed), xq));

    // K_nu = pi (I_{-nu} - I_nu) / (2 sin(pi nu)); every supported order is
    // non-integer, so the reflection formula is regular
    const OrderSeed* neg = find_seed(-num, den);
    const f128 nuq = order_value(*seed);
    const f128 i_pos = bessel_i_series(nuq, gamma_seed_value(*seed), xq);
    const f128 i_neg = bessel_i_series(-nuq, gamma_seed_value(*neg), xq);
    const f128 k = M_PIq * (i_neg - i_pos) / (2 * sinq(M_PIq * nuq));
    return static_cast<double>(k);
}

double series_denominator(double z) {
    if (!(z > 0.0)) throw std::invalid_argument("z must be positive");
    const double w = (2.0 / 3.0) * std::sqrt(2.0 * z);
    const double a = -M_PI * std::sqrt(3.0) / 3.0;
    const double sz = std::sqrt(z);
    const double i23 = bessel_modified(BesselKind::I, Rational(2, 3), w);
    const double im13 = bessel_modified(BesselKind::I, Rational(-1, 3), w);
    const double k23 = bessel_modified(BesselKind::K, Rational(2, 3), w);
    const double k13 = bessel_modified(BesselKind::K, Rational(1, 3), w);
    return sz * (-a * std::sqrt(2.0) * i23 + a * sz * im13 +
                 std::sqrt(2.0) * k23 + sz * k13);
}

double find_z0(double tol) {
    if (!(tol >= 1e-10))
        throw std::invalid_argument("tol must be at least 1e-10");
    const double lo = 1.0 + 1e-9;
    const double hi = 3.0;
    const int n_scan = 200;
    double prev_z = lo;
    double prev_f = series_denominator(lo);
    double a = 0.0;
    double b = 0.0;
    double fa = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= n_scan; ++i) {
        const double z = lo + (hi - lo) * i / n_scan;
        const double f = series_denominator(z);
        if (prev_f == 0.0) return prev_z;
        if ((prev_f < 0.0) != (f < 0.0)) {
            a = prev_z;
            b = z;
            fa = prev_f;
            bracketed = true;
            break;
        }
        prev_z = z;
        prev_f = f;
    }
    if (!bracketed)
        throw numeric_error("series denominator has no sign change in (1, 3)");
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        const double fm = series_denominator(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

RationalSeq recursion_exact(int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
    if (n_max > 500)
        throw infeasible_error("exact recursion guarded to n_max <= 500");
    RationalSeq p(static_cast<std::size_t>(n_max) + 1);
    p[0] = 1;
    for (int n = 1; n <= n_max; ++n) {
        Rational acc = 2 * p[n - 1];
        for (int a = 0; a <= n - 2; ++a) acc += p[a] * p[n - 2 - a];
        acc /= 3 * n + 1;
        p[n] = acc;
    }
    return p;
}

ScaledFloatSeq recursion_float(int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
    if (n_max > 100000)
        throw infeasible_error("float recursion guarded to n_max <= 100000");
    ScaledFloatSeq seq;
    seq.log_values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    std::vector<double>& lp = seq.log_values;

    // q[n] = p_n * exp(n * c); c is re-based whenever q drifts far from 1,
    // which keeps the convolution of q values well inside double range
    std::vector<double> q(static_cast<std::size_t>(n_max) + 1, 0.0);
    q[0] = 1.0;
    double c = 0.0;
    double e1 = 1.0; // exp(c)
    double e2 = 1.0; // exp(2c)
    for (int n = 1; n <= n_max; ++n) {
        double conv = 0.0;
        for (int a = 0; a <= n - 2; ++a) conv += q[a] * q[n - 2 - a];
        q[n] = (2.0 * q[n - 1] * e1 + conv * e2) / (3.0 * n + 1.0);
        lp[n] = std::log(q[n]) - n * c;
        if (q[n] > 1e100 || q[n] < 1e-100) {
            c = -lp[n] / n;
            for (int i = 0; i <= n; ++i) q[i] = std::exp(lp[i] + i * c);
            e1 = std::exp(c);
            e2 = std::exp(2.0 * c);
        }
    }
    return seq;
}

GrowthReport growth_rate(const ScaledFloatSeq& seq) {
    const std::size_t len = seq.log_values.size();
    if (len < 100)
        throw std::invalid_argument("growth extrapolation needs >= 100 terms");
    const std::vector<double>& lp = seq.log_values;
    const double x0 = lp[len - 3] - lp[len - 4];
    const double x1 = lp[len - 2] - lp[len - 3];
    const double x2 = lp[len - 1] - lp[len - 2];
    GrowthReport report;
    report.rate_raw = x2;
    report.z0_estimate = std::exp(-x2);
    const double d1 = x1 - x0;
    const double d2 = x2 - x1;
    const double denom = d2 - d1;
    // a degenerate second difference means the increments already look
    // constant; acceleration would just amplify rounding noise
    if (std::abs(denom) < 1e-14 * std::max(std::abs(d2), 1e-300)) {
        report.rate = x2;
    } else {
        report.rate = x2 - d2 * d2 / denom;
    }
    return report;
}

Rational riccati_residual(const RationalSeq& seq) {
    if (seq.empty()) throw std::invalid_argument("sequence must be non-empty");
    Rational worst(0);
    for (std::size_t n = 0; n < seq.size(); ++n) {
        Rational residual = (3 * static_cast<long>(n) + 1) * seq[n];
        if (n == 0) residual -= 1;
        if (n >= 1) residual -= 2 * seq[n - 1];
        for (std::size_t a = 0; n >= 2 && a <= n - 2; ++a)
            residual -= seq[a] * seq[n - 2 - a];
        Rational mag = abs(residual);
        if (mag > worst) worst = mag;
    }
    return worst;
}

Estimate mc_h_star(int n_chain, std::uint64_t n_samples, std::uint64_t seed,
                   int jobs) {
    if (n_chain < 1) throw std::invalid_argument("chain length must be >= 1");
    check_samples(n_samples);
    auto acc = mc_accumulate<MeanAccumulator>(
        n_samples, jobs,
        [&](std::uint64_t chunk, std::uint64_t count, MeanAccumulator& a) {
            StreamRng rng(seed, chunk);
            std::vector<double> y(static_cast<std::size_t>(n_chain) + 1);
            for (std::uint64_t i = 0; i < count; ++i) {
                for (auto& v : y) v = rng.next_uniform();
                bool ok = true;
                // draw all 2*n mutant values even after a failed window so
                // the stream layout per sample is fixed
                for (int j = 1; j <= n_chain; ++j) {
                    const double m1 = rng.next_uniform();
                    const double m2 = rng.next_uniform();
                    if (std::max(y[j - 1], y[j]) < std::max(m1, m2)) ok = false;
                }
                a.add(ok ? 1.0 : 0.0);
            }
        });
    return Estimate{acc.mean(), acc.std_error(), n_samples, seed, "chain-mc"};
}

} // namespace nk
