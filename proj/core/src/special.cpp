#include "nk/special.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "nk/errors.hpp"

namespace nk {

namespace {

// Lanczos approximation, g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr int kMaxIter = 500;

// Lower tail by power series, valid and fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) {
            return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
        }
    }
    throw numeric_error("incomplete gamma series did not converge");
}

// Upper tail by continued fraction (modified Lentz), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) {
            return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
        }
    }
    throw numeric_error("incomplete gamma continued fraction did not converge");
}

} // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::invalid_argument("log_gamma requires x > 0");
    }
    if (x < 0.5) {
        // Reflection keeps the Lanczos sum in its accurate range.
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) {
        a += kLanczos[i] / (z + i);
    }
    const double t = z + 7.5;
    return kLogSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(a);
}

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) {
        throw std::invalid_argument("gamma_p requires a > 0, x >= 0");
    }
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) {
        throw std::invalid_argument("gamma_q requires a > 0, x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

double log_norm_cdf(double x) {
    if (x > 8.0) {
        // Φ(x) is within ~1e-16 of 1; log1p keeps the tiny log accurate.
        return std::log1p(-norm_cdf(-x));
    }
    if (x > -36.0) {
        // erfc stays comfortably above the underflow threshold here.
        return std::log(norm_cdf(x));
    }
    // Deep left tail: Mills-ratio asymptotic series,
    //   Φ(x) = φ(x)/(-x) · (1 - 1/x² + 3/x⁴ - 15/x⁶ + 105/x⁸ - ...),
    // truncated where the next term is below double precision for x <= -36.
    const double x2 = x * x;
    const double x4 = x2 * x2;
    const double corr = -1.0 / x2 + 3.0 / x4 - 15.0 / (x4 * x2) + 105.0 / (x4 * x4);
    return -0.5 * x2 - kLogSqrt2Pi - std::log(-x) + std::log1p(corr);
}

double norm_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("norm_quantile requires p in (0,1)");
    }
    // Rational approximation (relative error ~1.15e-9 everywhere).
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against the accurate CDF brings the guess to full
    // double precision.  exp(x²/2) stays finite because double p in (0,1)
    // keeps |x| below ~37.6.
    const double e = norm_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

namespace {

constexpr int kGridPerUnit = 512;

// Builds the CDF of a sum of m uniforms on a grid of step 1/512 by repeated
// convolution: F_m(x) = ∫_{x-1}^{x} F_{m-1}(t) dt, with the inner integral
// taken as a cumulative trapezoid.  Only the final level is kept.
std::vector<double> build_uniform_sum_grid(int m) {
    const double h = 1.0 / kGridPerUnit;
    std::vector<double> cur(kGridPerUnit + 1);
    for (int i = 0; i <= kGridPerUnit; ++i) {
        cur[i] = i * h; // F_1 on [0,1]
    }
    std::vector<double> cum, next;
    for (int level = 2; level <= m; ++level) {
        const int n_prev = static_cast<int>(cur.size()) - 1; // (level-1)*R
        cum.assign(n_prev + 1, 0.0);
        for (int i = 1; i <= n_prev; ++i) {
            cum[i] = cum[i - 1] + 0.5 * h * (cur[i - 1] + cur[i]);
        }
        // Integral of F_{level-1} from 0 to grid index i, linearly extended
        // past the right end where F = 1.
        auto cum_at = [&](int i) -> double {
            if (i <= 0) return 0.0;
            if (i >= n_prev) return cum[n_prev] + (i - n_prev) * h;
            return cum[i];
        };
        next.assign(static_cast<std::size_t>(level) * kGridPerUnit + 1, 0.0);
        for (int i = 0; i < static_cast<int>(next.size()); ++i) {
            next[i] = cum_at(i) - cum_at(i - kGridPerUnit);
        }
        // The trapezoid rule drifts the total mass by O(h²); renormalize and
        // restore exact monotonicity.
        const double scale = next.back();
        double run = 0.0;
        for (auto& v : next) {
            v = std::min(1.0, std::max(run, v / scale));
            run = v;
        }
        cur.swap(next);
    }
    return cur;
}

std::mutex g_uniform_grid_mutex;
std::map<int, std::vector<double>> g_uniform_grid_cache;

const std::vector<double>& uniform_sum_grid(int m) {
    std::lock_guard<std::mutex> lock(g_uniform_grid_mutex);
    auto it = g_uniform_grid_cache.find(m);
    if (it == g_uniform_grid_cache.end()) {
        it = g_uniform_grid_cache.emplace(m, build_uniform_sum_grid(m)).first;
    }
    return it->second;
}

void check_irwin_hall_m(int m, int max_m) {
    if (m < 1 || m > max_m) {
        throw std::invalid_argument("irwin_hall_cdf: m out of supported range");
    }
}

} // namespace

double irwin_hall_cdf_closed(int m, double s) {
    check_irwin_hall_m(m, 60);
    if (s <= 0.0) return 0.0;
    if (s >= m) return 1.0;
    // Work on the left half; F(s) = 1 - F(m - s) by symmetry.  This keeps
    // the alternating sum short and its cancellation mild.
    const bool flipped = s > 0.5 * m;
    if (flipped) s = m - s;
    long double sum = 0.0L;
    long double binom = 1.0L; // C(m, k), exact in long double for m <= 60
    const int k_max = static_cast<int>(s);
    for (int k = 0; k <= k_max; ++k) {
        const long double term = binom * std::pow(static_cast<long double>(s - k), m);
        sum += (k & 1) ? -term : term;
        binom = binom * (m - k) / (k + 1);
    }
    long double fact = 1.0L;
    for (int i = 2; i <= m; ++i) fact *= i;
    double f = static_cast<double>(sum / fact);
    f = std::min(1.0, std::max(0.0, f));
    return flipped ? 1.0 - f : f;
}

double irwin_hall_cdf_grid(int m, double s) {
    check_irwin_hall_m(m, 100000);
    if (s <= 0.0) return 0.0;
    if (s >= m) return 1.0;
    const std::vector<double>& grid = uniform_sum_grid(m);
    const double pos = s * kGridPerUnit;
    const int i = std::min(static_cast<int>(pos), static_cast<int>(grid.size()) - 2);
    const double frac = pos - i;
    return grid[i] + frac * (grid[i + 1] - grid[i]);
}

double irwin_hall_cdf(int m, double s) {
    if (m <= kIrwinHallClosedFormMax) {
        return irwin_hall_cdf_closed(m, s);
    }
    if (s <= 1.0) {
        // Single-term closed form, exact for s <= 1 and immune to the
        // grid's resolution limit near the bottom tail.
        if (s <= 0.0) return 0.0;
        return std::exp(m * std::log(s) - log_gamma(m + 1.0));
    }
    return irwin_hall_cdf_grid(m, s);
}

double log_irwin_hall_cdf(int m, double s) {
    check_irwin_hall_m(m, 100000);
    if (s <= 0.0) return -HUGE_VAL;
    if (s >= m) return 0.0;
    if (s <= 1.0) {
        // F(s) = s^m/m! exactly on [0,1].
        return m * std::log(s) - log_gamma(m + 1.0);
    }
    const double f = irwin_hall_cdf(m, s);
    if (f > 0.0) return std::log(f);
    // Underflow fallback: the s <= 1 term evaluated at 1 lower-bounds F.
    return -log_gamma(m + 1.0);
}

} // namespace nk
