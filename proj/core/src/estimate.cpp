#include "nk/estimate.hpp"

#include <cmath>
#include <stdexcept>

#include "nk/errors.hpp"
#include "nk/parallel.hpp"
#include "nk/special.hpp"

namespace nk {

namespace {

void check_samples(std::uint64_t n_samples) {
    if (n_samples == 0) {
        throw std::invalid_argument("Monte Carlo estimators require n_samples >= 1");
    }
}

Estimate make_estimate(const MeanAccumulator& acc, std::uint64_t seed,
                       const char* method) {
    Estimate e;
    e.p_hat = acc.mean();
    e.std_error = acc.std_error();
    e.n_samples = acc.n;
    e.seed = seed;
    e.method = method;
    return e;
}

// --- Gauss-Kronrod 15-point rule -----------------------------------------

// Kronrod abscissae on [0,1] (symmetric), Kronrod weights, and the embedded
// 7-point Gauss weights at the even-index nodes.
constexpr double kGkNode[8] = {
    0.0000000000000000, 0.2077849550078985, 0.4058451513773972,
    0.5860872354676911, 0.7415311855993945, 0.8648644233597691,
    0.9491079123427585, 0.9914553711208126,
};
constexpr double kGkWeight[8] = {
    0.2094821410847278, 0.2044329400752989, 0.1903505780647854,
    0.1690047266392679, 0.1406532597155259, 0.1047900103222502,
    0.0630920926299786, 0.0229353220105292,
};
constexpr double kGaussWeight[4] = {
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
    0.1294849661688697,
};

template <typename F>
void gk15(const F& f, double a, double b, double& kronrod, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_mid = f(mid);
    double k_sum = kGkWeight[0] * f_mid;
    double g_sum = kGaussWeight[0] * f_mid;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kGkNode[i];
        const double f_pair = f(mid - dx) + f(mid + dx);
        k_sum += kGkWeight[i] * f_pair;
        if (i % 2 == 0) g_sum += kGaussWeight[i / 2] * f_pair;
    }
    kronrod = k_sum * half;
    err = std::fabs((k_sum - g_sum) * half);
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double tol_abs, int depth) {
    double value, err;
    gk15(f, a, b, value, err);
    // Second acceptance clause: once the error estimate is at rounding
    // level relative to the local piece, splitting further cannot help —
    // the estimate and the per-split tolerance would shrink in lockstep.
    // Floor-accepted error totals at most 1e-15 · ∫|f|.
    if (err <= tol_abs || err <= 1e-15 * std::fabs(value) || b - a < 1e-14) {
        return value;
    }
    if (depth >= 60) {
        throw numeric_error("adaptive quadrature did not converge");
    }
    const double mid = 0.5 * (a + b);
    return adaptive_gk(f, a, mid, 0.5 * tol_abs, depth + 1) +
           adaptive_gk(f, mid, b, 0.5 * tol_abs, depth + 1);
}

void check_normal_args(int n_loci, int k) {
    ModelParams p;
    p.n_loci = n_loci;
    p.k = k;
    p.dist = DistributionKind::normal;
    validate(p);
}

// Integration window: the Gaussian factor kills everything past a few
// standard deviations of the saddle, which sits at O(√(N/(k+1))).
void normal_integration_interval(int n_loci, int k, double& a, double& b) {
    const double w = 8.0 * std::sqrt(static_cast<double>(n_loci) / (k + 1)) + 10.0;
    a = -w;
    b = w;
}

} // namespace

Estimate direct_mc(const ModelParams& params, std::uint64_t n_samples,
                   std::uint64_t seed, int jobs) {
    validate(params);
    check_samples(n_samples);
    auto acc = mc_accumulate<MeanAccumulator>(
        n_samples, jobs,
        [&params, seed](std::uint64_t chunk, std::uint64_t count,
                        MeanAccumulator& out) {
            StreamRng rng(seed, chunk);
            NeighborhoodSample sample;
            std::vector<double> scratch;
            for (std::uint64_t i = 0; i < count; ++i) {
                sample_neighborhood_into(sample, scratch, params, rng);
                out.add(zero_is_lfm(sample) ? 1.0 : 0.0);
            }
        });
    return make_estimate(acc, seed, "direct");
}

Estimate conditional_mc(const ModelParams& params, std::uint64_t n_samples,
                        std::uint64_t seed, int jobs) {
    validate(params);
    check_samples(n_samples);
    const int n = params.n_loci;
    const int m = params.k + 1;

    // Touch the sum-CDF once up front so any cached table is built before
    // the workers start.
    (void)cdf_sum(params.dist, m, 0.5 * m);

    auto acc = mc_accumulate<MeanAccumulator>(
        n_samples, jobs,
        [&params, n, m, seed](std::uint64_t chunk, std::uint64_t count,
                              MeanAccumulator& out) {
            StreamRng rng(seed, chunk);
            std::vector<double> y(n);
            for (std::uint64_t s = 0; s < count; ++s) {
                for (auto& v : y) v = quantile(params.dist, rng.next_uniform());
                // The n cyclic window sums of length m, maintained by
                // sliding.  Their order does not matter for the product.
                double w = 0.0;
                for (int i = 0; i < m; ++i) w += y[i];
                double log_prod = 0.0;
                for (int t = 0; t < n; ++t) {
                    log_prod += log_cdf_sum(params.dist, m, w);
                    w += y[(t + m) % n] - y[t];
                }
                out.add(std::exp(log_prod));
            }
        });
    return make_estimate(acc, seed, "conditional");
}

double log_normal_integrand(double x, int n_loci, int k) {
    check_normal_args(n_loci, k);
    const double scale = std::sqrt(static_cast<double>(k + 1) / n_loci);
    return n_loci * log_norm_cdf(x * scale) - 0.5 * x * x -
           0.5 * std::log(2.0 * M_PI);
}

double normal_upper_bound(int n_loci, int k, double tol) {
    check_normal_args(n_loci, k);
    if (!(tol > 0.0)) {
        throw std::invalid_argument("normal_upper_bound requires tol > 0");
    }
    const double scale = std::sqrt(static_cast<double>(k + 1) / n_loci);
    auto integrand = [n_loci, scale](double x) {
        const double log_f =
            n_loci * log_norm_cdf(x * scale) - 0.5 * x * x;
        return std::exp(log_f) / std::sqrt(2.0 * M_PI);
    };
    double a, b;
    normal_integration_interval(n_loci, k, a, b);
    double rough, err;
    gk15(integrand, a, b, rough, err);
    const double tol_abs = std::max(tol * std::fabs(rough), 1e-300);
    return adaptive_gk(integrand, a, b, tol_abs, 0);
}

SaddleReport normal_saddle(int n_loci, int k, double x_tol) {
    check_normal_args(n_loci, k);
    if (k < 2) {
        throw std::invalid_argument("normal_saddle requires k >= 2");
    }
    auto f = [n_loci, k](double x) { return log_normal_integrand(x, n_loci, k); };

    double a, b;
    normal_integration_interval(n_loci, k, a, b);
    // Golden-section search; log I is strictly concave, hence unimodal.
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > x_tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }

    SaddleReport report;
    report.x_max = 0.5 * (a + b);
    report.log_i_max = f(report.x_max);
    report.x0 = std::sqrt(2.0 * n_loci / (k + 1.0) * std::log(k + 1.0));
    report.log_i_x0 = f(report.x0);
    return report;
}

} // namespace nk
