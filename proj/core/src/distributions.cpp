#include "nk/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "nk/special.hpp"

namespace nk {

namespace {

// Standard Cauchy CDF with the cancellation-free branches: for |t| > 1 the
// identity atan(t) + atan(1/t) = ±π/2 turns the tail value into a small
// positive quantity instead of a difference of near-halves.
double cauchy_cdf(double t) {
    if (t < -1.0) return std::atan(-1.0 / t) / M_PI;
    if (t > 1.0) return 1.0 - std::atan(1.0 / t) / M_PI;
    return 0.5 + std::atan(t) / M_PI;
}

double cauchy_log_cdf(double t) {
    if (t < -1.0) return std::log(std::atan(-1.0 / t)) - std::log(M_PI);
    return std::log(cauchy_cdf(t));
}

void check_m(int m) {
    if (m < 1) {
        throw std::invalid_argument("cdf_sum requires m >= 1");
    }
}

} // namespace

DistributionKind parse_distribution(std::string_view name) {
    if (name == "normal") return DistributionKind::normal;
    if (name == "uniform01") return DistributionKind::uniform01;
    if (name == "exponential") return DistributionKind::exponential;
    if (name == "negexponential") return DistributionKind::negexponential;
    if (name == "cauchy") return DistributionKind::cauchy;
    throw std::invalid_argument("unknown distribution: " + std::string(name));
}

std::string to_string(DistributionKind dist) {
    switch (dist) {
        case DistributionKind::normal: return "normal";
        case DistributionKind::uniform01: return "uniform01";
        case DistributionKind::exponential: return "exponential";
        case DistributionKind::negexponential: return "negexponential";
        case DistributionKind::cauchy: return "cauchy";
    }
    throw std::invalid_argument("unknown distribution tag");
}

double quantile(DistributionKind dist, double u) {
    if (!(u > 0.0) || !(u < 1.0)) {
        throw std::invalid_argument("quantile requires u in (0,1)");
    }
    switch (dist) {
        case DistributionKind::normal: return norm_quantile(u);
        case DistributionKind::uniform01: return u;
        case DistributionKind::exponential: return -std::log1p(-u);
        case DistributionKind::negexponential: return std::log(u);
        case DistributionKind::cauchy: return std::tan(M_PI * (u - 0.5));
    }
    throw std::invalid_argument("unknown distribution tag");
}

double cdf_sum(DistributionKind dist, int m, double s) {
    check_m(m);
    switch (dist) {
        case DistributionKind::normal:
            return norm_cdf(s / std::sqrt(static_cast<double>(m)));
        case DistributionKind::uniform01:
            return irwin_hall_cdf(m, s);
        case DistributionKind::exponential:
            // Sum of m rate-1 exponentials is Erlang(m).
            return s <= 0.0 ? 0.0 : gamma_p(m, s);
        case DistributionKind::negexponential:
            // P(-G <= s) = Q(m, -s) for s < 0, 1 for s >= 0.
            return s >= 0.0 ? 1.0 : gamma_q(m, -s);
        case DistributionKind::cauchy:
            // Sum of m standard Cauchy is Cauchy with scale m.
            return cauchy_cdf(s / m);
    }
    throw std::invalid_argument("unknown distribution tag");
}

double log_cdf_sum(DistributionKind dist, int m, double s) {
    check_m(m);
    switch (dist) {
        case DistributionKind::normal:
            return log_norm_cdf(s / std::sqrt(static_cast<double>(m)));
        case DistributionKind::uniform01:
            return log_irwin_hall_cdf(m, s);
        case DistributionKind::exponential: {
            if (s <= 0.0) return -HUGE_VAL;
            const double p = gamma_p(m, s);
            return p > 0.0 ? std::log(p)
                           // Leading series term as an underflow fallback.
                           : m * std::log(s) - s - log_gamma(m + 1.0);
        }
        case DistributionKind::negexponential: {
            if (s >= 0.0) return 0.0;
            const double q = gamma_q(m, -s);
            return q > 0.0 ? std::log(q)
                           // Leading asymptotic term of Q(m, x) for large x.
                           : s + (m - 1) * std::log(-s) - log_gamma(m);
        }
        case DistributionKind::cauchy:
            return cauchy_log_cdf(s / m);
    }
    throw std::invalid_argument("unknown distribution tag");
}

} // namespace nk
