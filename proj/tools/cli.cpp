#include "nk_cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nk/errors.hpp"
#include "nk/estimate.hpp"
#include "nk/fattail.hpp"
#include "nk/k1exact.hpp"
#include "nk/model.hpp"
#include "nk/rational.hpp"

namespace nk::cli {
namespace {

using nlohmann::json;

// Effective parameters of one run.  Shared flags live on the root parser
// and fall through from any subcommand; the handful of subcommand-local
// flags are also collected here so sweep overrides can treat every knob
// uniformly.
struct Options {
    int n_loci = 0; // 0 = not set
    int k = 0;      // 0 = not set
    std::string dist = "uniform01";
    std::string method;
    int r_max = -1;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    double tol = 0.0; // 0 = use the command's default
    int jobs = 1;
    // subcommand-local knobs
    int r = 0;
    double y = 0.0;
    double cap = 0.0; // 0 = no cap
    int n_max = 0;    // 0 = command default
    int n_chain = 0;
};

json rational_json(const Rational& q) {
    return json{{"fraction", to_fraction_string(q)},
                {"decimal", to_double(q)}};
}

ModelParams model_params(const Options& opt) {
    if (opt.n_loci <= 0)
        throw std::invalid_argument("--n-loci is required for this command");
    if (opt.k <= 0)
        throw std::invalid_argument("--k is required for this command");
    ModelParams params{opt.n_loci, opt.k, parse_distribution(opt.dist)};
    validate(params);
    return params;
}

void require_pair(const Options& opt) {
    if (opt.n_loci <= 0)
        throw std::invalid_argument("--n-loci is required for this command");
    if (opt.k <= 0)
        throw std::invalid_argument("--k is required for this command");
}

json estimate_json(const Estimate& est) {
    return json{{"p_hat", est.p_hat},
                {"stderr", est.std_error},
                {"n_samples", est.n_samples},
                {"method", est.method}};
}

// One line of the CSV projection.  `dist`/`method` may differ per row
// (compare-dists); everything else comes from the options.
struct CsvRow {
    std::string dist;
    std::string method;
    double value = 0.0;
    std::optional<double> std_error;
};

// What a handler produces: the JSON result payload, the parameter echo,
// warnings, and the CSV projection.
struct Outcome {
    json result;
    json params;
    std::vector<std::string> warnings;
    std::vector<CsvRow> rows;
    std::uint64_t n_samples = 0;
};

// ---- handlers --------------------------------------------------------------

Outcome cmd_estimate(const Options& opt) {
    const auto params = model_params(opt);
    const std::string method = opt.method.empty() ? "direct" : opt.method;
    Estimate est;
    if (method == "direct") {
        est = direct_mc(params, opt.samples, opt.seed, opt.jobs);
    } else if (method == "conditional") {
        est = conditional_mc(params, opt.samples, opt.seed, opt.jobs);
    } else {
        throw std::invalid_argument(
            "--method must be 'direct' or 'conditional'");
    }
    Outcome out;
    out.result = estimate_json(est);
    out.params = {{"n_loci", opt.n_loci}, {"k", opt.k},  {"dist", opt.dist},
                  {"method", method},     {"samples", opt.samples},
                  {"jobs", opt.jobs}};
    out.rows = {{opt.dist, method, est.p_hat, est.std_error}};
    out.n_samples = opt.samples;
    if (is_exchangeable_case(params))
        out.warnings.push_back(
            "k = n_loci - 1: every window covers the whole genome, the "
            "probability is exactly 1/(n_loci+1)");
    return out;
}

Outcome cmd_normal_bound(const Options& opt) {
    require_pair(opt);
    const double tol = opt.tol > 0.0 ? opt.tol : 1e-10;
    const double bound = normal_upper_bound(opt.n_loci, opt.k, tol);
    Outcome out;
    out.result = {{"bound", bound}, {"tol", tol}};
    out.params = {{"n_loci", opt.n_loci}, {"k", opt.k}, {"tol", tol}};
    out.rows = {{"normal", "quadrature", bound, std::nullopt}};
    return out;
}

Outcome cmd_normal_saddle(const Options& opt) {
    require_pair(opt);
    const double x_tol = opt.tol > 0.0 ? opt.tol : 1e-8;
    const auto report = normal_saddle(opt.n_loci, opt.k, x_tol);
    Outcome out;
    out.result = {{"x_max", report.x_max},
                  {"log_i_max", report.log_i_max},
                  {"x0", report.x0},
                  {"log_i_x0", report.log_i_x0}};
    out.params = {{"n_loci", opt.n_loci}, {"k", opt.k}, {"tol", x_tol}};
    out.rows = {{"normal", "golden-section", report.x_max, std::nullopt}};
    return out;
}

Outcome cmd_fat_exact(const Options& opt) {
    require_pair(opt);
    const auto res = enumerate_exact(opt.n_loci, opt.k, opt.r_max);
    json per_r = json::object();
    for (const auto& [r, mass] : res.per_r)
        per_r[std::to_string(r)] = rational_json(mass);
    Outcome out;
    out.result = {{"total", rational_json(res.total)},
                  {"per_r", per_r},
                  {"remainder_bound", res.remainder_bound},
                  {"full", res.full},
                  {"sequences", res.sequences}};
    out.params = {{"n_loci", opt.n_loci}, {"k", opt.k}, {"r_max", opt.r_max}};
    out.rows = {{"any", "enumeration", to_double(res.total), std::nullopt}};
    if (!res.full)
        out.warnings.push_back(
            "covers longer than r_max are not enumerated; their mass is "
            "bounded by remainder_bound");
    return out;
}

Outcome cmd_fat_mc(const Options& opt) {
    require_pair(opt);
    const auto est = mc_p_fat(opt.n_loci, opt.k, opt.samples, opt.seed,
                              opt.jobs);
    Outcome out;
    out.result = estimate_json(est);
    out.params = {{"n_loci", opt.n_loci},
                  {"k", opt.k},
                  {"samples", opt.samples},
                  {"jobs", opt.jobs}};
    out.rows = {{"any", est.method, est.p_hat, est.std_error}};
    out.n_samples = opt.samples;
    return out;
}

Outcome cmd_fat_selftest(const Options& opt) {
    const auto params = model_params(opt);
    std::uint64_t mismatches = 0;
    StreamRng rng(opt.seed);
    NeighborhoodSample sample;
    std::vector<double> scratch;
    for (std::uint64_t i = 0; i < opt.samples; ++i) {
        sample_neighborhood_into(sample, scratch, params, rng);
        if (run_cover_algorithm(sample).verdict != check_direct(sample))
            ++mismatches;
    }
    Outcome out;
    out.result = {{"samples", opt.samples},
                  {"mismatches", mismatches},
                  {"agree", mismatches == 0}};
    out.params = {{"n_loci", opt.n_loci},
                  {"k", opt.k},
                  {"dist", opt.dist},
                  {"samples", opt.samples}};
    out.rows = {{opt.dist, "selftest", static_cast<double>(mismatches),
                 std::nullopt}};
    out.n_samples = opt.samples;
    if (mismatches > 0)
        throw numeric_error("cover algorithm disagreed with the direct "
                            "check on " +
                            std::to_string(mismatches) + " samples");
    return out;
}

Outcome cmd_fat_fr(const Options& opt) {
    Outcome out;
    out.params = {{"r", opt.r},
                  {"y", opt.y},
                  {"samples", opt.samples},
                  {"jobs", opt.jobs}};
    if (opt.cap > 0.0) {
        const auto t = f_r_truncated(opt.r, opt.y, opt.cap, opt.samples,
                                     opt.seed, opt.jobs);
        out.result = estimate_json(t.estimate);
        out.result["cap"] = t.cap;
        out.result["cap_sensitivity"] = t.sensitivity;
        out.params["cap"] = opt.cap;
        out.rows = {{"uniform01", t.estimate.method, t.estimate.p_hat,
                     t.estimate.std_error}};
    } else {
        const auto est = f_r_mc(opt.r, opt.y, opt.samples, opt.seed,
                                opt.jobs);
        out.result = estimate_json(est);
        out.rows = {{"uniform01", est.method, est.p_hat, est.std_error}};
    }
    out.n_samples = opt.samples;
    return out;
}

Outcome cmd_fat_torus_measure(const Options& opt) {
    const auto est =
        torus_measure_mc(opt.r, opt.y, opt.samples, opt.seed, opt.jobs);
    Outcome out;
    out.result = estimate_json(est);
    out.params = {{"r", opt.r},
                  {"y", opt.y},
                  {"samples", opt.samples},
                  {"jobs", opt.jobs}};
    out.rows = {{"uniform01", est.method, est.p_hat, est.std_error}};
    out.n_samples = opt.samples;
    return out;
}

Outcome cmd_fat_table1(const Options& opt) {
    require_pair(opt);
    const auto pred = table1_predict(opt.n_loci, opt.k, opt.samples,
                                     opt.seed, opt.jobs);
    Outcome out;
    out.result = {{"value", pred.value},
                  {"row", pred.row},
                  {"term_main", pred.term_main},
                  {"term_correction", pred.term_correction}};
    if (pred.row == 1) {
        out.result["j"] = pred.j;
    } else {
        out.result["r"] = pred.r;
        out.result["y"] = pred.y;
        out.result["f_r"] = estimate_json(pred.f_r_estimate);
        json f_next = estimate_json(pred.f_next.estimate);
        f_next["cap"] = pred.f_next.cap;
        f_next["cap_sensitivity"] = pred.f_next.sensitivity;
        out.result["f_next"] = f_next;
    }
    out.params = {{"n_loci", opt.n_loci},
                  {"k", opt.k},
                  {"samples", opt.samples},
                  {"jobs", opt.jobs}};
    out.warnings = pred.warnings;
    out.rows = {{"any", "asymptotic", pred.value, std::nullopt}};
    out.n_samples = opt.samples;
    return out;
}

Outcome cmd_k1_recursion(const Options& opt) {
    const int n_max = opt.n_max > 0 ? opt.n_max : 100;
    const std::string method = opt.method.empty() ? "exact" : opt.method;
    Outcome out;
    out.params = {{"n_max", n_max}, {"method", method}};
    if (method == "exact") {
        const auto seq = recursion_exact(n_max);
        json values = json::array();
        for (std::size_t n = 0; n < seq.size(); ++n) {
            json v = rational_json(seq[n]);
            v["n"] = n;
            values.push_back(std::move(v));
        }
        out.result = {{"values", values}};
        out.rows = {{"any", method, to_double(seq.back()), std::nullopt}};
    } else if (method == "float") {
        const auto seq = recursion_float(n_max);
        out.result = {{"log_values", seq.log_values}};
        out.rows = {{"any", method, seq.log_values.back(), std::nullopt}};
    } else {
        throw std::invalid_argument("--method must be 'exact' or 'float'");
    }
    return out;
}

Outcome cmd_k1_growth(const Options& opt) {
    const int n_max = opt.n_max > 0 ? opt.n_max : 2000;
    const auto report = growth_rate(recursion_float(n_max));
    Outcome out;
    out.result = {{"rate", report.rate},
                  {"rate_raw", report.rate_raw},
                  {"z0_estimate", report.z0_estimate}};
    out.params = {{"n_max", n_max}};
    out.rows = {{"any", "aitken", report.rate, std::nullopt}};
    return out;
}

Outcome cmd_k1_z0(const Options& opt) {
    const double tol = opt.tol > 0.0 ? opt.tol : 1e-8;
    const double z0 = find_z0(tol);
    Outcome out;
    out.result = {{"z0", z0}, {"minus_log_z0", -std::log(z0)}, {"tol", tol}};
    out.params = {{"tol", tol}};
    out.rows = {{"any", "bisection", z0, std::nullopt}};
    return out;
}

Outcome cmd_k1_mc(const Options& opt) {
    if (opt.n_chain <= 0)
        throw std::invalid_argument("--n-chain is required and positive");
    const auto est =
        mc_h_star(opt.n_chain, opt.samples, opt.seed, opt.jobs);
    Outcome out;
    out.result = estimate_json(est);
    out.params = {{"n_chain", opt.n_chain},
                  {"samples", opt.samples},
                  {"jobs", opt.jobs}};
    out.rows = {{"any", est.method, est.p_hat, est.std_error}};
    out.n_samples = opt.samples;
    return out;
}

Outcome cmd_lfm_count(const Options& opt) {
    const auto params = model_params(opt);
    const std::uint64_t m = opt.samples;
    if (m == 0) throw std::invalid_argument("--samples must be positive");
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) {
        const double c = static_cast<double>(
            count_lfm(sample_landscape(params, opt.seed, i)));
        sum += c;
        sum_sq += c * c;
    }
    const double mean = sum / static_cast<double>(m);
    const double se =
        m > 1 ? std::sqrt((sum_sq / static_cast<double>(m) - mean * mean) /
                          static_cast<double>(m - 1))
              : 0.0;
    Outcome out;
    out.result = {{"mean_count", mean},
                  {"stderr", se},
                  {"landscapes", m},
                  {"mean_fraction", mean / std::ldexp(1.0, opt.n_loci)}};
    out.params = {{"n_loci", opt.n_loci},
                  {"k", opt.k},
                  {"dist", opt.dist},
                  {"samples", m}};
    out.rows = {{opt.dist, "exhaustive", mean, se}};
    out.n_samples = m;
    return out;
}

Outcome cmd_compare_dists(const Options& opt) {
    require_pair(opt);
    const std::string method =
        opt.method.empty() ? "conditional" : opt.method;
    const auto fat =
        mc_p_fat(opt.n_loci, opt.k, opt.samples, opt.seed, opt.jobs);
    const double fat_low = fat.p_hat - 4.0 * fat.std_error;
    Outcome out;
    json rows = json::array();
    out.rows.push_back({"any", fat.method, fat.p_hat, fat.std_error});
    for (auto dist :
         {DistributionKind::normal, DistributionKind::uniform01,
          DistributionKind::exponential, DistributionKind::negexponential,
          DistributionKind::cauchy}) {
        ModelParams params{opt.n_loci, opt.k, dist};
        Estimate est;
        if (method == "direct") {
            est = direct_mc(params, opt.samples, opt.seed, opt.jobs);
        } else if (method == "conditional") {
            est = conditional_mc(params, opt.samples, opt.seed, opt.jobs);
        } else {
            throw std::invalid_argument(
                "--method must be 'direct' or 'conditional'");
        }
        const bool holds = est.p_hat + 4.0 * est.std_error >= fat_low;
        rows.push_back({{"dist", to_string(dist)},
                        {"p_hat", est.p_hat},
                        {"stderr", est.std_error},
                        {"above_fat_tail_floor", holds}});
        if (!holds)
            out.warnings.push_back("estimate for " + to_string(dist) +
                                   " fell below the fat-tail floor");
        out.rows.push_back(
            {to_string(dist), method, est.p_hat, est.std_error});
    }
    out.result = {{"fat_tail", estimate_json(fat)}, {"distributions", rows}};
    out.params = {{"n_loci", opt.n_loci},
                  {"k", opt.k},
                  {"method", method},
                  {"samples", opt.samples},
                  {"jobs", opt.jobs}};
    out.n_samples = opt.samples;
    return out;
}

// ---- sweep and output plumbing ---------------------------------------------

struct SweepAxis {
    std::string name;
    std::vector<std::string> values;
};

std::vector<SweepAxis> parse_sweep(const std::string& spec) {
    std::vector<SweepAxis> axes;
    std::istringstream stream(spec);
    std::string axis;
    while (std::getline(stream, axis, ';')) {
        if (axis.empty()) continue;
        const auto eq = axis.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument(
                "sweep axes look like name=v1,v2,...; got '" + axis + "'");
        SweepAxis out;
        out.name = axis.substr(0, eq);
        std::istringstream vals(axis.substr(eq + 1));
        std::string v;
        while (std::getline(vals, v, ',')) {
            if (!v.empty()) out.values.push_back(v);
        }
        if (out.values.empty())
            throw std::invalid_argument("sweep axis '" + out.name +
                                        "' has no values");
        axes.push_back(std::move(out));
    }
    if (axes.empty())
        throw std::invalid_argument("empty sweep specification");
    return axes;
}

template <typename T>
T parse_number(const std::string& text, const std::string& name) {
    std::istringstream stream(text);
    T value{};
    stream >> value;
    if (stream.fail() || !stream.eof())
        throw std::invalid_argument("cannot parse sweep value '" + text +
                                    "' for " + name);
    return value;
}

void apply_override(Options& opt, const std::string& name,
                    const std::string& value) {
    if (name == "n-loci") opt.n_loci = parse_number<int>(value, name);
    else if (name == "k") opt.k = parse_number<int>(value, name);
    else if (name == "dist") opt.dist = value;
    else if (name == "method") opt.method = value;
    else if (name == "r-max") opt.r_max = parse_number<int>(value, name);
    else if (name == "samples")
        opt.samples = parse_number<std::uint64_t>(value, name);
    else if (name == "seed")
        opt.seed = parse_number<std::uint64_t>(value, name);
    else if (name == "tol") opt.tol = parse_number<double>(value, name);
    else if (name == "jobs") opt.jobs = parse_number<int>(value, name);
    else if (name == "r") opt.r = parse_number<int>(value, name);
    else if (name == "y") opt.y = parse_number<double>(value, name);
    else if (name == "cap") opt.cap = parse_number<double>(value, name);
    else if (name == "n-max") opt.n_max = parse_number<int>(value, name);
    else if (name == "n-chain")
        opt.n_chain = parse_number<int>(value, name);
    else
        throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

std::string format_double(double v) {
    std::ostringstream stream;
    stream.precision(17);
    stream << v;
    return stream.str();
}

constexpr const char* kCsvHeader =
    "command,n_loci,k,dist,method,r_max,samples,seed,value,std_error,"
    "elapsed_ms";

void write_csv_rows(std::ostream& out, const std::string& command,
                    const Options& opt, const Outcome& outcome,
                    long long elapsed_ms) {
    for (const auto& row : outcome.rows) {
        out << command << ',';
        if (opt.n_loci > 0) out << opt.n_loci;
        out << ',';
        if (opt.k > 0) out << opt.k;
        out << ',' << row.dist << ',' << row.method << ',' << opt.r_max
            << ',' << outcome.n_samples << ',' << opt.seed << ','
            << format_double(row.value) << ',';
        if (row.std_error) out << format_double(*row.std_error);
        out << ',' << elapsed_ms << '\n';
    }
}

json run_record(const std::string& command, const Options& opt,
                const Outcome& outcome, long long elapsed_ms) {
    return json{{"command", command},
                {"params", outcome.params},
                {"result", outcome.result},
                {"seed", opt.seed},
                {"n_samples", outcome.n_samples},
                {"elapsed_ms", elapsed_ms},
                {"warnings", outcome.warnings}};
}

using Handler = Outcome (*)(const Options&);

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    Options opt;
    std::string sweep_spec;
    std::string format;

    CLI::App app{"Local-maximum probabilities in cyclically interacting "
                 "random fitness landscapes"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Config file with key=value defaults (flags override)");

    auto* seed_opt =
        app.add_option("--seed", opt.seed,
                       "Random seed (default: NK_SEED env var, then 0)");
    app.add_option("--n-loci", opt.n_loci, "Genome length N (loci count)");
    app.add_option("--k", opt.k, "Epistasis range K (window size K+1)");
    app.add_option("--dist", opt.dist,
                   "Fitness distribution (negexponential = minus a rate-1 "
                   "exponential)")
        ->check(CLI::IsMember({"normal", "uniform01", "exponential",
                               "negexponential", "cauchy"}));
    app.add_option("--samples", opt.samples,
                   "Monte Carlo sample count (landscape count for lfm)")
        ->check(CLI::PositiveNumber);
    app.add_option("--method", opt.method,
                   "Estimator/mode selector (per-command values)");
    app.add_option("--r-max", opt.r_max,
                   "Cover-length bound for fat exact (-1 = full)");
    app.add_option("--tol", opt.tol, "Tolerance (per-command default)")
        ->check(CLI::PositiveNumber);
    app.add_option("--jobs", opt.jobs,
                   "Worker threads (results never depend on this)");
    app.add_option("--sweep", sweep_spec,
                   "Cartesian sweep 'name=v1,v2;name2=w1,...' over flag "
                   "values; emits one CSV row per combination");
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));

    // Resolved after parsing: (command path, handler)
    std::string command;
    Handler handler = nullptr;
    auto bind = [&](CLI::App* sub, const char* name, Handler h) {
        sub->fallthrough();
        sub->callback([&command, &handler, name, h]() {
            command = name;
            handler = h;
        });
        return sub;
    };

    bind(app.add_subcommand("estimate",
                            "Monte Carlo estimate of the local-maximum "
                            "probability p(N,K)"),
         "estimate", cmd_estimate);

    auto* normal = app.add_subcommand(
        "normal", "Normal-distribution integral machinery");
    normal->require_subcommand(1);
    normal->fallthrough();
    bind(normal->add_subcommand("bound",
                                "Upper bound for p(N,K) under normal "
                                "fitness, by adaptive quadrature"),
         "normal bound", cmd_normal_bound);
    bind(normal->add_subcommand("saddle",
                                "Locate the integrand's maximum and the "
                                "analytic probe point"),
         "normal saddle", cmd_normal_saddle);

    auto* fat = app.add_subcommand(
        "fat", "Distribution-free order-statistics (fat-tail) bound");
    fat->require_subcommand(1);
    fat->fallthrough();
    bind(fat->add_subcommand("exact",
                             "Exact cover enumeration of the fat-tail "
                             "probability"),
         "fat exact", cmd_fat_exact);
    bind(fat->add_subcommand("mc", "Monte Carlo fat-tail probability"),
         "fat mc", cmd_fat_mc);
    bind(fat->add_subcommand("algorithm-selftest",
                             "Check the greedy cover verdict against the "
                             "direct definition on random samples"),
         "fat algorithm-selftest", cmd_fat_selftest);
    auto* fr = fat->add_subcommand(
        "fr", "Torus integral f_r(y), optionally with a weight cap");
    fr->add_option("--r", opt.r, "Torus dimension (window count)")
        ->required();
    fr->add_option("--y", opt.y, "Slack parameter in [0,1]")->required();
    fr->add_option("--cap", opt.cap,
                   "Cap the integrand and report cap sensitivity")
        ->check(CLI::PositiveNumber);
    bind(fr, "fat fr", cmd_fat_fr);
    auto* torus = fat->add_subcommand("torus-measure",
                                      "Measure of the torus cover set T(y)");
    torus->add_option("--r", opt.r, "Torus dimension")->required();
    torus->add_option("--y", opt.y, "Slack parameter in [0, r-1]")
        ->required();
    bind(torus, "fat torus-measure", cmd_fat_torus_measure);
    bind(fat->add_subcommand("table1",
                             "Two-term asymptotic prediction of the "
                             "fat-tail probability for large K"),
         "fat table1", cmd_fat_table1);

    auto* k1 = app.add_subcommand(
        "k1", "Exact machinery for the K=1 chain recursion");
    k1->require_subcommand(1);
    k1->fallthrough();
    auto* rec = k1->add_subcommand(
        "recursion", "Chain probabilities p_0..p_n (exact or float)");
    rec->add_option("--n-max", opt.n_max, "Largest index (default 100)");
    bind(rec, "k1 recursion", cmd_k1_recursion);
    auto* growth = k1->add_subcommand(
        "growth", "Extrapolated growth rate of log p_n");
    growth->add_option("--n-max", opt.n_max,
                       "Recursion length (default 2000)");
    bind(growth, "k1 growth", cmd_k1_growth);
    bind(k1->add_subcommand("z0",
                            "Radius of convergence of sum p_n z^n, from "
                            "the Bessel closed form"),
         "k1 z0", cmd_k1_z0);
    auto* k1mc = k1->add_subcommand("mc",
                                    "Monte Carlo check of the chain "
                                    "probabilities");
    k1mc->add_option("--n-chain", opt.n_chain, "Number of chain windows")
        ->required();
    bind(k1mc, "k1 mc", cmd_k1_mc);

    auto* lfm = app.add_subcommand("lfm", "Exhaustive landscape statistics");
    lfm->require_subcommand(1);
    lfm->fallthrough();
    bind(lfm->add_subcommand("count",
                             "Mean number of local maxima over sampled "
                             "landscapes (--samples landscapes)"),
         "lfm count", cmd_lfm_count);

    bind(app.add_subcommand("compare-dists",
                            "Estimate p(N,K) under all five distributions "
                            "against the fat-tail floor"),
         "compare-dists", cmd_compare_dists);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("nk");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (handler == nullptr)
            throw std::invalid_argument("no subcommand selected");

        // seed precedence: flag/config, then NK_SEED, then 0
        if (seed_opt->count() == 0) {
            if (const char* env = std::getenv("NK_SEED")) {
                opt.seed = parse_number<std::uint64_t>(env, "NK_SEED");
            }
        }

        const bool sweeping = !sweep_spec.empty();
        std::vector<Options> combos;
        if (sweeping) {
            const auto axes = parse_sweep(sweep_spec);
            std::vector<std::size_t> index(axes.size(), 0);
            bool exhausted = false;
            while (!exhausted) {
                Options combo = opt;
                for (std::size_t a = 0; a < axes.size(); ++a)
                    apply_override(combo, axes[a].name,
                                   axes[a].values[index[a]]);
                combos.push_back(combo);
                exhausted = true;
                for (std::size_t a = axes.size(); a-- > 0;) {
                    if (++index[a] < axes[a].values.size()) {
                        exhausted = false;
                        break;
                    }
                    index[a] = 0;
                }
            }
        } else {
            combos.push_back(opt);
        }

        const bool csv = format == "csv" || (sweeping && format != "json");
        json records = json::array();
        if (csv) out << kCsvHeader << '\n';
        for (const auto& combo : combos) {
            const auto start = std::chrono::steady_clock::now();
            const Outcome outcome = handler(combo);
            const auto elapsed =
                std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
            if (csv) {
                write_csv_rows(out, command, combo, outcome, elapsed);
            } else if (sweeping) {
                records.push_back(
                    run_record(command, combo, outcome, elapsed));
            } else {
                out << run_record(command, combo, outcome, elapsed).dump(2)
                    << '\n';
            }
        }
        if (!csv && sweeping) out << records.dump(2) << '\n';
        return 0;
    } catch (const infeasible_error& e) {
        err << "infeasible: " << e.what() << '\n';
        return 3;
    } catch (const numeric_error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace nk::cli
