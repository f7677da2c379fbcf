#include "etamu/monte_carlo.hpp"

#include "etamu/errors.hpp"

#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/special_functions/gamma.hpp>
// pchip.hpp uses isnan unqualified; fpclassify.hpp must come first
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <thread>

namespace etamu {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

double gamma_draw(double shape, double scale, CounterStream& stream) {
    std::gamma_distribution<double> g(shape, scale);
    return g(stream);
}

// Each gamma component keeps its shape and gains rate `tilt`.
double sample_tilted_sum(const MrcChannel& ch, double tilt, CounterStream& stream) {
    double s = 0.0;
    for (const auto& b : ch.branches()) {
        const DerivedCoeffs d = derived_coeffs(b);
        s += gamma_draw(d.b_coef, 1.0 / (d.a_coef + tilt), stream) +
             gamma_draw(d.d_coef, 1.0 / (d.c_coef + tilt), stream);
    }
    return s;
}

// log E[exp(-tilt * gamma)]
double log_mgf(const MrcChannel& ch, double tilt) {
    double v = 0.0;
    for (const auto& b : ch.branches()) {
        const DerivedCoeffs d = derived_coeffs(b);
        v -= d.b_coef * std::log1p(tilt / d.a_coef) + d.d_coef * std::log1p(tilt / d.c_coef);
    }
    return v;
}

// Q(a, x) e^x without underflow.
double scaled_gamma_q(double a, double x) {
    if (x <= 700.0) return boost::math::gamma_q(a, x) * std::exp(x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
        term *= (a - k) / x;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::exp((a - 1.0) * std::log(x) - std::lgamma(a)) * sum;
}

template <class F>
std::vector<double> per_replica(const SimConfig& cfg, F draw) {
    cfg.validate();
    std::vector<double> out(cfg.replicas);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            CounterStream stream(cfg.seed, r);
            out[r] = draw(stream);
        }
    };
    const std::size_t workers = std::min<std::size_t>(cfg.stream_count, cfg.replicas);
    if (workers <= 1) {
        work(0, cfg.replicas);
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (cfg.replicas + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk, end = std::min(cfg.replicas, begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
    return out;
}

McEstimate from_moments(double sum, double sum_sq, std::size_t n) {
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    return {mean, 1.959963984540054 * std::sqrt(var / n)};
}

}  // namespace

void SimConfig::validate() const {
    if (replicas < 1) throw DomainError("SimConfig: replicas must be at least 1");
    if (stream_count < 1) throw DomainError("SimConfig: stream_count must be at least 1");
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t replica)
    : key_(mix64(mix64(seed) ^ (replica * kGolden + 1))) {}

CounterStream::result_type CounterStream::operator()() {
    return mix64(key_ + kGolden * ++counter_);
}

double sample_branch(const BranchParams& f1, CounterStream& stream) {
    const DerivedCoeffs d = derived_coeffs(f1);
    return gamma_draw(d.b_coef, 1.0 / d.a_coef, stream) +
           gamma_draw(d.d_coef, 1.0 / d.c_coef, stream);
}

double sample_sum(const MrcChannel& ch, CounterStream& stream) {
    double s = 0.0;
    for (const auto& b : ch.branches()) s += sample_branch(b, stream);
    return s;
}

std::vector<double> sample_sums(const MrcChannel& ch, const SimConfig& cfg) {
    return per_replica(cfg, [&](CounterStream& stream) { return sample_sum(ch, stream); });
}

McEstimate sample_mean(const std::vector<double>& draws,
                       const std::function<double(double)>& kernel) {
    if (draws.empty()) throw DomainError("sample_mean: no draws");
    double sum = 0.0, sum_sq = 0.0;
    for (double x : draws) {
        const double k = kernel(x);
        sum += k;
        sum_sq += k * k;
    }
    return from_moments(sum, sum_sq, draws.size());
}

McEstimate estimate_outage(const std::vector<double>& draws, double threshold) {
    if (!(threshold >= 0.0)) throw DomainError("estimate_outage: threshold must be nonnegative");
    if (draws.empty()) throw DomainError("estimate_outage: no draws");
    const double n = draws.size();
    const double hits = std::count_if(draws.begin(), draws.end(),
                                      [&](double x) { return x <= threshold; });
    const double p = hits / n;
    // Wilson score interval: stays informative when no draw falls below the threshold
    constexpr double z = 1.959963984540054;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / (1.0 + z * z / n);
    return {p, half};
}

McEstimate estimate_ser(const std::vector<double>& draws, const ModulationScheme& mod) {
    mod.validate();
    return sample_mean(draws, [&](double x) {
        return mod.beta * boost::math::gamma_q(mod.zeta, mod.delta * x);
    });
}

McEstimate estimate_capacity(const std::vector<double>& draws, bool exact_log,
                             const CapacityFit& fit) {
    fit.validate();
    return sample_mean(draws, [&](double x) { return exact_log ? std::log2(1.0 + x) : fit(x); });
}

McEstimate estimate_outage(const MrcChannel& ch, double threshold, const SimConfig& cfg) {
    return estimate_outage(sample_sums(ch, cfg), threshold);
}

McEstimate estimate_ser(const MrcChannel& ch, const ModulationScheme& mod, const SimConfig& cfg) {
    mod.validate();
    const double scale = mod.beta * std::exp(log_mgf(ch, mod.delta));
    const auto draws = per_replica(cfg, [&](CounterStream& stream) {
        return sample_tilted_sum(ch, mod.delta, stream);
    });
    return sample_mean(draws, [&](double x) { return scale * scaled_gamma_q(mod.zeta, mod.delta * x); });
}

McEstimate estimate_capacity(const MrcChannel& ch, const SimConfig& cfg, bool exact_log,
                             const CapacityFit& fit) {
    return estimate_capacity(sample_sums(ch, cfg), exact_log, fit);
}

double ks_statistic(std::vector<double> draws, const std::function<double(double)>& cdf,
                    std::size_t exact_limit) {
    if (draws.empty()) throw DomainError("ks_statistic: no draws");
    std::sort(draws.begin(), draws.end());
    const std::size_t n = draws.size();

    std::function<double(double)> f = cdf;
    if (n > exact_limit && exact_limit >= 4) {
        std::vector<double> xs, ys;
        for (std::size_t j = 0; j < exact_limit; ++j) {
            const double x = draws[j * (n - 1) / (exact_limit - 1)];
            if (!xs.empty() && x <= xs.back()) continue;
            xs.push_back(x);
            ys.push_back(cdf(x));
        }
        if (xs.size() >= 4) {
            auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
                std::move(xs), std::move(ys));
            f = [spline](double x) { return (*spline)(x); };
        }
    }
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = f(draws[i]);
        d = std::max({d, v - double(i) / n, double(i + 1) / n - v});
    }
    return d;
}

double ks_critical_99(std::size_t n) {
    const double r = std::sqrt(static_cast<double>(n));
    return 1.6276 / (r + 0.12 + 0.11 / r);
}

}  // namespace etamu
