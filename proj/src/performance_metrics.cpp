#include "etamu/performance_metrics.hpp"

#include "etamu/contour.hpp"
#include "etamu/errors.hpp"
#include "etamu/special_functions.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace etamu {

namespace {

constexpr double kQuadTol = 1e-10;

struct Coeffs {
    std::vector<DerivedCoeffs> d;
    double total_mu = 0.0;
    double log_prefactor = 0.0;
    double min_rate = std::numeric_limits<double>::infinity();  // min over A, C
};

Coeffs coeffs_of(const MrcChannel& ch) {
    Coeffs c;
    for (const auto& b : ch.branches()) {
        const DerivedCoeffs d = derived_coeffs(b);
        c.total_mu += b.mu();
        c.log_prefactor += d.log_prefactor;
        c.min_rate = std::min({c.min_rate, d.a_coef, d.c_coef});
        c.d.push_back(d);
    }
    return c;
}

// Exponents and arguments of the 2L-variate F_D: (D.., B..) against (-C/z.., -A/z..).
void fd_arguments(const Coeffs& c, double z, std::vector<double>& b, std::vector<double>& x) {
    b.clear();
    x.clear();
    for (const auto& d : c.d) {
        b.push_back(d.d_coef);
        x.push_back(-d.c_coef / z);
    }
    for (const auto& d : c.d) {
        b.push_back(d.b_coef);
        x.push_back(-d.a_coef / z);
    }
}

// Gamma(A+s)^B Gamma(C+s)^D / (Gamma(1+A+s)^B Gamma(1+C+s)^D) for every branch.
GammaFactorProduct mgf_factors(const Coeffs& c) {
    GammaFactorProduct f;
    for (const auto& d : c.d) {
        f.numerator.push_back({d.a_coef, 1.0, d.b_coef});
        f.numerator.push_back({d.c_coef, 1.0, d.d_coef});
        f.denominator.push_back({1.0 + d.a_coef, 1.0, d.b_coef});
        f.denominator.push_back({1.0 + d.c_coef, 1.0, d.d_coef});
    }
    return f;
}

double line_integral(const GammaFactorProduct& f, double abscissa, const char* who) {
    const ContourResult r = foxh_hat(f, 0.0, ContourSpec::vertical_line(abscissa));
    if (!r.accurate)
        throw AccuracyError(std::string(who) + ": contour error estimate " +
                            std::to_string(r.error_estimate) + " exceeds tolerance (value " +
                            std::to_string(r.value) + ")");
    return r.value;
}

void check_quadrature(double value, double err, double l1, const char* who) {
    if (!std::isfinite(value) || err > 1e3 * kQuadTol * std::max(l1, 1e-300))
        throw ConvergenceError(std::string(who) + ": quadrature did not converge (error estimate " +
                               std::to_string(err) + ")");
}

// int_0^inf g, split at `split`.
template <class G>
double half_line(G g, double split, const char* who) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    double e1 = 0.0, e2 = 0.0, l1 = 0.0, l2 = 0.0;
    const double head = ts.integrate(g, 0.0, split, kQuadTol, &e1, &l1);
    const double tail =
        es.integrate([&](double u) { return g(split + u); }, 0.0,
                     std::numeric_limits<double>::infinity(), kQuadTol, &e2, &l2);
    check_quadrature(head + tail, e1 + e2, l1 + l2, who);
    return head + tail;
}

unsigned parse_order(std::string_view s) {
    unsigned m = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), m);
    if (ec != std::errc() || ptr != s.data() + s.size()) return 0;
    return m;
}

}  // namespace

void ModulationScheme::validate() const {
    if (!(beta > 0.0) || !(delta > 0.0) || !(zeta > 0.0) || !std::isfinite(beta) ||
        !std::isfinite(delta) || !std::isfinite(zeta))
        throw DomainError("ModulationScheme: beta, delta and zeta must be positive and finite");
}

ModulationScheme modulation_preset(std::string_view family, unsigned order) {
    const double m = order;
    auto need_order = [&] {
        if (order < 2)
            throw DomainError("modulation_preset: " + std::string(family) + " needs an order M >= 2");
    };
    if (family == "BFSK") return {0.5, 0.5, 0.5, "BFSK"};
    if (family == "BPSK") return {0.5, 1.0, 0.5, "BPSK"};
    if (family == "QPSK" || family == "4-PSK" || family == "4-QAM" || family == "4QAM")
        return {1.0, 0.5, 0.5, "QPSK"};
    if (family == "rect-MQAM") {
        need_order();
        const double r = std::round(std::sqrt(m));
        if (r * r != m) throw DomainError("modulation_preset: rect-MQAM needs a square order");
        return {2.0 * (r - 1.0) / r, 3.0 / (2.0 * (m - 1.0)), 0.5, "rect-MQAM(" + std::to_string(order) + ")"};
    }
    if (family == "nonrect-MQAM") {
        need_order();
        return {2.0, 3.0 / (2.0 * (m - 1.0)), 0.5, "nonrect-MQAM(" + std::to_string(order) + ")"};
    }
    if (family == "MPSK") {
        need_order();
        const double s = std::sin(std::numbers::pi / m);
        return {1.0, s * s, 0.5, "MPSK(" + std::to_string(order) + ")"};
    }
    if (family == "MPAM") {
        need_order();
        return {(m - 1.0) / m, 3.0 / (m * m - 1.0), 0.5, "MPAM(" + std::to_string(order) + ")"};
    }
    throw DomainError("modulation_preset: unknown modulation '" + std::string(family) + "'");
}

ModulationScheme parse_modulation(std::string_view label) {
    const auto open = label.find('(');
    if (open != std::string_view::npos && label.back() == ')') {
        const unsigned m = parse_order(label.substr(open + 1, label.size() - open - 2));
        if (m == 0) throw DomainError("parse_modulation: bad order in '" + std::string(label) + "'");
        return modulation_preset(label.substr(0, open), m);
    }
    const auto dash = label.find('-');
    if (dash != std::string_view::npos) {
        const unsigned m = parse_order(label.substr(0, dash));
        const std::string_view kind = label.substr(dash + 1);
        if (m == 4 && (kind == "QAM" || kind == "PSK")) return modulation_preset("QPSK");
        if (m != 0) {
            if (kind == "QAM") return modulation_preset("rect-MQAM", m);
            if (kind == "PSK") return modulation_preset("MPSK", m);
            if (kind == "PAM") return modulation_preset("MPAM", m);
        }
    }
    return modulation_preset(label);
}

void CapacityFit::validate() const {
    for (double d : deltas)
        if (!std::isfinite(d)) throw DomainError("CapacityFit: deltas must be finite");
    for (double s : sigmas)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw DomainError("CapacityFit: sigmas must be nonnegative and finite");
}

double CapacityFit::operator()(double snr) const {
    double v = 0.0;
    for (std::size_t k = 0; k < 4; ++k) v += deltas[k] * std::exp(-sigmas[k] * snr);
    return v;
}

double fit_error_bound(const CapacityFit& fit, double upper) {
    fit.validate();
    if (!(upper > 0.0)) throw DomainError("fit_error_bound: upper limit must be positive");
    auto err = [&](double x) { return std::abs(fit(x) - std::log2(1.0 + x)); };

    constexpr int n = 4000;
    std::vector<double> grid{0.0};
    const double lo = std::min(1e-6, upper);
    for (int i = 0; i <= n; ++i) grid.push_back(lo * std::pow(upper / lo, double(i) / n));
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        best = std::max(best, err(grid[i]));
        const bool interior_peak = i > 0 && i + 1 < grid.size() && err(grid[i]) >= err(grid[i - 1]) &&
                                   err(grid[i]) >= err(grid[i + 1]);
        if (!interior_peak) continue;
        const auto r = boost::math::tools::brent_find_minima(
            [&](double x) { return -err(x); }, grid[i - 1], grid[i + 1], 52);
        best = std::max(best, -r.second);
    }
    return best;
}

double outage(const MrcChannel& ch, double threshold, EvalRoute route, const EvalOptions& opts) {
    if (!(threshold > 0.0) || !std::isfinite(threshold))
        throw DomainError("outage: threshold must be positive and finite");
    return sum_cdf(ch, threshold, route, opts);
}

double ser_fd(const MrcChannel& ch, const ModulationScheme& mod) {
    mod.validate();
    const Coeffs c = coeffs_of(ch);
    const double a = c.total_mu + mod.zeta;
    const double cc = 1.0 + c.total_mu;
    if (!(cc > a)) throw DomainError("ser_fd: requires zeta < 1");
    std::vector<double> b, x;
    fd_arguments(c, mod.delta, b, x);
    const double fd = lauricella_fd(a, b, cc, x);
    const double log_scale = std::log(mod.beta) + std::lgamma(a) - c.total_mu * std::log(mod.delta) -
                             std::lgamma(mod.zeta) - std::lgamma(cc) + c.log_prefactor;
    return fd * std::exp(log_scale);
}

// beta/(2 pi i) int M(s) (1 - s/delta)^-zeta / s ds on 0 < Re s < delta, with
// (delta - s)^-zeta = Gamma(delta - s)^zeta / Gamma(1 + delta - s)^zeta and
// 1/s = Gamma(s)/Gamma(1+s).
double ser_foxh(const MrcChannel& ch, const ModulationScheme& mod) {
    mod.validate();
    const Coeffs c = coeffs_of(ch);
    GammaFactorProduct f = mgf_factors(c);
    f.numerator.push_back({mod.delta, -1.0, mod.zeta});
    f.denominator.push_back({1.0 + mod.delta, -1.0, mod.zeta});
    f.numerator.push_back({0.0, 1.0, 1.0});
    f.denominator.push_back({1.0, 1.0, 1.0});
    const double h = line_integral(f, 0.5 * mod.delta, "ser_foxh");
    return mod.beta * std::exp(c.log_prefactor + mod.zeta * std::log(mod.delta)) * h;
}

double ser_numint(const DistributionHook& cdf, const ModulationScheme& mod) {
    mod.validate();
    // x = delta * snr; on [0, 1] u = x^zeta absorbs the x^(zeta-1) endpoint.
    const double z = mod.zeta;
    auto head = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double x = std::pow(u, 1.0 / z);
        return std::exp(-x) * cdf(x / mod.delta) / z;
    };
    auto tail = [&](double x) {
        if (x > 745.0) return 0.0;
        return std::exp((z - 1.0) * std::log(x) - x) * cdf(x / mod.delta);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    double e1 = 0.0, e2 = 0.0, l1 = 0.0, l2 = 0.0;
    const double v = ts.integrate(head, 0.0, 1.0, kQuadTol, &e1, &l1) +
                     es.integrate([&](double u) { return tail(1.0 + u); }, 0.0,
                                  std::numeric_limits<double>::infinity(), kQuadTol, &e2, &l2);
    check_quadrature(v, e1 + e2, l1 + l2, "ser_numint");
    return mod.beta * v / std::tgamma(z);
}

double ser_numint(const MrcChannel& ch, const ModulationScheme& mod) {
    return ser_numint([&](double g) { return sum_cdf(ch, g); }, mod);
}

double asymptotic_ser(const MrcChannel& ch, const ModulationScheme& mod) {
    mod.validate();
    const double m = ch.total_mu();
    return std::exp(std::log(mod.beta) + std::lgamma(m + mod.zeta) - m * std::log(mod.delta) -
                    std::lgamma(mod.zeta) - std::lgamma(1.0 + m) + ch.log_prefactor());
}

// The sigma = 0 term is delta_k times the total probability.
double capacity_fd(const MrcChannel& ch, const CapacityFit& fit) {
    fit.validate();
    const Coeffs c = coeffs_of(ch);
    std::vector<double> b, x;
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double sigma = fit.sigmas[k];
        if (fit.deltas[k] == 0.0) continue;
        if (sigma == 0.0) {
            total += fit.deltas[k];
            continue;
        }
        fd_arguments(c, sigma, b, x);
        const double fd = lauricella_fd(c.total_mu, b, c.total_mu, x);
        total += fit.deltas[k] * fd * std::exp(c.log_prefactor - c.total_mu * std::log(sigma));
    }
    return total;
}

// (1/2 pi i) int M(s) / (sigma - s) ds on -min(A, C) < Re s < sigma.
double capacity_foxh(const MrcChannel& ch, const CapacityFit& fit) {
    fit.validate();
    const Coeffs c = coeffs_of(ch);
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double sigma = fit.sigmas[k];
        if (fit.deltas[k] == 0.0) continue;
        if (sigma == 0.0) {
            total += fit.deltas[k];
            continue;
        }
        GammaFactorProduct f = mgf_factors(c);
        f.numerator.push_back({sigma, -1.0, 1.0});
        f.denominator.push_back({1.0 + sigma, -1.0, 1.0});
        const double h = line_integral(f, 0.5 * (sigma - c.min_rate), "capacity_foxh");
        total += fit.deltas[k] * std::exp(c.log_prefactor) * h;
    }
    return total;
}

double capacity_numint(const DistributionHook& pdf, double scale, bool exact_log,
                       const CapacityFit& fit) {
    fit.validate();
    if (!(scale > 0.0)) throw DomainError("capacity_numint: scale must be positive");
    auto g = [&](double x) {
        const double f = pdf(x);
        if (f == 0.0) return 0.0;
        return (exact_log ? std::log2(1.0 + x) : fit(x)) * f;
    };
    return half_line(g, scale, "capacity_numint");
}

double capacity_numint(const MrcChannel& ch, bool exact_log, const CapacityFit& fit) {
    return capacity_numint([&](double g) { return sum_pdf(ch, g); }, ch.total_gbar(), exact_log,
                           fit);
}

}  // namespace etamu
