#include "etamu/special_functions.hpp"

#include "etamu/errors.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace etamu {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kLargeArgument = 1000.0;
constexpr double kRescale = 1e250;

bool is_nonpositive_integer(double v) { return v <= 0.0 && std::floor(v) == v; }

// Stirling series for log Gamma, valid for |z| >= 15 off the negative axis.
std::complex<double> stirling_log_gamma(std::complex<double> z) {
    static constexpr double kCoef[] = {
        1.0 / 12.0,        -1.0 / 360.0,  1.0 / 1260.0, -1.0 / 1680.0,
        1.0 / 1188.0,      -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0,
    };
    const std::complex<double> inv = 1.0 / z;
    const std::complex<double> inv2 = inv * inv;
    std::complex<double> series = 0.0;
    std::complex<double> power = inv;
    for (double c : kCoef) {
        series += c * power;
        power *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series;
}

// A continuous logarithm of sin(pi z) on the closed upper half plane.
std::complex<double> log_sin_pi_upper(std::complex<double> z) {
    using namespace std::complex_literals;
    const std::complex<double> w = std::exp(2.0i * kPi * z);
    return -1.0i * kPi * z + std::complex<double>(-std::log(2.0), kPi / 2.0) + std::log(1.0 - w);
}

std::complex<double> log_gamma_right(std::complex<double> z) {
    std::complex<double> shift_logs = 0.0;
    while (std::abs(z) < 15.0) {
        shift_logs += std::log(z);
        z += 1.0;
    }
    return stirling_log_gamma(z) - shift_logs;
}

// Positive-argument friendly Taylor series for 1F1; x may have either sign
// but callers route large negative x through the Kummer transformation.
ScaledValue kummer_series(double a, double b, double x) {
    detail::CompensatedSum sum;
    double term = 1.0;
    double log_scale = 0.0;
    sum.add(term);
    int small_run = 0;
    constexpr long kMaxTerms = 50'000'000;
    for (long n = 0; n < kMaxTerms; ++n) {
        const double ratio = (a + n) * x / ((b + n) * (n + 1.0));
        term *= ratio;
        sum.add(term);
        if (term == 0.0) return {sum.value(), log_scale};
        if (std::abs(sum.value()) > kRescale) {
            sum.scale(1.0 / kRescale);
            term /= kRescale;
            log_scale += std::log(kRescale);
        }
        const bool past_peak = std::abs(ratio) < 1.0;
        if (past_peak && std::abs(term) <= 0.25 * kEps * std::abs(sum.value())) {
            if (++small_run >= 2) return {sum.value(), log_scale};
        } else {
            small_run = 0;
        }
    }
    throw ConvergenceError("kummer_1f1: series did not converge for x = " + std::to_string(x));
}

// Generates shell coefficients e_n of prod_i (1 - y_i z)^{-b_i} one at a time
// using n e_n = sum_{k<n} p_k e_{n-1-k}, p_k = sum_i b_i y_i^{k+1}.
class ShellGenerator {
public:
    ShellGenerator(std::span<const double> b, std::span<const double> y)
        : b_(b.begin(), b.end()), power_(y.begin(), y.end()), y_(y.begin(), y.end()) {
        e_.push_back(1.0);
    }

    double current() const { return e_.back(); }

    double advance() {
        double pk = 0.0;
        for (std::size_t i = 0; i < b_.size(); ++i) {
            pk += b_[i] * power_[i];
            power_[i] *= y_[i];
        }
        p_.push_back(pk);
        const std::size_t n = e_.size();
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += p_[k] * e_[n - 1 - k];
        e_.push_back(acc / static_cast<double>(n));
        return e_.back();
    }

private:
    std::vector<double> b_;
    std::vector<double> power_;
    std::vector<double> y_;
    std::vector<double> p_;
    std::vector<double> e_;
};

void check_same_size(std::span<const double> b, std::span<const double> x, const char* who) {
    if (b.empty()) throw DomainError(std::string(who) + ": at least one variable is required");
    if (b.size() != x.size())
        throw DomainError(std::string(who) + ": parameter and argument lists differ in length");
}

double fd_series(double a, std::span<const double> b, double c, std::span<const double> x) {
    const double rho = std::transform_reduce(x.begin(), x.end(), 0.0,
                                             [](double l, double r) { return std::max(l, r); },
                                             [](double v) { return std::abs(v); });
    if (rho >= 1.0) throw DomainError("lauricella_fd: series route requires max|x| < 1");
    ShellGenerator gen(b, x);
    detail::CompensatedSum sum;
    sum.add(1.0);
    double coef = 1.0;  // (a)_n / (c)_n
    int small_run = 0;
    for (int n = 1; n < 200000; ++n) {
        coef *= (a + n - 1) / (c + n - 1);
        const double term = coef * gen.advance();
        sum.add(term);
        if (std::abs(term) <= 0.25 * kEps * std::abs(sum.value()) && n > 4) {
            if (++small_run >= 3) return sum.value();
        } else {
            small_run = 0;
        }
    }
    throw ConvergenceError("lauricella_fd: series did not converge");
}

double fd_euler(double a, std::span<const double> b, double c, std::span<const double> x) {
    if (!(c > a && a > 0.0))
        throw DomainError("lauricella_fd: Euler integral requires c > a > 0");
    for (double xi : x)
        if (!(xi < 1.0)) throw DomainError("lauricella_fd: Euler integral requires all x_i < 1");

    const double gap = c - a;
    const double log_norm = std::lgamma(c) - std::lgamma(a) - std::lgamma(gap);
    auto log_product = [&](double t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) acc -= b[i] * std::log1p(-x[i] * t);
        return acc;
    };
    // Split at t = 1/2. On the left t = s^{1/a} absorbs t^{a-1}; on the right
    // 1 - t = r^{1/(c-a)} absorbs (1-t)^{c-a-1} (this is t = 1 - r^2 when
    // c - a = 1/2, the case of every modulation preset).
    auto left = [&](double s) {
        const double t = std::pow(s, 1.0 / a);
        return std::exp(log_norm + (gap - 1.0) * std::log1p(-t) + log_product(t)) / a;
    };
    auto right = [&](double r) {
        const double one_minus_t = std::pow(r, 1.0 / gap);
        const double t = 1.0 - one_minus_t;
        return std::exp(log_norm + (a - 1.0) * std::log(t) + log_product(t)) / gap;
    };
    boost::math::quadrature::tanh_sinh<double> integrator(15);
    double err_l = 0.0, err_r = 0.0, l1_l = 0.0, l1_r = 0.0;
    const double value = integrator.integrate(left, 0.0, std::pow(0.5, a), 1e-14, &err_l, &l1_l) +
                         integrator.integrate(right, 0.0, std::pow(0.5, gap), 1e-14, &err_r, &l1_r);
    const double error = err_l + err_r;
    if (!std::isfinite(value) || error > 1e-11 * std::max(l1_l + l1_r, 1e-300))
        throw ConvergenceError("lauricella_fd: Euler integral did not converge (error estimate " +
                               std::to_string(error) + ")");
    return value;
}

}  // namespace

namespace detail {

void CompensatedSum::add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
        comp_ += (sum_ - t) + v;
    else
        comp_ += (v - t) + sum_;
    sum_ = t;
}

std::vector<double> shell_coefficients(std::span<const double> b, std::span<const double> x,
                                       double scale, std::size_t count) {
    std::vector<double> y(x.begin(), x.end());
    for (double& v : y) v /= scale;
    ShellGenerator gen(b, y);
    std::vector<double> out;
    out.reserve(count);
    if (count == 0) return out;
    out.push_back(gen.current());
    while (out.size() < count) out.push_back(gen.advance());
    return out;
}

}  // namespace detail

void SeriesControls::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw DomainError("SeriesControls: tolerances must be positive");
    if (max_total_degree < 1) throw DomainError("SeriesControls: max_total_degree must be >= 1");
    if (max_terms < 1) throw DomainError("SeriesControls: max_terms must be >= 1");
}

double ScaledValue::value() const {
    if (mantissa == 0.0) return 0.0;
    return std::copysign(std::exp(std::log(std::abs(mantissa)) + log_scale), mantissa);
}

double ScaledValue::log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }

double pochhammer(double a, unsigned n) {
    if (n == 0) return 1.0;
    if (n <= 30) {
        double r = 1.0;
        for (unsigned k = 0; k < n; ++k) r *= a + k;
        return r;
    }
    if (is_nonpositive_integer(a) && -a < n) return 0.0;
    double head = 1.0;
    unsigned k = 0;
    while (a + k <= 0.0 && k < n) head *= a + k++;
    if (k == n) return head;
    return head * std::exp(std::lgamma(a + n) - std::lgamma(a + k));
}

std::complex<double> log_gamma(std::complex<double> z) {
    if (z.imag() == 0.0 && is_nonpositive_integer(z.real()))
        throw DomainError("log_gamma: pole at nonpositive integer " + std::to_string(z.real()));
    if (z.real() >= 0.5) return log_gamma_right(z);
    if (z.imag() < 0.0) return std::conj(log_gamma(std::conj(z)));
    return std::log(kPi) - log_sin_pi_upper(z) - log_gamma_right(1.0 - z);
}

// Leading asymptotic series for x -> +inf, without the e^x factor:
//   Gamma(b)/Gamma(a) x^(a-b) sum_k (b-a)_k (1-a)_k / k! x^-k.
// Returns false when the terms stop decreasing before reaching round-off.
bool kummer_large_x(double a, double b, double x, ScaledValue& out) {
    if (a <= 0.0 && std::floor(a) == a) return false;
    double sum = 1.0, term = 1.0;
    for (int k = 0; k < 200; ++k) {
        const double next = term * (b - a + k) * (1.0 - a + k) / ((k + 1.0) * x);
        if (std::abs(next) >= std::abs(term)) return false;
        term = next;
        sum += term;
        if (std::abs(term) <= 0.25 * kEps * std::abs(sum)) {
            int sign_a = 1, sign_b = 1;
            const double lga = boost::math::lgamma(a, &sign_a);
            const double lgb = boost::math::lgamma(b, &sign_b);
            out.mantissa = sign_a * sign_b * sum;
            out.log_scale = lgb - lga + (a - b) * std::log(x);
            return true;
        }
    }
    return false;
}

ScaledValue kummer_1f1_scaled(double a, double b, double x) {
    if (is_nonpositive_integer(b))
        throw DomainError("kummer_1f1: b must not be a nonpositive integer");
    if (x == 0.0) return {1.0, 0.0};
    if (a == b) return {1.0, x};
    ScaledValue asym;
    if (x < -kLargeArgument && kummer_large_x(b - a, b, -x, asym)) return asym;
    if (x < -1.0) {
        ScaledValue t = kummer_series(b - a, b, -x);
        t.log_scale += x;
        return t;
    }
    if (x > kLargeArgument && kummer_large_x(a, b, x, asym)) {
        asym.log_scale += x;
        return asym;
    }
    return kummer_series(a, b, x);
}

double kummer_1f1(double a, double b, double x) {
    const double v = kummer_1f1_scaled(a, b, x).value();
    if (!std::isfinite(v))
        throw OverflowError("kummer_1f1: result exceeds double range for x = " + std::to_string(x));
    return v;
}

SeriesResult humbert_phi2(std::span<const double> b, double c, std::span<const double> x,
                          const SeriesControls& ctl) {
    ctl.validate();
    check_same_size(b, x, "humbert_phi2");
    if (!(c > 0.0)) throw DomainError("humbert_phi2: c must be positive");

    std::vector<double> bb(b.begin(), b.end());
    std::vector<double> xx(x.begin(), x.end());
    double log_scale = 0.0;

    const auto min_it = std::min_element(xx.begin(), xx.end());
    detail::CompensatedSum gap_sum;
    gap_sum.add(c);
    double b_abs = 0.0;
    for (double v : bb) {
        gap_sum.add(-v);
        b_abs += std::abs(v);
    }
    // After the transformation the series depends on the new parameter
    // c - sum(b) with a weight of order exp(max|x|); a rounding-level gap
    // (the density series has c == sum(b) exactly) is snapped to zero.
    double gap = gap_sum.value();
    if (std::abs(gap) <= 64.0 * kEps * std::max(b_abs, c)) gap = 0.0;
    if (*min_it < 0.0 && gap >= 0.0) {
        const std::size_t j = static_cast<std::size_t>(min_it - xx.begin());
        const double xj = xx[j];
        for (std::size_t i = 0; i < xx.size(); ++i) xx[i] = (i == j) ? -xj : xx[i] - xj;
        bb[j] = gap;
        log_scale = xj;
    }

    double rho = 0.0;
    for (double v : xx) rho = std::max(rho, std::abs(v));
    SeriesResult result;
    if (rho == 0.0) {
        result.sum = {1.0, log_scale};
        result.converged = true;
        return result;
    }

    std::vector<double> y(xx);
    for (double& v : y) v /= rho;
    ShellGenerator gen(bb, y);

    detail::CompensatedSum sum;
    sum.add(1.0);
    double log_ratio = 0.0;  // log(rho^n / (c)_n)
    double offset = 0.0;     // sum is stored divided by exp(offset)
    int small_run = 0;
    long work = 0;
    const long per_shell = static_cast<long>(bb.size());
    for (int n = 1; n <= ctl.max_total_degree; ++n) {
        log_ratio += std::log(rho) - std::log(c + n - 1);
        const double e_n = gen.advance();
        double term = e_n * std::exp(log_ratio - offset);
        if (std::abs(term) > kRescale) {
            sum.scale(std::exp(offset - log_ratio));
            offset = log_ratio;
            term = e_n;
        }
        sum.add(term);
        work += per_shell + n;
        result.shells = n;
        const bool past_peak = rho < 0.9 * (c + n);
        const double tol = ctl.rel_tol * std::abs(sum.value()) + ctl.abs_tol;
        if (past_peak && std::abs(term) <= tol) {
            if (++small_run >= 3) {
                result.converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
        if (work > ctl.max_terms) break;
    }
    result.sum = {sum.value(), log_scale + offset};
    return result;
}

double lauricella_fd(double a, std::span<const double> b, double c, std::span<const double> x,
                     FdRoute route) {
    check_same_size(b, x, "lauricella_fd");
    if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) return 1.0;

    switch (route) {
        case FdRoute::series:
            return fd_series(a, b, c, x);
        case FdRoute::euler_integral:
            return fd_euler(a, b, c, x);
        case FdRoute::automatic:
            break;
    }
    if (std::abs(c - a) <= 1e-14 * std::abs(a)) {
        // F_D(a, b; a; x) = prod (1 - x_i)^{-b_i}
        double log_v = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (!(x[i] < 1.0)) throw DomainError("lauricella_fd: requires all x_i < 1");
            log_v -= b[i] * std::log1p(-x[i]);
        }
        return std::exp(log_v);
    }
    double rho = 0.0;
    for (double v : x) rho = std::max(rho, std::abs(v));
    if (rho < 0.5) return fd_series(a, b, c, x);
    return fd_euler(a, b, c, x);
}

}  // namespace etamu
