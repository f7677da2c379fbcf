#include "etamu/contour.hpp"

#include "etamu/errors.hpp"
#include "etamu/special_functions.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace etamu {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

struct RawSum {
    double value = 0.0;
    double l1 = 0.0;
};

// Optimized cotangent contour z(theta) = N (a theta cot(alpha theta) + b + i c theta),
// midpoint rule on (-pi, pi); conjugate symmetry halves the work.
RawSum talbot_sum(const LaplaceFunction& g, double t, int n) {
    constexpr double a = 0.5017, alpha = 0.6407, b = -0.6122, c = 0.2645;
    const double h = 2.0 * kPi / n;
    double acc = 0.0, l1 = 0.0;
    for (int k = 0; k < n / 2; ++k) {
        const double theta = (k + 0.5) * h;
        const double sn = std::sin(alpha * theta);
        const double cot = std::cos(alpha * theta) / sn;
        const cplx z = double(n) * cplx(a * theta * cot + b, c * theta);
        const cplx dz = double(n) * cplx(a * cot - a * alpha * theta / (sn * sn), c);
        const cplx w = std::exp(z) * g(z / t) * dz;
        acc += w.imag();
        l1 += std::abs(w);
    }
    const double scale = h / (t * kPi);
    return {acc * scale, l1 * scale};
}

// Reference node count for the error estimate. Round-off in the cotangent rule
// grows like exp(0.17 N), so a full doubling would mostly measure round-off.
int refined_nodes(int n) { return n + 2 * ((n + 3) / 4); }

// Double-exponential (exp-sinh) trapezoid for (1/pi) int_0^inf Re g(c + i y) dy.
struct ExpSinh {
    double fine = 0.0;
    double coarse = 0.0;
    double l1 = 0.0;
};

ExpSinh exp_sinh_line(const LaplaceFunction& g, double c, double kappa, int n) {
    constexpr double U = 5.0;
    const double h = 2.0 * U / n;
    double fine = 0.0, coarse = 0.0, l1 = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double u = -U + k * h;
        const double y = kappa * std::exp(0.5 * kPi * std::sinh(u));
        const double w = y * 0.5 * kPi * std::cosh(u);
        const double v = w * g(cplx(c, y)).real();
        if (!std::isfinite(v)) continue;
        fine += v;
        if (k % 2 == 0) coarse += v;
        l1 += std::abs(v);
    }
    return {fine * h / kPi, coarse * 2.0 * h / kPi, l1 * h / kPi};
}

struct Extrapolated {
    double value;
    double error;
};

// Wynn epsilon algorithm on a sequence of partial sums.
Extrapolated wynn_epsilon(const std::vector<double>& s) {
    const std::size_t n = s.size();
    if (n < 3) return {s.back(), std::numeric_limits<double>::infinity()};
    std::vector<double> prev(n + 1, 0.0);  // eps_{k-1}
    std::vector<double> cur(s.begin(), s.end());
    double best = s.back();
    double best_prev = s[n - 2];
    for (std::size_t k = 1; cur.size() > 1; ++k) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double diff = cur[i + 1] - cur[i];
            if (diff == 0.0) return {cur[i + 1], std::abs(best - best_prev)};
            next[i] = prev[i + 1] + 1.0 / diff;
        }
        prev = cur;
        cur = next;
        if (k % 2 == 0 && cur.size() >= 2) {
            best_prev = cur[cur.size() - 2];
            best = cur.back();
        } else if (k % 2 == 0 && cur.size() == 1) {
            best_prev = best;
            best = cur.back();
        }
    }
    return {best, std::abs(best - best_prev)};
}

ContourResult oscillatory_line(const LaplaceFunction& g, double t, const ContourSpec& spec) {
    const double c = spec.abscissa;
    auto integrand = [&](double y) {
        const cplx s(c, y);
        return (g(s) * std::exp(t * s)).real() / kPi;
    };
    const double width = kPi / t;
    std::vector<double> partial;
    double running = 0.0, gk_error = 0.0;
    Extrapolated est{0.0, std::numeric_limits<double>::infinity()};
    int settled = 0;
    for (int j = 0;; ++j) {
        const double lo = j * width, hi = (j + 1) * width;
        if (lo > spec.truncation_height) break;
        double err = 0.0;
        running += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi,
                                                                                  12, 1e-14, &err);
        gk_error += err;
        partial.push_back(running);
        if (partial.size() < 6) continue;
        const Extrapolated next = wynn_epsilon(partial);
        const double change = std::abs(next.value - est.value);
        est = next;
        if (change <= 0.1 * spec.tolerance * std::abs(est.value)) {
            if (++settled >= 3) break;
        } else {
            settled = 0;
        }
        if (partial.size() > 400) break;
    }
    ContourResult r;
    r.value = est.value;
    r.error_estimate = std::max(est.error, gk_error);
    r.accurate = std::isfinite(r.value) && r.error_estimate <= spec.tolerance * std::abs(r.value);
    return r;
}

bool is_integer(double v) { return std::floor(v) == v; }

enum class Singularity { none, poles, branch };

Singularity singularity_kind(const GammaFactor& f, bool numerator) {
    if (!is_integer(f.exponent)) return Singularity::branch;
    if (f.exponent == 0.0) return Singularity::none;
    const bool has_poles = numerator ? f.exponent > 0.0 : f.exponent < 0.0;
    return has_poles ? Singularity::poles : Singularity::none;
}

void check_contour_fit(const GammaFactorProduct& factors, const ContourSpec& spec) {
    auto check = [&](const GammaFactor& f, bool numerator) {
        const Singularity kind = singularity_kind(f, numerator);
        if (kind == Singularity::none) return;
        if (spec.method == ContourMethod::fixed_talbot) {
            if (!(f.scale > 0.0 && f.shift.imag() == 0.0 && f.shift.real() >= 0.0))
                throw DomainError(
                    "foxh_hat: Talbot contour requires every singularity on the negative real axis");
            return;
        }
        const cplx w = f.shift + f.scale * spec.abscissa;
        if (kind == Singularity::branch) {
            if (!(w.real() > 0.0))
                throw DomainError("foxh_hat: vertical line crosses a branch cut of a Gamma factor");
        } else if (w.imag() == 0.0 && w.real() <= 0.0 &&
                   std::abs(w.real() - std::round(w.real())) < 1e-9) {
            throw DomainError("foxh_hat: vertical line passes through a Gamma pole");
        }
    };
    for (const auto& f : factors.numerator) check(f, true);
    for (const auto& f : factors.denominator) check(f, false);
}

}  // namespace

ContourSpec ContourSpec::talbot(int nodes, double tolerance) {
    ContourSpec s;
    s.method = ContourMethod::fixed_talbot;
    s.node_count = nodes;
    s.tolerance = tolerance;
    return s;
}

ContourSpec ContourSpec::vertical_line(double abscissa, int nodes, double tolerance) {
    ContourSpec s;
    s.method = ContourMethod::vertical_line;
    s.abscissa = abscissa;
    s.node_count = nodes;
    s.tolerance = tolerance;
    return s;
}

void ContourSpec::validate() const {
    if (node_count < 8) throw DomainError("ContourSpec: node_count must be at least 8");
    if (method == ContourMethod::fixed_talbot && max_node_count < node_count)
        throw DomainError("ContourSpec: max_node_count must be at least node_count");
    if (!(tolerance > 0.0)) throw DomainError("ContourSpec: tolerance must be positive");
    if (method == ContourMethod::fixed_talbot && node_count % 2 != 0)
        throw DomainError("ContourSpec: Talbot node_count must be even");
    if (!std::isfinite(shift)) throw DomainError("ContourSpec: shift must be finite");
    if (method == ContourMethod::vertical_line) {
        if (!std::isfinite(abscissa)) throw DomainError("ContourSpec: abscissa must be finite");
        if (!(truncation_height > 0.0))
            throw DomainError("ContourSpec: truncation_height must be positive");
    }
}

ContourResult bromwich_invert(const LaplaceFunction& transform, double t, bool divide_by_s,
                              const ContourSpec& contour) {
    contour.validate();
    if (!std::isfinite(t)) throw DomainError("bromwich_invert: t must be finite");
    const LaplaceFunction g = divide_by_s
                                  ? LaplaceFunction([&](cplx s) { return transform(s) / s; })
                                  : transform;

    if (contour.method == ContourMethod::fixed_talbot) {
        if (!(t > 0.0)) throw DomainError("bromwich_invert: Talbot contour requires t > 0");
        const double sigma = contour.shift;
        if (divide_by_s && sigma < 0.0)
            throw DomainError("bromwich_invert: the pole at s = 0 must lie left of the contour origin");
        const LaplaceFunction moved =
            sigma == 0.0 ? g : LaplaceFunction([&](cplx s) { return g(s + sigma); });
        const double growth = std::exp(sigma * t);
        ContourResult best;
        best.error_estimate = std::numeric_limits<double>::infinity();
        for (int n = contour.node_count;; n *= 2) {
            const RawSum base = talbot_sum(moved, t, n);
            const RawSum refined = talbot_sum(moved, t, refined_nodes(n));
            ContourResult r;
            r.value = growth * base.value;
            r.error_estimate = growth * std::abs(base.value - refined.value);
            r.accurate = std::isfinite(r.value) &&
                         r.error_estimate <= contour.tolerance * std::abs(r.value);
            if (std::isfinite(r.value) && !(r.error_estimate >= best.error_estimate)) best = r;
            if (r.accurate || 2 * n > contour.max_node_count) break;
        }
        return best;
    }

    if (t < 0.0) throw DomainError("bromwich_invert: vertical line requires t >= 0");
    if (divide_by_s && !(contour.abscissa > 0.0))
        throw DomainError("bromwich_invert: the pole at s = 0 must lie left of the vertical line");
    if (t > 0.0) return oscillatory_line(g, t, contour);

    const double kappa = contour.abscissa != 0.0 ? std::abs(contour.abscissa) : 1.0;
    const int max_nodes = std::max(contour.node_count, contour.max_node_count);
    ContourResult r;
    for (int n = contour.node_count;; n *= 2) {
        const ExpSinh q = exp_sinh_line(g, contour.abscissa, kappa, n);
        r.value = q.fine;
        r.error_estimate = std::max(std::abs(q.fine - q.coarse),
                                    16.0 * std::numeric_limits<double>::epsilon() * q.l1);
        r.accurate =
            std::isfinite(r.value) && r.error_estimate <= contour.tolerance * std::abs(r.value);
        if (r.accurate || 2 * n > max_nodes) break;
    }
    return r;
}

void GammaFactorProduct::validate() const {
    if (empty()) throw DomainError("foxh_hat: the Gamma product needs at least one factor");
    auto check = [](const GammaFactor& f) {
        if (f.scale == 0.0 || !std::isfinite(f.scale))
            throw DomainError("GammaFactorProduct: scales must be nonzero and finite");
        if (!std::isfinite(f.exponent))
            throw DomainError("GammaFactorProduct: exponents must be finite");
        if (!std::isfinite(f.shift.real()) || !std::isfinite(f.shift.imag()))
            throw DomainError("GammaFactorProduct: shifts must be finite");
    };
    for (const auto& f : numerator) check(f);
    for (const auto& f : denominator) check(f);
}

std::complex<double> GammaFactorProduct::log_eval(std::complex<double> s) const {
    // Gamma(z)/Gamma(z+n) = 1/(z (z+1) ... (z+n-1)); far out on a contour the
    // two log-gammas are huge and their difference would be lost.
    constexpr int kMaxPairGap = 8;
    std::vector<bool> used(denominator.size(), false);
    cplx acc = 0.0;
    for (const auto& f : numerator) {
        const cplx z = f.shift + f.scale * s;
        bool paired = false;
        for (std::size_t j = 0; j < denominator.size() && !paired; ++j) {
            const auto& g = denominator[j];
            if (used[j] || g.scale != f.scale || g.exponent != f.exponent) continue;
            const cplx gap = g.shift - f.shift;
            const double n = std::round(gap.real());
            if (gap.imag() != 0.0 || n < 1.0 || n > kMaxPairGap ||
                std::abs(gap.real() - n) > 1e-14 * std::max(1.0, std::abs(f.shift.real())))
                continue;
            if (z.imag() == 0.0 && z.real() <= 0.0 && is_integer(z.real()))
                throw DomainError("log_gamma: pole at nonpositive integer " +
                                  std::to_string(z.real()));
            cplx logs = 0.0;
            for (int k = 0; k < static_cast<int>(n); ++k) logs += std::log(z + double(k));
            acc -= f.exponent * logs;
            used[j] = paired = true;
        }
        if (!paired) acc += f.exponent * log_gamma(z);
    }
    for (std::size_t j = 0; j < denominator.size(); ++j)
        if (!used[j])
            acc -= denominator[j].exponent * log_gamma(denominator[j].shift + denominator[j].scale * s);
    return acc;
}

GammaFactorProduct GammaFactorProduct::from_hhat(std::size_t m, std::size_t n,
                                                 std::span<const HhatTriple> upper,
                                                 std::span<const HhatTriple> lower) {
    if (m > lower.size() || n > upper.size())
        throw DomainError("from_hhat: m, n exceed the number of parameter triples");
    GammaFactorProduct out;
    for (std::size_t j = 0; j < lower.size(); ++j) {
        const auto& b = lower[j];
        if (j < m)
            out.numerator.push_back({b.a, -b.scale, b.exponent});
        else
            out.denominator.push_back({1.0 - b.a, b.scale, b.exponent});
    }
    for (std::size_t j = 0; j < upper.size(); ++j) {
        const auto& a = upper[j];
        if (j < n)
            out.numerator.push_back({1.0 - a.a, a.scale, a.exponent});
        else
            out.denominator.push_back({a.a, -a.scale, a.exponent});
    }
    return out;
}

ContourResult foxh_hat(const GammaFactorProduct& factors, double log_z, const ContourSpec& contour) {
    factors.validate();
    contour.validate();
    check_contour_fit(factors, contour);
    const LaplaceFunction integrand = [&factors](cplx s) { return std::exp(factors.log_eval(s)); };
    return bromwich_invert(integrand, log_z, false, contour);
}

}  // namespace etamu
