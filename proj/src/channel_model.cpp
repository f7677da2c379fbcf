#include "etamu/channel_model.hpp"

#include "etamu/errors.hpp"
#include "etamu/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace etamu {

namespace {

constexpr double kBranchPointGuard = 1e-9;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string("BranchParams: ") + name + " must be positive and finite");
}

void require_open_unit(double v, const char* name) {
    if (!(std::abs(v) < 1.0))
        throw DomainError(std::string("FormatIIParams: ") + name + " must lie in (-1, 1)");
}

void check_off_cut(std::complex<double> s, double a, double c) {
    const double lo = std::min(a, c);
    if (s.imag() == 0.0 && s.real() <= -lo)
        throw DomainError("branch_mgf: s lies on a branch cut of the MGF");
    for (double bp : {a, c}) {
        if (std::abs(s + bp) < kBranchPointGuard * std::max(1.0, bp))
            throw DomainError("branch_mgf: s is within 1e-9 of a branch point");
    }
}

}  // namespace

BranchParams::BranchParams(double mu, double eta, double p, double gbar)
    : mu_(mu), eta_(eta), p_(p), gbar_(gbar) {
    require_positive(mu, "mu");
    require_positive(eta, "eta");
    require_positive(p, "p");
    require_positive(gbar, "gbar");
}

FormatIIParams::FormatIIParams(double mu, double eta2, double p2, double gbar)
    : mu_(mu), eta2_(eta2), p2_(p2), gbar_(gbar) {
    require_positive(mu, "mu");
    require_positive(gbar, "gbar");
    require_open_unit(eta2, "eta2");
    require_open_unit(p2, "p2");
}

BranchParams format2_to_format1(const FormatIIParams& f2) {
    return {f2.mu(), (1.0 + f2.eta2()) / (1.0 - f2.eta2()), (1.0 + f2.p2()) / (1.0 - f2.p2()),
            f2.gbar()};
}

FormatIIParams format1_to_format2(const BranchParams& f1) {
    return {f1.mu(), (f1.eta() - 1.0) / (f1.eta() + 1.0), (f1.p() - 1.0) / (f1.p() + 1.0),
            f1.gbar()};
}

ComponentDecomposition decompose(const BranchParams& f1, double rhat2) {
    if (!(rhat2 > 0.0) || !std::isfinite(rhat2))
        throw DomainError("decompose: rhat2 must be positive and finite");
    const double mu = f1.mu(), eta = f1.eta(), p = f1.p();
    return {2.0 * mu * p / (1.0 + p), 2.0 * mu / (1.0 + p), 2.0 * eta * rhat2 / (1.0 + eta),
            2.0 * rhat2 / (1.0 + eta), rhat2};
}

DerivedCoeffs derived_coeffs(const BranchParams& f1) {
    const double mu = f1.mu(), eta = f1.eta(), p = f1.p(), gbar = f1.gbar();
    DerivedCoeffs d{};
    d.xi = (1.0 + eta) / (1.0 + p);
    d.a_coef = d.xi * mu / gbar;
    d.b_coef = mu / (1.0 + p);
    d.c_coef = p * d.xi * mu / (eta * gbar);
    d.d_coef = mu * p / (1.0 + p);
    d.log_prefactor = mu * (std::log(mu * d.xi / gbar) + p / (1.0 + p) * std::log(p / eta));
    d.prefactor = std::exp(d.log_prefactor);
    return d;
}

double branch_log_pdf(const BranchParams& f1, double snr) {
    if (!(snr >= 0.0) || !std::isfinite(snr))
        throw DomainError("branch_pdf: snr must be nonnegative and finite");
    const DerivedCoeffs d = derived_coeffs(f1);
    const double mu = f1.mu();
    if (snr == 0.0) {
        if (mu > 1.0) return -std::numeric_limits<double>::infinity();
        if (mu < 1.0) return std::numeric_limits<double>::infinity();
        return d.log_prefactor;
    }
    const ScaledValue hyp = kummer_1f1_scaled(d.d_coef, mu, (d.a_coef - d.c_coef) * snr);
    return d.log_prefactor - std::lgamma(mu) + (mu - 1.0) * std::log(snr) - d.a_coef * snr +
           hyp.log_abs();
}

double branch_pdf(const BranchParams& f1, double snr) {
    const double lp = branch_log_pdf(f1, snr);
    if (lp == std::numeric_limits<double>::infinity()) return lp;
    if (lp > std::log(std::numeric_limits<double>::max()))
        throw OverflowError("branch_pdf: density exceeds the double range");
    return std::exp(lp);
}

std::complex<double> branch_mgf(const BranchParams& f1, std::complex<double> s) {
    const DerivedCoeffs d = derived_coeffs(f1);
    check_off_cut(s, d.a_coef, d.c_coef);
    return std::exp(-d.b_coef * std::log(1.0 + s / d.a_coef) -
                    d.d_coef * std::log(1.0 + s / d.c_coef));
}

std::complex<double> mgf_gamma_ratio(const BranchParams& f1, std::complex<double> s) {
    const DerivedCoeffs d = derived_coeffs(f1);
    check_off_cut(s, d.a_coef, d.c_coef);
    for (double base : {d.a_coef, d.c_coef}) {
        const std::complex<double> w = base + s;
        if (w.imag() == 0.0 && w.real() <= 0.0 &&
            std::abs(w.real() - std::round(w.real())) < kBranchPointGuard)
            throw DomainError("mgf_gamma_ratio: s is at a Gamma pole");
    }
    const auto ratio = [&s](double base, double exponent) {
        return exponent * (log_gamma(base + s) - log_gamma(1.0 + base + s));
    };
    return std::exp(d.log_prefactor + ratio(d.a_coef, d.b_coef) + ratio(d.c_coef, d.d_coef));
}

}  // namespace etamu
