#include "etamu/sum_statistics.hpp"

#include "etamu/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace etamu {

namespace {

constexpr double kClampBand = 1e-7;

std::vector<DerivedCoeffs> coeffs_of(const MrcChannel& ch) {
    std::vector<DerivedCoeffs> out;
    out.reserve(ch.size());
    for (const auto& b : ch.branches()) out.push_back(derived_coeffs(b));
    return out;
}

LaplaceFunction mgf_of(const std::vector<DerivedCoeffs>& cs) {
    return [cs](std::complex<double> s) {
        std::complex<double> acc = 0.0;
        for (const auto& d : cs)
            acc -= d.b_coef * std::log(1.0 + s / d.a_coef) + d.d_coef * std::log(1.0 + s / d.c_coef);
        return std::exp(acc);
    };
}

double max_argument(const std::vector<DerivedCoeffs>& cs, double snr) {
    double m = 0.0;
    for (const auto& d : cs) m = std::max({m, d.a_coef * snr, d.c_coef * snr});
    return m;
}

// prod(P) snr^{c-1} / Gamma(c) * Phi2(D.., B..; c; -C snr.., -A snr..) with c = sum(mu) + shift.
Evaluation phi2_route(const MrcChannel& ch, const std::vector<DerivedCoeffs>& cs, double snr,
                      double shift, const SeriesControls& ctl) {
    std::vector<double> b, x;
    for (const auto& d : cs) {
        b.push_back(d.d_coef);
        x.push_back(-d.c_coef * snr);
    }
    for (const auto& d : cs) {
        b.push_back(d.b_coef);
        x.push_back(-d.a_coef * snr);
    }
    const double c = ch.total_mu() + shift;
    const SeriesResult r = humbert_phi2(b, c, x, ctl);
    if (!r.converged)
        throw ConvergenceError("multivariate series did not converge within " +
                               std::to_string(r.shells) + " shells at snr = " + std::to_string(snr));
    if (r.sum.mantissa <= 0.0)
        throw AccuracyError("multivariate series lost all significance at snr = " +
                            std::to_string(snr));
    const double log_value =
        ch.log_prefactor() + (c - 1.0) * std::log(snr) - std::lgamma(c) + r.sum.log_abs();
    Evaluation e;
    e.value = std::exp(log_value);
    e.error_estimate = 4.0 * ctl.rel_tol * e.value;
    e.route = EvalRoute::phi2_series;
    return e;
}

std::string contour_failure(const ContourResult& r, double snr) {
    return "contour inversion error estimate " + std::to_string(r.error_estimate) +
           " exceeds tolerance at snr = " + std::to_string(snr) + " (value " +
           std::to_string(r.value) + ")";
}

// Root of sum B/(A+s) + D/(C+s) = snr on (-min(A, C), inf): the saddle point
// of e^{snr s} M(s).
double saddle_point(const std::vector<DerivedCoeffs>& cs, double snr) {
    double lo = std::numeric_limits<double>::infinity();
    double mu = 0.0;
    for (const auto& d : cs) {
        lo = std::min({lo, d.a_coef, d.c_coef});
        mu += d.b_coef + d.d_coef;
    }
    lo = -lo;
    auto excess = [&](double s) {
        double v = -snr;
        for (const auto& d : cs) v += d.b_coef / (d.a_coef + s) + d.d_coef / (d.c_coef + s);
        return v;
    };
    double hi = std::min(mu / snr, std::numeric_limits<double>::max());  // excess(hi) <= 0
    if (excess(0.0) > 0.0) {
        // root in (0, hi]; walk down by halving so tiny snr needs few steps
        lo = hi;
        while (excess(lo) <= 0.0) {
            hi = lo;
            lo *= 0.5;
        }
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * (std::abs(lo) + std::abs(hi)); ++i) {
        const double mid = lo + 0.5 * (hi - lo);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return lo + 0.5 * (hi - lo);
}

ContourResult invert(const std::vector<DerivedCoeffs>& cs, double snr, bool cdf,
                     const ContourSpec& contour) {
    ContourSpec c = contour;
    if (c.method == ContourMethod::fixed_talbot && c.shift == 0.0) {
        const double sigma = saddle_point(cs, snr);
        c.shift = cdf ? std::max(sigma, 0.0) : sigma;
    }
    return bromwich_invert(mgf_of(cs), snr, cdf, c);
}

Evaluation bromwich_route(const std::vector<DerivedCoeffs>& cs, double snr, bool cdf,
                          const ContourSpec& contour) {
    const ContourResult r = invert(cs, snr, cdf, contour);
    if (!r.accurate) throw AccuracyError(contour_failure(r, snr));
    return {r.value, r.error_estimate, EvalRoute::bromwich, false};
}

Evaluation dispatch(const MrcChannel& ch, double snr, bool cdf, EvalRoute route,
                    const EvalOptions& opts) {
    const auto cs = coeffs_of(ch);
    const double shift = cdf ? 1.0 : 0.0;
    switch (route) {
        case EvalRoute::phi2_series:
            return phi2_route(ch, cs, snr, shift, opts.series);
        case EvalRoute::bromwich:
            return bromwich_route(cs, snr, cdf, opts.contour);
        case EvalRoute::automatic:
            break;
    }
    const bool series_first = ch.size() <= opts.auto_max_branches &&
                              max_argument(cs, snr) <= opts.auto_argument_limit;
    if (series_first) {
        try {
            return phi2_route(ch, cs, snr, shift, opts.series);
        } catch (const std::runtime_error&) {
            return bromwich_route(cs, snr, cdf, opts.contour);
        }
    }
    const ContourResult r = invert(cs, snr, cdf, opts.contour);
    if (r.accurate) return {r.value, r.error_estimate, EvalRoute::bromwich, false};
    try {
        return phi2_route(ch, cs, snr, shift, opts.series);
    } catch (const std::runtime_error&) {
    }
    // Far tails: neither route resolves the value relative to itself, but the
    // contour result is still accurate on the scale of the distribution.
    const double natural = cdf ? 1.0 : 1.0 / ch.total_gbar();
    if (std::isfinite(r.value) && r.error_estimate <= opts.contour.tolerance * natural) {
        const double v = cdf ? r.value : std::max(r.value, 0.0);
        return {v, r.error_estimate, EvalRoute::bromwich, false};
    }
    throw AccuracyError(contour_failure(r, snr));
}

Evaluation clamp_cdf(Evaluation e, double snr) {
    if (e.value < 0.0) {
        if (e.value < -kClampBand)
            throw AccuracyError("CDF evaluated to " + std::to_string(e.value) + " at snr = " +
                                std::to_string(snr));
        e.value = 0.0;
        e.clamped = true;
    } else if (e.value > 1.0) {
        if (e.value > 1.0 + kClampBand)
            throw AccuracyError("CDF evaluated to " + std::to_string(e.value) + " at snr = " +
                                std::to_string(snr));
        e.value = 1.0;
        e.clamped = true;
    }
    return e;
}

void require_snr(double snr, const char* who) {
    if (!(snr >= 0.0) || !std::isfinite(snr))
        throw DomainError(std::string(who) + ": snr must be nonnegative and finite");
}

double iid_series(const BranchParams& branch, std::size_t count, double snr, double shift,
                  const SeriesControls& ctl) {
    if (count < 1) throw DomainError("iid sum: branch count must be at least 1");
    const DerivedCoeffs d = derived_coeffs(branch);
    const double n = static_cast<double>(count);
    const double c = n * branch.mu() + shift;
    const double b[2] = {n * d.d_coef, n * d.b_coef};
    const double x[2] = {-d.c_coef * snr, -d.a_coef * snr};
    const SeriesResult r = humbert_phi2(b, c, x, ctl);
    if (!r.converged)
        throw ConvergenceError("bivariate series did not converge at snr = " + std::to_string(snr));
    return std::exp(n * d.log_prefactor + (c - 1.0) * std::log(snr) - std::lgamma(c) +
                    r.sum.log_abs());
}

}  // namespace

MrcChannel::MrcChannel(std::vector<BranchParams> branches) : branches_(std::move(branches)) {
    if (branches_.empty()) throw DomainError("MrcChannel: at least one branch is required");
}

MrcChannel MrcChannel::iid(const BranchParams& branch, std::size_t count) {
    return MrcChannel(std::vector<BranchParams>(count, branch));
}

double MrcChannel::total_mu() const {
    double s = 0.0;
    for (const auto& b : branches_) s += b.mu();
    return s;
}

double MrcChannel::total_gbar() const {
    double s = 0.0;
    for (const auto& b : branches_) s += b.gbar();
    return s;
}

double MrcChannel::log_prefactor() const {
    double s = 0.0;
    for (const auto& b : branches_) s += derived_coeffs(b).log_prefactor;
    return s;
}

MrcChannel MrcChannel::with_common_gbar(double gbar) const {
    std::vector<BranchParams> out;
    for (const auto& b : branches_) out.push_back(b.with_gbar(gbar));
    return MrcChannel(std::move(out));
}

MrcChannel MrcChannel::scaled(double factor) const {
    std::vector<BranchParams> out;
    for (const auto& b : branches_) out.push_back(b.with_gbar(b.gbar() * factor));
    return MrcChannel(std::move(out));
}

std::complex<double> sum_mgf(const MrcChannel& ch, std::complex<double> s) {
    std::complex<double> acc = 1.0;
    for (const auto& b : ch.branches()) acc *= branch_mgf(b, s);
    return acc;
}

Evaluation sum_pdf_eval(const MrcChannel& ch, double snr, EvalRoute route,
                        const EvalOptions& opts) {
    require_snr(snr, "sum_pdf");
    if (snr == 0.0) {
        const double m = ch.total_mu();
        if (m < 1.0) throw DomainError("sum_pdf: the density diverges at 0 when sum(mu) < 1");
        return {m > 1.0 ? 0.0 : std::exp(ch.log_prefactor()), 0.0, route, false};
    }
    return dispatch(ch, snr, false, route, opts);
}

Evaluation sum_cdf_eval(const MrcChannel& ch, double snr, EvalRoute route,
                        const EvalOptions& opts) {
    require_snr(snr, "sum_cdf");
    if (snr == 0.0) return {0.0, 0.0, route, false};
    return clamp_cdf(dispatch(ch, snr, true, route, opts), snr);
}

double sum_pdf(const MrcChannel& ch, double snr, EvalRoute route, const EvalOptions& opts) {
    return sum_pdf_eval(ch, snr, route, opts).value;
}

double sum_cdf(const MrcChannel& ch, double snr, EvalRoute route, const EvalOptions& opts) {
    return sum_cdf_eval(ch, snr, route, opts).value;
}

double iid_sum_pdf(const BranchParams& branch, std::size_t count, double snr,
                   const SeriesControls& ctl) {
    require_snr(snr, "iid_sum_pdf");
    if (snr == 0.0) return sum_pdf(MrcChannel::iid(branch, count), 0.0);
    return iid_series(branch, count, snr, 0.0, ctl);
}

double iid_sum_cdf(const BranchParams& branch, std::size_t count, double snr,
                   const SeriesControls& ctl) {
    require_snr(snr, "iid_sum_cdf");
    if (snr == 0.0) return 0.0;
    return clamp_cdf({iid_series(branch, count, snr, 1.0, ctl), 0.0, EvalRoute::phi2_series, false},
                     snr)
        .value;
}

double asymptotic_cdf(const MrcChannel& ch, double snr) {
    if (!(snr > 0.0) || !std::isfinite(snr))
        throw DomainError("asymptotic_cdf: snr must be positive and finite");
    const double m = ch.total_mu();
    return std::exp(ch.log_prefactor() + m * std::log(snr) - std::lgamma(1.0 + m));
}

}  // namespace etamu
