#ifndef ETAMU_PERFORMANCE_METRICS_HPP
#define ETAMU_PERFORMANCE_METRICS_HPP

#include "etamu/sum_statistics.hpp"

#include <array>
#include <functional>
#include <string>
#include <string_view>

namespace etamu {

// Conditional SER approximated as beta * Gamma(zeta, delta * snr) / Gamma(zeta).
struct ModulationScheme {
    double beta = 0.0;
    double delta = 0.0;
    double zeta = 0.0;
    std::string name;

    void validate() const;
};

// Families: BFSK, BPSK, QPSK (also 4-PSK, 4-QAM), rect-MQAM, nonrect-MQAM, MPSK, MPAM.
// The M-ary families need `order` >= 2.
ModulationScheme modulation_preset(std::string_view family, unsigned order = 0);

// Accepts the preset names above plus "rect-MQAM(16)", "16-QAM", "8-PSK", "4-PAM".
ModulationScheme parse_modulation(std::string_view label);

// log2(1 + x) ~ sum_k deltas[k] * exp(-sigmas[k] * x)
struct CapacityFit {
    std::array<double, 4> deltas{9.331, -2.635, -4.032, -2.388};
    std::array<double, 4> sigmas{0.000, 0.037, 0.004, 0.274};

    void validate() const;
    double operator()(double snr) const;
};

// max over [0, upper] of |fit(x) - log2(1 + x)|
double fit_error_bound(const CapacityFit& fit, double upper = 1e4);

double outage(const MrcChannel& ch, double threshold, EvalRoute route = EvalRoute::automatic,
              const EvalOptions& opts = {});

double ser_fd(const MrcChannel& ch, const ModulationScheme& mod);
double ser_foxh(const MrcChannel& ch, const ModulationScheme& mod);
double ser_numint(const MrcChannel& ch, const ModulationScheme& mod);
double asymptotic_ser(const MrcChannel& ch, const ModulationScheme& mod);

double capacity_fd(const MrcChannel& ch, const CapacityFit& fit = {});
double capacity_foxh(const MrcChannel& ch, const CapacityFit& fit = {});
double capacity_numint(const MrcChannel& ch, bool exact_log, const CapacityFit& fit = {});

using DistributionHook = std::function<double(double)>;

// Quadrature forms on an arbitrary CDF / density; `scale` is a typical SNR
// (the mean) used to split the half line.
double ser_numint(const DistributionHook& cdf, const ModulationScheme& mod);
double capacity_numint(const DistributionHook& pdf, double scale, bool exact_log,
                       const CapacityFit& fit = {});

}  // namespace etamu

#endif  // ETAMU_PERFORMANCE_METRICS_HPP
