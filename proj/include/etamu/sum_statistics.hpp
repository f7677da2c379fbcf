#ifndef ETAMU_SUM_STATISTICS_HPP
#define ETAMU_SUM_STATISTICS_HPP

#include "etamu/channel_model.hpp"
#include "etamu/contour.hpp"
#include "etamu/special_functions.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace etamu {

// L independent branches combined by MRC; the combiner SNR is their sum.
class MrcChannel {
public:
    explicit MrcChannel(std::vector<BranchParams> branches);
    static MrcChannel iid(const BranchParams& branch, std::size_t count);

    const std::vector<BranchParams>& branches() const { return branches_; }
    std::size_t size() const { return branches_.size(); }

    double total_mu() const;
    double total_gbar() const;
    double log_prefactor() const;  // sum of the per-branch log prefactors

    // Every branch gets the same mean SNR.
    MrcChannel with_common_gbar(double gbar) const;
    // Every branch mean SNR multiplied by `factor`.
    MrcChannel scaled(double factor) const;

private:
    std::vector<BranchParams> branches_;
};

enum class EvalRoute { phi2_series, bromwich, automatic };

struct EvalOptions {
    SeriesControls series{};
    ContourSpec contour = ContourSpec::talbot();
    double auto_argument_limit = 30.0;
    std::size_t auto_max_branches = 3;
};

struct Evaluation {
    double value = 0.0;
    double error_estimate = 0.0;
    EvalRoute route = EvalRoute::automatic;  // route that produced `value`
    bool clamped = false;                    // CDF pulled back into [0, 1]
};

std::complex<double> sum_mgf(const MrcChannel& ch, std::complex<double> s);

Evaluation sum_pdf_eval(const MrcChannel& ch, double snr, EvalRoute route = EvalRoute::automatic,
                        const EvalOptions& opts = {});
Evaluation sum_cdf_eval(const MrcChannel& ch, double snr, EvalRoute route = EvalRoute::automatic,
                        const EvalOptions& opts = {});

double sum_pdf(const MrcChannel& ch, double snr, EvalRoute route = EvalRoute::automatic,
               const EvalOptions& opts = {});
double sum_cdf(const MrcChannel& ch, double snr, EvalRoute route = EvalRoute::automatic,
               const EvalOptions& opts = {});

// Identically distributed branches: bivariate series in place of the 2L-variate one.
double iid_sum_pdf(const BranchParams& branch, std::size_t count, double snr,
                   const SeriesControls& ctl = {});
double iid_sum_cdf(const BranchParams& branch, std::size_t count, double snr,
                   const SeriesControls& ctl = {});

// High-SNR leading term prod(prefactor) snr^{sum mu} / Gamma(1 + sum mu); not clamped.
double asymptotic_cdf(const MrcChannel& ch, double snr);

}  // namespace etamu

#endif  // ETAMU_SUM_STATISTICS_HPP
