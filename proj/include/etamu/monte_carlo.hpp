#ifndef ETAMU_MONTE_CARLO_HPP
#define ETAMU_MONTE_CARLO_HPP

#include "etamu/performance_metrics.hpp"
#include "etamu/sum_statistics.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace etamu {

struct SimConfig {
    std::uint64_t seed = 20240521;
    std::size_t replicas = 1'000'000;
    unsigned stream_count = 1;  // worker threads; does not affect results

    void validate() const;
};

// splitmix64 keyed by (seed, replica): every replica owns an independent
// stream, so draws do not depend on how replicas are split across workers.
class CounterStream {
public:
    using result_type = std::uint64_t;

    CounterStream(std::uint64_t seed, std::uint64_t replica);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// gamma = G1 + G2, G1 ~ Gamma(mu/(1+p), gbar/(xi mu)), G2 ~ Gamma(mu p/(1+p), eta gbar/(p xi mu))
double sample_branch(const BranchParams& f1, CounterStream& stream);
double sample_sum(const MrcChannel& ch, CounterStream& stream);

// Combiner SNR for replicas 0..replicas-1, in replica order.
std::vector<double> sample_sums(const MrcChannel& ch, const SimConfig& cfg);

struct McEstimate {
    double value = 0.0;
    double half_width = 0.0;  // 95% confidence; Wilson score interval for proportions
};

McEstimate estimate_outage(const MrcChannel& ch, double threshold, const SimConfig& cfg);
// Mean of beta * Q(zeta, delta * snr), Q the regularized upper incomplete gamma.
// Draws come from the law tilted by exp(-delta * snr) and are reweighted by
// M(delta) exp(delta * snr), which keeps every term bounded at high SNR.
McEstimate estimate_ser(const MrcChannel& ch, const ModulationScheme& mod, const SimConfig& cfg);
McEstimate estimate_capacity(const MrcChannel& ch, const SimConfig& cfg, bool exact_log,
                             const CapacityFit& fit = {});

// The same estimators on draws already taken; estimate_ser here is the plain mean.
McEstimate estimate_outage(const std::vector<double>& draws, double threshold);
McEstimate estimate_ser(const std::vector<double>& draws, const ModulationScheme& mod);
McEstimate estimate_capacity(const std::vector<double>& draws, bool exact_log,
                             const CapacityFit& fit = {});

// Mean and 95% half-width of kernel(x) over the draws.
McEstimate sample_mean(const std::vector<double>& draws, const std::function<double(double)>& kernel);

// sup |F_n - F|. With more than `exact_limit` draws, F is evaluated at
// `exact_limit` empirical quantiles and interpolated monotonically between them.
double ks_statistic(std::vector<double> draws, const std::function<double(double)>& cdf,
                    std::size_t exact_limit = 4096);
// Asymptotic critical value of the one-sample statistic at level 1%.
double ks_critical_99(std::size_t n);

}  // namespace etamu

#endif  // ETAMU_MONTE_CARLO_HPP
