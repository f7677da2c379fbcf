#ifndef ETAMU_SPECIAL_FUNCTIONS_HPP
#define ETAMU_SPECIAL_FUNCTIONS_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace etamu {

// Budget and stopping rule for the multivariate hypergeometric series.
struct SeriesControls {
    double abs_tol = 1e-300;
    double rel_tol = 1e-16;
    int max_total_degree = 20000;
    long max_terms = 10'000'000;

    void validate() const;
};

// A series value kept as mantissa * exp(log_scale) so that results far
// outside the double range (tiny densities, huge 1F1 values) survive.
struct ScaledValue {
    double mantissa = 0.0;
    double log_scale = 0.0;

    double value() const;
    double log_abs() const;
};

struct SeriesResult {
    ScaledValue sum;
    bool converged = false;
    int shells = 0;  // total-degree shells summed

    double value() const { return sum.value(); }
};

// Rising factorial a(a+1)...(a+n-1); evaluated through log-gamma for n > 30.
double pochhammer(double a, unsigned n);

// Continuous log-gamma on the plane cut along (-inf, 0]; this is the branch
// for which log_gamma(z) - log_gamma(z + 1) == -log(z) (principal log).
std::complex<double> log_gamma(std::complex<double> z);

// Confluent hypergeometric 1F1(a; b; x) to ~1e-13 relative.
double kummer_1f1(double a, double b, double x);
ScaledValue kummer_1f1_scaled(double a, double b, double x);

// Humbert confluent series of N variables:
//   Phi2(b_1..b_N; c; x_1..x_N) = sum_m prod (b_i)_{m_i} x_i^{m_i} / m_i! / (c)_{|m|}
// summed shell by shell in |m|. Negative arguments are first moved to the
// nonnegative orthant with the multivariate Kummer transformation.
SeriesResult humbert_phi2(std::span<const double> b, double c, std::span<const double> x,
                          const SeriesControls& ctl = {});

enum class FdRoute { automatic, series, euler_integral };

// Lauricella F_D of N variables. The automatic route uses the shell series
// when max|x_i| < 0.5, the closed product when c == a, and otherwise the
// Euler integral (requires c > a > 0 and all x_i < 1).
double lauricella_fd(double a, std::span<const double> b, double c, std::span<const double> x,
                     FdRoute route = FdRoute::automatic);

namespace detail {

// e_n = [z^n] prod_i (1 - x_i z)^{-b_i} for n = 0..count-1, computed with
// every x_i divided by `scale`.
std::vector<double> shell_coefficients(std::span<const double> b, std::span<const double> x,
                                       double scale, std::size_t count);

// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double v);
    double value() const { return sum_ + comp_; }
    void scale(double f) {
        sum_ *= f;
        comp_ *= f;
    }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace detail

}  // namespace etamu

#endif  // ETAMU_SPECIAL_FUNCTIONS_HPP
