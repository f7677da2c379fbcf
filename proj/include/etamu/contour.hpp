#ifndef ETAMU_CONTOUR_HPP
#define ETAMU_CONTOUR_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace etamu {

enum class ContourMethod { vertical_line, fixed_talbot };

struct ContourSpec {
    ContourMethod method = ContourMethod::fixed_talbot;
    double abscissa = 0.0;             // vertical-line only
    int node_count = 32;
    int max_node_count = 512;          // node_count doubles up to this until accurate
    double truncation_height = 1e7;    // vertical-line only, oscillatory kernels
    double tolerance = 1e-8;           // relative
    double shift = 0.0;                // fixed-talbot only: contour origin moved to s = shift

    // Cotangent (Talbot) contour scaled with N/t around s = shift; all
    // singularities of the transform must lie on the real axis left of shift.
    // Placing shift near the saddle point of e^{ts} F(s) keeps the rule
    // accurate for sharply peaked densities and in their tails.
    static ContourSpec talbot(int nodes = 32, double tolerance = 1e-8);
    // Re s = abscissa, integrated with a double-exponential rule when the
    // kernel is non-oscillatory and with accelerated panels otherwise.
    static ContourSpec vertical_line(double abscissa, int nodes = 128, double tolerance = 1e-8);

    void validate() const;
};

struct ContourResult {
    double value = 0.0;
    double error_estimate = 0.0;  // difference against a rule with 1.5x the nodes
    bool accurate = false;        // error_estimate within the contour tolerance
};

using LaplaceFunction = std::function<std::complex<double>(std::complex<double>)>;

// (1/2 pi i) * integral of F(s) s^{-[divide_by_s]} e^{t s} ds along `contour`.
// F must satisfy F(conj s) = conj F(s). With divide_by_s the result is the
// CDF of the density whose transform is F.
ContourResult bromwich_invert(const LaplaceFunction& transform, double t, bool divide_by_s,
                              const ContourSpec& contour);

// Gamma^exponent(shift + scale * s)
struct GammaFactor {
    std::complex<double> shift;
    double scale = 1.0;
    double exponent = 1.0;
};

// Parameter triple (a, A, alpha) of a generalized Fox H-function row.
struct HhatTriple {
    double a;
    double scale;
    double exponent;
};

struct GammaFactorProduct {
    std::vector<GammaFactor> numerator;
    std::vector<GammaFactor> denominator;

    void validate() const;
    bool empty() const { return numerator.empty() && denominator.empty(); }
    std::complex<double> log_eval(std::complex<double> s) const;

    // Assembles the Mellin-Barnes integrand of H-hat^{m,n}_{p,q} with kernel
    // z^s: numerator Gamma(b_j - B_j s) for j <= m and Gamma(1 - a_j + A_j s)
    // for j <= n; denominator Gamma(a_j - A_j s) for j > n and
    // Gamma(1 - b_j + B_j s) for j > m, each raised to its exponent.
    static GammaFactorProduct from_hhat(std::size_t m, std::size_t n,
                                        std::span<const HhatTriple> upper,
                                        std::span<const HhatTriple> lower);
};

// Generalized Fox H-function: (1/2 pi i) * integral of the Gamma product times
// exp(s * log_z) along `contour`.
ContourResult foxh_hat(const GammaFactorProduct& factors, double log_z, const ContourSpec& contour);

}  // namespace etamu

#endif  // ETAMU_CONTOUR_HPP
