#ifndef ETAMU_CHANNEL_MODEL_HPP
#define ETAMU_CHANNEL_MODEL_HPP

#include <complex>

namespace etamu {

class FormatIIParams;

// One diversity branch in Format I: positive cluster ratio p and power ratio eta.
class BranchParams {
public:
    BranchParams(double mu, double eta, double p, double gbar);

    double mu() const { return mu_; }
    double eta() const { return eta_; }
    double p() const { return p_; }
    double gbar() const { return gbar_; }

    BranchParams with_gbar(double gbar) const { return {mu_, eta_, p_, gbar}; }

private:
    double mu_, eta_, p_, gbar_;
};

// Format II: normalized differences eta2, p2 in (-1, 1).
class FormatIIParams {
public:
    FormatIIParams(double mu, double eta2, double p2, double gbar);

    double mu() const { return mu_; }
    double eta2() const { return eta2_; }
    double p2() const { return p2_; }
    double gbar() const { return gbar_; }

private:
    double mu_, eta2_, p2_, gbar_;
};

struct ComponentDecomposition {
    double mu_x, mu_y;
    double omega_x, omega_y;
    double rhat2;
};

struct DerivedCoeffs {
    double xi;
    double a_coef, b_coef, c_coef, d_coef;
    double prefactor;
    double log_prefactor;
};

BranchParams format2_to_format1(const FormatIIParams& f2);
FormatIIParams format1_to_format2(const BranchParams& f1);

ComponentDecomposition decompose(const BranchParams& f1, double rhat2);

DerivedCoeffs derived_coeffs(const BranchParams& f1);

// SNR density of one branch. Returns +inf at snr = 0 when mu < 1.
double branch_pdf(const BranchParams& f1, double snr);
double branch_log_pdf(const BranchParams& f1, double snr);

// E[exp(-s gamma)] on the plane cut along (-inf, -min(A, C)].
std::complex<double> branch_mgf(const BranchParams& f1, std::complex<double> s);

// The same transform written as prefactor * Gamma(A+s)^B Gamma(C+s)^D /
// (Gamma(1+A+s)^B Gamma(1+C+s)^D).
std::complex<double> mgf_gamma_ratio(const BranchParams& f1, std::complex<double> s);

}  // namespace etamu

#endif  // ETAMU_CHANNEL_MODEL_HPP
