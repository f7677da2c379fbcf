#include "doctest.h"

#include "etamu/errors.hpp"
#include "etamu/performance_metrics.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace etamu;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

MrcChannel fig1_channel(double eta, double gbar) {
    const double mu[4] = {0.75, 1.25, 1.75, 1.5}, p[4] = {0.1, 0.2, 0.3, 0.4};
    std::vector<BranchParams> b;
    for (int i = 0; i < 4; ++i) b.emplace_back(mu[i], eta, p[i], gbar);
    return MrcChannel(b);
}

MrcChannel fig3_channel(double mu, double gbar) {
    std::vector<BranchParams> b;
    for (double eta : {0.25, 0.5, 0.75}) b.emplace_back(mu, eta, 0.5, gbar);
    return MrcChannel(b);
}

MrcChannel capacity_channel(double gbar) {
    return MrcChannel::iid(BranchParams(1.0, 0.25, 0.25, gbar), 3);
}

// BPSK through Craig's form: (1/pi) int_0^{pi/2} M(1/sin^2 t) dt
double craig_bpsk(const MrcChannel& ch) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(
               [&](double t) {
                   const double s = std::sin(t);
                   return std::real(sum_mgf(ch, 1.0 / (s * s)));
               },
               0.0, std::numbers::pi / 2) /
           std::numbers::pi;
}

const std::vector<ModulationScheme>& all_presets() {
    static const std::vector<ModulationScheme> mods{
        modulation_preset("BFSK"),          modulation_preset("BPSK"),
        modulation_preset("QPSK"),          modulation_preset("rect-MQAM", 16),
        modulation_preset("nonrect-MQAM", 32), modulation_preset("MPSK", 8),
        modulation_preset("MPAM", 4)};
    return mods;
}

}  // namespace

TEST_CASE("modulation presets") {
    const auto bpsk = modulation_preset("BPSK");
    CHECK(bpsk.beta == 0.5);
    CHECK(bpsk.delta == 1.0);
    CHECK(bpsk.zeta == 0.5);
    const auto bfsk = modulation_preset("BFSK");
    CHECK(bfsk.beta == 0.5);
    CHECK(bfsk.delta == 0.5);
    const auto qam = modulation_preset("rect-MQAM", 16);
    CHECK(qam.beta == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(qam.delta == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(qam.zeta == 0.5);

    const auto psk = parse_modulation("8-PSK");
    CHECK(psk.beta == 1.0);
    CHECK(psk.delta == doctest::Approx(std::pow(std::sin(std::numbers::pi / 8), 2)));
    CHECK(parse_modulation("4-QAM").delta == 0.5);
    CHECK(parse_modulation("16-QAM").beta == qam.beta);
    CHECK(parse_modulation("rect-MQAM(16)").delta == qam.delta);
    CHECK(parse_modulation("nonrect-MQAM(32)").beta == 2.0);
    CHECK(parse_modulation("4-PAM").delta == doctest::Approx(0.2));

    CHECK_THROWS_AS(modulation_preset("QAM"), DomainError);
    CHECK_THROWS_AS(modulation_preset("MPSK"), DomainError);
    CHECK_THROWS_AS(parse_modulation("rect-MQAM(x)"), DomainError);
    CHECK_THROWS_AS(modulation_preset("rect-MQAM", 8), DomainError);
}

TEST_CASE("outage probability") {
    const BranchParams g(1.5, 0.6, 0.6, 3.0);
    const auto ch = MrcChannel::iid(g, 2);
    for (double th : {0.1, 1.0, 5.0})
        CHECK(std::abs(outage(ch, th) - boost::math::gamma_p(3.0, g.mu() * th / g.gbar())) < 1e-9);
    CHECK(outage(ch, 1e-12) < 1e-30);
    CHECK_THROWS_AS(outage(ch, 0.0), DomainError);

    for (double eta : {0.2, 0.5, 0.9}) {
        double prev = 1.0;
        for (double db = 0.0; db <= 40.0; db += 2.5) {
            const double v = outage(fig1_channel(eta, std::pow(10.0, db / 10.0)), 1.0);
            CHECK(v < prev);
            prev = v;
        }
    }
    double prev = 0.0;
    for (double th = 0.1; th < 30.0; th *= 1.5) {
        const double v = outage(fig1_channel(0.5, 3.0), th);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("SER closed form against Nakagami quadrature and Craig's form") {
    const auto bpsk = modulation_preset("BPSK");
    const double mu = 1.5;
    const auto ch = MrcChannel::iid(BranchParams(mu, 0.7, 0.7, 4.0), 2);
    boost::math::quadrature::exp_sinh<double> es;
    const double rate = mu / 4.0;
    const double oracle = bpsk.beta * std::pow(bpsk.delta, bpsk.zeta) / std::tgamma(bpsk.zeta) *
                          es.integrate([&](double x) {
                              return std::pow(x, bpsk.zeta - 1) * std::exp(-bpsk.delta * x) *
                                     boost::math::gamma_p(2 * mu, rate * x);
                          });
    CHECK(rel_err(ser_fd(ch, bpsk), oracle) < 1e-7);

    for (double g : {1.0, 10.0, 100.0}) {
        const auto f3 = fig3_channel(1.0, g);
        CHECK(rel_err(ser_fd(f3, bpsk), craig_bpsk(f3)) < 1e-9);
        CHECK(rel_err(ser_fd(f3, bpsk), ser_numint(f3, bpsk)) < 1e-6);
    }
    CHECK(ser_fd(fig3_channel(1.0, 1e12), bpsk) < 1e-30);
}

TEST_CASE("SER contour form") {
    const auto bpsk = modulation_preset("BPSK");
    const auto f3 = fig3_channel(1.0, 10.0);
    CHECK(rel_err(ser_foxh(f3, bpsk), ser_fd(f3, bpsk)) < 1e-5);

    const MrcChannel single({BranchParams(1.0, 0.5, 0.5, 5.0)});
    CHECK(rel_err(ser_foxh(single, bpsk), ser_numint(single, bpsk)) < 1e-6);

    ModulationScheme twice = bpsk;
    twice.beta *= 2.0;
    CHECK(ser_foxh(f3, twice) == 2.0 * ser_foxh(f3, bpsk));
}

TEST_CASE("SER quadrature hooks") {
    const auto mod = modulation_preset("rect-MQAM", 16);
    CHECK(rel_err(ser_numint([](double) { return 1.0; }, mod), mod.beta) < 1e-12);
    CHECK(ser_numint([](double) { return 0.0; }, mod) == 0.0);
}

TEST_CASE("SER routes agree on every preset and test channel") {
    const std::vector<MrcChannel (*)(double)> families{
        [](double g) { return fig3_channel(1.0, g); },
        [](double g) { return fig1_channel(0.5, g); },
        [](double g) { return MrcChannel({BranchParams(0.75, 0.25, 0.1, g)}); },
        [](double g) {
            return MrcChannel({BranchParams(0.6, 3.0, 0.2, g), BranchParams(2.3, 0.1, 5.0, g)});
        },
    };
    for (auto make : families) {
        for (const auto& mod : all_presets()) {
            double prev = mod.beta;
            for (double g : {1.0, 10.0, 100.0}) {
                const auto ch = make(g);
                const double fd = ser_fd(ch, mod);
                CHECK(rel_err(ser_foxh(ch, mod), fd) < 1e-5);
                CHECK(rel_err(ser_numint(ch, mod), fd) < 1e-5);
                CHECK(fd > 0.0);
                CHECK(fd <= mod.beta);
                CHECK(fd < prev);
                prev = fd;
            }
        }
    }
}

TEST_CASE("asymptotic SER") {
    const auto bpsk = modulation_preset("BPSK");
    CHECK(std::abs(asymptotic_ser(fig3_channel(1.0, 1e5), bpsk) /
                       ser_fd(fig3_channel(1.0, 1e5), bpsk) -
                   1.0) < 0.03);

    for (double mu : {0.5, 1.0, 2.0}) {
        const double a = asymptotic_ser(fig3_channel(mu, 1e3), bpsk);
        const double b = asymptotic_ser(fig3_channel(mu, 1e4), bpsk);
        CHECK(std::abs(std::log10(b / a) + 3.0 * mu) < 1e-12);
    }
}

TEST_CASE("log-fit error bound") {
    const CapacityFit fit;
    const double eps = fit_error_bound(fit);
    CHECK(eps == doctest::Approx(3.9568).epsilon(1e-4));
    for (double x = 0.0; x <= 1e4; x = 1.7 * x + 0.01)
        CHECK(std::abs(fit(x) - std::log2(1.0 + x)) <= eps);
    CHECK(fit(0.0) == doctest::Approx(0.276));
}

TEST_CASE("capacity closed forms") {
    CapacityFit unit;
    unit.deltas = {1.0, 0.0, 0.0, 0.0};
    unit.sigmas = {0.0, 0.0, 0.0, 0.0};
    const auto ch = capacity_channel(5.0);
    CHECK(capacity_fd(ch, unit) == 1.0);
    CHECK(capacity_foxh(ch, unit) == 1.0);
    CHECK(std::abs(capacity_numint(ch, false, unit) - 1.0) < 1e-9);

    CapacityFit mgf;
    mgf.deltas = {0.0, 1.0, 0.0, 0.0};
    mgf.sigmas = {0.0, 0.3, 0.0, 0.0};
    for (const auto& c : {ch, fig1_channel(0.5, 2.0)}) {
        const double want = std::real(sum_mgf(c, 0.3));
        CHECK(std::abs(capacity_fd(c, mgf) - want) < 1e-7);
        CHECK(std::abs(capacity_foxh(c, mgf) - want) < 1e-7);
    }

    const double eps = fit_error_bound(CapacityFit{});
    for (double db = 0.0; db <= 20.0; db += 5.0) {
        const auto c = capacity_channel(std::pow(10.0, db / 10.0));
        const double fd = capacity_fd(c);
        CHECK(std::abs(capacity_foxh(c) - fd) < 1e-4);
        CHECK(std::abs(capacity_numint(c, false) - fd) < 1e-4);
        CHECK(std::abs(capacity_numint(c, true) - fd) <= eps + 1e-4);
    }
}

TEST_CASE("exact-log capacity on a Rayleigh density") {
    for (double gbar : {0.5, 3.0, 20.0}) {
        auto pdf = [gbar](double x) { return std::exp(-x / gbar) / gbar; };
        const double want =
            std::exp(1.0 / gbar) * boost::math::expint(1, 1.0 / gbar) / std::numbers::ln2;
        CHECK(rel_err(capacity_numint(pdf, gbar, true), want) < 1e-7);
    }
    const MrcChannel ray({BranchParams(1.0, 0.4, 0.4, 3.0)});
    CHECK(rel_err(capacity_numint(ray, true),
                  std::exp(1.0 / 3.0) * boost::math::expint(1, 1.0 / 3.0) / std::numbers::ln2) <
          1e-7);
}
