#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "scalemix/errors.hpp"
#include "scalemix/fourier.hpp"

using namespace scalemix;

namespace {

const FiniteDiscrete kTwoPoint{{{1.0, 1.0 / 3.0}, {2.0, 2.0 / 3.0}}};
const FiniteDiscrete kDegenerate{{{1.0, 1.0}}};

}  // namespace

TEST_CASE("characteristic function of the log noise") {
    for (const double t : {-3.0, -0.5, 0.7, 4.0}) {
        const Complex uni = char_log_mixing(UniformUnit{}, t);
        CHECK(std::abs(uni - 1.0 / Complex(1.0, t)) < 1e-13);
        const Complex two = char_log_mixing(kTwoPoint, t);
        const Complex want =
            1.0 / 3.0 + 2.0 / 3.0 * std::exp(Complex(0.0, t * std::log(2.0)));
        CHECK(std::abs(two - want) < 1e-13);
    }
    for (const DistributionSpec g :
         std::vector<DistributionSpec>{UniformUnit{}, kTwoPoint, Zeta{5.0}, Geometric{0.4}}) {
        CHECK(std::abs(char_log_mixing(g, 0.0) - Complex(1.0, 0.0)) < 1e-12);
        const Complex plus = char_log_mixing(g, 1.7);
        const Complex minus = char_log_mixing(g, -1.7);
        CHECK(std::abs(minus - std::conj(plus)) < 1e-12);
    }
}

TEST_CASE("integrand factor approaches y at t = 0") {
    CHECK(fourier_step_factor(0.0, -2.5) == Complex(-2.5, 0.0));
    for (const double y : {-3.0, 0.4, 1.7}) {
        CHECK(std::abs(fourier_step_factor(1e-7, y) - Complex(y, 0.0)) < 1e-6);
        CHECK(std::abs(fourier_step_factor(-1e-7, y) - Complex(y, 0.0)) < 1e-6);
        // exact value away from zero
        const double t = 1.3;
        const Complex want = (std::exp(Complex(0.0, -t * y)) - 1.0) / Complex(0.0, -t);
        CHECK(std::abs(fourier_step_factor(t, y) - want) < 1e-14);
    }
}

TEST_CASE("degenerate noise: the baseline tracks the empirical c.d.f.") {
    const MixtureModel model{Exponential{1.0}, kDegenerate};
    const Sample s = sample_mixture(model, 10000, 808);
    const FourierConfig cfg{200.0, 0.0, 0.001, 256};
    const auto grid = linspace(0.2, 3.0, 15);
    const CdfEstimate est = fourier_estimate_cdf(s, model.mixing, cfg, grid);

    std::vector<double> sorted = s.values;
    std::sort(sorted.begin(), sorted.end());
    const auto ecdf = [&](double x) {
        return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) -
                                   sorted.begin()) /
               static_cast<double>(sorted.size());
    };
    double sup_ecdf = 0.0, sup_truth = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        sup_ecdf = std::max(sup_ecdf, std::fabs(est.values[i] - ecdf(grid[i])));
        sup_truth =
            std::max(sup_truth, std::fabs(est.values[i] - cdf(Exponential{1.0}, grid[i])));
    }
    CHECK(sup_ecdf < 0.02);
    CHECK(sup_truth < 0.02);
    CHECK(est.max_imag_ratio < 1e-8);
    CHECK(est.method == "fourier");
}

TEST_CASE("panel doubling leaves the baseline unchanged to 1e-6") {
    const MixtureModel model{Beta{2.0, 2.0}, kTwoPoint};
    const Sample s = sample_mixture(model, 500, 3);
    const auto grid = linspace(0.05, 0.95, 19);
    const FourierConfig c1{3.5, 0.0, 0.001, 256};
    const CdfEstimate e1 = fourier_estimate_cdf(s, model.mixing, c1, grid);
    FourierConfig c2 = c1;
    c2.panels = e1.panels_used * 2;
    const CdfEstimate e2 = fourier_estimate_cdf(s, model.mixing, c2, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::fabs(e1.values[i] - e2.values[i]) < 1e-6);
}

TEST_CASE("ill-posedness: a window node on a zero of the noise cf") {
    // equal two-point weights put a true zero at t = pi / log 2; with
    // R = 2 pi / log 2 a quadrature node lands on it
    const FiniteDiscrete even{{{1.0, 0.5}, {2.0, 0.5}}};
    const MixtureModel model{Beta{2.0, 2.0}, even};
    const Sample s = sample_mixture(model, 100, 9);
    const FourierConfig cfg{2.0 * M_PI / std::log(2.0), 0.0, 0.001, 256};
    CHECK_THROWS_AS((void)fourier_estimate_cdf(s, model.mixing, cfg, {0.5}), IllPosedError);
}

TEST_CASE("configuration errors") {
    const Sample s = sample(Beta{2.0, 2.0}, 30, 2);
    CHECK_THROWS_AS((void)fourier_estimate_cdf(s, kTwoPoint, {0.0, 0.0, 0.001, 256}, {0.5}),
                    ConfigError);
    CHECK_THROWS_AS((void)fourier_estimate_cdf(s, kTwoPoint, {1.0, -0.1, 0.001, 256}, {0.5}),
                    ConfigError);
    CHECK_THROWS_AS((void)fourier_estimate_cdf(s, kTwoPoint, {1.0, 0.0, 1.5, 256}, {0.5}),
                    ConfigError);
    CHECK_THROWS_AS((void)fourier_estimate_cdf(s, kTwoPoint, {1.0, 0.0, 0.001, 256}, {-0.5}),
                    DomainError);
}
