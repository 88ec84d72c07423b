#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "scalemix/bounds.hpp"
#include "scalemix/errors.hpp"
#include "scalemix/rng.hpp"

using namespace scalemix;

namespace {

const FiniteDiscrete kTwoPoint{{{1.0, 1.0 / 3.0}, {2.0, 2.0 / 3.0}}};

// bisection against the quadrature-oracle mass, an implementation-free root
double cb_root_oracle(double b) {
    const double target = (2.0 / 3.0) * (1.0 + 1.0 / (M_PI * b));
    double lo = 1e-6, hi = 1e3;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (oracles::sine_kernel_mass_quadrature(mid, 1e-11) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("sine kernel mass: limits, value at 4.8, oracle agreement") {
    CHECK(sine_kernel_mass(1e-4) < 1e-4);
    CHECK(sine_kernel_mass(50.0) > 0.99);
    CHECK(sine_kernel_mass(50.0) < 1.0);
    // the closed form (via the sine integral) must match direct quadrature
    for (const double c : {0.3, 1.0, 4.8, 12.0, 100.0}) {
        CHECK(std::fabs(sine_kernel_mass(c) - oracles::sine_kernel_mass_quadrature(c)) <
              1e-10);
    }
    // at the root for b = 0.8 the mass is (2/3)(1 + 1/(0.8 pi)) ~ 0.932
    CHECK(std::fabs(sine_kernel_mass(4.8) - (2.0 / 3.0) * (1.0 + 1.0 / (0.8 * M_PI))) <
          0.005);
    // strictly increasing
    double prev = 0.0;
    for (double c = 0.1; c <= 20.0; c += 0.1) {
        const double m = sine_kernel_mass(c);
        CHECK(m > prev);
        CHECK(m < 1.0);
        prev = m;
    }
}

TEST_CASE("solve_cb: published value, oracle root, monotonicity") {
    const double c08 = solve_cb(0.8);
    CHECK(std::fabs(c08 - 4.8) < 0.1);
    CHECK(c08 == doctest::Approx(cb_root_oracle(0.8)).epsilon(1e-8));
    CHECK(std::fabs(sine_kernel_mass(c08) - (2.0 / 3.0) * (1.0 + 1.0 / (0.8 * M_PI))) <
          1e-10);

    const double c10 = solve_cb(1.0);
    CHECK(c10 == doctest::Approx(cb_root_oracle(1.0)).epsilon(1e-8));

    // monotone decreasing in b
    double prev = std::numeric_limits<double>::infinity();
    for (double b = 0.68; b <= 5.0; b += 0.45) {
        const double c = solve_cb(b);
        CHECK(c < prev);
        prev = c;
    }

    // diverges as b decreases toward 2/pi
    CHECK(solve_cb(0.641) > 100.0);
    CHECK(solve_cb(0.639) > solve_cb(0.641));
    CHECK_THROWS_AS((void)solve_cb(2.0 / M_PI), ParameterError);
    CHECK_THROWS_AS((void)solve_cb(0.5), ParameterError);
}

TEST_CASE("minimal admissible truncation") {
    const double c08 = solve_cb(0.8);
    CHECK(min_T(0.8, 0.5) == doctest::Approx(2.0 * c08 * 0.5 / std::log(2.0)));
    CHECK(std::fabs(min_T(0.8, 0.5) - 6.9) < 0.15);  // ~ 2 * 4.8 * 0.5 / log 2
    CHECK(min_T(0.8, 0.999) < 0.02);
    // affine in (1 - u)
    const double t1 = min_T(0.8, 0.0), t2 = min_T(0.8, 0.5);
    CHECK(t1 == doctest::Approx(2.0 * t2));
    CHECK_THROWS_AS((void)min_T(0.8, 1.5), ParameterError);
}

TEST_CASE("rho_sup: identical laws, the exponential pair, dense-grid oracle") {
    const auto exp1 = [](double x) { return cdf(Exponential{1.0}, x); };
    const auto exp15 = [](double x) { return cdf(Exponential{1.5}, x); };

    const RhoResult same = rho_sup(exp1, exp1, 0.5);
    CHECK(same.rho == 0.0);

    const RhoResult pair = rho_sup(exp1, exp15, 0.5);
    CHECK(std::fabs(pair.x0 - 0.40) < 0.02);
    const double dense = oracles::rho_dense(exp1, exp15, 0.5, 1e-5, 5.0, 1e-5);
    CHECK(pair.rho == doctest::Approx(dense).epsilon(1e-6));
    CHECK(std::fabs(pair.rho - 0.1921) < 1e-3);
}

TEST_CASE("rho_sup rejects an objective that blows up toward zero") {
    // F(x) = x^{0.3} near zero makes x^{-0.5} F(x) unbounded
    const auto phi = [](double x) { return cdf(Beta{0.3, 1.0}, x); };
    const auto psi = [](double) { return 0.0; };
    CHECK_THROWS_AS((void)rho_sup(phi, psi, 0.5), PreconditionError);
}

TEST_CASE("transform-domain bound: worked exponential pair") {
    std::vector<double> term1s;
    for (const double T : {100.0, 200.0, 300.0, 400.0, 500.0}) {
        const BoundReport rep =
            berry_esseen_terms({Exponential{1.0}, Exponential{1.5}, 0.5, 0.8, T});
        term1s.push_back(rep.term("term1"));
        CHECK(rep.term("bound_satisfied") == 1.0);
        CHECK(std::fabs(rep.x0 - 0.40) < 0.02);
    }
    // the first summand plateaus near 1.1
    for (const double t1 : term1s) {
        CHECK(t1 > 0.95);
        CHECK(t1 < 1.25);
    }
    CHECK(std::fabs(term1s.back() - term1s.front()) < 0.02);

    // the second summand halves when T doubles
    const double t2_100 =
        berry_esseen_terms({Exponential{1.0}, Exponential{1.5}, 0.5, 0.8, 100.0})
            .term("term2");
    const double t2_200 =
        berry_esseen_terms({Exponential{1.0}, Exponential{1.5}, 0.5, 0.8, 200.0})
            .term("term2");
    const double t2_400 =
        berry_esseen_terms({Exponential{1.0}, Exponential{1.5}, 0.5, 0.8, 400.0})
            .term("term2");
    CHECK(std::fabs(t2_200 / t2_100 - 0.5) < 0.1);
    CHECK(std::fabs(t2_400 / t2_200 - 0.5) < 0.1);
}

TEST_CASE("identical laws collapse the bound to the smoothness term") {
    const BoundReport rep =
        berry_esseen_terms({Exponential{1.0}, Exponential{1.0}, 0.5, 0.8, 100.0});
    CHECK(rep.term("term1") < 1e-12);
    CHECK(rep.rho == 0.0);
    CHECK(rep.term("term2") >= 0.0);
    CHECK(rep.term("bound_satisfied") == 1.0);
}

TEST_CASE("the inequality holds across exponential and gamma pairs") {
    struct Cfg {
        DistributionSpec phi, psi;
        double u, b, T;
    };
    const std::vector<Cfg> cfgs = {
        {Exponential{1.0}, Exponential{1.5}, 0.5, 0.8, 100.0},
        {Exponential{1.0}, Exponential{2.0}, 0.3, 0.8, 150.0},
        {Exponential{2.0}, Exponential{3.0}, 0.7, 1.5, 100.0},
        {Gamma{2.0, 2.0}, Gamma{2.0, 3.0}, 0.5, 0.8, 100.0},
        {Gamma{2.0, 2.0}, Gamma{3.0, 2.0}, 0.3, 1.0, 120.0},
        {Gamma{1.5, 2.0}, Gamma{2.0, 2.0}, 0.7, 0.8, 200.0},
        {Exponential{1.0}, Gamma{2.0, 2.0}, 0.5, 0.8, 100.0},
        {Gamma{2.0, 1.0}, Exponential{0.5}, 0.4, 2.0, 100.0},
        {Exponential{0.7}, Exponential{0.9}, 0.6, 1.0, 250.0},
        {Gamma{3.0, 3.0}, Gamma{3.0, 2.5}, 0.5, 0.9, 400.0}};
    for (const auto& c : cfgs) {
        const BoundReport rep = berry_esseen_terms({c.phi, c.psi, c.u, c.b, c.T});
        CHECK(rep.rho <= rep.term("term1") + rep.term("term2") + 1e-9);
        CHECK(rep.term("bound_satisfied") == 1.0);
    }
}

TEST_CASE("bound configuration errors") {
    CHECK_THROWS_AS(
        (void)berry_esseen_terms({Exponential{1.0}, Exponential{1.5}, 0.5, 0.5, 100.0}),
        ParameterError);
    // T below the admissible minimum
    CHECK_THROWS_AS(
        (void)berry_esseen_terms({Exponential{1.0}, Exponential{1.5}, 0.5, 0.8, 5.0}),
        ConfigError);
    // u outside a strip
    CHECK_THROWS_AS(
        (void)berry_esseen_terms({Exponential{1.0}, Exponential{1.5}, -0.5, 0.8, 100.0}),
        StripError);
}

TEST_CASE("almost-sure bound: population surrogate has no sampling term") {
    const MixtureModel model{Beta{2.0, 2.0}, kTwoPoint};
    const EstimatorConfig cfg{0.5, 300.0, 256, false};
    const BoundReport rep = thm1_terms(model, nullptr, cfg, 0.8, 0.5);
    CHECK(rep.term("B3") == 0.0);
    CHECK(rep.term("risk") <= rep.term("B1") + rep.term("B2") + 1e-9);
    CHECK(rep.term("B1") > 0.0);
    CHECK(rep.term("B2") > 0.0);
}

TEST_CASE("almost-sure bound holds on a seeded run") {
    const MixtureModel model{Beta{2.0, 2.0}, kTwoPoint};
    const Sample s = sample_mixture(model, 500, 314159);
    const EstimatorConfig cfg{0.5, 500.0, 256, false};
    const BoundReport rep = thm1_terms(model, &s, cfg, 0.8, 0.5);
    CHECK(rep.term("risk") <= rep.term("B1") + rep.term("B2") + rep.term("B3") + 1e-6);
    CHECK(rep.term("B3") > 0.0);
}

TEST_CASE("bias term scales like 1/T once the transform integral has converged") {
    const MixtureModel model{Beta{2.0, 2.0}, kTwoPoint};
    const EstimatorConfig cfgA{0.5, 300.0, 256, false};
    const EstimatorConfig cfgB{0.5, 600.0, 256, false};
    const double b1a = thm1_terms(model, nullptr, cfgA, 0.8, 0.5).term("B1");
    const double b1b = thm1_terms(model, nullptr, cfgB, 0.8, 0.5).term("B1");
    CHECK(std::fabs(b1b / b1a - 0.5) < 0.05);
}

TEST_CASE("mean-square bound terms and their scalings") {
    const MixtureModel model{Beta{2.0, 2.0}, kTwoPoint};
    const EstimatorConfig cfg{0.5, 300.0, 256, false};
    const BoundReport r1 = thm2_terms(model, cfg, 0.8, 0.5, 1000);
    const BoundReport r2 = thm2_terms(model, cfg, 0.8, 0.5, 2000);
    // the sampling term carries the explicit 1/n factor
    CHECK(r2.term("I3") == doctest::Approx(0.5 * r1.term("I3")).epsilon(1e-12));
    CHECK(r1.term("I1") == doctest::Approx(r2.term("I1")));
    CHECK(r1.term("I2") == doctest::Approx(r2.term("I2")));

    const BoundReport big = thm2_terms(model, {0.5, 600.0, 256, false}, 0.8, 0.5, 1000);
    CHECK(std::fabs(big.term("I1") / r1.term("I1") - 0.25) < 0.05);

    CHECK(r1.term("G_envelope_min_u") > 0.0);
    CHECK(r1.term("G_envelope_max_u") >= r1.term("G_envelope_min_u"));
}

TEST_CASE("mean-square bound dominates the Monte-Carlo squared risk") {
    const MixtureModel model{Beta{2.0, 2.0}, kTwoPoint};
    const EstimatorConfig cfg{0.5, 500.0, 256, false};
    const double x = 0.5;
    const BoundReport rep = thm2_terms(model, cfg, 0.8, x, 500);
    const double bound = rep.term("I1") + rep.term("I2") + rep.term("I3");
    const double truth = cdf(model.signal, x);
    double acc = 0.0;
    const int runs = 200;
    for (int r = 0; r < runs; ++r) {
        const Sample s = sample_mixture(model, 500, mix_seed(777000, r));
        const CdfEstimate est = estimate_cdf(s, model.mixing, cfg, {x});
        const double risk = pointwise_risk(est.values[0], truth, cfg.u_star, x);
        acc += risk * risk;
    }
    CHECK(acc / runs <= bound);
}

TEST_CASE("mean-square bound rejects non-integrable mixtures") {
    // a discrete signal keeps |M[F_mix]| from decaying along the line
    const MixtureModel model{FiniteDiscrete{{{1.0, 0.5}, {3.0, 0.5}}}, kTwoPoint};
    const EstimatorConfig cfg{0.5, 100.0, 256, false};
    CHECK_THROWS_AS((void)thm2_terms(model, cfg, 0.8, 0.5, 100), IntegrabilityError);
}

TEST_CASE("mean-square bound needs 2u - 1 inside the strips") {
    const MixtureModel model{Beta{1.0, 2.0}, kTwoPoint};  // strip (0, inf)
    const EstimatorConfig cfg{0.4, 100.0, 256, false};
    CHECK_THROWS_AS((void)thm2_terms(model, cfg, 0.8, 0.5, 100), StripError);
}

TEST_CASE("report serialization carries terms and configuration") {
    const BoundReport rep =
        berry_esseen_terms({Exponential{1.0}, Exponential{1.5}, 0.5, 0.8, 100.0});
    const std::string json = bound_report_json(rep);
    CHECK(json.find("\"term1\"") != std::string::npos);
    CHECK(json.find("\"x0\"") != std::string::npos);
    CHECK(json.find("\"config\"") != std::string::npos);
    CHECK_THROWS_AS((void)rep.term("nonexistent"), ConfigError);
}
