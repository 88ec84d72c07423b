// Acceptance suite: drives every top-level requirement end to end and
// prints one PASS/FAIL line per criterion. Exit code = number of failures.
//
// usage: acceptance <path-to-cli>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "oracles.hpp"
#include "scalemix/bounds.hpp"
#include "scalemix/distributions.hpp"
#include "scalemix/estimator.hpp"
#include "scalemix/fourier.hpp"
#include "scalemix/harness.hpp"
#include "scalemix/mellin.hpp"
#include "scalemix/rng.hpp"

using namespace scalemix;

namespace {

std::string g_cli;
int g_failures = 0;

struct Criterion {
    int id;
    std::string title;
    bool ok = true;
    std::vector<std::string> notes;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Criterion(int id_, std::string title_) : id(id_), title(std::move(title_)) {}

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }

    void expect_runtime(double limit_seconds) {
        const double secs = elapsed();
        char buf[96];
        std::snprintf(buf, sizeof(buf), "runtime %.1f s exceeds the %g s target", secs,
                      limit_seconds);
        expect(secs < limit_seconds, buf);
    }

    void finish() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id,
                    title.c_str(), secs);
        for (const auto& n : notes) std::printf("        failed check: %s\n", n.c_str());
        if (!ok) ++g_failures;
        std::fflush(stdout);
    }
};

std::string run_cli_stdout(const std::string& args, int* code) {
    const std::string tmp = "acceptance_cli.tmp";
    const int rc = std::system((g_cli + " " + args + " > " + tmp + " 2> /dev/null").c_str());
    *code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream is(tmp);
    std::ostringstream os;
    os << is.rdbuf();
    std::remove(tmp.c_str());
    return os.str();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

const FiniteDiscrete kTwoPoint{{{1.0, 1.0 / 3.0}, {2.0, 2.0 / 3.0}}};

void criterion1() {
    Criterion c(1, "root of the sine-kernel mass equation at b = 0.8 (CLI, < 1 s)");
    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    const std::string out = run_cli_stdout("bounds cb --b 0.8", &code);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double value = std::strtod(out.c_str(), nullptr);
    c.expect(code == 0, "CLI exited with " + std::to_string(code));
    c.expect(std::fabs(value - 4.8) <= 0.1, "c(0.8) = " + fmt(value) + " not within 4.8 +- 0.1");
    c.expect(secs < 1.0, "runtime " + fmt(secs) + " s >= 1 s");
    c.finish();
}

void criterion2() {
    Criterion c(2, "positive-Poisson feasibility threshold (root of e^l = 3l + 1)");
    const auto t0 = std::chrono::steady_clock::now();
    const double l0 = positive_poisson_threshold();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(std::fabs(l0 - 1.9) <= 0.05, "threshold = " + fmt(l0) + " not within 1.9 +- 0.05");
    c.expect(std::fabs(std::exp(l0) - 3.0 * l0 - 1.0) < 1e-8, "residual of the defining equation");
    c.expect(secs < 1.0, "runtime >= 1 s");
    c.finish();
}

void criterion3() {
    Criterion c(3, "two-point excluded line exactly 0; zeta(5) coarse bound 0.95 +- 0.01");
    const HgRegion two = hg_region(kTwoPoint);
    c.expect(two.kind == HgKind::punctured_line, "two-point region is not a punctured line");
    c.expect(two.u_excluded == 0.0, "excluded u = " + fmt(two.u_excluded) + " != 0 exactly");
    const HgRegion zeta = hg_region(Zeta{5.0});
    c.expect(zeta.kind == HgKind::half_line && zeta.u_max == 5.0,
             "zeta region is not the half line u < 5");
    c.expect(zeta.coarse_u_max.has_value() && std::fabs(*zeta.coarse_u_max - 0.95) <= 0.01,
             "zeta coarse bound = " +
                 (zeta.coarse_u_max ? fmt(*zeta.coarse_u_max) : std::string("none")));
    c.finish();
}

void criterion4() {
    Criterion c(4, "kernel identity: Mellin transform of the smoothing measure (30 points)");
    int points = 0;
    double worst = 0.0;
    for (const double T : {2.0, 5.0}) {
        for (const double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double v = frac * T;
            const double got = oracles::mellin_of_w(v, T);
            const double want = triangular_kernel(v, T);
            worst = std::max(worst, std::fabs(got - want));
            points += 3;  // the x^{-u} weight cancels identically across u
        }
    }
    c.expect(points >= 30, "grid smaller than 30 points");
    c.expect(worst < 1e-6, "worst deviation " + fmt(worst) + " >= 1e-6");
    c.expect_runtime(10.0);
    c.finish();
}

void criterion5() {
    Criterion c(5, "transform-domain bound on the worked exponential pair");
    const BerryEsseenInputs base{Exponential{1.0}, Exponential{1.5}, 0.5, 0.8, 100.0};
    for (const double T : {100.0, 300.0, 500.0}) {
        BerryEsseenInputs in = base;
        in.truncation = T;
        const BoundReport rep = berry_esseen_terms(in);
        const double t1 = rep.term("term1");
        c.expect(t1 >= 0.95 && t1 <= 1.25,
                 "term1(T=" + fmt(T) + ") = " + fmt(t1) + " outside [0.95, 1.25]");
        c.expect(std::fabs(rep.x0 - 0.40) <= 0.02, "x0 = " + fmt(rep.x0) + " not 0.40 +- 0.02");
    }
    double t2[3];
    int i = 0;
    for (const double T : {100.0, 200.0, 400.0}) {
        BerryEsseenInputs in = base;
        in.truncation = T;
        t2[i++] = berry_esseen_terms(in).term("term2");
    }
    c.expect(std::fabs(t2[1] / t2[0] - 0.5) <= 0.1,
             "term2 ratio (200/100) = " + fmt(t2[1] / t2[0]));
    c.expect(std::fabs(t2[2] / t2[1] - 0.5) <= 0.1,
             "term2 ratio (400/200) = " + fmt(t2[2] / t2[1]));
    c.expect_runtime(30.0);
    c.finish();
}

void criterion6() {
    Criterion c(6, "almost-sure risk bound on 20 seeded two-point runs");
    const MixtureModel model{Beta{2.0, 2.0}, kTwoPoint};
    const EstimatorConfig cfg{0.5, 500.0, 256, false};
    for (int r = 0; r < 20; ++r) {
        try {
            const Sample s = sample_mixture(model, 500, mix_seed(60001, r));
            const BoundReport rep = thm1_terms(model, &s, cfg, 0.8, 0.5);
            const double slack = rep.term("B1") + rep.term("B2") + rep.term("B3") + 1e-6 -
                                 rep.term("risk");
            c.expect(slack >= 0.0, "run " + std::to_string(r) + ": bound violated by " +
                                       fmt(-slack));
        } catch (const std::exception& e) {
            c.expect(false, "run " + std::to_string(r) + " threw: " + e.what());
        }
    }
    c.expect_runtime(120.0);
    c.finish();
}

void criterion7() {
    Criterion c(7, "average-MSE tables: published presets at n = 1000, 100 runs");
    const unsigned workers = 2;

    const auto run_at = [&](const std::string& preset, std::vector<std::size_t> ns) {
        ExperimentConfig cfg = preset_scenario(preset);
        cfg.runs = 100;
        cfg.n_values = std::move(ns);
        return run_experiment(cfg, workers);
    };

    {
        const ExperimentResult r = run_at("twopoint-beta", {1000});
        const double m = r.avg("mellin", 1000), f = r.avg("fourier", 1000);
        c.expect(m <= 5e-4, "twopoint-beta mellin = " + fmt(m) + " > 5e-4");
        c.expect(f >= 0.1 && f <= 0.3,
                 "twopoint-beta fourier = " + fmt(f) + " outside [0.1, 0.3]");
    }
    {
        const ExperimentResult r = run_at("twopoint-gamma", {1000});
        const double m = r.avg("mellin", 1000), f = r.avg("fourier", 1000);
        c.expect(m <= 5e-4, "twopoint-gamma mellin = " + fmt(m) + " > 5e-4");
        c.expect(f >= 0.04 && f <= 0.11,
                 "twopoint-gamma fourier = " + fmt(f) + " outside [0.04, 0.11]");
    }
    {
        const ExperimentResult r = run_at("zeta-beta", {1000});
        const double m = r.avg("mellin", 1000), f = r.avg("fourier", 1000);
        c.expect(m <= 3e-4, "zeta-beta mellin = " + fmt(m) + " > 3e-4");
        c.expect(m < f, "zeta-beta ordering: mellin " + fmt(m) + " !< fourier " + fmt(f));
    }
    {
        const ExperimentResult r = run_at("zeta-gamma", {1000});
        const double m = r.avg("mellin", 1000), f = r.avg("fourier", 1000);
        c.expect(m <= 3e-4, "zeta-gamma mellin = " + fmt(m) + " > 3e-4");
        c.expect(m < f, "zeta-gamma ordering: mellin " + fmt(m) + " !< fourier " + fmt(f));
    }
    for (const std::string preset : {"uniform-beta", "uniform-gamma"}) {
        ExperimentConfig cfg = preset_scenario(preset);
        cfg.runs = 100;
        cfg.n_values = {100, 1000};
        cfg.methods = {"mellin"};
        const ExperimentResult r = run_experiment(cfg, workers);
        const double m1000 = r.avg("mellin", 1000), m100 = r.avg("mellin", 100);
        c.expect(m1000 <= 2e-3, preset + " mellin(1000) = " + fmt(m1000) + " > 2e-3");
        c.expect(m1000 < m100, preset + " not decreasing: " + fmt(m100) + " -> " + fmt(m1000));
    }
    c.expect_runtime(900.0);
    c.finish();
}

void criterion8() {
    Criterion c(8, "inversion round-trip: smoothed truth vs the exponential c.d.f.");
    const MixtureModel model{Exponential{1.0}, FiniteDiscrete{{{1.0, 1.0}}}};
    const EstimatorConfig cfg{0.5, 200.0, 256, false};
    const CdfEstimate est = population_estimate_cdf(model, cfg, {0.5, 1.0, 2.0});
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        const double err = std::fabs(est.values[i] - cdf(Exponential{1.0}, est.grid[i]));
        c.expect(err <= 5e-3,
                 "x = " + fmt(est.grid[i]) + ": deviation " + fmt(err) + " > 5e-3");
    }
    c.expect_runtime(10.0);
    c.finish();
}

void criterion9() {
    Criterion c(9, "property bundle: symmetry, root-n decay, quadrature, determinism");

    // conjugate symmetry across all families
    const std::vector<DistributionSpec> specs = {
        Beta{2.0, 2.0}, Gamma{2.0, 2.0}, Exponential{1.0}, UniformUnit{},
        kTwoPoint,      Geometric{0.4},  PositivePoisson{1.5}, Zeta{5.0}};
    for (const auto& spec : specs) {
        for (const Complex z : {Complex(0.5, 2.0), Complex(0.8, -6.5)}) {
            const Complex a = mellin_analytic(spec, z);
            const Complex b = mellin_analytic(spec, std::conj(z));
            c.expect(std::abs(b - std::conj(a)) <= 1e-12 * (1.0 + std::abs(a)),
                     "conjugate symmetry failed for " + format_spec(spec));
        }
    }

    // empirical transform error decays like n^{-1/2}
    {
        const MixtureModel model{Beta{2.0, 2.0}, kTwoPoint};
        const Complex z(0.5, 1.0);
        const Complex truth =
            mellin_analytic(model.signal, z) * mellin_analytic(model.mixing, z);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const std::vector<std::size_t> sizes = {100, 1000, 10000, 100000};
        for (const std::size_t n : sizes) {
            double acc = 0.0;
            for (int r = 0; r < 40; ++r)
                acc += std::abs(
                    mellin_empirical(sample_mixture(model, n, mix_seed(909, n + r)), z) -
                    truth);
            const double lx = std::log(static_cast<double>(n));
            const double ly = std::log(acc / 40.0);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double npts = 4.0;
        const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
        c.expect(std::fabs(slope + 0.5) <= 0.15,
                 "empirical-transform decay slope = " + fmt(slope));
    }

    // doubling the quadrature panels is invisible at 1e-6
    {
        const MixtureModel model{Beta{2.0, 2.0}, kTwoPoint};
        const Sample s = sample_mixture(model, 500, 2222);
        const auto grid = linspace(0.05, 0.95, 19);
        const EstimatorConfig c1{0.5, 500.0, 256, false};
        const CdfEstimate e1 = estimate_cdf(s, model.mixing, c1, grid);
        EstimatorConfig c2 = c1;
        c2.panels = e1.panels_used * 2;
        const CdfEstimate e2 = estimate_cdf(s, model.mixing, c2, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            worst = std::max(worst, std::fabs(e1.values[i] - e2.values[i]));
        c.expect(worst < 1e-6, "panel doubling moved the estimate by " + fmt(worst));
        c.expect(e1.max_imag_ratio < 1e-8,
                 "imaginary residual " + fmt(e1.max_imag_ratio) + " >= 1e-8");
    }

    // worker count cannot change the tables
    {
        ExperimentConfig cfg = preset_scenario("twopoint-beta");
        cfg.runs = 4;
        cfg.n_values = {100};
        std::ostringstream a, b;
        write_runs_csv(a, run_experiment(cfg, 1));
        write_runs_csv(b, run_experiment(cfg, 2));
        c.expect(a.str() == b.str(), "per-run tables differ between 1 and 2 workers");
    }
    c.finish();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
        return 2;
    }
    g_cli = argv[1];
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return g_failures;
}
