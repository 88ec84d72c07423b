// Command-line front end: transforms, estimation, bounds, feasibility
// checks and the Monte-Carlo harness. Resolved configuration goes to
// stderr, results to stdout, tables to --out.

#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scalemix/bounds.hpp"
#include "scalemix/distributions.hpp"
#include "scalemix/errors.hpp"
#include "scalemix/estimator.hpp"
#include "scalemix/fourier.hpp"
#include "scalemix/harness.hpp"
#include "scalemix/mellin.hpp"

namespace {

using namespace scalemix;

constexpr int kExitUsage = 64;
constexpr int kExitDomain = 65;
constexpr int kExitData = 66;

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt_complex(Complex z) {
    const std::string im = fmt6(std::fabs(z.imag()));
    return fmt6(z.real()) + (z.imag() < 0.0 ? "-" : "+") + im + "i";
}

// complex flags use a+bi / a-bi syntax; a plain real is accepted too
Complex parse_complex(const std::string& text) {
    const std::string s = text;
    if (s.empty()) throw UsageError("empty complex literal");
    if (s.back() != 'i') {
        try {
            return Complex(std::stod(s), 0.0);
        } catch (const std::exception&) {
            throw UsageError("cannot parse complex literal '" + text + "' (use a+bi)");
        }
    }
    // find the sign separating real and imaginary parts (skip a leading sign
    // and exponent signs)
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') split = i;
    }
    try {
        if (split == std::string::npos)  // pure imaginary, e.g. "1.5i"
            return Complex(0.0, std::stod(s.substr(0, s.size() - 1)));
        const double re = std::stod(s.substr(0, split));
        std::string imtext = s.substr(split, s.size() - split - 1);
        if (imtext == "+" || imtext == "-") imtext += "1";
        return Complex(re, std::stod(imtext));
    } catch (const std::exception&) {
        throw UsageError("cannot parse complex literal '" + text + "' (use a+bi)");
    }
}

std::vector<double> parse_grid_spec(const std::string& text) {
    double lo = 0.0, hi = 0.0;
    unsigned long count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lu", &lo, &hi, &count) != 3)
        throw UsageError("grid expects lo:hi:count, got '" + text + "'");
    if (count == 0) throw UsageError("grid needs at least one point");
    return linspace(lo, hi, count);
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(',', start);
        const std::string tok =
            text.substr(start, pos == std::string::npos ? pos : pos - start);
        if (!tok.empty()) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw UsageError("cannot parse number '" + tok + "' in list");
            }
        }
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (out.empty()) throw UsageError("expected a comma-separated list of numbers");
    return out;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream os(path);
    if (!os) throw DataError("cannot open output file " + path.string());
    std::cerr << "# writing " << path.string() << "\n";
    return os;
}

void echo_config(const std::string& what,
                 std::initializer_list<std::pair<const char*, std::string>> kv) {
    std::cerr << "# " << what;
    for (const auto& [k, v] : kv) std::cerr << " " << k << "=" << v;
    std::cerr << "\n";
}

Sample obtain_sample(const std::string& sample_file, const std::string& signal,
                     const std::string& mixing, std::size_t n, std::uint64_t seed) {
    if (!sample_file.empty()) {
        std::ifstream is(sample_file);
        if (!is) throw DataError("cannot open sample file '" + sample_file + "'");
        return read_sample(is);
    }
    if (signal.empty())
        throw UsageError("either --sample FILE or --signal SPEC (with --n) is required");
    const MixtureModel model{parse_spec(signal), parse_spec(mixing)};
    return sample_mixture(model, n, seed);
}

void print_report(const BoundReport& rep, const std::string& out_dir) {
    for (const auto& [name, value] : rep.terms)
        std::cout << name << " = " << fmt6(value) << "\n";
    std::cout << "x0 = " << fmt6(rep.x0) << "\n";
    std::cout << "rho = " << fmt6(rep.rho) << "\n";
    if (!out_dir.empty()) {
        auto os = open_out(out_dir, "report.json");
        os << bound_report_json(rep) << "\n";
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Mellin-transform estimation for multiplicative scale mixtures"};
    app.require_subcommand(1);

    // ---- transform -----------------------------------------------------
    auto* t = app.add_subcommand("transform", "Mellin transform values");
    std::string t_dist, t_sample, t_mixing, t_z;
    t->add_option("--dist", t_dist, "distribution spec (analytic transform)");
    t->add_option("--sample", t_sample, "sample file (empirical transform)");
    t->add_option("--mixing", t_mixing, "mixing spec (ratio estimate with --sample)");
    t->add_option("--z", t_z, "evaluation point a+bi")->required();

    // ---- estimate --------------------------------------------------------
    auto* e = app.add_subcommand("estimate", "Mellin-inversion c.d.f. estimate");
    std::string e_sample, e_signal, e_mixing, e_grid, e_out;
    double e_u = 0.5, e_T = 0.0;
    std::size_t e_panels = 256, e_n = 1000;
    std::uint64_t e_seed = 1;
    bool e_clip = false, e_population = false;
    e->add_option("--sample", e_sample, "sample file");
    e->add_option("--signal", e_signal, "signal spec (synthesize or population)");
    e->add_option("--mixing", e_mixing, "mixing spec")->required();
    e->add_option("--u", e_u, "contour real part u")->required();
    e->add_option("--T", e_T, "kernel truncation T")->required();
    e->add_option("--panels", e_panels, "quadrature panel request");
    e->add_flag("--clip", e_clip, "clamp the estimate into [0,1]");
    e->add_flag("--population", e_population, "noise-free population version");
    e->add_option("--grid", e_grid, "evaluation grid lo:hi:count")->required();
    e->add_option("--n", e_n, "sample size when synthesizing");
    e->add_option("--seed", e_seed, "seed when synthesizing");
    e->add_option("--out", e_out, "output directory");

    // ---- fourier-estimate --------------------------------------------------
    auto* f = app.add_subcommand("fourier-estimate", "log-domain Fourier baseline");
    std::string f_sample, f_signal, f_mixing, f_grid, f_out;
    double f_R = 1.0, f_h = 0.0, f_anchor = 0.001;
    std::size_t f_n = 1000;
    std::uint64_t f_seed = 1;
    f->add_option("--sample", f_sample, "sample file");
    f->add_option("--signal", f_signal, "signal spec (synthesize)");
    f->add_option("--mixing", f_mixing, "mixing spec")->required();
    f->add_option("--cutoff", f_R, "frequency cutoff R_n")->required();
    f->add_option("--bandwidth", f_h, "Gaussian kernel bandwidth h");
    f->add_option("--anchor-quantile", f_anchor, "left anchor quantile");
    f->add_option("--grid", f_grid, "evaluation grid lo:hi:count")->required();
    f->add_option("--n", f_n, "sample size when synthesizing");
    f->add_option("--seed", f_seed, "seed when synthesizing");
    f->add_option("--out", f_out, "output directory");

    // ---- bounds --------------------------------------------------------------
    auto* b = app.add_subcommand("bounds", "bound calculators");
    b->require_subcommand(1);
    auto* b_cb = b->add_subcommand("cb", "root c(b) of the sine-kernel mass equation");
    double cb_b = 0.8;
    b_cb->add_option("--b", cb_b, "parameter b > 2/pi")->required();

    auto* b_mt = b->add_subcommand("min-t", "minimal admissible truncation");
    double mt_b = 0.8, mt_u = 0.5;
    b_mt->add_option("--b", mt_b)->required();
    b_mt->add_option("--u", mt_u)->required();

    auto* b_rho = b->add_subcommand("rho", "weighted sup-distance and argmax");
    std::string rho_phi, rho_psi;
    double rho_u = 0.5;
    b_rho->add_option("--phi", rho_phi)->required();
    b_rho->add_option("--psi", rho_psi)->required();
    b_rho->add_option("--u", rho_u)->required();

    auto* b_be = b->add_subcommand("berry", "transform-domain Berry-Esseen terms");
    std::string be_phi, be_psi, be_out;
    double be_u = 0.5, be_b = 0.8, be_T = 100.0;
    b_be->add_option("--phi", be_phi)->required();
    b_be->add_option("--psi", be_psi)->required();
    b_be->add_option("--u", be_u)->required();
    b_be->add_option("--b", be_b)->required();
    b_be->add_option("--T", be_T)->required();
    b_be->add_option("--out", be_out);

    auto* b_t1 = b->add_subcommand("thm1", "almost-sure risk bound terms");
    auto* b_t2 = b->add_subcommand("thm2", "mean-square risk bound terms");
    std::string th_signal, th_mixing, th_out;
    double th_u = 0.5, th_T = 500.0, th_b = 0.8, th_x = 0.5;
    std::size_t th_n = 500;
    std::uint64_t th_seed = 1;
    bool th_population = false;
    for (auto* sub : {b_t1, b_t2}) {
        sub->add_option("--signal", th_signal)->required();
        sub->add_option("--mixing", th_mixing)->required();
        sub->add_option("--u", th_u)->required();
        sub->add_option("--T", th_T)->required();
        sub->add_option("--b", th_b)->required();
        sub->add_option("--x", th_x)->required();
        sub->add_option("--n", th_n)->required();
        sub->add_option("--out", th_out);
    }
    b_t1->add_option("--seed", th_seed, "sample seed");
    b_t1->add_flag("--population", th_population, "exact-transform surrogate (B3 = 0)");

    // ---- hg ---------------------------------------------------------------
    auto* h = app.add_subcommand("hg", "feasible contour region of a mixing law");
    std::string h_dist;
    bool h_threshold = false;
    h->add_option("--dist", h_dist, "mixing spec");
    h->add_flag("--pospoisson-threshold", h_threshold,
                "print the positive root of exp(l) = 3l + 1");

    // ---- simulate / profile / tune ------------------------------------------
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo MSE experiment");
    auto* prof = app.add_subcommand("profile", "pointwise risk profiles");
    auto* tune = app.add_subcommand("tune", "oracle parameter tuning");
    std::string s_preset, s_scenario, s_out = ".", s_methods, s_nlist;
    std::size_t s_runs = 0;
    std::uint64_t s_seed = 0;
    bool s_have_seed = false;
    unsigned s_workers = 1;
    for (auto* sub : {sim, prof, tune}) {
        sub->add_option("--preset", s_preset, "named scenario preset");
        sub->add_option("--scenario", s_scenario, "scenario file");
        sub->add_option("--runs", s_runs, "simulation runs");
        sub->add_option("--n", s_nlist, "comma list of sample sizes");
        sub->add_option("--seed", s_seed, "master seed")
            ->each([&](const std::string&) { s_have_seed = true; });
        sub->add_option("--workers", s_workers, "worker threads");
        sub->add_option("--out", s_out, "output directory");
    }
    sim->add_option("--methods", s_methods, "comma list: mellin,fourier");
    std::string p_vary = "x", p_values;
    prof->add_option("--vary", p_vary, "x or u_star")->required();
    prof->add_option("--values", p_values, "comma list of varied values")->required();
    std::string tu_method = "mellin", tu_param = "T", tu_grid;
    std::size_t tu_runs = 50;
    tune->add_option("--method", tu_method)->required();
    tune->add_option("--parameter", tu_param)->required();
    tune->add_option("--grid", tu_grid, "comma list of candidate values")->required();
    tune->add_option("--tuning-runs", tu_runs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const auto scenario_config = [&]() {
        if (!s_preset.empty() && !s_scenario.empty())
            throw UsageError("--preset and --scenario are mutually exclusive");
        ExperimentConfig cfg;
        if (!s_preset.empty())
            cfg = preset_scenario(s_preset);
        else if (!s_scenario.empty())
            cfg = load_scenario_file(s_scenario);
        else
            throw UsageError("one of --preset or --scenario is required");
        if (s_runs > 0) cfg.runs = s_runs;
        if (s_have_seed) cfg.seed = s_seed;
        if (!s_methods.empty()) {
            cfg.methods.clear();
            std::size_t start = 0;
            while (start <= s_methods.size()) {
                const auto pos = s_methods.find(',', start);
                cfg.methods.push_back(
                    s_methods.substr(start, pos == std::string::npos ? pos : pos - start));
                if (pos == std::string::npos) break;
                start = pos + 1;
            }
        }
        if (!s_nlist.empty()) {
            cfg.n_values.clear();
            for (const double n : parse_double_list(s_nlist))
                cfg.n_values.push_back(static_cast<std::size_t>(n));
        }
        return cfg;
    };

    if (*t) {
        const Complex z = parse_complex(t_z);
        if (!t_sample.empty()) {
            std::ifstream is(t_sample);
            if (!is) throw DataError("cannot open sample file '" + t_sample + "'");
            const Sample sample = read_sample(is);
            if (!t_mixing.empty()) {
                const DistributionSpec g = parse_spec(t_mixing);
                echo_config("transform", {{"mode", "ratio"},
                                          {"mixing", format_spec(g)},
                                          {"z", fmt_complex(z)},
                                          {"n", std::to_string(sample.values.size())}});
                std::cout << fmt_complex(mellin_ratio_estimate(sample, g, z)) << "\n";
            } else {
                echo_config("transform", {{"mode", "empirical"},
                                          {"z", fmt_complex(z)},
                                          {"n", std::to_string(sample.values.size())}});
                std::cout << fmt_complex(mellin_empirical(sample, z)) << "\n";
            }
        } else {
            if (t_dist.empty()) throw UsageError("transform needs --dist or --sample");
            const DistributionSpec spec = parse_spec(t_dist);
            const StripInterval s = strip(spec);
            echo_config("transform",
                        {{"mode", "analytic"},
                         {"dist", format_spec(spec)},
                         {"z", fmt_complex(z)},
                         {"strip", "(" + fmt6(s.alpha) + "," + fmt6(s.beta) + ")"}});
            std::cout << fmt_complex(mellin_analytic(spec, z)) << "\n";
        }
        return 0;
    }

    if (*e) {
        const DistributionSpec g = parse_spec(e_mixing);
        EstimatorConfig cfg{e_u, e_T, e_panels, e_clip};
        std::vector<double> grid = parse_grid_spec(e_grid);
        CdfEstimate est;
        if (e_population) {
            if (e_signal.empty()) throw UsageError("--population requires --signal");
            const MixtureModel model{parse_spec(e_signal), g};
            echo_config("estimate", {{"mode", "population"},
                                     {"signal", format_spec(model.signal)},
                                     {"mixing", format_spec(g)},
                                     {"u", fmt6(e_u)},
                                     {"T", fmt6(e_T)}});
            est = population_estimate_cdf(model, cfg, std::move(grid));
        } else {
            const Sample sample = obtain_sample(e_sample, e_signal, e_mixing, e_n, e_seed);
            echo_config("estimate", {{"mixing", format_spec(g)},
                                     {"u", fmt6(e_u)},
                                     {"T", fmt6(e_T)},
                                     {"n", std::to_string(sample.values.size())},
                                     {"seed", std::to_string(sample.seed)},
                                     {"clip", e_clip ? "1" : "0"}});
            est = estimate_cdf(sample, g, cfg, std::move(grid));
        }
        if (!e_out.empty()) {
            auto os = open_out(e_out, "estimate.csv");
            write_estimate_csv(os, est);
        } else {
            write_estimate_csv(std::cout, est);
        }
        return 0;
    }

    if (*f) {
        const DistributionSpec g = parse_spec(f_mixing);
        const Sample sample = obtain_sample(f_sample, f_signal, f_mixing, f_n, f_seed);
        FourierConfig cfg{f_R, f_h, f_anchor};
        echo_config("fourier-estimate", {{"mixing", format_spec(g)},
                                         {"cutoff", fmt6(f_R)},
                                         {"bandwidth", fmt6(f_h)},
                                         {"n", std::to_string(sample.values.size())},
                                         {"seed", std::to_string(sample.seed)}});
        const CdfEstimate est = fourier_estimate_cdf(sample, g, cfg, parse_grid_spec(f_grid));
        if (!f_out.empty()) {
            auto os = open_out(f_out, "fourier.csv");
            write_estimate_csv(os, est);
        } else {
            write_estimate_csv(std::cout, est);
        }
        return 0;
    }

    if (*b) {
        if (*b_cb) {
            echo_config("bounds cb", {{"b", fmt6(cb_b)}});
            std::cout << fmt6(solve_cb(cb_b)) << "\n";
            return 0;
        }
        if (*b_mt) {
            echo_config("bounds min-t", {{"b", fmt6(mt_b)}, {"u", fmt6(mt_u)}});
            std::cout << fmt6(min_T(mt_b, mt_u)) << "\n";
            return 0;
        }
        if (*b_rho) {
            const DistributionSpec phi = parse_spec(rho_phi);
            const DistributionSpec psi = parse_spec(rho_psi);
            echo_config("bounds rho", {{"phi", format_spec(phi)},
                                       {"psi", format_spec(psi)},
                                       {"u", fmt6(rho_u)}});
            const RhoResult r = rho_sup([&](double x) { return cdf(phi, x); },
                                        [&](double x) { return cdf(psi, x); }, rho_u);
            std::cout << "x0 = " << fmt6(r.x0) << "\n"
                      << "rho = " << fmt6(r.rho) << "\n";
            return 0;
        }
        if (*b_be) {
            BerryEsseenInputs in{parse_spec(be_phi), parse_spec(be_psi), be_u, be_b, be_T};
            echo_config("bounds berry", {{"phi", format_spec(in.phi)},
                                         {"psi", format_spec(in.psi)},
                                         {"u", fmt6(be_u)},
                                         {"b", fmt6(be_b)},
                                         {"T", fmt6(be_T)}});
            print_report(berry_esseen_terms(in), be_out);
            return 0;
        }
        const MixtureModel model{parse_spec(th_signal), parse_spec(th_mixing)};
        const EstimatorConfig cfg{th_u, th_T, 256, false};
        if (*b_t1) {
            echo_config("bounds thm1", {{"signal", format_spec(model.signal)},
                                        {"mixing", format_spec(model.mixing)},
                                        {"u", fmt6(th_u)},
                                        {"T", fmt6(th_T)},
                                        {"b", fmt6(th_b)},
                                        {"x", fmt6(th_x)},
                                        {"n", std::to_string(th_n)},
                                        {"seed", std::to_string(th_seed)},
                                        {"population", th_population ? "1" : "0"}});
            if (th_population) {
                print_report(thm1_terms(model, nullptr, cfg, th_b, th_x), th_out);
            } else {
                const Sample sample = sample_mixture(model, th_n, th_seed);
                print_report(thm1_terms(model, &sample, cfg, th_b, th_x), th_out);
            }
            return 0;
        }
        echo_config("bounds thm2", {{"signal", format_spec(model.signal)},
                                    {"mixing", format_spec(model.mixing)},
                                    {"u", fmt6(th_u)},
                                    {"T", fmt6(th_T)},
                                    {"b", fmt6(th_b)},
                                    {"x", fmt6(th_x)},
                                    {"n", std::to_string(th_n)}});
        print_report(thm2_terms(model, cfg, th_b, th_x, th_n), th_out);
        return 0;
    }

    if (*h) {
        if (h_threshold) {
            echo_config("hg", {{"mode", "pospoisson-threshold"}});
            std::cout << fmt6(positive_poisson_threshold()) << "\n";
            return 0;
        }
        if (h_dist.empty()) throw UsageError("hg needs --dist or --pospoisson-threshold");
        const DistributionSpec g = parse_spec(h_dist);
        echo_config("hg", {{"dist", format_spec(g)}});
        const HgRegion r = hg_region(g);
        switch (r.kind) {
            case HgKind::half_line:
                std::cout << "region = half_line u < " << fmt6(r.u_max) << "\n";
                break;
            case HgKind::punctured_line:
                std::cout << "region = punctured_line excluding u = " << fmt6(r.u_excluded)
                          << "\n";
                break;
            case HgKind::whole_line:
                std::cout << "region = whole_line\n";
                break;
        }
        std::cout << "conservative = " << (r.conservative ? 1 : 0) << "\n";
        if (r.coarse_u_max) std::cout << "coarse_bound u < " << fmt6(*r.coarse_u_max) << "\n";
        if (r.decays_at_infinity)
            std::cout << "note: |M[G]| decays along the line; use a finite T\n";
        return 0;
    }

    if (*sim) {
        ExperimentConfig cfg = scenario_config();
        echo_config("simulate", {{"scenario", cfg.label},
                                 {"canonical", scenario_canonical_string(cfg)},
                                 {"workers", std::to_string(s_workers)}});
        const ExperimentResult result = run_experiment(cfg, s_workers);
        {
            auto os = open_out(s_out, "mse_table.csv");
            write_mse_csv(os, result);
        }
        {
            auto os = open_out(s_out, "runs.csv");
            write_runs_csv(os, result);
        }
        {
            auto os = open_out(s_out, "summary.json");
            os << summary_json(result) << "\n";
        }
        write_mse_csv(std::cout, result);
        return 0;
    }

    if (*prof) {
        ExperimentConfig cfg = scenario_config();
        if (s_runs == 0) cfg.runs = 25;
        echo_config("profile", {{"scenario", cfg.label},
                                {"vary", p_vary},
                                {"values", p_values},
                                {"runs", std::to_string(cfg.runs)}});
        const auto points = risk_profile(cfg, p_vary, parse_double_list(p_values), s_workers);
        {
            auto os = open_out(s_out, "profile.csv");
            write_profile_csv(os, p_vary, points);
        }
        write_profile_csv(std::cout, p_vary, points);
        return 0;
    }

    if (*tune) {
        ExperimentConfig cfg = scenario_config();
        echo_config("tune", {{"scenario", cfg.label},
                             {"method", tu_method},
                             {"parameter", tu_param},
                             {"grid", tu_grid},
                             {"tuning_runs", std::to_string(tu_runs)}});
        const double best = oracle_tune(cfg, tu_method, tu_param, parse_double_list(tu_grid),
                                        tu_runs, s_workers);
        std::cout << fmt6(best) << "\n";
        return 0;
    }

    throw UsageError("no subcommand selected");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const scalemix::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.category()) {
            case scalemix::ErrorCategory::usage: return kExitUsage;
            case scalemix::ErrorCategory::data: return kExitData;
            case scalemix::ErrorCategory::domain: return kExitDomain;
        }
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}
