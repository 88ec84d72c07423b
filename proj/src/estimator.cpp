#include "scalemix/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "scalemix/errors.hpp"

namespace scalemix {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMinGridX = 1e-6;   // x^{1-u-iv} magnitudes blow past this
constexpr double kHazard = 1e-14;    // |M[G]| floor for the division
constexpr std::size_t kPanelCap = std::size_t(1) << 18;

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError("estimation grid is empty");
    double prev = 0.0;
    for (const double x : grid) {
        if (!(x > 0.0)) throw DomainError("grid points must be positive");
        if (x < kMinGridX)
            throw DomainError("grid point " + std::to_string(x) + " below the supported 1e-6");
        if (x <= prev) throw ConfigError("grid points must be strictly increasing");
        prev = x;
    }
}

double max_abs_log(const std::vector<double>& xs) {
    double m = 0.0;
    for (const double x : xs) {
        if (!(x > 0.0)) throw DataError("all values must be strictly positive");
        m = std::max(m, std::fabs(std::log(x)));
    }
    return m;
}

// Scan |M[G](u + iv)| on [0, T]; the largest relative slope |phi'| / phi
// sets the node density needed around near-zeros of the denominator.
struct DipScan {
    double min_abs = 1.0;
    double max_rel_slope = 0.0;  // 1 / (local variation scale)
};

DipScan scan_mixing_line(const DistributionSpec& g, double u, double T) {
    const std::size_t count = 4097;
    const double h = T / static_cast<double>(count - 1);
    const auto vals = analytic_on_grid(g, u, 0.0, h, count);
    DipScan scan;
    scan.min_abs = std::abs(vals[0]);
    double prev = scan.min_abs;
    for (std::size_t j = 1; j < count; ++j) {
        const double a = std::abs(vals[j]);
        scan.min_abs = std::min(scan.min_abs, a);
        const double local = std::min(a, prev);
        if (local > 0.0)
            scan.max_rel_slope = std::max(scan.max_rel_slope, std::fabs(a - prev) / h / local);
        prev = a;
    }
    return scan;
}

std::size_t round_up4(std::size_t p) { return (p + 3) / 4 * 4; }

}  // namespace

void validate(const EstimatorConfig& cfg) {
    if (!(cfg.u_star < 1.0)) throw ConfigError("u_star must be < 1");
    if (!(cfg.truncation > 0.0)) throw ConfigError("truncation T must be > 0");
}

double triangular_kernel(double v, double T) {
    if (!(T > 0.0)) throw ConfigError("triangular kernel needs T > 0");
    const double a = std::fabs(v);
    return a <= T ? 1.0 - a / T : 0.0;
}

double pointwise_risk(double estimate_value, double true_value, double u_star, double x) {
    if (!(x > 0.0)) throw DomainError("pointwise risk requires x > 0");
    return std::pow(x, u_star - 1.0) * std::fabs(true_value - estimate_value);
}

Complex ContourWorkspace::invert(const std::vector<Complex>& numerators, double x) const {
    const double y = std::log(x);
    const Complex step = std::polar(1.0, -h * y);
    Complex cur = std::polar(1.0, -v[0] * y);
    Complex acc(0.0, 0.0);
    constexpr std::size_t kResync = 2048;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (j % kResync == 0 && j != 0) cur = std::polar(1.0, -v[j] * y);
        acc += weight[j] * numerators[j] * cur;
        cur *= step;
    }
    return std::exp((1.0 - u) * y) / (2.0 * kPi) * acc;
}

ContourWorkspace make_contour(double u, double T, std::size_t panels_request,
                              double max_abs_log_x, double max_abs_log_data,
                              const DistributionSpec* mixing) {
    ContourWorkspace ws;
    ws.u = u;
    ws.T = T;

    std::size_t p = std::max<std::size_t>(panels_request, 256);
    // oscillation floors: the x side alone, then 16 nodes per period of the
    // fastest combined phase ln(X_i / x)
    p = std::max(p, static_cast<std::size_t>(std::ceil(T / kPi * max_abs_log_x * 8.0)));
    p = std::max(p, static_cast<std::size_t>(
                        std::ceil(16.0 * T * (max_abs_log_x + max_abs_log_data) / kPi)));
    // base resolution for the numerator's own variation (gamma-type decay)
    // and the Lorentzian factor 1/((1-u) - iv)
    p = std::max(p, static_cast<std::size_t>(std::ceil(40.0 * T)));
    p = std::max(p, static_cast<std::size_t>(
                        std::ceil(20.0 * T / std::max(0.01, std::fabs(1.0 - u)))));
    if (mixing != nullptr) {
        const DipScan scan = scan_mixing_line(*mixing, u, T);
        if (scan.max_rel_slope > 0.0) {
            const double p_dip = 32.0 * T * scan.max_rel_slope;
            p = std::max(p, static_cast<std::size_t>(std::min<double>(
                                std::ceil(p_dip), static_cast<double>(kPanelCap))));
        }
    }
    p = std::min(p, kPanelCap * 4);
    ws.panels = round_up4(p);

    ws.h = 2.0 * T / static_cast<double>(ws.panels);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(ws.panels / 2);
    ws.v.resize(ws.panels + 1);
    ws.weight.resize(ws.panels + 1);
    for (std::size_t j = 0; j <= ws.panels; ++j) {
        const double vj = ws.h * static_cast<double>(static_cast<std::ptrdiff_t>(j) - half);
        ws.v[j] = vj;
        double sw = (j == 0 || j == ws.panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        sw *= ws.h / 3.0;
        ws.weight[j] = sw * triangular_kernel(vj, T) / Complex(1.0 - u, -vj);
    }
    return ws;
}

std::vector<Complex> estimator_numerators(const ContourWorkspace& ws, const Sample& sample,
                                          const DistributionSpec& mixing) {
    auto num = empirical_on_grid(sample, ws.u, ws.v.front(), ws.h, ws.v.size());
    const auto mg = analytic_on_grid(mixing, ws.u, ws.v.front(), ws.h, ws.v.size());
    for (std::size_t j = 0; j < num.size(); ++j) {
        if (std::abs(mg[j]) < kHazard)
            throw DivisionHazardError("|M[G](u+iv)| < 1e-14 at u = " + std::to_string(ws.u) +
                                      ", v = " + std::to_string(ws.v[j]) +
                                      "; choose u inside the feasible region of G");
        num[j] /= mg[j];
    }
    return num;
}

std::vector<Complex> population_numerators(const ContourWorkspace& ws,
                                           const DistributionSpec& signal) {
    return analytic_on_grid(signal, ws.u, ws.v.front(), ws.h, ws.v.size());
}

namespace {

CdfEstimate run_inversion(const ContourWorkspace& ws, const std::vector<Complex>& num,
                          const EstimatorConfig& cfg, std::vector<double> grid) {
    CdfEstimate est;
    est.grid = std::move(grid);
    est.config = cfg;
    est.panels_used = ws.panels;
    est.values.reserve(est.grid.size());
    for (const double x : est.grid) {
        const Complex val = ws.invert(num, x);
        est.max_imag_ratio =
            std::max(est.max_imag_ratio, std::abs(val.imag()) / (1.0 + std::abs(val.real())));
        double fx = val.real();
        if (cfg.clip_to_unit) fx = std::clamp(fx, 0.0, 1.0);
        est.values.push_back(fx);
    }
    return est;
}

}  // namespace

CdfEstimate estimate_cdf(const Sample& sample, const DistributionSpec& mixing,
                         const EstimatorConfig& cfg, std::vector<double> grid) {
    validate(cfg);
    check_grid(grid);
    // feasibility: an excluded line is rejected up front; families without an
    // analysed region fall back to the per-node hazard check
    try {
        const HgRegion region = hg_region(mixing);
        if (region.kind == HgKind::punctured_line && cfg.u_star == region.u_excluded)
            throw FeasibilityError("u_star = " + std::to_string(cfg.u_star) +
                                   " is the excluded line of the mixing law");
    } catch (const UnsupportedFamilyError&) {
    }

    const ContourWorkspace ws =
        make_contour(cfg.u_star, cfg.truncation, cfg.panels, max_abs_log(grid),
                     max_abs_log(sample.values), &mixing);
    const auto num = estimator_numerators(ws, sample, mixing);
    CdfEstimate est = run_inversion(ws, num, cfg, std::move(grid));
    est.n = sample.values.size();
    est.seed = sample.seed;
    return est;
}

CdfEstimate population_estimate_cdf(const MixtureModel& model, const EstimatorConfig& cfg,
                                    std::vector<double> grid) {
    validate(cfg);
    check_grid(grid);
    if (!strip(model.signal).contains(cfg.u_star))
        throw StripError("u_star = " + std::to_string(cfg.u_star) +
                         " outside the strip of the signal law");
    const ContourWorkspace ws =
        make_contour(cfg.u_star, cfg.truncation, cfg.panels, max_abs_log(grid), 0.0, nullptr);
    const auto num = population_numerators(ws, model.signal);
    CdfEstimate est = run_inversion(ws, num, cfg, std::move(grid));
    est.method = "population";
    return est;
}

PopulationSmoother::PopulationSmoother(const DistributionSpec& signal,
                                       const EstimatorConfig& cfg, double max_abs_log_x)
    : u_(cfg.u_star) {
    validate(cfg);
    if (!strip(signal).contains(cfg.u_star))
        throw StripError("u_star outside the strip of the signal law");
    ws_ = make_contour(cfg.u_star, cfg.truncation, cfg.panels, max_abs_log_x, 0.0, nullptr);
    num_ = population_numerators(ws_, signal);
}

double PopulationSmoother::operator()(double x) const {
    if (!(x > 0.0)) throw DomainError("population smoother requires x > 0");
    return ws_.invert(num_, x).real();
}

void write_estimate_csv(std::ostream& os, const CdfEstimate& est) {
    os << "# method=" << est.method << " u_star=" << est.config.u_star
       << " T=" << est.config.truncation << " panels=" << est.panels_used << " n=" << est.n
       << " seed=" << est.seed << " clip=" << (est.config.clip_to_unit ? 1 : 0) << "\n";
    os << "x,fhat\n";
    char buf[96];
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", est.grid[i], est.values[i]);
        os << buf;
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
    if (points == 0) throw ConfigError("linspace needs at least one point");
    std::vector<double> xs(points);
    if (points == 1) {
        xs[0] = lo;
        return xs;
    }
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) xs[i] = lo + step * static_cast<double>(i);
    return xs;
}

}  // namespace scalemix
