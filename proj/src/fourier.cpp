#include "scalemix/fourier.hpp"

#include <algorithm>
#include <cmath>

#include "scalemix/errors.hpp"

namespace scalemix {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kPanelCap = std::size_t(1) << 18;

// essential-sup proxy for the noise support: exact for finite discrete and
// uniform mixing, a high quantile otherwise
double eta_sup_proxy(const DistributionSpec& g) {
    if (const auto* fd = std::get_if<FiniteDiscrete>(&g)) return fd->atoms.back().sigma;
    if (std::holds_alternative<UniformUnit>(g)) return 1.0;
    return quantile(g, 0.999);
}

double empirical_quantile(const Sample& sample, double q) {
    std::vector<double> sorted = sample.values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    if (k == 0) k = 1;
    if (k > n) k = n;
    return sorted[k - 1];
}

}  // namespace

void validate(const FourierConfig& cfg) {
    if (!(cfg.cutoff > 0.0)) throw ConfigError("fourier cutoff R_n must be > 0");
    if (!(cfg.bandwidth >= 0.0)) throw ConfigError("fourier bandwidth h must be >= 0");
    if (!(cfg.anchor_quantile > 0.0 && cfg.anchor_quantile < 1.0))
        throw ConfigError("anchor quantile must lie in (0,1)");
}

Complex char_log_mixing(const DistributionSpec& g, double t) {
    return mellin_analytic(g, Complex(1.0, t));
}

Complex fourier_step_factor(double t, double y) {
    if (t == 0.0) return Complex(y, 0.0);
    return (std::exp(Complex(0.0, -t * y)) - 1.0) * Complex(0.0, 1.0) / t;
}

CdfEstimate fourier_estimate_cdf(const Sample& sample, const DistributionSpec& mixing,
                                 const FourierConfig& cfg, std::vector<double> grid) {
    validate(cfg);
    if (grid.empty()) throw ConfigError("estimation grid is empty");
    double prev = 0.0;
    for (const double x : grid) {
        if (!(x > 0.0)) throw DomainError("grid points must be positive");
        if (x <= prev) throw ConfigError("grid points must be strictly increasing");
        prev = x;
    }

    double max_log_data = 0.0;
    for (const double x : sample.values) {
        if (!(x > 0.0)) throw DataError("sample values must be strictly positive");
        max_log_data = std::max(max_log_data, std::fabs(std::log(x)));
    }

    const double y_min = std::log(empirical_quantile(sample, cfg.anchor_quantile)) -
                         std::log(eta_sup_proxy(mixing));
    double max_abs_y = std::fabs(y_min);
    for (const double x : grid) max_abs_y = std::max(max_abs_y, std::fabs(std::log(x)));

    const double R = cfg.cutoff;
    std::size_t p = std::max<std::size_t>(cfg.panels, 256);
    p = std::max(p, static_cast<std::size_t>(
                        std::ceil(16.0 * R * (max_abs_y + max_log_data) / kPi)));
    // resolve near-zeros of |phi_{log eta}| inside the window
    {
        const std::size_t count = 2049;
        const double hs = R / static_cast<double>(count - 1);
        const auto vals = analytic_on_grid(mixing, 1.0, 0.0, hs, count);
        double rel_slope = 0.0;
        double prev_abs = std::abs(vals[0]);
        for (std::size_t j = 1; j < count; ++j) {
            const double a = std::abs(vals[j]);
            const double local = std::min(a, prev_abs);
            if (local > 0.0)
                rel_slope = std::max(rel_slope, std::fabs(a - prev_abs) / hs / local);
            prev_abs = a;
        }
        if (rel_slope > 0.0) {
            const double p_dip = 32.0 * R * rel_slope;
            p = std::max(p, static_cast<std::size_t>(
                                std::min<double>(std::ceil(p_dip), double(kPanelCap))));
        }
    }
    p = std::min(p, kPanelCap * 4);
    p = (p + 3) / 4 * 4;

    const double h = 2.0 * R / static_cast<double>(p);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(p / 2);
    std::vector<double> t(p + 1);
    for (std::size_t j = 0; j <= p; ++j)
        t[j] = h * static_cast<double>(static_cast<std::ptrdiff_t>(j) - half);

    auto phi_hat = empirical_on_grid(sample, 1.0, t.front(), h, t.size());
    const auto phi_eta = analytic_on_grid(mixing, 1.0, t.front(), h, t.size());

    std::vector<Complex> coeff(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (std::abs(phi_eta[j]) < 1e-14)
            throw IllPosedError("phi_{log eta}(t) < 1e-14 at t = " + std::to_string(t[j]) +
                                "; deconvolution is ill-posed inside the window");
        double sw = (j == 0 || j == p) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        sw *= h / 3.0;
        const double damp = std::exp(-0.5 * cfg.bandwidth * cfg.bandwidth * t[j] * t[j]);
        coeff[j] = sw * damp * phi_hat[j] / phi_eta[j];
    }

    CdfEstimate est;
    est.method = "fourier";
    est.config.u_star = 1.0;  // not used by this estimator
    est.config.truncation = R;
    est.config.panels = cfg.panels;
    est.config.clip_to_unit = false;
    est.panels_used = p;
    est.n = sample.values.size();
    est.seed = sample.seed;

    const auto D = [&](double y) {
        const Complex step = std::polar(1.0, -h * y);
        Complex cur = std::polar(1.0, -t.front() * y);
        Complex acc(0.0, 0.0);
        constexpr std::size_t kResync = 2048;
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (j % kResync == 0 && j != 0) cur = std::polar(1.0, -t[j] * y);
            // fourier_step_factor with the phase supplied by the recurrence
            const Complex s =
                t[j] == 0.0 ? Complex(y, 0.0) : (cur - 1.0) * Complex(0.0, 1.0) / t[j];
            acc += coeff[j] * s;
            cur *= step;
        }
        return acc / (2.0 * kPi);
    };

    const Complex d_anchor = D(y_min);
    est.max_imag_ratio = std::abs(d_anchor.imag()) / (1.0 + std::abs(d_anchor.real()));
    est.grid = std::move(grid);
    est.values.reserve(est.grid.size());
    for (const double x : est.grid) {
        const Complex d = D(std::log(x));
        est.max_imag_ratio =
            std::max(est.max_imag_ratio, std::abs(d.imag()) / (1.0 + std::abs(d.real())));
        est.values.push_back(d.real() - d_anchor.real());
    }
    return est;
}

}  // namespace scalemix
