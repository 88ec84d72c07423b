#include "scalemix/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scalemix/errors.hpp"

namespace scalemix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void strip_violation(const char* family, const StripInterval& s, double u) {
    throw StripError(std::string("Re(z) = ") + std::to_string(u) + " outside the strip (" +
                     std::to_string(s.alpha) + ", " + std::to_string(s.beta) + ") of " + family);
}

double zeta_norm(double s) { return complex_zeta(Complex(s, 0.0)).real(); }

}  // namespace

StripInterval strip(const DistributionSpec& spec) {
    validate(spec);
    return std::visit(
        [](const auto& d) -> StripInterval {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Beta>) {
                return {1.0 - d.a1, kInf};
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return {1.0 - d.shape, kInf};
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return {0.0, kInf};
            } else if constexpr (std::is_same_v<T, UniformUnit>) {
                return {0.0, kInf};
            } else if constexpr (std::is_same_v<T, Zeta>) {
                return {-kInf, d.s};
            } else {
                // bounded-away-from-zero discrete supports with light tails
                return {-kInf, kInf};
            }
        },
        spec);
}

namespace {

// Support atoms and weights of a discrete law, truncated so that the
// neglected tail of sum w_k a_k^{u-1} is below 1e-16 relative.
void discrete_atoms(const DistributionSpec& spec, double u, std::vector<double>& atoms,
                    std::vector<double>& weights) {
    atoms.clear();
    weights.clear();
    if (const auto* fd = std::get_if<FiniteDiscrete>(&spec)) {
        for (const auto& a : fd->atoms) {
            atoms.push_back(a.sigma);
            weights.push_back(a.p);
        }
        return;
    }
    if (const auto* g = std::get_if<Geometric>(&spec)) {
        const double q = 1.0 - g->p;
        double w = g->p;  // p q^{k-1}
        double acc = 0.0;
        for (double k = 1.0; k < 2e6; k += 1.0) {
            atoms.push_back(k);
            weights.push_back(w);
            const double contrib = w * std::pow(k, u - 1.0);
            acc += std::fabs(contrib);
            // geometric envelope for the remaining tail
            const double ratio = q * std::exp(std::max(0.0, u - 1.0) / k);
            if (ratio < 0.95 && std::fabs(contrib) * ratio / (1.0 - ratio) < 1e-16 * (1e-300 + acc))
                return;
            w *= q;
        }
        return;
    }
    if (const auto* p = std::get_if<PositivePoisson>(&spec)) {
        const double w0 = 1.0 / std::expm1(p->lambda);
        double w = w0 * p->lambda;  // weight at k = 1
        double acc = 0.0;
        for (double k = 1.0; k < 1e5; k += 1.0) {
            atoms.push_back(k);
            weights.push_back(w);
            const double contrib = w * std::pow(k, u - 1.0);
            acc += std::fabs(contrib);
            const double ratio = p->lambda / (k + 1.0) * std::exp(std::max(0.0, u - 1.0) / k);
            if (ratio < 0.5 && std::fabs(contrib) * ratio / (1.0 - ratio) < 1e-16 * (1e-300 + acc))
                return;
            w *= p->lambda / (k + 1.0);
        }
        return;
    }
    throw UnsupportedFamilyError("discrete_atoms: not a truncatable discrete family");
}

}  // namespace

Complex mellin_analytic(const DistributionSpec& spec, Complex z) {
    const StripInterval s = strip(spec);
    return std::visit(
        [&](const auto& d) -> Complex {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Beta>) {
                if (!s.contains(z.real())) strip_violation("beta", s, z.real());
                return std::exp(log_gamma(d.a1 - 1.0 + z) - log_gamma(d.a1 + d.a2 - 1.0 + z) +
                                Complex(std::lgamma(d.a1 + d.a2) - std::lgamma(d.a1), 0.0));
            } else if constexpr (std::is_same_v<T, Gamma>) {
                if (!s.contains(z.real())) strip_violation("gamma", s, z.real());
                return std::exp(log_gamma(d.shape - 1.0 + z) -
                                Complex(std::lgamma(d.shape), 0.0) -
                                (z - 1.0) * std::log(d.rate));
            } else if constexpr (std::is_same_v<T, Exponential>) {
                if (!s.contains(z.real())) strip_violation("exp", s, z.real());
                return std::exp(log_gamma(z) + (1.0 - z) * std::log(d.rate));
            } else if constexpr (std::is_same_v<T, UniformUnit>) {
                if (!s.contains(z.real())) strip_violation("uniform01", s, z.real());
                return 1.0 / z;
            } else if constexpr (std::is_same_v<T, Zeta>) {
                if (!s.contains(z.real())) strip_violation("zeta", s, z.real());
                return complex_zeta(1.0 + d.s - z) / zeta_norm(d.s);
            } else {
                // discrete families: direct weighted power sum
                std::vector<double> atoms, weights;
                discrete_atoms(spec, z.real(), atoms, weights);
                Complex acc(0.0, 0.0);
                for (std::size_t k = 0; k < atoms.size(); ++k)
                    acc += weights[k] * std::exp((z - 1.0) * std::log(atoms[k]));
                return acc;
            }
        },
        spec);
}

Complex mellin_empirical(const Sample& sample, Complex z) {
    if (sample.values.empty()) throw DataError("empirical transform of an empty sample");
    Complex acc(0.0, 0.0);
    for (const double x : sample.values) {
        if (!(x > 0.0)) throw DataError("empirical transform requires positive sample values");
        acc += std::exp((z - 1.0) * std::log(x));
    }
    return acc / static_cast<double>(sample.values.size());
}

Complex mellin_ratio_estimate(const Sample& sample, const DistributionSpec& g, Complex z) {
    const Complex mg = mellin_analytic(g, z);
    if (std::abs(mg) < 1e-14)
        throw DivisionHazardError("|M[G](z)| below 1e-14 at Re(z) = " + std::to_string(z.real()) +
                                  "; pick u inside the feasible region of G");
    return mellin_empirical(sample, z) / mg;
}

HgRegion hg_region(const DistributionSpec& g) {
    validate(g);
    const double log2 = std::log(2.0);
    if (const auto* fd = std::get_if<FiniteDiscrete>(&g)) {
        HgRegion r;
        if (fd->atoms.size() == 1) {
            r.kind = HgKind::whole_line;  // |M[G]| = p sigma^{u-1} never vanishes
            return r;
        }
        const double s1 = fd->atoms[0].sigma;
        const double s2 = fd->atoms[1].sigma;
        const double p1 = fd->atoms[0].p;
        if (fd->atoms.size() == 2) {
            const double p2 = fd->atoms[1].p;
            r.kind = HgKind::punctured_line;
            r.u_excluded = 1.0 + std::log(p1 / p2) / std::log(s2 / s1);
            return r;
        }
        r.kind = HgKind::half_line;
        r.u_max = 1.0 + std::log(p1 / (1.0 - p1)) / std::log(s2 / s1);
        r.conservative = true;
        return r;
    }
    if (const auto* ge = std::get_if<Geometric>(&g)) {
        HgRegion r;
        r.kind = HgKind::half_line;
        r.u_max = 1.0 + std::log(ge->p / (1.0 - ge->p)) / log2;
        r.conservative = true;
        return r;
    }
    if (const auto* pp = std::get_if<PositivePoisson>(&g)) {
        const double l = pp->lambda;
        const double p1 = l / std::expm1(l);  // e^{-l} l / (1 - e^{-l})
        HgRegion r;
        r.kind = HgKind::half_line;
        r.u_max = 1.0 + std::log(p1 / (1.0 - p1)) / log2;
        r.conservative = true;
        return r;
    }
    if (const auto* z = std::get_if<Zeta>(&g)) {
        HgRegion r;
        r.kind = HgKind::half_line;
        r.u_max = z->s;  // zeta has no zeros right of Re = 1
        r.coarse_u_max = 1.0 - std::log(zeta_norm(z->s)) / log2;
        return r;
    }
    if (std::holds_alternative<UniformUnit>(g)) {
        HgRegion r;
        r.kind = HgKind::whole_line;
        r.decays_at_infinity = true;
        return r;
    }
    throw UnsupportedFamilyError("hg_region: family '" + format_spec(g) + "' is not analysed");
}

double positive_poisson_threshold() {
    // f(l) = e^l - 3l - 1, positive root
    double lo = 0.5, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::exp(mid) - 3.0 * mid - 1.0 < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<Complex> weighted_power_transform_grid(std::span<const double> atoms,
                                                   std::span<const double> weights,
                                                   double u, double v0, double h,
                                                   std::size_t count) {
    std::vector<Complex> out(count, Complex(0.0, 0.0));
    constexpr std::size_t kResync = 2048;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const double la = std::log(atoms[k]);
        const double r = weights[k] * std::exp((u - 1.0) * la);
        const Complex step = std::polar(1.0, h * la);
        Complex cur = std::polar(1.0, v0 * la);
        for (std::size_t j = 0; j < count; ++j) {
            if (j % kResync == 0 && j != 0)
                cur = std::polar(1.0, (v0 + h * static_cast<double>(j)) * la);
            out[j] += r * cur;
            cur *= step;
        }
    }
    return out;
}

std::vector<Complex> empirical_on_grid(const Sample& sample, double u, double v0, double h,
                                       std::size_t count) {
    if (sample.values.empty()) throw DataError("empirical transform of an empty sample");
    for (const double x : sample.values)
        if (!(x > 0.0)) throw DataError("empirical transform requires positive sample values");
    const double w = 1.0 / static_cast<double>(sample.values.size());
    std::vector<double> weights(sample.values.size(), w);
    return weighted_power_transform_grid(sample.values, weights, u, v0, h, count);
}

namespace {

// Zeta needs its own grid path: the raw atom sum converges too slowly for
// long contours, so a few hundred atoms are summed exactly and the rest is
// folded into an Euler-Maclaurin tail evaluated per node.
std::vector<Complex> zeta_on_grid(const Zeta& z, double u, double v0, double h,
                                  std::size_t count) {
    const double norm = zeta_norm(z.s);
    const double beta = u - 1.0 - z.s;  // atom k contributes k^{beta + iv}
    const double vmax = std::max(std::fabs(v0), std::fabs(v0 + h * double(count - 1)));
    const std::size_t cut = std::max<std::size_t>(
        400, static_cast<std::size_t>(std::ceil(0.25 * vmax)));

    std::vector<double> atoms(cut), weights(cut);
    for (std::size_t k = 1; k <= cut; ++k) {
        atoms[k - 1] = static_cast<double>(k);
        weights[k - 1] = std::pow(static_cast<double>(k), -z.s) / norm;
    }
    auto out = weighted_power_transform_grid(atoms, weights, u, v0, h, count);

    // tail sum_{k > cut} k^{beta+iv}: integral + midpoint + curvature terms
    const double kd = static_cast<double>(cut);
    const double lk = std::log(kd);
    const double p1 = std::exp((beta + 1.0) * lk);  // cut^{beta+1}
    const double p0 = p1 / kd;                      // cut^{beta}
    const double pm1 = p0 / kd;                     // cut^{beta-1}
    const Complex step = std::polar(1.0, h * lk);
    Complex cur = std::polar(1.0, v0 * lk);
    for (std::size_t j = 0; j < count; ++j) {
        if (j % 2048 == 0 && j != 0)
            cur = std::polar(1.0, (v0 + h * static_cast<double>(j)) * lk);
        const Complex biv(beta, v0 + h * static_cast<double>(j));
        const Complex tail = -p1 / (biv + 1.0) - 0.5 * p0 - biv * pm1 / 12.0;
        out[j] += tail * cur / norm;
        cur *= step;
    }
    return out;
}

}  // namespace

std::vector<Complex> analytic_on_grid(const DistributionSpec& spec, double u, double v0,
                                      double h, std::size_t count) {
    const StripInterval s = strip(spec);
    if (!s.contains(u)) strip_violation(format_spec(spec).c_str(), s, u);

    if (const auto* z = std::get_if<Zeta>(&spec)) return zeta_on_grid(*z, u, v0, h, count);
    if (is_discrete(spec)) {
        std::vector<double> atoms, weights;
        discrete_atoms(spec, u, atoms, weights);
        return weighted_power_transform_grid(atoms, weights, u, v0, h, count);
    }
    std::vector<Complex> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        const Complex z(u, v0 + h * static_cast<double>(j));
        out[j] = mellin_analytic(spec, z);
    }
    return out;
}

}  // namespace scalemix
