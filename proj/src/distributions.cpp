#include "scalemix/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "scalemix/errors.hpp"
#include "scalemix/rng.hpp"
#include "scalemix/special_functions.hpp"

namespace scalemix {

namespace {

// zeta sampling cache: partial sums are truncated when cumulative mass
// reaches 1 - 1e-12; the hard cap keeps memory bounded for s near 1, the
// residual mass is then collapsed onto the last cached atom (bias far below
// Monte-Carlo noise for the s values of interest).
constexpr std::size_t kZetaCacheCap = std::size_t(1) << 20;

void require(bool ok, const char* msg) {
    if (!ok) throw ParameterError(msg);
}

double zeta_norm(double s) { return complex_zeta(Complex(s, 0.0)).real(); }

}  // namespace

void validate(const DistributionSpec& spec) {
    std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Beta>) {
                require(d.a1 > 0.0 && d.a2 > 0.0, "beta: shape parameters must be > 0");
            } else if constexpr (std::is_same_v<T, Gamma>) {
                require(d.shape > 0.0 && d.rate > 0.0, "gamma: shape and rate must be > 0");
            } else if constexpr (std::is_same_v<T, Exponential>) {
                require(d.rate > 0.0, "exp: rate must be > 0");
            } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
                require(!d.atoms.empty(), "discrete: needs at least one atom");
                double total = 0.0;
                double prev = 0.0;
                for (const auto& a : d.atoms) {
                    require(a.sigma > 0.0, "discrete: support points must be > 0");
                    require(a.sigma > prev, "discrete: support points must be strictly increasing");
                    require(a.p > 0.0, "discrete: probabilities must be > 0");
                    prev = a.sigma;
                    total += a.p;
                }
                require(std::fabs(total - 1.0) <= 1e-12, "discrete: probabilities must sum to 1");
            } else if constexpr (std::is_same_v<T, Geometric>) {
                require(d.p > 0.0 && d.p < 1.0, "geom: p must lie in (0,1)");
            } else if constexpr (std::is_same_v<T, PositivePoisson>) {
                require(d.lambda > 0.0, "pospoisson: lambda must be > 0");
            } else if constexpr (std::is_same_v<T, Zeta>) {
                require(d.s > 1.0, "zeta: s must be > 1");
            }
        },
        spec);
}

bool is_discrete(const DistributionSpec& spec) {
    return std::holds_alternative<FiniteDiscrete>(spec) ||
           std::holds_alternative<Geometric>(spec) ||
           std::holds_alternative<PositivePoisson>(spec) ||
           std::holds_alternative<Zeta>(spec);
}

namespace {

// Mass at integers <= m (plain right-continuous version, no midpoint).
double geometric_mass_le(const Geometric& g, double m) {
    if (m < 1.0) return 0.0;
    return 1.0 - std::pow(1.0 - g.p, std::floor(m));
}

double pospoisson_pmf_weight(double lambda) {
    return 1.0 / std::expm1(lambda);  // e^{-l}/(1-e^{-l}) = 1/(e^l - 1)
}

}  // namespace

double cdf(const DistributionSpec& spec, double x) {
    validate(spec);
    if (x < 0.0) throw DomainError("cdf requires x >= 0");
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Beta>) {
                if (x >= 1.0) return 1.0;
                return regularized_beta(d.a1, d.a2, x);
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return regularized_gamma_p(d.shape, d.rate * x);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return -std::expm1(-d.rate * x);
            } else if constexpr (std::is_same_v<T, UniformUnit>) {
                return std::min(x, 1.0);
            } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
                double acc = 0.0;
                for (const auto& a : d.atoms) {
                    if (a.sigma < x)
                        acc += a.p;
                    else if (a.sigma == x)
                        acc += 0.5 * a.p;  // midpoint convention at atoms
                    else
                        break;
                }
                return acc;
            } else if constexpr (std::is_same_v<T, Geometric>) {
                if (x < 1.0) return 0.0;
                const double m = std::floor(x);
                double acc = geometric_mass_le(d, m);
                if (x == m) acc -= 0.5 * d.p * std::pow(1.0 - d.p, m - 1.0);
                return acc;
            } else if constexpr (std::is_same_v<T, PositivePoisson>) {
                if (x < 1.0) return 0.0;
                const double m = std::floor(x);
                const double w = pospoisson_pmf_weight(d.lambda);
                double term = w * d.lambda;  // pmf at k = 1
                double acc = 0.0;
                double k = 1.0;
                while (k < m) {
                    acc += term;
                    k += 1.0;
                    term *= d.lambda / k;
                    if (term < 1e-300) break;
                }
                if (k == m) acc += (x == m) ? 0.5 * term : term;
                return std::min(acc, 1.0);
            } else {  // Zeta
                if (x < 1.0) return 0.0;
                const double m = std::floor(x);
                const double norm = zeta_norm(d.s);
                if (m > 2e6) {
                    // integral tail estimate; relative error O(m^{-1})
                    const double tail = std::pow(m + 0.5, 1.0 - d.s) / (d.s - 1.0) / norm;
                    return 1.0 - tail;
                }
                double acc = 0.0;
                for (double k = 1.0; k < m; k += 1.0) acc += std::pow(k, -d.s);
                const double pm = std::pow(m, -d.s);
                acc += (x == m) ? 0.5 * pm : pm;
                return acc / norm;
            }
        },
        spec);
}

double quantile(const DistributionSpec& spec, double prob) {
    validate(spec);
    if (!(prob > 0.0 && prob < 1.0)) throw ParameterError("quantile requires prob in (0,1)");
    return std::visit(
        [prob](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return -std::log1p(-prob) / d.rate;
            } else if constexpr (std::is_same_v<T, UniformUnit>) {
                return prob;
            } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
                double acc = 0.0;
                for (const auto& a : d.atoms) {
                    acc += a.p;
                    if (acc >= prob * (1.0 - 1e-15)) return a.sigma;
                }
                return d.atoms.back().sigma;
            } else if constexpr (std::is_same_v<T, Geometric>) {
                double k = std::ceil(std::log1p(-prob) / std::log1p(-d.p));
                if (k < 1.0) k = 1.0;
                while (k > 1.0 && geometric_mass_le(d, k - 1.0) >= prob) k -= 1.0;
                while (geometric_mass_le(d, k) < prob) k += 1.0;
                return k;
            } else if constexpr (std::is_same_v<T, PositivePoisson>) {
                const double w = pospoisson_pmf_weight(d.lambda);
                double term = w * d.lambda;
                double acc = term;
                double k = 1.0;
                while (acc < prob && k < 1e7) {
                    k += 1.0;
                    term *= d.lambda / k;
                    acc += term;
                }
                return k;
            } else if constexpr (std::is_same_v<T, Zeta>) {
                const double norm = zeta_norm(d.s);
                double acc = 0.0;
                for (double k = 1.0; k < 1e7; k += 1.0) {
                    acc += std::pow(k, -d.s) / norm;
                    if (acc >= prob) return k;
                }
                throw ParameterError("zeta quantile: requested probability too deep in the tail");
            } else {
                // continuous with unbounded or unit support: bisection on the cdf
                DistributionSpec s{d};
                double hi = 1.0;
                while (cdf(s, hi) < prob && hi < 1e12) hi *= 2.0;
                double lo = 0.0;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (cdf(s, mid) < prob)
                        lo = mid;
                    else
                        hi = mid;
                    if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
                }
                return 0.5 * (lo + hi);
            }
        },
        spec);
}

namespace {

// Marsaglia-Tsang for shape >= 1; the usual power boost below 1.
double draw_gamma(Rng& rng, double shape) {
    if (shape < 1.0) {
        const double u = rng.uniform();
        return draw_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// Knuth's product method in log space; exact and safe for any lambda.
double draw_poisson(Rng& rng, double lambda) {
    double k = 0.0;
    double s = 0.0;
    for (;;) {
        s += std::log(rng.uniform());
        if (s < -lambda) break;
        k += 1.0;
    }
    return k;
}

struct DiscreteSampler {
    std::vector<double> cum;
    std::vector<double> val;

    double draw(Rng& rng) const {
        const double u = rng.uniform();
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        if (it == cum.end()) return val.back();
        return val[static_cast<std::size_t>(it - cum.begin())];
    }
};

DiscreteSampler make_finite_sampler(const FiniteDiscrete& d) {
    DiscreteSampler s;
    double acc = 0.0;
    for (const auto& a : d.atoms) {
        acc += a.p;
        s.cum.push_back(acc);
        s.val.push_back(a.sigma);
    }
    s.cum.back() = 1.0;
    return s;
}

DiscreteSampler make_zeta_sampler(const Zeta& d) {
    DiscreteSampler s;
    const double norm = zeta_norm(d.s);
    double acc = 0.0;
    for (std::size_t k = 1; k <= kZetaCacheCap; ++k) {
        acc += std::pow(static_cast<double>(k), -d.s) / norm;
        s.cum.push_back(acc);
        s.val.push_back(static_cast<double>(k));
        if (acc >= 1.0 - 1e-12) break;
    }
    return s;
}

}  // namespace

Sample sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
    validate(spec);
    if (n == 0) throw ParameterError("sample size must be >= 1");
    Rng rng(seed);
    Sample out;
    out.seed = seed;
    out.values.reserve(n);

    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Beta>) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double g1 = draw_gamma(rng, d.a1);
                    const double g2 = draw_gamma(rng, d.a2);
                    out.values.push_back(g1 / (g1 + g2));
                }
            } else if constexpr (std::is_same_v<T, Gamma>) {
                for (std::size_t i = 0; i < n; ++i)
                    out.values.push_back(draw_gamma(rng, d.shape) / d.rate);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                for (std::size_t i = 0; i < n; ++i)
                    out.values.push_back(-std::log(rng.uniform()) / d.rate);
            } else if constexpr (std::is_same_v<T, UniformUnit>) {
                for (std::size_t i = 0; i < n; ++i) out.values.push_back(rng.uniform());
            } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
                const DiscreteSampler s = make_finite_sampler(d);
                for (std::size_t i = 0; i < n; ++i) out.values.push_back(s.draw(rng));
            } else if constexpr (std::is_same_v<T, Geometric>) {
                const double logq = std::log1p(-d.p);
                for (std::size_t i = 0; i < n; ++i) {
                    double k = std::ceil(std::log(rng.uniform()) / logq);
                    if (k < 1.0) k = 1.0;
                    out.values.push_back(k);
                }
            } else if constexpr (std::is_same_v<T, PositivePoisson>) {
                for (std::size_t i = 0; i < n; ++i) {
                    double k;
                    do {
                        k = draw_poisson(rng, d.lambda);
                    } while (k == 0.0);  // rejection of 0 from the plain Poisson stream
                    out.values.push_back(k);
                }
            } else {  // Zeta
                const DiscreteSampler s = make_zeta_sampler(d);
                for (std::size_t i = 0; i < n; ++i) out.values.push_back(s.draw(rng));
            }
        },
        spec);
    return out;
}

Sample sample_mixture(const MixtureModel& model, std::size_t n, std::uint64_t seed) {
    const Sample y = sample(model.signal, n, mix_seed(seed, 1));
    const Sample e = sample(model.mixing, n, mix_seed(seed, 2));
    Sample out;
    out.seed = seed;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = y.values[i] * e.values[i];
    return out;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view s, const char* what) {
    // accepts plain decimals and simple fractions a/b
    const auto slash = s.find('/');
    if (slash != std::string_view::npos) {
        const double num = parse_number(s.substr(0, slash), what);
        const double den = parse_number(s.substr(slash + 1), what);
        if (den == 0.0) throw UsageError(std::string("zero denominator in ") + what);
        return num / den;
    }
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw UsageError(std::string("cannot parse number '") + std::string(s) + "' in " + what);
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

}  // namespace

std::string format_spec(const DistributionSpec& spec) {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Beta>) {
                return "beta:" + fmt_double(d.a1) + "," + fmt_double(d.a2);
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return "gamma:" + fmt_double(d.shape) + "," + fmt_double(d.rate);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return "exp:" + fmt_double(d.rate);
            } else if constexpr (std::is_same_v<T, UniformUnit>) {
                return "uniform01";
            } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
                std::string s = "discrete:";
                bool first = true;
                for (const auto& a : d.atoms) {
                    if (!first) s += ",";
                    s += fmt_double(a.sigma) + "@" + fmt_double(a.p);
                    first = false;
                }
                return s;
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return "geom:" + fmt_double(d.p);
            } else if constexpr (std::is_same_v<T, PositivePoisson>) {
                return "pospoisson:" + fmt_double(d.lambda);
            } else {
                return "zeta:" + fmt_double(d.s);
            }
        },
        spec);
}

DistributionSpec parse_spec(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    const auto colon = text.find(':');
    const std::string_view tag = text.substr(0, colon);
    const std::string_view args =
        colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    DistributionSpec spec;
    if (tag == "uniform01") {
        if (!args.empty()) throw UsageError("uniform01 takes no parameters");
        spec = UniformUnit{};
    } else if (tag == "beta") {
        const auto p = split(args, ',');
        if (p.size() != 2) throw UsageError("beta spec needs two parameters: beta:a1,a2");
        spec = Beta{parse_number(p[0], "beta"), parse_number(p[1], "beta")};
    } else if (tag == "gamma") {
        const auto p = split(args, ',');
        if (p.size() != 2) throw UsageError("gamma spec needs two parameters: gamma:shape,rate");
        spec = Gamma{parse_number(p[0], "gamma"), parse_number(p[1], "gamma")};
    } else if (tag == "exp") {
        spec = Exponential{parse_number(args, "exp")};
    } else if (tag == "geom") {
        spec = Geometric{parse_number(args, "geom")};
    } else if (tag == "pospoisson") {
        spec = PositivePoisson{parse_number(args, "pospoisson")};
    } else if (tag == "zeta") {
        spec = Zeta{parse_number(args, "zeta")};
    } else if (tag == "discrete") {
        FiniteDiscrete d;
        for (const auto& entry : split(args, ',')) {
            const auto at = entry.find('@');
            if (at == std::string_view::npos)
                throw UsageError("discrete atoms use sigma@p syntax");
            d.atoms.push_back({parse_number(entry.substr(0, at), "discrete"),
                               parse_number(entry.substr(at + 1), "discrete")});
        }
        spec = std::move(d);
    } else {
        throw UsageError("unknown distribution tag '" + std::string(tag) + "'");
    }
    validate(spec);
    return spec;
}

void write_sample(std::ostream& os, const Sample& s, const DistributionSpec& spec) {
    os << "# seed=" << s.seed << " spec=" << format_spec(spec) << "\n";
    for (const double v : s.values) os << fmt_double(v) << "\n";
}

Sample read_sample(std::istream& is, std::string* spec_string) {
    Sample out;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (first) {
                const auto seed_pos = line.find("seed=");
                if (seed_pos != std::string::npos)
                    out.seed = std::strtoull(line.c_str() + seed_pos + 5, nullptr, 10);
                const auto spec_pos = line.find("spec=");
                if (spec_pos != std::string::npos && spec_string)
                    *spec_string = line.substr(spec_pos + 5);
            }
            first = false;
            continue;
        }
        first = false;
        double v = 0.0;
        auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc()) throw DataError("sample file: cannot parse line '" + line + "'");
        if (!(v > 0.0)) throw DataError("sample file: non-positive value " + line);
        out.values.push_back(v);
    }
    if (out.values.empty()) throw DataError("sample file contains no values");
    return out;
}

}  // namespace scalemix
