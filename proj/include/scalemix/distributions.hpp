#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace scalemix {

// The eight positive laws used throughout. Scalar parameters live strictly
// inside their open domains; validate() enforces that.
struct Beta {
    double a1, a2;
};
struct Gamma {
    double shape, rate;  // density ~ rate^shape x^{shape-1} e^{-rate x}
};
struct Exponential {
    double rate;
};
struct UniformUnit {};
struct DiscreteAtom {
    double sigma;  // support point, > 0
    double p;      // probability, > 0
};
struct FiniteDiscrete {
    std::vector<DiscreteAtom> atoms;  // strictly increasing sigmas, sum p = 1
};
struct Geometric {
    double p;  // support {1,2,...}, P{k} = p (1-p)^{k-1}
};
struct PositivePoisson {
    double lambda;  // Poisson conditioned on being >= 1
};
struct Zeta {
    double s;  // P{k} = k^{-s} / zeta(s), s > 1
};

using DistributionSpec = std::variant<Beta, Gamma, Exponential, UniformUnit,
                                      FiniteDiscrete, Geometric, PositivePoisson, Zeta>;

// Throws ParameterError when a parameter violates its open domain or the
// discrete-weight invariants (increasing sigmas, positive p, sum p = 1
// within 1e-12).
void validate(const DistributionSpec& spec);

bool is_discrete(const DistributionSpec& spec);

// C.d.f. with the standardised (midpoint) convention at atoms of discrete
// laws: the value at an atom is the average of the left and right limits.
double cdf(const DistributionSpec& spec, double x);

// Smallest x with cdf mass >= prob (right-continuous version for discrete
// laws). Used for harness grids and the log-domain anchor.
double quantile(const DistributionSpec& spec, double prob);

struct Sample {
    std::vector<double> values;  // strictly positive
    std::uint64_t seed = 0;
};

// Deterministic for fixed (spec, n, seed); all draws are built from the
// project's own uniform stream, never std::*_distribution.
Sample sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

struct MixtureModel {
    DistributionSpec signal;  // F, the hidden factor Y
    DistributionSpec mixing;  // G, the known noise eta
};

// X_i = Y_i * eta_i with sub-streams mix_seed(seed, 1) and mix_seed(seed, 2).
Sample sample_mixture(const MixtureModel& model, std::size_t n, std::uint64_t seed);

// Canonical spec strings: beta:2,2  gamma:2,2  exp:1  uniform01
// discrete:1@0.25,2@0.75  zeta:5  geom:0.5  pospoisson:1.5
// Probabilities in discrete entries also parse as fractions (1@1/3).
// format_spec uses shortest round-trip formatting, so parse(format(s)) == s.
std::string format_spec(const DistributionSpec& spec);
DistributionSpec parse_spec(std::string_view text);

// Plain-text sample files: header "# seed=<u64> spec=<canonical>", then one
// positive decimal per line.
void write_sample(std::ostream& os, const Sample& s, const DistributionSpec& spec);
Sample read_sample(std::istream& is, std::string* spec_string = nullptr);

}  // namespace scalemix
