#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "scalemix/distributions.hpp"
#include "scalemix/special_functions.hpp"

namespace scalemix {

// Open vertical strip of convergence for the Mellin-Stieltjes transform
// M[phi](z) = E[X^{z-1}]; endpoints may be +-infinity.
struct StripInterval {
    double alpha;
    double beta;
    bool contains(double u) const { return u > alpha && u < beta; }
};

StripInterval strip(const DistributionSpec& spec);

// Exact transform value; throws StripError when Re(z) leaves the open strip.
Complex mellin_analytic(const DistributionSpec& spec, Complex z);

// (1/n) sum X_i^{z-1}; throws DataError on non-positive sample values.
Complex mellin_empirical(const Sample& sample, Complex z);

// mellin_empirical / mellin_analytic(g, z); throws DivisionHazardError when
// |M[G](z)| < 1e-14.
Complex mellin_ratio_estimate(const Sample& sample, const DistributionSpec& g, Complex z);

enum class HgKind { half_line, punctured_line, whole_line };

// Set of real parts u for which |M[G](u+iv)| stays bounded away from zero
// uniformly in v. `conservative` marks regions obtained from the generic
// discrete-tail inequality rather than exact analysis; `coarse_u_max`
// carries that generic bound when an exact region is also known.
struct HgRegion {
    HgKind kind = HgKind::whole_line;
    double u_max = std::numeric_limits<double>::infinity();  // half_line
    double u_excluded = std::numeric_limits<double>::quiet_NaN();  // punctured_line
    bool conservative = false;
    std::optional<double> coarse_u_max;
    // uniform01: |M[G]| > 0 everywhere but decays along the line, so the
    // estimator needs an explicit finite truncation.
    bool decays_at_infinity = false;

    bool contains(double u) const {
        switch (kind) {
            case HgKind::half_line: return u < u_max;
            case HgKind::punctured_line: return u != u_excluded;
            case HgKind::whole_line: return true;
        }
        return false;
    }
};

// Supported mixing families: FiniteDiscrete, Geometric, PositivePoisson,
// Zeta, UniformUnit. Others throw UnsupportedFamilyError.
HgRegion hg_region(const DistributionSpec& g);

// Positive root of exp(l) = 3 l + 1: the threshold below which the
// positive-Poisson feasibility bound stays above zero.
double positive_poisson_threshold();

// Transform values on the uniform vertical grid z = u + i (v0 + j h),
// j = 0..count-1. The discrete/empirical paths run one phase recurrence per
// atom, which is what makes the estimator and the simulation harness fast.
std::vector<Complex> weighted_power_transform_grid(std::span<const double> atoms,
                                                   std::span<const double> weights,
                                                   double u, double v0, double h,
                                                   std::size_t count);

std::vector<Complex> empirical_on_grid(const Sample& sample, double u, double v0,
                                       double h, std::size_t count);

std::vector<Complex> analytic_on_grid(const DistributionSpec& spec, double u, double v0,
                                      double h, std::size_t count);

}  // namespace scalemix
