#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scalemix/distributions.hpp"
#include "scalemix/mellin.hpp"

namespace scalemix {

struct EstimatorConfig {
    double u_star = 0.5;       // u in (-inf, 1), inside strip(F) and H_G where checkable
    double truncation = 0.0;   // T > 0
    std::size_t panels = 256;  // requested panel count; auto-raised, kept >= 256
    bool clip_to_unit = false; // clamp estimates into [0,1] after integration
    // The estimator is the real part of the contour integral; the imaginary
    // residual is tracked in CdfEstimate::max_imag_ratio.
};

void validate(const EstimatorConfig& cfg);

struct CdfEstimate {
    std::vector<double> grid;    // strictly increasing, positive
    std::vector<double> values;
    EstimatorConfig config;
    std::size_t n = 0;           // sample size; 0 for the population version
    std::uint64_t seed = 0;
    std::size_t panels_used = 0;
    double max_imag_ratio = 0.0; // max |Im| / (1 + |Re|) before taking the real part
    std::string method = "mellin";
};

// K(v) = (1 - |v|/T) on [-T, T], 0 outside.
double triangular_kernel(double v, double T);

// x^{u-1} |true - estimate|.
double pointwise_risk(double estimate_value, double true_value, double u_star, double x);

// Nodes and premultiplied coefficients of the inversion contour
//   (1/2pi) int_{-T}^{T} x^{1-u-iv} num(u+iv) / (1-u-iv) K(v) dv
// by composite Simpson. Both estimator routes and the bound evaluators share
// this machinery so that algebraically identical quantities stay identical
// in floating point.
struct ContourWorkspace {
    double u = 0.5;
    double T = 0.0;
    double h = 0.0;
    std::size_t panels = 0;
    std::vector<double> v;        // panels + 1 symmetric nodes
    std::vector<Complex> weight;  // simpson weight * K(v) / (1 - u - iv)

    // (1/2pi) x^{1-u} sum_j weight_j num_j e^{-i v_j ln x}
    Complex invert(const std::vector<Complex>& numerators, double x) const;
};

// Panel selection: max of the requested count, 256, the oscillation floor
// ceil((T/pi) max|ln x| * 8) raised to 16 points per period of the fastest
// phase (grid and data combined), and, when a mixing law is given, enough
// nodes to resolve the near-zeros of |M[G]| along the line (capped).
ContourWorkspace make_contour(double u, double T, std::size_t panels_request,
                              double max_abs_log_x, double max_abs_log_data,
                              const DistributionSpec* mixing);

// Numerators on the workspace nodes.
std::vector<Complex> estimator_numerators(const ContourWorkspace& ws, const Sample& sample,
                                          const DistributionSpec& mixing);
std::vector<Complex> population_numerators(const ContourWorkspace& ws,
                                           const DistributionSpec& signal);

// The estimator of the c.d.f. of the hidden factor from X = Y * eta.
CdfEstimate estimate_cdf(const Sample& sample, const DistributionSpec& mixing,
                         const EstimatorConfig& cfg, std::vector<double> grid);

// Noise-free version: the empirical transform is replaced by the exact
// M[F], which makes the result the multiplicatively smoothed truth.
CdfEstimate population_estimate_cdf(const MixtureModel& model, const EstimatorConfig& cfg,
                                    std::vector<double> grid);

// Repeated single-point evaluation of the smoothed truth (bound evaluators
// scan it when locating the weighted sup).
class PopulationSmoother {
public:
    PopulationSmoother(const DistributionSpec& signal, const EstimatorConfig& cfg,
                       double max_abs_log_x);
    double operator()(double x) const;

private:
    ContourWorkspace ws_;
    std::vector<Complex> num_;
    double u_;
};

// CSV: "# method=... u_star=... T=... panels=... n=... seed=... clip=..."
// then "x,fhat" rows at 17 significant digits.
void write_estimate_csv(std::ostream& os, const CdfEstimate& est);

std::vector<double> linspace(double lo, double hi, std::size_t points);

}  // namespace scalemix
