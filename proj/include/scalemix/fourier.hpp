#pragma once

#include "scalemix/distributions.hpp"
#include "scalemix/estimator.hpp"

namespace scalemix {

// Log-domain Fourier deconvolution baseline: X = Y*eta becomes
// log X = log Y + log eta and the c.d.f. of log Y is recovered by a
// truncated inversion of the empirical characteristic function, divided by
// the known phi_{log eta} and damped with a Gaussian-kernel factor.
struct FourierConfig {
    double cutoff = 1.0;            // R_n > 0
    double bandwidth = 0.0;         // h >= 0; phi_kappa(ht) = exp(-h^2 t^2 / 2)
    double anchor_quantile = 0.001; // left anchor where F_{log Y} ~ 0
    std::size_t panels = 256;
};

void validate(const FourierConfig& cfg);

// phi_{log eta}(t) = E[eta^{it}] = M[G](1 + it); requires 1 in strip(G).
Complex char_log_mixing(const DistributionSpec& g, double t);

// (e^{-ity} - 1)/(-it), the inversion integrand factor, with its t -> 0
// limit equal to y.
Complex fourier_step_factor(double t, double y);

CdfEstimate fourier_estimate_cdf(const Sample& sample, const DistributionSpec& mixing,
                                 const FourierConfig& cfg, std::vector<double> grid);

}  // namespace scalemix
