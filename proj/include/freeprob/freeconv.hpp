#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "freeprob/measure.hpp"

namespace freeprob::freeconv {

using Complex = std::complex<double>;
using measure::Measure1D;

struct ConvOptions {
    double eps = 1e-4;       // inversion height for the output density
    int out_grid = measure::kDefaultGridN;
    int det_grid = 640;      // support-detection pass resolution
    double detect_eps = 1e-3;
    double fp_tol = 1e-12;   // fixed-point stopping threshold
    int max_iter = 10000;
    double damping = 0.5;
    int eval_grid_max = 1025;  // grid-only inputs are resampled to this many
                               // nodes before entering the fixed-point loop
    double mass_tol = 1e-3;
};

// A subordination fixed point failed to settle; carries the offending point.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, Complex where)
        : std::runtime_error(what), z(where) {}
    Complex z;
};

// Law of X + sqrt(t) S for S a standard semicircular element free from X.
// Solved from the subordination fixed point w = z - t G_mu(w), continued
// downward in Im z, then recovered by Stieltjes inversion.
Measure1D semicircular_flow(const Measure1D& mu, double t,
                            const ConvOptions& opts = {});
Complex semicircular_flow_cauchy(const Measure1D& mu, double t, Complex z,
                                 const ConvOptions& opts = {});

// Free additive convolution of mu and nu (two-function subordination).
// Inputs with an atom of mass > 1/2 are rejected: the output could then carry
// an atom, which the grid representation cannot hold.
Measure1D free_add(const Measure1D& mu, const Measure1D& nu,
                   const ConvOptions& opts = {});
Complex free_add_cauchy(const Measure1D& mu, const Measure1D& nu, Complex z,
                        const ConvOptions& opts = {});

// Ornstein-Uhlenbeck interpolation e^{-t} X + sqrt((1-e^{-2t})/rho) S toward
// the equilibrium semicircle of variance 1/rho.
Measure1D ou_flow_law(const Measure1D& mu, double t, double rho,
                      const ConvOptions& opts = {});

struct FlowPoint {
    double t = 0;
    Measure1D law;
    double chi_star = 0;    // free entropy of the law
    double fisher_rel = 0;  // relative free Fisher information at rho
};

FlowPoint ou_flow(const Measure1D& mu, double t, double rho,
                  const ConvOptions& opts = {});

// Law of sum_l weights[l] * X_l for free copies X_l of mu.
Measure1D weighted_free_sum(const Measure1D& mu,
                            const std::vector<double>& weights,
                            const ConvOptions& opts = {});

// Equal weights 1/sqrt(n): the normalized sum (X_1 + ... + X_n)/sqrt(n),
// computed by binary splitting so only O(log n) convolutions compound error.
Measure1D clt_sum(const Measure1D& mu, int n, const ConvOptions& opts = {});

}  // namespace freeprob::freeconv
