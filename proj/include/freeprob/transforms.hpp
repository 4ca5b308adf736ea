#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "freeprob/measure.hpp"

namespace freeprob::transforms {

using Complex = std::complex<double>;
using measure::Measure1D;

// G_mu(z) = int (z - x)^{-1} dmu(x), z off the support.
// Dispatches to the closed form for tagged families, otherwise integrates the
// piecewise-linear density cell by cell (exact antiderivatives, no sampling
// error beyond the interpolant itself).
Complex cauchy(const Measure1D& mu, Complex z);
Complex cauchy_quadrature(const Measure1D& mu, Complex z);
bool has_closed_form(const Measure1D& mu);

// principal value of int (x - y)^{-1} dmu(y).  Exact per cell for the linear
// interpolant; the excised singular cells cancel symmetrically.  Diverges at
// a support endpoint with nonvanishing density and at atom locations (error).
double hilbert(const Measure1D& mu, double x);

// Hilbert transform at every grid node.  Endpoint nodes are filled by linear
// extrapolation from the adjacent interior values, where the principal value
// may diverge; integrands weighted by the density are insensitive to this.
std::vector<double> hilbert_at_nodes(const Measure1D& mu);

struct InversionError : std::runtime_error {
    explicit InversionError(const std::string& what) : std::runtime_error(what) {}
};

struct InvertOptions {
    double eps = 1e-4;              // base height; evaluations at {4, 2, 1} * eps
    int n_grid = measure::kDefaultGridN;
    int detect_grid = 640;
    double detect_eps = 1e-3;
    double support_threshold = 1e-10;
    double pad_frac = 0.01;
    double mass_tol = 1e-3;
    bool edge_refine = true;
};

// density(x) ~ -(1/pi) Im G(x + i eps), Richardson-extrapolated in eps
double richardson3(double at_eps, double at_2eps, double at_4eps);

// Chebyshev grid on [a, b] plus geometric refinement cascades at both edges
// so features of width ~eps survive the trapezoid representation.  The
// second form also refines around interior band edges (multi-band supports).
std::vector<double> inversion_grid(double a, double b, int n, double eps,
                                   bool edge_refine);
std::vector<double> inversion_grid(double a, double b, int n, double eps,
                                   bool edge_refine,
                                   const std::vector<double>& interior_edges);

// Clip negatives, check the mass defect, renormalize; throws InversionError.
Measure1D assemble_density(std::vector<double> grid, std::vector<double> rho,
                           double mass_tol);

// Recover a measure from samples of its Cauchy transform near the real axis.
// The window [lo_hint, hi_hint] must contain the support.
Measure1D stieltjes_invert(const std::function<Complex(Complex)>& G,
                           double lo_hint, double hi_hint,
                           const InvertOptions& opts = {});

}  // namespace freeprob::transforms
