#pragma once

#include <vector>

#include "freeprob/measure.hpp"

namespace freeprob::stein {

using measure::Measure1D;

// Polynomial Stein kernel A(x,y) = sum c_{ij} x^i y^j, 0 <= i,j <= degree,
// solved as the least-norm perturbation of the constant kernel 1 under the
// moment constraints.  coeffs is row-major (degree+1) x (degree+1) and
// satisfies c_{ij} = c_{ji}.  discrepancy_lb = ||A - 1||_{L2(mu x mu)} is a
// lower bound for the true Stein discrepancy, nondecreasing in degree.
struct SteinKernel1D {
    int degree = 0;
    std::vector<double> coeffs;
    std::vector<double> residuals;  // one per constraint P = x^1 .. x^{degree+1}
    double discrepancy_lb = 0;
    double gram_cond = 0;  // condition number of the constraint Gram matrix
    bool ridge_used = false;
};

// Free difference quotient of P (ascending coefficients): (P(x)-P(y))/(x-y),
// switching to the divided-difference sum sum_k p_k sum_{i+j=k-1} x^i y^j
// when |x-y| < 1e-8 * scale; at x = y this is P'(x).
double dq_eval(const std::vector<double>& p, double x, double y);

// A(x,y) of the returned kernel at a point.
double kernel_value(const SteinKernel1D& k, double x, double y);

// Minimize ||A - 1||^2_{L2(mu x mu)} over kernels of the given degree subject
// to  rho * int x P dmu = int int A(x,y) Ptilde(x,y) dmu dmu  for the test
// functions P = x, x^2, ..., x^{degree+1}.  Requires mu centered to 1e-9.
// The ridge on the coefficient norm activates only when the constraint Gram
// matrix has condition number above 1e12; a Gram singular beyond that rescue
// raises with the offending degree in the message.
SteinKernel1D estimate_kernel(const Measure1D& mu, int degree,
                              double ridge = 1e-10, double rho = 1.0);

// discrepancy_lb of estimate_kernel: lower bound for the Stein discrepancy
// of mu relative to the standard semicircle potential.
double discrepancy(const Measure1D& mu, int degree);

}  // namespace freeprob::stein
