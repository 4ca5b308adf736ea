#pragma once

#include <vector>

#include "freeprob/measure.hpp"

namespace freeprob::entropy {

using measure::Measure1D;

// int int log|x-y| dmu(x) dmu(y); -inf when mu carries atoms
double log_energy(const Measure1D& mu);

// log_energy + 3/4 + log(2 pi)/2
double free_entropy(const Measure1D& mu);

// entropy relative to the standard semicircle: m2/2 - free_entropy
double relative_entropy(const Measure1D& mu);

// free score at a point: twice the principal-value Hilbert transform.
// The factor fixes xi(x) = x for the unit semicircle, so the standard
// semicircle is the Gibbs state of t^2/2.
double conjugate_variable(const Measure1D& mu, double x);

// xi at every grid node, endpoints linearly extrapolated
std::vector<double> conjugate_at_nodes(const Measure1D& mu);

// int xi^2 dmu; +inf when mu carries atoms
double fisher(const Measure1D& mu);

// int (xi(x) - rho x)^2 dmu; Fisher information relative to (rho/2) t^2
double relative_fisher(const Measure1D& mu, double rho = 1.0);

// entropy gap against the Gibbs state of (rho/2) t^2:
//   (rho/2) m2(mu) - chi(mu) - 1/2 + (1/2) log(2 pi e / rho),
// nonnegative, zero exactly on semicircle(0, 1/rho); +inf on atoms
double gibbs_entropy_gap(const Measure1D& mu, double rho);

// chi* through the semicircular-flow formula
//   (1/2) log(2 pi e) + (1/2) int_0^inf (1/(1+t) - Phi*(mu + sqrt(t) S)) dt,
// integrated on a log time grid with `steps` Simpson nodes up to t_max and
// the tail beyond t_max taken from the 1/(m2+t) asymptotic of Phi*.
double chi_star_via_flow(const Measure1D& mu, double t_max = 60.0,
                         int steps = 25);

// row of values the CLI entropy report carries
struct EntropyReport {
    double chi = 0;
    double chi_rel = 0;
    double fisher_rel = 0;
    double fisher_abs = 0;
    double variance = 0;
};

EntropyReport entropy_report(const Measure1D& mu, double rho = 1.0);

}  // namespace freeprob::entropy
