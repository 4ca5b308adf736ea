#pragma once

#include <string>
#include <utility>
#include <vector>

#include "freeprob/freeconv.hpp"
#include "freeprob/measure.hpp"

namespace freeprob::ineq {

using freeconv::ConvOptions;
using measure::Measure1D;

// One verified inequality instance.  Checks are stated so the claim reads
// lhs <= rhs; slack = rhs - lhs and holds = (slack >= -tolerance).  Equality
// checks (two_sided flag) instead require |slack| <= tolerance.  flags:
//   vacuous       rhs is +infinity, nothing to test
//   conservative  rhs built from a discrepancy LOWER bound, so holds=true
//                 certifies the theorem but holds=false is inconclusive
//   inconclusive  failure attributable to the lower bound, not a violation
//   two_sided     equality check
struct IneqReport {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    double slack = 0;
    bool holds = false;
    double tolerance = 0;
    std::vector<std::pair<std::string, double>> inputs;
    std::vector<std::string> flags;
};

// Free log-Sobolev: entropy gap <= Fisher gap / (2 rho).
IneqReport lsi_check(const Measure1D& mu, double rho);

// HSI sharpening: entropy gap <= (s^2/2) log(1 + fisher_rel/(rho s^2)) with
// s the degree-d Stein discrepancy lower bound (conservative direction).
IneqReport hsi_check(const Measure1D& mu, double rho, int degree);

// de Bruijn identity along the OU flow: the central difference of
// t -> (rho/2) m2(t) - chi(t) against -(1/rho) fisher_rel(t), per grid t.
std::vector<IneqReport> de_bruijn_check(const Measure1D& mu, double rho,
                                        const std::vector<double>& t_grid,
                                        const ConvOptions& opts = {});

// Exponential Fisher decay: fisher_rel(t) <= e^{-2t} fisher_rel(0).
std::vector<IneqReport> exp_decay_check(const Measure1D& mu, double rho,
                                        const std::vector<double>& t_grid,
                                        const ConvOptions& opts = {});

// Stein-kernel decay: fisher_rel(t)/rho <= e^{-4t}/(1-e^{-2t}) * Sigma^2,
// Sigma estimated by the degree-d discrepancy lower bound (conservative).
std::vector<IneqReport> stein_decay_check(const Measure1D& mu, double rho,
                                          int degree,
                                          const std::vector<double>& t_grid,
                                          const ConvOptions& opts = {});

// All three flow lemmas over one shared set of OU flow solves (three flows
// per grid point instead of five); reports in t-major order.
std::vector<IneqReport> flow_checks(const Measure1D& mu, double rho,
                                    const std::vector<double>& t_grid,
                                    int degree, const ConvOptions& opts = {});

// Entropy deficit: rho*d(fisher(mu)/rho - 1) <= fisher_rel - 2*rho*gap,
// d(t) = t - log(1+t).  Scaled semicircles saturate this to equality.
IneqReport deficit_check(const Measure1D& mu, double rho);

// Free Stam: 1/fisher(mu) + 1/fisher(nu) <= 1/fisher(mu boxplus nu).
IneqReport stam_check(const Measure1D& mu, const Measure1D& nu,
                      const ConvOptions& opts = {});

struct CltRow {
    int N = 0;
    std::string weights_tag;  // "equal" or "custom"
    double sigma = 0;         // sum of fourth powers of the weights
    double entropy_gap = 0;   // |chi*(Y|V_1) - chi*(S|V_1)|
    double fisher_rel = 0;
    double bound = 0;         // sigma * log(1/sigma)
    double ratio = 0;         // entropy_gap / bound
};

struct CltReport {
    std::vector<CltRow> rows;
};

// Free CLT rate sweep for centered unit-variance mu.  Empty custom weights
// mean equal weights 1/sqrt(N) for each N in Ns (laws shared along the
// doubling chain); otherwise a single row for the given weight vector.
CltReport clt_harness(const Measure1D& mu, const std::vector<int>& Ns,
                      const std::vector<double>& custom_weights = {},
                      const ConvOptions& opts = {});

// Stein discrepancy of a normalized free sum against the summand bound:
// discrepancy(Y) <= sqrt(sigma) * discrepancy(mu) + 0.02, both sides being
// degree-d lower bounds (unit-variance summands only).
IneqReport stein_kernel_of_sum(const Measure1D& mu,
                               const std::vector<double>& weights, int degree,
                               const ConvOptions& opts = {});

}  // namespace freeprob::ineq
