#include "freeprob/entropy.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "freeprob/freeconv.hpp"
#include "freeprob/transforms.hpp"

namespace freeprob::entropy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.9189385332046727;  // log(2 pi)/2

// inner integral int log|x-y| f(y) dy for the piecewise-linear density,
// cell by cell with the antiderivatives
//   P(w) = w log|w| - w,  Q(w) = w^2/2 log|w| - w^2/4,  w = y - x.
double log_kernel_at(const Measure1D& mu, double x, std::vector<double>& P,
                     std::vector<double>& Q) {
    const auto& y = mu.grid;
    const auto& f = mu.density;
    const std::size_t N = y.size();
    for (std::size_t j = 0; j < N; ++j) {
        const double w = y[j] - x;
        if (w == 0.0) {
            P[j] = 0.0;
            Q[j] = 0.0;
        } else {
            const double lw = std::log(std::fabs(w));
            P[j] = w * lw - w;
            Q[j] = 0.5 * w * w * lw - 0.25 * w * w;
        }
    }
    double acc = 0;
    for (std::size_t j = 0; j + 1 < N; ++j) {
        const double s = (f[j + 1] - f[j]) / (y[j + 1] - y[j]);
        const double fx = f[j] + s * (x - y[j]);
        acc += fx * (P[j + 1] - P[j]) + s * (Q[j + 1] - Q[j]);
    }
    return acc;
}

}  // namespace

double log_energy(const Measure1D& mu) {
    if (mu.has_atoms()) return -kInf;
    const std::size_t N = mu.grid.size();
    if (N < 2) throw std::invalid_argument("log_energy: measure has no density");
    std::vector<double> inner(N), P(N), Q(N);
    for (std::size_t i = 0; i < N; ++i)
        inner[i] = log_kernel_at(mu, mu.grid[i], P, Q);
    return mu.integral_ac(inner);
}

double free_entropy(const Measure1D& mu) {
    const double le = log_energy(mu);
    if (le == -kInf) return -kInf;
    return le + 0.75 + kHalfLog2Pi;
}

double relative_entropy(const Measure1D& mu) {
    const double chi = free_entropy(mu);
    if (chi == -kInf) return kInf;
    return 0.5 * mu.moment(2) - chi;
}

double conjugate_variable(const Measure1D& mu, double x) {
    return 2.0 * transforms::hilbert(mu, x);
}

std::vector<double> conjugate_at_nodes(const Measure1D& mu) {
    std::vector<double> xi = transforms::hilbert_at_nodes(mu);
    for (double& v : xi) v *= 2.0;
    return xi;
}

double fisher(const Measure1D& mu) {
    if (mu.has_atoms()) return kInf;
    std::vector<double> xi = conjugate_at_nodes(mu);
    for (double& v : xi) v *= v;
    return mu.integral_ac(xi);
}

double relative_fisher(const Measure1D& mu, double rho) {
    if (rho <= 0) throw std::invalid_argument("relative_fisher: rho must be positive");
    if (mu.has_atoms()) return kInf;
    std::vector<double> xi = conjugate_at_nodes(mu);
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const double d = xi[i] - rho * mu.grid[i];
        xi[i] = d * d;
    }
    return mu.integral_ac(xi);
}

double gibbs_entropy_gap(const Measure1D& mu, double rho) {
    if (rho <= 0) throw std::invalid_argument("gibbs_entropy_gap: rho must be positive");
    const double chi = free_entropy(mu);
    if (chi == -kInf) return kInf;
    // (rho/2) m2 - chi(mu) minus the same expression at semicircle(0, 1/rho)
    return 0.5 * rho * mu.moment(2) - chi - 0.5 +
           (0.5 + kHalfLog2Pi - 0.5 * std::log(rho));
}

double chi_star_via_flow(const Measure1D& mu, double t_max, int steps) {
    if (t_max < 50.0)
        throw std::invalid_argument("chi_star_via_flow: horizon t_max must be >= 50");
    if (steps < 5) throw std::invalid_argument("chi_star_via_flow: too few steps");
    const double m2 = mu.moment(2);

    freeconv::ConvOptions opts;
    opts.out_grid = 1201;

    // substitute u = log(1+t); the integrand decays like e^{-u}
    int n = steps | 1;
    const double u_max = std::log1p(t_max);
    const double h = u_max / (n - 1);
    auto integrand = [&](double u) {
        const double t = std::expm1(u);
        const double phi =
            t == 0.0 ? fisher(mu) : fisher(freeconv::semicircular_flow(mu, t, opts));
        return (1.0 / (1.0 + t) - phi) * (1.0 + t);
    };
    double sum = integrand(0.0) + integrand(u_max);
    for (int i = 1; i < n - 1; ++i) sum += (i % 2 ? 4.0 : 2.0) * integrand(i * h);
    const double integral = sum * h / 3.0;

    // beyond t_max, Phi*(X + sqrt(t) S) ~ 1/(m2 + t)
    const double tail = std::log((m2 + t_max) / (1.0 + t_max));
    return 0.5 + kHalfLog2Pi + 0.5 * (integral + tail);
}

EntropyReport entropy_report(const Measure1D& mu, double rho) {
    EntropyReport r;
    r.chi = free_entropy(mu);
    r.chi_rel = relative_entropy(mu);
    r.fisher_abs = fisher(mu);
    r.fisher_rel = relative_fisher(mu, rho);
    r.variance = mu.variance();
    return r;
}

}  // namespace freeprob::entropy
