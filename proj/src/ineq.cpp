#include "freeprob/ineq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "freeprob/entropy.hpp"
#include "freeprob/stein.hpp"

namespace freeprob::ineq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IneqReport one_sided(std::string name, double lhs, double rhs, double tol,
                     std::vector<std::pair<std::string, double>> inputs,
                     std::vector<std::string> flags = {}) {
    IneqReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tol;
    r.inputs = std::move(inputs);
    r.flags = std::move(flags);
    if (rhs == kInf) {
        r.slack = kInf;
        r.holds = true;
        r.flags.push_back("vacuous");
    } else {
        r.slack = rhs - lhs;
        r.holds = std::isnan(r.slack) ? false : r.slack >= -tol;
    }
    return r;
}

IneqReport two_sided(std::string name, double lhs, double rhs, double tol,
                     std::vector<std::pair<std::string, double>> inputs) {
    IneqReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tol;
    r.inputs = std::move(inputs);
    r.slack = rhs - lhs;
    r.holds = std::isfinite(r.slack) && std::fabs(r.slack) <= tol;
    r.flags = {"two_sided"};
    return r;
}

void require_centered(const Measure1D& mu, const char* who) {
    const double span = std::max(1.0, mu.hi - mu.lo);
    if (std::fabs(mu.mean()) > 1e-6 * span)
        throw std::invalid_argument(std::string(who) +
                                    ": measure must be centered");
}

double dfun(double t) { return t - std::log1p(t); }

// chi*(X|V_rho) up to the constant dropped by differencing in t
double chi_rel_rho(const freeconv::FlowPoint& p, double rho) {
    return 0.5 * rho * p.law.moment(2) - p.chi_star;
}

}  // namespace

IneqReport lsi_check(const Measure1D& mu, double rho) {
    if (!(rho > 0)) throw std::invalid_argument("lsi_check: rho must be positive");
    require_centered(mu, "lsi_check");
    const double gap = entropy::gibbs_entropy_gap(mu, rho);
    const double fr = entropy::relative_fisher(mu, rho);
    return one_sided("lsi", gap, fr / (2.0 * rho), 1e-4,
                     {{"rho", rho}, {"m2", mu.moment(2)}});
}

IneqReport hsi_check(const Measure1D& mu, double rho, int degree) {
    if (!(rho > 0)) throw std::invalid_argument("hsi_check: rho must be positive");
    require_centered(mu, "hsi_check");
    const double gap = entropy::gibbs_entropy_gap(mu, rho);
    const double fr = entropy::relative_fisher(mu, rho);
    const double s =
        stein::estimate_kernel(mu, degree, 1e-10, rho).discrepancy_lb;
    double rhs;
    std::vector<std::string> flags = {"conservative"};
    if (s > 0 && std::isfinite(fr)) {
        rhs = 0.5 * s * s * std::log1p(fr / (rho * s * s));
    } else if (!std::isfinite(fr)) {
        rhs = kInf;
    } else {
        rhs = 0.0;  // s = 0: limiting value of (s^2/2) log(1 + fr/(rho s^2))
    }
    IneqReport r = one_sided("hsi", gap, rhs, 1e-4,
                             {{"rho", rho}, {"degree", double(degree)},
                              {"discrepancy_lb", s}, {"fisher_rel", fr}},
                             std::move(flags));
    if (!r.holds && s == 0 && gap > r.tolerance)
        r.flags.push_back("inconclusive");  // degree too small to resolve s
    return r;
}

std::vector<IneqReport> flow_checks(const Measure1D& mu, double rho,
                                    const std::vector<double>& t_grid,
                                    int degree, const ConvOptions& opts) {
    if (!(rho > 0))
        throw std::invalid_argument("flow_checks: rho must be positive");
    require_centered(mu, "flow_checks");
    for (double t : t_grid)
        if (!(t > 0))
            throw std::invalid_argument("flow_checks: t grid must be positive");

    const double base_fisher = entropy::relative_fisher(mu, rho);
    double disc = -1;  // degree < 1 disables the stein_decay rows
    if (degree >= 1)
        disc = stein::estimate_kernel(mu, degree, 1e-10, rho).discrepancy_lb;

    std::vector<IneqReport> out;
    for (double t : t_grid) {
        // central difference in u = log t: the short-time singular part of
        // chi is c*log t, linear in u, so it differentiates exactly and the
        // h^2 error only sees the smooth remainder
        const double h = 0.05;
        const auto minus = freeconv::ou_flow(mu, t * std::exp(-h), rho, opts);
        const auto mid = freeconv::ou_flow(mu, t, rho, opts);
        const auto plus = freeconv::ou_flow(mu, t * std::exp(h), rho, opts);

        const double deriv =
            (chi_rel_rho(plus, rho) - chi_rel_rho(minus, rho)) / (2.0 * h * t);
        const double db_rhs = -mid.fisher_rel / rho;
        out.push_back(two_sided(
            "de_bruijn", deriv, db_rhs,
            std::max(0.02 * std::fabs(db_rhs), 1e-3),
            {{"rho", rho}, {"t", t}, {"h", h}}));

        out.push_back(one_sided("exp_decay", mid.fisher_rel,
                                std::exp(-2.0 * t) * base_fisher, 1e-4,
                                {{"rho", rho}, {"t", t}}));

        if (degree >= 1) {
            const double decay =
                std::exp(-4.0 * t) / (-std::expm1(-2.0 * t));
            out.push_back(one_sided(
                "stein_decay", mid.fisher_rel / rho, decay * disc * disc, 1e-4,
                {{"rho", rho},
                 {"t", t},
                 {"degree", double(degree)},
                 {"discrepancy_lb", disc}},
                {"conservative"}));
            if (!out.back().holds) out.back().flags.push_back("inconclusive");
        }
    }
    return out;
}

namespace {

std::vector<IneqReport> filter_by_name(std::vector<IneqReport> all,
                                       const char* name) {
    std::vector<IneqReport> out;
    for (auto& r : all)
        if (r.name == name) out.push_back(std::move(r));
    return out;
}

}  // namespace

std::vector<IneqReport> de_bruijn_check(const Measure1D& mu, double rho,
                                        const std::vector<double>& t_grid,
                                        const ConvOptions& opts) {
    return filter_by_name(flow_checks(mu, rho, t_grid, 0, opts), "de_bruijn");
}

std::vector<IneqReport> exp_decay_check(const Measure1D& mu, double rho,
                                        const std::vector<double>& t_grid,
                                        const ConvOptions& opts) {
    return filter_by_name(flow_checks(mu, rho, t_grid, 0, opts), "exp_decay");
}

std::vector<IneqReport> stein_decay_check(const Measure1D& mu, double rho,
                                          int degree,
                                          const std::vector<double>& t_grid,
                                          const ConvOptions& opts) {
    if (degree < 1)
        throw std::invalid_argument("stein_decay_check: degree must be >= 1");
    return filter_by_name(flow_checks(mu, rho, t_grid, degree, opts),
                          "stein_decay");
}

IneqReport deficit_check(const Measure1D& mu, double rho) {
    if (!(rho > 0))
        throw std::invalid_argument("deficit_check: rho must be positive");
    require_centered(mu, "deficit_check");
    const double fisher_abs = entropy::fisher(mu);
    if (!std::isfinite(fisher_abs))
        throw std::invalid_argument(
            "deficit_check: needs finite free Fisher information");
    const double fisher_rel = entropy::relative_fisher(mu, rho);
    const double gap = entropy::gibbs_entropy_gap(mu, rho);
    const double lhs = rho * dfun(fisher_abs / rho - 1.0);
    const double rhs = fisher_rel - 2.0 * rho * gap;
    return one_sided("deficit", lhs, rhs, 1e-4,
                     {{"rho", rho},
                      {"fisher", fisher_abs},
                      {"fisher_rel", fisher_rel},
                      {"entropy_gap", gap}});
}

IneqReport stam_check(const Measure1D& mu, const Measure1D& nu,
                      const ConvOptions& opts) {
    const double fm = entropy::fisher(mu);
    const double fn = entropy::fisher(nu);
    if (!std::isfinite(fm) || !std::isfinite(fn))
        throw std::invalid_argument(
            "stam_check: both inputs need finite free Fisher information");
    const Measure1D sum = freeconv::free_add(mu, nu, opts);
    const double fs = entropy::fisher(sum);
    return one_sided("stam", 1.0 / fm + 1.0 / fn, 1.0 / fs, 1e-3,
                     {{"fisher_mu", fm}, {"fisher_nu", fn}, {"fisher_sum", fs}});
}

namespace {

CltRow clt_row(const Measure1D& law, int N, std::string tag, double sigma) {
    CltRow row;
    row.N = N;
    row.weights_tag = std::move(tag);
    row.sigma = sigma;
    const Measure1D c = measure::center(law);
    row.entropy_gap = std::fabs(entropy::gibbs_entropy_gap(c, 1.0));
    row.fisher_rel = entropy::relative_fisher(c, 1.0);
    row.bound = sigma < 1 ? sigma * std::log(1.0 / sigma) : 0.0;
    row.ratio = row.bound > 0 ? row.entropy_gap / row.bound : kInf;
    return row;
}

}  // namespace

CltReport clt_harness(const Measure1D& mu, const std::vector<int>& Ns,
                      const std::vector<double>& custom_weights,
                      const ConvOptions& opts) {
    require_centered(mu, "clt_harness");
    if (std::fabs(mu.variance() - 1.0) > 1e-6)
        throw std::invalid_argument("clt_harness: needs unit variance");

    CltReport rep;
    if (!custom_weights.empty()) {
        double s2 = 0, s4 = 0;
        for (double w : custom_weights) {
            s2 += w * w;
            s4 += w * w * w * w;
        }
        if (std::fabs(s2 - 1.0) > 1e-12)
            throw std::invalid_argument(
                "clt_harness: weights must square-sum to 1");
        const Measure1D law = freeconv::weighted_free_sum(mu, custom_weights, opts);
        rep.rows.push_back(
            clt_row(law, int(custom_weights.size()), "custom", s4));
        return rep;
    }

    // equal weights: sigma_N = 1/N; share laws along the doubling chain
    int max_n = 1;
    for (int N : Ns) {
        if (N < 1) throw std::invalid_argument("clt_harness: N must be >= 1");
        max_n = std::max(max_n, N);
    }
    std::map<int, Measure1D> chain;
    chain.emplace(1, mu);
    const double r = std::sqrt(0.5);
    for (int p = 2; p <= max_n; p *= 2) {
        const Measure1D& half = chain.at(p / 2);
        chain.emplace(p, freeconv::free_add(measure::dilate(half, r),
                                            measure::dilate(half, r), opts));
    }
    for (int N : Ns) {
        const auto it = chain.find(N);
        const Measure1D& law =
            it != chain.end()
                ? it->second
                : chain.emplace(N, freeconv::clt_sum(mu, N, opts)).first->second;
        rep.rows.push_back(clt_row(law, N, "equal", 1.0 / N));
    }
    return rep;
}

IneqReport stein_kernel_of_sum(const Measure1D& mu,
                               const std::vector<double>& weights, int degree,
                               const ConvOptions& opts) {
    require_centered(mu, "stein_kernel_of_sum");
    if (std::fabs(mu.variance() - 1.0) > 1e-6)
        throw std::invalid_argument(
            "stein_kernel_of_sum: needs unit-variance summands");
    double s2 = 0, s4 = 0;
    for (double w : weights) {
        s2 += w * w;
        s4 += w * w * w * w;
    }
    if (std::fabs(s2 - 1.0) > 1e-12)
        throw std::invalid_argument(
            "stein_kernel_of_sum: weights must square-sum to 1");

    const Measure1D y =
        measure::center(freeconv::weighted_free_sum(mu, weights, opts));
    const double lhs = stein::discrepancy(y, degree);
    const double base = stein::discrepancy(measure::center(mu), degree);
    return one_sided("stein_kernel_of_sum", lhs, std::sqrt(s4) * base, 0.02,
                     {{"n", double(weights.size())},
                      {"sigma", s4},
                      {"degree", double(degree)},
                      {"summand_discrepancy_lb", base}},
                     {"lower_bound_semantics"});
}

}  // namespace freeprob::ineq
