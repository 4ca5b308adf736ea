#include "freeprob/freeconv.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>

#include "freeprob/entropy.hpp"
#include "freeprob/transforms.hpp"

namespace freeprob::freeconv {

namespace {

using transforms::cauchy;

bool is_point_mass(const Measure1D& mu) {
    return mu.grid.empty() && mu.atoms.size() == 1;
}

bool is_plain_semicircle(const Measure1D& mu) {
    return mu.family == measure::Family::semicircle && !mu.has_atoms();
}

// Grid-only measures pay O(nodes) per Cauchy evaluation, so cap the node
// count before entering a fixed-point loop.  Tagged families evaluate in
// closed form and pass through untouched.  The resampled density is rescaled
// to carry exactly the original a.c. mass.
Measure1D eval_form(const Measure1D& mu, int max_nodes) {
    if (mu.family != measure::Family::none) return mu;
    if (static_cast<int>(mu.grid.size()) <= max_nodes) return mu;

    std::vector<double> g =
        measure::chebyshev_grid(mu.grid.front(), mu.grid.back(), max_nodes);
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = mu.density_at(g[i]);

    double atom_mass = 0;
    for (const auto& a : mu.atoms) atom_mass += a.mass;
    const double want = mu.mass() - atom_mass;
    double have = 0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
        have += 0.5 * (d[i] + d[i + 1]) * (g[i + 1] - g[i]);
    if (have > 0 && want > 0) {
        const double s = want / have;
        for (double& v : d) v *= s;
    }
    return measure::from_grid(std::move(g), std::move(d), mu.atoms);
}

// Damped fixed-point solver for a subordination map F_z, continued downward
// in Im z: each new level is solved from the answer one octave above, and
// repeated queries at the same level warm-start from the previous abscissa
// (the inversion sweeps x monotonically per level).
class Subordinator {
public:
    using Map = std::function<Complex(Complex, Complex)>;

    Subordinator(Map F, double top_level, const ConvOptions& o)
        : F_(std::move(F)), y0_(std::max(top_level, 1.0)), o_(o) {}

    Complex solve(Complex z) {
        auto it = warm_.find(z.imag());
        if (it != warm_.end()) {
            try {
                const Complex w = iterate(z, it->second);
                it->second = w;
                return w;
            } catch (const ConvergenceError&) {
                // warm start led astray; redo the full downward walk
            }
        }
        const double target = z.imag();
        double y = std::max(y0_, target);
        Complex w = iterate({z.real(), y}, {z.real(), y});
        while (y > target) {
            y = std::max(0.5 * y, target);
            w = iterate({z.real(), y}, w);
        }
        warm_[target] = w;
        return w;
    }

private:
    Complex iterate(Complex z, Complex w0) const {
        // F maps the half-plane {Im w > 0} into {Im w >= Im z}; the floor
        // only absorbs rounding noise.
        const double floor = 0.5 * z.imag();
        auto step = [&](Complex w) {
            Complex fw = F_(z, w);
            if (fw.imag() < floor) fw = {fw.real(), floor};
            return w + o_.damping * (fw - w);
        };
        auto settled = [&](Complex a, Complex b) {
            return std::abs(a - b) <= o_.fp_tol * std::max(1.0, std::abs(a));
        };
        Complex w = w0;
        if (w.imag() < floor) w = {w.real(), z.imag()};
        for (int k = 0; k < o_.max_iter; ++k) {
            // two damped steps, then a guarded Aitken jump; the damped map
            // turns neutral near support edges, where the extrapolation
            // restores fast convergence
            const Complex w1 = step(w);
            if (settled(w1, w)) return w1;
            const Complex w2 = step(w1);
            if (settled(w2, w1)) return w2;
            const Complex d1 = w1 - w;
            const Complex d2 = w2 - w1;
            const Complex den = d2 - d1;
            Complex next = w2;
            if (std::abs(den) > 1e-300) {
                const Complex acc = w - d1 * d1 / den;
                if (acc.imag() > floor && std::abs(acc) < 1e12) {
                    const Complex acc1 = step(acc);
                    if (settled(acc1, acc)) return acc1;
                    if (std::abs(acc1 - acc) < std::abs(d2)) next = acc1;
                }
            }
            w = next;
        }
        throw ConvergenceError("subordination fixed point did not settle", z);
    }

    Map F_;
    double y0_;
    ConvOptions o_;
    std::map<double, Complex> warm_;
};

transforms::InvertOptions invert_options(const ConvOptions& o) {
    transforms::InvertOptions io;
    io.eps = o.eps;
    io.n_grid = o.out_grid;
    io.detect_grid = o.det_grid;
    io.detect_eps = o.detect_eps;
    io.mass_tol = o.mass_tol;
    return io;
}

std::shared_ptr<Subordinator> flow_subordinator(const Measure1D& ev, double t,
                                                const ConvOptions& opts) {
    return std::make_shared<Subordinator>(
        [ev, t](Complex z, Complex w) { return z - t * cauchy(ev, w); },
        2.0 * std::sqrt(t), opts);
}

// h_mu(w) = 1/G_mu(w) - w, the centered reciprocal Cauchy transform.
Complex h_transform(const Measure1D& mu, Complex w) {
    return 1.0 / cauchy(mu, w) - w;
}

std::shared_ptr<Subordinator> bb_subordinator(const Measure1D& emu,
                                              const Measure1D& enu,
                                              const ConvOptions& opts) {
    // fixed point in the second subordination function:
    //   w2 = z + h_mu(z + h_nu(w2)),  then  G_out(z) = G_mu(z + h_nu(w2))
    const double span =
        (emu.hi - emu.lo) + (enu.hi - enu.lo);
    return std::make_shared<Subordinator>(
        [emu, enu](Complex z, Complex w2) {
            return z + h_transform(emu, z + h_transform(enu, w2));
        },
        0.25 * span, opts);
}

void reject_heavy_atoms(const Measure1D& mu, const Measure1D& nu) {
    if (mu.max_atom_mass() > 0.5 + 1e-12 || nu.max_atom_mass() > 0.5 + 1e-12)
        throw std::invalid_argument(
            "free_add: an input atom of mass > 1/2 can survive into the "
            "output, which the grid representation cannot hold");
}

}  // namespace

Measure1D semicircular_flow(const Measure1D& mu, double t,
                            const ConvOptions& opts) {
    if (!(t > 0))
        throw std::invalid_argument("semicircular_flow: t must be positive");
    if (is_plain_semicircle(mu)) {
        const double v = mu.aff_scale * mu.aff_scale;
        return measure::semicircle(mu.aff_shift, v + t, opts.out_grid);
    }
    if (is_point_mass(mu))
        return measure::semicircle(mu.atoms[0].x, t, opts.out_grid);

    const Measure1D ev = eval_form(mu, opts.eval_grid_max);
    auto sub = flow_subordinator(ev, t, opts);
    auto G = [ev, sub](Complex z) { return cauchy(ev, sub->solve(z)); };
    const double pad = 2.0 * std::sqrt(t);
    return transforms::stieltjes_invert(G, mu.lo - pad, mu.hi + pad,
                                        invert_options(opts));
}

Complex semicircular_flow_cauchy(const Measure1D& mu, double t, Complex z,
                                 const ConvOptions& opts) {
    if (!(t > 0))
        throw std::invalid_argument("semicircular_flow: t must be positive");
    if (!(z.imag() > 0))
        throw std::invalid_argument("semicircular_flow_cauchy: need Im z > 0");
    if (is_plain_semicircle(mu)) {
        const double v = mu.aff_scale * mu.aff_scale;
        return cauchy(measure::semicircle(mu.aff_shift, v + t, 65), z);
    }
    if (is_point_mass(mu))
        return cauchy(measure::semicircle(mu.atoms[0].x, t, 65), z);
    const Measure1D ev = eval_form(mu, opts.eval_grid_max);
    auto sub = flow_subordinator(ev, t, opts);
    return cauchy(ev, sub->solve(z));
}

Measure1D free_add(const Measure1D& mu, const Measure1D& nu,
                   const ConvOptions& opts) {
    if (is_point_mass(nu)) return measure::translate(mu, nu.atoms[0].x);
    if (is_point_mass(mu)) return measure::translate(nu, mu.atoms[0].x);
    if (is_plain_semicircle(mu) && is_plain_semicircle(nu)) {
        return measure::semicircle(
            mu.aff_shift + nu.aff_shift,
            mu.aff_scale * mu.aff_scale + nu.aff_scale * nu.aff_scale,
            opts.out_grid);
    }
    // adding a semicircle is the semicircular flow of the other summand
    if (is_plain_semicircle(nu)) {
        const double v = nu.aff_scale * nu.aff_scale;
        return semicircular_flow(measure::translate(mu, nu.aff_shift), v, opts);
    }
    if (is_plain_semicircle(mu)) {
        const double v = mu.aff_scale * mu.aff_scale;
        return semicircular_flow(measure::translate(nu, mu.aff_shift), v, opts);
    }
    reject_heavy_atoms(mu, nu);

    const Measure1D emu = eval_form(mu, opts.eval_grid_max);
    const Measure1D enu = eval_form(nu, opts.eval_grid_max);
    // Atomic sums can develop inverse-square-root edges whose smoothed mass
    // leaks past the support like sqrt(eps); with exact transform evaluations
    // on both sides nothing limits how low the inversion height can go.
    ConvOptions sharp = opts;
    if ((transforms::has_closed_form(emu) || emu.grid.empty()) &&
        (transforms::has_closed_form(enu) || enu.grid.empty()))
        sharp.eps = std::min(opts.eps, 1e-6);
    auto sub = bb_subordinator(emu, enu, sharp);
    auto G = [emu, enu, sub](Complex z) {
        const Complex w2 = sub->solve(z);
        return cauchy(emu, z + h_transform(enu, w2));
    };
    return transforms::stieltjes_invert(G, mu.lo + nu.lo, mu.hi + nu.hi,
                                        invert_options(sharp));
}

Complex free_add_cauchy(const Measure1D& mu, const Measure1D& nu, Complex z,
                        const ConvOptions& opts) {
    if (!(z.imag() > 0))
        throw std::invalid_argument("free_add_cauchy: need Im z > 0");
    if (is_point_mass(nu)) return cauchy(mu, z - nu.atoms[0].x);
    if (is_point_mass(mu)) return cauchy(nu, z - mu.atoms[0].x);
    if (is_plain_semicircle(nu)) {
        const double v = nu.aff_scale * nu.aff_scale;
        return semicircular_flow_cauchy(measure::translate(mu, nu.aff_shift), v,
                                        z, opts);
    }
    if (is_plain_semicircle(mu)) {
        const double v = mu.aff_scale * mu.aff_scale;
        return semicircular_flow_cauchy(measure::translate(nu, mu.aff_shift), v,
                                        z, opts);
    }
    reject_heavy_atoms(mu, nu);
    const Measure1D emu = eval_form(mu, opts.eval_grid_max);
    const Measure1D enu = eval_form(nu, opts.eval_grid_max);
    auto sub = bb_subordinator(emu, enu, opts);
    const Complex w2 = sub->solve(z);
    return cauchy(emu, z + h_transform(enu, w2));
}

Measure1D ou_flow_law(const Measure1D& mu, double t, double rho,
                      const ConvOptions& opts) {
    if (t < 0) throw std::invalid_argument("ou_flow: t must be nonnegative");
    if (!(rho > 0)) throw std::invalid_argument("ou_flow: rho must be positive");
    if (t == 0) return mu;
    const double shrink = std::exp(-t);
    const double added = -std::expm1(-2.0 * t) / rho;  // (1 - e^{-2t})/rho
    return semicircular_flow(measure::dilate(mu, shrink), added, opts);
}

FlowPoint ou_flow(const Measure1D& mu, double t, double rho,
                  const ConvOptions& opts) {
    FlowPoint p;
    p.t = t;
    p.law = ou_flow_law(mu, t, rho, opts);
    p.chi_star = entropy::free_entropy(p.law);
    p.fisher_rel = entropy::relative_fisher(p.law, rho);
    return p;
}

Measure1D weighted_free_sum(const Measure1D& mu,
                            const std::vector<double>& weights,
                            const ConvOptions& opts) {
    if (weights.empty())
        throw std::invalid_argument("weighted_free_sum: no weights");
    for (double w : weights)
        if (w == 0 || !std::isfinite(w))
            throw std::invalid_argument(
                "weighted_free_sum: weights must be finite and nonzero");
    Measure1D acc = measure::dilate(mu, weights[0]);
    for (std::size_t i = 1; i < weights.size(); ++i)
        acc = free_add(acc, measure::dilate(mu, weights[i]), opts);
    return acc;
}

Measure1D clt_sum(const Measure1D& mu, int n, const ConvOptions& opts) {
    if (n < 1) throw std::invalid_argument("clt_sum: n must be >= 1");
    // Binary splitting over normalized partial sums: carry the law of
    // (X_1 + ... + X_k)/sqrt(k), merge with  s_{a+b} =
    // dilate(s_a, sqrt(a/(a+b))) boxplus dilate(s_b, sqrt(b/(a+b))).
    Measure1D pw = mu;
    long long pw_count = 1;
    Measure1D acc;
    long long acc_count = 0;
    int m = n;
    while (true) {
        if (m & 1) {
            if (acc_count == 0) {
                acc = pw;
                acc_count = pw_count;
            } else {
                const long long tot = acc_count + pw_count;
                acc = free_add(
                    measure::dilate(acc, std::sqrt(double(acc_count) / tot)),
                    measure::dilate(pw, std::sqrt(double(pw_count) / tot)),
                    opts);
                acc_count = tot;
            }
        }
        m >>= 1;
        if (!m) break;
        const double r = std::sqrt(0.5);
        pw = free_add(measure::dilate(pw, r), measure::dilate(pw, r), opts);
        pw_count *= 2;
    }
    return acc;
}

}  // namespace freeprob::freeconv
