#include "freeprob/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace freeprob::transforms {

namespace {

constexpr double kPi = std::numbers::pi;

// sqrt(w - a) sqrt(w - b) with principal branches: analytic off [a, b],
// asymptotic to +w at infinity, boundary values from above on the cut.
Complex cut_sqrt(Complex w, double a, double b) {
    return std::sqrt(w - a) * std::sqrt(w - b);
}

Complex base_cauchy(measure::Family f, double fam_param, Complex w) {
    switch (f) {
        case measure::Family::semicircle:  // radius 2, unit variance
            return 0.5 * (w - cut_sqrt(w, -2.0, 2.0));
        case measure::Family::uniform:  // on [-1, 1]
            return 0.5 * (std::log(w + 1.0) - std::log(w - 1.0));
        case measure::Family::arcsine:  // on [-1, 1]
            return 1.0 / cut_sqrt(w, -1.0, 1.0);
        case measure::Family::marchenko_pastur: {
            // centered: W - 1 with W ~ MP(lambda), 0 < lambda < 1
            const double lam = fam_param;
            const double sq = std::sqrt(lam);
            const double lm = (1 - sq) * (1 - sq), lp = (1 + sq) * (1 + sq);
            const Complex u = w + 1.0;
            return 2.0 / (u + lam - 1.0 + cut_sqrt(u, lm, lp));
        }
        default:
            throw std::logic_error("base_cauchy: untagged family");
    }
}

}  // namespace

bool has_closed_form(const Measure1D& mu) {
    return mu.family != measure::Family::none;
}

Complex cauchy_quadrature(const Measure1D& mu, Complex z) {
    Complex acc = 0;
    for (const auto& a : mu.atoms) acc += a.mass / (z - a.x);
    const std::size_t N = mu.grid.size();
    if (N >= 2) {
        // per cell [u, v] with midpoint m, f linear with slope s:
        //   int f/(z - y) dy = fm D + s B,  D = log(z-u) - log(z-v),
        //   B = (z-m) D - h.  Writing r = h/(2(z-m)) gives D = 2 atanh(r)
        //   and B = 2(z-m)(r^3/3 + r^5/5 + ...); the series form keeps B
        //   cancellation-free where steep cells (s ~ 1/h^2 at density
        //   singularities) would otherwise amplify log rounding noise.
        for (std::size_t i = 0; i + 1 < N; ++i) {
            const double u = mu.grid[i], v = mu.grid[i + 1];
            const double h = v - u;
            const double s = (mu.density[i + 1] - mu.density[i]) / h;
            const double fm = 0.5 * (mu.density[i] + mu.density[i + 1]);
            const Complex zeta = z - 0.5 * (u + v);
            const Complex r = 0.5 * h / zeta;
            Complex B, D;
            if (std::abs(r) < 0.1) {
                const Complex r2 = r * r;
                const Complex tail =
                    r2 * (1.0 / 3.0 +
                          r2 * (1.0 / 5.0 +
                                r2 * (1.0 / 7.0 +
                                      r2 * (1.0 / 9.0 +
                                            r2 * (1.0 / 11.0 +
                                                  r2 * (1.0 / 13.0))))));
                B = 2.0 * zeta * r * tail;
                D = (B + h) / zeta;
            } else {
                D = std::log(z - u) - std::log(z - v);
                B = zeta * D - h;
            }
            acc += fm * D + s * B;
        }
    }
    return acc;
}

Complex cauchy(const Measure1D& mu, Complex z) {
    if (!has_closed_form(mu)) return cauchy_quadrature(mu, z);
    Complex acc = 0;
    for (const auto& a : mu.atoms) acc += a.mass / (z - a.x);
    // X = scale * Y + shift  =>  G_X(z) = G_Y((z - shift)/scale) / scale
    acc += base_cauchy(mu.family, mu.fam_param, (z - mu.aff_shift) / mu.aff_scale) /
           mu.aff_scale;
    return acc;
}

double hilbert(const Measure1D& mu, double x) {
    double acc = 0;
    for (const auto& a : mu.atoms) {
        if (x == a.x)
            throw std::invalid_argument("hilbert transform evaluated at an atom");
        acc += a.mass / (x - a.x);
    }
    const std::size_t N = mu.grid.size();
    if (N < 2) return acc;
    const auto& y = mu.grid;
    const auto& f = mu.density;

    // grouped per node: the log singularity at an interior node carries the
    // slope-jump coefficient (s_j - s_{j-1})(x - y_j), which vanishes as
    // x -> y_j; that is exactly the symmetric principal-value cancellation.
    auto slope = [&](std::size_t j) { return (f[j + 1] - f[j]) / (y[j + 1] - y[j]); };
    auto logterm = [&](double w) { return w == 0.0 ? 0.0 : std::log(std::fabs(w)); };

    const double s0 = slope(0), sl = slope(N - 2);
    const double fx0 = f[0] + s0 * (x - y[0]);
    const double fxl = f[N - 1] + sl * (x - y[N - 1]);
    if (fx0 != 0.0 && x == y[0]) return std::numeric_limits<double>::infinity() * (f[0] > 0 ? -1 : 1);
    if (fxl != 0.0 && x == y[N - 1]) return std::numeric_limits<double>::infinity() * (f[N - 1] > 0 ? 1 : -1);

    acc += fx0 * logterm(x - y[0]) - fxl * logterm(x - y[N - 1]);
    double sprev = s0;
    for (std::size_t j = 1; j + 1 < N; ++j) {
        const double sj = slope(j);
        const double w = x - y[j];
        if (w != 0.0) acc += (sj - sprev) * w * std::log(std::fabs(w));
        sprev = sj;
    }
    acc -= f[N - 1] - f[0];
    return acc;
}

std::vector<double> hilbert_at_nodes(const Measure1D& mu) {
    const std::size_t N = mu.grid.size();
    if (N < 4) throw std::invalid_argument("hilbert_at_nodes needs at least 4 nodes");
    std::vector<double> H(N);
    for (std::size_t j = 1; j + 1 < N; ++j) H[j] = hilbert(mu, mu.grid[j]);
    // endpoints by linear extrapolation in x
    H[0] = H[1] + (mu.grid[0] - mu.grid[1]) * (H[1] - H[2]) / (mu.grid[1] - mu.grid[2]);
    H[N - 1] = H[N - 2] + (mu.grid[N - 1] - mu.grid[N - 2]) * (H[N - 2] - H[N - 3]) /
                              (mu.grid[N - 2] - mu.grid[N - 3]);
    return H;
}

double richardson3(double at_eps, double at_2eps, double at_4eps) {
    return (8.0 * at_eps - 6.0 * at_2eps + at_4eps) / 3.0;
}

std::vector<double> inversion_grid(double a, double b, int n, double eps,
                                   bool edge_refine) {
    return inversion_grid(a, b, n, eps, edge_refine, {});
}

std::vector<double> inversion_grid(double a, double b, int n, double eps,
                                   bool edge_refine,
                                   const std::vector<double>& interior_edges) {
    std::vector<double> g = measure::chebyshev_grid(a, b, n);
    if (edge_refine) {
        const double span = b - a;
        const double h_edge = span * 0.5 * std::pow(kPi / (n - 1), 2);
        std::vector<double> extra;
        for (double d = 0.25 * eps; d < 64.0 * h_edge && d < 0.05 * span; d *= 1.35) {
            extra.push_back(a + d);
            extra.push_back(b - d);
        }
        // interior spectral edges (multi-band supports) carry the same
        // inverse-square-root mass concentration as the outer ones; their
        // location is only known to the detection resolution, so the cascade
        // is widened to cover that uncertainty
        const double reach =
            std::max(64.0 * h_edge, 2.0 * span / 639.0);
        for (double c : interior_edges) {
            if (!(c > a) || !(c < b)) continue;
            extra.push_back(c);
            for (double d = 0.25 * eps; d < reach && d < 0.05 * span; d *= 1.35) {
                extra.push_back(c - d);
                extra.push_back(c + d);
            }
        }
        g.insert(g.end(), extra.begin(), extra.end());
        std::sort(g.begin(), g.end());
        // drop near-duplicates closer than eps/8
        std::vector<double> out;
        out.reserve(g.size());
        for (double x : g)
            if (out.empty() || x - out.back() > 0.125 * eps) out.push_back(x);
        if (out.back() != b) out.push_back(b);
        g = std::move(out);
    }
    return g;
}

Measure1D assemble_density(std::vector<double> grid, std::vector<double> rho,
                           double mass_tol) {
    for (double& v : rho) v = std::max(0.0, v);
    double m = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        m += 0.5 * (grid[i + 1] - grid[i]) * (rho[i] + rho[i + 1]);
    if (!std::isfinite(m) || std::fabs(m - 1.0) > mass_tol)
        throw InversionError("recovered density mass " + std::to_string(m) +
                             " outside tolerance (atoms or lost support)");
    for (double& v : rho) v /= m;
    Measure1D mu;
    mu.lo = grid.front();
    mu.hi = grid.back();
    mu.grid = std::move(grid);
    mu.density = std::move(rho);
    return mu;
}

Measure1D stieltjes_invert(const std::function<Complex(Complex)>& G,
                           double lo_hint, double hi_hint,
                           const InvertOptions& opts) {
    if (!(lo_hint < hi_hint)) throw std::invalid_argument("invalid support hint");
    auto dens3 = [&](double x, double e) {
        const double r1 = -G(Complex(x, e)).imag() / kPi;
        const double r2 = -G(Complex(x, 2 * e)).imag() / kPi;
        const double r4 = -G(Complex(x, 4 * e)).imag() / kPi;
        return richardson3(r1, r2, r4);
    };

    // detection pass; interior threshold crossings mark gaps between
    // support bands, whose edges need the same refinement as the outer ones
    const int K = opts.detect_grid;
    double a_det = 0, b_det = 0;
    bool found = false;
    std::vector<bool> above(K);
    std::vector<double> xs(K);
    for (int i = 0; i < K; ++i) {
        const double x = lo_hint + (hi_hint - lo_hint) * i / (K - 1);
        xs[i] = x;
        above[i] = dens3(x, opts.detect_eps) > opts.support_threshold;
        if (above[i]) {
            if (!found) a_det = x;
            b_det = x;
            found = true;
        }
    }
    if (!found) throw InversionError("no absolutely continuous part detected");
    // sharpen every crossing at the working height.  The detection halo
    // offsets the apparent edge by several cells, and the crossing cell may
    // sit entirely outside the true edge, so widen the bracket by one cell
    // each way.  At opts.eps the extrapolation overshoots to a small negative
    // value just outside the support, so the sign of the extrapolated density
    // flips at the edge itself; without a sign bracket the cell midpoint is
    // kept, which is all a soft edge needs.
    const double h_det = (hi_hint - lo_hint) / (K - 1);
    const auto inside = [&](double x) { return dens3(x, opts.eps) > 0.0; };
    std::vector<double> edges;
    for (int i = 0; i + 1 < K; ++i) {
        if (above[i] == above[i + 1]) continue;
        double l = std::max(lo_hint, xs[i] - h_det);
        double r = std::min(hi_hint, xs[i + 1] + h_det);
        if (inside(l) != inside(r)) {
            for (int it = 0; it < 50; ++it) {
                const double m = 0.5 * (l + r);
                (inside(m) == inside(l) ? l : r) = m;
            }
        }
        edges.push_back(0.5 * (l + r));
    }
    const double pad = opts.pad_frac * (b_det - a_det);
    const double a = std::max(lo_hint, a_det - pad);
    const double b = std::min(hi_hint, b_det + pad);
    if (!(a < b)) throw InversionError("degenerate detected support");

    std::vector<double> grid = inversion_grid(a, b, opts.n_grid, opts.eps,
                                              opts.edge_refine, edges);
    std::vector<double> rho(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) rho[i] = dens3(grid[i], opts.eps);
    return assemble_density(std::move(grid), std::move(rho), opts.mass_tol);
}

}  // namespace freeprob::transforms
