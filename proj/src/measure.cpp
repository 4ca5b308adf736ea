#include "freeprob/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace freeprob::measure {

namespace {

constexpr double kPi = std::numbers::pi;

void check_grid(const std::vector<double>& grid, const std::vector<double>& density) {
    if (grid.size() != density.size())
        throw std::invalid_argument("grid and density size mismatch");
    if (grid.size() == 1) throw std::invalid_argument("grid needs at least 2 nodes");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("grid must be strictly increasing");
    for (double v : density)
        if (!(v >= 0) || !std::isfinite(v))
            throw std::invalid_argument("density values must be finite and nonnegative");
}

void renormalize(Measure1D& mu, double tol) {
    const double m = mu.mass();
    if (!(std::fabs(m - 1.0) <= tol))
        throw std::invalid_argument("total mass " + std::to_string(m) + " too far from 1");
    const double s = 1.0 / m;
    for (double& v : mu.density) v *= s;
    for (Atom& a : mu.atoms) a.mass *= s;
}

}  // namespace

double Measure1D::max_atom_mass() const {
    double m = 0;
    for (const Atom& a : atoms) m = std::max(m, a.mass);
    return m;
}

double Measure1D::integral_ac(const std::vector<double>& node_vals) const {
    if (node_vals.size() != grid.size())
        throw std::invalid_argument("integral_ac: node value count mismatch");
    double s = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double h = grid[i + 1] - grid[i];
        s += 0.5 * h * (node_vals[i] * density[i] + node_vals[i + 1] * density[i + 1]);
    }
    return s;
}

double Measure1D::mass() const {
    double s = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        s += 0.5 * (grid[i + 1] - grid[i]) * (density[i] + density[i + 1]);
    for (const Atom& a : atoms) s += a.mass;
    return s;
}

double Measure1D::moment(int k) const {
    if (k < 0) throw std::invalid_argument("moment order must be >= 0");
    double s = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double h = grid[i + 1] - grid[i];
        s += 0.5 * h * (std::pow(grid[i], k) * density[i] +
                        std::pow(grid[i + 1], k) * density[i + 1]);
    }
    for (const Atom& a : atoms) s += a.mass * std::pow(a.x, k);
    return s;
}

double Measure1D::variance() const {
    const double m1 = moment(1);
    return moment(2) - m1 * m1;
}

double Measure1D::density_at(double x) const {
    if (grid.empty() || x <= grid.front() || x >= grid.back()) {
        if (!grid.empty() && (x == grid.front() || x == grid.back())) {
            return x == grid.front() ? density.front() : density.back();
        }
        return 0;
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double w = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return density[i] * (1 - w) + density[i + 1] * w;
}

std::vector<double> chebyshev_grid(double a, double b, int n) {
    if (!(a < b)) throw std::invalid_argument("chebyshev_grid needs a < b");
    if (n < 2) throw std::invalid_argument("chebyshev_grid needs n >= 2");
    std::vector<double> g(static_cast<std::size_t>(n));
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = mid - half * std::cos(kPi * i / (n - 1));
    g.front() = a;
    g.back() = b;
    return g;
}

Measure1D semicircle(double mean, double variance, int n) {
    if (!(variance > 0)) throw std::invalid_argument("semicircle variance must be positive");
    Measure1D mu;
    const double r = 2.0 * std::sqrt(variance);
    mu.lo = mean - r;
    mu.hi = mean + r;
    mu.grid = chebyshev_grid(mu.lo, mu.hi, n);
    mu.density.resize(mu.grid.size());
    for (std::size_t i = 0; i < mu.grid.size(); ++i) {
        const double d = r * r - (mu.grid[i] - mean) * (mu.grid[i] - mean);
        mu.density[i] = d > 0 ? std::sqrt(d) / (2.0 * kPi * variance) : 0.0;
    }
    mu.family = Family::semicircle;
    mu.aff_scale = std::sqrt(variance);
    mu.aff_shift = mean;
    // analytic sample: any defect is trapezoid error, removed by the rescale
    renormalize(mu, 1e-2);
    return mu;
}

Measure1D uniform_sym(double half_width, int n) {
    if (!(half_width > 0)) throw std::invalid_argument("uniform half width must be positive");
    Measure1D mu;
    mu.lo = -half_width;
    mu.hi = half_width;
    mu.grid = chebyshev_grid(mu.lo, mu.hi, n);
    mu.density.assign(mu.grid.size(), 1.0 / (2.0 * half_width));
    mu.family = Family::uniform;
    mu.aff_scale = half_width;
    mu.aff_shift = 0;
    renormalize(mu, 1e-2);
    return mu;
}

Measure1D arcsine(double half_width, int n) {
    if (!(half_width > 0)) throw std::invalid_argument("arcsine half width must be positive");
    const double c = half_width;
    Measure1D mu;
    mu.lo = -c;
    mu.hi = c;
    mu.grid = chebyshev_grid(mu.lo, mu.hi, n);
    const std::size_t N = mu.grid.size();
    mu.density.assign(N, 0.0);

    // cdf of the arcsine law on [-c, c]
    auto cdf = [c](double x) {
        return 0.5 + std::asin(std::clamp(x / c, -1.0, 1.0)) / kPi;
    };
    // The endpoint density diverges like 1/sqrt; choose node values so each
    // cell's trapezoid mass equals the analytic cell mass, sweeping outward
    // from an exact interior anchor.  This keeps every moment of the stored
    // interpolant consistent with the true law.
    const std::size_t mid = N / 2;
    mu.density[mid] = 1.0 / (kPi * std::sqrt(c * c - mu.grid[mid] * mu.grid[mid]));
    for (std::size_t i = mid; i + 1 < N; ++i) {
        const double h = mu.grid[i + 1] - mu.grid[i];
        const double m = cdf(mu.grid[i + 1]) - cdf(mu.grid[i]);
        mu.density[i + 1] = std::max(0.0, 2.0 * m / h - mu.density[i]);
    }
    for (std::size_t i = mid; i-- > 0;) {
        const double h = mu.grid[i + 1] - mu.grid[i];
        const double m = cdf(mu.grid[i + 1]) - cdf(mu.grid[i]);
        mu.density[i] = std::max(0.0, 2.0 * m / h - mu.density[i + 1]);
    }
    mu.family = Family::arcsine;
    mu.aff_scale = c;
    mu.aff_shift = 0;
    renormalize(mu, 1e-2);
    return mu;
}

Measure1D marchenko_pastur_centered(double lambda, int n) {
    if (!(lambda > 0) || !(lambda < 1))
        throw std::invalid_argument("marchenko_pastur shape must be in (0, 1)");
    Measure1D mu;
    const double sq = std::sqrt(lambda);
    const double lm = (1 - sq) * (1 - sq), lp = (1 + sq) * (1 + sq);
    mu.lo = lm - 1.0;
    mu.hi = lp - 1.0;
    mu.grid = chebyshev_grid(mu.lo, mu.hi, n);
    mu.density.resize(mu.grid.size());
    for (std::size_t i = 0; i < mu.grid.size(); ++i) {
        const double x = mu.grid[i] + 1.0;
        const double d = (lp - x) * (x - lm);
        mu.density[i] = d > 0 ? std::sqrt(d) / (2.0 * kPi * lambda * x) : 0.0;
    }
    mu.family = Family::marchenko_pastur;
    mu.aff_scale = 1;
    mu.aff_shift = 0;
    mu.fam_param = lambda;
    renormalize(mu, 1e-2);
    return mu;
}

Measure1D symmetric_bernoulli() {
    Measure1D mu;
    mu.lo = -1;
    mu.hi = 1;
    mu.atoms = {{-1.0, 0.5}, {1.0, 0.5}};
    return mu;
}

Measure1D point_mass(double x) {
    Measure1D mu;
    mu.lo = mu.hi = x;
    mu.atoms = {{x, 1.0}};
    return mu;
}

Measure1D from_grid(std::vector<double> grid, std::vector<double> density,
                    std::vector<Atom> atoms) {
    Measure1D mu;
    if (!grid.empty()) check_grid(grid, density);
    for (const Atom& a : atoms) {
        if (!(a.mass > 0) || !std::isfinite(a.x))
            throw std::invalid_argument("atoms need positive mass and finite position");
    }
    mu.grid = std::move(grid);
    mu.density = std::move(density);
    mu.atoms = std::move(atoms);
    std::sort(mu.atoms.begin(), mu.atoms.end(),
              [](const Atom& a, const Atom& b) { return a.x < b.x; });
    for (std::size_t i = 0; i + 1 < mu.atoms.size(); ++i)
        if (mu.atoms[i].x == mu.atoms[i + 1].x)
            throw std::invalid_argument("duplicate atom positions");
    if (mu.grid.empty() && mu.atoms.empty())
        throw std::invalid_argument("measure needs a grid or atoms");
    double lo = mu.grid.empty() ? mu.atoms.front().x : mu.grid.front();
    double hi = mu.grid.empty() ? mu.atoms.back().x : mu.grid.back();
    for (const Atom& a : mu.atoms) {
        lo = std::min(lo, a.x);
        hi = std::max(hi, a.x);
    }
    mu.lo = lo;
    mu.hi = hi;
    renormalize(mu, 1e-6);
    return mu;
}

Measure1D dilate(const Measure1D& mu, double c) {
    if (c == 0 || !std::isfinite(c)) throw std::invalid_argument("dilate needs c != 0");
    Measure1D out;
    const double ac = std::fabs(c);
    out.grid.resize(mu.grid.size());
    out.density.resize(mu.grid.size());
    const std::size_t N = mu.grid.size();
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t src = c > 0 ? i : N - 1 - i;
        out.grid[i] = c * mu.grid[src];
        out.density[i] = mu.density[src] / ac;
    }
    out.atoms = mu.atoms;
    for (Atom& a : out.atoms) a.x *= c;
    std::sort(out.atoms.begin(), out.atoms.end(),
              [](const Atom& a, const Atom& b) { return a.x < b.x; });
    out.lo = c > 0 ? c * mu.lo : c * mu.hi;
    out.hi = c > 0 ? c * mu.hi : c * mu.lo;
    out.family = mu.family;
    out.aff_scale = mu.aff_scale * c;
    out.aff_shift = mu.aff_shift * c;
    out.fam_param = mu.fam_param;
    return out;
}

Measure1D translate(const Measure1D& mu, double c) {
    if (!std::isfinite(c)) throw std::invalid_argument("translate needs finite c");
    Measure1D out = mu;
    for (double& x : out.grid) x += c;
    for (Atom& a : out.atoms) a.x += c;
    out.lo += c;
    out.hi += c;
    out.aff_shift += c;
    return out;
}

Measure1D center(const Measure1D& mu) { return translate(mu, -mu.mean()); }

double l1_distance(const Measure1D& mu, const Measure1D& nu) {
    std::vector<double> xs;
    xs.reserve(mu.grid.size() + nu.grid.size());
    xs.insert(xs.end(), mu.grid.begin(), mu.grid.end());
    xs.insert(xs.end(), nu.grid.begin(), nu.grid.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double s = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double a = std::fabs(mu.density_at(xs[i]) - nu.density_at(xs[i]));
        const double b = std::fabs(mu.density_at(xs[i + 1]) - nu.density_at(xs[i + 1]));
        s += 0.5 * (xs[i + 1] - xs[i]) * (a + b);
    }
    // atom mismatch: match positions within 1e-12
    std::size_t i = 0, j = 0;
    while (i < mu.atoms.size() || j < nu.atoms.size()) {
        if (i < mu.atoms.size() && j < nu.atoms.size() &&
            std::fabs(mu.atoms[i].x - nu.atoms[j].x) <= 1e-12) {
            s += std::fabs(mu.atoms[i].mass - nu.atoms[j].mass);
            ++i;
            ++j;
        } else if (j >= nu.atoms.size() ||
                   (i < mu.atoms.size() && mu.atoms[i].x < nu.atoms[j].x)) {
            s += mu.atoms[i++].mass;
        } else {
            s += nu.atoms[j++].mass;
        }
    }
    return s;
}

}  // namespace freeprob::measure
