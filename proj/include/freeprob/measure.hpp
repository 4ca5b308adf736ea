#pragma once

#include <string>
#include <vector>

namespace freeprob::measure {

struct Atom {
    double x = 0;
    double mass = 0;
};

// Closed-form Cauchy-transform families.  A tagged measure is an affine image
// scale*Y + shift of the standard base law; `none` means grid-only data.
enum class Family { none, semicircle, uniform, arcsine, marchenko_pastur };

// Compactly supported probability measure on the line: an absolutely
// continuous part sampled on a strictly increasing grid (integrated by the
// trapezoid rule on the sampled integrand) plus finitely many atoms.
struct Measure1D {
    double lo = 0, hi = 0;             // support hull
    std::vector<double> grid;          // strictly increasing, inside [lo, hi]
    std::vector<double> density;       // nonnegative, same length as grid
    std::vector<Atom> atoms;           // sorted by position, positive masses

    Family family = Family::none;
    double aff_scale = 1, aff_shift = 0;
    double fam_param = 0;              // marchenko_pastur shape

    bool has_atoms() const { return !atoms.empty(); }
    double max_atom_mass() const;

    // trapezoid integral of node_vals[i] * density[i] (a.c. part only)
    double integral_ac(const std::vector<double>& node_vals) const;
    double mass() const;
    double moment(int k) const;
    double mean() const { return moment(1); }
    double variance() const;

    // linear interpolation of the density, 0 outside the grid hull
    double density_at(double x) const;
};

inline constexpr int kDefaultGridN = 4001;

// Chebyshev-clustered nodes on [a, b], endpoints exact.
std::vector<double> chebyshev_grid(double a, double b, int n);

Measure1D semicircle(double mean, double variance, int n = kDefaultGridN);
Measure1D uniform_sym(double half_width, int n = kDefaultGridN);
Measure1D arcsine(double half_width, int n = kDefaultGridN);
// centered Marchenko-Pastur with shape 0 < lambda < 1 (variance lambda)
Measure1D marchenko_pastur_centered(double lambda, int n = kDefaultGridN);
Measure1D symmetric_bernoulli();
Measure1D point_mass(double x);

// Validates invariants; renormalizes total mass to 1 if within 1e-6.
Measure1D from_grid(std::vector<double> grid, std::vector<double> density,
                    std::vector<Atom> atoms = {});

Measure1D dilate(const Measure1D& mu, double c);
Measure1D translate(const Measure1D& mu, double c);
Measure1D center(const Measure1D& mu);

// L1 distance between a.c. parts on the union grid plus atom mass mismatch.
double l1_distance(const Measure1D& mu, const Measure1D& nu);

}  // namespace freeprob::measure
