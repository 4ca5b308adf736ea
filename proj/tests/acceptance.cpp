// Acceptance harness: nine end-to-end checks against closed-form targets,
// one pass/fail line each.  Exit code is the number of failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "freeprob/entropy.hpp"
#include "freeprob/fockq.hpp"
#include "freeprob/freeconv.hpp"
#include "freeprob/ineq.hpp"
#include "freeprob/measure.hpp"
#include "freeprob/ncpoly.hpp"
#include "freeprob/stein.hpp"
#include "freeprob/transforms.hpp"

using namespace freeprob;
using measure::Measure1D;

namespace {

struct Outcome {
    bool ok = true;
    std::string summary;
    std::vector<std::string> notes;
};

double now_seconds() {
    using clk = std::chrono::steady_clock;
    static const clk::time_point t0 = clk::now();
    return std::chrono::duration<double>(clk::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

std::vector<std::vector<int>> all_words(int n, int len) {
    std::vector<std::vector<int>> out;
    std::vector<int> w(len, 0);
    while (true) {
        out.push_back(w);
        int i = len - 1;
        while (i >= 0 && ++w[i] == n) w[i--] = 0;
        if (i < 0) break;
    }
    return out;
}

// ---- criterion 1: entropy constants of the standard semicircle ----

Outcome c1_entropy_constants() {
    Outcome o;
    const auto sc = measure::semicircle(0, 1);
    const double chi = entropy::free_entropy(sc);
    const double le = entropy::log_energy(sc);
    const double chi_target = 0.5 * std::log(2 * M_PI) + 0.5;  // log(2 pi e)/2
    const double e_chi = std::fabs(chi - chi_target);
    const double e_le = std::fabs(le + 0.25);
    o.ok = e_chi <= 1e-3 && e_le <= 1e-3;
    o.summary = fmt("entropy constants: chi=%.9f (err %.1e), log_energy=%.9f (err %.1e)",
                    chi, e_chi, le, e_le);
    return o;
}

// ---- criterion 2: Gibbs states saturate the log-Sobolev inequality ----

Outcome c2_gibbs_saturation() {
    Outcome o;
    double worst_fr = 0, worst_slack = 0;
    for (double rho : {0.5, 1.0, 2.0}) {
        const auto mu = measure::semicircle(0, 1.0 / rho);
        worst_fr = std::max(worst_fr, std::fabs(entropy::relative_fisher(mu, rho)));
        worst_slack = std::max(worst_slack, std::fabs(ineq::lsi_check(mu, rho).slack));
    }
    o.ok = worst_fr <= 1e-5 && worst_slack <= 1e-4;
    o.summary = fmt("gibbs saturation: worst relative_fisher %.1e, worst lsi slack %.1e",
                    worst_fr, worst_slack);
    return o;
}

// ---- criterion 3: scaled-semicircle closed-form suite ----

Outcome c3_scaled_semicircle_suite() {
    Outcome o;
    double worst_fr = 0, worst_gap = 0, worst_disc_rel = 0, worst_deficit = 0;
    for (double v : {0.5, 0.8, 1.25, 2.0}) {
        const auto mu = measure::semicircle(0, v);
        const double fr = entropy::relative_fisher(mu, 1.0);
        const double gap = entropy::gibbs_entropy_gap(mu, 1.0);
        const double disc = stein::discrepancy(mu, 8);
        worst_fr = std::max(worst_fr, std::fabs(fr - (1 - v) * (1 - v) / v));
        worst_gap = std::max(worst_gap, std::fabs(gap - 0.5 * (v - 1 - std::log(v))));
        worst_disc_rel =
            std::max(worst_disc_rel, std::fabs(disc - std::fabs(v - 1)) / std::fabs(v - 1));
        worst_deficit = std::max(worst_deficit, std::fabs(ineq::deficit_check(mu, 1.0).slack));
    }
    const auto h = ineq::hsi_check(measure::semicircle(0, 2), 1.0, 8);
    const double e_lhs = std::fabs(h.lhs - 0.15343);
    const double e_rhs = std::fabs(h.rhs - 0.20273);
    o.ok = worst_fr <= 1e-4 && worst_gap <= 1e-3 && worst_disc_rel <= 0.02 &&
           worst_deficit < 1e-3 && h.holds && e_lhs <= 1e-3 && e_rhs <= 1e-3;
    o.summary = fmt("scaled semicircles: fisher err %.1e, gap err %.1e, disc rel err %.1e, "
                    "deficit slack %.1e, hsi %.5f <= %.5f",
                    worst_fr, worst_gap, worst_disc_rel, worst_deficit, h.lhs, h.rhs);
    return o;
}

// ---- criterion 4: flow lemmas across four test laws ----

Outcome c4_flow_lemmas() {
    Outcome o;
    const std::vector<double> ts{0.1, 0.25, 0.5, 1.0, 2.0};
    const std::vector<std::pair<std::string, Measure1D>> laws = {
        {"semicircle(0,2)", measure::semicircle(0, 2)},
        {"bernoulli", measure::symmetric_bernoulli()},
        {"uniform", measure::uniform_sym(std::sqrt(3.0))},
        {"mp(0.5)", measure::marchenko_pastur_centered(0.5)},
    };
    double worst_db_rel = 0, worst_db_abs = 0;
    double worst_decay_slack = 0;  // most negative
    int bad = 0;
    for (const auto& [name, mu] : laws) {
        const auto rows = ineq::flow_checks(mu, 1.0, ts, 8);
        for (const auto& r : rows) {
            if (r.name == "de_bruijn") {
                worst_db_abs = std::max(worst_db_abs, std::fabs(r.slack));
                if (std::fabs(r.rhs) >= 0.01)  // relative residual meaningful
                    worst_db_rel = std::max(worst_db_rel,
                                            std::fabs(r.slack) / std::fabs(r.rhs));
                if (!r.holds) ++bad;  // tol = max(2% of |rhs|, 1e-3)
            } else {
                worst_decay_slack = std::min(worst_decay_slack, r.slack);
                if (r.slack < -1e-4) ++bad;
                if (r.name == "stein_decay" &&
                    std::find(r.flags.begin(), r.flags.end(), "conservative") ==
                        r.flags.end())
                    ++bad;
            }
        }
    }
    o.ok = bad == 0 && worst_db_rel < 0.02;
    o.summary = fmt("flow lemmas (4 laws x 5 times): de_bruijn resid %.1e abs / "
                    "%.2e rel, decay worst slack %.1e, violations %d",
                    worst_db_abs, worst_db_rel, worst_decay_slack, bad);
    return o;
}

// ---- criterion 5: two-coin convolution against the arcsine law ----

Outcome c5_convolution_oracle() {
    Outcome o;
    const auto bern = measure::symmetric_bernoulli();
    const auto arc = measure::arcsine(2.0);
    double sup = 0;
    for (int i = 0; i <= 80; ++i) {
        const std::complex<double> z(-8.0 + 0.2 * i, 1.0);
        sup = std::max(sup, std::abs(freeconv::free_add_cauchy(bern, bern, z) -
                                     transforms::cauchy(arc, z)));
    }
    const double l1 = measure::l1_distance(freeconv::free_add(bern, bern), arc);
    o.ok = sup < 1e-6 && l1 < 5e-3;
    o.summary = fmt("bernoulli+bernoulli vs arcsine: cauchy sup err %.1e, L1 err %.1e",
                    sup, l1);
    return o;
}

// ---- criterion 6: CLT entropy-gap rate for Bernoulli summands ----

Outcome c6_clt_rate() {
    Outcome o;
    const auto rep =
        ineq::clt_harness(measure::symmetric_bernoulli(), {2, 4, 8, 16, 32, 64});
    const double gap2_target = 0.5 * std::log(2.0) - 0.25;  // arcsine limit
    double max_ratio = 0, gap2_err = 0;
    for (const auto& r : rep.rows) {
        max_ratio = std::max(max_ratio, r.ratio);
        if (r.N == 2) gap2_err = std::fabs(r.entropy_gap - gap2_target);
        o.notes.push_back(fmt("N=%2d  gap %.6f  bound %.6f  ratio %.3f", r.N,
                              r.entropy_gap, r.bound, r.ratio));
    }
    o.ok = max_ratio <= 5.0 && gap2_err <= 1e-3;
    o.summary = fmt("clt rate: max gap/bound ratio %.3f, N=2 gap err %.1e",
                    max_ratio, gap2_err);
    return o;
}

// ---- criterion 7: q-Fock suite ----

Outcome c7_fock_suite() {
    Outcome o;
    const std::vector<double> qs{-0.5, -0.1, 0.1, 0.3};

    // sparse evaluator vs pair-partition oracle, all words of length <= 10
    double worst_word = 0;
    for (int n : {1, 2, 3})
        for (double q : qs)
            for (int len = 1; len <= 10; ++len)
                for (const auto& w : all_words(n, len))
                    worst_word = std::max(
                        worst_word, std::fabs(fockq::vacuum_moment_direct(n, q, w) -
                                              fockq::q_moment_oracle(n, q, w)));

    // dense cores: cross-check the matrix realization, the fourth moment,
    // and the Stein identity up to degree D-1
    double worst_dense = 0, worst_x4 = 0, worst_stein = 0;
    const std::vector<std::pair<int, int>> cores{{1, 8}, {2, 6}, {3, 5}};
    for (const auto& [n, D] : cores) {
        for (double q : qs) {
            const auto f = fockq::build_fock(n, q, D);
            for (int len = 1; len <= D; ++len)
                for (const auto& w : all_words(n, len))
                    worst_dense = std::max(
                        worst_dense, std::fabs(fockq::vacuum_moment(f, w) -
                                               fockq::vacuum_moment_direct(n, q, w)));
            worst_x4 = std::max(
                worst_x4,
                std::fabs(fockq::vacuum_moment(f, std::vector<int>(4, 0)) - (2 + q)));
            std::vector<fockq::HSKernelOp> A(std::size_t(n), fockq::xi_q(f));
            for (int len = 0; len <= D - 1; ++len)
                for (const auto& w : all_words(n, len))
                    for (int j = 0; j < n; ++j)
                        worst_stein = std::max(
                            worst_stein,
                            fockq::stein_identity_residual(
                                f, A, ncpoly::NCPoly::monomial(w, 1.0), j));
        }
    }

    // truncated Hilbert-Schmidt distance vs the geometric closed form.  The
    // truncation tail is (q^2 n)^{D+1}/(1-q^2 n); configs whose tail cannot
    // reach 1e-5 at any depth inside the build guards are reported instead
    // of silently passing at a looser tolerance.
    double worst_trunc = 0;
    const int eval_depth[4] = {0, 12, 10, 5};
    for (int n : {1, 2, 3}) {
        const int D = eval_depth[n];
        for (double q : qs) {
            const double x = q * q * n;
            const double tail = std::pow(x, D + 1) / (1 - x);
            const auto k = fockq::xi_q(fockq::build_fock(n, q, D));
            const double err = std::fabs(k.hs_dist2_truncated - k.hs_dist2_closed);
            if (tail <= 1e-5) {
                worst_trunc = std::max(worst_trunc, err);
            } else {
                const int need =
                    int(std::ceil(std::log(1e-5 * (1 - x)) / std::log(x))) - 1;
                o.notes.push_back(
                    fmt("note: n=%d q=%+.1f truncation gap %.1e at depth %d; "
                        "1e-5 needs depth %d, past the %d-word width guard",
                        n, q, err, D, need, 4096));
            }
        }
    }
    o.notes.push_back(
        fmt("truncation check: worst |trunc-closed| over reachable configs %.1e",
            worst_trunc));

    // closed-form discrepancy bounds for the two worked kernels
    const auto f2 = fockq::build_fock(2, 0.3, 6);
    const double b1 = fockq::discrepancy_bound(f2);
    const double b1_target = 0.6 / std::sqrt(1 - 0.18);
    const auto fm = fockq::build_mixed(Eigen::MatrixXd::Constant(2, 2, 0.3), 6);
    const double b2 = fockq::discrepancy_bound(fm);

    o.ok = worst_word <= 1e-12 && worst_dense <= 1e-12 && worst_x4 <= 1e-12 &&
           worst_stein <= 1e-10 && worst_trunc <= 1e-5 &&
           std::fabs(b1 - b1_target) <= 1e-9 && std::fabs(b2 - b1_target) <= 1e-9;
    o.summary = fmt("fock suite: word battery err %.1e, dense cross-check %.1e, "
                    "x^4 err %.1e, stein resid %.1e, bounds %.10f / %.10f",
                    worst_word, worst_dense, worst_x4, worst_stein, b1, b2);
    return o;
}

// ---- criterion 8: tangent-line convexity on random matrix tuples ----

Outcome c8_tangent_convexity() {
    Outcome o;
    using ncpoly::NCPoly;
    const auto t0 = NCPoly::generator(0);
    const auto t1 = NCPoly::generator(1);
    const auto v1 = 0.5 * (t0 * t0 + t1 * t1);
    const auto quart = t0 * t0 * t0 * t0 + t1 * t1 * t1 * t1;
    const std::vector<NCPoly> fs{v1, quart, v1 + 0.5 * quart};

    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    const int dim = 4;
    const auto draw = [&] {
        ncpoly::MatrixTuple t;
        for (int j = 0; j < 2; ++j) {
            ncpoly::Mat m(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c)
                    m(r, c) = std::complex<double>(g(rng), g(rng));
            t.X.push_back((m + m.adjoint().eval()) / (2 * std::sqrt(2.0 * dim)));
        }
        return t;
    };

    double min_margin = 1e300;
    int bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto A = draw();
        const auto B = draw();
        for (const auto& f : fs) {
            const auto r = ncpoly::tangent_inequality_check(f, A, B);
            min_margin = std::min(min_margin, r.gap);
            if (!r.holds || r.gap < -1e-10) ++bad;
        }
    }
    o.ok = bad == 0;
    o.summary = fmt("tangent convexity (seed 1, 200 pairs, f in {V1, sum t^4, "
                    "V1+0.5 sum t^4}): min margin %.1e, violations %d",
                    min_margin, bad);
    return o;
}

// ---- criterion 9: property suites at seeds 1..5 ----

ncpoly::NCPoly random_poly(std::mt19937_64& rng, int n, int max_deg, int n_terms) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> len(0, max_deg);
    std::uniform_int_distribution<int> gen(0, n - 1);
    ncpoly::NCPoly p;
    for (int t = 0; t < n_terms; ++t) {
        ncpoly::Word w(std::size_t(len(rng)));
        for (int& l : w) l = gen(rng);
        p += ncpoly::NCPoly::monomial(w, coeff(rng));
    }
    return p;
}

Outcome c9_property_suites() {
    Outcome o;
    int fail_leibniz = 0, fail_rnorm = 0, fail_herglotz = 0, fail_semi = 0,
        fail_mono = 0;

    for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
        std::mt19937_64 rng(seed);

        // Leibniz rule for the difference quotient, op-product convention
        for (int trial = 0; trial < 10; ++trial) {
            const auto p = random_poly(rng, 2, 3, 4);
            const auto q = random_poly(rng, 2, 3, 4);
            for (int j = 0; j < 2; ++j) {
                const auto lhs = ncpoly::difference_quotient(p * q, j);
                const auto rhs =
                    ncpoly::NCPolyTensor::right(q) * ncpoly::difference_quotient(p, j) +
                    ncpoly::NCPolyTensor::left(p) * ncpoly::difference_quotient(q, j);
                if (!(lhs - rhs).prune(1e-12).empty()) ++fail_leibniz;
            }
        }

        // R-norm submultiplicativity
        for (int trial = 0; trial < 20; ++trial) {
            const auto p = random_poly(rng, 2, 3, 5);
            const auto q = random_poly(rng, 2, 3, 5);
            for (double R : {0.5, 1.0, 2.0})
                if (!((p * q).r_norm(R) <= p.r_norm(R) * q.r_norm(R) + 1e-12))
                    ++fail_rnorm;
        }

        // Herglotz property: the Cauchy transform maps C+ into C-
        const std::vector<Measure1D> testers = {
            measure::semicircle(0, 1), measure::uniform_sym(std::sqrt(3.0)),
            measure::arcsine(1.5), measure::marchenko_pastur_centered(0.5),
            measure::symmetric_bernoulli()};
        std::uniform_real_distribution<double> re(-5.0, 5.0), im(0.05, 5.0);
        for (int trial = 0; trial < 40; ++trial) {
            const std::complex<double> z(re(rng), im(rng));
            for (const auto& mu : testers)
                if (!(transforms::cauchy(mu, z).imag() < 0)) ++fail_herglotz;
        }

        // subordination semigroup of the semicircular flow
        std::uniform_real_distribution<double> tdist(0.1, 0.8);
        const double t1 = tdist(rng), t2 = tdist(rng);
        for (const auto& mu :
             {measure::uniform_sym(std::sqrt(3.0)), measure::symmetric_bernoulli()}) {
            const auto once = freeconv::semicircular_flow(mu, t1 + t2);
            const auto twice =
                freeconv::semicircular_flow(freeconv::semicircular_flow(mu, t1), t2);
            if (!(measure::l1_distance(once, twice) <= 1e-3)) ++fail_semi;
        }

        // discrepancy lower bounds grow with the polynomial degree
        std::uniform_real_distribution<double> vdist(0.5, 2.0), cdist(1.0, 2.0),
            ldist(0.3, 0.7);
        const std::vector<Measure1D> monos = {
            measure::semicircle(0, vdist(rng)), measure::uniform_sym(cdist(rng)),
            measure::marchenko_pastur_centered(ldist(rng))};
        for (const auto& mu : monos) {
            double prev = -1;
            for (int d : {2, 4, 6, 8}) {
                const double s = stein::discrepancy(mu, d);
                if (s < prev - 1e-9) ++fail_mono;
                prev = s;
            }
        }
    }

    const int total = fail_leibniz + fail_rnorm + fail_herglotz + fail_semi + fail_mono;
    o.ok = total == 0;
    o.summary = fmt("property suites (seeds 1..5): leibniz %d, r-norm %d, herglotz %d, "
                    "semigroup %d, monotonicity %d failures",
                    fail_leibniz, fail_rnorm, fail_herglotz, fail_semi, fail_mono);
    return o;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        double budget;
        Outcome (*run)();
    };
    const std::vector<Entry> entries = {
        {1, 5, c1_entropy_constants},   {2, 10, c2_gibbs_saturation},
        {3, 60, c3_scaled_semicircle_suite}, {4, 300, c4_flow_lemmas},
        {5, 30, c5_convolution_oracle}, {6, 300, c6_clt_rate},
        {7, 120, c7_fock_suite},        {8, 10, c8_tangent_convexity},
        {9, 0, c9_property_suites},
    };

    int failures = 0;
    for (const auto& e : entries) {
        const double start = now_seconds();
        Outcome o;
        try {
            o = e.run();
        } catch (const std::exception& ex) {
            o.ok = false;
            o.summary = std::string("exception: ") + ex.what();
        }
        const double secs = now_seconds() - start;
        const bool in_budget = e.budget <= 0 || secs < e.budget;
        const bool pass = o.ok && in_budget;
        if (!pass) ++failures;
        if (e.budget > 0)
            std::printf("[%s] %d. %s  (%.1fs / %gs)\n", pass ? "PASS" : "FAIL",
                        e.id, o.summary.c_str(), secs, e.budget);
        else
            std::printf("[%s] %d. %s  (%.1fs)\n", pass ? "PASS" : "FAIL", e.id,
                        o.summary.c_str(), secs);
        for (const auto& n : o.notes) std::printf("        %s\n", n.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", entries.size(), failures);
    return failures;
}
