#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "freeprob/ineq.hpp"
#include "freeprob/measure.hpp"

using namespace freeprob;

namespace {
const double kSqrt3 = std::sqrt(3.0);

bool has_flag(const ineq::IneqReport& r, const char* f) {
    return std::find(r.flags.begin(), r.flags.end(), f) != r.flags.end();
}
}

TEST_CASE("log-Sobolev check on scaled semicircles has closed-form sides") {
    // gap = (v - 1 - log v)/2, fisher_rel = (1-v)^2/v, claim gap <= rel/2
    for (double v : {0.5, 0.8, 1.25, 2.0}) {
        auto r = ineq::lsi_check(measure::semicircle(0, v), 1.0);
        CHECK(r.holds);
        CHECK(r.lhs == doctest::Approx(0.5 * (v - 1 - std::log(v))).epsilon(1e-5));
        CHECK(r.rhs == doctest::Approx((1 - v) * (1 - v) / (2 * v)).epsilon(1e-4));
        CHECK(r.slack == doctest::Approx(r.rhs - r.lhs).epsilon(1e-12));
    }
    // the Gibbs state itself sits at equality within tolerance
    for (double rho : {0.5, 1.0, 2.0}) {
        auto r = ineq::lsi_check(measure::semicircle(0, 1.0 / rho), rho);
        CHECK(r.holds);
        CHECK(std::fabs(r.slack) < 1e-4);
    }
    // strict inequality for the uniform law
    auto u = ineq::lsi_check(measure::uniform_sym(kSqrt3), 1.0);
    CHECK(u.holds);
    CHECK(u.slack > 0.01);
}

TEST_CASE("HSI check sharpens the entropy bound through the discrepancy") {
    auto r = ineq::hsi_check(measure::semicircle(0, 2), 1.0, 8);
    CHECK(r.holds);
    CHECK(has_flag(r, "conservative"));
    // lhs = gap(sc_2) = (1 - log 2)/2; rhs = (s^2/2) log(1 + rel/s^2) with
    // s = 1, rel = 1/2
    CHECK(r.lhs == doctest::Approx(0.5 * (1 - std::log(2.0))).epsilon(1e-5));
    CHECK(r.rhs == doctest::Approx(0.5 * std::log(1.5)).epsilon(1e-4));
    // HSI is tighter than plain log-Sobolev here
    auto lsi = ineq::lsi_check(measure::semicircle(0, 2), 1.0);
    CHECK(r.rhs < lsi.rhs);

    auto u = ineq::hsi_check(measure::uniform_sym(kSqrt3), 1.0, 8);
    CHECK(u.holds);
}

TEST_CASE("deficit check reaches equality exactly on scaled semicircles") {
    for (double v : {0.5, 0.8, 1.25, 2.0}) {
        auto r = ineq::deficit_check(measure::semicircle(0, v), 1.0);
        CHECK(r.holds);
        CHECK(std::fabs(r.slack) < 1e-3);
    }
    auto u = ineq::deficit_check(measure::uniform_sym(kSqrt3), 1.0);
    CHECK(u.holds);
    CHECK_THROWS_AS(ineq::deficit_check(measure::symmetric_bernoulli(), 1.0),
                    std::invalid_argument);
}

TEST_CASE("free Stam inequality is equality for semicircle summands") {
    auto a = measure::semicircle(0, 1);
    auto b = measure::semicircle(0, 2);
    auto r = ineq::stam_check(a, b);
    CHECK(r.holds);
    // 1/Phi additivity: v_a + v_b = v_sum exactly
    CHECK(r.lhs == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(r.rhs == doctest::Approx(3.0).epsilon(1e-4));

    auto u = measure::uniform_sym(kSqrt3);
    auto s = ineq::stam_check(u, u);
    CHECK(s.holds);
    // strict gain for non-semicircular summands
    CHECK(s.slack > 1e-3);
    CHECK_THROWS_AS(ineq::stam_check(measure::symmetric_bernoulli(), a),
                    std::invalid_argument);
}

TEST_CASE("flow lemma battery on a scaled semicircle") {
    // flows of semicircles stay closed-form, so every check is sharp
    auto sc = measure::semicircle(0, 2);
    const std::vector<double> ts{0.1, 0.5};

    auto db = ineq::de_bruijn_check(sc, 1.0, ts);
    REQUIRE(db.size() == 2);
    for (const auto& r : db) {
        CHECK(r.holds);
        CHECK(has_flag(r, "two_sided"));
        // relative agreement of derivative and -fisher_rel within 2%
        CHECK(std::fabs(r.slack) <= r.tolerance);
    }

    auto ed = ineq::exp_decay_check(sc, 1.0, ts);
    REQUIRE(ed.size() == 2);
    // var(t) = 1 + e^{-2t}: fisher_rel(t) = (1-v)^2/v = e^{-4t}/(1+e^{-2t})
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double v = 1 + std::exp(-2 * ts[i]);
        CHECK(ed[i].holds);
        CHECK(ed[i].lhs ==
              doctest::Approx((1 - v) * (1 - v) / v).epsilon(1e-4));
        CHECK(ed[i].rhs ==
              doctest::Approx(std::exp(-2 * ts[i]) * 0.5).epsilon(1e-4));
    }

    auto sd = ineq::stein_decay_check(sc, 1.0, 8, ts);
    REQUIRE(sd.size() == 2);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(sd[i].holds);
        CHECK(has_flag(sd[i], "conservative"));
        const double e2 = std::exp(-2 * ts[i]);
        CHECK(sd[i].rhs ==
              doctest::Approx(e2 * e2 / (1 - e2)).epsilon(1e-3));
    }

    // the combined battery reports the same three families in t-major order
    auto all = ineq::flow_checks(sc, 1.0, ts, 8);
    CHECK(all.size() == 6);
}

TEST_CASE("clt harness rates the approach to the semicircle") {
    auto bern = measure::symmetric_bernoulli();
    auto rep = ineq::clt_harness(bern, {2, 4});
    REQUIRE(rep.rows.size() == 2);
    const auto& r2 = rep.rows[0];
    CHECK(r2.N == 2);
    CHECK(r2.weights_tag == "equal");
    CHECK(r2.sigma == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r2.bound == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
    // gap for the arcsine limit of two coins: log 2 / 2 - 1/4
    CHECK(r2.entropy_gap ==
          doctest::Approx(0.5 * std::log(2.0) - 0.25).epsilon(2e-3));
    CHECK(r2.ratio < 5.0);
    const auto& r4 = rep.rows[1];
    CHECK(r4.N == 4);
    CHECK(r4.sigma == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r4.entropy_gap < r2.entropy_gap);  // gap shrinks along the chain
    CHECK(r4.ratio < 5.0);

    // centering and unit variance are hard requirements
    CHECK_THROWS_AS(ineq::clt_harness(measure::semicircle(0.4, 1), {2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ineq::clt_harness(measure::semicircle(0, 2), {2}),
                    std::invalid_argument);
}

TEST_CASE("clt harness accepts one custom weight vector") {
    auto bern = measure::symmetric_bernoulli();
    auto rep = ineq::clt_harness(bern, {}, {0.6, 0.8});
    REQUIRE(rep.rows.size() == 1);
    const auto& r = rep.rows[0];
    CHECK(r.N == 2);
    CHECK(r.weights_tag == "custom");
    CHECK(r.sigma == doctest::Approx(0.5392).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(0.5392 * std::log(1 / 0.5392)).epsilon(1e-12));
    CHECK(r.entropy_gap == doctest::Approx(0.116809).epsilon(2e-3));
    // weights must square-sum to one
    CHECK_THROWS_AS(ineq::clt_harness(bern, {}, {0.6, 0.6}),
                    std::invalid_argument);
}

TEST_CASE("kernel discrepancy of a normalized sum obeys the weight bound") {
    auto bern = measure::symmetric_bernoulli();
    const double r = std::sqrt(0.5);
    auto rep = ineq::stein_kernel_of_sum(bern, {r, r}, 4);
    CHECK(rep.holds);
    CHECK(rep.tolerance == doctest::Approx(0.02));
    // rhs = sqrt(sigma) * discrepancy(bern), and disc(bernoulli) = 1
    CHECK(rep.rhs == doctest::Approx(r).epsilon(1e-5));
    // the two-coin law is the scaled arcsine, whose degree-4 bound is
    // 1/(2 sqrt 2)
    CHECK(rep.lhs == doctest::Approx(1.0 / (2 * std::sqrt(2.0))).epsilon(2e-3));
}
