#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "freeprob/fockq.hpp"
#include "freeprob/ncpoly.hpp"

using namespace freeprob;
using fockq::QFockSpace;

namespace {

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

std::vector<int> random_word(std::mt19937_64& rng, int n, int len) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> w(len);
    for (int& c : w) c = pick(rng);
    return w;
}

}  // namespace

TEST_CASE("fock construction rejects bad deformations and budgets") {
    CHECK_THROWS_AS(fockq::build_fock(2, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(fockq::build_fock(2, -1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(fockq::build_fock(2, 0.3, 1), std::invalid_argument);
    CHECK_THROWS_AS(fockq::build_fock(0, 0.3, 4), std::invalid_argument);
    // 3^13 words at the top degree blows both budgets
    CHECK_THROWS_AS(fockq::build_fock(3, 0.3, 13), std::invalid_argument);

    Eigen::MatrixXd bad(2, 2);
    bad << 0.1, 0.3, 0.4, 0.1;  // not symmetric
    CHECK_THROWS_AS(fockq::build_mixed(bad, 4), std::invalid_argument);
    Eigen::MatrixXd heavy(2, 2);
    heavy << 0.8, 0.7, 0.7, 0.8;  // row square sums exceed 1
    CHECK_THROWS_AS(fockq::build_mixed(heavy, 4), std::invalid_argument);
}

TEST_CASE("vacuum expectations of one- and two-letter words") {
    auto f = fockq::build_fock(2, 0.3, 4);
    auto om = fockq::vacuum(f);
    CHECK(fockq::fock_inner(f, om, om) == doctest::Approx(1.0).epsilon(1e-14));
    for (int j : {0, 1}) {
        CHECK(fockq::vacuum_moment(f, {j}) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(fockq::vacuum_moment(f, {j, j}) ==
              doctest::Approx(1.0).epsilon(1e-13));
    }
    // distinct letters cannot pair
    CHECK(fockq::vacuum_moment(f, {0, 1}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(fockq::vacuum_moment(f, {0, 0, 0}) ==
          doctest::Approx(0.0).epsilon(1e-14));

    // apply_word composes the generator operators in word order
    auto v1 = fockq::apply_word(f, {0, 1});
    auto v2 = fockq::apply_x(f, 0, fockq::apply_x(f, 1, om));
    for (int d = 0; d <= f.depth; ++d)
        CHECK((v1[d] - v2[d]).norm() < 1e-14);
}

TEST_CASE("moments match the pair-partition oracle on every short word") {
    for (int n : {1, 2, 3}) {
        for (double q : {-0.5, 0.3}) {
            auto f = fockq::build_fock(n, q, 6);
            double worst = 0;
            for (int len = 1; len <= 6; ++len) {
                for (const auto& w : all_words(n, len)) {
                    const double a = fockq::vacuum_moment(f, w);
                    const double b = fockq::q_moment_oracle(n, q, w);
                    worst = std::max(worst, std::fabs(a - b));
                }
            }
            CAPTURE(n);
            CAPTURE(q);
            CHECK(worst <= 1e-12);
        }
    }
}

TEST_CASE("single-letter moments follow the q-Hermite recursion values") {
    for (double q : {-0.5, 0.1, 0.3}) {
        auto f = fockq::build_fock(1, q, 8);
        CHECK(fockq::vacuum_moment(f, std::vector<int>(4, 0)) ==
              doctest::Approx(2.0 + q).epsilon(1e-13));
        CHECK(fockq::vacuum_moment(f, std::vector<int>(6, 0)) ==
              doctest::Approx(5 + 6 * q + 3 * q * q + q * q * q).epsilon(1e-12));
    }
    // q = 0 gives the Catalan numbers (free case)
    auto f0 = fockq::build_fock(1, 0.0, 12);
    const double catalan[6] = {1, 1, 2, 5, 14, 42};
    for (int k = 0; k <= 5; ++k)
        CHECK(fockq::vacuum_moment(f0, std::vector<int>(2 * k, 0)) ==
              doctest::Approx(catalan[k]).epsilon(1e-12));
}

TEST_CASE("mixed weights show up as the crossing factors") {
    Eigen::MatrixXd Q(2, 2);
    Q << 0.2, -0.4, -0.4, 0.5;
    auto f = fockq::build_mixed(Q, 4);
    CHECK(fockq::vacuum_moment(f, {0, 1, 0, 1}) ==
          doctest::Approx(-0.4).epsilon(1e-13));
    CHECK(fockq::vacuum_moment(f, {0, 0, 0, 0}) ==
          doctest::Approx(2.2).epsilon(1e-13));
    CHECK(fockq::vacuum_moment(f, {1, 1, 1, 1}) ==
          doctest::Approx(2.5).epsilon(1e-13));
    // non-crossing pairing of two distinct letters carries weight 1
    CHECK(fockq::vacuum_moment(f, {0, 0, 1, 1}) ==
          doctest::Approx(1.0).epsilon(1e-13));

    double worst = 0;
    for (int len = 2; len <= 4; len += 2)
        for (const auto& w : all_words(2, len))
            worst = std::max(worst,
                             std::fabs(fockq::vacuum_moment(f, w) -
                                       fockq::mixed_moment_oracle(Q, w)));
    CHECK(worst <= 1e-12);
}

TEST_CASE("sparse evaluator agrees with the dense core and the oracle") {
    // dense cross-check over the full short-word battery
    auto f = fockq::build_fock(2, 0.3, 6);
    double worst = 0;
    for (int len = 1; len <= 6; ++len)
        for (const auto& w : all_words(2, len))
            worst = std::max(worst,
                             std::fabs(fockq::vacuum_moment(f, w) -
                                       fockq::vacuum_moment_direct(2, 0.3, w)));
    CHECK(worst <= 1e-12);

    // lengths the dense core cannot reach, against the Wick oracle
    std::mt19937_64 rng(42);
    worst = 0;
    for (int len : {8, 10, 12}) {
        for (int trial = 0; trial < 12; ++trial) {
            const auto w = random_word(rng, 3, len);
            worst = std::max(worst,
                             std::fabs(fockq::vacuum_moment_direct(3, -0.5, w) -
                                       fockq::q_moment_oracle(3, -0.5, w)));
        }
    }
    CHECK(worst <= 1e-12);

    Eigen::MatrixXd Q(2, 2);
    Q << 0.2, -0.4, -0.4, 0.5;
    std::mt19937_64 rng2(7);
    worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = random_word(rng2, 2, 8);
        worst = std::max(worst,
                         std::fabs(fockq::vacuum_moment_direct(Q, w) -
                                   fockq::mixed_moment_oracle(Q, w)));
    }
    CHECK(worst <= 1e-12);

    // width, length, and letter-range caps
    CHECK_THROWS_AS(fockq::vacuum_moment_direct(16, 0.3, {0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fockq::vacuum_moment_direct(2, 0.3, std::vector<int>(15, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(fockq::q_moment_oracle(2, 0.3, std::vector<int>(13, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(fockq::vacuum_moment(f, std::vector<int>(7, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(fockq::vacuum_moment(f, {0, 2}), std::invalid_argument);
}

TEST_CASE("gram-conjugated annihilation equals the direct contraction") {
    auto f = fockq::build_fock(2, 0.3, 5);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> gauss;
    for (int d = 1; d <= f.depth; ++d) {
        Eigen::VectorXd v(f.dim(d));
        for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
        for (int j : {0, 1}) {
            Eigen::VectorXd a = f.ann[j][d] * v;
            Eigen::VectorXd b = fockq::annihilate_direct(f, j, d, v);
            CHECK((a - b).norm() < 1e-10);
        }
    }
    CHECK_THROWS_AS(fockq::annihilate_direct(f, 0, 0, Eigen::VectorXd::Ones(1)),
                    std::invalid_argument);
}

TEST_CASE("kernel operator distances to the unit tensor") {
    auto f1 = fockq::build_fock(1, 0.3, 8);
    auto k1 = fockq::xi_q(f1);
    CHECK(k1.hs_finite);
    CHECK(k1.hs_dist2_closed == doctest::Approx(0.09 / 0.91).epsilon(1e-12));
    CHECK(std::fabs(k1.hs_dist2_closed - k1.hs_dist2_truncated) < 1e-9);

    auto f2 = fockq::build_fock(2, 0.3, 6);
    auto k2 = fockq::xi_q(f2);
    CHECK(k2.hs_dist2_closed == doctest::Approx(0.18 / 0.82).epsilon(1e-12));
    CHECK(std::fabs(k2.hs_dist2_closed - k2.hs_dist2_truncated) < 1e-5);
    // the kernel scales each degree-d word by q^d
    CHECK((k2.diag[3].array() - 0.027).abs().maxCoeff() < 1e-14);
    CHECK(k2.diag[0].size() == 1);
    CHECK(k2.diag[0][0] == doctest::Approx(1.0));

    // q^2 n >= 1: space builds fine but the limit diverges
    auto fi = fockq::build_fock(2, 0.75, 4);
    auto ki = fockq::xi_q(fi);
    CHECK(!ki.hs_finite);
    CHECK(std::isinf(ki.hs_dist2_closed));
    CHECK(std::isinf(fockq::discrepancy_bound(fi)));
}

TEST_CASE("discrepancy bound closed form and its truncation") {
    auto f = fockq::build_fock(2, 0.3, 6);
    const double closed = 0.6 / std::sqrt(0.82);
    CHECK(fockq::discrepancy_bound(f) ==
          doctest::Approx(closed).epsilon(1e-12));
    CHECK(closed == doctest::Approx(0.6625891564).epsilon(1e-9));
    const double trunc = fockq::discrepancy_bound_truncated(f);
    CHECK(trunc < closed);
    CHECK(closed - trunc < 2e-5);

    // constant-weight matrix reproduces the constant-q bound exactly
    Eigen::MatrixXd Q = Eigen::MatrixXd::Constant(2, 2, 0.3);
    auto fm = fockq::build_mixed(Q, 6);
    CHECK(fockq::discrepancy_bound(fm) ==
          doctest::Approx(closed).epsilon(1e-12));
    for (int j : {0, 1}) {
        auto kj = fockq::xi_mixed(fm, j);
        CHECK(kj.hs_dist2_closed == doctest::Approx(0.18 / 0.82).epsilon(1e-12));
    }
}

TEST_CASE("stein identity residual vanishes on the fock kernels") {
    auto f = fockq::build_fock(2, 0.3, 6);
    std::vector<fockq::HSKernelOp> A{fockq::xi_q(f), fockq::xi_q(f)};

    double worst = 0;
    for (int len = 0; len <= 5; ++len)
        for (const auto& w : all_words(2, len))
            for (int j : {0, 1})
                worst = std::max(
                    worst, fockq::stein_identity_residual(
                               f, A, ncpoly::NCPoly::monomial(w, 1.0), j));
    CHECK(worst <= 1e-10);

    // a denser polynomial with mixed coefficients
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    auto p = ncpoly::NCPoly::zero();
    for (int len = 0; len <= 4; ++len)
        for (int t = 0; t < 3; ++t)
            p += ncpoly::NCPoly::monomial(random_word(rng, 2, len), gauss(rng));
    CHECK(fockq::stein_identity_residual(f, A, p, 0) <= 1e-10);
    CHECK(fockq::stein_identity_residual(f, A, p, 1) <= 1e-10);

    // mixed kernels carry one operator per generator
    Eigen::MatrixXd Q(2, 2);
    Q << 0.2, -0.4, -0.4, 0.5;
    auto fm = fockq::build_mixed(Q, 5);
    std::vector<fockq::HSKernelOp> Am{fockq::xi_mixed(fm, 0),
                                      fockq::xi_mixed(fm, 1)};
    worst = 0;
    for (int len = 0; len <= 4; ++len)
        for (const auto& w : all_words(2, len))
            for (int j : {0, 1})
                worst = std::max(
                    worst, fockq::stein_identity_residual(
                               fm, Am, ncpoly::NCPoly::monomial(w, 1.0), j));
    CHECK(worst <= 1e-10);

    // degree cap: the pairing needs deg(p) + 1 within the truncation
    CHECK_THROWS_AS(
        fockq::stein_identity_residual(
            f, A, ncpoly::NCPoly::monomial(std::vector<int>(6, 0), 1.0), 0),
        std::invalid_argument);
}
