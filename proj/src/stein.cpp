#include "freeprob/stein.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace freeprob::stein {

namespace {

// moments M_0 .. M_top of mu
std::vector<double> moments_up_to(const Measure1D& mu, int top) {
    std::vector<double> M(top + 1);
    for (int k = 0; k <= top; ++k) {
        M[k] = mu.moment(k);
        if (!std::isfinite(M[k]))
            throw std::invalid_argument("estimate_kernel: nonfinite moment");
    }
    return M;
}

}  // namespace

double dq_eval(const std::vector<double>& p, double x, double y) {
    const double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
    if (std::fabs(x - y) >= 1e-8 * scale) {
        double px = 0, py = 0;
        for (std::size_t k = p.size(); k-- > 0;) {
            px = px * x + p[k];
            py = py * y + p[k];
        }
        return (px - py) / (x - y);
    }
    // sum_k p_k sum_{i+j=k-1} x^i y^j, stable through coincident points
    double out = 0;
    double xi = 1;  // x^i
    for (std::size_t i = 0; i < p.size(); ++i) {
        // inner: sum over k >= i+1 of p_k y^{k-1-i}
        double inner = 0;
        for (std::size_t k = p.size(); k-- > i + 1;) inner = inner * y + p[k];
        out += xi * inner;
        xi *= x;
    }
    return out;
}

double kernel_value(const SteinKernel1D& k, double x, double y) {
    const int n = k.degree + 1;
    double out = 0;
    double xi = 1;
    for (int i = 0; i < n; ++i) {
        double row = 0;
        for (int j = n; j-- > 0;) row = row * y + k.coeffs[i * n + j];
        out += xi * row;
        xi *= x;
    }
    return out;
}

SteinKernel1D estimate_kernel(const Measure1D& mu, int degree, double ridge,
                              double rho) {
    if (degree < 1)
        throw std::invalid_argument("estimate_kernel: degree must be >= 1");
    if (!(rho > 0))
        throw std::invalid_argument("estimate_kernel: rho must be positive");
    if (std::fabs(mu.mean()) > 1e-9)
        throw std::invalid_argument("estimate_kernel: measure must be centered");

    const int d = degree;
    const int n = d + 1;
    const std::vector<double> M = moments_up_to(mu, 2 * d + 2);

    // Work with A = 1 + B.  The least-norm B under the linear constraints
    // lies in the span of the constraint representers
    //   S_k(x,y) = sum_{i+j=k} x^i y^j,  k = 0..d,
    // so the problem reduces to the (d+1)-square system G a = r with
    //   G_km = <S_k, S_m>,  r_m = rho M_{m+2} - <1, S_m>.
    // The S_k are scaled by s^{-k} to tame the power-basis conditioning.
    const double s = std::max({1.0, std::fabs(mu.lo), std::fabs(mu.hi)});
    std::vector<double> spow(2 * d + 1, 1.0);
    for (int k = 1; k <= 2 * d; ++k) spow[k] = spow[k - 1] * s;

    Eigen::MatrixXd G(n, n);
    for (int k = 0; k < n; ++k) {
        for (int m = k; m < n; ++m) {
            double sum = 0;
            for (int i = 0; i <= k; ++i)
                for (int p = 0; p <= m; ++p)
                    sum += M[i + p] * M[(k - i) + (m - p)];
            G(k, m) = G(m, k) = sum / spow[k + m];
        }
    }
    Eigen::VectorXd r(n);
    for (int m = 0; m < n; ++m) {
        double ones = 0;
        for (int i = 0; i <= m; ++i) ones += M[i] * M[m - i];
        r(m) = (rho * M[m + 2] - ones) / spow[m];
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double lmax = ev(n - 1);
    if (!(lmax > 0))
        throw std::runtime_error(
            "estimate_kernel: degenerate constraint Gram at degree " +
            std::to_string(d));
    const double lmin = std::max(ev(0), 0.0);
    const double cond =
        lmin > 0 ? lmax / lmin : std::numeric_limits<double>::infinity();

    SteinKernel1D out;
    out.degree = d;
    out.gram_cond = cond;

    Eigen::VectorXd a;
    if (cond <= 1e12) {
        a = es.eigenvectors() *
            (es.eigenvectors().transpose() * r).cwiseQuotient(ev);
    } else {
        // coefficient-norm ridge: ||B||_coeff^2 = sum_k a_k^2 (k+1) s^{-2k}
        Eigen::MatrixXd Gr = G;
        for (int k = 0; k < n; ++k)
            Gr(k, k) += ridge * (k + 1) / (spow[k] * spow[k]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esr(Gr);
        const Eigen::VectorXd& evr = esr.eigenvalues();
        if (!(evr(0) > 0) || evr(n - 1) / evr(0) > 1e12)
            throw std::runtime_error(
                "estimate_kernel: constraint Gram singular beyond ridge "
                "rescue at degree " +
                std::to_string(d));
        out.ridge_used = true;
        a = esr.eigenvectors() *
            (esr.eigenvectors().transpose() * r).cwiseQuotient(evr);
    }

    // ||B||^2 against the unridged Gram is exact for the returned kernel
    out.discrepancy_lb = std::sqrt(std::max(0.0, a.dot(G * a)));

    const Eigen::VectorXd res = G * a - r;
    out.residuals.resize(n);
    for (int m = 0; m < n; ++m) out.residuals[m] = std::fabs(res(m)) * spow[m];

    out.coeffs.assign(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n && i + j <= d; ++j)
            out.coeffs[std::size_t(i) * n + j] = a(i + j) / spow[i + j];
    out.coeffs[0] += 1.0;
    return out;
}

double discrepancy(const Measure1D& mu, int degree) {
    return estimate_kernel(mu, degree).discrepancy_lb;
}

}  // namespace freeprob::stein
