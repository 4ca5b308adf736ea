#include "freeprob/fockq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace freeprob::fockq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t ipow(int n, int d) {
    std::size_t r = 1;
    while (d-- > 0) r *= std::size_t(n);
    return r;
}

// letters of a degree-d basis index, first letter most significant
void decode(std::size_t idx, int n, int d, std::vector<int>& out) {
    out.resize(d);
    for (int k = d - 1; k >= 0; --k) {
        out[k] = int(idx % n);
        idx /= n;
    }
}

double real_coeff(const ncpoly::Coeff& c, const char* who) {
    if (std::fabs(c.imag()) > 1e-12 * (1.0 + std::abs(c)))
        throw std::invalid_argument(std::string(who) +
                                    ": polynomial must have real coefficients");
    return c.real();
}

// Gram by summing permutations: G[v,w] += prod over inversions of Q weights.
Eigen::MatrixXd gram_direct(int n, const Eigen::MatrixXd& Q, int d) {
    const std::size_t N = ipow(n, d);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> w(d), v(d);
    do {
        for (std::size_t iw = 0; iw < N; ++iw) {
            decode(iw, n, d, w);
            double weight = 1;
            for (int k = 0; k < d && weight != 0; ++k)
                for (int l = k + 1; l < d; ++l)
                    if (perm[k] > perm[l]) weight *= Q(w[k], w[l]);
            if (weight == 0) continue;
            for (int k = 0; k < d; ++k) v[perm[k]] = w[k];
            std::size_t iv = 0;
            for (int k = 0; k < d; ++k) iv = iv * n + v[k];
            G(iv, iw) += weight;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return G;
}

// G_d = (I (x) G_{d-1}) R_d with R_d e_s = sum_k (prod_{l<k} Q(s_k,s_l))
// e_{s_k} (x) e_{s minus k}: the insertion recursion.
Eigen::MatrixXd gram_recursive(int n, const Eigen::MatrixXd& Q, int d,
                               const Eigen::MatrixXd& Gprev) {
    const std::size_t N = ipow(n, d);
    const std::size_t M = N / std::size_t(n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
    std::vector<int> s(d);
    for (std::size_t is = 0; is < N; ++is) {
        decode(is, n, d, s);
        for (int k = 0; k < d; ++k) {
            double wgt = 1;
            for (int l = 0; l < k && wgt != 0; ++l) wgt *= Q(s[k], s[l]);
            if (wgt == 0) continue;
            std::size_t iu = 0;
            for (int l = 0; l < d; ++l)
                if (l != k) iu = iu * n + s[l];
            G.col(is).segment(std::size_t(s[k]) * M, M) += wgt * Gprev.col(iu);
        }
    }
    return G;
}

QFockSpace build_core(int n, const Eigen::MatrixXd& Q, int depth, bool mixed,
                      double qconst) {
    if (n < 1) throw std::invalid_argument("fock: need at least one generator");
    if (depth < 2) throw std::invalid_argument("fock: depth must be >= 2");
    double total = 0;
    for (int d = 0; d <= depth; ++d) total += double(ipow(n, d));
    if (total > 2e6)
        throw std::invalid_argument("fock: basis budget exceeded (> 2e6 words)");
    if (double(ipow(n, depth)) > 4096)
        throw std::invalid_argument(
            "fock: top degree wider than 4096 words; lower the depth");

    QFockSpace f;
    f.n = n;
    f.depth = depth;
    f.mixed = mixed;
    f.q = qconst;
    f.Q = Q;

    f.gram.resize(depth + 1);
    f.gram_llt.resize(depth + 1);
    f.gram[0] = Eigen::MatrixXd::Ones(1, 1);
    for (int d = 1; d <= depth; ++d)
        f.gram[d] = d <= 6 ? gram_direct(n, Q, d)
                           : gram_recursive(n, Q, d, f.gram[d - 1]);
    for (int d = 0; d <= depth; ++d) {
        f.gram_llt[d].compute(f.gram[d]);
        if (f.gram_llt[d].info() != Eigen::Success)
            throw std::runtime_error(
                "fock: Gram factorization failure at degree " +
                std::to_string(d) + " (weights too close to 1)");
    }

    f.ann.assign(n, std::vector<Eigen::MatrixXd>(depth + 1));
    for (int j = 0; j < n; ++j)
        for (int d = 1; d <= depth; ++d) {
            const std::size_t M = ipow(n, d - 1);
            // (creation^T G_d) is the j-th row block of G_d
            f.ann[j][d] = f.gram_llt[d - 1].solve(
                f.gram[d].middleRows(std::size_t(j) * M, M));
        }
    return f;
}

}  // namespace

std::size_t QFockSpace::dim(int d) const { return ipow(n, d); }

QFockSpace build_fock(int n, double q, int depth) {
    if (!(std::fabs(q) < 1))
        throw std::invalid_argument("build_fock: need |q| < 1");
    return build_core(n, Eigen::MatrixXd::Constant(n, n, q), depth, false, q);
}

QFockSpace build_mixed(const Eigen::MatrixXd& Q, int depth) {
    const int n = int(Q.rows());
    if (Q.cols() != n) throw std::invalid_argument("build_mixed: Q not square");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (std::fabs(Q(i, j) - Q(j, i)) > 1e-12)
                throw std::invalid_argument("build_mixed: Q must be symmetric");
            if (!(std::fabs(Q(i, j)) < 1))
                throw std::invalid_argument(
                    "build_mixed: entries must lie in (-1, 1)");
        }
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += Q(j, i) * Q(j, i);
        if (!(s < 1))
            throw std::invalid_argument(
                "build_mixed: row square sum Q_j(2) must be < 1");
    }
    return build_core(n, Q, depth, true, 0.0);
}

FockVec vacuum(const QFockSpace& f) {
    FockVec v(f.depth + 1);
    for (int d = 0; d <= f.depth; ++d)
        v[d] = Eigen::VectorXd::Zero(f.dim(d));
    v[0](0) = 1;
    return v;
}

double fock_inner(const QFockSpace& f, const FockVec& u, const FockVec& v) {
    double s = 0;
    for (int d = 0; d <= f.depth; ++d) s += u[d].dot(f.gram[d] * v[d]);
    return s;
}

FockVec apply_x(const QFockSpace& f, int j, const FockVec& v) {
    if (j < 0 || j >= f.n) throw std::invalid_argument("apply_x: bad generator");
    FockVec out(f.depth + 1);
    for (int d = 0; d <= f.depth; ++d) {
        out[d] = Eigen::VectorXd::Zero(f.dim(d));
        if (d > 0) {
            const std::size_t M = f.dim(d - 1);
            out[d].segment(std::size_t(j) * M, M) += v[d - 1];
        }
        if (d < f.depth) out[d] += f.ann[j][d + 1] * v[d + 1];
    }
    return out;
}

FockVec apply_word(const QFockSpace& f, const std::vector<int>& word) {
    FockVec v = vacuum(f);
    for (std::size_t i = word.size(); i-- > 0;) v = apply_x(f, word[i], v);
    return v;
}

FockVec apply_poly(const QFockSpace& f, const ncpoly::NCPoly& p) {
    FockVec out = vacuum(f);
    for (auto& blk : out) blk.setZero();
    for (const auto& [w, c] : p.terms()) {
        if (int(w.size()) > f.depth)
            throw std::invalid_argument(
                "apply_poly: monomial degree exceeds the space depth");
        const double cr = real_coeff(c, "apply_poly");
        const FockVec v = apply_word(f, w);
        for (int d = 0; d <= f.depth; ++d) out[d] += cr * v[d];
    }
    return out;
}

Eigen::VectorXd annihilate_direct(const QFockSpace& f, int j, int d,
                                  const Eigen::VectorXd& v) {
    if (d < 1 || d > f.depth)
        throw std::invalid_argument("annihilate_direct: bad degree");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.dim(d - 1));
    std::vector<int> s(d);
    for (std::size_t is = 0; is < f.dim(d); ++is) {
        if (v(is) == 0) continue;
        decode(is, f.n, d, s);
        for (int k = 0; k < d; ++k) {
            if (s[k] != j) continue;
            double wgt = 1;
            for (int l = 0; l < k; ++l) wgt *= f.Q(j, s[l]);
            std::size_t iu = 0;
            for (int l = 0; l < d; ++l)
                if (l != k) iu = iu * f.n + s[l];
            out(iu) += wgt * v(is);
        }
    }
    return out;
}

double vacuum_moment(const QFockSpace& f, const std::vector<int>& word) {
    if (int(word.size()) > f.depth)
        throw std::invalid_argument(
            "vacuum_moment: word longer than the depth would truncate");
    for (int l : word)
        if (l < 0 || l >= f.n)
            throw std::invalid_argument("vacuum_moment: letter out of range");
    const FockVec v = apply_word(f, word);
    return v[0](0);
}

double vacuum_moment_direct(const Eigen::MatrixXd& Q,
                            const std::vector<int>& word) {
    const int n = int(Q.rows());
    if (n < 1 || n > 15 || Q.cols() != Q.rows())
        throw std::invalid_argument(
            "vacuum_moment_direct: Q must be square, 1 <= n <= 15");
    if (word.size() > 14)
        throw std::invalid_argument(
            "vacuum_moment_direct: word longer than 14 letters");
    for (int l : word)
        if (l < 0 || l >= n)
            throw std::invalid_argument(
                "vacuum_moment_direct: letter out of range");

    // State = sparse vector over basis words, keys in 4-bit nibbles with the
    // first letter lowest (letters stored 1-based so length is implicit).
    using Term = std::pair<std::uint64_t, double>;
    std::vector<Term> cur{{0, 1.0}}, next;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        const int j = *it;
        next.clear();
        for (const auto& [key, c] : cur) {
            next.emplace_back((key << 4) | std::uint64_t(j + 1), c);
            double wpre = 1.0;
            std::uint64_t rest = key;
            for (int pos = 0; rest; rest >>= 4, ++pos) {
                const int letter = int(rest & 0xF) - 1;
                if (letter == j) {
                    const std::uint64_t low =
                        key & ((std::uint64_t(1) << (4 * pos)) - 1);
                    const std::uint64_t high =
                        (key >> (4 * (pos + 1))) << (4 * pos);
                    next.emplace_back(low | high, c * wpre);
                }
                wpre *= Q(j, letter);
            }
        }
        std::sort(next.begin(), next.end(),
                  [](const Term& a, const Term& b) { return a.first < b.first; });
        cur.clear();
        for (const auto& t : next) {
            if (!cur.empty() && cur.back().first == t.first)
                cur.back().second += t.second;
            else
                cur.push_back(t);
        }
    }
    return (!cur.empty() && cur.front().first == 0) ? cur.front().second : 0.0;
}

double vacuum_moment_direct(int n, double q, const std::vector<int>& word) {
    return vacuum_moment_direct(Eigen::MatrixXd::Constant(n, n, q), word);
}

namespace {

void pair_partitions(const std::vector<int>& w, std::vector<int>& mate,
                     std::vector<std::pair<int, int>>& pairs,
                     const Eigen::MatrixXd& Q, double& acc) {
    const int m = int(w.size());
    int a = 0;
    while (a < m && mate[a] >= 0) ++a;
    if (a == m) {
        double prod = 1;
        for (std::size_t i = 0; i < pairs.size() && prod != 0; ++i)
            for (std::size_t k = i + 1; k < pairs.size(); ++k) {
                // pairs ordered by opener; crossing: a_i < a_k < b_i < b_k
                if (pairs[k].first < pairs[i].second &&
                    pairs[i].second < pairs[k].second)
                    prod *= Q(w[pairs[i].first], w[pairs[k].first]);
            }
        acc += prod;
        return;
    }
    for (int b = a + 1; b < m; ++b) {
        if (mate[b] >= 0 || w[b] != w[a]) continue;
        mate[a] = b;
        mate[b] = a;
        pairs.emplace_back(a, b);
        pair_partitions(w, mate, pairs, Q, acc);
        pairs.pop_back();
        mate[a] = mate[b] = -1;
    }
}

}  // namespace

double mixed_moment_oracle(const Eigen::MatrixXd& Q,
                           const std::vector<int>& word) {
    if (word.size() > 12)
        throw std::invalid_argument("moment oracle: word length capped at 12");
    for (int l : word)
        if (l < 0 || l >= Q.rows())
            throw std::invalid_argument("moment oracle: letter out of range");
    if (word.empty()) return 1;
    if (word.size() % 2) return 0;
    std::vector<int> mate(word.size(), -1);
    std::vector<std::pair<int, int>> pairs;
    double acc = 0;
    pair_partitions(word, mate, pairs, Q, acc);
    return acc;
}

double q_moment_oracle(int n, double q, const std::vector<int>& word) {
    return mixed_moment_oracle(Eigen::MatrixXd::Constant(n, n, q), word);
}

HSKernelOp xi_q(const QFockSpace& f) {
    HSKernelOp k;
    k.diag.resize(f.depth + 1);
    double qd = 1;
    for (int d = 0; d <= f.depth; ++d) {
        k.diag[d] = Eigen::VectorXd::Constant(f.dim(d), qd);
        qd *= f.q;
    }
    const double x = f.q * f.q * f.n;
    double term = 1;
    for (int d = 1; d <= f.depth; ++d) {
        term *= x;
        k.hs_dist2_truncated += term;
    }
    k.hs_finite = x < 1;
    k.hs_dist2_closed = k.hs_finite ? x / (1 - x) : kInf;
    return k;
}

HSKernelOp xi_mixed(const QFockSpace& f, int j) {
    if (j < 0 || j >= f.n) throw std::invalid_argument("xi_mixed: bad generator");
    HSKernelOp k;
    k.diag.resize(f.depth + 1);
    std::vector<int> s;
    for (int d = 0; d <= f.depth; ++d) {
        k.diag[d].resize(f.dim(d));
        for (std::size_t i = 0; i < f.dim(d); ++i) {
            decode(i, f.n, d, s);
            double prod = 1;
            for (int l : s) prod *= f.Q(j, l);
            k.diag[d](i) = prod;
        }
    }
    double qj2 = 0;
    for (int i = 0; i < f.n; ++i) qj2 += f.Q(j, i) * f.Q(j, i);
    double term = 1;
    for (int d = 1; d <= f.depth; ++d) {
        term *= qj2;
        k.hs_dist2_truncated += term;
    }
    k.hs_finite = qj2 < 1;
    k.hs_dist2_closed = k.hs_finite ? qj2 / (1 - qj2) : kInf;
    return k;
}

double discrepancy_bound(const QFockSpace& f) {
    double sum = 0;
    for (int j = 0; j < f.n; ++j) {
        const HSKernelOp k = f.mixed ? xi_mixed(f, j) : xi_q(f);
        if (!k.hs_finite) return kInf;
        sum += k.hs_dist2_closed;
    }
    return std::sqrt(sum);
}

double discrepancy_bound_truncated(const QFockSpace& f) {
    double sum = 0;
    for (int j = 0; j < f.n; ++j)
        sum += (f.mixed ? xi_mixed(f, j) : xi_q(f)).hs_dist2_truncated;
    return std::sqrt(sum);
}

double stein_identity_residual(const QFockSpace& f,
                               const std::vector<HSKernelOp>& A,
                               const ncpoly::NCPoly& p, int j) {
    if (j < 0 || j >= f.n)
        throw std::invalid_argument("stein_identity_residual: bad generator");
    if (int(A.size()) != f.n)
        throw std::invalid_argument(
            "stein_identity_residual: need one kernel block per generator");
    if (p.degree() + 1 > f.depth)
        throw std::invalid_argument(
            "stein_identity_residual: polynomial degree + 1 exceeds depth");

    const double lhs = fock_inner(f, apply_word(f, {j}), apply_poly(f, p));

    // <A_j, a (x) b> = <A_j(b* Omega), a Omega>, summed over the terms of
    // the free difference quotient d_j p
    double rhs = 0;
    const ncpoly::NCPolyTensor dq = ncpoly::difference_quotient(p, j);
    for (const auto& [key, c] : dq.terms()) {
        const double cr = real_coeff(c, "stein_identity_residual");
        const FockVec va = apply_word(f, key.first);
        std::vector<int> bstar(key.second.rbegin(), key.second.rend());
        FockVec vb = apply_word(f, bstar);
        for (int d = 0; d <= f.depth; ++d)
            vb[d] = A[j].diag[d].cwiseProduct(vb[d]);
        rhs += cr * fock_inner(f, vb, va);
    }
    return std::fabs(lhs - rhs);
}

}  // namespace freeprob::fockq
