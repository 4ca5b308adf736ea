#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <vector>

#include "freeprob/ncpoly.hpp"

namespace freeprob::fockq {

// Truncated q-deformed Fock space over n generators up to tensor degree
// `depth`.  Words over {0..n-1} of length d are indexed base-n with the first
// letter most significant, so creation by letter j sends index u to
// j*n^{d-1} + u.  Annihilation is the q-adjoint of creation, realized by Gram
// conjugation: ann_j at degree d is G_{d-1}^{-1} (row block j of G_d).
struct QFockSpace {
    int n = 0;
    int depth = 0;
    bool mixed = false;
    double q = 0;       // constant deformation when !mixed
    Eigen::MatrixXd Q;  // n x n symmetric weights (constant case: all q)

    std::vector<Eigen::MatrixXd> gram;  // gram[d]: n^d x n^d, d = 0..depth
    std::vector<Eigen::LLT<Eigen::MatrixXd>> gram_llt;
    // ann[j][d]: n^{d-1} x n^d, maps degree d to d-1 (d = 1..depth)
    std::vector<std::vector<Eigen::MatrixXd>> ann;

    std::size_t dim(int d) const;  // n^d
};

// Gram by direct permutation sum for d <= 6, by the insertion recursion
// G_d = (I (x) G_{d-1}) R_d beyond; positive definiteness checked by
// Cholesky.  Rejects |q| >= 1, depth < 2, and basis budgets beyond
// 2e6 total words or a top degree wider than 4096.
QFockSpace build_fock(int n, double q, int depth);

// Mixed-weight variant: Q symmetric with |entries| < 1 and row square sums
// Q_j(2) = sum_i Q(j,i)^2 < 1 (Hilbert-Schmidt condition for the kernels).
QFockSpace build_mixed(const Eigen::MatrixXd& Q, int depth);

// Vector in the truncated space, one dense block per degree 0..depth.
using FockVec = std::vector<Eigen::VectorXd>;

FockVec vacuum(const QFockSpace& f);
double fock_inner(const QFockSpace& f, const FockVec& u, const FockVec& v);

// x_j = creation + annihilation; components pushed past the top degree are
// dropped, so results are exact only while degrees stay within depth.
FockVec apply_x(const QFockSpace& f, int j, const FockVec& v);
FockVec apply_word(const QFockSpace& f, const std::vector<int>& word);
FockVec apply_poly(const QFockSpace& f, const ncpoly::NCPoly& p);

// Direct contraction form of annihilation at degree d (no Gram solve);
// cross-checks the q-adjoint construction.
Eigen::VectorXd annihilate_direct(const QFockSpace& f, int j, int d,
                                  const Eigen::VectorXd& v);

// <x_{w_1} ... x_{w_m} Omega, Omega>; exact for m <= depth, longer words are
// rejected rather than silently truncated.
double vacuum_moment(const QFockSpace& f, const std::vector<int>& word);

// Same moment by sparse application of creation/annihilation to the vacuum,
// tracking only the reachable words.  Needs no Gram matrices, so it covers
// widths and lengths the dense core cannot (n <= 15, length <= 14).
double vacuum_moment_direct(const Eigen::MatrixXd& Q,
                            const std::vector<int>& word);
double vacuum_moment_direct(int n, double q, const std::vector<int>& word);

// Independent Wick-formula oracles: sum over letter-compatible pair
// partitions weighted by crossing factors.  Length capped at 12.
double q_moment_oracle(int n, double q, const std::vector<int>& word);
double mixed_moment_oracle(const Eigen::MatrixXd& Q,
                           const std::vector<int>& word);

// Kernel operator diagonal in the word basis (both Fock examples are), with
// the Hilbert-Schmidt distance to 1 (x) 1.  The degree-0 block is the image
// of 1 (x) 1 itself, so the distance sums start at degree 1.
struct HSKernelOp {
    std::vector<Eigen::VectorXd> diag;  // diag[d]: n^d entries
    double hs_dist2_truncated = 0;      // sum_{d=1}^{depth}
    double hs_dist2_closed = 0;         // geometric series limit
    bool hs_finite = true;              // limit finite
};

// Xi_q = sum_d q^d pi_d; truncated distance sum_{d>=1} q^{2d} n^d, closed
// form q^2 n / (1 - q^2 n) (flagged infinite when q^2 n >= 1).
HSKernelOp xi_q(const QFockSpace& f);

// Mixed kernel Xi_j, diagonal entry prod_l Q(j, w_l) on word w; distances
// use Q_j(2) = sum_i Q(j,i)^2 in place of q^2 n.
HSKernelOp xi_mixed(const QFockSpace& f, int j);

// sqrt(n) * ||Xi_q - 1(x)1|| in closed form (mixed: root of the sum of the
// per-generator closed distances); _truncated uses the depth-capped sums.
double discrepancy_bound(const QFockSpace& f);
double discrepancy_bound_truncated(const QFockSpace& f);

// |<x_j, p(X)>_phi - <A_j, [dq_j p](X)>_{phi (x) phi}| with the pairing
// <A, a (x) b> = <A(b* Omega), a Omega>_F; A holds one kernel per generator
// (the block-diagonal Stein kernel).  Exact up to rounding for
// deg(p) + 1 <= depth.
double stein_identity_residual(const QFockSpace& f,
                               const std::vector<HSKernelOp>& A,
                               const ncpoly::NCPoly& p, int j);

}  // namespace freeprob::fockq
