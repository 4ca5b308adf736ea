#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace freeprob::ncpoly {

// A word in the free monoid on generators t_0, t_1, ... (indices 0-based).
// The empty word is the unit.
using Word = std::vector<int>;
using Coeff = std::complex<double>;

class NCPoly {
public:
    NCPoly() = default;

    static NCPoly zero() { return NCPoly{}; }
    static NCPoly one() { return monomial(Word{}, 1.0); }
    static NCPoly generator(int j);
    static NCPoly monomial(Word w, Coeff c);

    const std::map<Word, Coeff>& terms() const { return terms_; }
    Coeff coeff(const Word& w) const;
    int degree() const;  // -1 for the zero polynomial
    bool empty() const { return terms_.empty(); }
    int max_generator() const;  // largest index used, -1 if constant

    NCPoly& operator+=(const NCPoly& o);
    NCPoly& operator-=(const NCPoly& o);
    NCPoly operator+(const NCPoly& o) const;
    NCPoly operator-(const NCPoly& o) const;
    NCPoly operator*(const NCPoly& o) const;
    NCPoly operator*(Coeff s) const;

    // star: reverse each word, conjugate each coefficient
    NCPoly adjoint() const;
    bool is_selfadjoint(double tol = 1e-12) const;

    // sum_m |c_m| R^{deg m}; submultiplicative in the product
    double r_norm(double R) const;

    NCPoly& prune(double tol = 0.0);

private:
    std::map<Word, Coeff> terms_;
    void add_term(const Word& w, Coeff c);
    friend class NCPolyTensor;
};

NCPoly operator*(Coeff s, const NCPoly& p);

// Element of the algebraic tensor product A (x) A^op, stored as a sum of
// elementary tensors a (x) b.  Multiplication uses the op convention
// (a(x)b)(c(x)d) = ac (x) db.
class NCPolyTensor {
public:
    using Key = std::pair<Word, Word>;

    NCPolyTensor() = default;
    static NCPolyTensor unit() { return term(Word{}, Word{}, 1.0); }
    static NCPolyTensor term(Word a, Word b, Coeff c);

    const std::map<Key, Coeff>& terms() const { return terms_; }
    Coeff coeff(const Word& a, const Word& b) const;
    bool empty() const { return terms_.empty(); }
    int degree() const;  // max of deg a + deg b

    NCPolyTensor& operator+=(const NCPolyTensor& o);
    NCPolyTensor operator+(const NCPolyTensor& o) const;
    NCPolyTensor operator-(const NCPolyTensor& o) const;
    NCPolyTensor operator*(const NCPolyTensor& o) const;  // op convention
    NCPolyTensor operator*(Coeff s) const;

    // left leg p (x) 1 and right leg 1 (x) q as tensor factors
    static NCPolyTensor left(const NCPoly& p);
    static NCPolyTensor right(const NCPoly& q);

    NCPolyTensor& prune(double tol = 0.0);

private:
    std::map<Key, Coeff> terms_;
    void add_term(const Word& a, const Word& b, Coeff c);
};

// cyclic derivative:  D_j (a t_j b) = b a summed over occurrences of t_j
NCPoly cyclic_derivative(const NCPoly& p, int j);

// free difference quotient:  d_j (a t_j b) = a (x) b summed over occurrences
NCPolyTensor difference_quotient(const NCPoly& p, int j);

// nc Jacobian of a tuple P = (p_1..p_n): entry (i,j) = d_j p_i
struct TensorMatrix {
    int rows = 0, cols = 0;
    std::vector<NCPolyTensor> entries;  // row-major
    const NCPolyTensor& at(int i, int j) const { return entries[i * cols + j]; }
};
TensorMatrix jacobian(const std::vector<NCPoly>& P, int n);

// ---- evaluation on matrix tuples ----

using Mat = Eigen::MatrixXcd;

struct MatrixTuple {
    std::vector<Mat> X;
    int dim() const { return X.empty() ? 0 : static_cast<int>(X[0].rows()); }
    // max entrywise deviation from self-adjointness across the tuple
    double selfadjoint_defect() const;
    void validate(int n_gens, double tol = 1e-12) const;
};

Mat eval_poly(const NCPoly& p, const MatrixTuple& t);
Mat eval_word(const Word& w, const MatrixTuple& t);
// eta # c = sum c_ab a(X) c b(X)
Mat eval_tensor_sharp(const NCPolyTensor& eta, const MatrixTuple& t,
                      const Mat& c);

std::complex<double> trace_state(const Mat& m);  // normalized trace

// tangent-line test tau(f(A)) >= tau(f(B)) + sum_j tau(Df_j(B) (A_j - B_j)).
// The caller supplies a convex f; convexity is not checked symbolically.
struct TangentReport {
    double lhs = 0, rhs = 0, gap = 0;
    bool holds = false;
};
TangentReport tangent_inequality_check(const NCPoly& f, const MatrixTuple& A,
                                       const MatrixTuple& B,
                                       double tol = 1e-10);

// ---- text serialization ----
// One term per line: "re im i1 i2 ... ik" (empty index list = constant term).
// Lines starting with '#' are comments.
std::string to_text(const NCPoly& p);
NCPoly poly_from_text(const std::string& text);

}  // namespace freeprob::ncpoly
