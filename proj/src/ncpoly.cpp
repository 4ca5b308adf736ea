#include "freeprob/ncpoly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace freeprob::ncpoly {

namespace {
constexpr double kDropTol = 0.0;  // exact-zero pruning only

bool nearly_zero(Coeff c, double tol) { return std::abs(c) <= tol; }
}  // namespace

NCPoly NCPoly::generator(int j) {
    if (j < 0) throw std::invalid_argument("generator index must be >= 0");
    return monomial(Word{j}, 1.0);
}

NCPoly NCPoly::monomial(Word w, Coeff c) {
    NCPoly p;
    if (!nearly_zero(c, kDropTol)) p.terms_.emplace(std::move(w), c);
    return p;
}

Coeff NCPoly::coeff(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Coeff{0.0} : it->second;
}

int NCPoly::degree() const {
    int d = -1;
    for (const auto& [w, c] : terms_) d = std::max(d, static_cast<int>(w.size()));
    return d;
}

int NCPoly::max_generator() const {
    int g = -1;
    for (const auto& [w, c] : terms_)
        for (int j : w) g = std::max(g, j);
    return g;
}

void NCPoly::add_term(const Word& w, Coeff c) {
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        if (!nearly_zero(c, kDropTol)) terms_.emplace(w, c);
    } else {
        it->second += c;
        if (nearly_zero(it->second, kDropTol)) terms_.erase(it);
    }
}

NCPoly& NCPoly::operator+=(const NCPoly& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
}

NCPoly& NCPoly::operator-=(const NCPoly& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
}

NCPoly NCPoly::operator+(const NCPoly& o) const {
    NCPoly r = *this;
    r += o;
    return r;
}

NCPoly NCPoly::operator-(const NCPoly& o) const {
    NCPoly r = *this;
    r -= o;
    return r;
}

NCPoly NCPoly::operator*(const NCPoly& o) const {
    NCPoly r;
    for (const auto& [wa, ca] : terms_) {
        for (const auto& [wb, cb] : o.terms_) {
            Word w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            r.add_term(w, ca * cb);
        }
    }
    return r;
}

NCPoly NCPoly::operator*(Coeff s) const {
    NCPoly r;
    if (nearly_zero(s, kDropTol)) return r;
    for (const auto& [w, c] : terms_) r.terms_.emplace(w, c * s);
    return r;
}

NCPoly operator*(Coeff s, const NCPoly& p) { return p * s; }

NCPoly NCPoly::adjoint() const {
    NCPoly r;
    for (const auto& [w, c] : terms_) {
        Word rw(w.rbegin(), w.rend());
        r.add_term(rw, std::conj(c));
    }
    return r;
}

bool NCPoly::is_selfadjoint(double tol) const {
    NCPoly d = *this - adjoint();
    for (const auto& [w, c] : d.terms_)
        if (std::abs(c) > tol) return false;
    return true;
}

double NCPoly::r_norm(double R) const {
    if (R <= 0) throw std::invalid_argument("r_norm radius must be positive");
    double s = 0;
    for (const auto& [w, c] : terms_) s += std::abs(c) * std::pow(R, static_cast<double>(w.size()));
    return s;
}

NCPoly& NCPoly::prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= tol) it = terms_.erase(it);
        else ++it;
    }
    return *this;
}

// ---- tensors ----

NCPolyTensor NCPolyTensor::term(Word a, Word b, Coeff c) {
    NCPolyTensor t;
    if (!nearly_zero(c, kDropTol)) t.terms_.emplace(Key{std::move(a), std::move(b)}, c);
    return t;
}

Coeff NCPolyTensor::coeff(const Word& a, const Word& b) const {
    auto it = terms_.find(Key{a, b});
    return it == terms_.end() ? Coeff{0.0} : it->second;
}

int NCPolyTensor::degree() const {
    int d = -1;
    for (const auto& [k, c] : terms_)
        d = std::max(d, static_cast<int>(k.first.size() + k.second.size()));
    return d;
}

void NCPolyTensor::add_term(const Word& a, const Word& b, Coeff c) {
    Key k{a, b};
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        if (!nearly_zero(c, kDropTol)) terms_.emplace(std::move(k), c);
    } else {
        it->second += c;
        if (nearly_zero(it->second, kDropTol)) terms_.erase(it);
    }
}

NCPolyTensor& NCPolyTensor::operator+=(const NCPolyTensor& o) {
    for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
    return *this;
}

NCPolyTensor NCPolyTensor::operator+(const NCPolyTensor& o) const {
    NCPolyTensor r = *this;
    r += o;
    return r;
}

NCPolyTensor NCPolyTensor::operator-(const NCPolyTensor& o) const {
    NCPolyTensor r = *this;
    for (const auto& [k, c] : o.terms_) r.add_term(k.first, k.second, -c);
    return r;
}

NCPolyTensor NCPolyTensor::operator*(const NCPolyTensor& o) const {
    // (a (x) b)(c (x) d) = ac (x) db
    NCPolyTensor r;
    for (const auto& [ka, ca] : terms_) {
        for (const auto& [kb, cb] : o.terms_) {
            Word left = ka.first;
            left.insert(left.end(), kb.first.begin(), kb.first.end());
            Word right = kb.second;
            right.insert(right.end(), ka.second.begin(), ka.second.end());
            r.add_term(left, right, ca * cb);
        }
    }
    return r;
}

NCPolyTensor NCPolyTensor::operator*(Coeff s) const {
    NCPolyTensor r;
    if (nearly_zero(s, kDropTol)) return r;
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, c * s);
    return r;
}

NCPolyTensor NCPolyTensor::left(const NCPoly& p) {
    NCPolyTensor r;
    for (const auto& [w, c] : p.terms()) r.add_term(w, Word{}, c);
    return r;
}

NCPolyTensor NCPolyTensor::right(const NCPoly& q) {
    NCPolyTensor r;
    for (const auto& [w, c] : q.terms()) r.add_term(Word{}, w, c);
    return r;
}

NCPolyTensor& NCPolyTensor::prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= tol) it = terms_.erase(it);
        else ++it;
    }
    return *this;
}

// ---- derivations ----

NCPoly cyclic_derivative(const NCPoly& p, int j) {
    NCPoly r;
    for (const auto& [w, c] : p.terms()) {
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (w[k] != j) continue;
            Word ba(w.begin() + static_cast<long>(k) + 1, w.end());
            ba.insert(ba.end(), w.begin(), w.begin() + static_cast<long>(k));
            r += NCPoly::monomial(std::move(ba), c);
        }
    }
    return r;
}

NCPolyTensor difference_quotient(const NCPoly& p, int j) {
    NCPolyTensor r;
    for (const auto& [w, c] : p.terms()) {
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (w[k] != j) continue;
            Word a(w.begin(), w.begin() + static_cast<long>(k));
            Word b(w.begin() + static_cast<long>(k) + 1, w.end());
            r += NCPolyTensor::term(std::move(a), std::move(b), c);
        }
    }
    return r;
}

TensorMatrix jacobian(const std::vector<NCPoly>& P, int n) {
    if (n <= 0) throw std::invalid_argument("jacobian needs n >= 1");
    TensorMatrix J;
    J.rows = static_cast<int>(P.size());
    J.cols = n;
    J.entries.reserve(static_cast<std::size_t>(J.rows) * J.cols);
    for (const auto& p : P) {
        if (p.max_generator() >= n)
            throw std::invalid_argument("polynomial uses generator beyond tuple size");
        for (int j = 0; j < n; ++j) J.entries.push_back(difference_quotient(p, j));
    }
    return J;
}

// ---- evaluation ----

double MatrixTuple::selfadjoint_defect() const {
    double d = 0;
    for (const auto& m : X) {
        Mat diff = m - m.adjoint();
        d = std::max(d, diff.cwiseAbs().maxCoeff());
    }
    return d;
}

void MatrixTuple::validate(int n_gens, double tol) const {
    if (static_cast<int>(X.size()) < n_gens)
        throw std::invalid_argument("matrix tuple too short for polynomial");
    const int k = dim();
    for (const auto& m : X)
        if (m.rows() != k || m.cols() != k)
            throw std::invalid_argument("matrix tuple entries must share a square dimension");
    if (selfadjoint_defect() > tol)
        throw std::invalid_argument("matrix tuple entries must be self-adjoint");
}

Mat eval_word(const Word& w, const MatrixTuple& t) {
    const int k = t.dim();
    Mat m = Mat::Identity(k, k);
    for (int j : w) {
        if (j < 0 || j >= static_cast<int>(t.X.size()))
            throw std::invalid_argument("word uses generator beyond tuple size");
        m = m * t.X[static_cast<std::size_t>(j)];
    }
    return m;
}

Mat eval_poly(const NCPoly& p, const MatrixTuple& t) {
    const int k = t.dim();
    Mat acc = Mat::Zero(k, k);
    for (const auto& [w, c] : p.terms()) acc += c * eval_word(w, t);
    return acc;
}

Mat eval_tensor_sharp(const NCPolyTensor& eta, const MatrixTuple& t, const Mat& c) {
    const int k = t.dim();
    Mat acc = Mat::Zero(k, k);
    for (const auto& [key, coef] : eta.terms())
        acc += coef * (eval_word(key.first, t) * c * eval_word(key.second, t));
    return acc;
}

std::complex<double> trace_state(const Mat& m) {
    if (m.rows() == 0) return 0.0;
    return m.trace() / static_cast<double>(m.rows());
}

TangentReport tangent_inequality_check(const NCPoly& f, const MatrixTuple& A,
                            const MatrixTuple& B, double tol) {
    if (!f.is_selfadjoint(1e-12))
        throw std::invalid_argument("tangent_inequality_check requires a self-adjoint polynomial");
    const int n = f.max_generator() + 1;
    A.validate(n);
    B.validate(n);
    if (A.dim() != B.dim())
        throw std::invalid_argument("tangent_inequality_check tuples must share dimension");

    TangentReport rep;
    rep.lhs = trace_state(eval_poly(f, A)).real();
    double rhs = trace_state(eval_poly(f, B)).real();
    for (int j = 0; j < n; ++j) {
        NCPoly df = cyclic_derivative(f, j);
        Mat gb = eval_poly(df, B);
        Mat diff = A.X[static_cast<std::size_t>(j)] - B.X[static_cast<std::size_t>(j)];
        rhs += trace_state(gb * diff).real();
    }
    rep.rhs = rhs;
    rep.gap = rep.lhs - rep.rhs;
    rep.holds = rep.gap >= -tol;
    return rep;
}

// ---- text io ----

std::string to_text(const NCPoly& p) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& [w, c] : p.terms()) {
        os << c.real() << " " << c.imag();
        for (int j : w) os << " " << j;
        os << "\n";
    }
    return os.str();
}

NCPoly poly_from_text(const std::string& text) {
    NCPoly p;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string_view sv(line);
        auto first = sv.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) continue;
        if (sv[first] == '#') continue;
        std::istringstream ls(line);
        double re, im;
        if (!(ls >> re >> im))
            throw std::invalid_argument("poly text line " + std::to_string(lineno) +
                                        ": expected 're im [indices...]'");
        Word w;
        long idx;
        while (ls >> idx) {
            if (idx < 0)
                throw std::invalid_argument("poly text line " + std::to_string(lineno) +
                                            ": negative generator index");
            w.push_back(static_cast<int>(idx));
        }
        if (!ls.eof())
            throw std::invalid_argument("poly text line " + std::to_string(lineno) +
                                        ": trailing garbage");
        p += NCPoly::monomial(std::move(w), Coeff{re, im});
    }
    return p;
}

}  // namespace freeprob::ncpoly
