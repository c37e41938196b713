#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "types.hpp"

namespace tomokit {

inline Mat kron(const Mat& a, const Mat& b)
{
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Vec kron(const Vec& a, const Vec& b)
{
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

inline int qubits_for_dim(int d)
{
    int n = 0;
    while ((1 << n) < d) ++n;
    if ((1 << n) != d) throw std::invalid_argument("dimension " + std::to_string(d) + " is not a power of two");
    return n;
}

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline bool is_hermitian(const Mat& m, double tol = kHermTol)
{
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

inline Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

inline bool is_unitary(const Mat& u, double tol = kHermTol)
{
    if (u.rows() != u.cols()) return false;
    return max_abs(u.adjoint() * u - Mat::Identity(u.rows(), u.cols())) <= tol;
}

// Single-qubit Paulis in I, X, Y, Z order.
inline Mat pauli(int k)
{
    Mat p(2, 2);
    switch (k) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 3: p << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli index must be 0..3");
    }
    return p;
}

inline int pauli_index(char c)
{
    switch (c) {
    case 'I': case 'i': return 0;
    case 'X': case 'x': return 1;
    case 'Y': case 'y': return 2;
    case 'Z': case 'z': return 3;
    default: throw std::invalid_argument(std::string("bad Pauli letter '") + c + "'");
    }
}

// "XY" -> X (x) Y
inline Mat pauli_word(const std::string& w)
{
    if (w.empty()) throw std::invalid_argument("empty Pauli word");
    Mat out = pauli(pauli_index(w[0]));
    for (size_t i = 1; i < w.size(); ++i) out = kron(out, pauli(pauli_index(w[i])));
    return out;
}

inline std::string pauli_label(int index, int n)
{
    static const char* letters = "IXYZ";
    std::string s(n, 'I');
    for (int q = n - 1; q >= 0; --q) {
        s[q] = letters[index % 4];
        index /= 4;
    }
    return s;
}

// Operator acting as `op` on qubit q (0 = leftmost) of an n-qubit register.
inline Mat on_qubit(const Mat& op, int q, int n)
{
    Mat out = Mat::Identity(1, 1);
    for (int k = 0; k < n; ++k) out = kron(out, k == q ? op : Mat(Mat::Identity(2, 2)));
    return out;
}

// 90 degree rotation exp(-i pi/4 sigma); sign=-1 gives the inverse ("bar").
inline Mat rot90(char axis, int sign = 1)
{
    const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4) * sign;
    return c * Mat::Identity(2, 2) - cplx(0, s) * pauli(pauli_index(axis));
}

struct EigenH {
    RVec values;  // ascending
    Mat vectors;  // columns, phase-fixed
};

// Largest-magnitude component made real positive; ties go to the lowest index.
inline void fix_phase(Eigen::Ref<Vec> v)
{
    Eigen::Index best = 0;
    double bm = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double a = std::abs(v(i));
        if (a > bm + 1e-12) {
            bm = a;
            best = i;
        }
    }
    if (bm > 0) v *= std::conj(v(best)) / bm;
}

inline EigenH eigh(const Mat& h)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
    if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
    EigenH out{es.eigenvalues(), es.eigenvectors()};
    for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) fix_phase(out.vectors.col(j));
    return out;
}

inline RVec eigenvalues(const Mat& h)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// Hermitian function via eigendecomposition.
template <typename F>
Mat herm_apply(const Mat& h, F f)
{
    EigenH e = eigh(h);
    RVec fv = e.values.unaryExpr(f);
    return e.vectors * fv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

inline Mat sqrt_psd(const Mat& h)
{
    return herm_apply(h, [](double x) { return x > kEigFloor ? std::sqrt(x) : 0.0; });
}

inline Mat project_psd(const Mat& h)
{
    return herm_apply(h, [](double x) { return x > 0 ? x : 0.0; });
}

// Euclidean projection of v onto {x >= 0, sum x = s}.
inline RVec project_simplex(const RVec& v, double s = 1.0)
{
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0, theta = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        double t = (css - s) / static_cast<double>(i + 1);
        if (u[i] - t > 0) theta = t;
    }
    return (v.array() - theta).max(0.0);
}

// Nearest unit-trace PSD matrix in Frobenius norm.
inline Mat project_density(const Mat& h)
{
    EigenH e = eigh(h);
    RVec p = project_simplex(e.values, 1.0);
    return e.vectors * p.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

// Real parameters of a Hermitian matrix: row-major upper triangle,
// diagonal -> x, off-diagonal -> (Re, Im).
inline RVec herm_to_params(const Mat& h)
{
    const Eigen::Index d = h.rows();
    RVec x(d * d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j) {
            if (i == j) {
                x(k++) = h(i, i).real();
            } else {
                x(k++) = h(i, j).real();
                x(k++) = h(i, j).imag();
            }
        }
    return x;
}

inline Mat params_to_herm(const RVec& x)
{
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(x.size()))));
    if (d * d != x.size()) throw std::invalid_argument("parameter vector length is not a square");
    Mat h(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j) {
            if (i == j) {
                h(i, i) = x(k++);
            } else {
                cplx z(x(k), x(k + 1));
                k += 2;
                h(i, j) = z;
                h(j, i) = std::conj(z);
            }
        }
    return h;
}

// Scale factors turning Hermitian parameters into isometric ones (y = s .* x).
inline RVec iso_scale(Eigen::Index d)
{
    RVec s(d * d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j) {
            if (i == j) {
                s(k++) = 1.0;
            } else {
                s(k++) = std::sqrt(2.0);
                s(k++) = std::sqrt(2.0);
            }
        }
    return s;
}

// Hermitian matrix for unit parameter p (dimension d).
inline Mat param_basis(Eigen::Index d, Eigen::Index p)
{
    RVec x = RVec::Zero(d * d);
    x(p) = 1.0;
    return params_to_herm(x);
}

// Column stacking (Eigen storage is column-major).
inline Vec vec_col(const Mat& m)
{
    return Eigen::Map<const Vec>(m.data(), m.size());
}

inline Mat unvec_col(const Vec& v, Eigen::Index d)
{
    return Eigen::Map<const Mat>(v.data(), d, d);
}

}  // namespace tomokit
