#pragma once

#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qcore.hpp"

namespace tomokit {

inline constexpr double kContractionTol = 1e-10;

inline double operator_norm(const Mat& a)
{
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

inline void check_contraction(const Mat& A)
{
    const double nrm = operator_norm(A);
    if (nrm > 1.0 + kContractionTol) {
        std::ostringstream os;
        os << "operator is not a contraction (norm " << nrm << ")";
        throw std::invalid_argument(os.str());
    }
}

// Scale a slightly super-unit operator back to norm 1; factor = applied scale (1 if none).
inline Mat rescale_contraction(const Mat& A, double* factor = nullptr)
{
    const double nrm = operator_norm(A);
    const double f = nrm > 1.0 ? 1.0 / nrm : 1.0;
    if (factor) *factor = f;
    return A * f;
}

// sqrt(I - A^dag A), eigenvalues clipped at zero.
inline Mat defect_operator(const Mat& A)
{
    if (A.rows() != A.cols()) throw std::invalid_argument("defect_operator: square operator expected");
    check_contraction(A);
    const Mat I = Mat::Identity(A.rows(), A.cols());
    return herm_apply(I - A.adjoint() * A, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

struct DilationUnitary {
    Mat A;
    Mat U;
    double unitarity_defect = 0.0;
};

// [[A, D_{A^dag}], [D_A, -A^dag]]
inline DilationUnitary dilate(const Mat& A)
{
    const Eigen::Index d = A.rows();
    DilationUnitary out;
    out.A = A;
    out.U.resize(2 * d, 2 * d);
    out.U.topLeftCorner(d, d) = A;
    out.U.topRightCorner(d, d) = defect_operator(A.adjoint());
    out.U.bottomLeftCorner(d, d) = defect_operator(A);
    out.U.bottomRightCorner(d, d) = -A.adjoint();
    out.unitarity_defect = max_abs(out.U.adjoint() * out.U - Mat::Identity(2 * d, 2 * d));
    return out;
}

// Each Kraus branch run as its dilation on |0>(x)|phi>, then projected back
// onto the first d coordinates; mixed inputs go eigenstate by eigenstate.
inline DensityMatrix simulate_dilated(const KrausSet& ks, const DensityMatrix& rho)
{
    if (ks.completeness_defect > 1e-6) throw std::invalid_argument("simulate_dilated: Kraus set is not complete");
    if (rho.dim() != ks.dim) throw std::invalid_argument("simulate_dilated: dimension mismatch");
    const int d = ks.dim;
    std::vector<DilationUnitary> dil;
    for (const auto& A : ks.ops) dil.push_back(dilate(A));
    EigenH e = eigh(rho.mat);
    Mat out = Mat::Zero(d, d);
    for (Eigen::Index k = 0; k < e.values.size(); ++k) {
        if (e.values(k) <= kEigFloor) continue;
        Vec emb = Vec::Zero(2 * d);
        emb.head(d) = e.vectors.col(k);
        for (const auto& u : dil) {
            Vec v = (u.U * emb).head(d);
            out += e.values(k) * v * v.adjoint();
        }
    }
    return make_state(std::move(out));
}

// ---------------------------------------------------------------- generators

// Two-qubit phase-damping generator on column-stacked vec(rho): element
// rho_ij decays at gamma_k for every qubit k whose bits differ in i and j.
inline Superoperator pd_generator(double gamma1, double gamma2)
{
    if (gamma1 < 0 || gamma2 < 0) throw std::invalid_argument("pd_generator: rates must be >= 0");
    const double g[2] = {gamma1, gamma2};
    Mat Z = Mat::Zero(16, 16);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            double rate = 0.0;
            for (int q = 0; q < 2; ++q) {
                const int bit = 1 << (1 - q);
                if ((i & bit) != (j & bit)) rate += g[q];
            }
            Z(i + 4 * j, i + 4 * j) = -rate;
        }
    return Superoperator{Z};
}

inline Superoperator propagator(const Superoperator& Z, double t)
{
    if (t < 0) throw std::invalid_argument("propagator: t must be >= 0");
    return Superoperator{Mat(Mat(Z.mat * t).exp())};
}

inline DensityMatrix evolve_generator(const Superoperator& Z, const DensityMatrix& rho, double t)
{
    if (Z.mat.rows() != rho.dim() * rho.dim()) throw std::invalid_argument("evolve_generator: dimension mismatch");
    Superoperator P = propagator(Z, t);
    return make_state(unvec_col(P.mat * vec_col(rho.mat), rho.dim()));
}

// ---------------------------------------------------------------- channel families

namespace detail {

inline std::vector<Mat> prune(std::vector<Mat> ops)
{
    std::vector<Mat> out;
    for (auto& k : ops)
        if (max_abs(k) > 1e-15) out.push_back(std::move(k));
    return out;
}

inline void check_prob(double p, const char* what)
{
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + ": p must lie in [0, 1]");
}

}  // namespace detail

// Off-diagonals scaled by exp(-gamma t).
inline Channel qubit_pd(double gamma, double t)
{
    if (gamma < 0 || t < 0) throw std::invalid_argument("qubit_pd: gamma and t must be >= 0");
    const double e = std::exp(-gamma * t);
    return Channel::kraus(make_kraus(detail::prune({std::sqrt((1 + e) / 2) * pauli(0), std::sqrt((1 - e) / 2) * pauli(3)})));
}

// Generalized amplitude damping toward diag(1 - nbar, nbar), off-diagonals exp(-Gamma t / 2).
inline Channel qubit_gad(double Gamma, double nbar, double t)
{
    if (Gamma < 0 || t < 0) throw std::invalid_argument("qubit_gad: Gamma and t must be >= 0");
    if (nbar < 0 || nbar > 1) throw std::invalid_argument("qubit_gad: nbar must lie in [0, 1]");
    const double gp = 1.0 - std::exp(-Gamma * t);
    const double p = 1.0 - nbar;
    Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2), k2 = Mat::Zero(2, 2), k3 = Mat::Zero(2, 2);
    k0(0, 0) = std::sqrt(p);
    k0(1, 1) = std::sqrt(p * (1 - gp));
    k1(0, 1) = std::sqrt(p * gp);
    k2(0, 0) = std::sqrt((1 - p) * (1 - gp));
    k2(1, 1) = std::sqrt(1 - p);
    k3(1, 0) = std::sqrt((1 - p) * gp);
    return Channel::kraus(make_kraus(detail::prune({k0, k1, k2, k3})));
}

inline KrausSet ad_kraus(double p)
{
    detail::check_prob(p, "ad_kraus");
    Mat a1 = Mat::Zero(2, 2), a2 = Mat::Zero(2, 2);
    a1(0, 0) = 1.0;
    a1(1, 1) = std::sqrt(1 - p);
    a2(0, 1) = std::sqrt(p);
    return make_kraus(detail::prune({a1, a2}));
}

// Correlated amplitude damping: A1 = sqrt(p) s+ (x) s+, A2 = sqrt(I - A1^dag A1).
inline KrausSet cad_kraus(double p)
{
    detail::check_prob(p, "cad_kraus");
    Mat sp = Mat::Zero(2, 2);
    sp(0, 1) = 1.0;
    Mat a1 = std::sqrt(p) * kron(sp, sp);
    Mat a2 = Mat::Identity(4, 4);
    a2(3, 3) = std::sqrt(1 - p);
    return make_kraus(detail::prune({a1, a2}));
}

// ---------------------------------------------------------------- duality simulation

enum class DsaKind { cbf, cpf, cbpf };

inline std::string dsa_word(DsaKind k)
{
    switch (k) {
    case DsaKind::cbf: return "XX";
    case DsaKind::cpf: return "ZZ";
    case DsaKind::cbpf: return "YY";
    }
    throw std::invalid_argument("unknown DSA kind");
}

// Correlated bit / phase / bit-phase flip: {sqrt(1-p) I, sqrt(p) P(x)P}.
inline KrausSet correlated_flip(DsaKind kind, double p)
{
    detail::check_prob(p, "correlated_flip");
    return make_kraus({std::sqrt(1 - p) * Mat(Mat::Identity(4, 4)), std::sqrt(p) * pauli_word(dsa_word(kind))});
}

struct DsaConstruction {
    Mat V;               // 2x2 unitary, column 0 sets the branch amplitudes
    Mat W;               // 2x2 unitary mixing the branches
    std::vector<Mat> U;  // U_0, U_1

    // E_k = sum_i W_ki V_i0 U_i
    std::vector<Mat> kraus() const
    {
        std::vector<Mat> out;
        for (Eigen::Index k = 0; k < W.rows(); ++k) {
            Mat e = Mat::Zero(U[0].rows(), U[0].cols());
            for (size_t i = 0; i < U.size(); ++i) e += W(k, i) * V(i, 0) * U[i];
            out.push_back(e);
        }
        return out;
    }
};

inline DsaConstruction dsa_construct(DsaKind kind, double p)
{
    detail::check_prob(p, "dsa_construct");
    DsaConstruction c;
    const double a = std::sqrt(1 - p), b = std::sqrt(p);
    c.V.resize(2, 2);
    c.V << a, -b, b, a;
    c.W = Mat::Identity(2, 2);
    c.U = {Mat::Identity(4, 4), pauli_word(dsa_word(kind))};
    return c;
}

}  // namespace tomokit
