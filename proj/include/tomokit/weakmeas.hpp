#pragma once

#include "recon.hpp"

namespace tomokit {

enum class Evolution { first_order, exact };

struct WeakConfig {
    double g = 0.1;
    Evolution evolution = Evolution::first_order;

    // above this the first-order picture is visibly off
    bool strong() const { return g > 0.3; }
};

inline void check_weak(const WeakConfig& cfg)
{
    if (!(cfg.g > 0.0) || cfg.g > 1.0) throw std::invalid_argument("weak coupling g must lie in (0, 1]");
}

// Joint system (x) meter state, meter last, meter starting in |0>, B = sigma_x.
// first_order: |psi,0> - i g A|psi,1> without renormalisation.
// exact:       cos g |psi,0> - i sin g A|psi,1>  (A^2 = I).
inline Vec weak_evolve(const Vec& psi, const Mat& A, const WeakConfig& cfg)
{
    check_weak(cfg);
    if (A.rows() != psi.size()) throw std::invalid_argument("weak_evolve: dimension mismatch");
    if (!is_hermitian(A) || max_abs(A * A - Mat::Identity(A.rows(), A.cols())) > 1e-10)
        throw std::invalid_argument("weak_evolve: A must be a Hermitian Pauli word");
    const Vec Apsi = A * psi;
    const Vec m0 = basis_ket(0, 2), m1 = basis_ket(1, 2);
    const cplx i(0, 1);
    if (cfg.evolution == Evolution::first_order) return kron(psi, m0) - i * cfg.g * kron(Apsi, m1);
    return std::cos(cfg.g) * kron(psi, m0) - i * std::sin(cfg.g) * kron(Apsi, m1);
}

struct PointerReadings {
    double ox = 0.0;
    double oy = 0.0;
};

// <|phi><phi| (x) sigma_x> and <|phi><phi| (x) sigma_y> in the joint state.
inline PointerReadings pointer_expectations(const Vec& joint, const Vec& phi)
{
    if (joint.size() != 2 * phi.size()) throw std::invalid_argument("pointer_expectations: dimension mismatch");
    if (std::abs(phi.norm() - 1.0) > 1e-10) throw std::invalid_argument("pointer_expectations: phi must be unit norm");
    const Mat P = phi * phi.adjoint();
    auto ev = [&](int k) { return joint.dot(kron(P, pauli(k)) * joint).real(); };
    return {ev(1), ev(2)};
}

inline cplx extract_element(double ox, double oy, double g, int sign)
{
    if (g == 0.0) throw std::invalid_argument("extract_element: g must be nonzero");
    return static_cast<double>(sign) * cplx(oy, -ox) / (-2.0 * g);
}

struct ElementPlan {
    int m = 0, n = 0;  // 0-based target element
    Vec phi;           // post-selected computational ket |n>
    std::string word;  // Pauli word of the weakly measured observable
    int sign = 1;
};

// Diagonals: (|k>, sigma_1z) with the sign of <k|sigma_1z|k>.
// Off-diagonals: (|n>, X-word on the differing bits), so A|n> = |m>.
inline ElementPlan dqst_plan(int m, int n, int n_qubits = 2)
{
    const int d = 1 << n_qubits;
    if (n_qubits < 1 || m < 0 || n < 0 || m >= d || n >= d || m > n)
        throw std::invalid_argument("dqst_plan: need 0 <= m <= n < 2^n_qubits");
    ElementPlan p;
    p.m = m;
    p.n = n;
    p.phi = basis_ket(n, d);
    p.word.assign(n_qubits, 'I');
    const int msb = 1 << (n_qubits - 1);
    if (m == n) {
        p.word[0] = 'Z';
        p.sign = (m & msb) ? -1 : 1;
    } else {
        const int diff = m ^ n;
        for (int q = 0; q < n_qubits; ++q)
            if (diff & (1 << (n_qubits - 1 - q))) p.word[q] = 'X';
    }
    return p;
}

namespace detail {

inline cplx weak_element(const Vec& psi, const ElementPlan& p, const WeakConfig& cfg)
{
    Vec joint = weak_evolve(psi, pauli_word(p.word), cfg);
    PointerReadings r = pointer_expectations(joint, p.phi);
    return extract_element(r.ox, r.oy, cfg.g, p.sign);
}

}  // namespace detail

// Requested entries (m <= n, 0-based) filled in, lower triangle by Hermitian
// completion, everything else zero. Mixed inputs are handled eigenstate by
// eigenstate.
inline DensityMatrix dqst(const DensityMatrix& truth, const std::vector<std::pair<int, int>>& elements,
                          const WeakConfig& cfg)
{
    check_weak(cfg);
    const int d = truth.dim();
    const int nq = qubits_for_dim(d);
    EigenH e = eigh(truth.mat);
    Mat out = Mat::Zero(d, d);
    for (const auto& [m, n] : elements) {
        ElementPlan p = dqst_plan(m, n, nq);
        cplx v = 0.0;
        for (Eigen::Index k = 0; k < e.values.size(); ++k) {
            if (e.values(k) <= kEigFloor) continue;
            v += e.values(k) * detail::weak_element(e.vectors.col(k), p, cfg);
        }
        if (m == n) {
            out(m, m) = v.real();
        } else {
            out(m, n) = v;
            out(n, m) = std::conj(v);
        }
    }
    return DensityMatrix{out, Status::raw};
}

inline std::vector<std::pair<int, int>> upper_elements(int d)
{
    std::vector<std::pair<int, int>> el;
    for (int m = 0; m < d; ++m)
        for (int n = m; n < d; ++n) el.emplace_back(m, n);
    return el;
}

// chi elements read off the Choi state rotated by U_chi.
inline ProcessMatrix dqpt(const Channel& ch, const std::vector<std::pair<int, int>>& elements, const WeakConfig& cfg)
{
    const int nq = qubits_for_dim(ch.dim());
    OperatorBasis b = pauli_basis(nq);
    DensityMatrix choi = choi_from_channel(ch);
    Mat u = u_chi(b);
    DensityMatrix rotated = make_state(u * choi.mat * u.adjoint());
    DensityMatrix raw = dqst(rotated, elements, cfg);
    return ProcessMatrix{nq, b, raw.mat, Status::raw};
}

inline DensityMatrix state_repair(const DensityMatrix& raw)
{
    if (!is_hermitian(raw.mat, 1e-8)) throw std::invalid_argument("state_repair: input must be Hermitian");
    return make_state(project_density(raw.mat));
}

inline ProcessMatrix process_repair(const ProcessMatrix& raw, const SolverConfig& cfg = {})
{
    return chi_repair(raw, cfg);
}

// Unitary U and measured spin for a two-qubit correlation, with
// U sigma_z(target) U^dag equal to the Pauli word.
struct WeakRotation {
    Mat U;
    int target = 0;
};

inline WeakRotation weak_rotation(const std::string& obs)
{
    if (obs.size() != 2) throw std::invalid_argument("weak_rotation: expects a two-qubit Pauli word");
    std::string w = obs;
    for (char& c : w) {
        pauli_index(c);
        c = static_cast<char>(std::toupper(c));
    }
    if (w == "II") throw std::invalid_argument("weak_rotation: identity has no readout");
    const cplx i(0, 1);
    const Mat I4 = Mat::Identity(4, 4);
    const Mat ZZ = pauli_word("ZZ");
    const Mat J = std::cos(M_PI / 4) * I4 - i * std::sin(M_PI / 4) * ZZ;  // exp(-i pi/4 Z(x)Z)
    auto r = [](char axis, int sign, int q) { return on_qubit(rot90(axis, sign), q, 2); };
    if (w == "IX") return {r('Y', 1, 1), 1};
    if (w == "IY") return {r('X', -1, 1), 1};
    if (w == "IZ") return {I4, 1};
    if (w == "XI") return {r('Y', 1, 0), 0};
    if (w == "YI") return {r('X', -1, 0), 0};
    if (w == "ZI") return {I4, 0};
    const Mat Y1 = r('Y', 1, 0);
    Mat core;
    switch (w[1]) {
    case 'X': core = r('Y', 1, 1) * J * Y1; break;
    case 'Y': core = r('X', -1, 1) * J * Y1; break;
    default: core = J * Y1; break;
    }
    Mat pre;
    switch (w[0]) {
    case 'X': pre = r('Z', -1, 0); break;
    case 'Y': pre = I4; break;
    default: pre = r('X', 1, 0); break;
    }
    return {pre * core, 0};
}

// ||exp(-i g Z(x)Z) - (I - i g Z(x)Z)||_2
inline double jcoupling_first_order_error(double g)
{
    const cplx i(0, 1);
    const Mat ZZ = pauli_word("ZZ");
    const Mat I4 = Mat::Identity(4, 4);
    Mat exact = std::cos(g) * I4 - i * std::sin(g) * ZZ;
    Mat first = I4 - i * g * ZZ;
    Eigen::JacobiSVD<Mat> svd(exact - first);
    return svd.singularValues()(0);
}

}  // namespace tomokit
