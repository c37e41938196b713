#pragma once

#include <set>

#include "linalg.hpp"

namespace tomokit {

// ---------------------------------------------------------------- states

inline bool state_is_valid(const Mat& m, double tol = kPsdTol)
{
    if (!is_hermitian(m, 1e-10)) return false;
    if (std::abs(m.trace() - cplx(1.0)) > tol) return false;
    return eigenvalues(m).minCoeff() >= -tol;
}

// Wrap a matrix, deciding the status flag from its spectrum.
inline DensityMatrix make_state(Mat m)
{
    if (m.rows() != m.cols()) throw std::invalid_argument("density matrix must be square");
    qubits_for_dim(static_cast<int>(m.rows()));
    Status s = state_is_valid(m) ? Status::valid : Status::raw;
    return DensityMatrix{std::move(m), s};
}

inline DensityMatrix pure_state(const Vec& psi)
{
    Vec v = psi / psi.norm();
    return make_state(v * v.adjoint());
}

inline Vec basis_ket(int index, int dim)
{
    Vec v = Vec::Zero(dim);
    v(index) = 1.0;
    return v;
}

// ---------------------------------------------------------------- gates

inline Mat cnot()
{
    Mat u = Mat::Zero(4, 4);
    u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
    return u;
}

inline Mat hadamard()
{
    Mat h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

// ---------------------------------------------------------------- bases

inline void check_orthogonality(const OperatorBasis& b, double tol = 1e-10)
{
    for (int m = 0; m < b.size(); ++m)
        for (int n = m; n < b.size(); ++n) {
            cplx t = (b.ops[m] * b.ops[n].adjoint()).trace();
            cplx want = m == n ? cplx(b.dim) : cplx(0);
            if (std::abs(t - want) > tol) throw std::logic_error("basis is not orthogonal");
        }
}

inline OperatorBasis pauli_basis(int n)
{
    if (n < 1 || n > 5) throw std::invalid_argument("pauli_basis: n must be in 1..5");
    OperatorBasis b;
    b.dim = 1 << n;
    b.kind = BasisKind::pauli;
    const int count = 1 << (2 * n);
    b.ops.reserve(count);
    for (int i = 0; i < count; ++i) b.ops.push_back(pauli_word(pauli_label(i, n)));
    return b;
}

inline OperatorBasis pauli_error_basis(const Mat& U)
{
    if (!is_unitary(U)) throw std::invalid_argument("pauli_error_basis: U is not unitary");
    OperatorBasis b = pauli_basis(qubits_for_dim(static_cast<int>(U.rows())));
    for (auto& op : b.ops) op = U * op;
    b.kind = BasisKind::pauli_error;
    b.U = U;
    return b;
}

// ---------------------------------------------------------------- Kraus

inline double completeness_defect(const std::vector<Mat>& ops, int d)
{
    Mat s = Mat::Zero(d, d);
    for (const auto& a : ops) s += a.adjoint() * a;
    return max_abs(s - Mat::Identity(d, d));
}

inline KrausSet make_kraus(std::vector<Mat> ops)
{
    if (ops.empty()) throw std::invalid_argument("empty Kraus list");
    KrausSet k;
    k.dim = static_cast<int>(ops.front().rows());
    for (const auto& a : ops)
        if (a.rows() != k.dim || a.cols() != k.dim) throw std::invalid_argument("Kraus operators must share one square shape");
    k.completeness_defect = completeness_defect(ops, k.dim);
    k.ops = std::move(ops);
    return k;
}

inline KrausSet tensor(const KrausSet& a, const KrausSet& b)
{
    std::vector<Mat> ops;
    for (const auto& x : a.ops)
        for (const auto& y : b.ops) ops.push_back(kron(x, y));
    return make_kraus(std::move(ops));
}

// ---------------------------------------------------------------- channels

// sum_mn chi_mn E_m X E_n^dag
inline Mat chi_apply(const ProcessMatrix& p, const Mat& x)
{
    const auto& E = p.basis.ops;
    const int d = p.basis.dim;
    Mat out = Mat::Zero(d, d);
    for (int n = 0; n < p.basis.size(); ++n) {
        Mat xe = x * E[n].adjoint();
        Mat acc = Mat::Zero(d, d);
        for (int m = 0; m < p.basis.size(); ++m) {
            cplx c = p.mat(m, n);
            if (c != cplx(0)) acc += c * E[m];
        }
        out += acc * xe;
    }
    return out;
}

// Action of the channel on an arbitrary (not necessarily Hermitian) operator.
inline Mat apply_map(const Channel& ch, const Mat& x)
{
    if (x.rows() != ch.dim() || x.cols() != ch.dim()) throw std::invalid_argument("apply_map: dimension mismatch");
    struct V {
        const Mat& x;
        Mat operator()(const UnitaryOp& u) const { return u.U * x * u.U.adjoint(); }
        Mat operator()(const KrausSet& k) const
        {
            Mat out = Mat::Zero(x.rows(), x.cols());
            for (const auto& a : k.ops) out += a * x * a.adjoint();
            return out;
        }
        Mat operator()(const ProcessMatrix& p) const { return chi_apply(p, x); }
        Mat operator()(const Superoperator& s) const { return unvec_col(s.mat * vec_col(x), x.rows()); }
    };
    return std::visit(V{x}, ch.rep);
}

inline DensityMatrix apply_channel(const Channel& ch, const DensityMatrix& rho, bool allow_non_tp = false)
{
    if (rho.dim() != ch.dim()) throw std::invalid_argument("apply_channel: dimension mismatch");
    if (auto* k = std::get_if<KrausSet>(&ch.rep); k && !allow_non_tp && k->completeness_defect > 1e-6)
        throw std::invalid_argument("apply_channel: Kraus set is not trace preserving (defect " +
                                    std::to_string(k->completeness_defect) + ")");
    Mat out = apply_map(ch, rho.mat);
    out = 0.5 * (out + out.adjoint());
    return make_state(std::move(out));
}

// Superoperator (column stacking) of any channel.
inline Superoperator superop_from_channel(const Channel& ch)
{
    const int d = ch.dim();
    Superoperator s{Mat::Zero(d * d, d * d)};
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            Mat e = Mat::Zero(d, d);
            e(i, j) = 1.0;
            s.mat.col(j * d + i) = vec_col(apply_map(ch, e));
        }
    return s;
}

inline Mat tp_operator(const ProcessMatrix& p)
{
    const auto& E = p.basis.ops;
    const int d = p.basis.dim;
    Mat s = Mat::Zero(d, d);
    for (int m = 0; m < p.basis.size(); ++m)
        for (int n = 0; n < p.basis.size(); ++n)
            if (p.mat(m, n) != cplx(0)) s += p.mat(m, n) * E[n].adjoint() * E[m];
    return s;
}

// || sum_mn chi_mn E_n^dag E_m - I ||_inf
inline double tp_residual(const ProcessMatrix& p)
{
    return max_abs(tp_operator(p) - Mat::Identity(p.basis.dim, p.basis.dim));
}

inline Status classify_chi(const ProcessMatrix& p)
{
    if (!is_hermitian(p.mat, 1e-10)) return Status::raw;
    if (eigenvalues(p.mat).minCoeff() < -kPsdTol) return Status::raw;
    return tp_residual(p) <= kPsdTol ? Status::valid : Status::raw;
}

inline ProcessMatrix make_process(const OperatorBasis& basis, Mat chi)
{
    if (chi.rows() != basis.size() || chi.cols() != basis.size()) throw std::invalid_argument("chi shape does not match basis");
    ProcessMatrix p{qubits_for_dim(basis.dim), basis, std::move(chi), Status::raw};
    p.status = classify_chi(p);
    return p;
}

// Expansion coefficients a_m = Tr(E_m^dag A) / d.
inline Vec basis_coefficients(const Mat& a, const OperatorBasis& basis)
{
    Vec c(basis.size());
    for (int m = 0; m < basis.size(); ++m) c(m) = (basis.ops[m].adjoint() * a).trace() / double(basis.dim);
    return c;
}

inline ProcessMatrix chi_from_kraus(const KrausSet& ks, const OperatorBasis& basis)
{
    if (ks.dim != basis.dim) throw std::invalid_argument("chi_from_kraus: dimension mismatch");
    Mat chi = Mat::Zero(basis.size(), basis.size());
    for (const auto& a : ks.ops) {
        Vec c = basis_coefficients(a, basis);
        chi += c * c.adjoint();
    }
    return make_process(basis, std::move(chi));
}

inline ProcessMatrix chi_from_unitary(const Mat& U, const OperatorBasis& basis)
{
    return chi_from_kraus(make_kraus({U}), basis);
}

// A_i = sqrt(d_i) sum_j V_ji E_j, largest eigenvalue first.
inline KrausSet kraus_from_chi(const ProcessMatrix& p)
{
    EigenH e = eigh(p.mat);
    if (e.values.minCoeff() < -kPsdTol)
        throw std::domain_error("kraus_from_chi: chi is not PSD (min eigenvalue " + std::to_string(e.values.minCoeff()) +
                                "); repair first");
    const int d = p.basis.dim;
    std::vector<Mat> ops;
    for (Eigen::Index k = e.values.size() - 1; k >= 0; --k) {
        if (e.values(k) < kEigFloor) continue;
        Mat a = Mat::Zero(d, d);
        for (int j = 0; j < p.basis.size(); ++j) a += e.vectors(j, k) * p.basis.ops[j];
        ops.push_back(std::sqrt(e.values(k)) * a);
    }
    if (ops.empty()) ops.push_back(Mat::Zero(d, d));
    return make_kraus(std::move(ops));
}

// Rows vec(E_j)^dag / sqrt(d): maps the Choi state onto chi in that basis.
inline Mat u_chi(const OperatorBasis& basis)
{
    const int d = basis.dim;
    Mat u(basis.size(), d * d);
    for (int j = 0; j < basis.size(); ++j) u.row(j) = vec_col(basis.ops[j]).adjoint() / std::sqrt(double(d));
    return u;
}

// (I (x) Lambda)|Phi><Phi| with |Phi> = d^{-1/2} sum_m |m>|m>.
inline DensityMatrix choi_from_channel(const Channel& ch)
{
    const int d = ch.dim();
    Superoperator s = superop_from_channel(ch);
    // TP check: Tr Lambda(|i><j|) = delta_ij
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            cplx tr = 0;
            for (int k = 0; k < d; ++k) tr += s.mat(k * d + k, j * d + i);
            if (std::abs(tr - cplx(i == j ? 1.0 : 0.0)) > 1e-8)
                throw std::invalid_argument("choi_from_channel: channel is not trace preserving");
        }
    Mat choi = Mat::Zero(d * d, d * d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
            Mat img = unvec_col(s.mat.col(n * d + m), d);  // Lambda(|m><n|)
            choi.block(m * d, n * d, d, d) = img / double(d);
        }
    return make_state(std::move(choi));
}

inline ProcessMatrix chi_from_choi(const DensityMatrix& choi, int n)
{
    OperatorBasis b = pauli_basis(n);
    if (choi.dim() != b.dim * b.dim) throw std::invalid_argument("chi_from_choi: Choi dimension must be 4^n");
    Mat u = u_chi(b);
    return make_process(b, u * choi.mat * u.adjoint());
}

// ---------------------------------------------------------------- states from basis ops

// (E + I)/d for a traceless Hermitian Pauli word E. Identity input yields I/d
// with *identity_input set.
inline DensityMatrix basis_state_density(const Mat& E, int d, bool* identity_input = nullptr)
{
    if (E.rows() != d || E.cols() != d) throw std::invalid_argument("basis_state_density: dimension mismatch");
    const Mat I = Mat::Identity(d, d);
    if (identity_input) *identity_input = false;
    if (max_abs(E - I) < 1e-12) {
        if (identity_input) *identity_input = true;
        return make_state(I / double(d));
    }
    if (!is_hermitian(E) || std::abs(E.trace()) > 1e-10 || max_abs(E * E - I) > 1e-10)
        throw std::invalid_argument("basis_state_density: expected a traceless Hermitian Pauli word");
    return make_state((E + I) / double(d));
}

struct Purification {
    Vec psi;  // system (x) ancilla, ancilla index fastest
    int ancilla_qubits = 0;
};

inline Purification purify_with_ancilla(const DensityMatrix& M)
{
    EigenH e = eigh(M.mat);
    if (e.values.minCoeff() < -kPsdTol) throw std::invalid_argument("purify_with_ancilla: input is not PSD");
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = e.values.size() - 1; k >= 0; --k)
        if (e.values(k) > kEigFloor) keep.push_back(k);
    int qa = 0;
    while ((1 << qa) < static_cast<int>(keep.size())) ++qa;
    const int da = 1 << qa;
    Vec psi = Vec::Zero(M.dim() * da);
    for (size_t a = 0; a < keep.size(); ++a) {
        const Eigen::Index k = keep[a];
        psi += std::sqrt(e.values(k)) * kron(Vec(e.vectors.col(k)), basis_ket(static_cast<int>(a), da));
    }
    return Purification{psi, qa};
}

// Reduced state on the listed qubits (0-based, leftmost = 0).
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<int>& keep)
{
    const int n = qubits_for_dim(rho.dim());
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    for (int q : keep)
        if (q < 0 || q >= n) throw std::invalid_argument("partial_trace: qubit index out of range");
    std::vector<int> kept(keep.begin(), keep.end()), traced;
    for (int q = 0; q < n; ++q)
        if (!keep.count(q)) traced.push_back(q);
    const int dk = 1 << kept.size(), dt = 1 << traced.size();
    auto compose = [&](int a, int b) {
        int idx = 0;
        for (size_t i = 0; i < kept.size(); ++i)
            if (a >> (kept.size() - 1 - i) & 1) idx |= 1 << (n - 1 - kept[i]);
        for (size_t i = 0; i < traced.size(); ++i)
            if (b >> (traced.size() - 1 - i) & 1) idx |= 1 << (n - 1 - traced[i]);
        return idx;
    };
    Mat out = Mat::Zero(dk, dk);
    for (int i = 0; i < dk; ++i)
        for (int j = 0; j < dk; ++j)
            for (int t = 0; t < dt; ++t) out(i, j) += rho.mat(compose(i, t), compose(j, t));
    return make_state(std::move(out));
}

// Reduced state of a pure joint vector, tracing the trailing `traced_qubits`.
inline Mat trace_out_last(const Vec& psi, int traced_qubits)
{
    const Eigen::Index da = Eigen::Index(1) << traced_qubits;
    const Eigen::Index ds = psi.size() / da;
    // rows = system index, cols = ancilla index
    Mat m = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(psi.data(), ds, da);
    return m * m.adjoint();
}

}  // namespace tomokit
