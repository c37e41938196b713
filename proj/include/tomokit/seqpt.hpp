#pragma once

#include <cctype>
#include <map>

#include "recon.hpp"

namespace tomokit {

struct TwoDesign {
    int dim = 0;
    std::vector<std::vector<Vec>> bases;

    int K() const
    {
        int k = 0;
        for (const auto& b : bases) k += static_cast<int>(b.size());
        return k;
    }

    std::vector<Vec> states() const
    {
        std::vector<Vec> out;
        for (const auto& b : bases) out.insert(out.end(), b.begin(), b.end());
        return out;
    }
};

// Five mutually unbiased bases of C^4.
inline TwoDesign mub_set(int D = 4)
{
    if (D != 4) throw std::invalid_argument("mub_set: only D = 4 is supported");
    const cplx i(0, 1);
    auto v = [](cplx a, cplx b, cplx c, cplx d) {
        Vec out(4);
        out << a, b, c, d;
        return Vec(out / 2.0);
    };
    TwoDesign t;
    t.dim = 4;
    std::vector<Vec> b1;
    for (int k = 0; k < 4; ++k) b1.push_back(basis_ket(k, 4));
    t.bases.push_back(b1);
    t.bases.push_back({v(1, 1, 1, 1), v(1, 1, -1, -1), v(1, -1, -1, 1), v(1, -1, 1, -1)});
    t.bases.push_back({v(1, i, i, -1), v(1, -i, i, 1), v(1, i, -i, 1), v(1, -i, -i, -1)});
    t.bases.push_back({v(1, -1, -i, -i), v(1, -1, i, i), v(1, 1, i, -i), v(1, 1, -i, i)});
    t.bases.push_back({v(1, -i, -1, -i), v(1, -i, 1, i), v(1, i, -1, i), v(1, i, 1, -i)});
    return t;
}

namespace detail {

inline void check_indices(int a, int b, const OperatorBasis& basis)
{
    if (a < 0 || b < 0 || a >= basis.size() || b >= basis.size())
        throw std::invalid_argument("basis index out of range");
}

// (1/K) sum_j Tr[rho_j Lambda(X_j)] with X_j = L rho_j R
inline cplx design_average(const Channel& ch, const Mat& L, const Mat& R, const TwoDesign& design)
{
    if (ch.dim() != design.dim) throw std::invalid_argument("channel and design dimensions differ");
    cplx acc = 0.0;
    for (const Vec& phi : design.states()) {
        Mat rho = phi * phi.adjoint();
        acc += (rho * apply_map(ch, L * rho * R)).trace();
    }
    return acc / static_cast<double>(design.K());
}

}  // namespace detail

// F_ab = (1/K) sum_j Tr[rho_j Lambda(E_a^dag rho_j E_b)]
inline cplx survival_avg(const Channel& ch, int a, int b, const TwoDesign& design, const OperatorBasis& basis)
{
    detail::check_indices(a, b, basis);
    return detail::design_average(ch, basis.ops[a].adjoint(), basis.ops[b], design);
}

inline cplx survival_avg(const Channel& ch, int a, int b, const TwoDesign& design)
{
    return survival_avg(ch, a, b, design, pauli_basis(qubits_for_dim(design.dim)));
}

inline cplx chi_from_survival(cplx F, int D, bool diagonal)
{
    if (D < 2) throw std::invalid_argument("chi_from_survival: D must be >= 2");
    return (static_cast<double>(D + 1) * F - (diagonal ? 1.0 : 0.0)) / static_cast<double>(D);
}

// Re F from (E_a +- E_b)/sqrt2 preparations, Im F from (E_a +- i E_b)/sqrt2.
inline cplx seqpt_standard_estimate(const Channel& ch, int a, int b, const TwoDesign& design,
                                    const OperatorBasis& basis)
{
    detail::check_indices(a, b, basis);
    const Mat& Ea = basis.ops[a];
    const Mat& Eb = basis.ops[b];
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i(0, 1);
    auto G = [&](const Mat& O) { return detail::design_average(ch, O.adjoint(), O, design).real(); };
    const double gp = G(r * (Ea + Eb)), gm = G(r * (Ea - Eb));
    const double gpi = G(r * (Ea + i * Eb)), gmi = G(r * (Ea - i * Eb));
    cplx F((gp - gm) / 2.0, (gmi - gpi) / 2.0);
    return chi_from_survival(F, design.dim, a == b);
}

inline cplx seqpt_standard_estimate(const Channel& ch, int a, int b, const TwoDesign& design)
{
    return seqpt_standard_estimate(ch, a, b, design, pauli_basis(qubits_for_dim(design.dim)));
}

struct SelectivePlan {
    int a = 0, b = 0;
    int D = 0, K = 0;
    std::vector<std::vector<cplx>> c;  // c[j][i] = Tr[(E_a^dag rho_j E_b) E_i] / D
    std::vector<std::vector<cplx>> e;  // e[j][k] = Tr[rho_j E_k] / D
    std::map<std::pair<int, int>, cplx> beta;  // (k, i) -> sum_j e_k c_i, |beta| > 1e-14
};

inline SelectivePlan build_plan(int a, int b, const TwoDesign& design, const OperatorBasis& basis)
{
    detail::check_indices(a, b, basis);
    if (basis.dim != design.dim) throw std::invalid_argument("build_plan: dimension mismatch");
    SelectivePlan p;
    p.a = a;
    p.b = b;
    p.D = design.dim;
    p.K = design.K();
    const int n = basis.size();
    const double D = p.D;
    std::map<std::pair<int, int>, cplx> acc;
    for (const Vec& phi : design.states()) {
        Mat rho = phi * phi.adjoint();
        Mat X = basis.ops[a].adjoint() * rho * basis.ops[b];
        std::vector<cplx> cj(n), ej(n);
        for (int i = 0; i < n; ++i) {
            cj[i] = (X * basis.ops[i]).trace() / D;
            ej[i] = (rho * basis.ops[i]).trace() / D;
        }
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) acc[{k, i}] += ej[k] * cj[i];
        p.c.push_back(std::move(cj));
        p.e.push_back(std::move(ej));
    }
    for (const auto& [key, w] : acc)
        if (std::abs(w) > 1e-14) p.beta[key] = w;
    return p;
}

// <E_k^i> = Tr[E_k Lambda(E_i)]; `known` marks entries that were measured.
struct ExpectationTable {
    RMat values;
    std::vector<std::vector<bool>> known;

    bool has(int k, int i) const { return known[k][i]; }
};

// Table row `k` is the observable, column `i` the input operator.
inline ExpectationTable exact_expectations(const Channel& ch, const OperatorBasis& basis)
{
    const int n = basis.size();
    ExpectationTable t{RMat::Zero(n, n), std::vector<std::vector<bool>>(n, std::vector<bool>(n, true))};
    for (int i = 0; i < n; ++i) {
        Mat out = apply_map(ch, basis.ops[i]);
        for (int k = 0; k < n; ++k) t.values(k, i) = (basis.ops[k] * out).trace().real();
    }
    return t;
}

inline cplx msqpt_estimate(const ExpectationTable& table, const SelectivePlan& plan)
{
    cplx F = 0.0;
    for (const auto& [key, w] : plan.beta) {
        const auto [k, i] = key;
        if (k >= table.values.rows() || i >= table.values.cols() || !table.has(k, i))
            throw std::invalid_argument("msqpt_estimate: missing expectation <E_" + std::to_string(k) + "^" +
                                        std::to_string(i) + ">");
        F += w * table.values(k, i);
    }
    F /= static_cast<double>(plan.K);
    return chi_from_survival(F, plan.D, plan.a == plan.b);
}

// Rotation U with U^dag sigma_z(target) U equal to a two-qubit Pauli observable.
struct LocalMeasurement {
    Mat U;
    int target = 0;  // 0 = first qubit
};

inline LocalMeasurement local_map(const std::string& obs)
{
    if (obs.size() != 2) throw std::invalid_argument("local_map: expects a two-qubit Pauli word");
    for (char c : obs) pauli_index(c);
    std::string w = obs;
    for (char& c : w) c = static_cast<char>(std::toupper(c));
    if (w == "II") throw std::invalid_argument("local_map: identity has no readout");
    const Mat C = cnot();
    auto r = [](char axis, int sign, int q) { return on_qubit(rot90(axis, sign), q, 2); };
    const Mat I4 = Mat::Identity(4, 4);
    static const std::map<std::string, int> target{
        {"IX", 1}, {"IY", 1}, {"IZ", 1}, {"XI", 0}, {"XX", 1}, {"XY", 1}, {"XZ", 1}, {"YI", 0},
        {"YX", 1}, {"YY", 1}, {"YZ", 1}, {"ZI", 0}, {"ZX", 1}, {"ZY", 1}, {"ZZ", 1}};
    Mat U;
    if (w == "IX") U = r('Y', -1, 1);
    else if (w == "IY") U = r('X', 1, 1);
    else if (w == "IZ") U = I4;
    else if (w == "XI") U = r('Y', -1, 0);
    else if (w == "XX") U = C * r('Y', 1, 1) * r('Y', 1, 0);
    else if (w == "XY") U = C * r('X', -1, 1) * r('Y', 1, 0);
    else if (w == "XZ") U = C * r('Y', -1, 0);
    else if (w == "YI") U = r('X', 1, 0);
    else if (w == "YX") U = C * r('Y', -1, 1) * r('X', 1, 0);
    else if (w == "YY") U = C * r('X', -1, 1) * r('X', -1, 0);
    else if (w == "YZ") U = C * r('X', 1, 0);
    else if (w == "ZI") U = I4;
    else if (w == "ZX") U = C * r('Y', -1, 1);
    else if (w == "ZY") U = C * r('X', 1, 1);
    else U = C;  // ZZ
    return {U, target.at(w)};
}

inline double local_readout(const LocalMeasurement& lm, const Mat& rho)
{
    Mat z = on_qubit(pauli(3), lm.target, 2);
    return (z * lm.U * rho * lm.U.adjoint()).trace().real();
}

// Expectation table measured the way an experiment would: prepare
// rho_i = (I + E_i)/D (rho_0 = I/D), read each E_k, then undo the
// preparation offsets. Two-qubit observables go through local_map.
// Only entries with `needed[k][i]` are filled; sigma adds Gaussian noise
// to each readout.
inline ExpectationTable measured_expectations(const Channel& ch, const OperatorBasis& basis,
                                              const std::vector<std::vector<bool>>& needed, double sigma,
                                              std::uint64_t seed)
{
    if (sigma < 0) throw std::invalid_argument("measured_expectations: sigma must be >= 0");
    const int n = basis.size();
    const int d = basis.dim;
    const int nq = qubits_for_dim(d);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma > 0 ? sigma : 1.0);
    auto read = [&](int k, const Mat& out) {
        double v = 0.0;
        if (k == 0) v = out.trace().real();
        else if (nq == 2) v = local_readout(local_map(pauli_label(k, 2)), out);
        else v = (basis.ops[k] * out).trace().real();
        return sigma > 0 ? v + g(rng) : v;
    };
    std::vector<bool> need_k(n, false), need_i(n, false);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (needed[k][i]) need_k[k] = need_i[i] = true;
    // the identity input is needed to undo offsets for every measured observable
    RVec m0 = RVec::Zero(n);
    Mat out0 = apply_map(ch, Mat::Identity(d, d) / static_cast<double>(d));
    for (int k = 0; k < n; ++k)
        if (need_k[k]) m0(k) = read(k, out0);
    ExpectationTable t{RMat::Zero(n, n), std::vector<std::vector<bool>>(n, std::vector<bool>(n, false))};
    for (int i = 0; i < n; ++i) {
        if (!need_i[i]) continue;
        Mat out = i == 0 ? out0 : apply_map(ch, basis_state_density(basis.ops[i], d).mat);
        for (int k = 0; k < n; ++k) {
            if (!needed[k][i]) continue;
            const double mk = i == 0 ? m0(k) : read(k, out);
            t.values(k, i) = i == 0 ? d * m0(k) : d * (mk - m0(k));
            t.known[k][i] = true;
        }
    }
    return t;
}

inline std::vector<std::vector<bool>> plan_mask(const std::vector<SelectivePlan>& plans, int n)
{
    std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
    for (const auto& p : plans)
        for (const auto& kv : p.beta) m[kv.first.first][kv.first.second] = true;
    return m;
}

// Elementwise-complete MSQPT: every chi_ab from its own plan.
inline ProcessMatrix msqpt_full(const ExpectationTable& table, const TwoDesign& design, const OperatorBasis& basis)
{
    const int n = basis.size();
    Mat chi(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            chi(a, b) = msqpt_estimate(table, build_plan(a, b, design, basis));
            chi(b, a) = std::conj(chi(a, b));
        }
    for (int a = 0; a < n; ++a) chi(a, a) = chi(a, a).real();
    return make_process(basis, chi);
}

// sqrt((1/N)(1 - (N-1)/(K-1))): spread of an N-state subsample of a K-state design.
inline double sampling_error(int N, int K)
{
    if (K < 2 || N < 1 || N > K) throw std::invalid_argument("sampling_error: need 1 <= N <= K, K >= 2");
    const double v = (1.0 / N) * (1.0 - static_cast<double>(N - 1) / (K - 1));
    return std::sqrt(std::max(0.0, v));
}

}  // namespace tomokit
