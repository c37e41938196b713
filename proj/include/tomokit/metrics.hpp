#pragma once

#include "qcore.hpp"

namespace tomokit {

enum class FidelityKind { trace_norm, uhlmann_jozsa, state_deviation };

struct FidelityReport {
    double value = 0.0;
    FidelityKind kind = FidelityKind::trace_norm;
    RVec eig_a, eig_b;  // ascending
};

// |Tr(a b^dag)| / sqrt(Tr(a^dag a) Tr(b^dag b)); used for states and chi alike.
inline double trace_fidelity(const Mat& a, const Mat& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("trace_fidelity: dimension mismatch");
    const double na = a.squaredNorm(), nb = b.squaredNorm();
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("trace_fidelity: zero matrix");
    cplx ov = (a.array() * b.conjugate().array()).sum();
    return std::min(1.0, std::abs(ov) / std::sqrt(na * nb));
}

inline double trace_fidelity(const ProcessMatrix& a, const ProcessMatrix& b) { return trace_fidelity(a.mat, b.mat); }
inline double trace_fidelity(const DensityMatrix& a, const DensityMatrix& b) { return trace_fidelity(a.mat, b.mat); }

// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2
inline double uj_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma)
{
    if (rho.dim() != sigma.dim()) throw std::invalid_argument("uj_fidelity: dimension mismatch");
    if (!state_is_valid(rho.mat) || !state_is_valid(sigma.mat))
        throw std::invalid_argument("uj_fidelity: inputs must be valid density matrices");
    Mat s = sqrt_psd(rho.mat);
    Mat inner = s * sigma.mat * s;
    RVec ev = eigenvalues(inner);
    double tr = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) tr += ev(i) > kEigFloor ? std::sqrt(ev(i)) : 0.0;
    return std::clamp(tr * tr, 0.0, 1.0);
}

// sum_ij |pred_ij - ideal_ij|^2 / d^2
inline double state_deviation(const Mat& pred, const Mat& ideal)
{
    if (pred.rows() != ideal.rows() || pred.cols() != ideal.cols())
        throw std::invalid_argument("state_deviation: dimension mismatch");
    const double d = static_cast<double>(pred.rows());
    return (pred - ideal).squaredNorm() / (d * d);
}

inline FidelityReport fidelity_report(const Mat& a, const Mat& b, FidelityKind kind)
{
    FidelityReport r;
    r.kind = kind;
    switch (kind) {
    case FidelityKind::trace_norm: r.value = trace_fidelity(a, b); break;
    case FidelityKind::uhlmann_jozsa: r.value = uj_fidelity(make_state(a), make_state(b)); break;
    case FidelityKind::state_deviation: r.value = state_deviation(a, b); break;
    }
    r.eig_a = eigenvalues(a);
    r.eig_b = eigenvalues(b);
    return r;
}

// Sample standard deviation (N-1 denominator).
inline double spread(const std::vector<double>& v)
{
    if (v.size() < 2) throw std::invalid_argument("spread: need at least two values");
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double mean(const std::vector<double>& v)
{
    if (v.empty()) throw std::invalid_argument("mean: empty list");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace tomokit
