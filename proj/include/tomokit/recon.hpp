#pragma once

#include <optional>

#include "expdesign.hpp"

namespace tomokit {

struct SolverConfig {
    int max_iters = 10000;
    double rel_tol = 1e-9;  // |f_k - f_{k-1}| <= rel_tol * max(1, f_k)
    double psd_tol = 1e-8;
    std::optional<double> epsilon;  // CS noise bound; default = residual of the linear solution
    int dykstra_max_iters = 20000;
    double dykstra_tol = 1e-12;
    double admm_rho = 1.0;
    double admm_tol = 1e-6;  // relative primal/dual residual
};

template <typename Estimate>
struct ReconResult {
    Estimate estimate;
    double objective = 0.0;  // ||A x - b||_2 (qst/qpt) or l1 norm (cs)
    int iterations = 0;
    bool converged = false;
    bool rank_deficient = false;
    double feasibility_gap = 0.0;  // cs only: max(0, ||residual|| - eps)
    RVec eigen_summary;            // ascending
    std::vector<double> history;   // objective per iteration (cco)
};

using StateResult = ReconResult<DensityMatrix>;
using ProcessResult = ReconResult<ProcessMatrix>;

namespace detail {

// Isometric coordinates: y = s .* x, so ||y|| equals the Frobenius norm.
inline Mat iso_to_herm(const RVec& y, const RVec& s) { return params_to_herm(y.cwiseQuotient(s)); }
inline RVec herm_to_iso(const Mat& h, const RVec& s) { return herm_to_params(h).cwiseProduct(s); }

inline RVec min_norm_solve(const RMat& a, const RVec& b, bool* deficient = nullptr)
{
    Eigen::CompleteOrthogonalDecomposition<RMat> cod(a);
    cod.setThreshold(1e-10);
    if (deficient) *deficient = cod.rank() < a.cols();
    return cod.solve(b);
}

inline double spectral_norm_sq(const RMat& a)
{
    Eigen::SelfAdjointEigenSolver<RMat> es(a.transpose() * a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

}  // namespace detail

// Affine TP set {sum chi_mn E_n^dag E_m = I} in isometric chi coordinates,
// with the closed-form projection v - C^T (C C^T)^+ (C v - c).
struct TpConstraint {
    RMat C;
    RVec c;
    RMat pinv_t;  // C^T (C C^T)^+
    RVec scale;

    explicit TpConstraint(const OperatorBasis& b)
    {
        const int N = b.size() * b.size();
        scale = iso_scale(b.size());
        const int d = b.dim;
        C = RMat::Zero(d * d, N);
        for (int p = 0; p < N; ++p) {
            ProcessMatrix pm{0, b, param_basis(b.size(), p) / scale(p), Status::raw};
            C.col(p) = herm_to_params(tp_operator(pm));
        }
        c = herm_to_params(Mat::Identity(d, d));
        Eigen::CompleteOrthogonalDecomposition<RMat> cod(C * C.transpose());
        pinv_t = C.transpose() * cod.pseudoInverse();
    }

    RVec project(const RVec& v) const { return v - pinv_t * (C * v - c); }
    double residual(const RVec& v) const { return (C * v - c).cwiseAbs().maxCoeff(); }
};

struct DykstraStats {
    int iterations = 0;
    bool converged = false;
};

// Projection onto PSD intersect TP by Dykstra alternation (last step affine).
inline RVec project_psd_tp(const RVec& v, const TpConstraint& tp, int max_iters = 20000, double tol = 1e-12,
                           DykstraStats* stats = nullptr)
{
    RVec x = v;
    RVec p = RVec::Zero(v.size()), q = RVec::Zero(v.size());
    DykstraStats st;
    for (int k = 0; k < max_iters; ++k) {
        RVec y = detail::herm_to_iso(project_psd(detail::iso_to_herm(x + p, tp.scale)), tp.scale);
        p = x + p - y;
        RVec xn = tp.project(y + q);
        q = y + q - xn;
        const double change = (xn - x).norm();
        x = std::move(xn);
        st.iterations = k + 1;
        if (change <= tol * std::max(1.0, x.norm())) {
            if (eigenvalues(detail::iso_to_herm(x, tp.scale)).minCoeff() >= -1e-10) {
                st.converged = true;
                break;
            }
        }
    }
    if (stats) *stats = st;
    return x;
}

// ---------------------------------------------------------------- linear

inline StateResult qst_linear(const TomographyDesign& des, const DataVector& data)
{
    if (data.values.size() == 0) throw std::invalid_argument("qst_linear: empty data");
    if (des.mode != Mode::qst) throw std::invalid_argument("qst_linear: expected a QST design");
    if (data.values.size() != des.rows()) throw std::invalid_argument("qst_linear: data length mismatch");
    StateResult r;
    RVec x = detail::min_norm_solve(des.coeff, data.values, &r.rank_deficient);
    r.estimate = make_state(params_to_herm(x));
    r.objective = (des.coeff * x - data.values).norm();
    r.converged = true;
    r.eigen_summary = eigenvalues(r.estimate.mat);
    return r;
}

inline ProcessResult qpt_linear(const TomographyDesign& des, const DataVector& data)
{
    if (data.values.size() == 0) throw std::invalid_argument("qpt_linear: empty data");
    if (des.mode != Mode::qpt) throw std::invalid_argument("qpt_linear: expected a QPT design");
    if (data.values.size() != des.rows()) throw std::invalid_argument("qpt_linear: data length mismatch");
    ProcessResult r;
    RVec x = detail::min_norm_solve(des.coeff, data.values, &r.rank_deficient);
    r.estimate = make_process(des.basis, params_to_herm(x));
    r.objective = (des.coeff * x - data.values).norm();
    r.converged = true;
    r.eigen_summary = eigenvalues(r.estimate.mat);
    return r;
}

// ---------------------------------------------------------------- CCO

namespace detail {

// Monotone FISTA on 0.5||A y - b||^2 over a closed convex set given by `proj`.
template <typename Proj>
RVec mfista(const RMat& A, const RVec& b, RVec x, Proj proj, const SolverConfig& cfg, int& iters, bool& converged,
            std::vector<double>& hist)
{
    const RMat G = A.transpose() * A;
    const RVec Atb = A.transpose() * b;
    const double L = std::max(spectral_norm_sq(A), 1e-300);
    auto f = [&](const RVec& y) { return 0.5 * (A * y - b).squaredNorm(); };
    RVec z = x;
    double fx = f(x), t = 1.0;
    constexpr int window = 10;
    std::vector<double> fs{fx};
    converged = false;
    hist.clear();
    hist.push_back(std::sqrt(2 * fx));
    for (iters = 1; iters <= cfg.max_iters; ++iters) {
        RVec u = proj(RVec(z - (G * z - Atb) / L));
        const double fu = f(u);
        RVec xn = fu <= fx ? u : x;
        const double fn = std::min(fu, fx);
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        z = xn + (t / tn) * (u - xn) + ((t - 1.0) / tn) * (xn - x);
        x = std::move(xn);
        fx = fn;
        t = tn;
        fs.push_back(fx);
        hist.push_back(std::sqrt(2 * fx));
        // decrease over the last `window` iterations, relative with a unit floor
        const bool flat = iters >= window && fs[iters - window] - fx <= cfg.rel_tol * std::max(1.0, fx);
        if (flat || fx <= 1e-28) {
            converged = true;
            break;
        }
    }
    if (iters > cfg.max_iters) iters = cfg.max_iters;
    return x;
}

}  // namespace detail

// min ||A x - B|| over {rho >= 0, Tr rho = 1}.
inline StateResult qst_cco(const TomographyDesign& des, const DataVector& data, const SolverConfig& cfg = {})
{
    StateResult lin = qst_linear(des, data);
    const int d = 1 << des.n_qubits;
    const RVec s = iso_scale(d);
    const RMat A = des.coeff * s.cwiseInverse().asDiagonal();
    auto proj = [&](const RVec& y) { return detail::herm_to_iso(project_density(detail::iso_to_herm(y, s)), s); };
    RVec y0 = proj(detail::herm_to_iso(lin.estimate.mat, s));
    StateResult r;
    r.rank_deficient = lin.rank_deficient;
    RVec y = detail::mfista(A, data.values, y0, proj, cfg, r.iterations, r.converged, r.history);
    Mat rho = detail::iso_to_herm(y, s);
    r.estimate = DensityMatrix{rho, state_is_valid(rho, cfg.psd_tol) ? Status::valid : Status::raw};
    r.objective = (A * y - data.values).norm();
    r.eigen_summary = eigenvalues(rho);
    return r;
}

// Nearest valid chi (PSD and TP) in the Frobenius norm.
inline ProcessMatrix chi_repair(const ProcessMatrix& raw, const SolverConfig& cfg = {}, DykstraStats* stats = nullptr)
{
    if (!is_hermitian(raw.mat, 1e-8)) throw std::invalid_argument("chi_repair: input must be Hermitian");
    TpConstraint tp(raw.basis);
    RVec y = project_psd_tp(detail::herm_to_iso(raw.mat, tp.scale), tp, cfg.dykstra_max_iters, cfg.dykstra_tol, stats);
    return make_process(raw.basis, detail::iso_to_herm(y, tp.scale));
}

// min ||Phi chi - lambda|| over {chi >= 0, TP}.
inline ProcessResult qpt_cco(const TomographyDesign& des, const DataVector& data, const SolverConfig& cfg = {})
{
    ProcessResult lin = qpt_linear(des, data);
    TpConstraint tp(des.basis);
    const RMat A = des.coeff * tp.scale.cwiseInverse().asDiagonal();
    auto proj = [&](const RVec& y) { return project_psd_tp(y, tp, cfg.dykstra_max_iters, cfg.dykstra_tol); };
    RVec y0 = proj(detail::herm_to_iso(lin.estimate.mat, tp.scale));
    ProcessResult r;
    r.rank_deficient = lin.rank_deficient;
    RVec y = detail::mfista(A, data.values, y0, proj, cfg, r.iterations, r.converged, r.history);
    r.estimate = make_process(des.basis, detail::iso_to_herm(y, tp.scale));
    r.objective = (A * y - data.values).norm();
    r.eigen_summary = eigenvalues(r.estimate.mat);
    return r;
}

// ---------------------------------------------------------------- compressed sensing

namespace detail {

// prox of sum_i w_i |chi_i| (both triangles) in isometric coordinates.
inline RVec l1_prox(const RVec& v, Eigen::Index d, double tau)
{
    RVec out = v;
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j) {
            if (i == j) {
                const double a = std::abs(v(k));
                out(k) = a > tau ? v(k) * (1.0 - tau / a) : 0.0;
                ++k;
            } else {
                const double t = std::sqrt(2.0) * tau;
                const double a = std::hypot(v(k), v(k + 1));
                const double f = a > t ? 1.0 - t / a : 0.0;
                out(k) = v(k) * f;
                out(k + 1) = v(k + 1) * f;
                k += 2;
            }
        }
    return out;
}

inline double l1_norm(const Mat& h) { return h.cwiseAbs().sum(); }

}  // namespace detail

// min ||chi||_1 s.t. ||lambda - Phi chi|| <= eps, chi >= 0, TP.
// ADMM on the splitting z1 = Phi y, z2 = y (PSD), z3 = y (l1), y in the TP set.
inline ProcessResult qpt_cs(const TomographyDesign& des, const DataVector& data, const SolverConfig& cfg = {})
{
    if (des.mode != Mode::qpt) throw std::invalid_argument("qpt_cs: expected a QPT design");
    if (data.values.size() != des.rows()) throw std::invalid_argument("qpt_cs: data length mismatch");
    TpConstraint tp(des.basis);
    const RVec& s = tp.scale;
    const RMat A = des.coeff * s.cwiseInverse().asDiagonal();
    const RVec& b = data.values;
    const Eigen::Index N = A.cols(), m = A.rows(), nc = tp.C.rows();
    const Eigen::Index D = des.basis.size();

    double eps = 0.0;
    bool deficient = false;
    if (cfg.epsilon) {
        eps = *cfg.epsilon;
    } else {
        RVec x = detail::min_norm_solve(des.coeff, b, &deficient);
        eps = (des.coeff * x - b).norm();
    }
    if (eps < 0) throw std::invalid_argument("qpt_cs: epsilon must be >= 0");

    RMat K = RMat::Zero(N + nc, N + nc);
    K.topLeftCorner(N, N) = A.transpose() * A + 2.0 * RMat::Identity(N, N);
    K.topRightCorner(N, nc) = tp.C.transpose();
    K.bottomLeftCorner(nc, N) = tp.C;
    Eigen::FullPivLU<RMat> kkt(K);

    auto ball = [&](const RVec& v) {
        RVec r = v - b;
        const double n = r.norm();
        return n <= eps ? v : RVec(b + r * (eps / n));
    };
    auto psd = [&](const RVec& v) { return detail::herm_to_iso(project_psd(detail::iso_to_herm(v, s)), s); };

    RVec y = tp.project(RVec::Zero(N));
    RVec z1 = A * y, z2 = y, z3 = y;
    RVec u1 = RVec::Zero(m), u2 = RVec::Zero(N), u3 = RVec::Zero(N);
    double rho = cfg.admm_rho;
    ProcessResult res;
    res.rank_deficient = deficient;
    for (res.iterations = 1; res.iterations <= cfg.max_iters; ++res.iterations) {
        RVec rhs(N + nc);
        rhs.head(N) = A.transpose() * (z1 - u1) + (z2 - u2) + (z3 - u3);
        rhs.tail(nc) = tp.c;
        y = kkt.solve(rhs).head(N);
        const RVec Ay = A * y;
        RVec z1o = z1, z2o = z2, z3o = z3;
        z1 = ball(Ay + u1);
        z2 = psd(y + u2);
        z3 = detail::l1_prox(y + u3, D, 1.0 / rho);
        u1 += Ay - z1;
        u2 += y - z2;
        u3 += y - z3;
        const double rp = std::sqrt((Ay - z1).squaredNorm() + (y - z2).squaredNorm() + (y - z3).squaredNorm());
        const double rd = rho * (A.transpose() * (z1 - z1o) + (z2 - z2o) + (z3 - z3o)).norm();
        const double scale = std::max({1.0, y.norm(), z2.norm()});
        if (rp <= cfg.admm_tol * scale && rd <= cfg.admm_tol * scale) {
            res.converged = true;
            break;
        }
        // residual balancing; the KKT matrix does not depend on rho
        if (res.iterations % 20 == 0) {
            double f = 1.0;
            if (rp > 10 * rd) f = 2.0;
            if (rd > 10 * rp) f = 0.5;
            if (f != 1.0) {
                rho *= f;
                u1 /= f;
                u2 /= f;
                u3 /= f;
            }
        }
    }
    if (res.iterations > cfg.max_iters) res.iterations = cfg.max_iters;
    RVec yv = project_psd_tp(z2, tp, cfg.dykstra_max_iters, cfg.dykstra_tol);
    res.estimate = make_process(des.basis, detail::iso_to_herm(yv, s));
    res.objective = detail::l1_norm(res.estimate.mat);
    res.feasibility_gap = std::max(0.0, (A * yv - b).norm() - eps);
    if (res.feasibility_gap > std::max(1e-6, cfg.admm_tol) * std::max(1.0, b.norm())) res.converged = false;
    res.eigen_summary = eigenvalues(res.estimate.mat);
    return res;
}

// Baseline: minimum-norm least squares on the rows at hand, then chi_repair.
inline ProcessResult qpt_ls_project(const TomographyDesign& des, const DataVector& data, const SolverConfig& cfg = {})
{
    ProcessResult lin = qpt_linear(des, data);
    ProcessResult r = lin;
    r.estimate = chi_repair(lin.estimate, cfg);
    r.eigen_summary = eigenvalues(r.estimate.mat);
    return r;
}

}  // namespace tomokit
