#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>

#include "qcore.hpp"

namespace tomokit {

enum class Mode { qst, qpt };
enum class DataModel { nmr_readout, expectation };

// A rotation setting is one letter per qubit: 'I', 'X' (90 deg about x) or 'Y'.
using Rotation = std::string;

struct TomographyDesign {
    int n_qubits = 0;
    Mode mode = Mode::qst;
    DataModel model = DataModel::nmr_readout;
    std::vector<Mat> inputs;            // qpt only: input density matrices
    std::vector<std::string> settings;  // rotations (nmr) or Pauli words (expectation)
    OperatorBasis basis;                // qpt only
    RMat coeff;                         // rows = data, cols = real parameters (Hermitian parameter ordering)
    std::vector<std::pair<int, int>> row_labels;
    bool rank_deficient = false;

    int rows() const { return static_cast<int>(coeff.rows()); }
    int params() const { return static_cast<int>(coeff.cols()); }
};

struct DataVector {
    RVec values;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    int shots = 0;  // 0 = exact expectations
};

// ---------------------------------------------------------------- rotations

inline std::vector<Rotation> nmr_tomo_set(int n)
{
    switch (n) {
    case 2: return {"II", "IX", "IY", "XX"};
    case 3: return {"III", "IIY", "YII", "IYY", "XYX", "XXY", "XXX"};
    case 4:
        return {"IIII", "IIIX", "XIIX", "XIIY", "YYII", "IXYY", "IYXY", "IYYY",
                "XXXI", "XYYI", "YIXX", "YYYI", "XXXX", "YXXX", "YXYY"};
    case 5:
        return {"IIIII", "IIIIX", "IIIXY", "IIIYY", "IIXIY", "IIYIY", "IXXXI", "IYYYI", "XIYXI",
                "XXIYI", "XYIIY", "XYXII", "YIXYI", "YIYIY", "YXIIY", "YXYII", "YYIIY", "YYIXI",
                "IXXXX", "IYYXX", "IYYYX", "XIYXX", "XXIYX", "XYXIX", "YIXYX", "YXYIX", "YYIXX",
                "XXXXY", "XXXYY", "XXYXY", "XXYYY", "YYXXY", "YYXYY"};
    default: throw std::invalid_argument("nmr_tomo_set: n must be in 2..5");
    }
}

inline Mat rotation_unitary(const Rotation& r)
{
    Mat u = Mat::Identity(1, 1);
    for (char c : r) u = kron(u, c == 'I' ? Mat(Mat::Identity(2, 2)) : rot90(c));
    return u;
}

// Readout elements (m, n) for an n-qubit NMR register: for each spin k the
// transitions flipping bit k, lower state first.
inline std::vector<std::pair<int, int>> nmr_readout_elements(int n)
{
    std::vector<std::pair<int, int>> out;
    const int d = 1 << n;
    for (int k = 0; k < n; ++k) {
        const int bit = 1 << (n - 1 - k);
        for (int m = 0; m < d; ++m)
            if (!(m & bit)) out.emplace_back(m, m | bit);
    }
    return out;
}

// {|0>,|1>,|+>,(|0>+i|1>)/sqrt2}^{(x)n}
inline std::vector<Mat> input_state_set(int n)
{
    if (n < 1) throw std::invalid_argument("input_state_set: n must be >= 1");
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<Vec> single(4, Vec::Zero(2));
    single[0] << 1, 0;
    single[1] << 0, 1;
    single[2] << r, r;
    single[3] << r, cplx(0, r);
    std::vector<Vec> kets{Vec::Ones(1)};
    for (int q = 0; q < n; ++q) {
        std::vector<Vec> next;
        for (const auto& k : kets)
            for (const auto& s : single) next.push_back(kron(k, s));
        kets = std::move(next);
    }
    std::vector<Mat> out;
    for (const auto& k : kets) out.push_back(k * k.adjoint());
    return out;
}

inline std::vector<std::string> pauli_words(int n)
{
    std::vector<std::string> w;
    for (int i = 0; i < (1 << (2 * n)); ++i) w.push_back(pauli_label(i, n));
    return w;
}

// ---------------------------------------------------------------- designs

namespace detail {

inline bool full_column_rank(const RMat& a)
{
    Eigen::ColPivHouseholderQR<RMat> qr(a);
    qr.setThreshold(1e-10);
    return qr.rank() == a.cols();
}

// Real readout rows (Re, Im per element) of R h R^dag.
inline void nmr_rows(const Mat& R, const Mat& h, const std::vector<std::pair<int, int>>& el, RVec& out, int offset)
{
    Mat t = R * h * R.adjoint();
    for (size_t e = 0; e < el.size(); ++e) {
        cplx z = t(el[e].first, el[e].second);
        out(offset + 2 * e) = z.real();
        out(offset + 2 * e + 1) = z.imag();
    }
}

// Hermitian generator of chi parameter p (isometry not applied).
inline Mat chi_param_output(const OperatorBasis& b, Eigen::Index p, const Mat& rho)
{
    ProcessMatrix pm{0, b, param_basis(b.size(), p), Status::raw};
    return chi_apply(pm, rho);
}

}  // namespace detail

inline TomographyDesign build_qst_design(int n, const std::vector<Rotation>& rotations,
                                         DataModel model = DataModel::nmr_readout)
{
    TomographyDesign des;
    des.n_qubits = n;
    des.mode = Mode::qst;
    des.model = model;
    des.settings = rotations;
    const int d = 1 << n;
    const int np = d * d;
    if (model == DataModel::nmr_readout) {
        if (n < 2 || n > 3) throw std::invalid_argument("build_qst_design: NMR readout model supports n = 2, 3");
        const auto el = nmr_readout_elements(n);
        const int per = static_cast<int>(2 * el.size());
        des.coeff = RMat::Zero(per * rotations.size() + 1, np);
        for (size_t r = 0; r < rotations.size(); ++r) {
            if (static_cast<int>(rotations[r].size()) != n) throw std::invalid_argument("rotation length mismatch");
            Mat R = rotation_unitary(rotations[r]);
            for (int p = 0; p < np; ++p) {
                RVec col(per);
                detail::nmr_rows(R, param_basis(d, p), el, col, 0);
                des.coeff.block(r * per, p, per, 1) = col;
            }
            for (int k = 0; k < per; ++k) des.row_labels.emplace_back(static_cast<int>(r), k);
        }
        RVec tr = herm_to_params(Mat::Identity(d, d));  // Tr rho = sum of diagonal params
        des.coeff.row(des.coeff.rows() - 1) = tr.transpose();
        des.row_labels.emplace_back(-1, -1);
    } else {
        des.coeff = RMat::Zero(rotations.size(), np);
        for (size_t j = 0; j < rotations.size(); ++j) {
            Mat M = pauli_word(rotations[j]);
            for (int p = 0; p < np; ++p) des.coeff(j, p) = (M * param_basis(d, p)).trace().real();
            des.row_labels.emplace_back(static_cast<int>(j), 0);
        }
    }
    des.rank_deficient = !detail::full_column_rank(des.coeff);
    return des;
}

// NMR model: row (i, k) is the k-th real parameter of Lambda(rho_i).
// Expectation model: row (i, j) is Tr(M_j Lambda(rho_i)).
inline TomographyDesign build_qpt_design(int n, const std::vector<Mat>& inputs, const std::vector<std::string>& settings,
                                         const OperatorBasis& basis, DataModel model = DataModel::nmr_readout)
{
    const int d = 1 << n;
    if (basis.dim != d) throw std::invalid_argument("build_qpt_design: basis dimension mismatch");
    TomographyDesign des;
    des.n_qubits = n;
    des.mode = Mode::qpt;
    des.model = model;
    des.inputs = inputs;
    des.settings = settings;
    des.basis = basis;
    const int nchi = basis.size() * basis.size();
    std::vector<Mat> meas;
    if (model == DataModel::expectation)
        for (const auto& w : settings) meas.push_back(pauli_word(w));
    const int per = model == DataModel::nmr_readout ? d * d : static_cast<int>(meas.size());
    des.coeff = RMat::Zero(per * inputs.size(), nchi);
    for (size_t i = 0; i < inputs.size(); ++i) {
        for (int p = 0; p < nchi; ++p) {
            Mat out = detail::chi_param_output(basis, p, inputs[i]);
            if (model == DataModel::nmr_readout) {
                des.coeff.block(i * per, p, per, 1) = herm_to_params(out);
            } else {
                for (size_t j = 0; j < meas.size(); ++j) des.coeff(i * per + j, p) = (meas[j] * out).trace().real();
            }
        }
        for (int k = 0; k < per; ++k) des.row_labels.emplace_back(static_cast<int>(i), k);
    }
    des.rank_deficient = !detail::full_column_rank(des.coeff);
    return des;
}

// ---------------------------------------------------------------- random objects

inline Mat random_unitary(int d, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat z(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) z(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ() * Mat::Identity(d, d);
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        cplx rd = r(j, j);
        double a = std::abs(rd);
        q.col(j) *= a > 0 ? rd / a : cplx(1.0);
    }
    return q;
}

enum class StateKind { pure, mixed };

inline DensityMatrix random_state(StateKind kind, int n, std::uint64_t seed)
{
    if (n < 1 || n > 5) throw std::invalid_argument("random_state: n must be in 1..5");
    const int d = 1 << n;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    if (kind == StateKind::pure) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v(i) = cplx(g(rng), g(rng));
        v /= v.norm();
        DensityMatrix s{v * v.adjoint(), Status::valid};
        return s;
    }
    Mat r(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) r(i, j) = cplx(g(rng), g(rng));
    Mat m = r * r.adjoint();
    m /= m.trace().real();
    return DensityMatrix{m, Status::valid};
}

inline Channel random_process(int n, std::uint64_t seed)
{
    return Channel::unitary(random_unitary(1 << n, seed));
}

// Random CPTP map with `rank` Kraus operators cut from a random isometry.
inline KrausSet random_kraus(int n, int rank, std::uint64_t seed)
{
    const int d = 1 << n;
    Mat u = random_unitary(d * rank, seed);
    std::vector<Mat> ops;
    for (int k = 0; k < rank; ++k) ops.push_back(u.block(k * d, 0, d, d));
    return make_kraus(std::move(ops));
}

// ---------------------------------------------------------------- data

namespace detail {

inline void add_noise(RVec& v, double sigma, int shots, const std::vector<bool>& noisy, const std::vector<bool>& binary,
                      std::mt19937_64& rng)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!noisy[i]) continue;
        if (shots > 0 && binary[i]) {
            double p0 = std::clamp((1.0 + v(i)) / 2.0, 0.0, 1.0);
            std::binomial_distribution<int> b(shots, p0);
            int k = b(rng);
            v(i) = 2.0 * k / shots - 1.0;
        }
        if (sigma > 0) {
            std::normal_distribution<double> g(0.0, sigma);
            v(i) += g(rng);
        }
    }
}

}  // namespace detail

inline DataVector simulate_data(const DensityMatrix& truth, const TomographyDesign& des, double sigma,
                                std::uint64_t seed, int shots = 0)
{
    if (des.mode != Mode::qst) throw std::invalid_argument("simulate_data: state truth needs a QST design");
    if (sigma < 0) throw std::invalid_argument("simulate_data: sigma must be >= 0");
    if (truth.dim() != (1 << des.n_qubits)) throw std::invalid_argument("simulate_data: dimension mismatch");
    RVec v(des.rows());
    std::vector<bool> noisy(des.rows(), true), binary(des.rows(), false);
    if (des.model == DataModel::nmr_readout) {
        const auto el = nmr_readout_elements(des.n_qubits);
        const int per = static_cast<int>(2 * el.size());
        for (size_t r = 0; r < des.settings.size(); ++r)
            detail::nmr_rows(rotation_unitary(des.settings[r]), truth.mat, el, v, static_cast<int>(r * per));
        v(des.rows() - 1) = truth.mat.trace().real();
        noisy[des.rows() - 1] = false;
    } else {
        for (size_t j = 0; j < des.settings.size(); ++j) {
            v(j) = (pauli_word(des.settings[j]) * truth.mat).trace().real();
            binary[j] = true;
        }
    }
    std::mt19937_64 rng(seed);
    detail::add_noise(v, sigma, shots, noisy, binary, rng);
    return DataVector{v, sigma, seed, shots};
}

inline DataVector simulate_data(const Channel& truth, const TomographyDesign& des, double sigma, std::uint64_t seed,
                                int shots = 0)
{
    if (des.mode != Mode::qpt) throw std::invalid_argument("simulate_data: channel truth needs a QPT design");
    if (sigma < 0) throw std::invalid_argument("simulate_data: sigma must be >= 0");
    if (truth.dim() != (1 << des.n_qubits)) throw std::invalid_argument("simulate_data: dimension mismatch");
    RVec v(des.rows());
    std::vector<bool> noisy(des.rows(), true), binary(des.rows(), des.model == DataModel::expectation);
    std::vector<Mat> meas;
    for (const auto& w : des.settings)
        if (des.model == DataModel::expectation) meas.push_back(pauli_word(w));
    const int d = 1 << des.n_qubits;
    const int per = des.model == DataModel::nmr_readout ? d * d : static_cast<int>(meas.size());
    for (size_t i = 0; i < des.inputs.size(); ++i) {
        Mat out = apply_map(truth, des.inputs[i]);
        if (des.model == DataModel::nmr_readout) {
            v.segment(i * per, per) = herm_to_params(0.5 * (out + out.adjoint()));
        } else {
            for (size_t j = 0; j < meas.size(); ++j) v(i * per + j) = (meas[j] * out).trace().real();
        }
    }
    std::mt19937_64 rng(seed);
    detail::add_noise(v, sigma, shots, noisy, binary, rng);
    return DataVector{v, sigma, seed, shots};
}

// Uniform row subset without replacement (kept in original row order).
inline std::pair<TomographyDesign, DataVector> subsample(const TomographyDesign& des, const DataVector& data, int m,
                                                         std::uint64_t seed)
{
    if (m < 1 || m > des.rows()) throw std::invalid_argument("subsample: m out of range");
    if (data.values.size() != des.rows()) throw std::invalid_argument("subsample: data length mismatch");
    std::vector<int> idx(des.rows());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    TomographyDesign sub = des;
    sub.coeff.resize(m, des.params());
    sub.row_labels.clear();
    DataVector sd = data;
    sd.values.resize(m);
    for (int r = 0; r < m; ++r) {
        sub.coeff.row(r) = des.coeff.row(idx[r]);
        sub.row_labels.push_back(des.row_labels[idx[r]]);
        sd.values(r) = data.values(idx[r]);
    }
    sub.rank_deficient = !detail::full_column_rank(sub.coeff);
    return {std::move(sub), std::move(sd)};
}

// ---------------------------------------------------------------- resources

enum class QptMethod { standard_qpt, seqpt, msqpt };

struct Resources {
    long preparations = 0;
    long readouts = 0;
    long ancillas = 0;
};

// Counting model: D = 2^n, K = D(D+1) 2-design states.
//  standard: D^2-1 preparations; n=2 NMR reads 8 rows per preparation,
//            n=3 reads all D^2-1 Pauli observables.
//  seqpt:    4K preparations (E_a +- E_b, E_a +- iE_b), D-1 nonzero observables each.
//  msqpt:    D^2-1 basis-operator states, D readouts per state (one per MUB
//            projector set); ancillas: none on NMR (n=2), n-1 for purification (n=3).
inline Resources resource_estimate(QptMethod method, int n)
{
    if (n != 2 && n != 3) throw std::invalid_argument("resource_estimate: n must be 2 or 3");
    const long D = 1L << n;
    const long K = D * (D + 1);
    switch (method) {
    case QptMethod::standard_qpt: {
        const long prep = D * D - 1;
        const long per = n == 2 ? 8 : D * D - 1;
        return {prep, prep * per, 0};
    }
    case QptMethod::seqpt: {
        const long prep = 4 * K;
        return {prep, prep * (D - 1), 0};
    }
    case QptMethod::msqpt: {
        const long prep = D * D - 1;
        return {prep, prep * D, n == 2 ? 0 : n - 1};
    }
    }
    throw std::invalid_argument("resource_estimate: unknown method");
}

}  // namespace tomokit
