#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace tomokit {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kEigFloor = 1e-10;  // rank decisions
inline constexpr double kPsdTol = 1e-8;     // validity flags
inline constexpr double kHermTol = 1e-10;

enum class Status { raw, valid };

struct DensityMatrix {
    Mat mat;
    Status status = Status::raw;

    int dim() const { return static_cast<int>(mat.rows()); }
};

enum class BasisKind { pauli, pauli_error };

struct OperatorBasis {
    int dim = 0;
    std::vector<Mat> ops;
    BasisKind kind = BasisKind::pauli;
    Mat U;  // only meaningful for pauli_error

    int size() const { return static_cast<int>(ops.size()); }
};

struct ProcessMatrix {
    int n_qubits = 0;
    OperatorBasis basis;
    Mat mat;
    Status status = Status::raw;
};

struct KrausSet {
    int dim = 0;
    std::vector<Mat> ops;
    double completeness_defect = 0.0;
};

// Linear map on column-stacked vec(rho).
struct Superoperator {
    Mat mat;

    int dim() const;  // Hilbert space dimension d (mat is d^2 x d^2)
};

inline int Superoperator::dim() const
{
    int d = 1;
    while (d * d < mat.rows()) ++d;
    return d;
}

struct UnitaryOp {
    Mat U;
};

// Any of the four channel representations.
struct Channel {
    std::variant<UnitaryOp, KrausSet, ProcessMatrix, Superoperator> rep;

    static Channel unitary(Mat U) { return Channel{UnitaryOp{std::move(U)}}; }
    static Channel kraus(KrausSet k) { return Channel{std::move(k)}; }
    static Channel chi(ProcessMatrix p) { return Channel{std::move(p)}; }
    static Channel superop(Superoperator s) { return Channel{std::move(s)}; }

    int dim() const;
};

inline int Channel::dim() const
{
    struct V {
        int operator()(const UnitaryOp& u) const { return static_cast<int>(u.U.rows()); }
        int operator()(const KrausSet& k) const { return k.dim; }
        int operator()(const ProcessMatrix& p) const { return p.basis.dim; }
        int operator()(const Superoperator& s) const { return s.dim(); }
    };
    return std::visit(V{}, rep);
}

}  // namespace tomokit
