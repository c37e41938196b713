#pragma once

#include <random>

#include <gtest/gtest.h>

#include "tomokit/tomokit.hpp"

namespace th {

using namespace tomokit;

inline double diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline Vec random_ket(int d, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = cplx(g(rng), g(rng));
    return v / v.norm();
}

inline Mat random_matrix(int r, int c, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline Mat random_density(int d, std::mt19937_64& rng)
{
    Mat a = random_matrix(d, d, rng);
    Mat r = a * a.adjoint();
    return r / r.trace().real();
}

// sum_i A rho A^dag written out without library helpers
inline Mat kraus_apply(const std::vector<Mat>& ops, const Mat& rho)
{
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const auto& a : ops) out += a * rho * a.adjoint();
    return out;
}

// Brute-force chi from Kraus: a_im = Tr(E_m^dag A_i)/d, chi_mn = sum_i a_im conj(a_in)
inline Mat brute_chi(const std::vector<Mat>& ops, const std::vector<Mat>& basis)
{
    const auto n = static_cast<Eigen::Index>(basis.size());
    const double d = static_cast<double>(basis[0].rows());
    Mat chi = Mat::Zero(n, n);
    for (const auto& a : ops) {
        Vec c(n);
        for (Eigen::Index m = 0; m < n; ++m) c(m) = (basis[m].adjoint() * a).trace() / d;
        chi += c * c.adjoint();
    }
    return chi;
}

}  // namespace th
