#pragma once

// Reference data: weak-measurement DQST/DQPT matrices and Kraus lists for
// phase damping and correlated amplitude damping, rounded to four decimals.
// The two weak-measurement matrices are not exactly Hermitian after rounding;
// take hermitian_part() before repairing them.

#include "types.hpp"

namespace tomokit::fixtures {

namespace detail {

inline Mat from_re_im(const double (&re)[4][4], const double (&im)[4][4])
{
    Mat m(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = cplx(re[i][j], im[i][j]);
    return m;
}

}  // namespace detail

// Raw DQST estimate of the Bell state (|00> + |11>)/sqrt2.
inline Mat bell_dqst()
{
    const double re[4][4] = {{0.6089, -0.0104, 0.0774, 0.6314},
                             {-0.0104, 0.0155, 0.0633, -0.0534},
                             {0.0774, 0.0633, 0.0764, -0.0956},
                             {0.6314, -0.0534, -0.0956, 0.6425}};
    const double im[4][4] = {{0, -0.0566, 0.0352, 0.1126},
                             {0.0566, 0, 0.0860, -0.1384},
                             {-0.0352, -0.0860, 0, 0.1367},
                             {-0.1126, 0.1384, 0.1367, 0}};
    return detail::from_re_im(re, im);
}

// Raw DQPT estimate of the Hadamard gate (Pauli basis chi).
inline Mat hadamard_dqpt()
{
    const double re[4][4] = {{-0.0010, 0.0422, 0.0635, -0.0854},
                             {0.0422, 0.3964, -0.0827, 0.4406},
                             {0.0635, -0.08269, 0.0789, 0.0429},
                             {-0.0854, 0.4406, 0.0429, 0.4846}};
    const double im[4][4] = {{0, 0.0243, 0.0554, -0.0195},
                             {-0.0243, 0, -0.0664, 0.0754},
                             {-0.0554, 0.0664, 0, 0.0633},
                             {0.0195, -0.0754, -0.0633, 0}};
    return detail::from_re_im(re, im);
}

// Two-qubit phase damping, gamma1 = 1.4, gamma2 = 1.5, t = 2.
inline std::vector<Mat> pd_reference_kraus()
{
    auto diag = [](cplx c, double a, double b, double e, double f) {
        Mat m = Mat::Zero(4, 4);
        m(0, 0) = c * a;
        m(1, 1) = c * b;
        m(2, 2) = c * e;
        m(3, 3) = c * f;
        return m;
    };
    return {diag(0.4723, -1, 1, 1, -1), diag(cplx(0.0181, -0.4961), 1, 1, -1, -1),
            diag(cplx(-0.0085, -0.5019), 1, -1, 1, -1), diag(cplx(-0.5276, -0.007), 1, 1, 1, 1)};
}

// Fully correlated amplitude damping at p = 0.6.
inline std::vector<Mat> cad_reference_kraus()
{
    Mat a1 = Mat::Zero(4, 4), a2 = Mat::Identity(4, 4);
    a1(0, 3) = 0.7746;
    a2(3, 3) = 0.6325;
    return {a1, a2};
}

}  // namespace tomokit::fixtures
