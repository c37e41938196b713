#include "helpers.hpp"

using namespace tomokit;

namespace {

Mat random_herm(int d, std::mt19937_64& rng)
{
    Mat a = th::random_matrix(d, d, rng);
    return a + a.adjoint();
}

}  // namespace

TEST(TraceFidelity, Examples)
{
    std::mt19937_64 rng(1);
    Mat rho = th::random_density(4, rng);
    EXPECT_NEAR(trace_fidelity(rho, rho), 1.0, 1e-15);
    Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
    p0(0, 0) = 1;
    p1(1, 1) = 1;
    EXPECT_NEAR(trace_fidelity(p0, p1), 0.0, 1e-15);
    Mat plus = Mat::Constant(2, 2, 0.5);
    EXPECT_NEAR(trace_fidelity(p0, plus), 0.5, 1e-15);
    EXPECT_THROW(trace_fidelity(p0, Mat::Zero(2, 2)), std::invalid_argument);
    EXPECT_THROW(trace_fidelity(p0, Mat::Zero(4, 4)), std::invalid_argument);
}

TEST(TraceFidelity, SymmetryAndSelfFidelity)
{
    std::mt19937_64 rng(2);
    for (int s = 0; s < 100; ++s) {
        Mat a = random_herm(4, rng), b = random_herm(4, rng);
        EXPECT_NEAR(trace_fidelity(a, b), trace_fidelity(b, a), 1e-14);
        EXPECT_NEAR(trace_fidelity(a, a), 1.0, 1e-14);
        EXPECT_NEAR(trace_fidelity(a, 3.7 * a), 1.0, 1e-14);
    }
}

TEST(TraceFidelity, UnitaryInvariance)
{
    std::mt19937_64 rng(3);
    for (int s = 0; s < 20; ++s) {
        Mat a = random_herm(4, rng), b = random_herm(4, rng);
        Mat U = random_unitary(4, 50 + s);
        EXPECT_NEAR(trace_fidelity(U * a * U.adjoint(), U * b * U.adjoint()), trace_fidelity(a, b), 1e-13);
    }
}

TEST(UJFidelity, Examples)
{
    std::mt19937_64 rng(4);
    DensityMatrix rho = make_state(th::random_density(4, rng));
    EXPECT_NEAR(uj_fidelity(rho, rho), 1.0, 1e-8);
    Mat p0 = Mat::Zero(2, 2);
    p0(0, 0) = 1;
    EXPECT_NEAR(uj_fidelity(make_state(Mat::Identity(2, 2) / 2.0), make_state(p0)), 0.5, 1e-10);
    for (int s = 0; s < 10; ++s) {
        Vec a = th::random_ket(4, rng), b = th::random_ket(4, rng);
        double expect = std::norm(a.dot(b));
        EXPECT_NEAR(uj_fidelity(pure_state(a), pure_state(b)), expect, 1e-8);
        // pure sigma: F = Tr(rho sigma)
        Mat m = th::random_density(4, rng);
        EXPECT_NEAR(uj_fidelity(make_state(m), pure_state(b)), b.dot(m * b).real(), 1e-8);
    }
}

TEST(UJFidelity, RangeAndOrthogonalSupports)
{
    std::mt19937_64 rng(5);
    for (int s = 0; s < 20; ++s) {
        double f = uj_fidelity(make_state(th::random_density(4, rng)), make_state(th::random_density(4, rng)));
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
    }
    Mat a = Mat::Zero(4, 4), b = Mat::Zero(4, 4);
    a(0, 0) = a(1, 1) = 0.5;
    b(2, 2) = 0.3;
    b(3, 3) = 0.7;
    EXPECT_NEAR(uj_fidelity(make_state(a), make_state(b)), 0.0, 1e-12);
}

TEST(UJFidelity, RefusesRawInput)
{
    Mat bad = Mat::Zero(2, 2);
    bad(0, 0) = 1.3;
    bad(1, 1) = -0.3;
    EXPECT_THROW(uj_fidelity(DensityMatrix{bad, Status::raw}, make_state(Mat::Identity(2, 2) / 2.0)),
                 std::invalid_argument);
}

TEST(StateDeviation, Examples)
{
    Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
    a(0, 0) = 1;
    b(1, 1) = 1;
    EXPECT_EQ(state_deviation(a, a), 0.0);
    EXPECT_NEAR(state_deviation(a, b), 0.5, 1e-15);
    EXPECT_THROW(state_deviation(a, Mat::Zero(4, 4)), std::invalid_argument);
}

TEST(StateDeviation, MonotoneAlongConvexPath)
{
    std::mt19937_64 rng(6);
    Mat ideal = th::random_density(4, rng), start = th::random_density(4, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 20; ++k) {
        const double t = k / 20.0;
        double dv = state_deviation((1 - t) * start + t * ideal, ideal);
        EXPECT_LT(dv, prev);
        prev = dv;
    }
    EXPECT_NEAR(prev, 0.0, 1e-30);
}

TEST(Spread, Examples)
{
    EXPECT_EQ(spread({3.0, 3.0, 3.0}), 0.0);
    EXPECT_NEAR(spread({0.0, 2.0}), std::sqrt(2.0), 1e-15);
    EXPECT_THROW(spread({1.0}), std::invalid_argument);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(1.0, 2.0);
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) v.push_back(g(rng));
    // two-pass oracle
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    EXPECT_NEAR(spread(v), std::sqrt(ss / 49.0), 1e-13);
}

TEST(FidelityReport, CarriesSortedSpectra)
{
    std::mt19937_64 rng(8);
    Mat a = th::random_density(4, rng), b = th::random_density(4, rng);
    FidelityReport r = fidelity_report(a, b, FidelityKind::trace_norm);
    EXPECT_NEAR(r.value, trace_fidelity(a, b), 1e-15);
    for (int i = 1; i < 4; ++i) {
        EXPECT_LE(r.eig_a(i - 1), r.eig_a(i));
        EXPECT_LE(r.eig_b(i - 1), r.eig_b(i));
    }
}
