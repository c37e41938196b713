#include "helpers.hpp"

using namespace tomokit;
using th::diff;

TEST(PauliBasis, SingleQubitOrder)
{
    OperatorBasis b = pauli_basis(1);
    ASSERT_EQ(b.size(), 4);
    Mat X(2, 2), Y(2, 2), Z(2, 2);
    X << 0, 1, 1, 0;
    Y << 0, cplx(0, -1), cplx(0, 1), 0;
    Z << 1, 0, 0, -1;
    EXPECT_LT(diff(b.ops[0], Mat::Identity(2, 2)), 1e-15);
    EXPECT_LT(diff(b.ops[1], X), 1e-15);
    EXPECT_LT(diff(b.ops[2], Y), 1e-15);
    EXPECT_LT(diff(b.ops[3], Z), 1e-15);
    EXPECT_NEAR((b.ops[1] * b.ops[1].adjoint()).trace().real(), 2.0, 1e-15);
}

TEST(PauliBasis, TwoQubitIndexSixIsXY)
{
    OperatorBasis b = pauli_basis(2);
    ASSERT_EQ(b.size(), 16);
    Mat X(2, 2), Y(2, 2);
    X << 0, 1, 1, 0;
    Y << 0, cplx(0, -1), cplx(0, 1), 0;
    EXPECT_LT(diff(b.ops[6], kron(X, Y)), 1e-15);
}

TEST(PauliBasis, OrthogonalityExhaustive)
{
    for (int n = 1; n <= 2; ++n) {
        OperatorBasis b = pauli_basis(n);
        const double d = b.dim;
        for (int m = 0; m < b.size(); ++m)
            for (int k = 0; k < b.size(); ++k) {
                cplx t = (b.ops[m] * b.ops[k].adjoint()).trace();
                EXPECT_NEAR(std::abs(t - cplx(m == k ? d : 0.0)), 0.0, 1e-10);
            }
        for (int m = 0; m < b.size(); ++m)
            EXPECT_NEAR(std::abs(b.ops[m].trace() - cplx(m == 0 ? d : 0.0)), 0.0, 1e-10);
    }
}

TEST(PauliBasis, OrthogonalitySampledThreeQubits)
{
    OperatorBasis b = pauli_basis(3);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> u(0, b.size() - 1);
    for (int s = 0; s < 300; ++s) {
        int m = u(rng), k = u(rng);
        cplx t = (b.ops[m] * b.ops[k].adjoint()).trace();
        EXPECT_NEAR(std::abs(t - cplx(m == k ? 8.0 : 0.0)), 0.0, 1e-10);
    }
}

TEST(PauliBasis, RangeChecked)
{
    EXPECT_THROW(pauli_basis(0), std::invalid_argument);
    EXPECT_THROW(pauli_basis(6), std::invalid_argument);
}

TEST(PauliErrorBasis, IdentityMatchesPauli)
{
    OperatorBasis a = pauli_error_basis(Mat::Identity(4, 4));
    OperatorBasis b = pauli_basis(2);
    for (int i = 0; i < 16; ++i) EXPECT_LT(diff(a.ops[i], b.ops[i]), 1e-15);
}

TEST(PauliErrorBasis, TargetUnitaryIsSingleEntry)
{
    for (const Mat& U : {cnot(), hadamard()}) {
        OperatorBasis b = pauli_error_basis(U);
        check_orthogonality(b);
        ProcessMatrix chi = chi_from_kraus(make_kraus({U}), b);
        Mat expect = Mat::Zero(b.size(), b.size());
        expect(0, 0) = 1.0;
        EXPECT_LT(diff(chi.mat, expect), 1e-12);
    }
}

TEST(PauliErrorBasis, RejectsNonUnitary)
{
    Mat m = Mat::Identity(2, 2);
    m(0, 1) = 0.3;
    EXPECT_THROW(pauli_error_basis(m), std::invalid_argument);
}

TEST(ApplyChannel, IdentityLeavesStateAlone)
{
    std::mt19937_64 rng(1);
    DensityMatrix rho = make_state(th::random_density(4, rng));
    DensityMatrix out = apply_channel(Channel::unitary(Mat::Identity(4, 4)), rho);
    EXPECT_LT(diff(out.mat, rho.mat), 1e-15);
}

TEST(ApplyChannel, CorrelatedAmplitudeDampingOnExcitedState)
{
    // sqrt(0.6) s+ (x) s+ and diag(1, 1, 1, sqrt(0.4)) written out by hand
    Mat a1 = Mat::Zero(4, 4), a2 = Mat::Identity(4, 4);
    a1(0, 3) = std::sqrt(0.6);
    a2(3, 3) = std::sqrt(0.4);
    Mat rho = Mat::Zero(4, 4);
    rho(3, 3) = 1.0;
    DensityMatrix out = apply_channel(Channel::kraus(make_kraus({a1, a2})), make_state(rho));
    Mat expect = Mat::Zero(4, 4);
    expect(0, 0) = 0.6;
    expect(3, 3) = 0.4;
    EXPECT_LT(diff(out.mat, expect), 1e-12);
}

TEST(ApplyChannel, ReferencePhaseDampingCoherence)
{
    Vec plus = Vec::Ones(4) / 2.0;
    DensityMatrix rho = make_state(plus * plus.adjoint());
    // four-decimal rounding leaves a completeness defect around 1e-4
    KrausSet ks = make_kraus(fixtures::pd_reference_kraus());
    EXPECT_LT(ks.completeness_defect, 1e-3);
    DensityMatrix out = apply_channel(Channel::kraus(ks), rho, true);
    EXPECT_NEAR(out.mat(0, 1).real() / rho.mat(0, 1).real(), std::exp(-1.5 * 2), 1e-3);
}

TEST(ApplyChannel, RejectsIncompleteKrausUnlessAllowed)
{
    Mat a = 0.5 * Mat::Identity(2, 2);
    Channel ch = Channel::kraus(make_kraus({a}));
    DensityMatrix rho = make_state(Mat::Identity(2, 2) / 2.0);
    EXPECT_THROW(apply_channel(ch, rho), std::invalid_argument);
    EXPECT_NO_THROW(apply_channel(ch, rho, true));
}

TEST(ApplyChannel, DimensionMismatch)
{
    EXPECT_THROW(apply_channel(Channel::unitary(cnot()), make_state(Mat::Identity(2, 2) / 2.0)),
                 std::invalid_argument);
}

TEST(ChiFromKraus, SimpleCases)
{
    OperatorBasis b = pauli_basis(1);
    ProcessMatrix id = chi_from_kraus(make_kraus({Mat::Identity(2, 2)}), b);
    ProcessMatrix x = chi_from_kraus(make_kraus({pauli(1)}), b);
    Mat e00 = Mat::Zero(4, 4), e11 = Mat::Zero(4, 4);
    e00(0, 0) = 1;
    e11(1, 1) = 1;
    EXPECT_LT(diff(id.mat, e00), 1e-15);
    EXPECT_LT(diff(x.mat, e11), 1e-15);
    EXPECT_EQ(x.status, Status::valid);
}

TEST(ChiFromKraus, MatchesBruteForceAndChannelAction)
{
    std::mt19937_64 rng(11);
    OperatorBasis b = pauli_basis(2);
    KrausSet ks = random_kraus(2, 2, 77);
    ProcessMatrix chi = chi_from_kraus(ks, b);
    EXPECT_LT(diff(chi.mat, th::brute_chi(ks.ops, b.ops)), 1e-12);
    for (int s = 0; s < 10; ++s) {
        Mat rho = th::random_density(4, rng);
        Mat via_chi = apply_channel(Channel::chi(chi), make_state(rho)).mat;
        EXPECT_LT(diff(via_chi, th::kraus_apply(ks.ops, rho)), 1e-10);
    }
}

TEST(KrausFromChi, IdentityAndRoundTrip)
{
    OperatorBasis b = pauli_basis(1);
    KrausSet k = kraus_from_chi(chi_from_kraus(make_kraus({Mat::Identity(2, 2)}), b));
    ASSERT_EQ(k.ops.size(), 1u);
    EXPECT_LT(diff(k.ops[0], Mat::Identity(2, 2)), 1e-12);

    std::mt19937_64 rng(3);
    OperatorBasis b2 = pauli_basis(2);
    for (int s = 0; s < 5; ++s) {
        KrausSet ks = random_kraus(2, 3, 100 + s);
        KrausSet back = kraus_from_chi(chi_from_kraus(ks, b2));
        EXPECT_LE(back.completeness_defect, 1e-8);
        Mat rho = th::random_density(4, rng);
        EXPECT_LT(diff(th::kraus_apply(back.ops, rho), th::kraus_apply(ks.ops, rho)), 1e-9);
    }
}

TEST(KrausFromChi, RefusesIndefinite)
{
    OperatorBasis b = pauli_basis(1);
    Mat chi = Mat::Zero(4, 4);
    chi(0, 0) = 1.2;
    chi(1, 1) = -0.2;
    EXPECT_THROW(kraus_from_chi(make_process(b, chi)), std::domain_error);
}

TEST(Choi, IdentityIsBell)
{
    DensityMatrix c = choi_from_channel(Channel::unitary(Mat::Identity(2, 2)));
    Vec bell = Vec::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    EXPECT_LT(diff(c.mat, bell * bell.adjoint()), 1e-15);
}

TEST(Choi, BitFlip)
{
    DensityMatrix c = choi_from_channel(Channel::unitary(pauli(1)));
    Vec psi = Vec::Zero(4);
    psi(1) = psi(2) = 1.0 / std::sqrt(2.0);
    EXPECT_LT(diff(c.mat, psi * psi.adjoint()), 1e-15);
}

TEST(Choi, UnitTraceAndPsdForRandomChannels)
{
    for (int s = 0; s < 10; ++s) {
        DensityMatrix c = choi_from_channel(Channel::kraus(random_kraus(1 + s % 2, 2, 900 + s)));
        EXPECT_NEAR(c.mat.trace().real(), 1.0, 1e-12);
        EXPECT_GE(eigenvalues(c.mat).minCoeff(), -1e-12);
    }
}

TEST(Choi, RejectsNonTracePreserving)
{
    EXPECT_THROW(choi_from_channel(Channel::kraus(make_kraus({0.5 * Mat(Mat::Identity(2, 2))}))),
                 std::invalid_argument);
}

TEST(ChiFromChoi, UChiMatrixForOneQubit)
{
    // rows vec(E_j)^dag / sqrt2 with column stacking
    Mat expect(4, 4);
    const cplx i(0, 1);
    expect << 1, 0, 0, 1, 0, 1, 1, 0, 0, -i, i, 0, 1, 0, 0, -1;
    expect /= std::sqrt(2.0);
    EXPECT_LT(diff(u_chi(pauli_basis(1)), expect), 1e-15);
}

TEST(ChiFromChoi, MatchesChiFromKraus)
{
    OperatorBasis b1 = pauli_basis(1);
    ProcessMatrix id = chi_from_choi(choi_from_channel(Channel::unitary(Mat::Identity(2, 2))), 1);
    EXPECT_NEAR(id.mat(0, 0).real(), 1.0, 1e-12);
    ProcessMatrix x = chi_from_choi(choi_from_channel(Channel::unitary(pauli(1))), 1);
    EXPECT_NEAR(x.mat(1, 1).real(), 1.0, 1e-12);
    ProcessMatrix h = chi_from_choi(choi_from_channel(Channel::unitary(hadamard())), 1);
    EXPECT_LT(diff(h.mat, th::brute_chi({hadamard()}, b1.ops)), 1e-10);
    for (int s = 0; s < 5; ++s) {
        KrausSet ks = random_kraus(2, 2, 500 + s);
        ProcessMatrix c = chi_from_choi(choi_from_channel(Channel::kraus(ks)), 2);
        EXPECT_LT(diff(c.mat, th::brute_chi(ks.ops, pauli_basis(2).ops)), 1e-10);
    }
    EXPECT_THROW(chi_from_choi(make_state(Mat::Identity(8, 8) / 8.0), 1), std::invalid_argument);
}

TEST(RepresentationEquivalence, KrausChiChoiSuperop)
{
    std::mt19937_64 rng(21);
    for (int s = 0; s < 20; ++s) {
        const int n = 1 + s % 2;
        const int d = 1 << n;
        KrausSet ks = random_kraus(n, 1 + s % 3, 1000 + s);
        Channel kc = Channel::kraus(ks);
        ProcessMatrix chi = chi_from_kraus(ks, pauli_basis(n));
        ProcessMatrix chi_c = chi_from_choi(choi_from_channel(kc), n);
        Channel sc = Channel::superop(superop_from_channel(kc));
        Mat rho = th::random_density(d, rng);
        Mat ref = th::kraus_apply(ks.ops, rho);
        EXPECT_LT(diff(apply_channel(Channel::chi(chi), make_state(rho)).mat, ref), 1e-9);
        EXPECT_LT(diff(apply_channel(Channel::chi(chi_c), make_state(rho)).mat, ref), 1e-9);
        EXPECT_LT(diff(apply_channel(sc, make_state(rho)).mat, ref), 1e-9);
    }
}

TEST(ProcessInvariants, TpForcesUnitTrace)
{
    for (int s = 0; s < 10; ++s) {
        ProcessMatrix chi = chi_from_kraus(random_kraus(2, 2, 40 + s), pauli_basis(2));
        EXPECT_EQ(chi.status, Status::valid);
        EXPECT_NEAR(std::abs(chi.mat.trace() - cplx(1.0)), 0.0, 1e-8);
        EXPECT_LE(tp_residual(chi), 1e-10);
    }
}

TEST(BasisStateDensity, Examples)
{
    DensityMatrix z = basis_state_density(pauli(3), 2);
    Mat p0 = Mat::Zero(2, 2);
    p0(0, 0) = 1;
    EXPECT_LT(diff(z.mat, p0), 1e-15);
    DensityMatrix xy = basis_state_density(pauli_word("XY"), 4);
    RVec ev = eigenvalues(xy.mat);
    EXPECT_NEAR(ev(0), 0, 1e-12);
    EXPECT_NEAR(ev(1), 0, 1e-12);
    EXPECT_NEAR(ev(2), 0.5, 1e-12);
    EXPECT_NEAR(ev(3), 0.5, 1e-12);
    for (int k = 1; k < 16; ++k) {
        DensityMatrix r = basis_state_density(pauli_basis(2).ops[k], 4);
        EXPECT_EQ(r.status, Status::valid);
        EXPECT_NEAR(r.mat.trace().real(), 1.0, 1e-15);
        EXPECT_TRUE(is_hermitian(r.mat));
    }
    bool ident = false;
    DensityMatrix mm = basis_state_density(Mat::Identity(4, 4), 4, &ident);
    EXPECT_TRUE(ident);
    EXPECT_LT(diff(mm.mat, Mat::Identity(4, 4) / 4.0), 1e-15);
}

TEST(Purification, RoundTripForAllBasisStates)
{
    OperatorBasis b = pauli_basis(2);
    for (int k = 1; k < 16; ++k) {
        DensityMatrix M = basis_state_density(b.ops[k], 4);
        Purification p = purify_with_ancilla(M);
        EXPECT_EQ(p.ancilla_qubits, 1);
        EXPECT_LT(diff(trace_out_last(p.psi, p.ancilla_qubits), M.mat), 1e-10);
    }
}

TEST(Purification, ReferenceStatesHaveTheRightMarginals)
{
    // (system (x) ancilla) amplitudes /2; index = Pauli word they purify.
    const cplx i(0, 1);
    struct Row {
        int word;
        std::vector<cplx> amp;
    };
    std::vector<Row> rows = {
        {1, {0, 1, 0, 1, 1, 0, 1, 0}},    {2, {0, -i, 0, 1, -i, 0, 1, 0}}, {4, {0, -1, 1, 0, 0, -1, 1, 0}},
        {5, {1, 0, 0, 1, 0, 1, 1, 0}},    {6, {-i, 0, 0, 1, 0, -i, 1, 0}}, {7, {0, 1, -1, 0, 0, 1, 1, 0}},
        {8, {0, -1, -i, 0, 0, -i, 1, 0}}, {9, {-i, 0, 0, 1, 0, i, 1, 0}},  {10, {-1, 0, 0, 1, 0, 1, 1, 0}},
        {13, {0, 1, 0, 1, -1, 0, 1, 0}},  {14, {0, -i, 0, 1, i, 0, 1, 0}},
    };
    OperatorBasis b = pauli_basis(2);
    for (const auto& r : rows) {
        Vec psi(8);
        for (int k = 0; k < 8; ++k) psi(k) = r.amp[k] / 2.0;
        Mat M = (b.ops[r.word] + Mat::Identity(4, 4)) / 4.0;
        EXPECT_LT(diff(trace_out_last(psi, 1), M), 1e-12) << "word " << r.word;
    }
    Vec zi = Vec::Zero(8), zz = Vec::Zero(8);
    zi(0) = zi(3) = 1 / std::sqrt(2.0);
    zz(0) = zz(7) = 1 / std::sqrt(2.0);
    EXPECT_LT(diff(trace_out_last(zi, 1), (b.ops[12] + Mat::Identity(4, 4)) / 4.0), 1e-12);
    EXPECT_LT(diff(trace_out_last(zz, 1), (b.ops[15] + Mat::Identity(4, 4)) / 4.0), 1e-12);
}

TEST(Purification, XYStateMatchesReferenceUpToPhase)
{
    DensityMatrix M = basis_state_density(pauli_word("XY"), 4);
    Purification p = purify_with_ancilla(M);
    const cplx i(0, 1);
    Vec pub(8);
    pub << -i, 0, 0, 1, 0, -i, 1, 0;
    pub /= 2.0;
    // same reduced state; the ancilla labelling may differ by a local unitary
    EXPECT_LT(diff(trace_out_last(p.psi, 1), trace_out_last(pub, 1)), 1e-12);
}

TEST(Purification, PureAndRandomMixed)
{
    std::mt19937_64 rng(8);
    Vec v = th::random_ket(4, rng);
    Purification p = purify_with_ancilla(make_state(v * v.adjoint()));
    EXPECT_EQ(p.ancilla_qubits, 0);
    EXPECT_NEAR(std::abs(v.dot(p.psi)), 1.0, 1e-12);
    for (int s = 0; s < 5; ++s) {
        Mat M = th::random_density(4, rng);
        Purification q = purify_with_ancilla(make_state(M));
        EXPECT_EQ(q.ancilla_qubits, 2);
        EXPECT_LT(diff(trace_out_last(q.psi, q.ancilla_qubits), M), 1e-10);
    }
    Mat bad = Mat::Identity(2, 2);
    bad(1, 1) = -0.5;
    EXPECT_THROW(purify_with_ancilla(DensityMatrix{bad, Status::raw}), std::invalid_argument);
}

TEST(PartialTrace, ProductGhzAndReadoutMap)
{
    std::mt19937_64 rng(4);
    Mat a = th::random_density(2, rng), b = th::random_density(4, rng);
    DensityMatrix ab = make_state(kron(a, b));
    EXPECT_LT(diff(partial_trace(ab, {0}).mat, a), 1e-12);
    EXPECT_LT(diff(partial_trace(ab, {1, 2}).mat, b), 1e-12);

    Vec ghz = Vec::Zero(8);
    ghz(0) = ghz(7) = 1 / std::sqrt(2.0);
    Mat r = partial_trace(make_state(ghz * ghz.adjoint()), {1, 2}).mat;
    Mat expect = Mat::Zero(4, 4);
    expect(0, 0) = expect(3, 3) = 0.5;
    EXPECT_LT(diff(r, expect), 1e-15);

    Mat full = th::random_density(8, rng);
    Mat red = partial_trace(make_state(full), {0, 1}).mat;
    EXPECT_LT(std::abs(red(0, 1) - (full(0, 2) + full(1, 3))), 1e-14);
    EXPECT_LT(std::abs(red(1, 3) - (full(3, 7) + full(2, 6))), 1e-14);

    EXPECT_THROW(partial_trace(ab, {}), std::invalid_argument);
    EXPECT_THROW(partial_trace(ab, {3}), std::invalid_argument);
}

TEST(States, ValidityFlags)
{
    Mat m = Mat::Identity(2, 2) / 2.0;
    EXPECT_EQ(make_state(m).status, Status::valid);
    m(0, 0) = 1.2;
    m(1, 1) = -0.2;
    EXPECT_EQ(make_state(m).status, Status::raw);
    EXPECT_THROW(make_state(Mat::Identity(3, 3) / 3.0), std::invalid_argument);
}
