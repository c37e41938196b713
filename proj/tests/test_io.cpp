#include "helpers.hpp"

#include <cstdio>
#include <cstring>

#include "tomokit/io.hpp"

using namespace tomokit;
namespace io = tomokit::io;

TEST(Encode, IdentityMatrix)
{
    EXPECT_EQ(io::encode(Mat(Mat::Identity(2, 2))).dump(), "[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]");
    EXPECT_EQ(io::decode_complex(io::json(2.5), "x"), cplx(2.5, 0));
    EXPECT_THROW(io::decode_complex(io::json::array({1}), "x"), io::IoError);
    EXPECT_THROW(io::decode_matrix(io::json::parse("[[[1,0]],[[1,0],[2,0]]]"), "m"), io::IoError);
}

TEST(RoundTrip, ProcessMatrixBitwise)
{
    for (auto basis : {pauli_basis(2), pauli_error_basis(cnot())}) {
        ProcessMatrix p = chi_from_kraus(random_kraus(2, 3, 17), basis);
        ProcessMatrix q = io::process_from_json(io::parse(io::dump(io::to_json(p)), "mem"));
        ASSERT_EQ(q.mat.rows(), p.mat.rows());
        EXPECT_EQ(std::memcmp(q.mat.data(), p.mat.data(), sizeof(cplx) * p.mat.size()), 0);
        EXPECT_EQ(q.basis.kind, p.basis.kind);
        for (int k = 0; k < basis.size(); ++k) EXPECT_EQ(q.basis.ops[k], p.basis.ops[k]);
        EXPECT_EQ(q.status, p.status);
    }
}

TEST(RoundTrip, StateKrausAndExperiment)
{
    DensityMatrix rho = random_state(StateKind::mixed, 2, 4);
    DensityMatrix r2 = io::density_from_json(io::parse(io::dump(io::to_json(rho)), "mem"));
    EXPECT_EQ(r2.mat, rho.mat);

    KrausSet ks = random_kraus(1, 2, 5);
    KrausSet k2 = io::kraus_from_json(io::parse(io::dump(io::to_json(ks)), "mem"));
    ASSERT_EQ(k2.ops.size(), ks.ops.size());
    for (size_t i = 0; i < ks.ops.size(); ++i) EXPECT_EQ(k2.ops[i], ks.ops[i]);

    OperatorBasis b = pauli_error_basis(cnot());
    auto des = build_qpt_design(2, input_state_set(2), pauli_words(2), b, DataModel::expectation);
    auto data = simulate_data(Channel::unitary(cnot()), des, 0.02, 99);
    auto [d2, v2] = io::experiment_from_json(io::parse(io::dump(io::to_json(des, data)), "mem"));
    EXPECT_EQ(d2.coeff, des.coeff);
    EXPECT_EQ(v2.values, data.values);
    EXPECT_EQ(v2.seed, 99u);
    EXPECT_EQ(d2.row_labels, des.row_labels);
    EXPECT_EQ(d2.model, des.model);
    EXPECT_EQ(d2.inputs.size(), des.inputs.size());
}

TEST(Documents, SchemaAndKindChecks)
{
    io::json j = io::to_json(random_state(StateKind::pure, 1, 2));
    j.erase("schema");
    EXPECT_THROW(io::density_from_json(j), io::IoError);
    io::json k = io::to_json(random_state(StateKind::pure, 1, 2));
    k["schema"] = "tomokit/0";
    EXPECT_THROW(io::density_from_json(k), io::IoError);
    io::json p = io::to_json(chi_from_unitary(cnot(), pauli_basis(2)));
    EXPECT_THROW(io::density_from_json(p), io::IoError);
    EXPECT_EQ(io::kind_of(p, "mem"), "process_matrix");
    p["matrix"] = io::encode(Mat(Mat::Identity(4, 4)));
    EXPECT_THROW(io::process_from_json(p), io::IoError);
}

TEST(Documents, ParseErrorReportsPathAndLine)
{
    const std::string path = ::testing::TempDir() + "tomokit_bad.json";
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        ASSERT_NE(f, nullptr);
        std::fputs("{\n  \"schema\": \"tomokit/1\",\n  \"kind\": oops\n}\n", f);
        std::fclose(f);
    }
    try {
        io::read_file(path);
        FAIL() << "expected a parse error";
    } catch (const io::IoError& e) {
        EXPECT_NE(std::string(e.what()).find(path + ":3:"), std::string::npos) << e.what();
    }
    std::remove(path.c_str());
    EXPECT_THROW(io::read_file("/nonexistent/tomokit.json"), io::IoError);
}

TEST(Documents, DumpIsDeterministic)
{
    ProcessMatrix p = chi_from_kraus(random_kraus(2, 2, 8), pauli_basis(2));
    EXPECT_EQ(io::dump(io::to_json(p)), io::dump(io::to_json(p)));
}
