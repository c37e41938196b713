#pragma once

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "expdesign.hpp"

namespace tomokit::io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "tomokit/1";

// Malformed or unreadable input; `what()` carries path and line when known.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- scalars & matrices

inline json encode(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx decode_complex(const json& j, const std::string& where)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw IoError(where + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json encode(const Mat& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(encode(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat decode_matrix(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw IoError(where + ": expected nested row arrays");
    const auto r = static_cast<Eigen::Index>(j.size()), c = static_cast<Eigen::Index>(j[0].size());
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
            throw IoError(where + "[" + std::to_string(i) + "]: ragged row");
        for (Eigen::Index k = 0; k < c; ++k)
            m(i, k) = decode_complex(row[k], where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return m;
}

inline json encode(const RVec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline RVec decode_real_vector(const json& j, const std::string& where)
{
    if (!j.is_array()) throw IoError(where + ": expected an array of numbers");
    RVec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw IoError(where + "[" + std::to_string(i) + "]: expected a number");
        v(i) = j[i].get<double>();
    }
    return v;
}

inline json encode(const RMat& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(encode(RVec(m.row(i).transpose())));
    return rows;
}

inline RMat decode_real_matrix(const json& j, const std::string& where)
{
    if (!j.is_array()) throw IoError(where + ": expected nested row arrays");
    if (j.empty()) return RMat(0, 0);
    RMat m(j.size(), j[0].size());
    for (size_t i = 0; i < j.size(); ++i) {
        RVec r = decode_real_vector(j[i], where + "[" + std::to_string(i) + "]");
        if (r.size() != m.cols()) throw IoError(where + "[" + std::to_string(i) + "]: ragged row");
        m.row(i) = r.transpose();
    }
    return m;
}

// ---------------------------------------------------------------- documents

inline json document(const std::string& kind)
{
    json j;
    j["schema"] = kSchema;
    j["kind"] = kind;
    return j;
}

inline const json& field(const json& j, const std::string& key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) throw IoError(where + ": missing field \"" + key + "\"");
    return j.at(key);
}

inline void check_document(const json& j, const std::string& kind, const std::string& where)
{
    if (!j.is_object()) throw IoError(where + ": top level must be an object");
    if (!j.contains("schema")) throw IoError(where + ": missing \"schema\" field");
    if (j["schema"] != kSchema) throw IoError(where + ": unsupported schema " + j["schema"].dump());
    const std::string k = field(j, "kind", where).get<std::string>();
    if (!kind.empty() && k != kind) throw IoError(where + ": expected kind \"" + kind + "\", found \"" + k + "\"");
}

inline std::string kind_of(const json& j, const std::string& where)
{
    check_document(j, "", where);
    return j["kind"].get<std::string>();
}

inline const char* status_name(Status s) { return s == Status::valid ? "valid" : "raw"; }

// density matrix
inline json to_json(const DensityMatrix& rho)
{
    json j = document("density_matrix");
    j["status"] = status_name(rho.status);
    j["matrix"] = encode(rho.mat);
    return j;
}

inline DensityMatrix density_from_json(const json& j, const std::string& where = "document")
{
    check_document(j, "density_matrix", where);
    Mat m = decode_matrix(field(j, "matrix", where), where + ".matrix");
    if (m.rows() != m.cols()) throw IoError(where + ".matrix: not square");
    try {
        return make_state(std::move(m));
    } catch (const std::invalid_argument& e) {
        throw IoError(where + ".matrix: " + e.what());
    }
}

// operator basis
inline json to_json(const OperatorBasis& b)
{
    json j;
    j["kind"] = b.kind == BasisKind::pauli ? "pauli" : "pauli_error";
    j["qubits"] = qubits_for_dim(b.dim);
    if (b.kind == BasisKind::pauli_error) j["unitary"] = encode(b.U);
    return j;
}

inline OperatorBasis basis_from_json(const json& j, const std::string& where)
{
    const std::string k = field(j, "kind", where).get<std::string>();
    if (k == "pauli") return pauli_basis(field(j, "qubits", where).get<int>());
    if (k == "pauli_error") return pauli_error_basis(decode_matrix(field(j, "unitary", where), where + ".unitary"));
    throw IoError(where + ".kind: unknown basis \"" + k + "\"");
}

// process matrix
inline json to_json(const ProcessMatrix& p)
{
    json j = document("process_matrix");
    j["status"] = status_name(p.status);
    j["qubits"] = qubits_for_dim(p.basis.dim);
    j["basis"] = to_json(p.basis);
    j["matrix"] = encode(p.mat);
    return j;
}

inline ProcessMatrix process_from_json(const json& j, const std::string& where = "document")
{
    check_document(j, "process_matrix", where);
    OperatorBasis b = basis_from_json(field(j, "basis", where), where + ".basis");
    Mat m = decode_matrix(field(j, "matrix", where), where + ".matrix");
    if (m.rows() != b.size() || m.cols() != b.size()) throw IoError(where + ".matrix: size does not match basis");
    return make_process(b, std::move(m));
}

// Kraus set
inline json to_json(const KrausSet& k)
{
    json j = document("kraus");
    j["dim"] = k.dim;
    j["completeness_defect"] = k.completeness_defect;
    j["operators"] = json::array();
    for (const auto& op : k.ops) j["operators"].push_back(encode(op));
    return j;
}

inline KrausSet kraus_from_json(const json& j, const std::string& where = "document")
{
    check_document(j, "kraus", where);
    const json& ops = field(j, "operators", where);
    if (!ops.is_array() || ops.empty()) throw IoError(where + ".operators: expected a non-empty array");
    std::vector<Mat> out;
    for (size_t i = 0; i < ops.size(); ++i)
        out.push_back(decode_matrix(ops[i], where + ".operators[" + std::to_string(i) + "]"));
    try {
        return make_kraus(std::move(out));
    } catch (const std::invalid_argument& e) {
        throw IoError(where + ".operators: " + e.what());
    }
}

// design + data
inline json to_json(const TomographyDesign& des, const DataVector& data)
{
    json j = document("experiment");
    j["qubits"] = des.n_qubits;
    j["mode"] = des.mode == Mode::qst ? "qst" : "qpt";
    j["model"] = des.model == DataModel::nmr_readout ? "nmr_readout" : "expectation";
    j["settings"] = des.settings;
    if (des.mode == Mode::qpt) {
        j["basis"] = to_json(des.basis);
        j["inputs"] = json::array();
        for (const auto& m : des.inputs) j["inputs"].push_back(encode(m));
    }
    j["row_labels"] = json::array();
    for (const auto& [a, b] : des.row_labels) j["row_labels"].push_back({a, b});
    j["coefficients"] = encode(des.coeff);
    j["data"] = {{"values", encode(data.values)},
                 {"noise_sigma", data.noise_sigma},
                 {"seed", data.seed},
                 {"shots", data.shots}};
    return j;
}

inline std::pair<TomographyDesign, DataVector> experiment_from_json(const json& j, const std::string& where = "document")
{
    check_document(j, "experiment", where);
    TomographyDesign des;
    des.n_qubits = field(j, "qubits", where).get<int>();
    const std::string mode = field(j, "mode", where).get<std::string>();
    if (mode != "qst" && mode != "qpt") throw IoError(where + ".mode: expected qst or qpt");
    des.mode = mode == "qst" ? Mode::qst : Mode::qpt;
    const std::string model = field(j, "model", where).get<std::string>();
    if (model != "nmr_readout" && model != "expectation") throw IoError(where + ".model: unknown data model");
    des.model = model == "nmr_readout" ? DataModel::nmr_readout : DataModel::expectation;
    des.settings = field(j, "settings", where).get<std::vector<std::string>>();
    if (des.mode == Mode::qpt) {
        des.basis = basis_from_json(field(j, "basis", where), where + ".basis");
        const json& in = field(j, "inputs", where);
        for (size_t i = 0; i < in.size(); ++i)
            des.inputs.push_back(decode_matrix(in[i], where + ".inputs[" + std::to_string(i) + "]"));
    }
    for (const auto& p : field(j, "row_labels", where)) des.row_labels.emplace_back(p[0].get<int>(), p[1].get<int>());
    des.coeff = decode_real_matrix(field(j, "coefficients", where), where + ".coefficients");
    des.rank_deficient = !detail::full_column_rank(des.coeff);
    const json& d = field(j, "data", where);
    DataVector data;
    data.values = decode_real_vector(field(d, "values", where + ".data"), where + ".data.values");
    data.noise_sigma = d.value("noise_sigma", 0.0);
    data.seed = d.value("seed", std::uint64_t{0});
    data.shots = d.value("shots", 0);
    if (data.values.size() != des.coeff.rows()) throw IoError(where + ".data.values: length does not match design");
    return {std::move(des), std::move(data)};
}

// ---------------------------------------------------------------- files

inline int line_of_offset(const std::string& text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

inline json parse(const std::string& text, const std::string& where)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw IoError(where + ":" + std::to_string(line_of_offset(text, byte)) + ": " + e.what());
    }
}

inline json read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

// Doubles print in shortest round-trip form (at most 17 significant digits).
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot write");
    out << dump(j);
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace tomokit::io
