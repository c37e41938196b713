// tomokit command-line front end. Every subcommand loads JSON documents,
// calls into the library and writes JSON plus a CSV summary on stdout.
// Exit codes: 0 ok, 1 usage/IO/parse error, 2 constraint infeasibility.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tomokit/io.hpp"
#include "tomokit/tomokit.hpp"

using namespace tomokit;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kIoError = 1, kInfeasible = 2;

// Raised for conditions that map to exit code 2.
struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string join_eigs(const RVec& v)
{
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v(i));
    return s;
}

void emit_csv(std::ostream& out, const std::string& csv_path, const std::string& header, const std::string& row)
{
    out << header << "\n" << row << "\n";
    if (csv_path.empty()) return;
    std::ofstream f(csv_path);
    if (!f) throw io::IoError(csv_path + ": cannot write");
    f << header << "\n" << row << "\n";
}

Channel load_channel(const std::string& path)
{
    io::json j = io::read_file(path);
    const std::string k = io::kind_of(j, path);
    if (k == "kraus") return Channel::kraus(io::kraus_from_json(j, path));
    if (k == "process_matrix") return Channel::chi(io::process_from_json(j, path));
    throw io::IoError(path + ": expected a kraus or process_matrix document, found \"" + k + "\"");
}

OperatorBasis basis_named(const std::string& name, int n)
{
    if (name == "pauli") return pauli_basis(n);
    if (n != 2) throw std::invalid_argument("cnot-error basis needs 2 qubits");
    return pauli_error_basis(cnot());
}

std::pair<int, int> parse_pair(const std::string& s)
{
    int a = 0, b = 0;
    char c = 0;
    std::istringstream is(s);
    if (!(is >> a >> c >> b) || c != ',' || !is.eof()) throw std::invalid_argument("expected \"a,b\", got \"" + s + "\"");
    return {a, b};
}

std::vector<std::pair<int, int>> parse_elements(const std::vector<std::string>& items, int d)
{
    if (items.size() == 1 && items[0] == "all") return upper_elements(d);
    std::vector<std::pair<int, int>> out;
    for (const auto& item : items) out.push_back(parse_pair(item));
    if (out.empty()) throw std::invalid_argument("no elements given");
    for (auto [m, n] : out)
        if (m < 0 || n < 0 || m >= d || n >= d) throw std::invalid_argument("element index out of range");
    return out;
}

// ---------------------------------------------------------------- commands

struct SimulateOpts {
    std::string truth, output, design = "nmr", basis = "pauli";
    double sigma = 0;
    int shots = 0, rows = 0;
    std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateOpts& o, std::ostream& out)
{
    io::json j = io::read_file(o.truth);
    const std::string kind = io::kind_of(j, o.truth);
    const DataModel model = o.design == "nmr" ? DataModel::nmr_readout : DataModel::expectation;
    TomographyDesign des;
    DataVector data;
    if (kind == "density_matrix") {
        DensityMatrix rho = io::density_from_json(j, o.truth);
        const int n = qubits_for_dim(rho.dim());
        des = model == DataModel::nmr_readout ? build_qst_design(n, nmr_tomo_set(n))
                                              : build_qst_design(n, pauli_words(n), model);
        data = simulate_data(rho, des, o.sigma, o.seed, o.shots);
    } else {
        Channel ch = load_channel(o.truth);
        const int n = qubits_for_dim(ch.dim());
        des = build_qpt_design(n, input_state_set(n), model == DataModel::nmr_readout ? std::vector<std::string>{}
                                                                                       : pauli_words(n),
                               basis_named(o.basis, n), model);
        data = simulate_data(ch, des, o.sigma, o.seed, o.shots);
    }
    if (o.rows > 0) std::tie(des, data) = subsample(des, data, o.rows, o.seed);
    io::write_file(o.output, io::to_json(des, data));
    emit_csv(out, "", "mode,rows,params,sigma,seed",
             std::string(des.mode == Mode::qst ? "qst" : "qpt") + "," + std::to_string(des.rows()) + "," +
                 std::to_string(des.params()) + "," + num(o.sigma) + "," + std::to_string(o.seed));
    return kOk;
}

struct ReconstructOpts {
    std::string method = "linear", input, output, truth, csv;
    int max_iters = 0;
    double epsilon = -1, rel_tol = 0;
};

int cmd_reconstruct(const ReconstructOpts& o, std::ostream& out)
{
    auto [des, data] = io::experiment_from_json(io::read_file(o.input), o.input);
    SolverConfig cfg;
    if (o.max_iters > 0) cfg.max_iters = o.max_iters;
    if (o.rel_tol > 0) cfg.rel_tol = o.rel_tol;
    if (o.epsilon >= 0) cfg.epsilon = o.epsilon;
    const std::string header = "method,fidelity,iterations,converged,objective,feasibility_gap,eigenvalues";
    auto row = [&](const auto& r, const std::string& fid) {
        return o.method + "," + fid + "," + std::to_string(r.iterations) + "," + (r.converged ? "1" : "0") + "," +
               num(r.objective) + "," + num(r.feasibility_gap) + "," + join_eigs(r.eigen_summary);
    };
    if (des.mode == Mode::qst) {
        if (o.method == "cs") throw std::invalid_argument("--method cs applies to process data only");
        StateResult r = o.method == "linear" ? qst_linear(des, data) : qst_cco(des, data, cfg);
        std::string fid;
        if (!o.truth.empty())
            fid = num(trace_fidelity(r.estimate, io::density_from_json(io::read_file(o.truth), o.truth)));
        io::write_file(o.output, io::to_json(r.estimate));
        emit_csv(out, o.csv, header, row(r, fid));
        return kOk;
    }
    ProcessResult r = o.method == "linear" ? qpt_linear(des, data)
                      : o.method == "cco"  ? qpt_cco(des, data, cfg)
                                           : qpt_cs(des, data, cfg);
    std::string fid;
    if (!o.truth.empty()) fid = num(trace_fidelity(r.estimate, io::process_from_json(io::read_file(o.truth), o.truth)));
    io::write_file(o.output, io::to_json(r.estimate));
    emit_csv(out, o.csv, header, row(r, fid));
    if (o.method == "cs" && r.feasibility_gap > 1e-6 * std::max(1.0, data.values.norm()))
        throw Infeasible("epsilon is below the best achievable residual (gap " + num(r.feasibility_gap) + ")");
    return kOk;
}

struct SeqptOpts {
    std::string channel, element, output;
    bool full = false;
    double sigma = 0;
    std::optional<std::uint64_t> seed;
};

int cmd_seqpt(const SeqptOpts& o, std::ostream& out)
{
    Channel ch = load_channel(o.channel);
    if (ch.dim() != 4) throw std::invalid_argument("seqpt supports two-qubit channels");
    if (o.sigma > 0 && !o.seed) throw std::invalid_argument("--seed is required when --sigma > 0");
    const OperatorBasis b = pauli_basis(2);
    const TwoDesign t = mub_set();
    std::vector<SelectivePlan> plans;
    if (o.full) {
        for (int a = 0; a < b.size(); ++a)
            for (int c = 0; c < b.size(); ++c) plans.push_back(build_plan(a, c, t, b));
    } else {
        auto [a, c] = parse_pair(o.element);
        plans.push_back(build_plan(a, c, t, b));
    }
    ExpectationTable table = o.sigma > 0 ? measured_expectations(ch, b, plan_mask(plans, b.size()), o.sigma, *o.seed)
                                         : exact_expectations(ch, b);
    if (o.full) {
        ProcessMatrix chi = msqpt_full(table, t, b);
        io::write_file(o.output, io::to_json(chi));
        emit_csv(out, "", "elements,status,eigenvalues",
                 std::to_string(plans.size()) + "," + io::status_name(chi.status) + "," +
                     join_eigs(eigenvalues(chi.mat)));
        return kOk;
    }
    const cplx v = msqpt_estimate(table, plans.front());
    if (!o.output.empty()) {
        io::json j = io::document("chi_element");
        j["a"] = plans.front().a;
        j["b"] = plans.front().b;
        j["value"] = io::encode(v);
        io::write_file(o.output, j);
    }
    emit_csv(out, "", "a,b,re,im",
             std::to_string(plans.front().a) + "," + std::to_string(plans.front().b) + "," + num(v.real()) + "," +
                 num(v.imag()));
    return kOk;
}

struct WeakOpts {
    std::string input, output;
    std::vector<std::string> elements = {"all"};
    double g = 0.1;
    bool exact = false, repair = false;
};

int cmd_weak(const WeakOpts& o, std::ostream& out)
{
    WeakConfig cfg{o.g, o.exact ? Evolution::exact : Evolution::first_order};
    std::string status;
    io::json j = io::read_file(o.input);
    if (io::kind_of(j, o.input) == "density_matrix") {
        DensityMatrix truth = io::density_from_json(j, o.input);
        DensityMatrix r = dqst(truth, parse_elements(o.elements, truth.dim()), cfg);
        if (o.repair) r = state_repair({hermitian_part(r.mat), Status::raw});
        io::write_file(o.output, io::to_json(r));
        status = io::status_name(r.status);
    } else {
        Channel ch = load_channel(o.input);
        ProcessMatrix r = dqpt(ch, parse_elements(o.elements, ch.dim() * ch.dim()), cfg);
        if (o.repair) r = process_repair(make_process(r.basis, hermitian_part(r.mat)));
        io::write_file(o.output, io::to_json(r));
        status = io::status_name(r.status);
    }
    emit_csv(out, "", "g,evolution,status", num(o.g) + "," + (o.exact ? "exact" : "first_order") + "," + status);
    return kOk;
}

int cmd_dilate(const std::string& kraus_path, const std::string& state_path, const std::string& output,
               std::ostream& out)
{
    KrausSet ks = io::kraus_from_json(io::read_file(kraus_path), kraus_path);
    DensityMatrix rho = io::density_from_json(io::read_file(state_path), state_path);
    DensityMatrix r = simulate_dilated(ks, rho);
    io::write_file(output, io::to_json(r));
    emit_csv(out, "", "trace,eigenvalues", num(r.mat.trace().real()) + "," + join_eigs(eigenvalues(r.mat)));
    return kOk;
}

int cmd_kraus(const std::string& input, const std::string& output, std::ostream& out)
{
    ProcessMatrix p = io::process_from_json(io::read_file(input), input);
    KrausSet ks;
    try {
        ks = kraus_from_chi(p);
    } catch (const std::domain_error& e) {
        throw Infeasible(e.what());
    }
    io::write_file(output, io::to_json(ks));
    emit_csv(out, "", "rank,completeness_defect", std::to_string(ks.ops.size()) + "," + num(ks.completeness_defect));
    return kOk;
}

int cmd_fidelity(const std::string& kind, const std::string& a, const std::string& b, std::ostream& out)
{
    io::json ja = io::read_file(a), jb = io::read_file(b);
    const std::string ka = io::kind_of(ja, a), kb = io::kind_of(jb, b);
    if (ka != kb) throw std::invalid_argument("cannot compare a " + ka + " with a " + kb);
    double v = 0;
    if (ka == "density_matrix") {
        DensityMatrix x = io::density_from_json(ja, a), y = io::density_from_json(jb, b);
        v = kind == "trace" ? trace_fidelity(x, y) : kind == "uj" ? uj_fidelity(x, y) : state_deviation(x.mat, y.mat);
    } else if (ka == "process_matrix") {
        if (kind == "uj") throw std::invalid_argument("--kind uj needs density matrices");
        ProcessMatrix x = io::process_from_json(ja, a), y = io::process_from_json(jb, b);
        v = kind == "trace" ? trace_fidelity(x, y) : state_deviation(x.mat, y.mat);
    } else {
        throw std::invalid_argument("fidelity needs density_matrix or process_matrix documents");
    }
    out << io::json(v).dump() << "\n";
    return kOk;
}

int cmd_resources(const std::string& method, int n, std::ostream& out)
{
    const QptMethod m = method == "standard" ? QptMethod::standard_qpt
                        : method == "seqpt"  ? QptMethod::seqpt
                                             : QptMethod::msqpt;
    Resources r = resource_estimate(m, n);
    out << r.preparations << "," << r.readouts << "," << r.ancillas << "\n";
    return kOk;
}

// Bundled reference documents.
const std::vector<std::string> kFixtures = {"noisy-cnot", "cnot-chi", "pd-kraus", "cad-kraus", "bell-dqst",
                                            "hadamard-dqpt"};

io::json fixture_document(const std::string& name)
{
    if (name == "noisy-cnot") {
        auto des = build_qpt_design(2, input_state_set(2), {}, pauli_basis(2));
        return io::to_json(des, simulate_data(Channel::unitary(cnot()), des, 0.05, 2024));
    }
    if (name == "cnot-chi") return io::to_json(chi_from_unitary(cnot(), pauli_basis(2)));
    if (name == "pd-kraus") return io::to_json(make_kraus(fixtures::pd_reference_kraus()));
    if (name == "cad-kraus") return io::to_json(make_kraus(fixtures::cad_reference_kraus()));
    if (name == "bell-dqst") return io::to_json(DensityMatrix{fixtures::bell_dqst(), Status::raw});
    return io::to_json(ProcessMatrix{1, pauli_basis(1), fixtures::hadamard_dqpt(), Status::raw});
}

int cmd_fixture_export(const std::string& name, const std::string& output, const std::string& dir, std::ostream& out)
{
    if (!dir.empty()) {
        fs::create_directories(dir);
        for (const auto& f : kFixtures) {
            const std::string path = (fs::path(dir) / (f + ".json")).string();
            io::write_file(path, fixture_document(f));
            out << path << "\n";
        }
        return kOk;
    }
    if (name.empty() || output.empty()) throw std::invalid_argument("give --name and -o, or --all DIR");
    io::write_file(output, fixture_document(name));
    return kOk;
}

// ---------------------------------------------------------------- dispatch

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err);

int cmd_run(const std::string& manifest, std::ostream& out, std::ostream& err);

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Quantum state and process tomography toolkit", "tomokit"};
    app.require_subcommand(1);
    const std::vector<std::string> methods = {"linear", "cco", "cs"};
    std::function<int()> action;

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "Generate measurement data from a truth document");
    sim->add_option("truth", so.truth, "density_matrix, kraus or process_matrix document")->required()->check(CLI::ExistingFile);
    sim->add_option("--design", so.design, "Data model")->check(CLI::IsMember({"nmr", "expectation"}));
    sim->add_option("--basis", so.basis, "Process basis")->check(CLI::IsMember({"pauli", "cnot-error"}));
    sim->add_option("--sigma", so.sigma, "Gaussian noise level")->check(CLI::NonNegativeNumber);
    sim->add_option("--shots", so.shots, "Shots per expectation (0 = exact)")->check(CLI::NonNegativeNumber);
    sim->add_option("--rows", so.rows, "Keep a random subset of this many rows")->check(CLI::NonNegativeNumber);
    sim->add_option("--seed", so.seed, "RNG seed")->required();
    sim->add_option("-o,--output", so.output, "Experiment document")->required();
    sim->callback([&] { action = [&] { return cmd_simulate(so, out); }; });

    ReconstructOpts ro;
    auto* rec = app.add_subcommand("reconstruct", "Reconstruct a state or process from an experiment");
    rec->add_option("--method", ro.method, "Estimator")->check(CLI::IsMember(methods));
    rec->add_option("input", ro.input, "Experiment document")->required()->check(CLI::ExistingFile);
    rec->add_option("-o,--output", ro.output, "Estimate document")->required();
    rec->add_option("--truth", ro.truth, "Reference for the fidelity column")->check(CLI::ExistingFile);
    rec->add_option("--csv", ro.csv, "Also write the summary to this file");
    rec->add_option("--max-iters", ro.max_iters)->check(CLI::PositiveNumber);
    rec->add_option("--rel-tol", ro.rel_tol)->check(CLI::PositiveNumber);
    rec->add_option("--epsilon", ro.epsilon, "Noise bound for cs")->check(CLI::NonNegativeNumber);
    rec->callback([&] { action = [&] { return cmd_reconstruct(ro, out); }; });

    SeqptOpts qo;
    std::uint64_t seqpt_seed = 0;
    auto* seq = app.add_subcommand("seqpt", "Selective process matrix elements over the 2-design");
    seq->add_option("channel", qo.channel, "kraus or process_matrix document")->required()->check(CLI::ExistingFile);
    auto* el = seq->add_option("--element", qo.element, "Element as a,b");
    auto* full = seq->add_flag("--full", qo.full, "Estimate every element");
    el->excludes(full);
    seq->add_option("--sigma", qo.sigma, "Readout noise")->check(CLI::NonNegativeNumber);
    auto* sseed = seq->add_option("--seed", seqpt_seed, "RNG seed (required with --sigma)");
    seq->add_option("-o,--output", qo.output);
    seq->callback([&] {
        if (!qo.full && qo.element.empty()) throw CLI::ValidationError("seqpt", "give --element a,b or --full");
        if (qo.full && qo.output.empty()) throw CLI::ValidationError("seqpt", "--full needs -o");
        if (*sseed) qo.seed = seqpt_seed;
        action = [&] { return cmd_seqpt(qo, out); };
    });

    WeakOpts wo;
    auto* weak = app.add_subcommand("weak", "Direct tomography by weak measurement");
    weak->add_option("input", wo.input, "density_matrix, kraus or process_matrix document")
        ->required()
        ->check(CLI::ExistingFile);
    weak->add_option("--elements", wo.elements, "\"all\" or a list of m,n pairs");
    weak->add_option("-g,--coupling", wo.g)->check(CLI::PositiveNumber);
    weak->add_flag("--exact", wo.exact, "Exact joint evolution instead of first order");
    weak->add_flag("--repair", wo.repair, "Project the result onto valid states or channels");
    weak->add_option("-o,--output", wo.output)->required();
    weak->callback([&] { action = [&] { return cmd_weak(wo, out); }; });

    std::string dk, ds, dout;
    auto* dil = app.add_subcommand("dilate", "Apply a Kraus channel through its unitary dilation");
    dil->add_option("kraus", dk, "Kraus document")->required()->check(CLI::ExistingFile);
    dil->add_option("state", ds, "Input density matrix")->required()->check(CLI::ExistingFile);
    dil->add_option("-o,--output", dout)->required();
    dil->callback([&] { action = [&] { return cmd_dilate(dk, ds, dout, out); }; });

    std::string kin, kout;
    auto* kr = app.add_subcommand("kraus", "Kraus operators from a process matrix");
    kr->add_option("input", kin)->required()->check(CLI::ExistingFile);
    kr->add_option("-o,--output", kout)->required();
    kr->callback([&] { action = [&] { return cmd_kraus(kin, kout, out); }; });

    std::string fkind = "trace", fa, fb;
    auto* fid = app.add_subcommand("fidelity", "Compare two states or process matrices");
    fid->add_option("--kind", fkind)->check(CLI::IsMember({"trace", "uj", "delta"}));
    fid->add_option("a", fa)->required()->check(CLI::ExistingFile);
    fid->add_option("b", fb)->required()->check(CLI::ExistingFile);
    fid->callback([&] { action = [&] { return cmd_fidelity(fkind, fa, fb, out); }; });

    std::string rmethod = "standard";
    int rn = 2;
    auto* res = app.add_subcommand("resources", "Preparations, readouts and ancillas of a QPT scheme");
    res->add_option("--method", rmethod)->check(CLI::IsMember({"standard", "seqpt", "msqpt"}));
    res->add_option("-n,--qubits", rn)->check(CLI::Range(2, 3));
    res->callback([&] { action = [&] { return cmd_resources(rmethod, rn, out); }; });

    std::string fxname, fxout, fxdir;
    auto* fx = app.add_subcommand("fixture", "Bundled reference documents");
    fx->require_subcommand(1);
    auto* fxe = fx->add_subcommand("export", "Write a reference document");
    fxe->add_option("--name", fxname)->check(CLI::IsMember(kFixtures));
    fxe->add_option("-o,--output", fxout);
    fxe->add_option("--all", fxdir, "Write every fixture into this directory");
    fxe->callback([&] { action = [&] { return cmd_fixture_export(fxname, fxout, fxdir, out); }; });

    std::string manifest;
    auto* run = app.add_subcommand("run", "Execute a batch manifest");
    run->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);
    run->callback([&] { action = [&] { return cmd_run(manifest, out, err); }; });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "tomokit: " << e.what() << "\n";
        return kIoError;
    }
    try {
        return action();
    } catch (const Infeasible& e) {
        err << "tomokit: infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const std::exception& e) {
        err << "tomokit: " << e.what() << "\n";
        return kIoError;
    }
}

// Manifest: {"schema", "kind": "manifest", "jobs": [{command, inputs, output,
// seed, solver, noise, options}]}. Paths are relative to the manifest. A job
// waits for earlier jobs that write its inputs; otherwise jobs run in
// parallel, capped by TOMOKIT_THREADS. Job stdout is replayed in job order.
struct Job {
    std::vector<std::string> args;
    int level = 0;
    std::vector<int> after;  // jobs producing our inputs
};

// Option values that name files and resolve against the manifest directory.
const std::set<std::string> kPathOptions = {"truth", "csv"};

std::string option_value(const io::json& v)
{
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::vector<Job> load_manifest(const std::string& path)
{
    io::json m = io::read_file(path);
    io::check_document(m, "manifest", path);
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) { return (fs::path(p).is_absolute() ? fs::path(p) : base / p).string(); };
    std::vector<Job> jobs;
    std::map<std::string, int> produced;  // output path -> job index
    const io::json& list = io::field(m, "jobs", path);
    for (size_t i = 0; i < list.size(); ++i) {
        const io::json& j = list[i];
        const std::string where = path + ".jobs[" + std::to_string(i) + "]";
        Job job;
        auto add_input = [&](const std::string& p) {
            auto it = produced.find(p);
            if (it != produced.end()) {
                job.level = std::max(job.level, jobs[it->second].level + 1);
                job.after.push_back(it->second);
            } else if (!fs::exists(p)) {
                throw io::IoError(where + ": input " + p + " does not exist");
            }
        };
        std::string cmd = io::field(j, "command", where).get<std::string>();
        std::stringstream cs(cmd);
        for (std::string w; cs >> w;) job.args.push_back(w);
        const io::json options = j.value("options", io::json::object());
        const io::json solver = j.value("solver", io::json::object());
        const io::json noise = j.value("noise", io::json::object());
        const io::json inputs = j.value("inputs", io::json::array());
        for (const auto& [k, v] : options.items()) {
            if (v.is_boolean()) {
                if (v.get<bool>()) job.args.push_back("--" + k);
                continue;
            }
            job.args.push_back((k.size() == 1 ? "-" : "--") + k);
            job.args.push_back(kPathOptions.count(k) ? resolve(option_value(v)) : option_value(v));
            if (k == "truth") add_input(job.args.back());
        }
        for (const auto& [k, v] : solver.items()) {
            std::string flag = k;
            std::replace(flag.begin(), flag.end(), '_', '-');
            job.args.insert(job.args.end(), {"--" + flag, option_value(v)});
        }
        for (const auto& [k, v] : noise.items())
            job.args.insert(job.args.end(), {"--" + k, option_value(v)});
        if (j.contains("seed")) job.args.insert(job.args.end(), {"--seed", option_value(j["seed"])});
        for (const auto& in : inputs) {
            const std::string p = resolve(in.get<std::string>());
            add_input(p);
            job.args.push_back(p);
        }
        if (j.contains("output")) {
            const std::string p = resolve(j["output"].get<std::string>());
            job.args.insert(job.args.end(), {"-o", p});
            produced[p] = static_cast<int>(jobs.size());
        }
        jobs.push_back(std::move(job));
    }
    return jobs;
}

unsigned thread_cap()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TOMOKIT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) n = static_cast<unsigned>(v);
    }
    return n;
}

int cmd_run(const std::string& manifest, std::ostream& out, std::ostream& err)
{
    std::vector<Job> jobs = load_manifest(manifest);
    std::vector<std::ostringstream> outs(jobs.size()), errs(jobs.size());
    std::vector<int> codes(jobs.size(), kOk);
    const int levels = jobs.empty() ? 0 : std::max_element(jobs.begin(), jobs.end(), [](auto& a, auto& b) {
                                              return a.level < b.level;
                                          })->level + 1;
    for (int lv = 0; lv < levels; ++lv) {
        std::vector<size_t> todo;
        for (size_t i = 0; i < jobs.size(); ++i)
            if (jobs[i].level == lv) todo.push_back(i);
        std::mutex mu;
        size_t next = 0;
        auto worker = [&] {
            for (;;) {
                size_t k;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next == todo.size()) return;
                    k = todo[next++];
                }
                bool blocked = false;
                for (int p : jobs[k].after) blocked = blocked || codes[p] != kOk;
                if (blocked) {
                    errs[k] << "tomokit: job " << k << " skipped: an input job failed\n";
                    codes[k] = kIoError;
                    continue;
                }
                codes[k] = dispatch(jobs[k].args, outs[k], errs[k]);
            }
        };
        std::vector<std::thread> pool;
        const unsigned nt = std::min<unsigned>(thread_cap(), static_cast<unsigned>(todo.size()));
        for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    int status = kOk;
    for (size_t i = 0; i < jobs.size(); ++i) {
        out << outs[i].str();
        err << errs[i].str();
        if (status == kOk) status = codes[i];
    }
    return status;
}

}  // namespace

int main(int argc, char** argv)
{
    return dispatch(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
