// Command-line front end: generate instances, compile QUBO/Ising models,
// run the solver backends, and emit the reproduction tables.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qopt/decode.hpp"
#include "qopt/errors.hpp"
#include "qopt/instance.hpp"
#include "qopt/ising.hpp"
#include "qopt/qubo.hpp"
#include "qopt/solvers.hpp"
#include "qopt/vqsim.hpp"

namespace {

using nlohmann::json;

int max_qubits_guard() {
    if (const char* env = std::getenv("QOPT_MAX_QUBITS")) {
        const int value = std::atoi(env);
        if (value >= 1) return value;
    }
    return 24;
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qopt::ParseError("cannot write file: " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qopt::ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

qopt::Area parse_area(const std::string& spec) {
    qopt::Area area;
    if (spec.empty()) return area;
    double v[4];
    if (std::sscanf(spec.c_str(), "%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3]) != 4)
        throw qopt::ParameterError("area: expected x_min,y_min,x_max,y_max");
    return qopt::Area{v[0], v[1], v[2], v[3]};
}

std::pair<int, int> parse_sizes(const std::string& spec) {
    int lo = 0, hi = 0;
    if (std::sscanf(spec.c_str(), "%d..%d", &lo, &hi) == 2) return {lo, hi};
    if (std::sscanf(spec.c_str(), "%d", &lo) == 1) return {lo, lo};
    throw qopt::ParameterError("sizes: expected a single size or a..b");
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// The published 12x12 coefficient matrix of the 4-node worked example and
// the h values printed next to it.
const std::vector<std::vector<double>> kWorkedExampleQ = {
    {0, 4, 4, 0, 2, 2, 0, 2, 2, 0, 2, 2},
    {0, 0, 4, 0, 2, 2, 0, 2, 2, 0, 2, 2},
    {0, 0, 0, 0, 2, 2, 0, 2, 2, 0, 2, 2},
    {0, 0, 0, 0, 2, 2, 4, 2, 2, 4, 2, 2},
    {0, 0, 0, 0, 0, 4, 2, 2, 4, 2, 2, 4},
    {0, 0, 0, 0, 0, 0, 2, 2, 4, 2, 2, 2},
    {0, 0, 0, 0, 0, 0, 0, 2, 2, 4, 2, 2},
    {0, 0, 0, 0, 0, 0, 0, 0, 4, 2, 4, 4},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 2, 2},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 2},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
};
const std::vector<double> kPublishedHField = {5, 5, 5, 5, 7, 6.5, 5, 7, 7, 4.5, 6.5, 7};
const std::vector<long long> kPublishedQubitCounts = {18,  26,  36,  48,  62, 78,
                                                      96, 116, 138, 162, 188};

struct GenOptions {
    std::string kind;
    int n = 4;
    int k = 1;
    std::uint64_t seed = 1;
    int capacity = 45;
    int grid = 15;
    std::string area;
    std::string output;
};

int run_gen(const GenOptions& opt) {
    const qopt::Area area = parse_area(opt.area);
    if (opt.kind == "swp") {
        auto [inst, dist] = qopt::generate_swp_instance(opt.n, opt.k, opt.seed, area, opt.grid);
        write_output(opt.output, qopt::instance_to_json(inst, dist));
    } else {
        const auto inst =
            qopt::generate_qrobot_instance(opt.n, opt.k, opt.seed, area, opt.capacity);
        write_output(opt.output, qopt::instance_to_json(inst));
    }
    return 0;
}

struct BuildOptions {
    std::string input;
    std::string output;
    double gamma = 1.0;
    double penalty = 0.0;
    bool ising = false;
    bool capacity = false;
    std::string expansion = "per-node";
};

int run_build(const BuildOptions& opt) {
    const std::string instance_text = read_text(opt.input);
    const auto doc = qopt::instance_from_json(instance_text);

    qopt::QuboModel model;
    if (std::holds_alternative<std::pair<qopt::SwpInstance, qopt::DistanceMatrix>>(doc)) {
        const auto& [inst, dist] = std::get<0>(doc);
        const auto weights = qopt::build_weight_matrix(inst, dist, opt.gamma);
        const auto expansion = opt.expansion == "grouped" ? qopt::SwpExpansion::Grouped
                                                          : qopt::SwpExpansion::PerNode;
        model = qopt::build_swp_qubo(inst, weights, opt.penalty, opt.capacity, expansion);
    } else {
        model = qopt::build_qrobot_qubo(std::get<qopt::QRobotInstance>(doc), opt.penalty);
    }

    if (opt.ising) {
        const auto ising = qopt::qubo_to_ising(model);
        write_output(opt.output, qopt::ising_to_json(ising, instance_text));
    } else {
        write_output(opt.output, qopt::qubo_to_json(model, instance_text));
    }
    return 0;
}

struct SolveOptions {
    std::string input;
    std::string output;
    std::string backend;
    std::uint64_t seed = 1;
    int depth = 2;
    int p = 1;
    int iters = 300;
    int limit = 24;
    double gamma = 1.0;
    std::string optimizer = "spsa";
    std::string form = "ryrz";
    std::string entanglement = "full";
};

struct LoadedModel {
    qopt::QuboModel qubo;
    qopt::IsingModel ising;
    bool from_ising = false;
    std::string instance_text;
};

LoadedModel load_model(const std::string& path) {
    LoadedModel loaded;
    const std::string text = read_text(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw qopt::ParseError(std::string("malformed model document: ") + e.what());
    }
    const std::string kind = doc.value("kind", "");
    if (kind == "qubo") {
        loaded.qubo = qopt::qubo_from_json(text, &loaded.instance_text);
        loaded.ising = qopt::qubo_to_ising(loaded.qubo);
    } else if (kind == "ising") {
        loaded.from_ising = true;
        loaded.ising = qopt::ising_from_json(text, &loaded.instance_text);
        loaded.qubo = qopt::ising_to_qubo(loaded.ising);
    } else {
        throw qopt::ValidationError("model document: expected kind \"qubo\" or \"ising\"");
    }
    return loaded;
}

json decode_to_json(const std::vector<int>& bits, const LoadedModel& loaded,
                    double gamma) {
    if (loaded.instance_text.empty()) return nullptr;
    const auto doc = qopt::instance_from_json(loaded.instance_text);
    if (std::holds_alternative<std::pair<qopt::SwpInstance, qopt::DistanceMatrix>>(doc)) {
        const auto& [inst, dist] = std::get<0>(doc);
        const auto weights = qopt::build_weight_matrix(inst, dist, gamma);
        const auto [routes, report] = qopt::decode_swp(bits, loaded.qubo, inst, weights);
        return json::parse(qopt::routes_to_json(routes, report));
    }
    const auto& inst = std::get<qopt::QRobotInstance>(doc);
    const auto [plan, report] = qopt::decode_qrobot(bits, loaded.qubo, inst);
    return json::parse(qopt::robot_plan_to_json(plan, report));
}

int run_solve(const SolveOptions& opt) {
    const LoadedModel loaded = load_model(opt.input);
    const int guard = max_qubits_guard();

    json result;
    std::vector<int> bits;

    if (opt.backend == "exact") {
        const auto sol = loaded.from_ising ? qopt::solve_exact(loaded.ising, opt.limit)
                                           : qopt::solve_exact(loaded.qubo, opt.limit);
        bits = sol.bits;
        result["solution"] = json::parse(qopt::solution_to_json(sol));
    } else if (opt.backend == "sa") {
        qopt::AnnealSchedule schedule;
        const auto sol = qopt::solve_simulated_annealing(loaded.ising, schedule, opt.seed);
        bits = sol.bits;
        result["solution"] = json::parse(qopt::solution_to_json(sol));
    } else if (opt.backend == "vqe") {
        const auto terms = qopt::to_pauli_terms(loaded.ising);
        const auto form = opt.form == "ry" ? qopt::AnsatzForm::RY : qopt::AnsatzForm::RYRZ;
        const auto ent = opt.entanglement == "linear" ? qopt::Entanglement::Linear
                        : opt.entanglement == "none"  ? qopt::Entanglement::None
                                                      : qopt::Entanglement::Full;
        const auto ansatz = qopt::build_ansatz(terms.n_qubits, opt.depth, form, ent);
        const auto optimizer = opt.optimizer == "nelder-mead"
                                   ? qopt::OptimizerKind::NelderMead
                                   : qopt::OptimizerKind::Spsa;
        const auto vqe = qopt::run_vqe(terms, ansatz, optimizer, opt.iters, opt.seed, guard);
        bits = vqe.most_probable_bits;
        result["solution"] = json::parse(qopt::vqe_result_to_json(vqe));
    } else if (opt.backend == "qaoa") {
        const auto terms = qopt::to_pauli_terms(loaded.ising);
        const auto optimizer = opt.optimizer == "nelder-mead"
                                   ? qopt::OptimizerKind::NelderMead
                                   : qopt::OptimizerKind::Spsa;
        const auto qaoa =
            qopt::run_qaoa(terms, opt.p, optimizer, opt.iters, opt.seed, {}, guard);
        bits = qaoa.most_probable_bits;
        result["solution"] = json::parse(qopt::qaoa_result_to_json(qaoa));
    } else { // backtracking
        if (loaded.instance_text.empty())
            throw qopt::ValidationError(
                "backtracking needs the instance embedded in the model file");
        const auto doc = qopt::instance_from_json(loaded.instance_text);
        if (!std::holds_alternative<std::pair<qopt::SwpInstance, qopt::DistanceMatrix>>(doc))
            throw qopt::ValidationError("backtracking only applies to swp instances");
        const auto& [inst, dist] = std::get<0>(doc);
        const auto weights = qopt::build_weight_matrix(inst, dist, opt.gamma);
        const auto bt = qopt::solve_backtracking(inst, weights);
        json solution;
        solution["backend"] = "backtracking";
        solution["tours"] = bt.tours;
        solution["cost"] = bt.cost;
        solution["evaluations"] = bt.nodes_explored;
        result["solution"] = std::move(solution);
    }

    if (!bits.empty()) {
        const json decoded = decode_to_json(bits, loaded, opt.gamma);
        if (!decoded.is_null()) result["decoded"] = decoded;
    }
    write_output(opt.output, result.dump(2) + "\n");
    return 0;
}

struct BenchOptions {
    std::string suite;
    std::string sizes;
    int seeds = 1;
    std::string backends = "exact";
    int k = 1;
    double gamma = 1.0;
    int capacity = 45;
    std::string output;
};

int run_bench(const BenchOptions& opt) {
    const auto [lo, hi] = parse_sizes(opt.sizes);
    if (lo < 1 || hi < lo) throw qopt::ParameterError("sizes: bad range");
    const auto backends = split_csv(opt.backends);
    if (backends.empty()) throw qopt::ParameterError("backends: empty list");
    const int guard = max_qubits_guard();

    std::ostringstream csv;
    csv << "kind,n,k,qubits,backend,seed,energy,feasible,cost,evaluations\n";

    for (int n = lo; n <= hi; ++n) {
        for (std::uint64_t seed = 1; seed <= static_cast<std::uint64_t>(opt.seeds); ++seed) {
            if (opt.suite == "swp") {
                auto [inst, dist] = qopt::generate_swp_instance(n, opt.k, seed);
                const auto weights = qopt::build_weight_matrix(inst, dist, opt.gamma);
                const auto model = qopt::build_swp_qubo(inst, weights);
                for (const auto& backend : backends) {
                    double energy = 0, cost = 0;
                    bool feasible = false;
                    long long evaluations = 0;
                    if (backend == "backtracking") {
                        const auto bt = qopt::solve_backtracking(inst, weights);
                        energy = cost = bt.cost;
                        feasible = true;
                        evaluations = bt.nodes_explored;
                    } else {
                        qopt::Solution sol;
                        if (backend == "exact") {
                            sol = qopt::solve_exact(model, guard);
                        } else if (backend == "sa") {
                            sol = qopt::solve_simulated_annealing(
                                qopt::qubo_to_ising(model), qopt::AnnealSchedule{}, seed);
                        } else if (backend == "vqe") {
                            const auto terms = qopt::to_pauli_terms(qopt::qubo_to_ising(model));
                            const auto ansatz = qopt::build_ansatz(
                                terms.n_qubits, 2, qopt::AnsatzForm::RYRZ,
                                qopt::Entanglement::Full);
                            const auto vqe = qopt::run_vqe(
                                terms, ansatz, qopt::OptimizerKind::Spsa, 200, seed, guard);
                            sol.bits = vqe.most_probable_bits;
                            sol.energy = vqe.best_energy;
                            sol.evaluations = vqe.evaluations;
                        } else if (backend == "qaoa") {
                            const auto terms = qopt::to_pauli_terms(qopt::qubo_to_ising(model));
                            const auto qaoa = qopt::run_qaoa(
                                terms, 1, qopt::OptimizerKind::Spsa, 200, seed, {}, guard);
                            sol.bits = qaoa.most_probable_bits;
                            sol.energy = qaoa.best_energy;
                            sol.evaluations = qaoa.evaluations;
                        } else {
                            throw qopt::ParameterError("unknown backend: " + backend);
                        }
                        const auto [routes, report] =
                            qopt::decode_swp(sol.bits, model, inst, weights);
                        energy = sol.energy;
                        feasible = report.feasible;
                        cost = report.recomputed_cost;
                        evaluations = sol.evaluations;
                    }
                    csv << "swp," << n << "," << opt.k << "," << model.n_vars << ","
                        << backend << "," << seed << "," << format_double(energy) << ","
                        << (feasible ? 1 : 0) << "," << format_double(cost) << ","
                        << evaluations << "\n";
                }
            } else { // qrobot
                const auto inst =
                    qopt::generate_qrobot_instance(n, opt.k, seed, qopt::Area{}, opt.capacity);
                const auto model = qopt::build_qrobot_qubo(inst);
                for (const auto& backend : backends) {
                    qopt::Solution sol;
                    if (backend == "exact") {
                        sol = qopt::solve_exact(model, guard);
                    } else if (backend == "sa") {
                        sol = qopt::solve_simulated_annealing(
                            qopt::qubo_to_ising(model), qopt::AnnealSchedule{}, seed);
                    } else if (backend == "vqe") {
                        const auto terms = qopt::to_pauli_terms(qopt::qubo_to_ising(model));
                        const auto ansatz = qopt::build_ansatz(
                            terms.n_qubits, 2, qopt::AnsatzForm::RYRZ,
                            qopt::Entanglement::Full);
                        const auto vqe = qopt::run_vqe(terms, ansatz,
                                                       qopt::OptimizerKind::Spsa, 200,
                                                       seed, guard);
                        sol.bits = vqe.most_probable_bits;
                        sol.energy = vqe.best_energy;
                        sol.evaluations = vqe.evaluations;
                    } else if (backend == "qaoa") {
                        const auto terms = qopt::to_pauli_terms(qopt::qubo_to_ising(model));
                        const auto qaoa = qopt::run_qaoa(
                            terms, 1, qopt::OptimizerKind::Spsa, 200, seed, {}, guard);
                        sol.bits = qaoa.most_probable_bits;
                        sol.energy = qaoa.best_energy;
                        sol.evaluations = qaoa.evaluations;
                    } else {
                        throw qopt::ParameterError(
                            "backend " + backend + " is not available for the qrobot suite");
                    }
                    const auto [plan, report] = qopt::decode_qrobot(sol.bits, model, inst);
                    csv << "qrobot," << n << "," << opt.k << "," << model.n_vars << ","
                        << backend << "," << seed << "," << format_double(sol.energy) << ","
                        << (report.feasible ? 1 : 0) << ","
                        << format_double(report.recomputed_cost) << ","
                        << sol.evaluations << "\n";
                }
            }
        }
    }
    write_output(opt.output, csv.str());
    return 0;
}

int run_tables(const std::string& which) {
    if (which == "qubit-counts") {
        bool ok = true;
        std::printf("items qubits expected\n");
        for (int n = 2; n <= 12; ++n) {
            const long long computed = qopt::qubit_count_qrobot(n, 1, 45);
            const long long expected = kPublishedQubitCounts[n - 2];
            std::printf("%5d %6lld %8lld%s\n", n, computed, expected,
                        computed == expected ? "" : "  MISMATCH");
            if (computed != expected) ok = false;
        }
        return ok ? 0 : 3;
    }
    // hfield
    const auto computed = qopt::external_field_from_q(kWorkedExampleQ);
    bool ok = true;
    std::printf("i computed published\n");
    for (std::size_t i = 0; i < computed.size(); ++i) {
        const bool match = computed[i] == kPublishedHField[i];
        std::printf("%2zu %8s %9s%s\n", i + 1, format_double(computed[i]).c_str(),
                    format_double(kPublishedHField[i]).c_str(),
                    match ? "" : "  MISMATCH");
        if (!match) ok = false;
    }
    return ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"QUBO/Ising toolkit for time-windowed routing and order picking"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a problem instance");
    gen_cmd->add_option("kind", gen.kind, "instance kind")
        ->required()
        ->check(CLI::IsMember({"swp", "qrobot"}));
    gen_cmd->add_option("--n", gen.n, "patients or items")->required();
    gen_cmd->add_option("--k", gen.k, "workers or robots");
    gen_cmd->add_option("--seed", gen.seed, "generator seed");
    gen_cmd->add_option("--capacity", gen.capacity, "robot capacity (qrobot)");
    gen_cmd->add_option("--grid", gen.grid, "slot grid in minutes (swp)");
    gen_cmd->add_option("--area", gen.area, "bounding box x_min,y_min,x_max,y_max");
    gen_cmd->add_option("-o,--output", gen.output, "output file (default stdout)");

    BuildOptions build;
    auto* build_cmd = app.add_subcommand("build", "compile an instance to QUBO or Ising");
    build_cmd->add_option("-i,--input", build.input, "instance file")->required();
    build_cmd->add_option("--gamma", build.gamma, "time-window weight");
    build_cmd->add_option("--penalty", build.penalty, "Lagrange strength A (0 = auto)");
    build_cmd->add_flag("--ising", build.ising, "emit the Ising form");
    build_cmd->add_flag("--capacity", build.capacity, "include the workload cap (swp)");
    build_cmd->add_option("--expansion", build.expansion, "swp penalty expansion")
        ->check(CLI::IsMember({"per-node", "grouped"}));
    build_cmd->add_option("-o,--output", build.output, "output file (default stdout)");

    SolveOptions solve;
    auto* solve_cmd = app.add_subcommand("solve", "run a backend on a model file");
    solve_cmd->add_option("-i,--input", solve.input, "model file")->required();
    solve_cmd->add_option("--backend", solve.backend, "solver backend")
        ->required()
        ->check(CLI::IsMember({"exact", "sa", "vqe", "qaoa", "backtracking"}));
    solve_cmd->add_option("--seed", solve.seed, "solver seed");
    solve_cmd->add_option("--depth", solve.depth, "ansatz depth (vqe)");
    solve_cmd->add_option("--p", solve.p, "qaoa layers");
    solve_cmd->add_option("--iters", solve.iters, "optimizer iterations");
    solve_cmd->add_option("--limit", solve.limit, "exact enumeration limit");
    solve_cmd->add_option("--gamma", solve.gamma, "time-window weight for decoding");
    solve_cmd->add_option("--optimizer", solve.optimizer, "classical optimizer")
        ->check(CLI::IsMember({"spsa", "nelder-mead"}));
    solve_cmd->add_option("--form", solve.form, "ansatz form")
        ->check(CLI::IsMember({"ry", "ryrz"}));
    solve_cmd->add_option("--entanglement", solve.entanglement, "entanglement pattern")
        ->check(CLI::IsMember({"linear", "full", "none"}));
    solve_cmd->add_option("-o,--output", solve.output, "output file (default stdout)");

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "benchmark backends, CSV output");
    bench_cmd->add_option("--suite", bench.suite, "problem family")
        ->required()
        ->check(CLI::IsMember({"swp", "qrobot"}));
    bench_cmd->add_option("--sizes", bench.sizes, "size or range a..b")->required();
    bench_cmd->add_option("--seeds", bench.seeds, "number of seeds (1..s)");
    bench_cmd->add_option("--backends", bench.backends, "comma-separated backends");
    bench_cmd->add_option("--k", bench.k, "workers or robots");
    bench_cmd->add_option("--gamma", bench.gamma, "time-window weight");
    bench_cmd->add_option("--capacity", bench.capacity, "robot capacity");
    bench_cmd->add_option("-o,--output", bench.output, "output file (default stdout)");

    std::string tables_which;
    auto* tables_cmd = app.add_subcommand("tables", "print the reproduction tables");
    tables_cmd->add_option("which", tables_which, "table to reproduce")
        ->required()
        ->check(CLI::IsMember({"qubit-counts", "hfield"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (build_cmd->parsed()) return run_build(build);
        if (solve_cmd->parsed()) return run_solve(solve);
        if (bench_cmd->parsed()) return run_bench(bench);
        if (tables_cmd->parsed()) return run_tables(tables_which);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
