// Python bindings for the core operations: instance generation, QUBO/Ising
// compilation, evaluation, and the solver backends.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qopt/decode.hpp"
#include "qopt/errors.hpp"
#include "qopt/instance.hpp"
#include "qopt/ising.hpp"
#include "qopt/qubo.hpp"
#include "qopt/solvers.hpp"
#include "qopt/vqsim.hpp"

namespace py = pybind11;
using namespace qopt;

namespace {

std::map<std::pair<int, int>, double> pairs_to_map(
    const std::vector<std::tuple<int, int, double>>& entries) {
    std::map<std::pair<int, int>, double> out;
    for (const auto& [i, j, c] : entries) out[{std::min(i, j), std::max(i, j)}] += c;
    return out;
}

} // namespace

PYBIND11_MODULE(qopt, m) {
    m.doc() = "QUBO/Ising compilation and solvers for time-windowed routing "
              "and order picking";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);

    py::class_<Point>(m, "Point")
        .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
        .def_readwrite("x", &Point::x)
        .def_readwrite("y", &Point::y);

    py::class_<Area>(m, "Area")
        .def(py::init<double, double, double, double>(), py::arg("x_min") = 0.0,
             py::arg("y_min") = 0.0, py::arg("x_max") = 10.0, py::arg("y_max") = 10.0);

    py::class_<DistanceMatrix>(m, "DistanceMatrix")
        .def(py::init<>())
        .def_readwrite("d", &DistanceMatrix::d)
        .def("max_off_diagonal", &DistanceMatrix::max_off_diagonal)
        .def("min_off_diagonal", &DistanceMatrix::min_off_diagonal)
        .def("validate", &DistanceMatrix::validate);

    py::class_<SwpInstance>(m, "SwpInstance")
        .def(py::init<>())
        .def_readwrite("n_patients", &SwpInstance::n_patients)
        .def_readwrite("k_workers", &SwpInstance::k_workers)
        .def_readwrite("coordinates", &SwpInstance::coordinates)
        .def_readwrite("slot_start", &SwpInstance::slot_start)
        .def_readwrite("slot_duration", &SwpInstance::slot_duration)
        .def_readwrite("max_workload", &SwpInstance::max_workload)
        .def("validate", &SwpInstance::validate);

    py::class_<WeightMatrix>(m, "WeightMatrix")
        .def(py::init<>())
        .def_readwrite("w", &WeightMatrix::w)
        .def_readwrite("gamma", &WeightMatrix::gamma);

    py::class_<QRobotInstance>(m, "QRobotInstance")
        .def(py::init<>())
        .def_readwrite("n_items", &QRobotInstance::n_items)
        .def_readwrite("k_robots", &QRobotInstance::k_robots)
        .def_readwrite("capacity", &QRobotInstance::capacity)
        .def_readwrite("weights", &QRobotInstance::weights)
        .def_readwrite("distances", &QRobotInstance::distances)
        .def("validate", &QRobotInstance::validate);

    m.def("generate_swp_instance", &generate_swp_instance, py::arg("n_patients"),
          py::arg("k_workers"), py::arg("seed"), py::arg("area") = Area{},
          py::arg("slot_grid_minutes") = 15);
    m.def("generate_qrobot_instance", &generate_qrobot_instance, py::arg("n_items"),
          py::arg("k_robots"), py::arg("seed"), py::arg("area") = Area{},
          py::arg("capacity") = 45);
    m.def("euclidean_distances", &euclidean_distances);
    m.def("build_weight_matrix", &build_weight_matrix, py::arg("instance"),
          py::arg("distances"), py::arg("gamma"));
    m.def("swp_instance_to_json",
          py::overload_cast<const SwpInstance&, const DistanceMatrix&>(&instance_to_json));
    m.def("qrobot_instance_to_json",
          py::overload_cast<const QRobotInstance&>(&instance_to_json));

    py::class_<SlackEncoding>(m, "SlackEncoding")
        .def_readonly("bound", &SlackEncoding::bound)
        .def_readonly("bit_count", &SlackEncoding::bit_count)
        .def_readonly("bit_weights", &SlackEncoding::bit_weights)
        .def_readonly("var_indices", &SlackEncoding::var_indices);

    py::class_<QuboModel>(m, "QuboModel")
        .def(py::init<>())
        .def_readwrite("n_vars", &QuboModel::n_vars)
        .def_readwrite("constant", &QuboModel::constant)
        .def_readwrite("var_names", &QuboModel::var_names)
        .def_readonly("penalty_a", &QuboModel::penalty_a)
        .def_readonly("problem", &QuboModel::problem)
        .def_property(
            "quadratic",
            [](const QuboModel& model) {
                std::vector<std::tuple<int, int, double>> out;
                for (const auto& [key, c] : model.quadratic)
                    out.emplace_back(key.first, key.second, c);
                return out;
            },
            [](QuboModel& model, const std::vector<std::tuple<int, int, double>>& entries) {
                model.quadratic = pairs_to_map(entries);
            })
        .def_property(
            "linear",
            [](const QuboModel& model) {
                std::vector<std::pair<int, double>> out(model.linear.begin(),
                                                        model.linear.end());
                return out;
            },
            [](QuboModel& model, const std::vector<std::pair<int, double>>& entries) {
                model.linear.clear();
                for (const auto& [i, c] : entries) model.linear[i] += c;
            })
        .def("to_json", [](const QuboModel& model) { return qubo_to_json(model); });

    py::enum_<SwpExpansion>(m, "SwpExpansion")
        .value("PER_NODE", SwpExpansion::PerNode)
        .value("GROUPED", SwpExpansion::Grouped);

    m.def("build_swp_qubo", &build_swp_qubo, py::arg("instance"), py::arg("weights"),
          py::arg("penalty_a") = 0.0, py::arg("include_capacity") = false,
          py::arg("expansion") = SwpExpansion::PerNode);
    m.def("build_qrobot_qubo", &build_qrobot_qubo, py::arg("instance"),
          py::arg("penalty_a") = 0.0);
    m.def("evaluate_qubo", &evaluate_qubo);
    m.def("qubit_count_swp", &qubit_count_swp, py::arg("total_nodes"),
          py::arg("capacity_bound") = std::optional<long long>{});
    m.def("qubit_count_qrobot", &qubit_count_qrobot);
    m.def("count_solution_classes", &count_solution_classes);
    m.def("swp_var_index", &swp_var_index);
    m.def("qrobot_var_index", &qrobot_var_index);

    py::class_<IsingModel>(m, "IsingModel")
        .def(py::init<>())
        .def_readwrite("n_spins", &IsingModel::n_spins)
        .def_readwrite("fields", &IsingModel::fields)
        .def_readwrite("offset", &IsingModel::offset)
        .def_property(
            "couplings",
            [](const IsingModel& model) {
                std::vector<std::tuple<int, int, double>> out;
                for (const auto& [key, c] : model.couplings)
                    out.emplace_back(key.first, key.second, c);
                return out;
            },
            [](IsingModel& model, const std::vector<std::tuple<int, int, double>>& entries) {
                model.couplings = pairs_to_map(entries);
            })
        .def("to_json", [](const IsingModel& model) { return ising_to_json(model); });

    m.def("qubo_to_ising", &qubo_to_ising);
    m.def("ising_to_qubo", &ising_to_qubo);
    m.def("evaluate_ising", &evaluate_ising);
    m.def("external_field_from_q", &external_field_from_q);

    py::class_<PauliTerm>(m, "PauliTerm")
        .def_readonly("qubits", &PauliTerm::qubits)
        .def_readonly("coeff", &PauliTerm::coeff);
    py::class_<PauliTermList>(m, "PauliTermList")
        .def_readonly("n_qubits", &PauliTermList::n_qubits)
        .def_readonly("terms", &PauliTermList::terms);
    m.def("to_pauli_terms", &to_pauli_terms);

    py::class_<Solution>(m, "Solution")
        .def_readonly("bits", &Solution::bits)
        .def_readonly("energy", &Solution::energy)
        .def_readonly("backend", &Solution::backend)
        .def_readonly("seed", &Solution::seed)
        .def_readonly("evaluations", &Solution::evaluations);

    m.def("solve_exact",
          py::overload_cast<const QuboModel&, int>(&solve_exact),
          py::arg("model"), py::arg("limit") = 24);
    m.def("solve_exact_ising",
          py::overload_cast<const IsingModel&, int>(&solve_exact),
          py::arg("model"), py::arg("limit") = 24);

    py::class_<AnnealSchedule>(m, "AnnealSchedule")
        .def(py::init<>())
        .def_readwrite("t_start", &AnnealSchedule::t_start)
        .def_readwrite("t_end", &AnnealSchedule::t_end)
        .def_readwrite("steps", &AnnealSchedule::steps)
        .def_readwrite("sweeps_per_step", &AnnealSchedule::sweeps_per_step)
        .def_readwrite("restarts", &AnnealSchedule::restarts);

    m.def("solve_simulated_annealing", &solve_simulated_annealing, py::arg("model"),
          py::arg("schedule") = AnnealSchedule{}, py::arg("seed") = 1);

    py::class_<BacktrackResult>(m, "BacktrackResult")
        .def_readonly("tours", &BacktrackResult::tours)
        .def_readonly("cost", &BacktrackResult::cost)
        .def_readonly("nodes_explored", &BacktrackResult::nodes_explored);
    m.def("solve_backtracking", &solve_backtracking, py::arg("instance"),
          py::arg("weights"), py::arg("max_patients") = 10);

    py::enum_<AnsatzForm>(m, "AnsatzForm")
        .value("RY", AnsatzForm::RY)
        .value("RYRZ", AnsatzForm::RYRZ);
    py::enum_<Entanglement>(m, "Entanglement")
        .value("LINEAR", Entanglement::Linear)
        .value("FULL", Entanglement::Full)
        .value("NONE", Entanglement::None);
    py::enum_<OptimizerKind>(m, "OptimizerKind")
        .value("SPSA", OptimizerKind::Spsa)
        .value("NELDER_MEAD", OptimizerKind::NelderMead);

    py::class_<ParamCircuit>(m, "ParamCircuit")
        .def_readonly("n_qubits", &ParamCircuit::n_qubits)
        .def_readonly("depth", &ParamCircuit::depth)
        .def_readonly("param_count", &ParamCircuit::param_count);
    m.def("build_ansatz", &build_ansatz, py::arg("n_qubits"), py::arg("depth"),
          py::arg("form"), py::arg("entanglement"));

    py::class_<VqeResult>(m, "VqeResult")
        .def_readonly("best_params", &VqeResult::best_params)
        .def_readonly("best_energy", &VqeResult::best_energy)
        .def_readonly("history", &VqeResult::history)
        .def_readonly("most_probable_bits", &VqeResult::most_probable_bits)
        .def_readonly("probability", &VqeResult::probability)
        .def_readonly("evaluations", &VqeResult::evaluations);
    m.def("run_vqe", &run_vqe, py::arg("terms"), py::arg("ansatz"), py::arg("optimizer"),
          py::arg("iters"), py::arg("seed"), py::arg("max_qubits") = 24);

    py::class_<QaoaResult>(m, "QaoaResult")
        .def_readonly("gammas", &QaoaResult::gammas)
        .def_readonly("betas", &QaoaResult::betas)
        .def_readonly("best_energy", &QaoaResult::best_energy)
        .def_readonly("history", &QaoaResult::history)
        .def_readonly("most_probable_bits", &QaoaResult::most_probable_bits)
        .def_readonly("probability", &QaoaResult::probability)
        .def_readonly("evaluations", &QaoaResult::evaluations);
    m.def("run_qaoa", &run_qaoa, py::arg("terms"), py::arg("p"), py::arg("optimizer"),
          py::arg("iters"), py::arg("seed"),
          py::arg("init_angles") = std::optional<std::vector<double>>{},
          py::arg("max_qubits") = 24);

    py::class_<Routes>(m, "Routes")
        .def_readonly("tours", &Routes::tours)
        .def_readonly("total_cost", &Routes::total_cost)
        .def_readonly("workers_used", &Routes::workers_used);
    py::class_<Violation>(m, "Violation")
        .def_readonly("constraint", &Violation::constraint)
        .def_readonly("detail", &Violation::detail);
    py::class_<FeasibilityReport>(m, "FeasibilityReport")
        .def_readonly("feasible", &FeasibilityReport::feasible)
        .def_readonly("violations", &FeasibilityReport::violations)
        .def_readonly("recomputed_cost", &FeasibilityReport::recomputed_cost);
    py::class_<RobotVisit>(m, "RobotVisit")
        .def_readonly("time", &RobotVisit::time)
        .def_readonly("node", &RobotVisit::node);
    py::class_<RobotPlan::Robot>(m, "Robot")
        .def_readonly("robot", &RobotPlan::Robot::robot)
        .def_readonly("visits", &RobotPlan::Robot::visits)
        .def_readonly("load", &RobotPlan::Robot::load);
    py::class_<RobotPlan>(m, "RobotPlan")
        .def_readonly("robots", &RobotPlan::robots)
        .def_readonly("total_distance", &RobotPlan::total_distance);

    m.def("decode_swp", &decode_swp);
    m.def("decode_qrobot", &decode_qrobot);
}
