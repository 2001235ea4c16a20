#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qopt/ising.hpp"

namespace qopt {

// Dense 2^n amplitude vector. Qubit q maps to bit q of the amplitude index
// (little-endian), so basis state |b> has amplitude index sum_q b_q 2^q.
struct Statevector {
    int n_qubits = 0;
    std::vector<std::complex<double>> amp;

    static Statevector zero_state(int n_qubits, int max_qubits = 24);
    static Statevector plus_state(int n_qubits, int max_qubits = 24);

    double norm() const;
    std::vector<int> most_probable_bits() const;
    double max_probability() const;

    void apply_rx(int q, double theta);
    void apply_ry(int q, double theta);
    void apply_rz(int q, double theta);
    void apply_h(int q);
    void apply_x(int q);
    void apply_z(int q);
    void apply_cnot(int control, int target);
    void apply_cz(int a, int b);
    void apply_crz(int control, int target, double theta);
};

enum class GateKind { RX, RY, RZ, H, X, Z, CNOT, CZ, CRZ };

// One gate in a circuit; param_slot >= 0 marks a bound rotation parameter.
struct GateOp {
    GateKind kind = GateKind::RY;
    int target = 0;
    int control = -1;
    int param_slot = -1;
    double angle = 0.0;
};

void apply_gate(Statevector& state, const GateOp& gate);

enum class AnsatzForm { RY, RYRZ };
enum class Entanglement { Linear, Full, None };

// Layered variational form: rotation layer, then (entangler + rotation
// layer) repeated `depth` times. Parameter counts: RY n(d+1), RYRZ 2n(d+1).
// Entanglers are CZ.
struct ParamCircuit {
    int n_qubits = 0;
    int depth = 0;
    AnsatzForm form = AnsatzForm::RY;
    Entanglement entanglement = Entanglement::Linear;
    std::vector<GateOp> gates;
    int param_count = 0;
};

ParamCircuit build_ansatz(int n_qubits, int depth, AnsatzForm form,
                          Entanglement entanglement);

Statevector apply_circuit(const ParamCircuit& circuit,
                          const std::vector<double>& params,
                          int max_qubits = 24);

// Exact expectation of a diagonal Hamiltonian: sum_b |amp_b|^2 E(b).
double expectation(const Statevector& state, const PauliTermList& terms);

// Seeded multinomial sampling estimate of the same expectation, for shot
// realism; shots >= 1.
double sampled_expectation(const Statevector& state, const PauliTermList& terms,
                           int shots, std::uint64_t seed);

using Objective = std::function<double(const std::vector<double>&)>;

struct SpsaConfig {
    double a = 0.25;         // initial step scale
    double c = 0.15;         // perturbation radius
    double alpha = 0.602;    // step decay exponent
    double gamma_decay = 0.101;
    double max_step = 1.0;   // per-component clamp on the update
    int iters = 100;
};

struct NelderMeadConfig {
    int iters = 200;
    double step = 0.5; // initial simplex spread
};

struct OptResult {
    std::vector<double> best_params;
    double best_value = 0.0;
    std::vector<std::pair<int, double>> history; // one entry per iteration
    long long evaluations = 0;
};

// Two-measurement simultaneous perturbation: each iteration evaluates the
// objective at theta +/- c_k * Delta with Rademacher Delta. Exactly
// 2 * iters evaluations, deterministic per seed.
OptResult spsa_minimize(const Objective& objective, std::vector<double> init,
                        const SpsaConfig& config, std::uint64_t seed);

OptResult nelder_mead_minimize(const Objective& objective, std::vector<double> init,
                               const NelderMeadConfig& config);

enum class OptimizerKind { Spsa, NelderMead };

struct VqeResult {
    std::vector<double> best_params;
    double best_energy = 0.0;
    std::vector<std::pair<int, double>> history;
    std::vector<int> most_probable_bits;
    double probability = 0.0;
    std::uint64_t seed = 0;
    long long evaluations = 0;
};

VqeResult run_vqe(const PauliTermList& terms, const ParamCircuit& ansatz,
                  OptimizerKind optimizer, int iters, std::uint64_t seed,
                  int max_qubits = 24);

struct QaoaResult {
    std::vector<double> gammas;
    std::vector<double> betas;
    double best_energy = 0.0;
    std::vector<std::pair<int, double>> history;
    std::vector<int> most_probable_bits;
    double probability = 0.0;
    std::uint64_t seed = 0;
    long long evaluations = 0;
};

// Alternating exact-diagonal cost phases and RX(2 beta) mixers on |+>^n.
// p = 0 returns the bare |+>^n expectation. init_angles (gammas then betas)
// warm-starts the optimizer; its energy is recorded, so the optimized result
// never exceeds it.
QaoaResult run_qaoa(const PauliTermList& terms, int p, OptimizerKind optimizer,
                    int iters, std::uint64_t seed,
                    const std::optional<std::vector<double>>& init_angles = {},
                    int max_qubits = 24);

std::string vqe_result_to_json(const VqeResult& result);
std::string qaoa_result_to_json(const QaoaResult& result);

} // namespace qopt
