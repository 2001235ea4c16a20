#include "qopt/vqsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "qopt/errors.hpp"
#include "qopt/rng.hpp"

namespace qopt {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_qubit_cap(int n_qubits, int max_qubits) {
    if (n_qubits < 1) throw ParameterError("statevector: need at least one qubit");
    if (n_qubits > max_qubits)
        throw SizeError("statevector: " + std::to_string(n_qubits) +
                        " qubits exceed the cap of " + std::to_string(max_qubits));
}

using cd = std::complex<double>;

} // namespace

Statevector Statevector::zero_state(int n_qubits, int max_qubits) {
    check_qubit_cap(n_qubits, max_qubits);
    Statevector s;
    s.n_qubits = n_qubits;
    s.amp.assign(std::size_t{1} << n_qubits, cd{0.0, 0.0});
    s.amp[0] = cd{1.0, 0.0};
    return s;
}

Statevector Statevector::plus_state(int n_qubits, int max_qubits) {
    check_qubit_cap(n_qubits, max_qubits);
    Statevector s;
    s.n_qubits = n_qubits;
    const double a = 1.0 / std::sqrt(static_cast<double>(std::size_t{1} << n_qubits));
    s.amp.assign(std::size_t{1} << n_qubits, cd{a, 0.0});
    return s;
}

double Statevector::norm() const {
    double sum = 0.0;
    for (const auto& a : amp) sum += std::norm(a);
    return std::sqrt(sum);
}

std::vector<int> Statevector::most_probable_bits() const {
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t i = 0; i < amp.size(); ++i) {
        const double p = std::norm(amp[i]);
        if (p > best_p) {
            best_p = p;
            best = i;
        }
    }
    std::vector<int> bits(n_qubits);
    for (int q = 0; q < n_qubits; ++q) bits[q] = static_cast<int>((best >> q) & 1u);
    return bits;
}

double Statevector::max_probability() const {
    double best_p = 0.0;
    for (const auto& a : amp) best_p = std::max(best_p, std::norm(a));
    return best_p;
}

namespace {

void check_target(const Statevector& s, int q) {
    if (q < 0 || q >= s.n_qubits)
        throw ParameterError("gate target out of range: " + std::to_string(q));
}

// Applies a 2x2 unitary to the target qubit subspace.
void apply_single(Statevector& s, int q, cd u00, cd u01, cd u10, cd u11) {
    check_target(s, q);
    const std::size_t step = std::size_t{1} << q;
    const std::size_t size = s.amp.size();
    for (std::size_t base = 0; base < size; base += 2 * step) {
        for (std::size_t off = 0; off < step; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + step;
            const cd a = s.amp[i0];
            const cd b = s.amp[i1];
            s.amp[i0] = u00 * a + u01 * b;
            s.amp[i1] = u10 * a + u11 * b;
        }
    }
}

} // namespace

void Statevector::apply_rx(int q, double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    apply_single(*this, q, cd{c, 0}, cd{0, -s}, cd{0, -s}, cd{c, 0});
}

void Statevector::apply_ry(int q, double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    apply_single(*this, q, cd{c, 0}, cd{-s, 0}, cd{s, 0}, cd{c, 0});
}

void Statevector::apply_rz(int q, double theta) {
    const cd lo = std::polar(1.0, -theta / 2.0);
    const cd hi = std::polar(1.0, theta / 2.0);
    apply_single(*this, q, lo, cd{0, 0}, cd{0, 0}, hi);
}

void Statevector::apply_h(int q) {
    const double r = 1.0 / std::sqrt(2.0);
    apply_single(*this, q, cd{r, 0}, cd{r, 0}, cd{r, 0}, cd{-r, 0});
}

void Statevector::apply_x(int q) {
    apply_single(*this, q, cd{0, 0}, cd{1, 0}, cd{1, 0}, cd{0, 0});
}

void Statevector::apply_z(int q) {
    apply_single(*this, q, cd{1, 0}, cd{0, 0}, cd{0, 0}, cd{-1, 0});
}

void Statevector::apply_cnot(int control, int target) {
    check_target(*this, control);
    check_target(*this, target);
    if (control == target) throw ParameterError("cnot: control equals target");
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amp.size(); ++i)
        if ((i & cbit) && !(i & tbit)) std::swap(amp[i], amp[i | tbit]);
}

void Statevector::apply_cz(int a, int b) {
    check_target(*this, a);
    check_target(*this, b);
    if (a == b) throw ParameterError("cz: identical qubits");
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    for (std::size_t i = 0; i < amp.size(); ++i)
        if ((i & mask) == mask) amp[i] = -amp[i];
}

void Statevector::apply_crz(int control, int target, double theta) {
    check_target(*this, control);
    check_target(*this, target);
    if (control == target) throw ParameterError("crz: control equals target");
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    const cd lo = std::polar(1.0, -theta / 2.0);
    const cd hi = std::polar(1.0, theta / 2.0);
    for (std::size_t i = 0; i < amp.size(); ++i)
        if (i & cbit) amp[i] *= (i & tbit) ? hi : lo;
}

void apply_gate(Statevector& state, const GateOp& gate) {
    switch (gate.kind) {
    case GateKind::RX: state.apply_rx(gate.target, gate.angle); break;
    case GateKind::RY: state.apply_ry(gate.target, gate.angle); break;
    case GateKind::RZ: state.apply_rz(gate.target, gate.angle); break;
    case GateKind::H: state.apply_h(gate.target); break;
    case GateKind::X: state.apply_x(gate.target); break;
    case GateKind::Z: state.apply_z(gate.target); break;
    case GateKind::CNOT: state.apply_cnot(gate.control, gate.target); break;
    case GateKind::CZ: state.apply_cz(gate.control, gate.target); break;
    case GateKind::CRZ: state.apply_crz(gate.control, gate.target, gate.angle); break;
    default: throw ParameterError("unknown gate kind");
    }
}

ParamCircuit build_ansatz(int n_qubits, int depth, AnsatzForm form,
                          Entanglement entanglement) {
    if (n_qubits < 1) throw ParameterError("build_ansatz: need at least one qubit");
    if (depth < 0) throw ParameterError("build_ansatz: depth must be >= 0");

    ParamCircuit c;
    c.n_qubits = n_qubits;
    c.depth = depth;
    c.form = form;
    c.entanglement = entanglement;

    int slot = 0;
    const auto rotation_layer = [&]() {
        for (int q = 0; q < n_qubits; ++q)
            c.gates.push_back(GateOp{GateKind::RY, q, -1, slot++, 0.0});
        if (form == AnsatzForm::RYRZ)
            for (int q = 0; q < n_qubits; ++q)
                c.gates.push_back(GateOp{GateKind::RZ, q, -1, slot++, 0.0});
    };
    const auto entangle_layer = [&]() {
        switch (entanglement) {
        case Entanglement::Linear:
            for (int q = 0; q + 1 < n_qubits; ++q)
                c.gates.push_back(GateOp{GateKind::CZ, q + 1, q, -1, 0.0});
            break;
        case Entanglement::Full:
            for (int a = 0; a < n_qubits; ++a)
                for (int b = a + 1; b < n_qubits; ++b)
                    c.gates.push_back(GateOp{GateKind::CZ, b, a, -1, 0.0});
            break;
        case Entanglement::None:
            break;
        }
    };

    rotation_layer();
    for (int layer = 0; layer < depth; ++layer) {
        entangle_layer();
        rotation_layer();
    }
    c.param_count = slot;
    return c;
}

Statevector apply_circuit(const ParamCircuit& circuit,
                          const std::vector<double>& params, int max_qubits) {
    if (static_cast<int>(params.size()) != circuit.param_count)
        throw ParameterError("apply_circuit: expected " +
                             std::to_string(circuit.param_count) + " parameters");
    Statevector state = Statevector::zero_state(circuit.n_qubits, max_qubits);
    for (const auto& gate : circuit.gates) {
        GateOp bound = gate;
        if (gate.param_slot >= 0) bound.angle = params[gate.param_slot];
        apply_gate(state, bound);
    }
    return state;
}

namespace {

// E(b) for every basis state: each term contributes coeff * (-1)^popcount(b & mask).
std::vector<double> diagonal_energies(const PauliTermList& terms) {
    const std::size_t size = std::size_t{1} << terms.n_qubits;
    std::vector<double> energies(size, 0.0);
    for (const auto& term : terms.terms) {
        std::size_t mask = 0;
        for (int q : term.qubits) {
            if (q < 0 || q >= terms.n_qubits)
                throw ParameterError("pauli term references qubit out of range");
            mask |= std::size_t{1} << q;
        }
        for (std::size_t b = 0; b < size; ++b)
            energies[b] += (std::popcount(b & mask) % 2 == 0) ? term.coeff : -term.coeff;
    }
    return energies;
}

} // namespace

double expectation(const Statevector& state, const PauliTermList& terms) {
    if (terms.n_qubits != state.n_qubits)
        throw ParameterError("expectation: qubit count mismatch");
    const auto energies = diagonal_energies(terms);
    double value = 0.0;
    for (std::size_t b = 0; b < state.amp.size(); ++b)
        value += std::norm(state.amp[b]) * energies[b];
    return value;
}

double sampled_expectation(const Statevector& state, const PauliTermList& terms,
                           int shots, std::uint64_t seed) {
    if (shots < 1) throw ParameterError("sampled_expectation: shots must be >= 1");
    if (terms.n_qubits != state.n_qubits)
        throw ParameterError("sampled_expectation: qubit count mismatch");
    const auto energies = diagonal_energies(terms);
    std::vector<double> cdf(state.amp.size());
    double acc = 0.0;
    for (std::size_t b = 0; b < state.amp.size(); ++b) {
        acc += std::norm(state.amp[b]);
        cdf[b] = acc;
    }
    Rng rng(seed);
    double sum = 0.0;
    for (int s = 0; s < shots; ++s) {
        const double u = rng.next_double() * acc;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const std::size_t b = static_cast<std::size_t>(it - cdf.begin());
        sum += energies[std::min(b, state.amp.size() - 1)];
    }
    return sum / shots;
}

OptResult spsa_minimize(const Objective& objective, std::vector<double> init,
                        const SpsaConfig& config, std::uint64_t seed) {
    if (config.iters < 1) throw ParameterError("spsa: iters must be >= 1");
    if (!(config.c > 0.0)) throw ParameterError("spsa: c must be positive");
    const std::size_t dim = init.size();
    if (dim == 0) throw ParameterError("spsa: empty parameter vector");

    Rng rng(seed);
    const double stability = 0.1 * config.iters;

    OptResult out;
    out.best_value = std::numeric_limits<double>::infinity();

    std::vector<double> theta = std::move(init);
    std::vector<int> delta(dim);
    std::vector<double> probe(dim);

    const auto eval = [&](const std::vector<double>& point) {
        const double value = objective(point);
        ++out.evaluations;
        if (!std::isfinite(value))
            throw ParameterError("spsa: objective returned a non-finite value at iteration " +
                                 std::to_string(out.evaluations));
        if (value < out.best_value) {
            out.best_value = value;
            out.best_params = point;
        }
        return value;
    };

    for (int k = 0; k < config.iters; ++k) {
        const double ck = config.c / std::pow(k + 1.0, config.gamma_decay);
        const double ak = config.a / std::pow(k + 1.0 + stability, config.alpha);
        for (std::size_t i = 0; i < dim; ++i) delta[i] = rng.rademacher();

        for (std::size_t i = 0; i < dim; ++i) probe[i] = theta[i] + ck * delta[i];
        const double f_plus = eval(probe);
        for (std::size_t i = 0; i < dim; ++i) probe[i] = theta[i] - ck * delta[i];
        const double f_minus = eval(probe);

        const double slope = (f_plus - f_minus) / (2.0 * ck);
        for (std::size_t i = 0; i < dim; ++i) {
            const double step = std::clamp(ak * slope * delta[i],
                                           -config.max_step, config.max_step);
            theta[i] -= step;
        }
        out.history.emplace_back(k, std::min(f_plus, f_minus));
    }
    return out;
}

OptResult nelder_mead_minimize(const Objective& objective, std::vector<double> init,
                               const NelderMeadConfig& config) {
    if (config.iters < 1) throw ParameterError("nelder-mead: iters must be >= 1");
    const std::size_t dim = init.size();
    if (dim == 0) throw ParameterError("nelder-mead: empty parameter vector");

    OptResult out;
    const auto eval = [&](const std::vector<double>& point) {
        const double value = objective(point);
        ++out.evaluations;
        if (!std::isfinite(value))
            throw ParameterError("nelder-mead: objective returned a non-finite value");
        return value;
    };

    std::vector<std::vector<double>> simplex{init};
    for (std::size_t i = 0; i < dim; ++i) {
        auto vertex = init;
        vertex[i] += config.step;
        simplex.push_back(std::move(vertex));
    }
    std::vector<double> values;
    values.reserve(simplex.size());
    for (const auto& v : simplex) values.push_back(eval(v));

    const auto order = [&]() {
        std::vector<std::size_t> idx(simplex.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> v2;
        for (std::size_t i : idx) {
            s2.push_back(simplex[i]);
            v2.push_back(values[i]);
        }
        simplex = std::move(s2);
        values = std::move(v2);
    };

    for (int iter = 0; iter < config.iters; ++iter) {
        order();
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < simplex.size() - 1; ++i)
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
        for (double& c : centroid) c /= static_cast<double>(dim);

        const auto blend = [&](double t) {
            std::vector<double> point(dim);
            const auto& worst = simplex.back();
            for (std::size_t j = 0; j < dim; ++j)
                point[j] = centroid[j] + t * (centroid[j] - worst[j]);
            return point;
        };

        auto reflected = blend(1.0);
        const double fr = eval(reflected);
        if (fr < values.front()) {
            auto expanded = blend(2.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex.back() = std::move(expanded);
                values.back() = fe;
            } else {
                simplex.back() = std::move(reflected);
                values.back() = fr;
            }
        } else if (fr < values[values.size() - 2]) {
            simplex.back() = std::move(reflected);
            values.back() = fr;
        } else {
            auto contracted = blend(-0.5);
            const double fc = eval(contracted);
            if (fc < values.back()) {
                simplex.back() = std::move(contracted);
                values.back() = fc;
            } else {
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    for (std::size_t j = 0; j < dim; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    values[i] = eval(simplex[i]);
                }
            }
        }
        out.history.emplace_back(iter, *std::min_element(values.begin(), values.end()));
    }
    order();
    out.best_params = simplex.front();
    out.best_value = values.front();
    return out;
}

namespace {

double hamiltonian_scale(const PauliTermList& terms) {
    double scale = 0.0;
    for (const auto& term : terms.terms) scale = std::max(scale, std::abs(term.coeff));
    return scale > 0.0 ? scale : 1.0;
}

std::vector<double> random_angles(std::size_t count, Rng& rng) {
    std::vector<double> angles(count);
    for (double& a : angles) a = rng.uniform(-kPi, kPi);
    return angles;
}

} // namespace

VqeResult run_vqe(const PauliTermList& terms, const ParamCircuit& ansatz,
                  OptimizerKind optimizer, int iters, std::uint64_t seed,
                  int max_qubits) {
    if (terms.n_qubits != ansatz.n_qubits)
        throw ParameterError("run_vqe: Hamiltonian and ansatz qubit counts differ");
    if (iters < 1) throw ParameterError("run_vqe: iters must be >= 1");
    check_qubit_cap(terms.n_qubits, max_qubits);

    const auto energies = diagonal_energies(terms);
    const double scale = hamiltonian_scale(terms);

    const Objective objective = [&](const std::vector<double>& params) {
        const Statevector state = apply_circuit(ansatz, params, max_qubits);
        double value = 0.0;
        for (std::size_t b = 0; b < state.amp.size(); ++b)
            value += std::norm(state.amp[b]) * energies[b];
        return value / scale;
    };

    Rng rng(seed);
    std::vector<double> init = random_angles(ansatz.param_count, rng);

    OptResult opt;
    if (optimizer == OptimizerKind::Spsa) {
        SpsaConfig config;
        config.iters = iters;
        opt = spsa_minimize(objective, std::move(init), config, rng.next_u64());
    } else {
        NelderMeadConfig config;
        config.iters = iters;
        opt = nelder_mead_minimize(objective, std::move(init), config);
    }

    VqeResult result;
    result.best_params = opt.best_params;
    result.best_energy = opt.best_value * scale;
    result.history.reserve(opt.history.size());
    for (const auto& [it, value] : opt.history) result.history.emplace_back(it, value * scale);
    result.seed = seed;
    result.evaluations = opt.evaluations;

    const Statevector final_state = apply_circuit(ansatz, result.best_params, max_qubits);
    result.most_probable_bits = final_state.most_probable_bits();
    result.probability = final_state.max_probability();
    return result;
}

QaoaResult run_qaoa(const PauliTermList& terms, int p, OptimizerKind optimizer,
                    int iters, std::uint64_t seed,
                    const std::optional<std::vector<double>>& init_angles,
                    int max_qubits) {
    if (p < 0) throw ParameterError("run_qaoa: p must be >= 0");
    check_qubit_cap(terms.n_qubits, max_qubits);

    const auto energies = diagonal_energies(terms);
    const double scale = hamiltonian_scale(terms);
    const int n = terms.n_qubits;

    const auto qaoa_state = [&](const std::vector<double>& angles) {
        Statevector state = Statevector::plus_state(n, max_qubits);
        for (int layer = 0; layer < p; ++layer) {
            const double gamma = angles[layer];
            const double beta = angles[p + layer];
            for (std::size_t b = 0; b < state.amp.size(); ++b)
                state.amp[b] *= std::polar(1.0, -gamma * energies[b]);
            for (int q = 0; q < n; ++q) state.apply_rx(q, 2.0 * beta);
        }
        return state;
    };
    const auto energy_of = [&](const std::vector<double>& angles) {
        const Statevector state = qaoa_state(angles);
        double value = 0.0;
        for (std::size_t b = 0; b < state.amp.size(); ++b)
            value += std::norm(state.amp[b]) * energies[b];
        return value;
    };

    QaoaResult result;
    result.seed = seed;

    if (p == 0) {
        const std::vector<double> none;
        result.best_energy = energy_of(none);
        result.history.emplace_back(0, result.best_energy);
        result.evaluations = 1;
        const Statevector state = qaoa_state(none);
        result.most_probable_bits = state.most_probable_bits();
        result.probability = state.max_probability();
        return result;
    }
    if (iters < 1) throw ParameterError("run_qaoa: iters must be >= 1");

    Rng rng(seed);
    std::vector<double> init;
    if (init_angles) {
        if (static_cast<int>(init_angles->size()) != 2 * p)
            throw ParameterError("run_qaoa: expected 2p initial angles");
        init = *init_angles;
    } else {
        init = random_angles(static_cast<std::size_t>(2 * p), rng);
    }

    // The starting point is scored first so a warm start can only improve.
    const double init_energy = energy_of(init);
    result.evaluations = 1;

    const Objective objective = [&](const std::vector<double>& angles) {
        return energy_of(angles) / scale;
    };
    OptResult opt;
    if (optimizer == OptimizerKind::Spsa) {
        SpsaConfig config;
        config.iters = iters;
        opt = spsa_minimize(objective, init, config, rng.next_u64());
    } else {
        NelderMeadConfig config;
        config.iters = iters;
        opt = nelder_mead_minimize(objective, init, config);
    }
    result.evaluations += opt.evaluations;

    std::vector<double> best_angles = init;
    double best_energy = init_energy;
    if (opt.best_value * scale < best_energy) {
        best_energy = opt.best_value * scale;
        best_angles = opt.best_params;
    }
    result.history.emplace_back(0, init_energy);
    for (const auto& [it, value] : opt.history)
        result.history.emplace_back(it + 1, value * scale);

    result.gammas.assign(best_angles.begin(), best_angles.begin() + p);
    result.betas.assign(best_angles.begin() + p, best_angles.end());
    result.best_energy = best_energy;

    const Statevector state = qaoa_state(best_angles);
    result.most_probable_bits = state.most_probable_bits();
    result.probability = state.max_probability();
    return result;
}

namespace {

nlohmann::json history_to_json(const std::vector<std::pair<int, double>>& history) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [it, value] : history)
        arr.push_back(nlohmann::json::array({it, value}));
    return arr;
}

} // namespace

std::string vqe_result_to_json(const VqeResult& result) {
    nlohmann::json doc;
    doc["backend"] = "vqe";
    doc["seed"] = result.seed;
    doc["params"] = result.best_params;
    doc["energy"] = result.best_energy;
    doc["history"] = history_to_json(result.history);
    doc["most_probable_bits"] = result.most_probable_bits;
    doc["probability"] = result.probability;
    return doc.dump(2) + "\n";
}

std::string qaoa_result_to_json(const QaoaResult& result) {
    nlohmann::json doc;
    doc["backend"] = "qaoa";
    doc["seed"] = result.seed;
    nlohmann::json params;
    params["gammas"] = result.gammas;
    params["betas"] = result.betas;
    doc["params"] = std::move(params);
    doc["energy"] = result.best_energy;
    doc["history"] = history_to_json(result.history);
    doc["most_probable_bits"] = result.most_probable_bits;
    doc["probability"] = result.probability;
    return doc.dump(2) + "\n";
}

} // namespace qopt
