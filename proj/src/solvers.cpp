#include "qopt/solvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <json.hpp>

#include "qopt/errors.hpp"
#include "qopt/rng.hpp"

namespace qopt {

namespace {

bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Shared Gray-code scan: flips one variable per step so the energy delta is
// a single row sum. Near-minimal states are re-evaluated exactly before they
// can displace the incumbent, keeping ties bit-precise.
template <typename DeltaFn, typename ExactFn>
std::pair<std::vector<int>, double> gray_scan(int n, std::vector<int> state,
                                              double start_energy,
                                              DeltaFn&& delta, ExactFn&& exact) {
    std::vector<int> best_state = state;
    double best_energy = start_energy;
    double running = start_energy;
    const auto total = std::uint64_t{1} << n;
    for (std::uint64_t v = 1; v < total; ++v) {
        const int flip = std::countr_zero(v);
        running += delta(flip, state);
        state[flip] ^= 1;
        const double tol = 1e-9 * (1.0 + std::abs(best_energy));
        if (running <= best_energy + tol) {
            const double exact_energy = exact(state);
            if (exact_energy < best_energy ||
                (exact_energy == best_energy && lex_less(state, best_state))) {
                best_energy = exact_energy;
                best_state = state;
            }
        }
    }
    return {std::move(best_state), best_energy};
}

} // namespace

Solution solve_exact(const QuboModel& model, int limit) {
    model.validate();
    if (model.n_vars > limit)
        throw SizeError("solve_exact: " + std::to_string(model.n_vars) +
                        " variables exceed the limit of " + std::to_string(limit));

    Solution out;
    out.backend = "exact";
    out.evaluations = 1LL << model.n_vars;

    if (model.quadratic.empty() && model.linear.empty()) {
        out.bits.assign(model.n_vars, 0);
        out.energy = model.constant;
        return out;
    }

    std::vector<double> g(model.n_vars, 0.0);
    for (const auto& [i, coeff] : model.linear) g[i] = coeff;
    std::vector<std::vector<std::pair<int, double>>> adj(model.n_vars);
    for (const auto& [key, coeff] : model.quadratic) {
        adj[key.first].emplace_back(key.second, coeff);
        adj[key.second].emplace_back(key.first, coeff);
    }

    const auto delta = [&](int i, const std::vector<int>& bits) {
        double row = g[i];
        for (const auto& [j, coeff] : adj[i]) row += coeff * bits[j];
        return bits[i] ? -row : row;
    };
    const auto exact = [&](const std::vector<int>& bits) {
        return evaluate_qubo(model, bits);
    };

    std::vector<int> zeros(model.n_vars, 0);
    auto [bits, energy] = gray_scan(model.n_vars, zeros, model.constant, delta, exact);
    out.bits = std::move(bits);
    out.energy = energy;
    return out;
}

Solution solve_exact(const IsingModel& model, int limit) {
    model.validate();
    if (model.n_spins > limit)
        throw SizeError("solve_exact: " + std::to_string(model.n_spins) +
                        " spins exceed the limit of " + std::to_string(limit));

    Solution out;
    out.backend = "exact";
    out.evaluations = 1LL << model.n_spins;

    std::vector<std::vector<std::pair<int, double>>> adj(model.n_spins);
    for (const auto& [key, coeff] : model.couplings) {
        adj[key.first].emplace_back(key.second, coeff);
        adj[key.second].emplace_back(key.first, coeff);
    }

    // State stored as bits, spin s = 2b - 1.
    const auto delta = [&](int i, const std::vector<int>& bits) {
        const double s_i = 2.0 * bits[i] - 1.0;
        double row = model.fields[i];
        for (const auto& [j, coeff] : adj[i]) row += coeff * (2.0 * bits[j] - 1.0);
        return -2.0 * s_i * row;
    };
    const auto exact = [&](const std::vector<int>& bits) {
        std::vector<int> spins(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) spins[i] = 2 * bits[i] - 1;
        return evaluate_ising(model, spins);
    };

    std::vector<int> zeros(model.n_spins, 0);
    std::vector<int> all_down(model.n_spins, -1);
    auto [bits, energy] =
        gray_scan(model.n_spins, zeros, evaluate_ising(model, all_down), delta, exact);
    out.bits = std::move(bits);
    out.energy = energy;
    return out;
}

Solution solve_simulated_annealing(const IsingModel& model,
                                   const AnnealSchedule& schedule,
                                   std::uint64_t seed) {
    model.validate();
    if (model.n_spins < 1) throw ParameterError("solve_simulated_annealing: empty model");
    if (schedule.steps < 1 || schedule.restarts < 1)
        throw ParameterError("solve_simulated_annealing: steps and restarts must be >= 1");
    if (!(schedule.t_end > 0.0))
        throw ParameterError("solve_simulated_annealing: t_end must be positive");

    double max_coeff = 0.0;
    for (const auto& [key, coeff] : model.couplings)
        max_coeff = std::max(max_coeff, std::abs(coeff));
    for (double h : model.fields) max_coeff = std::max(max_coeff, std::abs(h));

    const double t_start =
        schedule.t_start == 0.0 ? std::max(2.0 * max_coeff, 1.0) : schedule.t_start;
    if (!(t_start > schedule.t_end))
        throw ParameterError("solve_simulated_annealing: need t_start > t_end");
    const int sweeps =
        schedule.sweeps_per_step == 0 ? model.n_spins : schedule.sweeps_per_step;
    const double decay =
        schedule.steps > 1
            ? std::pow(schedule.t_end / t_start, 1.0 / (schedule.steps - 1))
            : 1.0;

    const int n = model.n_spins;
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& [key, coeff] : model.couplings) {
        adj[key.first].emplace_back(key.second, coeff);
        adj[key.second].emplace_back(key.first, coeff);
    }

    std::vector<int> best_bits;
    double best_energy = 0.0;
    bool have_best = false;
    long long evaluations = 0;

    for (int restart = 0; restart < schedule.restarts; ++restart) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
        std::vector<int> spins(n);
        for (int i = 0; i < n; ++i) spins[i] = rng.rademacher();
        double energy = evaluate_ising(model, spins);
        ++evaluations;

        std::vector<int> restart_best = spins;
        double restart_best_energy = energy;

        double temp = t_start;
        for (int step = 0; step < schedule.steps; ++step) {
            for (int attempt = 0; attempt < sweeps * n; ++attempt) {
                const int i = static_cast<int>(rng.uniform_int(0, n - 1));
                double row = model.fields[i];
                for (const auto& [j, coeff] : adj[i]) row += coeff * spins[j];
                const double delta = -2.0 * spins[i] * row;
                ++evaluations;
                if (delta <= 0.0 || rng.next_double() < std::exp(-delta / temp)) {
                    spins[i] = -spins[i];
                    energy += delta;
                    if (energy < restart_best_energy) {
                        restart_best_energy = energy;
                        restart_best = spins;
                    }
                }
            }
            temp *= decay;
        }

        // Re-verify against the model; incremental drift never leaks out.
        const double verified = evaluate_ising(model, restart_best);
        std::vector<int> bits(n);
        for (int i = 0; i < n; ++i) bits[i] = (restart_best[i] + 1) / 2;
        if (!have_best || verified < best_energy ||
            (verified == best_energy && lex_less(bits, best_bits))) {
            have_best = true;
            best_energy = verified;
            best_bits = std::move(bits);
        }
    }

    Solution out;
    out.backend = "sa";
    out.seed = seed;
    out.bits = std::move(best_bits);
    out.energy = best_energy;
    out.evaluations = evaluations;
    return out;
}

namespace {

struct BacktrackState {
    const WeightMatrix* w = nullptr;
    int n = 0;
    int k = 0;
    std::vector<bool> visited;
    std::vector<std::vector<int>> tours;   // partial tours, patients only
    std::vector<int> flat;                 // route encoding for tie-breaking
    double cost = 0.0;
    int placed = 0;
    long long nodes = 0;

    double best_cost = 0.0;
    bool have_best = false;
    std::vector<std::vector<int>> best_tours;
    std::vector<int> best_flat;

    void consider_complete() {
        const double tol = 1e-9 * (1.0 + std::abs(best_cost));
        if (!have_best || cost < best_cost - tol ||
            (std::abs(cost - best_cost) <= tol && lex_less(flat, best_flat))) {
            have_best = true;
            best_cost = cost;
            best_tours = tours;
            best_flat = flat;
        }
    }

    bool pruned() const {
        return have_best && cost > best_cost + 1e-9 * (1.0 + std::abs(best_cost));
    }

    // One tour is open with the worker at `at`. Tours are indistinguishable,
    // so duplicates are avoided by opening them in increasing order of their
    // first patient; the order inside a tour stays free.
    void extend(int at, int tour_first, int open_count) {
        ++nodes;
        if (pruned()) return; // W >= 0, partial cost only grows
        const int remaining = n - placed;

        if (remaining == 0) {
            if (open_count == k) {
                cost += w->w[at][0];
                flat.push_back(0);
                consider_complete();
                flat.pop_back();
                cost -= w->w[at][0];
            }
            return;
        }

        // Close this tour and open the next one.
        if (open_count < k) {
            cost += w->w[at][0];
            flat.push_back(0);
            for (int p = tour_first + 1; p <= n; ++p) {
                if (visited[p]) continue;
                open_tour(p, open_count);
            }
            flat.pop_back();
            cost -= w->w[at][0];
        }

        // Keep extending this tour; unopened tours still need a patient each.
        if (remaining - 1 >= k - open_count) {
            for (int p = 1; p <= n; ++p) {
                if (visited[p]) continue;
                visited[p] = true;
                ++placed;
                tours.back().push_back(p);
                flat.push_back(p);
                cost += w->w[at][p];
                extend(p, tour_first, open_count);
                cost -= w->w[at][p];
                flat.pop_back();
                tours.back().pop_back();
                --placed;
                visited[p] = false;
            }
        }
    }

    void open_tour(int p, int open_count) {
        visited[p] = true;
        ++placed;
        tours.push_back({p});
        flat.push_back(p);
        cost += w->w[0][p];
        extend(p, p, open_count + 1);
        cost -= w->w[0][p];
        flat.pop_back();
        tours.pop_back();
        --placed;
        visited[p] = false;
    }
};

} // namespace

BacktrackResult solve_backtracking(const SwpInstance& instance,
                                   const WeightMatrix& weights,
                                   int max_patients) {
    instance.validate();
    if (instance.n_patients > max_patients)
        throw SizeError("solve_backtracking: " + std::to_string(instance.n_patients) +
                        " patients exceed the guard of " + std::to_string(max_patients));
    if (weights.size() != instance.n_patients + 1)
        throw ParameterError("solve_backtracking: weight matrix does not match instance");

    BacktrackState state;
    state.w = &weights;
    state.n = instance.n_patients;
    state.k = instance.k_workers;
    state.visited.assign(instance.n_patients + 1, false);
    for (int p = 1; p <= instance.n_patients; ++p) state.open_tour(p, 0);

    BacktrackResult out;
    out.nodes_explored = state.nodes;
    out.cost = state.best_cost;
    for (const auto& tour : state.best_tours) {
        std::vector<int> full{0};
        full.insert(full.end(), tour.begin(), tour.end());
        full.push_back(0);
        out.tours.push_back(std::move(full));
    }
    return out;
}

std::string solution_to_json(const Solution& solution) {
    nlohmann::json doc;
    doc["backend"] = solution.backend;
    doc["bits"] = solution.bits;
    doc["energy"] = solution.energy;
    doc["evaluations"] = solution.evaluations;
    doc["seed"] = solution.seed;
    return doc.dump(2) + "\n";
}

} // namespace qopt
