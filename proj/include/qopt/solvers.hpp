#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qopt/ising.hpp"
#include "qopt/qubo.hpp"

namespace qopt {

struct Solution {
    std::vector<int> bits;   // 0/1 assignment; spins are 2b - 1
    double energy = 0.0;
    std::string backend;
    std::uint64_t seed = 0;
    long long evaluations = 0;
};

// Exhaustive minimization over all assignments; ties resolve to the
// lexicographically smallest bit vector (bit 0 most significant).
Solution solve_exact(const QuboModel& model, int limit = 24);
Solution solve_exact(const IsingModel& model, int limit = 24);

// Geometric temperature schedule for Metropolis single-flip annealing.
// t_start == 0 means auto (2 * max |coefficient|); sweeps_per_step == 0 means
// one sweep of n_spins flip attempts per spin count, i.e. n sweeps.
struct AnnealSchedule {
    double t_start = 0.0;
    double t_end = 1e-3;
    int steps = 1000;
    int sweeps_per_step = 0;
    int restarts = 20;
};

Solution solve_simulated_annealing(const IsingModel& model,
                                   const AnnealSchedule& schedule,
                                   std::uint64_t seed);

// Exact route search: partitions the patients over exactly k tours, each
// leaving and returning to the depot, minimizing total W cost. Deterministic
// lexicographic tie-breaking on the route encoding.
struct BacktrackResult {
    std::vector<std::vector<int>> tours; // each [0, ..., 0]
    double cost = 0.0;
    long long nodes_explored = 0;
};

BacktrackResult solve_backtracking(const SwpInstance& instance,
                                   const WeightMatrix& weights,
                                   int max_patients = 10);

std::string solution_to_json(const Solution& solution);

} // namespace qopt
