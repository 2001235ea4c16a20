#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qopt/instance.hpp"

namespace qopt {

// Binary expansion slack block for one inequality <= bound: bit weights
// 2^0 .. 2^ceil(log2 bound), i.e. ceil(log2 bound) + 1 bits.
struct SlackEncoding {
    long long bound = 0;
    int bit_count = 0;
    std::vector<long long> bit_weights;
    std::vector<int> var_indices; // assigned model indices

    static int bits_for_bound(long long bound);
};

// Upper-triangular quadratic model: sum_{i<j} Q_ij x_i x_j + sum g_i x_i + C.
struct QuboModel {
    int n_vars = 0;
    std::map<std::pair<int, int>, double> quadratic; // keys i < j
    std::map<int, double> linear;
    double constant = 0.0;
    std::vector<std::string> var_names;
    double penalty_a = 0.0;
    std::string problem; // "swp", "qrobot" or "" for ad-hoc models
    std::vector<SlackEncoding> slacks;

    void add_quadratic(int i, int j, double coeff);
    void add_linear(int i, double coeff);
    void validate() const;
};

// How the degree/depot penalties of the routing Hamiltonian are expanded.
// PerNode squares each constraint separately, which is what the solvers need:
// the penalty vanishes exactly on degree-feasible arc sets. Grouped squares
// the summed patient constraints as one block, reproducing the published
// worked-example coefficients (4A couplings, W-10A linear terms); its
// penalty also vanishes on some degree-infeasible sets, so it is kept for
// reproduction rather than optimization.
enum class SwpExpansion { PerNode, Grouped };

QuboModel build_swp_qubo(const SwpInstance& instance,
                         const WeightMatrix& weights,
                         double penalty_a = 0.0, // 0 = auto: 1 + max W_ij
                         bool include_capacity = false,
                         SwpExpansion expansion = SwpExpansion::PerNode);

QuboModel build_qrobot_qubo(const QRobotInstance& instance,
                            double penalty_a = 0.0); // 0 = auto: 1 + max d_ij

enum class ConstraintKind {
    Equal,          // x = y
    OneHotPair,     // x + y = 1
    AtMostOnePair,  // x + y <= 1
    AtLeastOnePair, // x + y >= 1
    Implies,        // x <= y
    AtMostOneTriple // x1 + x2 + x3 <= 1
};

struct PenaltyTerms {
    std::map<std::pair<int, int>, double> quadratic;
    std::map<int, double> linear;
    double constant = 0.0;

    double evaluate(const std::vector<int>& bits) const;
};

PenaltyTerms constraint_to_penalty(ConstraintKind kind,
                                   const std::vector<int>& vars,
                                   double p);

// P * (sum a_i x_i - bound + sum 2^i y_i)^2 with the slack block starting at
// first_slack_index. The minimized-over-slack penalty is zero exactly on
// assignments satisfying sum a_i x_i <= bound.
std::pair<PenaltyTerms, SlackEncoding> inequality_to_penalty(
    const std::vector<std::pair<int, long long>>& coeffs, // (var index, a_i)
    long long bound, double p, int first_slack_index);

double evaluate_qubo(const QuboModel& model, const std::vector<int>& bits);

long long qubit_count_swp(int total_nodes, std::optional<long long> capacity_bound = {});
long long qubit_count_qrobot(int n_items, int k_robots, int capacity);

// Assignments of n patients onto m indistinguishable, all-used workers
// (surjections divided by m!). Zero when m > n.
unsigned long long count_solution_classes(int n_patients, int m_workers);

// QUBO export: {n_vars, quadratic:[[i,j,c]...], linear:[[i,c]...], constant,
// var_names}, sorted indices, bit-stable. Problem models additionally embed
// meta {penalty_a, problem, instance} so results can be decoded later.
std::string qubo_to_json(const QuboModel& model,
                         const std::string& instance_json = "");
QuboModel qubo_from_json(const std::string& text,
                         std::string* instance_json = nullptr);
void save_qubo(const std::string& path, const QuboModel& model,
               const std::string& instance_json = "");
QuboModel load_qubo(const std::string& path, std::string* instance_json = nullptr);

// Variable layout helpers shared by the builders and the decoders.
int swp_var_index(int from, int to, int total_nodes);
std::pair<int, int> swp_var_arc(int index, int total_nodes);
int qrobot_var_index(int t, int node, int robot, int n_items); // robot is 1-based

} // namespace qopt
