#include <doctest.h>

#include <algorithm>

#include "qopt/errors.hpp"
#include "qopt/qubo.hpp"
#include "qopt/rng.hpp"

using namespace qopt;

namespace {

// Fixed 4-node setup mirroring the worked example: 3 patients plus depot.
std::pair<SwpInstance, WeightMatrix> small_swp(int k_workers, double gamma = 1.0) {
    auto [inst, dist] = generate_swp_instance(3, k_workers, 12345);
    auto weights = build_weight_matrix(inst, dist, gamma);
    return {std::move(inst), std::move(weights)};
}

double quad_coeff(const QuboModel& model, int i, int j) {
    if (i > j) std::swap(i, j);
    const auto it = model.quadratic.find({i, j});
    return it == model.quadratic.end() ? 0.0 : it->second;
}

double lin_coeff(const QuboModel& model, int i) {
    const auto it = model.linear.find(i);
    return it == model.linear.end() ? 0.0 : it->second;
}

std::vector<int> bits_of(std::uint64_t value, int n) {
    std::vector<int> bits(n);
    for (int i = 0; i < n; ++i) bits[i] = static_cast<int>((value >> i) & 1u);
    return bits;
}

} // namespace

TEST_SUITE("qubo") {

TEST_CASE("swp model over 4 nodes has 12 variables") {
    auto [inst, weights] = small_swp(2);
    const auto model = build_swp_qubo(inst, weights);
    CHECK(model.n_vars == 12);
    CHECK(model.var_names[0] == "x_0_1");
    CHECK(model.var_names[3] == "x_1_0");
    CHECK(model.var_names[11] == "x_3_2");
}

TEST_CASE("grouped expansion reproduces the published coefficients") {
    auto [inst, weights] = small_swp(2);
    const double a = 100.0;
    const auto model =
        build_swp_qubo(inst, weights, a, false, SwpExpansion::Grouped);

    const int x01 = swp_var_index(0, 1, 4);
    const int x02 = swp_var_index(0, 2, 4);
    const int x12 = swp_var_index(1, 2, 4);
    CHECK(quad_coeff(model, x01, x02) == 4.0 * a);
    CHECK(lin_coeff(model, x12) == doctest::Approx(weights.w[1][2] - 10.0 * a));
    // Depot arcs carry W - A(4 + 2k).
    CHECK(lin_coeff(model, x01) ==
          doctest::Approx(weights.w[0][1] - a * (4.0 + 2.0 * inst.k_workers)));
    // C = 2An^2 + 2Ak^2 with n patients.
    CHECK(model.constant ==
          doctest::Approx(2.0 * a * 9.0 + 2.0 * a * inst.k_workers * inst.k_workers));
}

TEST_CASE("per-node expansion matches its constant and couplings") {
    auto [inst, weights] = small_swp(1);
    const double a = 50.0;
    const auto model = build_swp_qubo(inst, weights, a);
    // C = 2An + 2Ak^2.
    CHECK(model.constant == doctest::Approx(2.0 * a * 3.0 + 2.0 * a * 1.0));
    // Depot-out arcs couple only through the depot constraint.
    CHECK(quad_coeff(model, swp_var_index(0, 1, 4), swp_var_index(0, 2, 4)) == 2.0 * a);
    // Arcs into the same patient couple once, plus nothing else.
    CHECK(quad_coeff(model, swp_var_index(0, 1, 4), swp_var_index(2, 1, 4)) == 2.0 * a);
    // Unrelated arcs do not couple.
    CHECK(quad_coeff(model, swp_var_index(0, 1, 4), swp_var_index(2, 0, 4)) == 0.0);
}

TEST_CASE("feasible tours carry zero penalty under both expansions") {
    auto [inst, weights] = small_swp(1);
    for (const auto expansion : {SwpExpansion::PerNode, SwpExpansion::Grouped}) {
        const auto model = build_swp_qubo(inst, weights, 0.0, false, expansion);
        // Tour 0 -> 1 -> 2 -> 3 -> 0.
        std::vector<int> bits(model.n_vars, 0);
        bits[swp_var_index(0, 1, 4)] = 1;
        bits[swp_var_index(1, 2, 4)] = 1;
        bits[swp_var_index(2, 3, 4)] = 1;
        bits[swp_var_index(3, 0, 4)] = 1;
        const double cost =
            weights.w[0][1] + weights.w[1][2] + weights.w[2][3] + weights.w[3][0];
        CHECK(evaluate_qubo(model, bits) == doctest::Approx(cost));
    }
}

TEST_CASE("per-node penalties separate feasible from infeasible exhaustively") {
    auto [inst, weights] = small_swp(1);
    const auto model = build_swp_qubo(inst, weights);
    const double a = model.penalty_a;

    // Penalty part = energy - W over chosen arcs; it is a sum of squared
    // integers scaled by A, so it is either 0 or >= A.
    int zero_penalty = 0;
    for (std::uint64_t v = 0; v < (1u << 12); ++v) {
        const auto bits = bits_of(v, 12);
        double cost = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j && bits[swp_var_index(i, j, 4)]) cost += weights.w[i][j];
        const double penalty = evaluate_qubo(model, bits) - cost;
        CHECK(penalty > -1e-6);
        if (penalty < a / 2) {
            CHECK(penalty == doctest::Approx(0.0).epsilon(1e-9));
            ++zero_penalty;
        } else {
            CHECK(penalty >= a - 1e-6);
        }
    }
    // Permutations of {0..3} without fixed points: 6 full tours plus 3
    // two-cycle pairings.
    CHECK(zero_penalty == 9);
}

TEST_CASE("default penalty strength obeys the Lagrange bound") {
    auto [inst, weights] = small_swp(2);
    double w_max = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) w_max = std::max(w_max, weights.w[i][j]);
    const auto model = build_swp_qubo(inst, weights);
    CHECK(model.penalty_a == doctest::Approx(1.0 + w_max));
    CHECK_THROWS_AS(build_swp_qubo(inst, weights, w_max * 0.5), ParameterError);
}

TEST_CASE("qrobot variable counts match the qubit formula") {
    const auto sizes = std::vector<std::pair<int, int>>{{2, 18}, {4, 36}, {12, 188}};
    for (const auto& [items, expected] : sizes) {
        const auto inst = generate_qrobot_instance(items, 1, 99, Area{}, 45);
        const auto model = build_qrobot_qubo(inst);
        CHECK(model.n_vars == expected);
    }
}

TEST_CASE("qrobot feasible plan has zero penalty and correct names") {
    auto inst = generate_qrobot_instance(2, 1, 3, Area{}, 45);
    const auto model = build_qrobot_qubo(inst);
    CHECK(model.n_vars == 18);
    CHECK(model.var_names[0] == "x_t0_i0_p1");
    CHECK(model.var_names[12] == "slack_p1_b0");

    // Depot at t0, item 1 at t1, item 2 at t2, depot at t3, slack fills
    // capacity - load.
    std::vector<int> bits(model.n_vars, 0);
    bits[qrobot_var_index(0, 0, 1, 2)] = 1;
    bits[qrobot_var_index(1, 1, 1, 2)] = 1;
    bits[qrobot_var_index(2, 2, 1, 2)] = 1;
    bits[qrobot_var_index(3, 0, 1, 2)] = 1;
    long long gap = inst.capacity - inst.weights[0] - inst.weights[1];
    for (int b = 0; b < 6; ++b)
        if (gap & (1LL << b)) bits[12 + b] = 1;

    const auto& d = inst.distances.d;
    const double cost = d[0][1] + d[1][2] + d[2][0];
    CHECK(evaluate_qubo(model, bits) == doctest::Approx(cost));
}

TEST_CASE("qrobot infeasible instances are rejected") {
    auto inst = generate_qrobot_instance(2, 1, 3, Area{}, 45);
    inst.weights[0] = 46;
    CHECK_THROWS_AS(build_qrobot_qubo(inst), ValidationError);
}

TEST_CASE("penalty truth tables for all six constraint kinds") {
    const double p = 7.0;
    struct Row {
        ConstraintKind kind;
        int arity;
        bool (*holds)(const std::vector<int>&);
    };
    const std::vector<Row> rows = {
        {ConstraintKind::Equal, 2, [](const std::vector<int>& b) { return b[0] == b[1]; }},
        {ConstraintKind::OneHotPair, 2,
         [](const std::vector<int>& b) { return b[0] + b[1] == 1; }},
        {ConstraintKind::AtMostOnePair, 2,
         [](const std::vector<int>& b) { return b[0] + b[1] <= 1; }},
        {ConstraintKind::AtLeastOnePair, 2,
         [](const std::vector<int>& b) { return b[0] + b[1] >= 1; }},
        {ConstraintKind::Implies, 2,
         [](const std::vector<int>& b) { return b[0] <= b[1]; }},
        {ConstraintKind::AtMostOneTriple, 3,
         [](const std::vector<int>& b) { return b[0] + b[1] + b[2] <= 1; }},
    };
    for (const auto& row : rows) {
        std::vector<int> vars(row.arity);
        for (int i = 0; i < row.arity; ++i) vars[i] = i;
        const auto terms = constraint_to_penalty(row.kind, vars, p);
        for (std::uint64_t v = 0; v < (1u << row.arity); ++v) {
            const auto bits = bits_of(v, row.arity);
            const double value = terms.evaluate(bits);
            if (row.holds(bits)) {
                CHECK(value == 0.0);
            } else {
                CHECK(value >= p);
            }
        }
    }
}

TEST_CASE("penalty spot values from the table") {
    const double p = 3.0;
    const auto eq = constraint_to_penalty(ConstraintKind::Equal, {0, 1}, p);
    CHECK(eq.evaluate({0, 0}) == 0.0);
    CHECK(eq.evaluate({0, 1}) == p);
    const auto am = constraint_to_penalty(ConstraintKind::AtMostOnePair, {0, 1}, p);
    CHECK(am.evaluate({1, 1}) == p);
}

TEST_CASE("penalty arity and kind are validated") {
    CHECK_THROWS_AS(constraint_to_penalty(ConstraintKind::Equal, {0, 1, 2}, 1.0),
                    ParameterError);
    CHECK_THROWS_AS(constraint_to_penalty(ConstraintKind::AtMostOneTriple, {0, 1}, 1.0),
                    ParameterError);
    CHECK_THROWS_AS(constraint_to_penalty(ConstraintKind::Equal, {0, 1}, -1.0),
                    ParameterError);
}

TEST_CASE("inequality slack encoding") {
    // x0 + x1 <= 1 with P = 5; slack bound 1 -> a single bit.
    const auto [terms, enc] = inequality_to_penalty({{0, 1}, {1, 1}}, 1, 5.0, 2);
    CHECK(enc.bit_count == 1);
    CHECK(enc.bit_weights == std::vector<long long>{1});

    const auto min_over_slack = [&](int b0, int b1) {
        double best = 1e300;
        for (int y = 0; y <= 1; ++y)
            best = std::min(best, terms.evaluate({b0, b1, y}));
        return best;
    };
    CHECK(min_over_slack(0, 0) == 0.0);
    CHECK(min_over_slack(1, 0) == 0.0);
    CHECK(min_over_slack(0, 1) == 0.0);
    CHECK(min_over_slack(1, 1) > 0.0);

    CHECK_THROWS_AS(inequality_to_penalty({{0, 1}}, 0, 1.0, 1), ParameterError);
}

TEST_CASE("minimized slack penalty is zero exactly on feasible loads") {
    // 3x0 + 2x1 + 4x2 <= 5 with the slack range covering the bound.
    const auto [terms, enc] = inequality_to_penalty({{0, 3}, {1, 2}, {2, 4}}, 5, 2.0, 3);
    for (std::uint64_t v = 0; v < 8; ++v) {
        const auto decision = bits_of(v, 3);
        const long long load = 3 * decision[0] + 2 * decision[1] + 4 * decision[2];
        double best = 1e300;
        for (std::uint64_t s = 0; s < (1u << enc.bit_count); ++s) {
            auto bits = decision;
            const auto slack_bits = bits_of(s, enc.bit_count);
            bits.insert(bits.end(), slack_bits.begin(), slack_bits.end());
            best = std::min(best, terms.evaluate(bits));
        }
        if (load <= 5) {
            CHECK(best == 0.0);
        } else {
            CHECK(best >= 2.0);
        }
    }
}

TEST_CASE("evaluate_qubo basics") {
    QuboModel model;
    model.n_vars = 1;
    model.linear[0] = 2.0;
    CHECK(evaluate_qubo(model, {0}) == 0.0);
    CHECK(evaluate_qubo(model, {1}) == 2.0);
    model.constant = 4.0;
    CHECK(evaluate_qubo(model, {0}) == 4.0);
    CHECK_THROWS_AS(evaluate_qubo(model, {0, 1}), ParameterError);
}

TEST_CASE("evaluate_qubo agrees with a term-by-term oracle") {
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        QuboModel model;
        model.n_vars = 3;
        model.constant = rng.uniform(-5, 5);
        for (int i = 0; i < 3; ++i) model.linear[i] = rng.uniform(-5, 5);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) model.quadratic[{i, j}] = rng.uniform(-5, 5);
        for (std::uint64_t v = 0; v < 8; ++v) {
            const auto bits = bits_of(v, 3);
            double expected = model.constant;
            for (const auto& [key, c] : model.quadratic)
                expected += c * bits[key.first] * bits[key.second];
            for (const auto& [i, c] : model.linear) expected += c * bits[i];
            CHECK(evaluate_qubo(model, bits) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("qubit counts") {
    CHECK(qubit_count_swp(4) == 12);
    CHECK(qubit_count_swp(4, 45) == 12 + 7); // ceil(log2 45) + 1 slack bits
    const std::vector<long long> expected{18, 26, 36, 48, 62, 78, 96, 116, 138, 162, 188};
    for (int n = 2; n <= 12; ++n)
        CHECK(qubit_count_qrobot(n, 1, 45) == expected[n - 2]);
    CHECK(qubit_count_qrobot(5, 1, 45) == 48);
    CHECK(qubit_count_qrobot(9, 1, 45) == 116);
}

TEST_CASE("solution class counting matches brute-force partitions") {
    // Brute force: canonical restricted-growth strings with exactly m blocks
    // count the partitions of {1..n} into m nonempty unlabeled blocks.
    const auto brute = [](int n, int m) {
        unsigned long long count = 0;
        std::uint64_t combos = 1;
        for (int i = 0; i < n; ++i) combos *= m;
        for (std::uint64_t v = 0; v < combos; ++v) {
            std::uint64_t rest = v;
            bool canonical = true;
            int max_seen = -1;
            for (int i = 0; i < n; ++i) {
                const int block = static_cast<int>(rest % m);
                rest /= m;
                if (block > max_seen + 1) {
                    canonical = false;
                    break;
                }
                max_seen = std::max(max_seen, block);
            }
            if (canonical && max_seen == m - 1) ++count;
        }
        return count;
    };

    for (int n = 1; n <= 7; ++n)
        for (int m = 1; m <= std::min(n, 4); ++m)
            CHECK(count_solution_classes(n, m) == brute(n, m));

    CHECK(count_solution_classes(5, 1) == 1);
    CHECK(count_solution_classes(5, 5) == 1);
    CHECK(count_solution_classes(4, 3) == 6);
    CHECK(count_solution_classes(3, 4) == 0);
}

TEST_CASE("qubo json round trip preserves evaluation") {
    auto [inst, weights] = small_swp(2);
    const auto model = build_swp_qubo(inst, weights);
    const auto text = qubo_to_json(model);
    const auto model2 = qubo_from_json(text);
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> bits(model.n_vars);
        for (auto& b : bits) b = static_cast<int>(rng.uniform_int(0, 1));
        CHECK(evaluate_qubo(model, bits) == evaluate_qubo(model2, bits));
    }
    CHECK(qubo_to_json(model2) == text);
}

} // TEST_SUITE
