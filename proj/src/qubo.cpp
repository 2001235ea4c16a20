#include "qopt/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qopt/errors.hpp"

namespace qopt {

namespace {

// Smallest e with 2^e >= value.
int ceil_log2(long long value) {
    int e = 0;
    long long pow2 = 1;
    while (pow2 < value) {
        pow2 <<= 1;
        ++e;
    }
    return e;
}

} // namespace

int SlackEncoding::bits_for_bound(long long bound) {
    if (bound < 1) throw ParameterError("slack bound must be >= 1");
    return ceil_log2(bound) + 1;
}

void QuboModel::add_quadratic(int i, int j, double coeff) {
    if (i == j) throw ParameterError("quadratic key needs two distinct indices");
    if (i > j) std::swap(i, j);
    quadratic[{i, j}] += coeff;
}

void QuboModel::add_linear(int i, double coeff) { linear[i] += coeff; }

void QuboModel::validate() const {
    if (n_vars < 0) throw ValidationError("qubo: negative n_vars");
    for (const auto& [key, coeff] : quadratic) {
        if (key.first < 0 || key.second >= n_vars || key.first >= key.second)
            throw ValidationError("qubo: bad quadratic key");
        if (!std::isfinite(coeff)) throw ValidationError("qubo: non-finite quadratic coefficient");
    }
    for (const auto& [i, coeff] : linear) {
        if (i < 0 || i >= n_vars) throw ValidationError("qubo: bad linear index");
        if (!std::isfinite(coeff)) throw ValidationError("qubo: non-finite linear coefficient");
    }
    if (!std::isfinite(constant)) throw ValidationError("qubo: non-finite constant");
    if (!var_names.empty() && static_cast<int>(var_names.size()) != n_vars)
        throw ValidationError("qubo: var_names size mismatch");
}

int swp_var_index(int from, int to, int total_nodes) {
    if (from == to || from < 0 || to < 0 || from >= total_nodes || to >= total_nodes)
        throw ParameterError("swp_var_index: invalid arc");
    return from * (total_nodes - 1) + (to < from ? to : to - 1);
}

std::pair<int, int> swp_var_arc(int index, int total_nodes) {
    const int from = index / (total_nodes - 1);
    int to = index % (total_nodes - 1);
    if (to >= from) ++to;
    return {from, to};
}

int qrobot_var_index(int t, int node, int robot, int n_items) {
    const int per_robot = (n_items + 2) * (n_items + 1);
    return (robot - 1) * per_robot + t * (n_items + 1) + node;
}

namespace {

// Appends A * (target - sum of vars)^2 to the model.
void add_squared_penalty(QuboModel& model, double a, double target,
                         const std::vector<int>& vars) {
    model.constant += a * target * target;
    for (int v : vars) model.add_linear(v, a * (1.0 - 2.0 * target));
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            model.add_quadratic(vars[i], vars[j], 2.0 * a);
}

// P * (sum a_i x_i - bound + sum 2^b y_b)^2 with an explicit slack width.
SlackEncoding add_inequality_penalty(QuboModel& model,
                                     const std::vector<std::pair<int, long long>>& coeffs,
                                     long long bound, double p,
                                     int first_slack_index, int slack_bits) {
    SlackEncoding enc;
    enc.bound = bound;
    enc.bit_count = slack_bits;
    for (int b = 0; b < slack_bits; ++b) {
        enc.bit_weights.push_back(1LL << b);
        enc.var_indices.push_back(first_slack_index + b);
    }

    // Collect the full affine form c0 + sum c_i z_i over decision + slack vars.
    std::vector<std::pair<int, double>> terms;
    for (const auto& [var, a] : coeffs) terms.emplace_back(var, static_cast<double>(a));
    for (int b = 0; b < slack_bits; ++b)
        terms.emplace_back(enc.var_indices[b], static_cast<double>(enc.bit_weights[b]));
    const double c0 = -static_cast<double>(bound);

    model.constant += p * c0 * c0;
    for (const auto& [vi, ci] : terms)
        model.add_linear(vi, p * (ci * ci + 2.0 * c0 * ci));
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            model.add_quadratic(terms[i].first, terms[j].first,
                                2.0 * p * terms[i].second * terms[j].second);
    return enc;
}

} // namespace

QuboModel build_swp_qubo(const SwpInstance& instance,
                         const WeightMatrix& weights,
                         double penalty_a, bool include_capacity,
                         SwpExpansion expansion) {
    instance.validate();
    const int m = instance.n_patients + 1; // total nodes, depot included
    if (weights.size() != m)
        throw ParameterError("build_swp_qubo: weight matrix does not match instance");

    double w_max = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) w_max = std::max(w_max, weights.w[i][j]);
    const double a = penalty_a == 0.0 ? 1.0 + w_max : penalty_a;
    if (!(a > w_max))
        throw ParameterError("build_swp_qubo: penalty A must exceed max W_ij = " +
                             std::to_string(w_max));

    QuboModel model;
    model.problem = "swp";
    model.penalty_a = a;
    model.n_vars = m * (m - 1);
    model.var_names.resize(model.n_vars);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j)
                model.var_names[swp_var_index(i, j, m)] =
                    "x_" + std::to_string(i) + "_" + std::to_string(j);

    // Objective: W over the chosen arcs.
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) model.add_linear(swp_var_index(i, j, m), weights.w[i][j]);

    const double k = instance.k_workers;
    std::vector<int> depot_out, depot_in;
    for (int j = 1; j < m; ++j) {
        depot_out.push_back(swp_var_index(0, j, m));
        depot_in.push_back(swp_var_index(j, 0, m));
    }

    if (expansion == SwpExpansion::PerNode) {
        for (int node = 1; node < m; ++node) {
            std::vector<int> in_arcs, out_arcs;
            for (int other = 0; other < m; ++other) {
                if (other == node) continue;
                in_arcs.push_back(swp_var_index(other, node, m));
                out_arcs.push_back(swp_var_index(node, other, m));
            }
            add_squared_penalty(model, a, 1.0, in_arcs);
            add_squared_penalty(model, a, 1.0, out_arcs);
        }
    } else {
        // All patient in-degree (and out-degree) constraints summed before
        // squaring, as in the published expansion.
        std::vector<int> all_in, all_out;
        for (int node = 1; node < m; ++node)
            for (int other = 0; other < m; ++other) {
                if (other == node) continue;
                all_in.push_back(swp_var_index(other, node, m));
                all_out.push_back(swp_var_index(node, other, m));
            }
        const double n = instance.n_patients;
        add_squared_penalty(model, a, n, all_in);
        add_squared_penalty(model, a, n, all_out);
    }
    add_squared_penalty(model, a, k, depot_out);
    add_squared_penalty(model, a, k, depot_in);

    if (include_capacity) {
        if (!instance.max_workload)
            throw ParameterError("build_swp_qubo: include_capacity needs instance.max_workload");
        // W coefficients are rounded to the nearest integer for the binary
        // slack expansion; the cap applies to the total chosen-arc load.
        const auto bound = static_cast<long long>(std::floor(*instance.max_workload));
        if (bound < 1) throw ParameterError("build_swp_qubo: workload cap rounds below 1");
        std::vector<std::pair<int, long long>> coeffs;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (i != j)
                    coeffs.emplace_back(swp_var_index(i, j, m),
                                        std::llround(weights.w[i][j]));
        const int first_slack = model.n_vars;
        const int bits = SlackEncoding::bits_for_bound(bound);
        model.n_vars += bits;
        for (int b = 0; b < bits; ++b)
            model.var_names.push_back("slack_cap_b" + std::to_string(b));
        model.slacks.push_back(
            add_inequality_penalty(model, coeffs, bound, a, first_slack, bits));
    }

    model.validate();
    return model;
}

QuboModel build_qrobot_qubo(const QRobotInstance& instance, double penalty_a) {
    instance.validate();
    const int n = instance.n_items;
    const int kk = instance.k_robots;
    const auto& d = instance.distances.d;

    double d_max = instance.distances.max_off_diagonal();
    const double a = penalty_a == 0.0 ? 1.0 + d_max : penalty_a;
    if (!(a > d_max))
        throw ParameterError("build_qrobot_qubo: penalty A must exceed max d_ij = " +
                             std::to_string(d_max));

    QuboModel model;
    model.problem = "qrobot";
    model.penalty_a = a;
    const int decision_vars = kk * (n + 1) * (n + 2);
    model.n_vars = decision_vars;
    model.var_names.resize(decision_vars);
    for (int p = 1; p <= kk; ++p)
        for (int t = 0; t <= n + 1; ++t)
            for (int i = 0; i <= n; ++i)
                model.var_names[qrobot_var_index(t, i, p, n)] =
                    "x_t" + std::to_string(t) + "_i" + std::to_string(i) +
                    "_p" + std::to_string(p);

    // Objective: distance of consecutive hops per robot.
    for (int p = 1; p <= kk; ++p)
        for (int t = 1; t <= n + 1; ++t)
            for (int i = 0; i <= n; ++i)
                for (int j = 0; j <= n; ++j) {
                    if (i == j || d[i][j] == 0.0) continue;
                    model.add_quadratic(qrobot_var_index(t - 1, i, p, n),
                                        qrobot_var_index(t, j, p, n), d[i][j]);
                }

    // Each robot occupies exactly one node at every time step; idle robots
    // sit at the depot.
    for (int p = 1; p <= kk; ++p)
        for (int t = 0; t <= n + 1; ++t) {
            std::vector<int> nodes;
            for (int i = 0; i <= n; ++i) nodes.push_back(qrobot_var_index(t, i, p, n));
            add_squared_penalty(model, a, 1.0, nodes);
        }

    // Boundary conditions: all robots at the depot at t = 0 and t = n + 1.
    std::vector<int> start_depot, end_depot;
    for (int p = 1; p <= kk; ++p) {
        start_depot.push_back(qrobot_var_index(0, 0, p, n));
        end_depot.push_back(qrobot_var_index(n + 1, 0, p, n));
    }
    add_squared_penalty(model, a, static_cast<double>(kk), start_depot);
    add_squared_penalty(model, a, static_cast<double>(kk), end_depot);

    // Every item is visited exactly once across robots and times.
    for (int i = 1; i <= n; ++i) {
        std::vector<int> visits;
        for (int p = 1; p <= kk; ++p)
            for (int t = 1; t <= n + 1; ++t)
                visits.push_back(qrobot_var_index(t, i, p, n));
        add_squared_penalty(model, a, 1.0, visits);
    }

    // Per-robot capacity with ceil(log2 M) slack bits, matching the qubit
    // formula. Note an all-idle robot can zero this penalty only when M is
    // not a power of two (slack tops out at 2^bits - 1).
    const int slack_bits = ceil_log2(instance.capacity);
    for (int p = 1; p <= kk; ++p) {
        std::vector<std::pair<int, long long>> coeffs;
        for (int t = 1; t <= n + 1; ++t)
            for (int i = 1; i <= n; ++i)
                coeffs.emplace_back(qrobot_var_index(t, i, p, n),
                                    static_cast<long long>(instance.weights[i - 1]));
        const int first_slack = model.n_vars;
        model.n_vars += slack_bits;
        for (int b = 0; b < slack_bits; ++b)
            model.var_names.push_back("slack_p" + std::to_string(p) + "_b" + std::to_string(b));
        model.slacks.push_back(add_inequality_penalty(
            model, coeffs, instance.capacity, a, first_slack, slack_bits));
    }

    model.validate();
    return model;
}

PenaltyTerms constraint_to_penalty(ConstraintKind kind,
                                   const std::vector<int>& vars, double p) {
    if (!(p > 0.0)) throw ParameterError("constraint_to_penalty: P must be positive");
    const auto need = [&](std::size_t arity) {
        if (vars.size() != arity)
            throw ParameterError("constraint_to_penalty: wrong arity, expected " +
                                 std::to_string(arity));
    };
    PenaltyTerms out;
    const auto quad = [&](int i, int j, double c) {
        if (i > j) std::swap(i, j);
        out.quadratic[{i, j}] += c;
    };
    switch (kind) {
    case ConstraintKind::Equal: // P(x + y - 2xy)
        need(2);
        out.linear[vars[0]] += p;
        out.linear[vars[1]] += p;
        quad(vars[0], vars[1], -2.0 * p);
        break;
    case ConstraintKind::OneHotPair: // P(1 - x - y + 2xy)
        need(2);
        out.constant += p;
        out.linear[vars[0]] -= p;
        out.linear[vars[1]] -= p;
        quad(vars[0], vars[1], 2.0 * p);
        break;
    case ConstraintKind::AtMostOnePair: // P(xy)
        need(2);
        quad(vars[0], vars[1], p);
        break;
    case ConstraintKind::AtLeastOnePair: // P(1 - x - y + xy)
        need(2);
        out.constant += p;
        out.linear[vars[0]] -= p;
        out.linear[vars[1]] -= p;
        quad(vars[0], vars[1], p);
        break;
    case ConstraintKind::Implies: // P(x - xy)
        need(2);
        out.linear[vars[0]] += p;
        quad(vars[0], vars[1], -p);
        break;
    case ConstraintKind::AtMostOneTriple: // P(x1x2 + x1x3 + x2x3)
        need(3);
        quad(vars[0], vars[1], p);
        quad(vars[0], vars[2], p);
        quad(vars[1], vars[2], p);
        break;
    default:
        throw ParameterError("constraint_to_penalty: unknown constraint kind");
    }
    return out;
}

double PenaltyTerms::evaluate(const std::vector<int>& bits) const {
    double energy = constant;
    for (const auto& [key, coeff] : quadratic)
        energy += coeff * bits.at(key.first) * bits.at(key.second);
    for (const auto& [i, coeff] : linear) energy += coeff * bits.at(i);
    return energy;
}

std::pair<PenaltyTerms, SlackEncoding> inequality_to_penalty(
    const std::vector<std::pair<int, long long>>& coeffs,
    long long bound, double p, int first_slack_index) {
    if (bound < 1) throw ParameterError("inequality_to_penalty: bound must be >= 1");
    if (!(p > 0.0)) throw ParameterError("inequality_to_penalty: P must be positive");

    QuboModel scratch;
    const int bits = SlackEncoding::bits_for_bound(bound);
    SlackEncoding enc =
        add_inequality_penalty(scratch, coeffs, bound, p, first_slack_index, bits);
    PenaltyTerms terms;
    terms.quadratic = std::move(scratch.quadratic);
    terms.linear = std::move(scratch.linear);
    terms.constant = scratch.constant;
    return {std::move(terms), std::move(enc)};
}

double evaluate_qubo(const QuboModel& model, const std::vector<int>& bits) {
    if (static_cast<int>(bits.size()) != model.n_vars)
        throw ParameterError("evaluate_qubo: expected " + std::to_string(model.n_vars) +
                             " bits, got " + std::to_string(bits.size()));
    double energy = 0.0;
    for (const auto& [key, coeff] : model.quadratic)
        energy += coeff * bits[key.first] * bits[key.second];
    for (const auto& [i, coeff] : model.linear) energy += coeff * bits[i];
    energy += model.constant;
    return energy;
}

long long qubit_count_swp(int total_nodes, std::optional<long long> capacity_bound) {
    if (total_nodes < 2) throw ParameterError("qubit_count_swp: need at least 2 nodes");
    long long count = static_cast<long long>(total_nodes) * (total_nodes - 1);
    if (capacity_bound) count += SlackEncoding::bits_for_bound(*capacity_bound);
    return count;
}

long long qubit_count_qrobot(int n_items, int k_robots, int capacity) {
    if (n_items < 1 || k_robots < 1 || capacity < 1)
        throw ParameterError("qubit_count_qrobot: invalid parameters");
    return static_cast<long long>(k_robots) * (n_items + 1) * (n_items + 2) +
           static_cast<long long>(k_robots) * ceil_log2(capacity);
}

unsigned long long count_solution_classes(int n_patients, int m_workers) {
    if (n_patients < 1) throw ParameterError("count_solution_classes: need n >= 1");
    if (m_workers < 1) throw ParameterError("count_solution_classes: need m >= 1");
    if (m_workers > n_patients) return 0;

    // (1/m!) sum_{k=0}^{m-1} (-1)^k C(m, m-k) (m-k)^n, evaluated exactly.
    __int128 sum = 0;
    for (int k = 0; k < m_workers; ++k) {
        __int128 binom = 1;
        for (int i = 0; i < k; ++i) binom = binom * (m_workers - i) / (i + 1);
        __int128 pow = 1;
        for (int i = 0; i < n_patients; ++i) pow *= (m_workers - k);
        sum += (k % 2 == 0 ? 1 : -1) * binom * pow;
    }
    __int128 fact = 1;
    for (int i = 2; i <= m_workers; ++i) fact *= i;
    return static_cast<unsigned long long>(sum / fact);
}

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << text;
}

json slacks_to_json(const std::vector<SlackEncoding>& slacks) {
    json arr = json::array();
    for (const auto& s : slacks)
        arr.push_back({{"bound", s.bound},
                       {"bit_count", s.bit_count},
                       {"bit_weights", s.bit_weights},
                       {"var_indices", s.var_indices}});
    return arr;
}

std::vector<SlackEncoding> slacks_from_json(const json& arr) {
    std::vector<SlackEncoding> out;
    for (const auto& item : arr) {
        SlackEncoding s;
        s.bound = item.at("bound").get<long long>();
        s.bit_count = item.at("bit_count").get<int>();
        s.bit_weights = item.at("bit_weights").get<std::vector<long long>>();
        s.var_indices = item.at("var_indices").get<std::vector<int>>();
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

std::string qubo_to_json(const QuboModel& model, const std::string& instance_json) {
    json doc;
    doc["kind"] = "qubo";
    doc["n_vars"] = model.n_vars;
    json quad = json::array();
    for (const auto& [key, coeff] : model.quadratic)
        quad.push_back(json::array({key.first, key.second, coeff}));
    doc["quadratic"] = std::move(quad);
    json lin = json::array();
    for (const auto& [i, coeff] : model.linear)
        lin.push_back(json::array({i, coeff}));
    doc["linear"] = std::move(lin);
    doc["constant"] = model.constant;
    doc["var_names"] = model.var_names;
    json meta;
    meta["penalty_a"] = model.penalty_a;
    meta["problem"] = model.problem;
    meta["slacks"] = slacks_to_json(model.slacks);
    if (!instance_json.empty()) meta["instance"] = json::parse(instance_json);
    doc["meta"] = std::move(meta);
    return doc.dump(2) + "\n";
}

QuboModel qubo_from_json(const std::string& text, std::string* instance_json) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed model document: ") + e.what());
    }
    if (!doc.is_object() || doc.value("kind", "") != "qubo")
        throw ValidationError("model document: expected kind \"qubo\"");
    QuboModel model;
    model.n_vars = doc.at("n_vars").get<int>();
    for (const auto& entry : doc.at("quadratic"))
        model.quadratic[{entry[0].get<int>(), entry[1].get<int>()}] = entry[2].get<double>();
    for (const auto& entry : doc.at("linear"))
        model.linear[entry[0].get<int>()] = entry[1].get<double>();
    model.constant = doc.at("constant").get<double>();
    model.var_names = doc.at("var_names").get<std::vector<std::string>>();
    if (doc.contains("meta")) {
        const auto& meta = doc["meta"];
        model.penalty_a = meta.value("penalty_a", 0.0);
        model.problem = meta.value("problem", "");
        if (meta.contains("slacks")) model.slacks = slacks_from_json(meta["slacks"]);
        if (instance_json && meta.contains("instance"))
            *instance_json = meta["instance"].dump(2) + "\n";
    }
    model.validate();
    return model;
}

void save_qubo(const std::string& path, const QuboModel& model,
               const std::string& instance_json) {
    write_file(path, qubo_to_json(model, instance_json));
}

QuboModel load_qubo(const std::string& path, std::string* instance_json) {
    return qubo_from_json(read_file(path), instance_json);
}

} // namespace qopt
