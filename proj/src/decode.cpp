#include "qopt/decode.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "qopt/errors.hpp"

namespace qopt {

namespace {

// Parses "x_<i>_<j>" into an arc; returns false for slack or foreign names.
bool parse_swp_name(const std::string& name, int& from, int& to) {
    if (name.rfind("x_", 0) != 0) return false;
    const auto mid = name.find('_', 2);
    if (mid == std::string::npos) return false;
    try {
        from = std::stoi(name.substr(2, mid - 2));
        to = std::stoi(name.substr(mid + 1));
    } catch (...) {
        return false;
    }
    return true;
}

// Parses "x_t<t>_i<i>_p<p>".
bool parse_qrobot_name(const std::string& name, int& t, int& i, int& p) {
    if (name.rfind("x_t", 0) != 0) return false;
    const auto i_pos = name.find("_i", 3);
    const auto p_pos = name.find("_p", i_pos == std::string::npos ? 0 : i_pos + 2);
    if (i_pos == std::string::npos || p_pos == std::string::npos) return false;
    try {
        t = std::stoi(name.substr(3, i_pos - 3));
        i = std::stoi(name.substr(i_pos + 2, p_pos - i_pos - 2));
        p = std::stoi(name.substr(p_pos + 2));
    } catch (...) {
        return false;
    }
    return true;
}

} // namespace

std::pair<Routes, FeasibilityReport> decode_swp(const std::vector<int>& bits,
                                                const QuboModel& model,
                                                const SwpInstance& instance,
                                                const WeightMatrix& weights) {
    if (static_cast<int>(bits.size()) != model.n_vars)
        throw ParameterError("decode_swp: bit vector does not match the model");
    const int m = instance.n_patients + 1;
    if (weights.size() != m)
        throw ParameterError("decode_swp: weight matrix does not match the instance");

    // Rebuild the arc layout from the variable names.
    std::vector<std::vector<bool>> chosen(m, std::vector<bool>(m, false));
    int arcs_found = 0;
    for (int idx = 0; idx < model.n_vars; ++idx) {
        if (idx >= static_cast<int>(model.var_names.size())) break;
        int from = 0, to = 0;
        if (!parse_swp_name(model.var_names[idx], from, to)) continue;
        if (from < 0 || to < 0 || from >= m || to >= m || from == to)
            throw ParameterError("decode_swp: arc variable out of range: " +
                                 model.var_names[idx]);
        ++arcs_found;
        if (bits[idx]) chosen[from][to] = true;
    }
    if (arcs_found != m * (m - 1))
        throw ParameterError("decode_swp: model variable names do not carry the "
                             "expected x_i_j arc layout");

    FeasibilityReport report;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (chosen[i][j]) report.recomputed_cost += weights.w[i][j];

    const auto note = [&](const std::string& tag, const std::string& detail) {
        report.violations.push_back(Violation{tag, detail});
    };

    bool degrees_ok = true;
    for (int v = 1; v < m; ++v) {
        int out_deg = 0, in_deg = 0;
        for (int u = 0; u < m; ++u) {
            if (u == v) continue;
            out_deg += chosen[v][u] ? 1 : 0;
            in_deg += chosen[u][v] ? 1 : 0;
        }
        if (out_deg != 1) {
            degrees_ok = false;
            note("out-degree", "patient " + std::to_string(v) + " has out-degree " +
                                   std::to_string(out_deg));
        }
        if (in_deg != 1) {
            degrees_ok = false;
            note("in-degree", "patient " + std::to_string(v) + " has in-degree " +
                                  std::to_string(in_deg));
        }
    }
    int depot_out = 0, depot_in = 0;
    for (int v = 1; v < m; ++v) {
        depot_out += chosen[0][v] ? 1 : 0;
        depot_in += chosen[v][0] ? 1 : 0;
    }
    if (depot_out != instance.k_workers) {
        degrees_ok = false;
        note("depot-out", "depot out-degree " + std::to_string(depot_out) + ", expected " +
                              std::to_string(instance.k_workers));
    }
    if (depot_in != instance.k_workers) {
        degrees_ok = false;
        note("depot-in", "depot in-degree " + std::to_string(depot_in) + ", expected " +
                             std::to_string(instance.k_workers));
    }

    Routes routes;
    routes.total_cost = report.recomputed_cost;

    if (degrees_ok) {
        // The successor map is a permutation; every cycle must pass through
        // the depot.
        std::vector<bool> visited(m, false);
        for (int first = 1; first < m; ++first) {
            if (!chosen[0][first]) continue;
            std::vector<int> tour{0, first};
            visited[first] = true;
            int at = first;
            while (at != 0) {
                int next = -1;
                for (int v = 0; v < m; ++v)
                    if (v != at && chosen[at][v]) next = v;
                tour.push_back(next);
                at = next;
                if (at != 0) visited[at] = true;
            }
            routes.tours.push_back(std::move(tour));
        }
        std::vector<int> stranded;
        for (int v = 1; v < m; ++v)
            if (!visited[v]) stranded.push_back(v);
        if (!stranded.empty()) {
            std::string detail = "patients in a cycle not touching the depot:";
            for (int v : stranded) detail += " " + std::to_string(v);
            note("subtour", detail);
            routes.tours.clear();
        } else {
            routes.workers_used = static_cast<int>(routes.tours.size());
            if (instance.max_workload) {
                for (const auto& tour : routes.tours) {
                    double load = 0.0;
                    for (std::size_t i = 0; i + 1 < tour.size(); ++i)
                        load += weights.w[tour[i]][tour[i + 1]];
                    if (load > *instance.max_workload)
                        note("workload",
                             "tour load " + std::to_string(load) + " exceeds cap " +
                                 std::to_string(*instance.max_workload));
                }
            }
        }
    }

    report.feasible = report.violations.empty();
    return {std::move(routes), std::move(report)};
}

std::pair<RobotPlan, FeasibilityReport> decode_qrobot(const std::vector<int>& bits,
                                                      const QuboModel& model,
                                                      const QRobotInstance& instance) {
    if (static_cast<int>(bits.size()) != model.n_vars)
        throw ParameterError("decode_qrobot: bit vector does not match the model");
    const int n = instance.n_items;
    const int kk = instance.k_robots;

    // occupancy[p][t] = nodes claimed by robot p at time t.
    std::vector<std::vector<std::vector<int>>> occupancy(
        kk + 1, std::vector<std::vector<int>>(n + 2));
    int vars_found = 0;
    for (int idx = 0; idx < model.n_vars; ++idx) {
        if (idx >= static_cast<int>(model.var_names.size())) break;
        int t = 0, node = 0, p = 0;
        if (!parse_qrobot_name(model.var_names[idx], t, node, p)) continue;
        if (t < 0 || t > n + 1 || node < 0 || node > n || p < 1 || p > kk)
            throw ParameterError("decode_qrobot: variable out of range: " +
                                 model.var_names[idx]);
        ++vars_found;
        if (bits[idx]) occupancy[p][t].push_back(node);
    }
    if (vars_found != kk * (n + 1) * (n + 2))
        throw ParameterError("decode_qrobot: model variable names do not carry the "
                             "expected x_t_i_p layout");

    FeasibilityReport report;
    const auto note = [&](const std::string& tag, const std::string& detail) {
        report.violations.push_back(Violation{tag, detail});
    };

    // Objective value of the chosen bits, defined for any assignment.
    for (int p = 1; p <= kk; ++p)
        for (int t = 1; t <= n + 1; ++t)
            for (int i : occupancy[p][t - 1])
                for (int j : occupancy[p][t])
                    report.recomputed_cost += instance.distances.d[i][j];

    RobotPlan plan;
    plan.total_distance = report.recomputed_cost;

    std::vector<int> item_visits(n + 1, 0);
    for (int p = 1; p <= kk; ++p) {
        RobotPlan::Robot robot;
        robot.robot = p;
        for (int t = 0; t <= n + 1; ++t) {
            if (occupancy[p][t].size() != 1)
                note("one-node-per-time",
                     "robot " + std::to_string(p) + " occupies " +
                         std::to_string(occupancy[p][t].size()) + " nodes at t=" +
                         std::to_string(t));
            for (int node : occupancy[p][t]) {
                robot.visits.push_back(RobotVisit{t, node});
                if (node >= 1 && t >= 1) {
                    ++item_visits[node];
                    robot.load += instance.weights[node - 1];
                }
            }
        }
        if (occupancy[p][0] != std::vector<int>{0})
            note("depot-start", "robot " + std::to_string(p) + " does not start at the depot");
        if (occupancy[p][n + 1] != std::vector<int>{0})
            note("depot-end", "robot " + std::to_string(p) + " does not end at the depot");
        if (robot.load > instance.capacity)
            note("capacity", "robot " + std::to_string(p) + " load " +
                                 std::to_string(robot.load) + " exceeds " +
                                 std::to_string(instance.capacity));
        plan.robots.push_back(std::move(robot));
    }
    for (int i = 1; i <= n; ++i)
        if (item_visits[i] != 1)
            note("item-coverage", "item " + std::to_string(i) + " visited " +
                                      std::to_string(item_visits[i]) + " times");

    report.feasible = report.violations.empty();
    return {std::move(plan), std::move(report)};
}

namespace {

nlohmann::json report_to_json(const FeasibilityReport& report) {
    nlohmann::json doc;
    doc["feasible"] = report.feasible;
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"constraint", v.constraint}, {"detail", v.detail}});
    doc["violations"] = std::move(violations);
    doc["recomputed_cost"] = report.recomputed_cost;
    return doc;
}

} // namespace

std::string routes_to_json(const Routes& routes, const FeasibilityReport& report) {
    nlohmann::json doc;
    doc["tours"] = routes.tours;
    doc["total_cost"] = routes.total_cost;
    doc["workers_used"] = routes.workers_used;
    doc["report"] = report_to_json(report);
    return doc.dump(2) + "\n";
}

std::string robot_plan_to_json(const RobotPlan& plan, const FeasibilityReport& report) {
    nlohmann::json doc;
    nlohmann::json robots = nlohmann::json::array();
    for (const auto& robot : plan.robots) {
        nlohmann::json visits = nlohmann::json::array();
        for (const auto& v : robot.visits)
            visits.push_back(nlohmann::json::array({v.time, v.node}));
        robots.push_back({{"robot", robot.robot}, {"visits", visits}, {"load", robot.load}});
    }
    doc["robots"] = std::move(robots);
    doc["total_distance"] = plan.total_distance;
    doc["report"] = report_to_json(report);
    return doc.dump(2) + "\n";
}

std::string render_routes(const Routes& routes, const FeasibilityReport& report) {
    std::ostringstream out;
    out << (report.feasible ? "feasible" : "infeasible")
        << ", cost " << report.recomputed_cost << "\n";
    for (const auto& tour : routes.tours) {
        out << "  tour:";
        for (int v : tour) out << " " << v;
        out << "\n";
    }
    for (const auto& v : report.violations)
        out << "  violation [" << v.constraint << "] " << v.detail << "\n";
    return out.str();
}

std::string render_robot_plan(const RobotPlan& plan, const FeasibilityReport& report) {
    std::ostringstream out;
    out << (report.feasible ? "feasible" : "infeasible")
        << ", distance " << plan.total_distance << "\n";
    for (const auto& robot : plan.robots) {
        out << "  robot " << robot.robot << " (load " << robot.load << "):";
        for (const auto& v : robot.visits) out << " t" << v.time << "@" << v.node;
        out << "\n";
    }
    for (const auto& v : report.violations)
        out << "  violation [" << v.constraint << "] " << v.detail << "\n";
    return out.str();
}

} // namespace qopt
