#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qopt/instance.hpp"
#include "qopt/qubo.hpp"

namespace qopt {

struct Routes {
    std::vector<std::vector<int>> tours; // each starts and ends at depot 0
    double total_cost = 0.0;             // W over the chosen arcs
    int workers_used = 0;
};

struct RobotVisit {
    int time = 0;
    int node = 0;
};

struct RobotPlan {
    struct Robot {
        int robot = 0;                 // 1-based id
        std::vector<RobotVisit> visits; // time-ordered
        double load = 0.0;             // kg
    };
    std::vector<Robot> robots;
    double total_distance = 0.0;
};

struct Violation {
    std::string constraint;
    std::string detail;
};

struct FeasibilityReport {
    bool feasible = false;
    std::vector<Violation> violations;
    double recomputed_cost = 0.0;
};

// Rebuilds the arc set {(i,j) : x_ij = 1} from the model's variable names and
// verifies every routing constraint independently of the penalty terms:
// in/out-degree one per patient, depot degree k both ways, no depot-less
// subtour, and the optional workload cap per tour. Slack bits are ignored.
std::pair<Routes, FeasibilityReport> decode_swp(const std::vector<int>& bits,
                                                const QuboModel& model,
                                                const SwpInstance& instance,
                                                const WeightMatrix& weights);

// Rebuilds the per-robot timelines from x_{t,i,p} and checks one node per
// robot per time step, depot boundary conditions, unique item coverage and
// the per-robot capacity.
std::pair<RobotPlan, FeasibilityReport> decode_qrobot(const std::vector<int>& bits,
                                                      const QuboModel& model,
                                                      const QRobotInstance& instance);

std::string routes_to_json(const Routes& routes, const FeasibilityReport& report);
std::string robot_plan_to_json(const RobotPlan& plan, const FeasibilityReport& report);

std::string render_routes(const Routes& routes, const FeasibilityReport& report);
std::string render_robot_plan(const RobotPlan& plan, const FeasibilityReport& report);

} // namespace qopt
