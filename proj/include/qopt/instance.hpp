#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qopt {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Area {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 10.0;
    double y_max = 10.0;
};

// Symmetric (n+1)x(n+1) travel distances over depot + n client nodes.
struct DistanceMatrix {
    std::vector<std::vector<double>> d;

    int size() const { return static_cast<int>(d.size()); }
    double max_off_diagonal() const;
    double min_off_diagonal() const;
    void validate() const; // symmetric, zero diagonal, finite, nonnegative
};

// Home-care routing instance: node 0 is the depot, patients are 1..n.
// Slot times are minutes from midnight.
struct SwpInstance {
    int n_patients = 0;
    int k_workers = 0;
    std::vector<Point> coordinates;       // n+1 points, depot first
    std::vector<double> slot_start;       // per patient, tau_i
    std::vector<double> slot_duration;    // per patient, > 0
    std::optional<double> max_workload;   // optional per-worker cap q

    void validate() const;
};

// Blended travel cost: distance plus the quadratic schedule-gap term.
struct WeightMatrix {
    std::vector<std::vector<double>> w;
    double gamma = 0.0;

    int size() const { return static_cast<int>(w.size()); }
};

// Warehouse picking instance: node 0 is the depot, items are 1..n.
struct QRobotInstance {
    int n_items = 0;
    int k_robots = 0;
    int capacity = 0;                 // max load M per robot, kg
    std::vector<int> weights;         // per item, kg, positive
    DistanceMatrix distances;

    void validate() const;
};

// Euclidean distances rounded to 2 decimals so downstream coefficients are
// bit-identical across platforms.
DistanceMatrix euclidean_distances(const std::vector<Point>& coordinates);

std::pair<SwpInstance, DistanceMatrix> generate_swp_instance(
    int n_patients, int k_workers, std::uint64_t seed,
    const Area& area = Area{}, int slot_grid_minutes = 15);

QRobotInstance generate_qrobot_instance(
    int n_items, int k_robots, std::uint64_t seed,
    const Area& area = Area{}, int capacity = 45);

// W_ij = d_ij + gamma * (tau_i - tau_j)^2 / (d_max - d_min), with the depot
// convention tau_0 = tau_j (the window term vanishes on depot edges).
WeightMatrix build_weight_matrix(const SwpInstance& instance,
                                 const DistanceMatrix& distances,
                                 double gamma);

// JSON instance files: {schema_version, kind, n, k, coordinates, slot_start,
// slot_duration, capacity?, weights?, distances?}. Unknown fields are
// rejected; distances are recomputed when absent.
using InstanceDoc = std::variant<std::pair<SwpInstance, DistanceMatrix>, QRobotInstance>;

std::string instance_to_json(const SwpInstance& instance, const DistanceMatrix& distances);
std::string instance_to_json(const QRobotInstance& instance);
InstanceDoc instance_from_json(const std::string& text);

void save_instance(const std::string& path, const SwpInstance& inst, const DistanceMatrix& dist);
void save_instance(const std::string& path, const QRobotInstance& inst);
InstanceDoc load_instance(const std::string& path);

} // namespace qopt
