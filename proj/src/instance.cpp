#include "qopt/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qopt/errors.hpp"
#include "qopt/rng.hpp"

namespace qopt {

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kDayStartMinutes = 540.0;  // 09:00
constexpr double kDayEndMinutes = 1020.0;   // 17:00
constexpr double kVisitMinutes = 60.0;

double round2(double v) { return std::round(v * 100.0) / 100.0; }

} // namespace

double DistanceMatrix::max_off_diagonal() const {
    double best = -std::numeric_limits<double>::infinity();
    const int n = size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) best = std::max(best, d[i][j]);
    return best;
}

double DistanceMatrix::min_off_diagonal() const {
    double best = std::numeric_limits<double>::infinity();
    const int n = size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) best = std::min(best, d[i][j]);
    return best;
}

void DistanceMatrix::validate() const {
    const int n = size();
    if (n == 0) throw ValidationError("distances: empty matrix");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(d[i].size()) != n)
            throw ValidationError("distances: row " + std::to_string(i) + " is not square");
        for (int j = 0; j < n; ++j) {
            const std::string cell =
                "distances[" + std::to_string(i) + "][" + std::to_string(j) + "]";
            if (!std::isfinite(d[i][j])) throw ValidationError(cell + ": not finite");
            if (d[i][j] < 0.0) throw ValidationError(cell + ": negative distance");
            if (i == j && d[i][j] != 0.0) throw ValidationError(cell + ": nonzero diagonal");
            if (d[i][j] != d[j][i]) throw ValidationError(cell + ": asymmetric");
        }
    }
}

void SwpInstance::validate() const {
    if (n_patients < 1) throw ValidationError("n: need at least one patient");
    if (k_workers < 1 || k_workers > n_patients)
        throw ValidationError("k: need 1 <= k <= n");
    if (static_cast<int>(coordinates.size()) != n_patients + 1)
        throw ValidationError("coordinates: expected n+1 points, depot first");
    for (std::size_t i = 0; i < coordinates.size(); ++i)
        if (!std::isfinite(coordinates[i].x) || !std::isfinite(coordinates[i].y))
            throw ValidationError("coordinates[" + std::to_string(i) + "]: not finite");
    if (static_cast<int>(slot_start.size()) != n_patients)
        throw ValidationError("slot_start: expected one entry per patient");
    if (static_cast<int>(slot_duration.size()) != n_patients)
        throw ValidationError("slot_duration: expected one entry per patient");
    for (int i = 0; i < n_patients; ++i) {
        if (!std::isfinite(slot_start[i]))
            throw ValidationError("slot_start[" + std::to_string(i) + "]: not finite");
        if (!(slot_duration[i] > 0.0))
            throw ValidationError("slot_duration[" + std::to_string(i) + "]: must be positive");
    }
    if (max_workload && !(*max_workload > 0.0))
        throw ValidationError("capacity: must be positive when present");
}

void QRobotInstance::validate() const {
    if (n_items < 1) throw ValidationError("n: need at least one item");
    if (k_robots < 1) throw ValidationError("k: need at least one robot");
    if (capacity < 1) throw ValidationError("capacity: must be positive");
    if (static_cast<int>(weights.size()) != n_items)
        throw ValidationError("weights: expected one entry per item");
    for (int i = 0; i < n_items; ++i) {
        if (weights[i] < 1)
            throw ValidationError("weights[" + std::to_string(i) + "]: must be positive");
        if (weights[i] > capacity)
            throw ValidationError("weights[" + std::to_string(i) +
                                  "]: item heavier than capacity, instance infeasible");
    }
    distances.validate();
    if (distances.size() != n_items + 1)
        throw ValidationError("distances: expected (n+1)x(n+1)");
}

DistanceMatrix euclidean_distances(const std::vector<Point>& coordinates) {
    const int n = static_cast<int>(coordinates.size());
    DistanceMatrix out;
    out.d.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = coordinates[i].x - coordinates[j].x;
            const double dy = coordinates[i].y - coordinates[j].y;
            const double dist = round2(std::hypot(dx, dy));
            out.d[i][j] = dist;
            out.d[j][i] = dist;
        }
    }
    return out;
}

std::pair<SwpInstance, DistanceMatrix> generate_swp_instance(
    int n_patients, int k_workers, std::uint64_t seed,
    const Area& area, int slot_grid_minutes) {
    if (n_patients < 1) throw ParameterError("generate_swp_instance: n_patients must be >= 1");
    if (k_workers < 1 || k_workers > n_patients)
        throw ParameterError("generate_swp_instance: need 1 <= k_workers <= n_patients");
    if (!(area.x_max > area.x_min) || !(area.y_max > area.y_min))
        throw ParameterError("generate_swp_instance: degenerate area");
    if (slot_grid_minutes < 1)
        throw ParameterError("generate_swp_instance: slot grid must be >= 1 minute");

    Rng rng(seed);
    SwpInstance inst;
    inst.n_patients = n_patients;
    inst.k_workers = k_workers;
    inst.coordinates.resize(n_patients + 1);
    for (int i = 0; i <= n_patients; ++i) {
        inst.coordinates[i].x = round2(rng.uniform(area.x_min, area.x_max));
        inst.coordinates[i].y = round2(rng.uniform(area.y_min, area.y_max));
    }
    const auto last_slot = static_cast<std::int64_t>(
        (kDayEndMinutes - kDayStartMinutes - kVisitMinutes) / slot_grid_minutes);
    inst.slot_start.resize(n_patients);
    inst.slot_duration.assign(n_patients, kVisitMinutes);
    for (int i = 0; i < n_patients; ++i)
        inst.slot_start[i] = kDayStartMinutes +
            static_cast<double>(rng.uniform_int(0, last_slot) * slot_grid_minutes);

    DistanceMatrix dist = euclidean_distances(inst.coordinates);
    inst.validate();
    dist.validate();
    return {std::move(inst), std::move(dist)};
}

QRobotInstance generate_qrobot_instance(
    int n_items, int k_robots, std::uint64_t seed,
    const Area& area, int capacity) {
    if (n_items < 1) throw ParameterError("generate_qrobot_instance: n_items must be >= 1");
    if (k_robots < 1) throw ParameterError("generate_qrobot_instance: k_robots must be >= 1");
    if (!(area.x_max > area.x_min) || !(area.y_max > area.y_min))
        throw ParameterError("generate_qrobot_instance: degenerate area");

    Rng rng(seed);
    std::vector<Point> coords(n_items + 1);
    for (int i = 0; i <= n_items; ++i) {
        coords[i].x = round2(rng.uniform(area.x_min, area.x_max));
        coords[i].y = round2(rng.uniform(area.y_min, area.y_max));
    }
    QRobotInstance inst;
    inst.n_items = n_items;
    inst.k_robots = k_robots;
    inst.capacity = capacity;
    inst.weights.resize(n_items);
    for (int i = 0; i < n_items; ++i)
        inst.weights[i] = static_cast<int>(rng.uniform_int(1, 10));
    inst.distances = euclidean_distances(coords);
    inst.validate();
    return inst;
}

WeightMatrix build_weight_matrix(const SwpInstance& instance,
                                 const DistanceMatrix& distances,
                                 double gamma) {
    instance.validate();
    distances.validate();
    if (distances.size() != instance.n_patients + 1)
        throw ParameterError("build_weight_matrix: distance matrix does not match instance");
    if (gamma < 0.0) throw ParameterError("build_weight_matrix: gamma must be >= 0");

    const int m = distances.size();
    const double d_max = distances.max_off_diagonal();
    const double d_min = distances.min_off_diagonal();
    // The window term divides by the distance spread; the spread is only
    // needed when the term can be nonzero (gamma > 0 and a patient pair).
    if (gamma > 0.0 && instance.n_patients >= 2 && !(d_max > d_min))
        throw ParameterError(
            "build_weight_matrix: degenerate instance, d_max == d_min would divide by zero");

    WeightMatrix out;
    out.gamma = gamma;
    out.w.assign(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            // tau_0 is pinned to the other endpoint's slot, so depot edges
            // carry no window term.
            double gap = 0.0;
            if (i > 0 && j > 0)
                gap = instance.slot_start[i - 1] - instance.slot_start[j - 1];
            out.w[i][j] = distances.d[i][j];
            if (gamma > 0.0 && gap != 0.0)
                out.w[i][j] += gamma * gap * gap / (d_max - d_min);
        }
    }
    return out;
}

namespace {

using nlohmann::json;

void require_fields(const json& doc, const std::vector<std::string>& required,
                    const std::vector<std::string>& optional) {
    for (const auto& key : required)
        if (!doc.contains(key)) throw ValidationError("missing field: " + key);
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (std::find(required.begin(), required.end(), key) == required.end() &&
            std::find(optional.begin(), optional.end(), key) == optional.end())
            throw ValidationError("unknown field: " + key);
    }
}

void check_version(const json& doc) {
    if (!doc.contains("schema_version"))
        throw ValidationError("missing field: schema_version");
    if (!doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != kSchemaVersion)
        throw ValidationError("schema_version mismatch: expected " +
                              std::to_string(kSchemaVersion));
}

json coords_to_json(const std::vector<Point>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(json::array({p.x, p.y}));
    return arr;
}

std::vector<Point> coords_from_json(const json& arr) {
    std::vector<Point> pts;
    for (const auto& item : arr) {
        if (!item.is_array() || item.size() != 2)
            throw ValidationError("coordinates: each entry must be [x, y]");
        pts.push_back(Point{item[0].get<double>(), item[1].get<double>()});
    }
    return pts;
}

DistanceMatrix distances_from_json(const json& arr) {
    DistanceMatrix dist;
    for (const auto& row : arr)
        dist.d.push_back(row.get<std::vector<double>>());
    return dist;
}

json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed instance document: ") + e.what());
    }
}

} // namespace

std::string instance_to_json(const SwpInstance& instance, const DistanceMatrix& distances) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "swp";
    doc["n"] = instance.n_patients;
    doc["k"] = instance.k_workers;
    doc["coordinates"] = coords_to_json(instance.coordinates);
    doc["slot_start"] = instance.slot_start;
    doc["slot_duration"] = instance.slot_duration;
    if (instance.max_workload) doc["capacity"] = *instance.max_workload;
    doc["distances"] = distances.d;
    return doc.dump(2) + "\n";
}

std::string instance_to_json(const QRobotInstance& instance) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "qrobot";
    doc["n"] = instance.n_items;
    doc["k"] = instance.k_robots;
    doc["capacity"] = instance.capacity;
    doc["weights"] = instance.weights;
    doc["distances"] = instance.distances.d;
    return doc.dump(2) + "\n";
}

InstanceDoc instance_from_json(const std::string& text) {
    const json doc = parse_document(text);
    if (!doc.is_object()) throw ValidationError("instance document must be a JSON object");
    check_version(doc);
    if (!doc.contains("kind")) throw ValidationError("missing field: kind");
    const std::string kind = doc["kind"].get<std::string>();

    if (kind == "swp") {
        require_fields(doc,
                       {"schema_version", "kind", "n", "k", "coordinates",
                        "slot_start", "slot_duration"},
                       {"capacity", "distances"});
        SwpInstance inst;
        inst.n_patients = doc["n"].get<int>();
        inst.k_workers = doc["k"].get<int>();
        inst.coordinates = coords_from_json(doc["coordinates"]);
        inst.slot_start = doc["slot_start"].get<std::vector<double>>();
        inst.slot_duration = doc["slot_duration"].get<std::vector<double>>();
        if (doc.contains("capacity")) inst.max_workload = doc["capacity"].get<double>();
        DistanceMatrix dist = doc.contains("distances")
                                  ? distances_from_json(doc["distances"])
                                  : euclidean_distances(inst.coordinates);
        inst.validate();
        dist.validate();
        if (dist.size() != inst.n_patients + 1)
            throw ValidationError("distances: expected (n+1)x(n+1)");
        return std::make_pair(std::move(inst), std::move(dist));
    }
    if (kind == "qrobot") {
        require_fields(doc,
                       {"schema_version", "kind", "n", "k", "capacity",
                        "weights", "distances"},
                       {});
        QRobotInstance inst;
        inst.n_items = doc["n"].get<int>();
        inst.k_robots = doc["k"].get<int>();
        inst.capacity = doc["capacity"].get<int>();
        inst.weights = doc["weights"].get<std::vector<int>>();
        inst.distances = distances_from_json(doc["distances"]);
        inst.validate();
        return inst;
    }
    throw ValidationError("kind: expected \"swp\" or \"qrobot\", got \"" + kind + "\"");
}

namespace {

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

} // namespace

void save_instance(const std::string& path, const SwpInstance& inst, const DistanceMatrix& dist) {
    write_file(path, instance_to_json(inst, dist));
}

void save_instance(const std::string& path, const QRobotInstance& inst) {
    write_file(path, instance_to_json(inst));
}

InstanceDoc load_instance(const std::string& path) {
    return instance_from_json(read_file(path));
}

} // namespace qopt
