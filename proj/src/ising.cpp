#include "qopt/ising.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qopt/errors.hpp"

namespace qopt {

void IsingModel::add_coupling(int i, int j, double coeff) {
    if (i == j) throw ParameterError("coupling key needs two distinct indices");
    if (i > j) std::swap(i, j);
    couplings[{i, j}] += coeff;
}

void IsingModel::validate() const {
    if (n_spins < 0) throw ValidationError("ising: negative n_spins");
    if (static_cast<int>(fields.size()) != n_spins)
        throw ValidationError("ising: fields size mismatch");
    for (const auto& [key, coeff] : couplings) {
        if (key.first < 0 || key.second >= n_spins || key.first >= key.second)
            throw ValidationError("ising: bad coupling key");
        if (!std::isfinite(coeff)) throw ValidationError("ising: non-finite coupling");
    }
    for (double h : fields)
        if (!std::isfinite(h)) throw ValidationError("ising: non-finite field");
    if (!std::isfinite(offset)) throw ValidationError("ising: non-finite offset");
}

IsingModel qubo_to_ising(const QuboModel& model) {
    model.validate();
    IsingModel out;
    out.n_spins = model.n_vars;
    out.fields.assign(model.n_vars, 0.0);
    out.var_names = model.var_names;
    out.offset = model.constant;

    // x_i x_j = (1 + s_i + s_j + s_i s_j) / 4
    for (const auto& [key, q] : model.quadratic) {
        out.add_coupling(key.first, key.second, q / 4.0);
        out.fields[key.first] += q / 4.0;
        out.fields[key.second] += q / 4.0;
        out.offset += q / 4.0;
    }
    // x_i = (1 + s_i) / 2
    for (const auto& [i, g] : model.linear) {
        out.fields[i] += g / 2.0;
        out.offset += g / 2.0;
    }
    return out;
}

QuboModel ising_to_qubo(const IsingModel& model) {
    model.validate();
    QuboModel out;
    out.n_vars = model.n_spins;
    out.var_names = model.var_names;
    out.constant = model.offset;

    // s_i s_j = 4 x_i x_j - 2 x_i - 2 x_j + 1
    for (const auto& [key, j] : model.couplings) {
        out.add_quadratic(key.first, key.second, 4.0 * j);
        out.add_linear(key.first, -2.0 * j);
        out.add_linear(key.second, -2.0 * j);
        out.constant += j;
    }
    // s_i = 2 x_i - 1
    for (int i = 0; i < model.n_spins; ++i) {
        if (model.fields[i] == 0.0) continue;
        out.add_linear(i, 2.0 * model.fields[i]);
        out.constant -= model.fields[i];
    }
    return out;
}

double evaluate_ising(const IsingModel& model, const std::vector<int>& spins) {
    if (static_cast<int>(spins.size()) != model.n_spins)
        throw ParameterError("evaluate_ising: expected " + std::to_string(model.n_spins) +
                             " spins, got " + std::to_string(spins.size()));
    for (int s : spins)
        if (s != 1 && s != -1)
            throw ParameterError("evaluate_ising: spins must be +1 or -1");
    double energy = 0.0;
    for (const auto& [key, j] : model.couplings)
        energy += j * spins[key.first] * spins[key.second];
    for (int i = 0; i < model.n_spins; ++i) energy += model.fields[i] * spins[i];
    energy += model.offset;
    return energy;
}

PauliTermList to_pauli_terms(const IsingModel& model) {
    model.validate();
    PauliTermList out;
    out.n_qubits = model.n_spins;
    // s_i = -Z_i on basis states under s = 2b - 1 and Z|b> = (1-2b)|b>.
    out.terms.push_back(PauliTerm{{}, model.offset});
    for (int i = 0; i < model.n_spins; ++i)
        if (model.fields[i] != 0.0)
            out.terms.push_back(PauliTerm{{i}, -model.fields[i]});
    for (const auto& [key, j] : model.couplings)
        if (j != 0.0)
            out.terms.push_back(PauliTerm{{key.first, key.second}, j});
    return out;
}

double pauli_terms_basis_energy(const PauliTermList& terms, const std::vector<int>& bits) {
    if (static_cast<int>(bits.size()) != terms.n_qubits)
        throw ParameterError("pauli_terms_basis_energy: bit count mismatch");
    double energy = 0.0;
    for (const auto& term : terms.terms) {
        double z = term.coeff;
        for (int q : term.qubits) z *= 1.0 - 2.0 * bits[q];
        energy += z;
    }
    return energy;
}

std::vector<double> external_field_from_q(const std::vector<std::vector<double>>& q) {
    const auto n = q.size();
    for (const auto& row : q)
        if (row.size() != n)
            throw ParameterError("external_field_from_q: matrix must be square");
    std::vector<double> h(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += q[i][k] + q[k][i];
        h[i] = sum / 4.0;
    }
    return h;
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

} // namespace

std::string ising_to_json(const IsingModel& model, const std::string& instance_json) {
    json doc;
    doc["kind"] = "ising";
    doc["n_spins"] = model.n_spins;
    json couplings = json::array();
    for (const auto& [key, coeff] : model.couplings)
        couplings.push_back(json::array({key.first, key.second, coeff}));
    doc["J"] = std::move(couplings);
    json fields = json::array();
    for (int i = 0; i < model.n_spins; ++i)
        fields.push_back(json::array({i, model.fields[i]}));
    doc["h"] = std::move(fields);
    doc["offset"] = model.offset;
    doc["var_names"] = model.var_names;
    if (!instance_json.empty()) {
        json meta;
        meta["instance"] = json::parse(instance_json);
        doc["meta"] = std::move(meta);
    }
    return doc.dump(2) + "\n";
}

IsingModel ising_from_json(const std::string& text, std::string* instance_json) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed model document: ") + e.what());
    }
    if (!doc.is_object() || doc.value("kind", "") != "ising")
        throw ValidationError("model document: expected kind \"ising\"");
    IsingModel model;
    model.n_spins = doc.at("n_spins").get<int>();
    model.fields.assign(model.n_spins, 0.0);
    for (const auto& entry : doc.at("J"))
        model.couplings[{entry[0].get<int>(), entry[1].get<int>()}] = entry[2].get<double>();
    for (const auto& entry : doc.at("h"))
        model.fields.at(entry[0].get<int>()) = entry[1].get<double>();
    model.offset = doc.at("offset").get<double>();
    model.var_names = doc.at("var_names").get<std::vector<std::string>>();
    if (instance_json && doc.contains("meta") && doc["meta"].contains("instance"))
        *instance_json = doc["meta"]["instance"].dump(2) + "\n";
    model.validate();
    return model;
}

void save_ising(const std::string& path, const IsingModel& model,
                const std::string& instance_json) {
    write_file(path, ising_to_json(model, instance_json));
}

IsingModel load_ising(const std::string& path, std::string* instance_json) {
    return ising_from_json(read_file(path), instance_json);
}

} // namespace qopt
