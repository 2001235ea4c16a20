#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qopt/qubo.hpp"

namespace qopt {

// H(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + offset, spins in {-1,+1}.
struct IsingModel {
    int n_spins = 0;
    std::map<std::pair<int, int>, double> couplings; // keys i < j
    std::vector<double> fields;
    double offset = 0.0;
    std::vector<std::string> var_names;

    void add_coupling(int i, int j, double coeff);
    void validate() const;
};

// Weighted diagonal Pauli terms: empty index set = identity, one index = Z_i,
// two indices = Z_i Z_j.
struct PauliTerm {
    std::vector<int> qubits; // sorted, size 0..2
    double coeff = 0.0;
};

struct PauliTermList {
    int n_qubits = 0;
    std::vector<PauliTerm> terms;
};

// Change of variables s = 2x - 1 (bit 1 <-> spin +1); energies match exactly
// on every assignment.
IsingModel qubo_to_ising(const QuboModel& model);
QuboModel ising_to_qubo(const IsingModel& model);

double evaluate_ising(const IsingModel& model, const std::vector<int>& spins);

// With the convention Z|b> = (1-2b)|b>, a field h_i emits -h_i on Z_i, a
// coupling J_ij emits +J_ij on Z_i Z_j and the offset rides on the identity,
// so the expectation on |b> equals evaluate_ising(2b - 1).
PauliTermList to_pauli_terms(const IsingModel& model);

// Energy of the term list on computational basis state b (bits, not spins).
double pauli_terms_basis_energy(const PauliTermList& terms, const std::vector<int>& bits);

// h_i = (1/4) sum_k (q_ik + q_ki) over a full square matrix; the worked
// example's external-field rule.
std::vector<double> external_field_from_q(const std::vector<std::vector<double>>& q);

// Ising export mirrors the QUBO export: {n_spins, J:[[i,j,c]...],
// h:[[i,c]...], offset, var_names}.
std::string ising_to_json(const IsingModel& model, const std::string& instance_json = "");
IsingModel ising_from_json(const std::string& text, std::string* instance_json = nullptr);
void save_ising(const std::string& path, const IsingModel& model,
                const std::string& instance_json = "");
IsingModel load_ising(const std::string& path, std::string* instance_json = nullptr);

} // namespace qopt
