#pragma once

#include <vector>

#include "qml/qcore.hpp"

namespace qml {

/// Hadamard layer, then one RZ per key bit on qubit (bit mod n) with
/// pairwise-incommensurate angles. Distinct keys give distinct states.
CircuitFamily make_cond_phase_family(int num_qubits, int key_bits);

/// GHZ backbone (H + CNOT chain) with key-conditioned RZ / S twists.
CircuitFamily make_ghz_twist_family(int num_qubits, int key_bits);

/// Key-conditioned RY rotations over a Hadamard layer; amplitudes (not just
/// phases) depend on the key.
CircuitFamily make_rotor_family(int num_qubits, int key_bits);

/// |k>: one conditional X per key bit; pairwise-orthogonal outputs.
/// key_bits must equal num_qubits.
CircuitFamily make_basis_family(int num_qubits);

/// Every key produces the same |0...0> state.
CircuitFamily make_constant_family(int num_qubits, int key_bits);

/// The three small families used by distribution-level identity tests.
std::vector<CircuitFamily> default_test_families();

/// Families with 8 key bits used by the posterior-sampler bound experiments.
std::vector<CircuitFamily> default_qmlh_suite();

} // namespace qml
