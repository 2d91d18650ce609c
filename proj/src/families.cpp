#include "qml/families.hpp"

#include <cmath>
#include <numbers>

namespace qml {

namespace {

// Golden-ratio angle sequence: 2*pi*frac((i+1)*phi). No two subset sums of
// distinct entries collide modulo 2*pi at the key lengths used here.
double twist_angle(int i)
{
    constexpr double phi = 0.6180339887498948482;
    const double frac = std::fmod((i + 1) * phi, 1.0);
    return 2.0 * std::numbers::pi * frac;
}

} // namespace

CircuitFamily make_cond_phase_family(int num_qubits, int key_bits)
{
    CircuitFamily family;
    family.num_qubits = num_qubits;
    family.key_bits = key_bits;
    for (int q = 0; q < num_qubits; ++q)
        family.gates.push_back({GateKind::H, q, -1, 0.0, -1});
    for (int b = 0; b < key_bits; ++b)
        family.gates.push_back({GateKind::RZ, b % num_qubits, -1, twist_angle(b), b});
    family.validate();
    return family;
}

CircuitFamily make_ghz_twist_family(int num_qubits, int key_bits)
{
    CircuitFamily family;
    family.num_qubits = num_qubits;
    family.key_bits = key_bits;
    family.gates.push_back({GateKind::H, 0, -1, 0.0, -1});
    for (int q = 0; q + 1 < num_qubits; ++q)
        family.gates.push_back({GateKind::CNOT, q + 1, q, 0.0, -1});
    for (int b = 0; b < key_bits; ++b) {
        const int q = b % num_qubits;
        if (b % 2 == 0)
            family.gates.push_back({GateKind::RZ, q, -1, twist_angle(b + 3), b});
        else
            family.gates.push_back({GateKind::S, q, -1, 0.0, b});
    }
    family.validate();
    return family;
}

CircuitFamily make_rotor_family(int num_qubits, int key_bits)
{
    CircuitFamily family;
    family.num_qubits = num_qubits;
    family.key_bits = key_bits;
    for (int q = 0; q < num_qubits; ++q)
        family.gates.push_back({GateKind::H, q, -1, 0.0, -1});
    for (int b = 0; b < key_bits; ++b)
        family.gates.push_back({GateKind::RY, b % num_qubits, -1, twist_angle(b + 7), b});
    family.validate();
    return family;
}

CircuitFamily make_basis_family(int num_qubits)
{
    CircuitFamily family;
    family.num_qubits = num_qubits;
    family.key_bits = num_qubits;
    for (int b = 0; b < num_qubits; ++b)
        family.gates.push_back({GateKind::X, b, -1, 0.0, b});
    family.validate();
    return family;
}

CircuitFamily make_constant_family(int num_qubits, int key_bits)
{
    CircuitFamily family;
    family.num_qubits = num_qubits;
    family.key_bits = key_bits;
    family.validate();
    return family;
}

std::vector<CircuitFamily> default_test_families()
{
    return {
        make_cond_phase_family(2, 3),
        make_ghz_twist_family(3, 4),
        make_rotor_family(2, 4),
    };
}

std::vector<CircuitFamily> default_qmlh_suite()
{
    return {
        make_cond_phase_family(3, 8),
        make_rotor_family(3, 8),
        make_ghz_twist_family(3, 8),
    };
}

} // namespace qml
