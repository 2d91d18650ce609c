#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qml/errors.hpp"

namespace qml {

using cd = std::complex<double>;

inline constexpr double kNormTol = 1e-10;   // state / density-matrix normalization
inline constexpr double kMetricTol = 1e-9;  // metric identities

/// A key x in X = {0,1}^length. Bits are stored MSB-first in `value`, so
/// ascending integer order equals lexicographic order of the bitstring and
/// a length-i prefix covers the contiguous value range [v<<(L-i), (v+1)<<(L-i)).
struct Key {
    std::uint64_t value = 0;
    int length = 0;

    /// i-th bit of the bitstring, i = 0 is the leftmost character.
    int bit(int i) const { return static_cast<int>((value >> (length - 1 - i)) & 1ull); }

    Key child(int b) const { return Key{(value << 1) | static_cast<std::uint64_t>(b), length + 1}; }

    std::string to_string() const;
    static Key from_string(std::string_view bits);

    friend bool operator==(const Key&, const Key&) = default;
};

enum class GateKind { H, X, Y, Z, S, T, CNOT, CZ, RZ, RY };

const char* gate_kind_name(GateKind kind);
std::optional<GateKind> gate_kind_from_name(std::string_view name);
bool gate_kind_has_control(GateKind kind);
bool gate_kind_has_angle(GateKind kind);

/// One gate of a key-conditioned program. `control` is used by CNOT/CZ,
/// `angle` by RZ/RY. cond_key_bit >= 0 means: apply iff that key bit is 1.
struct GateOp {
    GateKind kind = GateKind::H;
    int target = 0;
    int control = -1;
    double angle = 0.0;
    int cond_key_bit = -1;
};

/// Keyed state generator: key-conditioned gate program applied to |0...0>.
struct CircuitFamily {
    int num_qubits = 1;
    int key_bits = 0;
    std::vector<GateOp> gates;

    std::uint64_t num_keys() const { return 1ull << key_bits; }

    /// Throws InvalidParameter on out-of-range qubit / key-bit references.
    void validate() const;
};

class PureState {
public:
    /// |0...0> on num_qubits qubits.
    explicit PureState(int num_qubits);

    /// Validates unit norm (kNormTol) and length 2^num_qubits.
    static PureState from_amplitudes(std::vector<cd> amplitudes, int num_qubits);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amplitudes_.size(); }
    const std::vector<cd>& amplitudes() const { return amplitudes_; }

    double norm_sq() const;

    void apply(const GateOp& gate);

private:
    std::vector<cd> amplitudes_;
    int num_qubits_;
};

class DensityMatrix {
public:
    /// Validates Hermiticity, unit trace and eigenvalue floor.
    static DensityMatrix from_matrix(Eigen::MatrixXcd entries, int num_qubits);

    /// |psi><psi|; positivity holds by construction, only shape is checked.
    static DensityMatrix from_pure(const PureState& psi);

    int num_qubits() const { return num_qubits_; }
    const Eigen::MatrixXcd& entries() const { return entries_; }

private:
    DensityMatrix(Eigen::MatrixXcd entries, int num_qubits)
        : entries_(std::move(entries)), num_qubits_(num_qubits)
    {
    }

    Eigen::MatrixXcd entries_;
    int num_qubits_;
};

/// Runs the key-conditioned program on |0...0>. Deterministic in (family, key).
PureState generate_state(const CircuitFamily& family, const Key& key);

/// |<a|b>|^2.
double fidelity(const PureState& a, const PureState& b);

/// sqrt(1 - |<a|b>|^2); equals the trace distance for pure states.
double trace_distance_pure(const PureState& a, const PureState& b);

/// Frobenius norm of (a - b).
double frobenius_distance(const DensityMatrix& a, const DensityMatrix& b);

/// (1/2) * sum |eigenvalues(a - b)|.
double trace_distance_mixed(const DensityMatrix& a, const DensityMatrix& b);

} // namespace qml
