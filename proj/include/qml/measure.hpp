#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qml/qcore.hpp"
#include "qml/rng.hpp"

namespace qml {

enum class DesignConstruction { haar_random, random_clifford_circuit };

const char* design_construction_name(DesignConstruction c);
std::optional<DesignConstruction> design_construction_from_name(std::string_view name);

inline int ceil_log2(std::uint64_t n)
{
    int b = 0;
    while ((1ull << b) < n)
        ++b;
    return b;
}

/// Uniform ensemble of K unitaries defining the POVM
/// {(1/K) U_k^dag |y><y| U_k}. Outcomes are pairs (k, y) encoded into
/// ceil_log2(K) + n bits with k in the high bits.
class MeasurementDesign {
public:
    int num_qubits() const { return num_qubits_; }
    int num_unitaries() const { return static_cast<int>(unitaries_.size()); }
    DesignConstruction construction() const { return construction_; }
    std::uint64_t seed() const { return seed_; }
    const Eigen::MatrixXcd& unitary(int k) const { return unitaries_[static_cast<std::size_t>(k)]; }

    std::size_t basis_dim() const { return 1ull << num_qubits_; }
    /// Size of the measurement alphabet, K * 2^n.
    std::size_t num_outcomes() const { return unitaries_.size() << num_qubits_; }
    /// Bit-length of encoded outcomes, ceil(log2 K) + n.
    int outcome_bits() const
    {
        return ceil_log2(unitaries_.size()) + num_qubits_;
    }

private:
    friend MeasurementDesign build_design(int, int, DesignConstruction, std::uint64_t);

    int num_qubits_ = 1;
    DesignConstruction construction_ = DesignConstruction::haar_random;
    std::uint64_t seed_ = 0;
    std::vector<Eigen::MatrixXcd> unitaries_;
};

struct Outcome {
    int k_index = 0;
    std::uint64_t basis_outcome = 0;

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

std::uint64_t encode_outcome(const MeasurementDesign& design, const Outcome& o);
Outcome decode_outcome(const MeasurementDesign& design, std::uint64_t code);
/// True when the code lies in the design alphabet (k < K); codes above it can
/// only be produced by uniform mixing.
bool is_design_outcome(const MeasurementDesign& design, std::uint64_t code);

/// Deterministic in (args, seed); unitarity and POVM completeness are checked
/// to 1e-9 on construction.
MeasurementDesign build_design(int num_qubits, int K, DesignConstruction construction,
                               std::uint64_t seed);

/// Pr[(k,y)] = (1/K) |<y| U_k |psi>|^2 indexed by encoded outcome; length K * 2^n.
std::vector<double> outcome_distribution(const MeasurementDesign& design,
                                         const PureState& psi);

/// Draw k uniform, then y from |<y| U_k |psi>|^2.
Outcome sample_outcome(const MeasurementDesign& design, const PureState& psi, Rng& rng);

struct DistortionCalibration {
    double b_hat = 0.0;       // 0.9 * worst_ratio
    double worst_ratio = 0.0; // min over pairs of l1(M(rho0), M(rho1)) / frobenius
    std::vector<double> ratios;
    std::size_t pairs_used = 0;
    std::size_t pairs_skipped = 0; // near-degenerate pairs (frobenius < 1e-6)
};

/// Empirical lower distortion constant of the design on Haar-random pure
/// pairs. l1 on distributions is sum|p - q| (orthogonal pure pair -> 2).
DistortionCalibration calibrate_distortion(const MeasurementDesign& design,
                                           int trial_pairs, Rng& rng);

/// Haar-random pure state (normalized complex Gaussian vector).
PureState random_pure_state(int num_qubits, Rng& rng);

/// sum_i |p_i - q_i| over equal-length vectors.
double l1_distance(std::span<const double> p, std::span<const double> q);

} // namespace qml
