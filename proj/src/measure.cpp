#include "qml/measure.hpp"

#include <cmath>

namespace qml {

namespace {

Eigen::MatrixXcd haar_unitary(std::size_t dim, Rng& rng)
{
    Eigen::MatrixXcd a(dim, dim);
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            a(r, c) = cd{rng.normal(), rng.normal()};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the diagonal phases of R; plain QR of a Ginibre matrix is not
    // Haar-distributed without this.
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        const cd d = r(i, i);
        const double m = std::abs(d);
        q.col(i) *= (m > 0.0) ? d / m : cd{1.0, 0.0};
    }
    return q;
}

Eigen::MatrixXcd random_clifford_circuit_unitary(int num_qubits, Rng& rng)
{
    const std::size_t dim = 1ull << num_qubits;
    // Random H/S/CNOT/CZ word; length grows with qubit count so the ensemble
    // mixes over the Clifford group.
    const int length = 8 + 4 * num_qubits * num_qubits;
    std::vector<GateOp> program;
    program.reserve(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) {
        GateOp g;
        const std::uint64_t pick = num_qubits >= 2 ? rng.below(4) : rng.below(2);
        switch (pick) {
        case 0: g.kind = GateKind::H; break;
        case 1: g.kind = GateKind::S; break;
        case 2: g.kind = GateKind::CNOT; break;
        default: g.kind = GateKind::CZ; break;
        }
        g.target = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_qubits)));
        if (gate_kind_has_control(g.kind)) {
            do {
                g.control = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_qubits)));
            } while (g.control == g.target);
        }
        program.push_back(g);
    }
    Eigen::MatrixXcd u(dim, dim);
    for (std::size_t col = 0; col < dim; ++col) {
        std::vector<cd> amp(dim, cd{0.0, 0.0});
        amp[col] = cd{1.0, 0.0};
        PureState psi = PureState::from_amplitudes(std::move(amp), num_qubits);
        for (const GateOp& g : program)
            psi.apply(g);
        for (std::size_t row = 0; row < dim; ++row)
            u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                psi.amplitudes()[row];
    }
    return u;
}

} // namespace

const char* design_construction_name(DesignConstruction c)
{
    return c == DesignConstruction::haar_random ? "haar_random" : "random_clifford_circuit";
}

std::optional<DesignConstruction> design_construction_from_name(std::string_view name)
{
    if (name == "haar_random")
        return DesignConstruction::haar_random;
    if (name == "random_clifford_circuit")
        return DesignConstruction::random_clifford_circuit;
    return std::nullopt;
}

std::uint64_t encode_outcome(const MeasurementDesign& design, const Outcome& o)
{
    if (o.k_index < 0 || o.k_index >= design.num_unitaries())
        throw InvalidParameter("encode_outcome: k_index out of range");
    if (o.basis_outcome >= design.basis_dim())
        throw InvalidParameter("encode_outcome: basis outcome out of range");
    return (static_cast<std::uint64_t>(o.k_index) << design.num_qubits()) | o.basis_outcome;
}

Outcome decode_outcome(const MeasurementDesign& design, std::uint64_t code)
{
    if (!is_design_outcome(design, code))
        throw InvalidParameter("decode_outcome: code outside the design alphabet");
    Outcome o;
    o.k_index = static_cast<int>(code >> design.num_qubits());
    o.basis_outcome = code & (design.basis_dim() - 1);
    return o;
}

bool is_design_outcome(const MeasurementDesign& design, std::uint64_t code)
{
    return code < design.num_outcomes();
}

MeasurementDesign build_design(int num_qubits, int K, DesignConstruction construction,
                               std::uint64_t seed)
{
    if (num_qubits < 1 || K < 1)
        throw InvalidParameter("build_design: num_qubits and K must be positive");
    if (num_qubits > 10 || (static_cast<std::uint64_t>(K) << num_qubits) > (1ull << 22))
        throw TooLarge("build_design: alphabet exceeds desk-scale limits");

    MeasurementDesign design;
    design.num_qubits_ = num_qubits;
    design.construction_ = construction;
    design.seed_ = seed;
    design.unitaries_.reserve(static_cast<std::size_t>(K));

    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(construction)));
    const std::size_t dim = 1ull << num_qubits;
    for (int k = 0; k < K; ++k) {
        Eigen::MatrixXcd u = construction == DesignConstruction::haar_random
                                 ? haar_unitary(dim, rng)
                                 : random_clifford_circuit_unitary(num_qubits, rng);
        const double defect =
            (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
                .cwiseAbs()
                .maxCoeff();
        if (defect > 1e-9)
            throw InvalidState("build_design: unitary defect above 1e-9");
        design.unitaries_.push_back(std::move(u));
    }

    // POVM completeness: sum_k,y (1/K) U_k^dag |y><y| U_k = (1/K) sum_k U_k^dag U_k.
    Eigen::MatrixXcd completeness = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& u : design.unitaries_)
        completeness += u.adjoint() * u;
    completeness /= static_cast<double>(K);
    const double gap =
        (completeness - Eigen::MatrixXcd::Identity(completeness.rows(), completeness.cols()))
            .cwiseAbs()
            .maxCoeff();
    if (gap > 1e-9)
        throw InvalidState("build_design: POVM completeness defect above 1e-9");
    return design;
}

std::vector<double> outcome_distribution(const MeasurementDesign& design,
                                         const PureState& psi)
{
    if (design.num_qubits() != psi.num_qubits())
        throw DimensionError("outcome_distribution: qubit counts differ");
    const std::size_t dim = design.basis_dim();
    const double inv_k = 1.0 / design.num_unitaries();
    std::vector<double> p(design.num_outcomes(), 0.0);
    Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(),
                                         static_cast<Eigen::Index>(dim));
    double total = 0.0;
    for (int k = 0; k < design.num_unitaries(); ++k) {
        Eigen::VectorXcd rotated = design.unitary(k) * v;
        const std::size_t base = static_cast<std::size_t>(k) << design.num_qubits();
        for (std::size_t y = 0; y < dim; ++y) {
            const double q = inv_k * std::norm(rotated(static_cast<Eigen::Index>(y)));
            p[base + y] = q;
            total += q;
        }
    }
    if (std::abs(total - 1.0) > kMetricTol)
        throw InvalidState("outcome_distribution: probabilities do not sum to 1");
    return p;
}

Outcome sample_outcome(const MeasurementDesign& design, const PureState& psi, Rng& rng)
{
    if (design.num_qubits() != psi.num_qubits())
        throw DimensionError("sample_outcome: qubit counts differ");
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(design.num_unitaries())));
    Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(),
                                         static_cast<Eigen::Index>(psi.dim()));
    Eigen::VectorXcd rotated = design.unitary(k) * v;
    const double u = rng.uniform();
    double acc = 0.0;
    std::uint64_t y = 0;
    for (Eigen::Index i = 0; i < rotated.size(); ++i) {
        acc += std::norm(rotated(i));
        if (u < acc) {
            y = static_cast<std::uint64_t>(i);
            break;
        }
        y = static_cast<std::uint64_t>(i); // total can round below u; keep last cell
    }
    return Outcome{k, y};
}

DistortionCalibration calibrate_distortion(const MeasurementDesign& design,
                                           int trial_pairs, Rng& rng)
{
    if (trial_pairs < 1)
        throw InvalidParameter("calibrate_distortion: trial_pairs must be >= 1");
    DistortionCalibration result;
    result.ratios.reserve(static_cast<std::size_t>(trial_pairs));
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < trial_pairs; ++i) {
        const PureState a = random_pure_state(design.num_qubits(), rng);
        const PureState b = random_pure_state(design.num_qubits(), rng);
        const double fro =
            frobenius_distance(DensityMatrix::from_pure(a), DensityMatrix::from_pure(b));
        if (fro < 1e-6) { // 0/0 guard for near-identical pairs
            ++result.pairs_skipped;
            continue;
        }
        const std::vector<double> pa = outcome_distribution(design, a);
        const std::vector<double> pb = outcome_distribution(design, b);
        const double ratio = l1_distance(pa, pb) / fro;
        result.ratios.push_back(ratio);
        worst = std::min(worst, ratio);
    }
    result.pairs_used = result.ratios.size();
    if (result.pairs_used == 0)
        throw InvalidParameter("calibrate_distortion: every pair was degenerate");
    result.worst_ratio = worst;
    result.b_hat = 0.9 * worst;
    return result;
}

PureState random_pure_state(int num_qubits, Rng& rng)
{
    std::vector<cd> amp(1ull << num_qubits);
    double norm_sq = 0.0;
    for (cd& a : amp) {
        a = cd{rng.normal(), rng.normal()};
        norm_sq += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (cd& a : amp)
        a *= inv;
    return PureState::from_amplitudes(std::move(amp), num_qubits);
}

double l1_distance(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size())
        throw DimensionError("l1_distance: lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        s += std::abs(p[i] - q[i]);
    return s;
}

} // namespace qml
