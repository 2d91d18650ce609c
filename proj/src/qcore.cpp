#include "qml/qcore.hpp"

#include <cmath>
#include <numbers>

namespace qml {

namespace {

constexpr cd kI{0.0, 1.0};

void apply_one_qubit(std::vector<cd>& amp, int target, const cd m[2][2])
{
    const std::size_t step = 1ull << target;
    for (std::size_t base = 0; base < amp.size(); base += 2 * step) {
        for (std::size_t i = base; i < base + step; ++i) {
            const cd a0 = amp[i];
            const cd a1 = amp[i + step];
            amp[i] = m[0][0] * a0 + m[0][1] * a1;
            amp[i + step] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

void apply_cnot(std::vector<cd>& amp, int control, int target)
{
    const std::size_t cbit = 1ull << control;
    const std::size_t tbit = 1ull << target;
    for (std::size_t i = 0; i < amp.size(); ++i) {
        if ((i & cbit) && !(i & tbit))
            std::swap(amp[i], amp[i | tbit]);
    }
}

void apply_cz(std::vector<cd>& amp, int control, int target)
{
    const std::size_t cbit = 1ull << control;
    const std::size_t tbit = 1ull << target;
    for (std::size_t i = 0; i < amp.size(); ++i) {
        if ((i & cbit) && (i & tbit))
            amp[i] = -amp[i];
    }
}

} // namespace

std::string Key::to_string() const
{
    std::string s(static_cast<std::size_t>(length), '0');
    for (int i = 0; i < length; ++i)
        s[static_cast<std::size_t>(i)] = bit(i) ? '1' : '0';
    return s;
}

Key Key::from_string(std::string_view bits)
{
    if (bits.size() > 63)
        throw InvalidKey("key longer than 63 bits");
    Key k{0, static_cast<int>(bits.size())};
    for (char c : bits) {
        if (c != '0' && c != '1')
            throw InvalidKey("key must be a 0/1 string");
        k.value = (k.value << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return k;
}

const char* gate_kind_name(GateKind kind)
{
    switch (kind) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::S: return "S";
    case GateKind::T: return "T";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::RZ: return "RZ";
    case GateKind::RY: return "RY";
    }
    return "?";
}

std::optional<GateKind> gate_kind_from_name(std::string_view name)
{
    static const std::pair<std::string_view, GateKind> table[] = {
        {"H", GateKind::H},       {"X", GateKind::X},   {"Y", GateKind::Y},
        {"Z", GateKind::Z},       {"S", GateKind::S},   {"T", GateKind::T},
        {"CNOT", GateKind::CNOT}, {"CZ", GateKind::CZ}, {"RZ", GateKind::RZ},
        {"RY", GateKind::RY},
    };
    for (const auto& [n, k] : table)
        if (n == name)
            return k;
    return std::nullopt;
}

bool gate_kind_has_control(GateKind kind)
{
    return kind == GateKind::CNOT || kind == GateKind::CZ;
}

bool gate_kind_has_angle(GateKind kind)
{
    return kind == GateKind::RZ || kind == GateKind::RY;
}

void CircuitFamily::validate() const
{
    if (num_qubits < 1 || num_qubits > 16)
        throw InvalidParameter("CircuitFamily: num_qubits must be in [1, 16]");
    if (key_bits < 0 || key_bits > 63)
        throw InvalidParameter("CircuitFamily: key_bits must be in [0, 63]");
    for (const GateOp& g : gates) {
        if (g.target < 0 || g.target >= num_qubits)
            throw InvalidParameter("CircuitFamily: gate target out of range");
        if (gate_kind_has_control(g.kind)) {
            if (g.control < 0 || g.control >= num_qubits)
                throw InvalidParameter("CircuitFamily: gate control out of range");
            if (g.control == g.target)
                throw InvalidParameter("CircuitFamily: control equals target");
        } else if (g.control >= 0) {
            throw InvalidParameter("CircuitFamily: control set on a 1-qubit gate");
        }
        if (g.cond_key_bit >= key_bits)
            throw InvalidParameter("CircuitFamily: cond_key_bit out of range");
    }
}

PureState::PureState(int num_qubits) : num_qubits_(num_qubits)
{
    if (num_qubits < 1 || num_qubits > 16)
        throw InvalidParameter("PureState: num_qubits must be in [1, 16]");
    amplitudes_.assign(1ull << num_qubits, cd{0.0, 0.0});
    amplitudes_[0] = cd{1.0, 0.0};
}

PureState PureState::from_amplitudes(std::vector<cd> amplitudes, int num_qubits)
{
    PureState psi(num_qubits);
    if (amplitudes.size() != psi.dim())
        throw DimensionError("PureState: amplitude count is not 2^num_qubits");
    psi.amplitudes_ = std::move(amplitudes);
    if (std::abs(psi.norm_sq() - 1.0) > kNormTol)
        throw InvalidState("PureState: amplitudes are not unit-norm");
    return psi;
}

double PureState::norm_sq() const
{
    double s = 0.0;
    for (const cd& a : amplitudes_)
        s += std::norm(a);
    return s;
}

void PureState::apply(const GateOp& gate)
{
    using std::numbers::sqrt2;
    const double r = 1.0 / sqrt2;
    switch (gate.kind) {
    case GateKind::H: {
        const cd m[2][2] = {{r, r}, {r, -r}};
        apply_one_qubit(amplitudes_, gate.target, m);
        break;
    }
    case GateKind::X: {
        const cd m[2][2] = {{0, 1}, {1, 0}};
        apply_one_qubit(amplitudes_, gate.target, m);
        break;
    }
    case GateKind::Y: {
        const cd m[2][2] = {{0, -kI}, {kI, 0}};
        apply_one_qubit(amplitudes_, gate.target, m);
        break;
    }
    case GateKind::Z: {
        const cd m[2][2] = {{1, 0}, {0, -1}};
        apply_one_qubit(amplitudes_, gate.target, m);
        break;
    }
    case GateKind::S: {
        const cd m[2][2] = {{1, 0}, {0, kI}};
        apply_one_qubit(amplitudes_, gate.target, m);
        break;
    }
    case GateKind::T: {
        const cd m[2][2] = {{1, 0}, {0, std::polar(1.0, std::numbers::pi / 4)}};
        apply_one_qubit(amplitudes_, gate.target, m);
        break;
    }
    case GateKind::RZ: {
        const cd m[2][2] = {{std::polar(1.0, -gate.angle / 2), 0},
                            {0, std::polar(1.0, gate.angle / 2)}};
        apply_one_qubit(amplitudes_, gate.target, m);
        break;
    }
    case GateKind::RY: {
        const double c = std::cos(gate.angle / 2);
        const double s = std::sin(gate.angle / 2);
        const cd m[2][2] = {{c, -s}, {s, c}};
        apply_one_qubit(amplitudes_, gate.target, m);
        break;
    }
    case GateKind::CNOT:
        apply_cnot(amplitudes_, gate.control, gate.target);
        break;
    case GateKind::CZ:
        apply_cz(amplitudes_, gate.control, gate.target);
        break;
    }
}

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd entries, int num_qubits)
{
    const auto dim = static_cast<Eigen::Index>(1ull << num_qubits);
    if (entries.rows() != dim || entries.cols() != dim)
        throw DimensionError("DensityMatrix: shape is not 2^n x 2^n");
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > kNormTol)
        throw InvalidState("DensityMatrix: not Hermitian");
    if (std::abs(entries.trace().real() - 1.0) > kNormTol ||
        std::abs(entries.trace().imag()) > kNormTol)
        throw InvalidState("DensityMatrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries,
                                                           Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-9)
        throw InvalidState("DensityMatrix: negative eigenvalue");
    return DensityMatrix(std::move(entries), num_qubits);
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi)
{
    const auto dim = static_cast<Eigen::Index>(psi.dim());
    Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(), dim);
    Eigen::MatrixXcd rho = v * v.adjoint();
    return DensityMatrix(std::move(rho), psi.num_qubits());
}

PureState generate_state(const CircuitFamily& family, const Key& key)
{
    family.validate();
    if (key.length != family.key_bits)
        throw InvalidKey("generate_state: key length does not match family");
    PureState psi(family.num_qubits);
    for (const GateOp& g : family.gates) {
        if (g.cond_key_bit >= 0 && key.bit(g.cond_key_bit) == 0)
            continue;
        psi.apply(g);
    }
    if (std::abs(psi.norm_sq() - 1.0) > kNormTol)
        throw InvalidState("generate_state: norm drifted past tolerance");
    return psi;
}

double fidelity(const PureState& a, const PureState& b)
{
    if (a.num_qubits() != b.num_qubits())
        throw DimensionError("fidelity: qubit counts differ");
    cd inner{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i)
        inner += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
    return std::min(1.0, std::norm(inner));
}

double trace_distance_pure(const PureState& a, const PureState& b)
{
    return std::sqrt(std::max(0.0, 1.0 - fidelity(a, b)));
}

double frobenius_distance(const DensityMatrix& a, const DensityMatrix& b)
{
    if (a.num_qubits() != b.num_qubits())
        throw DimensionError("frobenius_distance: dimensions differ");
    return (a.entries() - b.entries()).norm();
}

double trace_distance_mixed(const DensityMatrix& a, const DensityMatrix& b)
{
    if (a.num_qubits() != b.num_qubits())
        throw DimensionError("trace_distance_mixed: dimensions differ");
    Eigen::MatrixXcd diff = a.entries() - b.entries();
    if ((diff - diff.adjoint()).cwiseAbs().maxCoeff() > kNormTol)
        throw InvalidState("trace_distance_mixed: difference is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

} // namespace qml
