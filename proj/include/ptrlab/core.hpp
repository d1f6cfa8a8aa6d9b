// Copyright 2026 The ptrlab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Mixed-dimension register bookkeeping and the dense complex linear algebra
// everything else is built on: tensor products, operator application to
// subsystem subsets, expectation values, partial trace.
//
// Indexing convention: subsystem 0 is the most significant mixed-radix digit,
// so a register listed as (spin, a0, a1, ..., counter) flattens exactly like
// the left-to-right ket |k⟩|n0 n1 ...⟩|c⟩.

namespace ptrlab {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kTol = 1e-10;      // tolerance for analytic identities
inline constexpr double kLeakTol = 1e-8;   // sector-leak detection threshold
inline constexpr int kMaxDim = 10;         // largest supported qudit dimension

enum class Role { spin, ancilla_qubit, counter, path, pointer };

struct Subsystem {
    std::string label;
    int dim = 0;
    Role role = Role::spin;
};

// Ordered list of subsystems defining a composite Hilbert space.
// Immutable after construction; cheap to copy.
class Register {
  public:
    Register() = default;
    explicit Register(std::vector<Subsystem> subsystems);

    std::size_t size() const { return subs_.size(); }
    std::int64_t total_dim() const { return total_; }
    const Subsystem& at(std::size_t i) const { return subs_.at(i); }
    const std::vector<Subsystem>& subsystems() const { return subs_; }

    bool has(std::string_view label) const;
    std::size_t position_of(std::string_view label) const;  // throws on unknown label

    // Mixed-radix stride of subsystem i (subsystem 0 most significant).
    std::int64_t stride(std::size_t i) const { return strides_.at(i); }

    std::int64_t flat_index(std::span<const int> digits) const;
    std::vector<int> digits_of(std::int64_t flat) const;

    // All subsystem positions with the given role, in register order.
    std::vector<std::size_t> positions_with_role(Role role) const;

    friend bool operator==(const Register& a, const Register& b);

  private:
    std::vector<Subsystem> subs_;
    std::vector<std::int64_t> strides_;
    std::int64_t total_ = 1;
};

Register make_register(std::vector<Subsystem> subsystems);

// A basis label: one digit per subsystem, k_i in [0, d_i).
struct BasisIndex {
    Register reg;
    std::vector<int> digits;

    std::int64_t flat() const { return reg.flat_index(digits); }
    static BasisIndex from_flat(const Register& reg, std::int64_t flat);
};

// Unit-norm complex amplitude vector over a Register.
class PureState {
  public:
    PureState(Register reg, Vector amplitudes);

    const Register& reg() const { return reg_; }
    const Vector& amplitudes() const { return amp_; }
    Cplx amplitude(std::span<const int> digits) const { return amp_(reg_.flat_index(digits)); }
    double norm() const { return amp_.norm(); }

  private:
    Register reg_;
    Vector amp_;
};

// Hermitian, positive-semidefinite, unit-trace matrix over a Register.
class DensityMatrix {
  public:
    DensityMatrix(Register reg, Matrix matrix);

    const Register& reg() const { return reg_; }
    const Matrix& matrix() const { return mat_; }

  private:
    Register reg_;
    Matrix mat_;
};

using StateVariant = std::variant<PureState, DensityMatrix>;

const Register& reg_of(const StateVariant& state);

// A complex matrix attached to an ordered subset of subsystems.
// Targets may be left unbound at construction (e.g. pauli_z(d)) and bound to
// labels later with on(). Flags are assertions verified numerically at make().
class OperatorSpec {
  public:
    OperatorSpec() = default;

    static OperatorSpec make(std::vector<int> dims, Matrix matrix, bool unitary, bool hermitian);
    static OperatorSpec make_bound(std::vector<std::string> targets, std::vector<int> dims,
                                   Matrix matrix, bool unitary, bool hermitian);

    // Copy of this operator bound to the given subsystem labels.
    OperatorSpec on(std::vector<std::string> targets) const;
    OperatorSpec on(std::string target) const;

    bool bound() const { return !targets_.empty(); }
    const std::vector<std::string>& targets() const { return targets_; }
    const std::vector<int>& dims() const { return dims_; }
    const Matrix& matrix() const { return mat_; }
    std::int64_t side() const { return mat_.rows(); }
    bool unitary() const { return unitary_; }
    bool hermitian() const { return hermitian_; }

  private:
    std::vector<std::string> targets_;
    std::vector<int> dims_;
    Matrix mat_;
    bool unitary_ = false;
    bool hermitian_ = false;
};

OperatorSpec adjoint(const OperatorSpec& op);

// Kronecker product of two operators on disjoint targets; a's targets come
// first (most significant), matching the register flattening convention.
OperatorSpec product(const OperatorSpec& a, const OperatorSpec& b);

Matrix kron(const Matrix& a, const Matrix& b);

// ---- register-core operations --------------------------------------------

PureState basis_state(const Register& reg, std::span<const int> digits);
PureState tensor(const PureState& a, const PureState& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix to_density(const PureState& psi);

// Low-level (matrix ⊗ identity) application over the listed subsystem
// positions. No unitarity or norm guarantee; callers own the contract.
Vector apply_matrix(const Register& reg, const Vector& in, const Matrix& m,
                    std::span<const std::size_t> positions);

// M ρ M† over the listed subsystem positions.
Matrix apply_matrix_density(const Register& reg, const Matrix& rho, const Matrix& m,
                            std::span<const std::size_t> positions);

// Positions of the operator's targets in the register; validates per-target
// dimensions. Throws on unknown target or dimension mismatch.
std::vector<std::size_t> resolve_targets(const Register& reg, const OperatorSpec& op);

PureState apply_operator(const PureState& state, const OperatorSpec& op);  // unitary ops only
DensityMatrix apply_operator(const DensityMatrix& rho, const OperatorSpec& op);
StateVariant apply_operator(const StateVariant& state, const OperatorSpec& op);

// ⟨ψ|O|ψ⟩ or Tr(ρO); Hermitian-flagged operators assert a real result.
Cplx expectation(const PureState& state, const OperatorSpec& op);
Cplx expectation(const DensityMatrix& rho, const OperatorSpec& op);
Cplx expectation(const StateVariant& state, const OperatorSpec& op);

// Reduced density matrix on the kept subsystems (original register order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep);

double fidelity(const PureState& a, const PureState& b);       // |⟨a|b⟩|²
double fidelity(const PureState& a, const DensityMatrix& rho); // ⟨a|ρ|a⟩
double fidelity(const PureState& a, const StateVariant& b);

}  // namespace ptrlab
