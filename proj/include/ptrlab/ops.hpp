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

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "ptrlab/core.hpp"

// Constructors for the operator zoo: generalized Z (clock) and X (shift),
// the Fourier transform relating them, single-qubit Paulis, the ancilla
// excitation number, controlled power gates, and conjugated observables.
//
// Unitary observables report outcomes as integer exponents k in ω^k
// (ω = exp(2πi/d)); complex eigenvalues are never compared for equality.

namespace ptrlab {

// ω^power with ω = exp(2πi/d).
Cplx root_of_unity(int d, long long power = 1);

// Exponent k of an eigenvalue ω^k; arithmetic is mod d.
struct RootOfUnityExponent {
    int k = 0;
    int d = 2;

    RootOfUnityExponent(int k, int d);
    Cplx value() const { return root_of_unity(d, k); }

    friend RootOfUnityExponent operator+(RootOfUnityExponent a, RootOfUnityExponent b);
    friend RootOfUnityExponent operator-(RootOfUnityExponent a, RootOfUnityExponent b);
    friend bool operator==(RootOfUnityExponent a, RootOfUnityExponent b);
};

// diag(ω⁰, ω¹, …, ω^{d-1}); Hermitian only at d = 2.
OperatorSpec pauli_z(int d);

// Cyclic shift |k⟩ → |k+1 mod d⟩.
OperatorSpec pauli_x(int d);

// F[k',k] = ω^{kk'}/√d; symmetric, F† = conj(F), F⁴ = I.
OperatorSpec fourier(int d);

// Shift eigenvector with X v = ω^k v: v_j = ω^{-kj}/√d.
Vector x_eigenvector(int d, int k);
PureState x_eigenstate(int d, int k, std::string label = "q");

enum class QubitAxis { x, z };
OperatorSpec qubit_pauli(QubitAxis which, std::string qubit_label);

// Σ_k (1 + z_k)/2 over the given qubits; Hermitian, eigenvalues 0…n.
OperatorSpec number_operator(std::vector<std::string> ancilla_labels);

// Block-diagonal unitary: on control digit m, applies base^{exponent_map(m)}
// to the target. Negative exponents use the adjoint. The map must cover every
// control digit.
OperatorSpec controlled_power(std::string control_label, int control_dim,
                              std::string target_label, const OperatorSpec& base,
                              const std::map<int, int>& exponent_map);

// U Z U†: same exponent spectrum as Z, eigenbasis U|k⟩.
OperatorSpec conjugated_observable(const OperatorSpec& u, int d);

// Haar-distributed d×d unitary, deterministic per seed: QR of a seeded
// complex Gaussian matrix with the R diagonal phases folded into Q.
OperatorSpec random_unitary(int d, std::uint64_t seed);

// base^e for integer e; negative e uses the adjoint (base must be unitary).
Matrix matrix_power(const Matrix& base, long long e);

// The exponent k with op|ψ⟩ = ω^k|ψ⟩ within tol, if the state is an
// eigenstate; nullopt otherwise. Accepts non-unitary (e.g. sector-padded)
// operators; the residual is checked against the raw matrix action.
std::optional<int> eigen_exponent(const PureState& state, const OperatorSpec& op, int d,
                                  double tol = kTol);

// Same for a product of operators on disjoint targets (rightmost applied
// first), without forming the Kronecker matrix.
std::optional<int> eigen_exponent(const PureState& state, std::span<const OperatorSpec> ops,
                                  int d, double tol = kTol);

// ⟨ψ| O |ψ⟩ or Tr(ρO) for O = ops[0]·ops[1]·…; avoids the Kronecker matrix.
Cplx expectation_sequence(const PureState& state, std::span<const OperatorSpec> ops);
Cplx expectation_sequence(const DensityMatrix& rho, std::span<const OperatorSpec> ops);
Cplx expectation_sequence(const StateVariant& state, std::span<const OperatorSpec> ops);

}  // namespace ptrlab
