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

#include <string>
#include <vector>

#include "ptrlab/core.hpp"
#include "ptrlab/ops.hpp"

// The four-stage premeasurement pipeline for a d-state spin coupled to d
// ancilla qubits: prepare a uniform spin superposition over vacuum ancillas,
// separate (bookkeeping only — path orthogonality is implicit), entangle via
// spin-controlled qubit flips, and recombine. Recombination quality is
// carried entirely by a coherence Gram matrix γ of pairwise path overlaps:
// all-ones γ keeps the state pure, identity γ decoheres the spin branches
// completely, anything in between is partial coherence.
//
// The d singly-excited ancilla states form the quantum-pointer subspace; the
// embedding below moves operators and states between the d-dimensional
// pointer picture and the 2^d-dimensional qubit picture.

namespace ptrlab {

void check_dimension(int d, int d_max = kMaxDim);

// Hermitian PSD matrix with unit diagonal; entry (j,k) is the overlap of
// paths j and k at recombination.
class CoherenceGram {
  public:
    static CoherenceGram ones(int d);
    static CoherenceGram identity(int d);
    static CoherenceGram from_matrix(Matrix gamma);  // validates

    int dim() const { return static_cast<int>(gamma_.rows()); }
    const Matrix& matrix() const { return gamma_; }
    bool is_all_ones() const;

  private:
    explicit CoherenceGram(Matrix gamma) : gamma_(std::move(gamma)) {}
    Matrix gamma_;
};

std::vector<std::string> ancilla_labels(int d);  // "a0" … "a{d-1}"
Register spin_ancilla_register(int d);           // spin ⊗ d qubits
Register spin_pointer_register(int d);           // spin ⊗ pointer qudit
Register spin_path_register(int d);              // spin ⊗ path qudit
Register ancilla_register(int d);                // d qubits only

// (1/√d) Σ_k |k⟩_s |0…0⟩_a.
PureState prepare_initial(int d);

// Spin-controlled qubit flips Σ_k |k⟩⟨k|_s ⊗ x_k; requires vacuum ancillas
// on the support of the state.
PureState entangle(const PureState& separated);

// Applies γ to the spin-indexed branches: ρ[(j,·),(k,·)] = γ_{jk} ψ ψ†.
// Returns the state unchanged when γ is all ones.
StateVariant decohere_spin_branches(const PureState& psi, const CoherenceGram& gamma);

// Recombination of the entangled state; identical channel as above.
StateVariant recombine(const PureState& entangled, const CoherenceGram& gamma);

enum class StageTag { t1_prepared, t2_separated, t3_entangled, t4_recombined };

struct PipelineStage {
    StageTag tag;
    StateVariant state;
};

std::vector<PipelineStage> run_pipeline(int d, const CoherenceGram& gamma);

// (1/√d) Σ_k |k⟩_s |k⟩_p, built directly on spin ⊗ ancilla qubits.
PureState bell_state(int d);

// The same state on the compressed spin ⊗ pointer register.
PureState bell_state_pointer(int d);

// Equal-magnitude superposition of the singly-excited ancilla states with
// phases ω^{jk} on qubit j.
PureState w_state(int d, int k);

// Maps the d-dimensional pointer picture onto the singly-excited sector of
// the d-qubit ancilla register.
class PointerEmbedding {
  public:
    explicit PointerEmbedding(int d);

    int dim() const { return d_; }

    // Flat ancilla index of the state with qubit k excited.
    std::int64_t excited_index(int k) const;

    // d × 2^d isometry; rows are the singly-excited ancilla basis states.
    Matrix compress_matrix() const;

    // Lifts a d×d pointer operator to the 2^d qubit space, zero-padded
    // outside the singly-excited sector so leakage shows up as norm loss
    // instead of being silently measurable. Unbound; target dims are d twos.
    OperatorSpec lift(const OperatorSpec& base) const;

    // Replaces the register's ancilla-qubit group with a pointer qudit
    // (label "p"). Rejects states with support outside the singly-excited
    // sector.
    PureState compress(const PureState& full) const;
    DensityMatrix compress(const DensityMatrix& full) const;
    StateVariant compress(const StateVariant& full) const;

    // Inverse of compress: pointer qudit back to the d-qubit group.
    PureState expand(const PureState& compressed) const;

  private:
    int d_;
};

PointerEmbedding pointer_embedding(int d);

// Lifted pointer operator bound to the register's ancilla-qubit labels.
OperatorSpec pointer_observable(const PointerEmbedding& embedding, const OperatorSpec& base,
                                const Register& reg);

// Ancilla-free variant: the spin entangles with a d-dimensional path qudit,
// and the pointer observables are built from the path projectors.
struct WhichPathModel {
    int d;
    Register reg;        // spin ⊗ path
    StateVariant state;  // (1/√d) Σ_k |k⟩_s|k⟩_path decohered by γ

    OperatorSpec path_projector(int k) const;  // |k⟩⟨k| on the path qudit
    OperatorSpec path_number() const;          // Σ_k P_k
    OperatorSpec path_z() const;               // Σ_k ω^k P_k
};

WhichPathModel which_path_model(int d, const CoherenceGram& gamma);

// Dimension of the simultaneous exponent-0 eigenspace of Z_s†Z_p and X_sX_p
// on a d×d register (1 means the entangled state is the unique solution).
int joint_fixed_space_dimension(int d);

}  // namespace ptrlab
