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

#include <array>
#include <string>
#include <vector>

#include "ptrlab/premeasure.hpp"
#include "ptrlab/rng.hpp"

// Destructive (Born-rule) measurements plus the nondestructive counter
// circuits. The nondestructive circuits couple the register to an auxiliary
// counter qudit with controlled power gates, read out only the counter, and
// leave eigenstate inputs untouched:
//
//   number (N):       each qubit advances the counter by 1 when excited, so
//                     the counter reads the total excitation number (mod the
//                     counter dimension).
//   projection (ZZ):  qubit l advances the counter by l and the spin digit m
//                     retards it by m; the counter reads the exponent of
//                     Z_s†Z_p, i.e. (pointer index - spin index) mod d.
//   superposition (XX): spin and pointer are Fourier-rotated so shift
//                     eigenstates become standard-basis states, the counter
//                     accumulates (pointer index + spin index) mod d — the
//                     exponent of X_sX_p — and the rotations are undone.
//
// All sampling is deterministic per seed; records carry the full analytic
// outcome distribution alongside the sampled outcome.

namespace ptrlab {

struct MeasurementRecord {
    std::string observable;
    int outcome;                       // exponent mod d, or integer count
    std::vector<int> digits;           // per-target readouts for local measurements
    double probability;                // Born weight of the sampled outcome
    std::vector<double> distribution;  // analytic probabilities over all outcomes
    StateVariant post_state;
    std::uint64_t rng_state;           // RNG state consumed by the draw
};

enum class CounterObservable { number, projection, superposition };

std::string observable_name(CounterObservable obs);

// Appends a counter qudit (label "c") initialized to |0⟩.
StateVariant with_counter(const StateVariant& state, int counter_dim);
StateVariant with_counter(const PureState& state, int counter_dim);

// Joint standard-basis readout on the listed targets; collapses the state.
MeasurementRecord measure_destructive(const StateVariant& state,
                                      const std::vector<std::string>& targets, SplitRng& rng,
                                      std::string observable = "basis");

// Reads every ancilla qubit and sums the excitations; destructive.
MeasurementRecord measure_number_local(const StateVariant& state, SplitRng& rng);

// The three counter circuits; the register must contain a counter subsystem
// initialized to |0⟩. The returned post_state has the counter re-initialized
// to |0⟩, ready for the next measurement.
MeasurementRecord nondestructive_number(const StateVariant& state, SplitRng& rng);
MeasurementRecord nondestructive_zz(const StateVariant& state, SplitRng& rng);
MeasurementRecord nondestructive_xx(const StateVariant& state, SplitRng& rng);
MeasurementRecord measure_counter_observable(const StateVariant& state, CounterObservable obs,
                                             SplitRng& rng);

// Runs all three counter circuits in the given order on the same system.
std::vector<MeasurementRecord> sequential_suite(const StateVariant& state,
                                                const std::array<CounterObservable, 3>& order,
                                                SplitRng& rng);

// Probability of each spin X-exponent together with the conditional ancilla
// state it projects onto (Fourier-rotate the spin, read the standard basis).
struct SpinXBranch {
    int exponent;
    double probability;
    PureState pointer_state;  // ancilla-register conditional state
};
std::vector<SpinXBranch> spin_x_branches(const PureState& state);

// Samples one spin X-outcome; the conditional pointer state is verified to
// be the matching root-of-unity W state before returning.
struct SpinXProjection {
    MeasurementRecord spin;
    PureState pointer_state;
};
SpinXProjection measure_spin_x_then_project(const PureState& state, SplitRng& rng);

// A pointer-basis choice U_p paired with the spin rotation V_s = conj(U_p)
// that leaves the entangled state invariant.
struct BasisChoice {
    int d = 2;
    Matrix u_p;
    Matrix v_s;

    OperatorSpec observable_pointer() const;  // U_p Z U_p†
    OperatorSpec observable_spin() const;     // V_s Z V_s†
    OperatorSpec rotation_spin() const;       // V_s†, applied before spin readout
    OperatorSpec rotation_pointer() const;    // U_p†, applied before pointer readout
};

BasisChoice basis_choice(const OperatorSpec& u_p);

// Residuals of the four consistency identities tying the Fourier basis
// choice back to the shift observables.
struct AppendixReport {
    int d = 2;
    double a1 = 0.0;  // ‖F†ZF − X‖
    double a2 = 0.0;  // ‖conj(F†) − F‖
    double a3 = 0.0;  // ‖F Z F† − X†‖
    double a4 = 0.0;  // ‖(F Z F†)† ⊗ (F† Z F) − X ⊗ X‖
    bool pass = false;
};

AppendixReport verify_appendix(int d);

}  // namespace ptrlab
