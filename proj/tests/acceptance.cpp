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

// Acceptance suite: one criterion per check block, one PASS/FAIL line each.
// Every tolerance is pinned here; a failing criterion fails the binary.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"

using namespace ptrlab;

namespace {

struct Checker {
    std::vector<std::string> failures;
    double worst = 0.0;  // largest residual seen, for the summary line

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }

    void within(double observed, double expected, double tol, const std::string& what) {
        const double residual = std::abs(observed - expected);
        worst = std::max(worst, residual);
        if (residual > tol) {
            std::ostringstream msg;
            msg << what << ": observed " << observed << ", expected " << expected << " (tol "
                << tol << ")";
            failures.push_back(msg.str());
        }
    }
};

using CriterionFn = std::function<void(Checker&)>;

// ---- criterion bodies ------------------------------------------------------

// 1. For d = 2..6 the entangled state satisfies <N> = 1 and is the joint
//    exponent-0 eigenstate of the projection and superposition observables,
//    each within 1e-10, in under a second per d.
void criterion_table2(Checker& c) {
    for (int d = 2; d <= 6; ++d) {
        const auto start = std::chrono::steady_clock::now();
        const PureState bell = bell_state(d);
        const PointerEmbedding embedding(d);

        c.within(expectation(bell, number_operator(ancilla_labels(d))).real(), 1.0, 1e-10,
                 "d=" + std::to_string(d) + " expectation of N");

        const std::vector<OperatorSpec> zz = {
            adjoint(pauli_z(d)).on("s"), pointer_observable(embedding, pauli_z(d), bell.reg())};
        c.require(eigen_exponent(bell, std::span(zz), d, 1e-10).value_or(-1) == 0,
                  "d=" + std::to_string(d) + " projection exponent != 0");

        const std::vector<OperatorSpec> xx = {
            pauli_x(d).on("s"), pointer_observable(embedding, pauli_x(d), bell.reg())};
        c.require(eigen_exponent(bell, std::span(xx), d, 1e-10).value_or(-1) == 0,
                  "d=" + std::to_string(d) + " superposition exponent != 0");

        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        c.require(elapsed < 1.0, "d=" + std::to_string(d) + " suite exceeded 1 s");
    }
}

// 2. The simultaneous exponent-0 eigenspace of the two product observables
//    has dimension exactly 1 for d = 2..6.
void criterion_uniqueness(Checker& c) {
    for (int d = 2; d <= 6; ++d) {
        const int dim = joint_fixed_space_dimension(d);
        c.require(dim == 1, "d=" + std::to_string(d) + " joint eigenspace dimension " +
                                std::to_string(dim));
    }
}

// 3. The entangling pipeline reproduces the direct construction within 1e-12.
void criterion_pipeline_equivalence(Checker& c) {
    for (int d = 2; d <= 6; ++d) {
        const PureState piped = entangle(prepare_initial(d));
        const PureState direct = bell_state(d);
        c.within((piped.amplitudes() - direct.amplitudes()).cwiseAbs().maxCoeff(), 0.0, 1e-12,
                 "d=" + std::to_string(d) + " pipeline vs direct");
    }
}

// 4. Pipeline output carries weight < 1e-20 outside the singly-excited sector.
void criterion_sector_exclusion(Checker& c) {
    for (int d = 2; d <= 6; ++d) {
        const PureState t3 = entangle(prepare_initial(d));
        const auto qubits = t3.reg().positions_with_role(Role::ancilla_qubit);
        double leak = 0.0;
        for (std::int64_t i = 0; i < t3.reg().total_dim(); ++i) {
            int n = 0;
            for (std::size_t p : qubits) n += static_cast<int>((i / t3.reg().stride(p)) % 2);
            if (n != 1) leak += std::norm(t3.amplitudes()(i));
        }
        c.within(leak, 0.0, 1e-20, "d=" + std::to_string(d) + " excluded-sector weight");
    }
}

// 5. The three counter circuits read (1, 0, 0) with certainty on the d = 3
//    entangled state, preserve it to fidelity > 1 - 1e-10, and agree across
//    all six measurement orders.
void criterion_nondestructive(Checker& c) {
    const StateVariant prepared = with_counter(bell_state(3), 3);
    const PureState& reference = std::get<PureState>(prepared);

    SplitRng rng(2026);
    const MeasurementRecord rn = nondestructive_number(prepared, rng);
    c.require(rn.outcome == 1, "number circuit outcome != 1");
    c.within(rn.probability, 1.0, 1e-10, "number circuit certainty");
    c.within(fidelity(reference, rn.post_state), 1.0, 1e-10, "number circuit fidelity");

    const MeasurementRecord rz = nondestructive_zz(prepared, rng);
    c.require(rz.outcome == 0, "projection circuit exponent != 0");
    c.within(rz.probability, 1.0, 1e-10, "projection circuit certainty");
    c.within(fidelity(reference, rz.post_state), 1.0, 1e-10, "projection circuit fidelity");

    const MeasurementRecord rx = nondestructive_xx(prepared, rng);
    c.require(rx.outcome == 0, "superposition circuit exponent != 0");
    c.within(rx.probability, 1.0, 1e-10, "superposition circuit certainty");
    c.within(fidelity(reference, rx.post_state), 1.0, 1e-10, "superposition circuit fidelity");

    std::array<CounterObservable, 3> order = {CounterObservable::number,
                                              CounterObservable::projection,
                                              CounterObservable::superposition};
    std::sort(order.begin(), order.end());
    int order_id = 0;
    do {
        SplitRng seq_rng(3000 + order_id++);
        const auto records = sequential_suite(prepared, order, seq_rng);
        for (const auto& rec : records) {
            const int want = rec.observable == "N" ? 1 : 0;
            c.require(rec.outcome == want, "order " + std::to_string(order_id) + ": " +
                                               rec.observable + " outcome " +
                                               std::to_string(rec.outcome));
            c.within(rec.probability, 1.0, 1e-10,
                     "order " + std::to_string(order_id) + ": " + rec.observable + " certainty");
        }
        c.within(fidelity(reference, records.back().post_state), 1.0, 1e-10,
                 "order " + std::to_string(order_id) + ": final state fidelity");
    } while (std::next_permutation(order.begin(), order.end()));
}

// 6. Spin shift-basis measurement projects the pointer onto the matching
//    root-of-unity W state for every outcome (1e-10, up to global phase);
//    sampled outcomes are uniform over 1e4 shots within 3 sigma.
void criterion_w_state(Checker& c) {
    const PureState bell = bell_state(3);
    const auto branches = spin_x_branches(bell);
    for (const auto& branch : branches) {
        const PureState expected = w_state(3, branch.exponent);
        const double overlap =
            std::abs(expected.amplitudes().dot(branch.pointer_state.amplitudes()));
        c.within(overlap, 1.0, 1e-10,
                 "conditional pointer state for outcome " + std::to_string(branch.exponent));
    }

    constexpr int kShots = 10000;
    SplitRng rng(606);
    std::array<std::int64_t, 3> counts{0, 0, 0};
    for (int i = 0; i < kShots; ++i) ++counts[measure_spin_x_then_project(bell, rng).spin.outcome];
    const double sigma = std::sqrt(kShots * (1.0 / 3) * (2.0 / 3));
    for (int k = 0; k < 3; ++k)
        c.require(std::abs(counts[k] - kShots / 3.0) <= 3.0 * sigma,
                  "spin outcome " + std::to_string(k) + " count " + std::to_string(counts[k]) +
                      " outside 3 sigma");
}

// 7. Full decoherence keeps N and the projection exponent definite while the
//    superposition exponent samples uniformly; partial coherence
//    gamma01 = 0.5 at d = 2 biases the exponent-0 frequency to 0.75 (3 sigma).
void criterion_decoherence(Checker& c) {
    {
        const auto stages = run_pipeline(3, CoherenceGram::identity(3));
        const StateVariant& rho = stages[3].state;

        c.within(expectation(rho, number_operator(ancilla_labels(3))).real(), 1.0, 1e-10,
                 "Tr(rho N)");

        const StateVariant prepared = with_counter(rho, 3);
        SplitRng rng(707);
        const MeasurementRecord rz = nondestructive_zz(prepared, rng);
        c.within(rz.distribution[0], 1.0, 1e-10, "projection exponent-0 weight");

        const MeasurementRecord rx = nondestructive_xx(prepared, rng);
        constexpr int kShots = 10000;
        SplitRng shots_rng(808);
        std::array<std::int64_t, 3> counts{0, 0, 0};
        for (int i = 0; i < kShots; ++i) ++counts[shots_rng.sample(rx.distribution)];
        const double sigma = std::sqrt(kShots * (1.0 / 3) * (2.0 / 3));
        for (int m = 0; m < 3; ++m)
            c.require(std::abs(counts[m] - kShots / 3.0) <= 3.0 * sigma,
                      "decohered XX exponent " + std::to_string(m) + " count " +
                          std::to_string(counts[m]) + " outside 3 sigma");
    }
    {
        Matrix g(2, 2);
        g << 1.0, 0.5, 0.5, 1.0;
        const auto stages = run_pipeline(2, CoherenceGram::from_matrix(g));
        const StateVariant prepared = with_counter(stages[3].state, 2);
        SplitRng rng(909);
        const MeasurementRecord rx = nondestructive_xx(prepared, rng);

        constexpr int kShots = 10000;
        constexpr double kExpected = 0.75;  // (1 + gamma01) / 2
        SplitRng shots_rng(1010);
        std::int64_t zero_count = 0;
        for (int i = 0; i < kShots; ++i)
            if (shots_rng.sample(rx.distribution) == 0) ++zero_count;
        const double sigma = std::sqrt(kShots * kExpected * (1.0 - kExpected));
        c.require(std::abs(zero_count - kShots * kExpected) <= 3.0 * sigma,
                  "partial-coherence exponent-0 count " + std::to_string(zero_count) +
                      " outside 3 sigma of " + std::to_string(kShots * kExpected));
    }
}

// 8. For 20 seeded Haar basis choices per d in {2,3,4}: the paired rotations
//    leave the entangled state invariant (1e-10) and it remains the
//    exponent-0 eigenstate of the transformed product observable.
void criterion_basis_invariance(Checker& c) {
    for (int d : {2, 3, 4}) {
        const PureState bell_c = bell_state_pointer(d);
        const PureState bell_full = bell_state(d);
        const PointerEmbedding embedding(d);
        for (int i = 0; i < 20; ++i) {
            const std::uint64_t seed = SplitRng(static_cast<std::uint64_t>(d)).split(i).state();
            const BasisChoice bc = basis_choice(random_unitary(d, seed));

            PureState rotated =
                apply_operator(bell_c, OperatorSpec::make({d}, bc.v_s, true, false).on("s"));
            rotated =
                apply_operator(rotated, OperatorSpec::make({d}, bc.u_p, true, false).on("p"));
            c.within((rotated.amplitudes() - bell_c.amplitudes()).cwiseAbs().maxCoeff(), 0.0,
                     1e-10,
                     "d=" + std::to_string(d) + " seed " + std::to_string(i) +
                         " invariance (compressed)");

            // The same invariance holds through the qubit embedding.
            PureState full_rotated =
                apply_operator(bell_full, OperatorSpec::make({d}, bc.v_s, true, false).on("s"));
            const OperatorSpec lifted = pointer_observable(
                embedding, OperatorSpec::make({d}, bc.u_p, true, false), bell_full.reg());
            const Vector image =
                apply_matrix(bell_full.reg(), full_rotated.amplitudes(), lifted.matrix(),
                             resolve_targets(bell_full.reg(), lifted));
            c.within((image - bell_full.amplitudes()).cwiseAbs().maxCoeff(), 0.0, 1e-10,
                     "d=" + std::to_string(d) + " seed " + std::to_string(i) +
                         " invariance (lifted)");

            const std::vector<OperatorSpec> oo = {adjoint(bc.observable_spin()).on("s"),
                                                  bc.observable_pointer().on("p")};
            c.require(eigen_exponent(bell_c, std::span(oo), d, 1e-10).value_or(-1) == 0,
                      "d=" + std::to_string(d) + " seed " + std::to_string(i) +
                          " transformed exponent != 0");
        }
    }
}

// 9. The four basis-consistency identities hold as matrix identities (1e-10)
//    for d = 2..6.
void criterion_appendix(Checker& c) {
    for (int d = 2; d <= 6; ++d) {
        const AppendixReport report = verify_appendix(d);
        c.within(report.a1, 0.0, 1e-10, "d=" + std::to_string(d) + " identity A1");
        c.within(report.a2, 0.0, 1e-10, "d=" + std::to_string(d) + " identity A2");
        c.within(report.a3, 0.0, 1e-10, "d=" + std::to_string(d) + " identity A3");
        c.within(report.a4, 0.0, 1e-10, "d=" + std::to_string(d) + " identity A4");
    }
}

// 10. The ancilla-free which-path model reproduces criteria 1-2 on the
//     spin ⊗ path register for d = 2..5.
void criterion_which_path(Checker& c) {
    for (int d = 2; d <= 5; ++d) {
        const WhichPathModel model = which_path_model(d, CoherenceGram::ones(d));
        const PureState& psi = std::get<PureState>(model.state);

        c.within(expectation(psi, model.path_number()).real(), 1.0, 1e-10,
                 "d=" + std::to_string(d) + " path occupation");

        const std::vector<OperatorSpec> zz = {adjoint(pauli_z(d)).on("s"), model.path_z()};
        c.require(eigen_exponent(psi, std::span(zz), d, 1e-10).value_or(-1) == 0,
                  "d=" + std::to_string(d) + " path projection exponent != 0");

        const std::vector<OperatorSpec> xx = {pauli_x(d).on("s"), pauli_x(d).on("p")};
        c.require(eigen_exponent(psi, std::span(xx), d, 1e-10).value_or(-1) == 0,
                  "d=" + std::to_string(d) + " path superposition exponent != 0");

        c.require(joint_fixed_space_dimension(d) == 1,
                  "d=" + std::to_string(d) + " joint eigenspace dimension != 1");
    }
}

// 11. Circuit outcome distributions equal the brute-force projective oracle
//     within 1e-10 for d = 2, 3, on pure sector states, general states for
//     the number circuit, and decohered mixtures.
void criterion_oracle_equivalence(Checker& c) {
    SplitRng rng(1111);
    for (int d = 2; d <= 3; ++d) {
        // Entangled state plus random sector states.
        std::vector<PureState> inputs;
        inputs.push_back(bell_state(d));
        for (int trial = 0; trial < 3; ++trial) {
            const Register compressed = spin_pointer_register(d);
            Vector amp(compressed.total_dim());
            for (std::int64_t i = 0; i < amp.size(); ++i)
                amp(i) = Cplx(rng.next_gaussian(), rng.next_gaussian());
            amp /= amp.norm();
            inputs.push_back(PointerEmbedding(d).expand(PureState(compressed, amp)));
        }

        int input_id = 0;
        for (const auto& input : inputs) {
            const StateVariant prepared = with_counter(input, d);
            SplitRng r1 = rng.split(input_id), r2 = rng.split(50 + input_id),
                     r3 = rng.split(100 + input_id);
            ++input_id;

            const auto rn = nondestructive_number(prepared, r1);
            const auto rz = nondestructive_zz(prepared, r2);
            const auto rx = nondestructive_xx(prepared, r3);
            const auto on = testutil::oracle_number_distribution(StateVariant(input));
            const auto oz = testutil::oracle_zz_distribution(StateVariant(input));
            const auto ox = testutil::oracle_xx_distribution(StateVariant(input));

            c.within(rn.distribution[1], on[1], 1e-10,
                     "d=" + std::to_string(d) + " number circuit vs oracle");
            for (int m = 0; m < d; ++m) {
                c.within(rz.distribution[m], oz[m], 1e-10,
                         "d=" + std::to_string(d) + " projection circuit vs oracle, exponent " +
                             std::to_string(m));
                c.within(rx.distribution[m], ox[m], 1e-10,
                         "d=" + std::to_string(d) +
                             " superposition circuit vs oracle, exponent " + std::to_string(m));
            }
        }

        // A general (multi-sector) state through the unaliased number circuit.
        {
            const Register full = spin_ancilla_register(d);
            Vector amp(full.total_dim());
            for (std::int64_t i = 0; i < amp.size(); ++i)
                amp(i) = Cplx(rng.next_gaussian(), rng.next_gaussian());
            amp /= amp.norm();
            const PureState any(full, amp);
            SplitRng r(4);
            const auto rec = nondestructive_number(with_counter(any, d + 1), r);
            const auto oracle = testutil::oracle_number_distribution(StateVariant(any));
            for (int n = 0; n <= d; ++n)
                c.within(rec.distribution[n], oracle[n], 1e-10,
                         "d=" + std::to_string(d) + " number circuit vs oracle, count " +
                             std::to_string(n));
        }

        // The fully decohered mixture.
        {
            const auto stages = run_pipeline(d, CoherenceGram::identity(d));
            const StateVariant& rho = stages[3].state;
            const StateVariant prepared = with_counter(rho, d);
            SplitRng r1(5), r2(6), r3(7);
            const auto rn = nondestructive_number(prepared, r1);
            const auto rz = nondestructive_zz(prepared, r2);
            const auto rx = nondestructive_xx(prepared, r3);
            c.within(rn.distribution[1], testutil::oracle_number_distribution(rho)[1], 1e-10,
                     "d=" + std::to_string(d) + " number circuit vs oracle (mixed)");
            const auto oz = testutil::oracle_zz_distribution(rho);
            const auto ox = testutil::oracle_xx_distribution(rho);
            for (int m = 0; m < d; ++m) {
                c.within(rz.distribution[m], oz[m], 1e-10,
                         "d=" + std::to_string(d) + " projection circuit vs oracle (mixed)");
                c.within(rx.distribution[m], ox[m], 1e-10,
                         "d=" + std::to_string(d) + " superposition circuit vs oracle (mixed)");
            }
        }
    }
}

struct Criterion {
    int id;
    std::string name;
    CriterionFn fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "table2-suite d=2..6 (N=1, ZZ=0, XX=0 within 1e-10, <1s per d)", criterion_table2},
        {2, "uniqueness: joint exponent-0 eigenspace dimension 1 for d=2..6",
         criterion_uniqueness},
        {3, "pipeline equals direct construction within 1e-12 for d=2..6",
         criterion_pipeline_equivalence},
        {4, "excluded-sector weight < 1e-20 for d=2..6", criterion_sector_exclusion},
        {5, "nondestructive circuits read (1,0,0) with certainty, any order, d=3",
         criterion_nondestructive},
        {6, "spin X-measurement projects onto W states; uniform over 1e4 shots",
         criterion_w_state},
        {7, "decoherence dichotomy: definite N/ZZ, uniform XX; 0.75 bias at gamma=0.5",
         criterion_decoherence},
        {8, "basis invariance for 20 Haar unitaries per d in {2,3,4}",
         criterion_basis_invariance},
        {9, "basis-consistency identities A1-A4 within 1e-10 for d=2..6", criterion_appendix},
        {10, "which-path model reproduces criteria 1-2 for d=2..5", criterion_which_path},
        {11, "circuit distributions equal the projective oracle within 1e-10 (d=2,3)",
         criterion_oracle_equivalence},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        Checker checker;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.fn(checker);
        } catch (const std::exception& e) {
            checker.failures.push_back(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        if (checker.failures.empty()) {
            std::printf("[PASS] %2d  %s  (worst residual %.2e, %.2fs)\n", criterion.id,
                        criterion.name.c_str(), checker.worst, elapsed);
        } else {
            ++failed;
            std::printf("[FAIL] %2d  %s\n", criterion.id, criterion.name.c_str());
            for (const auto& failure : checker.failures)
                std::printf("        - %s\n", failure.c_str());
        }
    }

    if (failed != 0) std::printf("%d criterion(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}
