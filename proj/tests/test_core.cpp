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

#include <doctest.h>

#include "test_util.hpp"

using namespace ptrlab;

namespace {

Register small_register() {
    return make_register({{"s", 3, Role::spin},
                          {"a0", 2, Role::ancilla_qubit},
                          {"a1", 2, Role::ancilla_qubit},
                          {"a2", 2, Role::ancilla_qubit}});
}

}  // namespace

TEST_CASE("make_register computes total dimensions") {
    CHECK(make_register({{"s", 3, Role::spin}}).total_dim() == 3);
    CHECK(small_register().total_dim() == 24);
    auto with_counter = make_register({{"s", 3, Role::spin},
                                       {"a0", 2, Role::ancilla_qubit},
                                       {"a1", 2, Role::ancilla_qubit},
                                       {"a2", 2, Role::ancilla_qubit},
                                       {"c", 3, Role::counter}});
    CHECK(with_counter.total_dim() == 72);
}

TEST_CASE("make_register rejects bad input") {
    CHECK_THROWS_AS(make_register({{"s", 3, Role::spin}, {"s", 2, Role::ancilla_qubit}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_register({{"s", 1, Role::spin}}), std::invalid_argument);
    CHECK_THROWS_AS(make_register({}), std::invalid_argument);
}

TEST_CASE("basis_state places a single amplitude at the mixed-radix index") {
    const Register reg = small_register();
    const std::vector<int> zero{0, 0, 0, 0};
    const PureState s0 = basis_state(reg, zero);
    CHECK(s0.amplitudes()(0) == Cplx(1.0, 0.0));

    // (2; 0,0,1): flat = 2*8 + 0*4 + 0*2 + 1 = 17
    const std::vector<int> digits{2, 0, 0, 1};
    const PureState s = basis_state(reg, digits);
    CHECK(s.amplitudes()(17) == Cplx(1.0, 0.0));
    CHECK(s.amplitudes().cwiseAbs().sum() == doctest::Approx(1.0));

    const std::vector<int> bad{3, 0, 0, 0};
    CHECK_THROWS_AS(basis_state(reg, bad), std::invalid_argument);
}

TEST_CASE("basis states are mutually orthonormal") {
    const Register reg = small_register();
    for (std::int64_t i = 0; i < reg.total_dim(); ++i) {
        const auto di = reg.digits_of(i);
        const PureState si = basis_state(reg, di);
        for (std::int64_t j = 0; j < reg.total_dim(); ++j) {
            const auto dj = reg.digits_of(j);
            const Cplx dot = si.amplitudes().dot(basis_state(reg, dj).amplitudes());
            CHECK(std::abs(dot - (i == j ? Cplx(1, 0) : Cplx(0, 0))) < kTol);
        }
    }
}

TEST_CASE("mixed-radix round trip") {
    const Register reg = make_register({{"s", 3, Role::spin},
                                        {"a0", 2, Role::ancilla_qubit},
                                        {"c", 5, Role::counter}});
    for (std::int64_t i = 0; i < reg.total_dim(); ++i) {
        const auto digits = reg.digits_of(i);
        CHECK(reg.flat_index(digits) == i);
        CHECK(BasisIndex::from_flat(reg, i).flat() == i);
    }
}

TEST_CASE("apply_operator: identity, qubit flip, inverse round trip") {
    const Register reg = small_register();
    const std::vector<int> zero{0, 0, 0, 0};
    const PureState s0 = basis_state(reg, zero);

    const OperatorSpec identity =
        OperatorSpec::make({3}, Matrix::Identity(3, 3), true, true).on("s");
    const PureState same = apply_operator(s0, identity);
    CHECK((same.amplitudes() - s0.amplitudes()).cwiseAbs().maxCoeff() < kTol);

    const PureState flipped = apply_operator(s0, qubit_pauli(QubitAxis::x, "a0"));
    const std::vector<int> expect{0, 1, 0, 0};
    CHECK(std::abs(flipped.amplitude(expect) - Cplx(1.0, 0.0)) < kTol);

    SplitRng rng(7);
    const OperatorSpec u = random_unitary(3, rng.next_u64()).on("s");
    const PureState back = apply_operator(apply_operator(bell_state(3), u), adjoint(u));
    CHECK((back.amplitudes() - bell_state(3).amplitudes()).cwiseAbs().maxCoeff() < kTol);
}

TEST_CASE("apply_operator rejects bad targets and non-unitary ops") {
    const Register reg = small_register();
    const std::vector<int> zero{0, 0, 0, 0};
    const PureState s0 = basis_state(reg, zero);
    CHECK_THROWS_AS(apply_operator(s0, qubit_pauli(QubitAxis::x, "nope")),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_operator(s0, number_operator({"a0", "a1", "a2"})),
                    std::invalid_argument);
    // unbound operator
    CHECK_THROWS_AS(apply_operator(s0, pauli_z(3)), std::invalid_argument);
    // dimension mismatch: qutrit operator on a qubit
    CHECK_THROWS_AS(apply_operator(s0, pauli_z(3).on("a0")), std::invalid_argument);
}

TEST_CASE("operators on disjoint targets commute") {
    const Register reg = small_register();
    SplitRng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const OperatorSpec a = random_unitary(2, rng.next_u64()).on("a0");
        const OperatorSpec b = random_unitary(3, rng.next_u64()).on("s");
        const PureState psi = bell_state(3);
        const PureState ab = apply_operator(apply_operator(psi, a), b);
        const PureState ba = apply_operator(apply_operator(psi, b), a);
        CHECK((ab.amplitudes() - ba.amplitudes()).cwiseAbs().maxCoeff() < kTol);
    }
}

TEST_CASE("norm is preserved under long unitary sequences") {
    SplitRng rng(13);
    PureState psi = bell_state(3);
    for (int step = 0; step < 50; ++step) {
        const OperatorSpec u = random_unitary(2, rng.next_u64()).on("a1");
        const OperatorSpec v = random_unitary(3, rng.next_u64()).on("s");
        psi = apply_operator(apply_operator(psi, u), v);
        CHECK(std::abs(psi.norm() - 1.0) < kTol);
    }
}

TEST_CASE("expectation basics") {
    const Register reg = small_register();
    const std::vector<int> zero{0, 0, 0, 0};
    const PureState s0 = basis_state(reg, zero);
    const OperatorSpec identity =
        OperatorSpec::make({3}, Matrix::Identity(3, 3), true, true).on("s");
    CHECK(expectation(s0, identity).real() == doctest::Approx(1.0));

    // Hermitian-flagged operators return a real value.
    const Cplx n = expectation(bell_state(3), number_operator({"a0", "a1", "a2"}));
    CHECK(n.imag() == 0.0);
    CHECK(n.real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partial trace of the entangled state is maximally mixed") {
    // Independent oracle: brute-force digit contraction on the 9x9 matrix.
    const PureState bell = bell_state_pointer(3);
    const DensityMatrix rho = to_density(bell);

    const Matrix oracle = testutil::oracle_partial_trace(rho, {"s"});
    const Matrix expected = Matrix::Identity(3, 3) / 3.0;
    CHECK((oracle - expected).cwiseAbs().maxCoeff() < kTol);

    const DensityMatrix reduced = partial_trace(rho, std::vector<std::string>{"s"});
    CHECK((reduced.matrix() - expected).cwiseAbs().maxCoeff() < kTol);
    CHECK((reduced.matrix() - oracle).cwiseAbs().maxCoeff() < kTol);
}

TEST_CASE("partial trace agrees with the contraction oracle on random states") {
    SplitRng rng(5);
    const Register reg = make_register({{"s", 3, Role::spin},
                                        {"a0", 2, Role::ancilla_qubit},
                                        {"a1", 2, Role::ancilla_qubit}});
    for (int trial = 0; trial < 3; ++trial) {
        Vector amp(reg.total_dim());
        for (std::int64_t i = 0; i < amp.size(); ++i)
            amp(i) = Cplx(rng.next_gaussian(), rng.next_gaussian());
        amp /= amp.norm();
        const DensityMatrix rho = to_density(PureState(reg, amp));

        for (const auto& keep :
             {std::vector<std::string>{"s"}, {"a0"}, {"s", "a1"}, {"a0", "a1"}}) {
            const DensityMatrix reduced = partial_trace(rho, keep);
            const Matrix oracle = testutil::oracle_partial_trace(rho, keep);
            CHECK((reduced.matrix() - oracle).cwiseAbs().maxCoeff() < kTol);
            CHECK(std::abs(reduced.matrix().trace() - Cplx(1, 0)) < kTol);
        }
    }
}

TEST_CASE("partial trace keeping everything returns the input") {
    const DensityMatrix rho = to_density(bell_state_pointer(3));
    const DensityMatrix same = partial_trace(rho, std::vector<std::string>{"s", "p"});
    CHECK((same.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < kTol);
    CHECK_THROWS_AS(partial_trace(rho, std::vector<std::string>{}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, std::vector<std::string>{"nope"}), std::invalid_argument);
}

TEST_CASE("tensor builds product states") {
    const Register qubit_a = make_register({{"q0", 2, Role::ancilla_qubit}});
    const Register qubit_b = make_register({{"q1", 2, Role::ancilla_qubit}});
    const std::vector<int> zero{0};
    const PureState t = tensor(basis_state(qubit_a, zero), basis_state(qubit_b, zero));
    CHECK(t.reg().total_dim() == 4);
    CHECK(t.amplitudes()(0) == Cplx(1.0, 0.0));

    // Uniform spin ⊗ vacuum ancillas reproduces the prepared initial state.
    const Register spin = make_register({{"s", 3, Role::spin}});
    Vector uniform(3);
    uniform.setConstant(1.0 / std::sqrt(3.0));
    const Register anc = ancilla_register(3);
    const std::vector<int> vac{0, 0, 0};
    const PureState prepared = tensor(PureState(spin, uniform), basis_state(anc, vac));
    CHECK((prepared.amplitudes() - prepare_initial(3).amplitudes()).cwiseAbs().maxCoeff() < kTol);
    CHECK(prepared.norm() == doctest::Approx(1.0));

    CHECK_THROWS_AS(tensor(basis_state(qubit_a, zero), basis_state(qubit_a, zero)),
                    std::invalid_argument);
}

TEST_CASE("to_density round trip through partial trace of nothing") {
    const PureState psi = bell_state_pointer(2);
    const DensityMatrix rho = to_density(psi);
    const DensityMatrix kept = partial_trace(rho, std::vector<std::string>{"s", "p"});
    CHECK((kept.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < kTol);
}

TEST_CASE("state invariants are enforced") {
    const Register reg = make_register({{"s", 2, Role::spin}});
    Vector bad(2);
    bad << 1.0, 1.0;  // norm sqrt(2)
    CHECK_THROWS_AS(PureState(reg, bad), std::invalid_argument);

    Matrix not_hermitian(2, 2);
    not_hermitian << 0.5, 0.3, 0.0, 0.5;
    CHECK_THROWS_AS(DensityMatrix(reg, not_hermitian), std::invalid_argument);

    Matrix wrong_trace = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix(reg, wrong_trace), std::invalid_argument);

    Matrix negative(2, 2);
    negative << 1.5, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(DensityMatrix(reg, negative), std::invalid_argument);
}

TEST_CASE("operator flags are verified on construction") {
    Matrix not_unitary(2, 2);
    not_unitary << 1.0, 1.0, 0.0, 1.0;
    CHECK_THROWS_AS(OperatorSpec::make({2}, not_unitary, true, false), std::invalid_argument);
    CHECK_THROWS_AS(OperatorSpec::make({2}, not_unitary, false, true), std::invalid_argument);
    CHECK_NOTHROW(OperatorSpec::make({2}, not_unitary, false, false));
    CHECK_THROWS_AS(OperatorSpec::make({3}, Matrix::Identity(2, 2), true, true),
                    std::invalid_argument);
}
