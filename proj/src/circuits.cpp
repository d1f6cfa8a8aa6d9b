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

#include "ptrlab/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptrlab {

namespace {

struct CircuitLayout {
    std::size_t spin_pos;
    int d;
    std::vector<std::size_t> qubit_pos;
    std::size_t counter_pos;
    int counter_dim;
    std::string spin_label;
    std::vector<std::string> qubit_labels;
    std::string counter_label;
};

CircuitLayout resolve_layout(const Register& reg) {
    const auto spins = reg.positions_with_role(Role::spin);
    if (spins.size() != 1) throw std::invalid_argument("circuit: expected exactly one spin");
    const auto qubits = reg.positions_with_role(Role::ancilla_qubit);
    const int d = reg.at(spins[0]).dim;
    if (static_cast<int>(qubits.size()) != d)
        throw std::invalid_argument("circuit: expected one ancilla qubit per spin value");
    const auto counters = reg.positions_with_role(Role::counter);
    if (counters.size() != 1) throw std::invalid_argument("circuit: expected exactly one counter");
    if (reg.at(counters[0]).dim < d)
        throw std::invalid_argument("circuit: counter dimension must be >= d");

    CircuitLayout layout;
    layout.spin_pos = spins[0];
    layout.d = d;
    layout.qubit_pos = qubits;
    layout.counter_pos = counters[0];
    layout.counter_dim = reg.at(counters[0]).dim;
    layout.spin_label = reg.at(spins[0]).label;
    for (std::size_t p : qubits) layout.qubit_labels.push_back(reg.at(p).label);
    layout.counter_label = reg.at(counters[0]).label;
    return layout;
}

// Marginal probability of each digit of one subsystem.
std::vector<double> digit_weights(const StateVariant& state, std::size_t pos) {
    const Register& reg = reg_of(state);
    const int dim = reg.at(pos).dim;
    const std::int64_t stride = reg.stride(pos);
    std::vector<double> w(dim, 0.0);
    if (std::holds_alternative<PureState>(state)) {
        const Vector& amp = std::get<PureState>(state).amplitudes();
        for (std::int64_t i = 0; i < amp.size(); ++i)
            w[static_cast<std::size_t>((i / stride) % dim)] += std::norm(amp(i));
    } else {
        const Matrix& rho = std::get<DensityMatrix>(state).matrix();
        for (std::int64_t i = 0; i < rho.rows(); ++i)
            w[static_cast<std::size_t>((i / stride) % dim)] += rho(i, i).real();
    }
    return w;
}

void require_counter_initialized(const StateVariant& state, const CircuitLayout& layout) {
    const auto w = digit_weights(state, layout.counter_pos);
    if (std::abs(w[0] - 1.0) > kTol)
        throw std::invalid_argument("circuit: counter not initialized to |0>");
}

// Weight outside the singly-excited ancilla sector.
double sector_leak(const StateVariant& state, const CircuitLayout& layout) {
    const Register& reg = reg_of(state);
    auto excitations = [&](std::int64_t i) {
        int n = 0;
        for (std::size_t p : layout.qubit_pos) n += static_cast<int>((i / reg.stride(p)) % 2);
        return n;
    };
    double leak = 0.0;
    if (std::holds_alternative<PureState>(state)) {
        const Vector& amp = std::get<PureState>(state).amplitudes();
        for (std::int64_t i = 0; i < amp.size(); ++i)
            if (excitations(i) != 1) leak += std::norm(amp(i));
    } else {
        const Matrix& rho = std::get<DensityMatrix>(state).matrix();
        for (std::int64_t i = 0; i < rho.rows(); ++i)
            if (excitations(i) != 1) leak += rho(i, i).real();
    }
    return leak;
}

void require_single_excitation(const StateVariant& state, const CircuitLayout& layout) {
    if (sector_leak(state, layout) > kLeakTol)
        throw std::runtime_error("circuit: state leaks outside the single-excitation sector");
}

// Sector-padded (non-unitary) operator application; weight below the leak
// threshold is discarded and the state renormalized.
StateVariant apply_padded(const StateVariant& state, const OperatorSpec& op) {
    const Register& reg = reg_of(state);
    const auto positions = resolve_targets(reg, op);
    if (std::holds_alternative<PureState>(state)) {
        Vector out = apply_matrix(reg, std::get<PureState>(state).amplitudes(), op.matrix(),
                                  positions);
        const double n2 = out.squaredNorm();
        if (1.0 - n2 > kLeakTol)
            throw std::runtime_error("circuit: state leaks outside the single-excitation sector");
        return PureState(reg, out / std::sqrt(n2));
    }
    Matrix out = apply_matrix_density(reg, std::get<DensityMatrix>(state).matrix(), op.matrix(),
                                      positions);
    const double tr = out.trace().real();
    if (1.0 - tr > kLeakTol)
        throw std::runtime_error("circuit: state leaks outside the single-excitation sector");
    return DensityMatrix(reg, out / tr);
}

// Cyclic shift on the first d counter levels, identity above; keeps the
// exponent arithmetic mod d when the counter has spare levels.
OperatorSpec counter_shift_mod(int d, int counter_dim) {
    Matrix m = Matrix::Zero(counter_dim, counter_dim);
    for (int k = 0; k < d; ++k) m((k + 1) % d, k) = 1.0;
    for (int k = d; k < counter_dim; ++k) m(k, k) = 1.0;
    return OperatorSpec::make({counter_dim}, std::move(m), /*unitary=*/true,
                              /*hermitian=*/false);
}

// Forces the (already collapsed) counter digit back to |0⟩.
StateVariant reinitialize_counter(const StateVariant& state, const CircuitLayout& layout,
                                  int collapsed_digit) {
    const Register& reg = reg_of(state);
    const std::int64_t stride = reg.stride(layout.counter_pos);
    const int dim = layout.counter_dim;
    auto remap = [&](std::int64_t i) {  // index with counter digit 0 -> source index
        return i + static_cast<std::int64_t>(collapsed_digit) * stride;
    };
    if (std::holds_alternative<PureState>(state)) {
        const Vector& amp = std::get<PureState>(state).amplitudes();
        Vector out = Vector::Zero(amp.size());
        for (std::int64_t i = 0; i < amp.size(); ++i)
            if ((i / stride) % dim == 0) out(i) = amp(remap(i));
        return PureState(reg, std::move(out));
    }
    const Matrix& rho = std::get<DensityMatrix>(state).matrix();
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (std::int64_t i = 0; i < rho.rows(); ++i) {
        if ((i / stride) % dim != 0) continue;
        for (std::int64_t j = 0; j < rho.cols(); ++j)
            if ((j / stride) % dim == 0) out(i, j) = rho(remap(i), remap(j));
    }
    return DensityMatrix(reg, std::move(out));
}

}  // namespace

std::string observable_name(CounterObservable obs) {
    switch (obs) {
        case CounterObservable::number: return "N";
        case CounterObservable::projection: return "ZZ";
        case CounterObservable::superposition: return "XX";
    }
    throw std::logic_error("unknown observable");
}

StateVariant with_counter(const StateVariant& state, int counter_dim) {
    if (counter_dim < 2) throw std::invalid_argument("with_counter: counter dimension < 2");
    Register counter_reg({{"c", counter_dim, Role::counter}});
    if (std::holds_alternative<PureState>(state)) {
        Vector amp = Vector::Zero(counter_dim);
        amp(0) = 1.0;
        return tensor(std::get<PureState>(state), PureState(counter_reg, std::move(amp)));
    }
    Matrix m = Matrix::Zero(counter_dim, counter_dim);
    m(0, 0) = 1.0;
    return tensor(std::get<DensityMatrix>(state), DensityMatrix(counter_reg, std::move(m)));
}

StateVariant with_counter(const PureState& state, int counter_dim) {
    return with_counter(StateVariant(state), counter_dim);
}

MeasurementRecord measure_destructive(const StateVariant& state,
                                      const std::vector<std::string>& targets, SplitRng& rng,
                                      std::string observable) {
    if (targets.empty()) throw std::invalid_argument("measure_destructive: empty target list");
    const Register& reg = reg_of(state);
    std::vector<std::size_t> positions;
    std::vector<std::int64_t> tdims;
    std::int64_t side = 1;
    for (const auto& t : targets) {
        positions.push_back(reg.position_of(t));
        tdims.push_back(reg.at(positions.back()).dim);
        side *= tdims.back();
    }

    // Joint outcome index of the targets for a register flat index.
    auto outcome_of = [&](std::int64_t i) {
        std::int64_t o = 0;
        for (std::size_t t = 0; t < positions.size(); ++t) {
            const auto dig = (i / reg.stride(positions[t])) % tdims[t];
            o = o * tdims[t] + dig;
        }
        return o;
    };

    std::vector<double> dist(side, 0.0);
    if (std::holds_alternative<PureState>(state)) {
        const Vector& amp = std::get<PureState>(state).amplitudes();
        for (std::int64_t i = 0; i < amp.size(); ++i) dist[outcome_of(i)] += std::norm(amp(i));
    } else {
        const Matrix& rho = std::get<DensityMatrix>(state).matrix();
        for (std::int64_t i = 0; i < rho.rows(); ++i) dist[outcome_of(i)] += rho(i, i).real();
        // Density diagonals may carry -1e-17-scale rounding noise.
        for (double& w : dist) {
            if (w < 0.0 && w > -kTol) w = 0.0;
        }
    }

    const std::uint64_t rng_state = rng.state();
    const std::int64_t outcome = static_cast<std::int64_t>(rng.sample(dist));
    const double p = dist[outcome];

    StateVariant post = std::visit(
        [&](const auto& s) -> StateVariant {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PureState>) {
                Vector out = Vector::Zero(s.amplitudes().size());
                for (std::int64_t i = 0; i < out.size(); ++i)
                    if (outcome_of(i) == outcome) out(i) = s.amplitudes()(i);
                return PureState(reg, out / std::sqrt(p));
            } else {
                Matrix out = Matrix::Zero(s.matrix().rows(), s.matrix().cols());
                for (std::int64_t i = 0; i < out.rows(); ++i) {
                    if (outcome_of(i) != outcome) continue;
                    for (std::int64_t j = 0; j < out.cols(); ++j)
                        if (outcome_of(j) == outcome) out(i, j) = s.matrix()(i, j);
                }
                return DensityMatrix(reg, out / p);
            }
        },
        state);

    std::vector<int> digits(positions.size());
    {
        std::int64_t rem = outcome;
        for (std::size_t t = positions.size(); t-- > 0;) {
            digits[t] = static_cast<int>(rem % tdims[t]);
            rem /= tdims[t];
        }
    }
    return MeasurementRecord{std::move(observable), static_cast<int>(outcome),  std::move(digits),
                             p,                     std::move(dist),            std::move(post),
                             rng_state};
}

MeasurementRecord measure_number_local(const StateVariant& state, SplitRng& rng) {
    const Register& reg = reg_of(state);
    const auto qubits = reg.positions_with_role(Role::ancilla_qubit);
    if (qubits.empty()) throw std::invalid_argument("measure_number_local: no ancilla qubits");
    std::vector<std::string> labels;
    for (std::size_t p : qubits) labels.push_back(reg.at(p).label);

    MeasurementRecord joint = measure_destructive(state, labels, rng, "N");
    int total = 0;
    for (int bit : joint.digits) total += bit;

    // Aggregate the joint readout distribution by excitation count.
    std::vector<double> dist(qubits.size() + 1, 0.0);
    for (std::size_t o = 0; o < joint.distribution.size(); ++o)
        dist[static_cast<std::size_t>(__builtin_popcountll(o))] += joint.distribution[o];

    joint.outcome = total;
    joint.distribution = std::move(dist);
    joint.probability = joint.distribution[total];
    return joint;
}

namespace {

MeasurementRecord run_counter_circuit(const StateVariant& input, CounterObservable obs,
                                      SplitRng& rng) {
    const Register& reg = reg_of(input);
    const auto layout = resolve_layout(reg);
    const int d = layout.d;
    require_counter_initialized(input, layout);
    if (obs != CounterObservable::number) require_single_excitation(input, layout);

    // The number circuit counts with the full counter cycle (unaliased when
    // the counter has d+1 levels); the exponent circuits work mod d.
    const OperatorSpec shift = obs == CounterObservable::number
                                   ? pauli_x(layout.counter_dim)
                                   : counter_shift_mod(d, layout.counter_dim);
    StateVariant state = input;

    std::map<int, int> plus_m, minus_m;
    for (int m = 0; m < d; ++m) {
        plus_m[m] = m;
        minus_m[m] = -m;
    }

    std::optional<OperatorSpec> fs, fp;
    if (obs == CounterObservable::superposition) {
        const PointerEmbedding embedding(d);
        fs = fourier(d).on(layout.spin_label);
        fp = pointer_observable(embedding, fourier(d), reg);
        // Rotate shift eigenstates into standard-basis states.
        state = apply_operator(state, *fs);
        state = apply_padded(state, *fp);
    }

    if (obs == CounterObservable::number) {
        for (const auto& q : layout.qubit_labels) {
            state = apply_operator(
                state, controlled_power(q, 2, layout.counter_label, shift, {{0, 0}, {1, 1}}));
        }
    } else {
        // Impress the pointer index l on the counter via controlled shifts.
        for (int l = 0; l < d; ++l) {
            state = apply_operator(state, controlled_power(layout.qubit_labels[l], 2,
                                                           layout.counter_label, shift,
                                                           {{0, 0}, {1, l}}));
        }
        // Couple the spin: -m cancels the projection exponent, +m the
        // superposition exponent (the rotated state has spin digit -l mod d).
        state = apply_operator(
            state, controlled_power(layout.spin_label, d, layout.counter_label, shift,
                                    obs == CounterObservable::projection ? minus_m : plus_m));
    }

    MeasurementRecord rec =
        measure_destructive(state, {layout.counter_label}, rng, observable_name(obs));

    StateVariant post = rec.post_state;
    if (obs == CounterObservable::superposition) {
        post = apply_padded(post, adjoint(*fp));
        post = apply_operator(post, adjoint(*fs));
    }
    rec.post_state = reinitialize_counter(post, layout, rec.outcome);
    return rec;
}

}  // namespace

MeasurementRecord measure_counter_observable(const StateVariant& state, CounterObservable obs,
                                             SplitRng& rng) {
    return run_counter_circuit(state, obs, rng);
}

MeasurementRecord nondestructive_number(const StateVariant& state, SplitRng& rng) {
    return run_counter_circuit(state, CounterObservable::number, rng);
}

MeasurementRecord nondestructive_zz(const StateVariant& state, SplitRng& rng) {
    return run_counter_circuit(state, CounterObservable::projection, rng);
}

MeasurementRecord nondestructive_xx(const StateVariant& state, SplitRng& rng) {
    return run_counter_circuit(state, CounterObservable::superposition, rng);
}

std::vector<MeasurementRecord> sequential_suite(const StateVariant& state,
                                                const std::array<CounterObservable, 3>& order,
                                                SplitRng& rng) {
    if (order[0] == order[1] || order[0] == order[2] || order[1] == order[2])
        throw std::invalid_argument("sequential_suite: order must be a permutation");
    std::vector<MeasurementRecord> records;
    StateVariant current = state;
    for (CounterObservable obs : order) {
        records.push_back(run_counter_circuit(current, obs, rng));
        current = records.back().post_state;
    }
    return records;
}

std::vector<SpinXBranch> spin_x_branches(const PureState& state) {
    const Register& reg = state.reg();
    const auto spins = reg.positions_with_role(Role::spin);
    if (spins.size() != 1) throw std::invalid_argument("spin_x_branches: expected one spin");
    const std::size_t spin_pos = spins[0];
    const int d = reg.at(spin_pos).dim;

    const PureState rotated = apply_operator(state, fourier(d).on(reg.at(spin_pos).label));

    std::vector<Subsystem> rest_subs;
    for (std::size_t p = 0; p < reg.size(); ++p)
        if (p != spin_pos) rest_subs.push_back(reg.at(p));
    Register rest_reg(std::move(rest_subs));

    std::vector<Vector> cond(d, Vector::Zero(rest_reg.total_dim()));
    for (std::int64_t i = 0; i < reg.total_dim(); ++i) {
        const auto digits = reg.digits_of(i);
        std::vector<int> rest_digits;
        rest_digits.reserve(digits.size() - 1);
        for (std::size_t p = 0; p < digits.size(); ++p)
            if (p != spin_pos) rest_digits.push_back(digits[p]);
        cond[digits[spin_pos]](rest_reg.flat_index(rest_digits)) = rotated.amplitudes()(i);
    }

    std::vector<SpinXBranch> branches;
    for (int k = 0; k < d; ++k) {
        const double p = cond[k].squaredNorm();
        if (p > kTol) {
            cond[k] /= std::sqrt(p);
        } else {
            cond[k].setZero();  // zero-probability branch: placeholder basis state
            cond[k](0) = 1.0;
        }
        branches.push_back(SpinXBranch{k, p, PureState(rest_reg, std::move(cond[k]))});
    }
    return branches;
}

SpinXProjection measure_spin_x_then_project(const PureState& state, SplitRng& rng) {
    const Register& reg = state.reg();
    const auto spins = reg.positions_with_role(Role::spin);
    if (spins.size() != 1)
        throw std::invalid_argument("measure_spin_x_then_project: expected one spin");
    const int d = reg.at(spins[0]).dim;

    auto branches = spin_x_branches(state);
    std::vector<double> dist;
    for (const auto& b : branches) dist.push_back(b.probability);

    const std::uint64_t rng_state = rng.state();
    const int k = static_cast<int>(rng.sample(dist));
    const auto& branch = branches[k];

    // The conditional pointer state must be the matching W state (up to a
    // global phase).
    const PureState expected = w_state(d, k);
    if (1.0 - std::abs(expected.amplitudes().dot(branch.pointer_state.amplitudes())) > kTol)
        throw std::runtime_error(
            "measure_spin_x_then_project: conditional pointer state is not the expected W state");

    MeasurementRecord rec{"Xs",   k,
                          {k},    branch.probability,
                          dist,   StateVariant(branch.pointer_state),
                          rng_state};
    return SpinXProjection{std::move(rec), branch.pointer_state};
}

OperatorSpec BasisChoice::observable_pointer() const {
    return OperatorSpec::make({d}, u_p * pauli_z(d).matrix() * u_p.adjoint(), /*unitary=*/true,
                              /*hermitian=*/false);
}

OperatorSpec BasisChoice::observable_spin() const {
    return OperatorSpec::make({d}, v_s * pauli_z(d).matrix() * v_s.adjoint(), /*unitary=*/true,
                              /*hermitian=*/false);
}

OperatorSpec BasisChoice::rotation_spin() const {
    return OperatorSpec::make({d}, v_s.adjoint(), /*unitary=*/true, /*hermitian=*/false);
}

OperatorSpec BasisChoice::rotation_pointer() const {
    return OperatorSpec::make({d}, u_p.adjoint(), /*unitary=*/true, /*hermitian=*/false);
}

BasisChoice basis_choice(const OperatorSpec& u_p) {
    if (!u_p.unitary()) throw std::invalid_argument("basis_choice: U_p must be unitary");
    if (u_p.dims().size() != 1)
        throw std::invalid_argument("basis_choice: U_p must act on a single subsystem");
    const int d = u_p.dims()[0];
    return BasisChoice{d, u_p.matrix(), u_p.matrix().conjugate()};
}

AppendixReport verify_appendix(int d) {
    check_dimension(d);
    const Matrix z = pauli_z(d).matrix();
    const Matrix x = pauli_x(d).matrix();
    const Matrix f = fourier(d).matrix();

    AppendixReport report;
    report.d = d;
    report.a1 = (f.adjoint() * z * f - x).cwiseAbs().maxCoeff();
    report.a2 = (f.adjoint().conjugate() - f).cwiseAbs().maxCoeff();
    const Matrix o_s = f * z * f.adjoint();
    report.a3 = (o_s - x.adjoint()).cwiseAbs().maxCoeff();
    const Matrix o_p = f.adjoint() * z * f;
    report.a4 = (kron(o_s.adjoint(), o_p) - kron(x, x)).cwiseAbs().maxCoeff();
    report.pass = report.a1 <= kTol && report.a2 <= kTol && report.a3 <= kTol && report.a4 <= kTol;
    return report;
}

}  // namespace ptrlab
