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

#include "ptrlab/ops.hpp"

#include <Eigen/QR>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ptrlab/rng.hpp"

namespace ptrlab {

namespace {

void check_dim(int d) {
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");
}

int mod_positive(long long k, int d) {
    const long long m = k % d;
    return static_cast<int>(m < 0 ? m + d : m);
}

}  // namespace

Cplx root_of_unity(int d, long long power) {
    check_dim(d);
    // Reduce mod d first so large exponents lose no precision.
    const double angle = 2.0 * std::numbers::pi * mod_positive(power, d) / d;
    return Cplx(std::cos(angle), std::sin(angle));
}

RootOfUnityExponent::RootOfUnityExponent(int k_in, int d_in) : d(d_in) {
    check_dim(d_in);
    k = mod_positive(k_in, d_in);
}

RootOfUnityExponent operator+(RootOfUnityExponent a, RootOfUnityExponent b) {
    if (a.d != b.d) throw std::invalid_argument("RootOfUnityExponent: mixed moduli");
    return RootOfUnityExponent(a.k + b.k, a.d);
}

RootOfUnityExponent operator-(RootOfUnityExponent a, RootOfUnityExponent b) {
    if (a.d != b.d) throw std::invalid_argument("RootOfUnityExponent: mixed moduli");
    return RootOfUnityExponent(a.k - b.k, a.d);
}

bool operator==(RootOfUnityExponent a, RootOfUnityExponent b) {
    return a.d == b.d && a.k == b.k;
}

OperatorSpec pauli_z(int d) {
    check_dim(d);
    Matrix m = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) m(k, k) = root_of_unity(d, k);
    return OperatorSpec::make({d}, std::move(m), /*unitary=*/true, /*hermitian=*/d == 2);
}

OperatorSpec pauli_x(int d) {
    check_dim(d);
    Matrix m = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) m((k + 1) % d, k) = 1.0;
    return OperatorSpec::make({d}, std::move(m), /*unitary=*/true, /*hermitian=*/d == 2);
}

OperatorSpec fourier(int d) {
    check_dim(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    Matrix m(d, d);
    for (int row = 0; row < d; ++row)
        for (int col = 0; col < d; ++col)
            m(row, col) = root_of_unity(d, static_cast<long long>(row) * col) * scale;
    return OperatorSpec::make({d}, std::move(m), /*unitary=*/true, /*hermitian=*/d == 2);
}

Vector x_eigenvector(int d, int k) {
    check_dim(d);
    if (k < 0 || k >= d) throw std::invalid_argument("x_eigenvector: k out of range");
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    Vector v(d);
    for (int j = 0; j < d; ++j) v(j) = root_of_unity(d, -static_cast<long long>(k) * j) * scale;
    return v;
}

PureState x_eigenstate(int d, int k, std::string label) {
    Register reg({{std::move(label), d, Role::spin}});
    return PureState(std::move(reg), x_eigenvector(d, k));
}

OperatorSpec qubit_pauli(QubitAxis which, std::string qubit_label) {
    Matrix m(2, 2);
    if (which == QubitAxis::x)
        m << 0, 1, 1, 0;
    else
        m << 1, 0, 0, -1;
    return OperatorSpec::make_bound({std::move(qubit_label)}, {2}, std::move(m),
                                    /*unitary=*/true, /*hermitian=*/true);
}

OperatorSpec number_operator(std::vector<std::string> ancilla_labels) {
    if (ancilla_labels.empty()) throw std::invalid_argument("number_operator: no targets");
    const int n = static_cast<int>(ancilla_labels.size());
    const std::int64_t side = std::int64_t(1) << n;
    Matrix m = Matrix::Zero(side, side);
    for (std::int64_t i = 0; i < side; ++i)
        m(i, i) = static_cast<double>(__builtin_popcountll(static_cast<unsigned long long>(i)));
    return OperatorSpec::make_bound(std::move(ancilla_labels), std::vector<int>(n, 2),
                                    std::move(m), /*unitary=*/false, /*hermitian=*/true);
}

Matrix matrix_power(const Matrix& base, long long e) {
    const Eigen::Index n = base.rows();
    if (base.cols() != n) throw std::invalid_argument("matrix_power: matrix is not square");
    Matrix factor = e >= 0 ? base : Matrix(base.adjoint());
    long long reps = e >= 0 ? e : -e;
    Matrix out = Matrix::Identity(n, n);
    while (reps > 0) {
        if (reps & 1) out = factor * out;
        factor = factor * factor;
        reps >>= 1;
    }
    return out;
}

OperatorSpec controlled_power(std::string control_label, int control_dim,
                              std::string target_label, const OperatorSpec& base,
                              const std::map<int, int>& exponent_map) {
    check_dim(control_dim);
    if (base.dims().size() != 1)
        throw std::invalid_argument("controlled_power: base must be a single-subsystem operator");
    if (!base.unitary())
        throw std::invalid_argument("controlled_power: base operator must be unitary");
    const int td = base.dims()[0];
    const std::int64_t side = static_cast<std::int64_t>(control_dim) * td;
    Matrix m = Matrix::Zero(side, side);
    for (int c = 0; c < control_dim; ++c) {
        const auto it = exponent_map.find(c);
        if (it == exponent_map.end())
            throw std::invalid_argument("controlled_power: unmapped control digit " +
                                        std::to_string(c));
        m.block(static_cast<std::int64_t>(c) * td, static_cast<std::int64_t>(c) * td, td, td) =
            matrix_power(base.matrix(), it->second);
    }
    return OperatorSpec::make_bound({std::move(control_label), std::move(target_label)},
                                    {control_dim, td}, std::move(m),
                                    /*unitary=*/true, /*hermitian=*/false);
}

OperatorSpec conjugated_observable(const OperatorSpec& u, int d) {
    check_dim(d);
    if (!u.unitary()) throw std::invalid_argument("conjugated_observable: U must be unitary");
    if (u.side() != d)
        throw std::invalid_argument("conjugated_observable: U side does not match dimension");
    Matrix m = u.matrix() * pauli_z(d).matrix() * u.matrix().adjoint();
    return OperatorSpec::make({d}, std::move(m), /*unitary=*/true, /*hermitian=*/d == 2);
}

OperatorSpec random_unitary(int d, std::uint64_t seed) {
    check_dim(d);
    SplitRng rng(seed);
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = Cplx(rng.next_gaussian(), rng.next_gaussian());
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fold the R diagonal phases into Q so the distribution is Haar.
    for (int j = 0; j < d; ++j) {
        const Cplx rjj = r(j, j);
        const double mag = std::abs(rjj);
        q.col(j) *= mag > 0.0 ? rjj / mag : Cplx(1.0, 0.0);
    }
    return OperatorSpec::make({d}, std::move(q), /*unitary=*/true, /*hermitian=*/false);
}

namespace {

Vector apply_sequence(const Register& reg, Vector v, std::span<const OperatorSpec> ops) {
    for (std::size_t i = ops.size(); i-- > 0;) {
        const auto positions = resolve_targets(reg, ops[i]);
        v = apply_matrix(reg, v, ops[i].matrix(), positions);
    }
    return v;
}

std::optional<int> match_exponent(const Vector& image, const Vector& original, int d,
                                  double tol) {
    for (int k = 0; k < d; ++k) {
        const Vector residual = image - root_of_unity(d, k) * original;
        if (residual.cwiseAbs().maxCoeff() <= tol) return k;
    }
    return std::nullopt;
}

}  // namespace

std::optional<int> eigen_exponent(const PureState& state, const OperatorSpec& op, int d,
                                  double tol) {
    check_dim(d);
    const auto positions = resolve_targets(state.reg(), op);
    const Vector image = apply_matrix(state.reg(), state.amplitudes(), op.matrix(), positions);
    return match_exponent(image, state.amplitudes(), d, tol);
}

std::optional<int> eigen_exponent(const PureState& state, std::span<const OperatorSpec> ops,
                                  int d, double tol) {
    check_dim(d);
    const Vector image = apply_sequence(state.reg(), state.amplitudes(), ops);
    return match_exponent(image, state.amplitudes(), d, tol);
}

Cplx expectation_sequence(const PureState& state, std::span<const OperatorSpec> ops) {
    const Vector image = apply_sequence(state.reg(), state.amplitudes(), ops);
    return state.amplitudes().dot(image);
}

Cplx expectation_sequence(const DensityMatrix& rho, std::span<const OperatorSpec> ops) {
    Cplx tr = 0.0;
    for (Eigen::Index c = 0; c < rho.matrix().cols(); ++c) {
        const Vector col = apply_sequence(rho.reg(), rho.matrix().col(c), ops);
        tr += col(c);
    }
    return tr;
}

Cplx expectation_sequence(const StateVariant& state, std::span<const OperatorSpec> ops) {
    return std::visit([&](const auto& s) { return expectation_sequence(s, ops); }, state);
}

}  // namespace ptrlab
