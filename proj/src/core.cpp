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

#include "ptrlab/core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace ptrlab {

namespace {

// PSD validation runs an O(n³) eigensolve; above this side it is skipped and
// the Hermitian/trace checks alone guard the invariant. Density matrices are
// only ever produced by PSD-preserving channels, so the eigencheck is a
// safety net, not the contract.
constexpr std::int64_t kPsdCheckMaxSide = 256;

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

}  // namespace

Register::Register(std::vector<Subsystem> subsystems) : subs_(std::move(subsystems)) {
    if (subs_.empty()) throw std::invalid_argument("Register: no subsystems");
    std::unordered_set<std::string> seen;
    for (const auto& s : subs_) {
        if (s.dim < 2)
            throw std::invalid_argument("Register: dimension < 2 for subsystem " + quoted(s.label));
        if (s.label.empty()) throw std::invalid_argument("Register: empty label");
        if (!seen.insert(s.label).second)
            throw std::invalid_argument("Register: duplicate label " + quoted(s.label));
    }
    strides_.assign(subs_.size(), 1);
    for (std::size_t i = subs_.size(); i-- > 0;) {
        if (i + 1 < subs_.size()) strides_[i] = strides_[i + 1] * subs_[i + 1].dim;
    }
    total_ = strides_[0] * subs_[0].dim;
}

bool Register::has(std::string_view label) const {
    for (const auto& s : subs_)
        if (s.label == label) return true;
    return false;
}

std::size_t Register::position_of(std::string_view label) const {
    for (std::size_t i = 0; i < subs_.size(); ++i)
        if (subs_[i].label == label) return i;
    throw std::invalid_argument("Register: unknown target " + quoted(label));
}

std::int64_t Register::flat_index(std::span<const int> digits) const {
    if (digits.size() != subs_.size())
        throw std::invalid_argument("Register: digit count does not match subsystem count");
    std::int64_t flat = 0;
    for (std::size_t i = 0; i < subs_.size(); ++i) {
        if (digits[i] < 0 || digits[i] >= subs_[i].dim)
            throw std::invalid_argument("Register: digit out of range for subsystem " +
                                        quoted(subs_[i].label));
        flat += digits[i] * strides_[i];
    }
    return flat;
}

std::vector<int> Register::digits_of(std::int64_t flat) const {
    if (flat < 0 || flat >= total_)
        throw std::invalid_argument("Register: flat index out of range");
    std::vector<int> digits(subs_.size());
    for (std::size_t i = 0; i < subs_.size(); ++i) {
        digits[i] = static_cast<int>(flat / strides_[i]);
        flat %= strides_[i];
    }
    return digits;
}

std::vector<std::size_t> Register::positions_with_role(Role role) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < subs_.size(); ++i)
        if (subs_[i].role == role) out.push_back(i);
    return out;
}

bool operator==(const Register& a, const Register& b) {
    if (a.subs_.size() != b.subs_.size()) return false;
    for (std::size_t i = 0; i < a.subs_.size(); ++i) {
        const auto& x = a.subs_[i];
        const auto& y = b.subs_[i];
        if (x.label != y.label || x.dim != y.dim || x.role != y.role) return false;
    }
    return true;
}

Register make_register(std::vector<Subsystem> subsystems) {
    return Register(std::move(subsystems));
}

BasisIndex BasisIndex::from_flat(const Register& reg, std::int64_t flat) {
    return BasisIndex{reg, reg.digits_of(flat)};
}

PureState::PureState(Register reg, Vector amplitudes)
    : reg_(std::move(reg)), amp_(std::move(amplitudes)) {
    if (amp_.size() != reg_.total_dim())
        throw std::invalid_argument("PureState: amplitude count does not match register dimension");
    if (std::abs(amp_.norm() - 1.0) > kTol)
        throw std::invalid_argument("PureState: amplitudes are not unit norm");
}

DensityMatrix::DensityMatrix(Register reg, Matrix matrix)
    : reg_(std::move(reg)), mat_(std::move(matrix)) {
    const auto n = reg_.total_dim();
    if (mat_.rows() != n || mat_.cols() != n)
        throw std::invalid_argument("DensityMatrix: matrix side does not match register dimension");
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > kTol)
        throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    if (std::abs(mat_.trace() - Cplx(1.0, 0.0)) > kTol)
        throw std::invalid_argument("DensityMatrix: trace is not 1");
    if (n <= kPsdCheckMaxSide) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kTol)
            throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
    }
}

const Register& reg_of(const StateVariant& state) {
    return std::visit([](const auto& s) -> const Register& { return s.reg(); }, state);
}

OperatorSpec OperatorSpec::make(std::vector<int> dims, Matrix matrix, bool unitary,
                                bool hermitian) {
    return make_bound({}, std::move(dims), std::move(matrix), unitary, hermitian);
}

OperatorSpec OperatorSpec::make_bound(std::vector<std::string> targets, std::vector<int> dims,
                                      Matrix matrix, bool unitary, bool hermitian) {
    if (dims.empty()) throw std::invalid_argument("OperatorSpec: no target dimensions");
    std::int64_t side = 1;
    for (int d : dims) {
        if (d < 2) throw std::invalid_argument("OperatorSpec: target dimension < 2");
        side *= d;
    }
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("OperatorSpec: matrix is not square");
    if (matrix.rows() != side)
        throw std::invalid_argument("OperatorSpec: matrix side does not match target dimensions");
    if (!targets.empty() && targets.size() != dims.size())
        throw std::invalid_argument("OperatorSpec: target/dimension count mismatch");
    if (unitary) {
        Matrix gram = matrix.adjoint() * matrix;
        gram -= Matrix::Identity(side, side);
        if (gram.cwiseAbs().maxCoeff() > kTol)
            throw std::invalid_argument("OperatorSpec: unitary flag set but U†U != I");
    }
    if (hermitian) {
        if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > kTol)
            throw std::invalid_argument("OperatorSpec: hermitian flag set but M != M†");
    }
    OperatorSpec op;
    op.targets_ = std::move(targets);
    op.dims_ = std::move(dims);
    op.mat_ = std::move(matrix);
    op.unitary_ = unitary;
    op.hermitian_ = hermitian;
    return op;
}

OperatorSpec OperatorSpec::on(std::vector<std::string> targets) const {
    if (targets.size() != dims_.size())
        throw std::invalid_argument("OperatorSpec::on: target count does not match dimensions");
    OperatorSpec op = *this;
    op.targets_ = std::move(targets);
    return op;
}

OperatorSpec OperatorSpec::on(std::string target) const {
    return on(std::vector<std::string>{std::move(target)});
}

OperatorSpec adjoint(const OperatorSpec& op) {
    return OperatorSpec::make_bound(op.targets(), op.dims(), op.matrix().adjoint(), op.unitary(),
                                    op.hermitian());
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

OperatorSpec product(const OperatorSpec& a, const OperatorSpec& b) {
    if (!a.bound() || !b.bound())
        throw std::invalid_argument("product: both operators must be bound to targets");
    std::set<std::string> seen(a.targets().begin(), a.targets().end());
    for (const auto& t : b.targets())
        if (seen.count(t)) throw std::invalid_argument("product: overlapping target " + quoted(t));
    std::vector<std::string> targets = a.targets();
    targets.insert(targets.end(), b.targets().begin(), b.targets().end());
    std::vector<int> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return OperatorSpec::make_bound(std::move(targets), std::move(dims),
                                    kron(a.matrix(), b.matrix()), a.unitary() && b.unitary(),
                                    false);
}

PureState basis_state(const Register& reg, std::span<const int> digits) {
    Vector amp = Vector::Zero(reg.total_dim());
    amp(reg.flat_index(digits)) = 1.0;
    return PureState(reg, std::move(amp));
}

PureState tensor(const PureState& a, const PureState& b) {
    std::vector<Subsystem> subs = a.reg().subsystems();
    for (const auto& s : b.reg().subsystems()) {
        if (a.reg().has(s.label))
            throw std::invalid_argument("tensor: label collision on " + quoted(s.label));
        subs.push_back(s);
    }
    Register reg(std::move(subs));
    const auto nb = b.reg().total_dim();
    Vector amp(reg.total_dim());
    for (std::int64_t i = 0; i < a.reg().total_dim(); ++i)
        for (std::int64_t j = 0; j < nb; ++j) amp(i * nb + j) = a.amplitudes()(i) * b.amplitudes()(j);
    return PureState(std::move(reg), std::move(amp));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    std::vector<Subsystem> subs = a.reg().subsystems();
    for (const auto& s : b.reg().subsystems()) {
        if (a.reg().has(s.label))
            throw std::invalid_argument("tensor: label collision on " + quoted(s.label));
        subs.push_back(s);
    }
    return DensityMatrix(Register(std::move(subs)), kron(a.matrix(), b.matrix()));
}

DensityMatrix to_density(const PureState& psi) {
    return DensityMatrix(psi.reg(), psi.amplitudes() * psi.amplitudes().adjoint());
}

Vector apply_matrix(const Register& reg, const Vector& in, const Matrix& m,
                    std::span<const std::size_t> positions) {
    if (in.size() != reg.total_dim())
        throw std::invalid_argument("apply_matrix: vector does not match register dimension");
    if (positions.empty()) throw std::invalid_argument("apply_matrix: no target positions");

    std::vector<std::int64_t> tdim(positions.size()), tstride(positions.size());
    std::int64_t side = 1;
    std::set<std::size_t> unique_pos;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const std::size_t p = positions[i];
        if (p >= reg.size()) throw std::invalid_argument("apply_matrix: position out of range");
        if (!unique_pos.insert(p).second)
            throw std::invalid_argument("apply_matrix: repeated target position");
        tdim[i] = reg.at(p).dim;
        tstride[i] = reg.stride(p);
        side *= tdim[i];
    }
    if (m.rows() != side || m.cols() != side)
        throw std::invalid_argument("apply_matrix: matrix side does not match target dimensions");

    // Flat offsets of the side^1 target configurations (target 0 most significant).
    std::vector<std::int64_t> toffset(side);
    for (std::int64_t t = 0; t < side; ++t) {
        std::int64_t rem = t, off = 0;
        for (std::size_t i = positions.size(); i-- > 0;) {
            off += (rem % tdim[i]) * tstride[i];
            rem /= tdim[i];
        }
        toffset[t] = off;
    }

    std::vector<std::size_t> rest;
    for (std::size_t p = 0; p < reg.size(); ++p)
        if (!unique_pos.count(p)) rest.push_back(p);
    std::int64_t rest_count = 1;
    for (std::size_t p : rest) rest_count *= reg.at(p).dim;

    Vector out = Vector::Zero(in.size());
    Vector vin(side), vout(side);
    std::vector<int> rdig(rest.size(), 0);
    for (std::int64_t r = 0; r < rest_count; ++r) {
        std::int64_t base = 0;
        for (std::size_t i = 0; i < rest.size(); ++i) base += rdig[i] * reg.stride(rest[i]);
        for (std::int64_t t = 0; t < side; ++t) vin(t) = in(base + toffset[t]);
        vout.noalias() = m * vin;
        for (std::int64_t t = 0; t < side; ++t) out(base + toffset[t]) = vout(t);
        for (std::size_t i = rest.size(); i-- > 0;) {  // mixed-radix increment
            if (++rdig[i] < reg.at(rest[i]).dim) break;
            rdig[i] = 0;
        }
    }
    return out;
}

Matrix apply_matrix_density(const Register& reg, const Matrix& rho, const Matrix& m,
                            std::span<const std::size_t> positions) {
    // M ρ M† = (M (M ρ)†)†
    Matrix a(rho.rows(), rho.cols());
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
        a.col(c) = apply_matrix(reg, rho.col(c), m, positions);
    Matrix ad = a.adjoint();
    Matrix b(rho.rows(), rho.cols());
    for (Eigen::Index c = 0; c < ad.cols(); ++c)
        b.col(c) = apply_matrix(reg, ad.col(c), m, positions);
    return b.adjoint();
}

std::vector<std::size_t> resolve_targets(const Register& reg, const OperatorSpec& op) {
    if (!op.bound()) throw std::invalid_argument("operator is not bound to target labels");
    std::vector<std::size_t> positions;
    positions.reserve(op.targets().size());
    for (std::size_t i = 0; i < op.targets().size(); ++i) {
        const std::size_t p = reg.position_of(op.targets()[i]);
        if (reg.at(p).dim != op.dims()[i])
            throw std::invalid_argument("operator dimension mismatch on target " +
                                        quoted(op.targets()[i]));
        positions.push_back(p);
    }
    return positions;
}

PureState apply_operator(const PureState& state, const OperatorSpec& op) {
    if (!op.unitary())
        throw std::invalid_argument("apply_operator: non-unitary operator on a pure state");
    const auto positions = resolve_targets(state.reg(), op);
    return PureState(state.reg(), apply_matrix(state.reg(), state.amplitudes(), op.matrix(),
                                               positions));
}

DensityMatrix apply_operator(const DensityMatrix& rho, const OperatorSpec& op) {
    if (!op.unitary())
        throw std::invalid_argument("apply_operator: non-unitary operator on a density matrix");
    const auto positions = resolve_targets(rho.reg(), op);
    return DensityMatrix(rho.reg(),
                         apply_matrix_density(rho.reg(), rho.matrix(), op.matrix(), positions));
}

StateVariant apply_operator(const StateVariant& state, const OperatorSpec& op) {
    return std::visit([&](const auto& s) -> StateVariant { return apply_operator(s, op); }, state);
}

namespace {

Cplx finish_expectation(Cplx value, const OperatorSpec& op) {
    if (op.hermitian()) {
        if (std::abs(value.imag()) > kTol)
            throw std::runtime_error("expectation: Hermitian operator produced a complex value");
        return Cplx(value.real(), 0.0);
    }
    return value;
}

}  // namespace

Cplx expectation(const PureState& state, const OperatorSpec& op) {
    const auto positions = resolve_targets(state.reg(), op);
    Vector ophi = apply_matrix(state.reg(), state.amplitudes(), op.matrix(), positions);
    return finish_expectation(state.amplitudes().dot(ophi), op);
}

Cplx expectation(const DensityMatrix& rho, const OperatorSpec& op) {
    const auto positions = resolve_targets(rho.reg(), op);
    // Tr(ρO) = Tr(Oρ); apply O to each column of ρ and take the trace.
    Cplx tr = 0.0;
    for (Eigen::Index c = 0; c < rho.matrix().cols(); ++c) {
        Vector col = apply_matrix(rho.reg(), rho.matrix().col(c), op.matrix(), positions);
        tr += col(c);
    }
    return finish_expectation(tr, op);
}

Cplx expectation(const StateVariant& state, const OperatorSpec& op) {
    return std::visit([&](const auto& s) { return expectation(s, op); }, state);
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
    std::set<std::string> keep_set;
    for (const auto& label : keep) {
        rho.reg().position_of(label);  // validates existence
        if (!keep_set.insert(label).second)
            throw std::invalid_argument("partial_trace: repeated label " + quoted(label));
    }

    std::vector<std::size_t> kept, traced;
    std::vector<Subsystem> kept_subs;
    for (std::size_t p = 0; p < rho.reg().size(); ++p) {
        if (keep_set.count(rho.reg().at(p).label)) {
            kept.push_back(p);
            kept_subs.push_back(rho.reg().at(p));
        } else {
            traced.push_back(p);
        }
    }
    if (traced.empty()) return rho;

    Register out_reg(kept_subs);
    const std::int64_t side = out_reg.total_dim();
    std::int64_t traced_count = 1;
    for (std::size_t p : traced) traced_count *= rho.reg().at(p).dim;

    // Flat offsets of kept and traced configurations in the original register.
    std::vector<std::int64_t> koffset(side);
    for (std::int64_t k = 0; k < side; ++k) {
        std::int64_t rem = k, off = 0;
        for (std::size_t i = kept.size(); i-- > 0;) {
            const std::int64_t dim = rho.reg().at(kept[i]).dim;
            off += (rem % dim) * rho.reg().stride(kept[i]);
            rem /= dim;
        }
        koffset[k] = off;
    }
    std::vector<std::int64_t> toffset(traced_count);
    {
        std::vector<int> tdig(traced.size(), 0);
        for (std::int64_t t = 0; t < traced_count; ++t) {
            std::int64_t off = 0;
            for (std::size_t i = 0; i < traced.size(); ++i)
                off += tdig[i] * rho.reg().stride(traced[i]);
            toffset[t] = off;
            for (std::size_t i = traced.size(); i-- > 0;) {
                if (++tdig[i] < rho.reg().at(traced[i]).dim) break;
                tdig[i] = 0;
            }
        }
    }

    Matrix out = Matrix::Zero(side, side);
    for (std::int64_t a = 0; a < side; ++a)
        for (std::int64_t b = 0; b < side; ++b) {
            Cplx acc = 0.0;
            for (std::int64_t t = 0; t < traced_count; ++t)
                acc += rho.matrix()(koffset[a] + toffset[t], koffset[b] + toffset[t]);
            out(a, b) = acc;
        }
    return DensityMatrix(std::move(out_reg), std::move(out));
}

double fidelity(const PureState& a, const PureState& b) {
    if (!(a.reg() == b.reg())) throw std::invalid_argument("fidelity: register mismatch");
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double fidelity(const PureState& a, const DensityMatrix& rho) {
    if (!(a.reg() == rho.reg())) throw std::invalid_argument("fidelity: register mismatch");
    const Cplx v = a.amplitudes().dot(rho.matrix() * a.amplitudes());
    return v.real();
}

double fidelity(const PureState& a, const StateVariant& b) {
    return std::visit([&](const auto& s) { return fidelity(a, s); }, b);
}

}  // namespace ptrlab
