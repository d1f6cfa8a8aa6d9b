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

#include "ptrlab/premeasure.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace ptrlab {

void check_dimension(int d, int d_max) {
    if (d < 2 || d > d_max)
        throw std::invalid_argument("d out of range [2, " + std::to_string(d_max) + "]");
}

CoherenceGram CoherenceGram::ones(int d) {
    check_dimension(d);
    return CoherenceGram(Matrix::Ones(d, d));
}

CoherenceGram CoherenceGram::identity(int d) {
    check_dimension(d);
    return CoherenceGram(Matrix::Identity(d, d));
}

CoherenceGram CoherenceGram::from_matrix(Matrix gamma) {
    const auto d = gamma.rows();
    if (d < 2 || gamma.cols() != d)
        throw std::invalid_argument("CoherenceGram: matrix must be square with side >= 2");
    if ((gamma - gamma.adjoint()).cwiseAbs().maxCoeff() > kTol)
        throw std::invalid_argument("CoherenceGram: matrix is not Hermitian");
    for (Eigen::Index j = 0; j < d; ++j)
        if (std::abs(gamma(j, j) - Cplx(1.0, 0.0)) > kTol)
            throw std::invalid_argument("CoherenceGram: diagonal entries must be 1");
    if (gamma.cwiseAbs().maxCoeff() > 1.0 + kTol)
        throw std::invalid_argument("CoherenceGram: entries must have magnitude <= 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(gamma, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kTol)
        throw std::invalid_argument("CoherenceGram: matrix is not positive semidefinite");
    return CoherenceGram(std::move(gamma));
}

bool CoherenceGram::is_all_ones() const {
    return (gamma_ - Matrix::Ones(gamma_.rows(), gamma_.cols())).cwiseAbs().maxCoeff() <= kTol;
}

std::vector<std::string> ancilla_labels(int d) {
    std::vector<std::string> labels;
    labels.reserve(d);
    for (int k = 0; k < d; ++k) labels.push_back("a" + std::to_string(k));
    return labels;
}

Register spin_ancilla_register(int d) {
    check_dimension(d);
    std::vector<Subsystem> subs{{"s", d, Role::spin}};
    for (const auto& label : ancilla_labels(d)) subs.push_back({label, 2, Role::ancilla_qubit});
    return Register(std::move(subs));
}

Register spin_pointer_register(int d) {
    check_dimension(d);
    return Register({{"s", d, Role::spin}, {"p", d, Role::pointer}});
}

Register spin_path_register(int d) {
    check_dimension(d);
    return Register({{"s", d, Role::spin}, {"p", d, Role::path}});
}

Register ancilla_register(int d) {
    check_dimension(d);
    std::vector<Subsystem> subs;
    for (const auto& label : ancilla_labels(d)) subs.push_back({label, 2, Role::ancilla_qubit});
    return Register(std::move(subs));
}

namespace {

struct SpinAncillaLayout {
    std::size_t spin_pos;
    int d;
    std::vector<std::size_t> qubit_pos;  // register order, one per spin value
};

SpinAncillaLayout spin_ancilla_layout(const Register& reg) {
    const auto spins = reg.positions_with_role(Role::spin);
    if (spins.size() != 1)
        throw std::invalid_argument("expected exactly one spin subsystem");
    const int d = reg.at(spins[0]).dim;
    auto qubits = reg.positions_with_role(Role::ancilla_qubit);
    if (static_cast<int>(qubits.size()) != d)
        throw std::invalid_argument("expected one ancilla qubit per spin value");
    for (std::size_t p : qubits)
        if (reg.at(p).dim != 2)
            throw std::invalid_argument("ancilla subsystems must be qubits");
    return SpinAncillaLayout{spins[0], d, std::move(qubits)};
}

}  // namespace

PureState prepare_initial(int d) {
    check_dimension(d);
    Register reg = spin_ancilla_register(d);
    Vector amp = Vector::Zero(reg.total_dim());
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int k = 0; k < d; ++k) amp(k * reg.stride(0)) = scale;  // ancilla digits all 0
    return PureState(std::move(reg), std::move(amp));
}

PureState entangle(const PureState& separated) {
    const Register& reg = separated.reg();
    const auto layout = spin_ancilla_layout(reg);

    // The interaction is Σ_k |k⟩⟨k|_s ⊗ x_k, but the contract requires vacuum
    // ancillas on the support so the flips land on |0…0⟩_a.
    for (std::int64_t i = 0; i < reg.total_dim(); ++i) {
        if (std::abs(separated.amplitudes()(i)) <= kTol) continue;
        const auto digits = reg.digits_of(i);
        for (std::size_t p : layout.qubit_pos)
            if (digits[p] != 0)
                throw std::invalid_argument("entangle: ancilla not in vacuum on the support");
    }

    Vector amp = Vector::Zero(reg.total_dim());
    for (std::int64_t i = 0; i < reg.total_dim(); ++i) {
        const Cplx a = separated.amplitudes()(i);
        if (a == Cplx(0.0, 0.0)) continue;
        auto digits = reg.digits_of(i);
        const int k = digits[layout.spin_pos];
        digits[layout.qubit_pos[k]] ^= 1;  // x_k flip
        amp(reg.flat_index(digits)) += a;
    }
    return PureState(reg, std::move(amp));
}

StateVariant decohere_spin_branches(const PureState& psi, const CoherenceGram& gamma) {
    const Register& reg = psi.reg();
    const auto spins = reg.positions_with_role(Role::spin);
    if (spins.size() != 1)
        throw std::invalid_argument("decohere_spin_branches: expected exactly one spin subsystem");
    const std::size_t spin_pos = spins[0];
    const int d = reg.at(spin_pos).dim;
    if (gamma.dim() != d)
        throw std::invalid_argument("decohere_spin_branches: gamma dimension mismatch");
    if (gamma.is_all_ones()) return psi;

    const std::int64_t n = reg.total_dim();
    const std::int64_t spin_stride = reg.stride(spin_pos);
    Matrix rho(n, n);
    for (std::int64_t i = 0; i < n; ++i) {
        const int j = static_cast<int>((i / spin_stride) % d);
        for (std::int64_t ip = 0; ip < n; ++ip) {
            const int k = static_cast<int>((ip / spin_stride) % d);
            rho(i, ip) =
                gamma.matrix()(j, k) * psi.amplitudes()(i) * std::conj(psi.amplitudes()(ip));
        }
    }
    return DensityMatrix(reg, std::move(rho));
}

StateVariant recombine(const PureState& entangled, const CoherenceGram& gamma) {
    return decohere_spin_branches(entangled, gamma);
}

std::vector<PipelineStage> run_pipeline(int d, const CoherenceGram& gamma) {
    check_dimension(d);
    if (gamma.dim() != d) throw std::invalid_argument("run_pipeline: gamma dimension mismatch");
    PureState t1 = prepare_initial(d);
    PureState t2 = t1;  // path separation is bookkeeping; orthogonality is implicit
    PureState t3 = entangle(t2);
    StateVariant t4 = recombine(t3, gamma);
    return {{StageTag::t1_prepared, t1},
            {StageTag::t2_separated, t2},
            {StageTag::t3_entangled, t3},
            {StageTag::t4_recombined, std::move(t4)}};
}

PureState bell_state(int d) {
    check_dimension(d);
    Register reg = spin_ancilla_register(d);
    const PointerEmbedding embedding(d);
    Vector amp = Vector::Zero(reg.total_dim());
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    const std::int64_t ancilla_block = std::int64_t(1) << d;
    for (int k = 0; k < d; ++k)
        amp(k * ancilla_block + embedding.excited_index(k)) = scale;
    return PureState(std::move(reg), std::move(amp));
}

PureState bell_state_pointer(int d) {
    check_dimension(d);
    Register reg = spin_pointer_register(d);
    Vector amp = Vector::Zero(reg.total_dim());
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int k = 0; k < d; ++k) amp(static_cast<std::int64_t>(k) * d + k) = scale;
    return PureState(std::move(reg), std::move(amp));
}

PureState w_state(int d, int k) {
    check_dimension(d);
    if (k < 0 || k >= d) throw std::invalid_argument("w_state: k out of range");
    Register reg = ancilla_register(d);
    const PointerEmbedding embedding(d);
    Vector amp = Vector::Zero(reg.total_dim());
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int j = 0; j < d; ++j)
        amp(embedding.excited_index(j)) = root_of_unity(d, static_cast<long long>(j) * k) * scale;
    return PureState(std::move(reg), std::move(amp));
}

PointerEmbedding::PointerEmbedding(int d) : d_(d) { check_dimension(d); }

std::int64_t PointerEmbedding::excited_index(int k) const {
    if (k < 0 || k >= d_) throw std::invalid_argument("PointerEmbedding: k out of range");
    return std::int64_t(1) << (d_ - 1 - k);  // qubit 0 is the most significant digit
}

Matrix PointerEmbedding::compress_matrix() const {
    Matrix m = Matrix::Zero(d_, std::int64_t(1) << d_);
    for (int k = 0; k < d_; ++k) m(k, excited_index(k)) = 1.0;
    return m;
}

OperatorSpec PointerEmbedding::lift(const OperatorSpec& base) const {
    if (base.side() != d_)
        throw std::invalid_argument("PointerEmbedding::lift: base side does not match dimension");
    const std::int64_t side = std::int64_t(1) << d_;
    Matrix m = Matrix::Zero(side, side);
    for (int k = 0; k < d_; ++k)
        for (int kp = 0; kp < d_; ++kp)
            m(excited_index(k), excited_index(kp)) = base.matrix()(k, kp);
    return OperatorSpec::make(std::vector<int>(d_, 2), std::move(m),
                              /*unitary=*/false, /*hermitian=*/base.hermitian());
}

PureState PointerEmbedding::compress(const PureState& full) const {
    const Register& reg = full.reg();
    const auto layout = spin_ancilla_layout(reg);
    if (layout.d != d_) throw std::invalid_argument("compress: register dimension mismatch");

    std::vector<Subsystem> subs;
    for (std::size_t p = 0; p < reg.size(); ++p) {
        if (reg.at(p).role == Role::ancilla_qubit) {
            if (p == layout.qubit_pos.front()) subs.push_back({"p", d_, Role::pointer});
            continue;
        }
        subs.push_back(reg.at(p));
    }
    Register out_reg(std::move(subs));

    Vector amp = Vector::Zero(out_reg.total_dim());
    const std::size_t pointer_pos = out_reg.position_of("p");
    for (std::int64_t o = 0; o < out_reg.total_dim(); ++o) {
        const auto odigits = out_reg.digits_of(o);
        std::vector<int> idigits(reg.size(), 0);
        std::size_t oi = 0;
        for (std::size_t p = 0; p < reg.size(); ++p) {
            if (reg.at(p).role == Role::ancilla_qubit) continue;
            while (out_reg.at(oi).role == Role::pointer) ++oi;
            idigits[p] = odigits[oi];
            ++oi;
        }
        const int k = odigits[pointer_pos];
        idigits[layout.qubit_pos[k]] = 1;
        amp(o) = full.amplitudes()(reg.flat_index(idigits));
    }
    const double lost = 1.0 - amp.squaredNorm();
    if (std::abs(lost) > kTol)
        throw std::invalid_argument(
            "compress: state has support outside the single-excitation sector");
    return PureState(std::move(out_reg), std::move(amp));
}

DensityMatrix PointerEmbedding::compress(const DensityMatrix& full) const {
    const Register& reg = full.reg();
    const auto layout = spin_ancilla_layout(reg);
    if (layout.d != d_) throw std::invalid_argument("compress: register dimension mismatch");

    std::vector<Subsystem> subs;
    for (std::size_t p = 0; p < reg.size(); ++p) {
        if (reg.at(p).role == Role::ancilla_qubit) {
            if (p == layout.qubit_pos.front()) subs.push_back({"p", d_, Role::pointer});
            continue;
        }
        subs.push_back(reg.at(p));
    }
    Register out_reg(std::move(subs));
    const std::size_t pointer_pos = out_reg.position_of("p");

    // Map each compressed flat index to its source index in the full register.
    std::vector<std::int64_t> src(out_reg.total_dim());
    for (std::int64_t o = 0; o < out_reg.total_dim(); ++o) {
        const auto odigits = out_reg.digits_of(o);
        std::vector<int> idigits(reg.size(), 0);
        std::size_t oi = 0;
        for (std::size_t p = 0; p < reg.size(); ++p) {
            if (reg.at(p).role == Role::ancilla_qubit) continue;
            while (out_reg.at(oi).role == Role::pointer) ++oi;
            idigits[p] = odigits[oi];
            ++oi;
        }
        idigits[layout.qubit_pos[odigits[pointer_pos]]] = 1;
        src[o] = reg.flat_index(idigits);
    }

    Matrix out(out_reg.total_dim(), out_reg.total_dim());
    for (std::int64_t a = 0; a < out_reg.total_dim(); ++a)
        for (std::int64_t b = 0; b < out_reg.total_dim(); ++b)
            out(a, b) = full.matrix()(src[a], src[b]);
    if (std::abs(out.trace() - Cplx(1.0, 0.0)) > kTol)
        throw std::invalid_argument(
            "compress: state has support outside the single-excitation sector");
    return DensityMatrix(std::move(out_reg), std::move(out));
}

StateVariant PointerEmbedding::compress(const StateVariant& full) const {
    return std::visit([&](const auto& s) -> StateVariant { return compress(s); }, full);
}

PureState PointerEmbedding::expand(const PureState& compressed) const {
    const Register& reg = compressed.reg();
    const auto pointers = reg.positions_with_role(Role::pointer);
    if (pointers.size() != 1)
        throw std::invalid_argument("expand: expected exactly one pointer subsystem");
    const std::size_t pointer_pos = pointers[0];
    if (reg.at(pointer_pos).dim != d_)
        throw std::invalid_argument("expand: pointer dimension mismatch");

    std::vector<Subsystem> subs;
    for (std::size_t p = 0; p < reg.size(); ++p) {
        if (p == pointer_pos) {
            for (const auto& label : ancilla_labels(d_))
                subs.push_back({label, 2, Role::ancilla_qubit});
            continue;
        }
        subs.push_back(reg.at(p));
    }
    Register out_reg(std::move(subs));

    Vector amp = Vector::Zero(out_reg.total_dim());
    for (std::int64_t i = 0; i < reg.total_dim(); ++i) {
        const Cplx a = compressed.amplitudes()(i);
        if (a == Cplx(0.0, 0.0)) continue;
        const auto idigits = reg.digits_of(i);
        std::vector<int> odigits;
        odigits.reserve(out_reg.size());
        for (std::size_t p = 0; p < reg.size(); ++p) {
            if (p == pointer_pos) {
                std::vector<int> qubits(d_, 0);
                qubits[idigits[p]] = 1;
                odigits.insert(odigits.end(), qubits.begin(), qubits.end());
            } else {
                odigits.push_back(idigits[p]);
            }
        }
        amp(out_reg.flat_index(odigits)) = a;
    }
    return PureState(std::move(out_reg), std::move(amp));
}

PointerEmbedding pointer_embedding(int d) { return PointerEmbedding(d); }

OperatorSpec pointer_observable(const PointerEmbedding& embedding, const OperatorSpec& base,
                                const Register& reg) {
    const auto qubits = reg.positions_with_role(Role::ancilla_qubit);
    if (static_cast<int>(qubits.size()) != embedding.dim())
        throw std::invalid_argument("pointer_observable: register has wrong qubit count");
    std::vector<std::string> labels;
    labels.reserve(qubits.size());
    for (std::size_t p : qubits) labels.push_back(reg.at(p).label);
    return embedding.lift(base).on(std::move(labels));
}

OperatorSpec WhichPathModel::path_projector(int k) const {
    if (k < 0 || k >= d) throw std::invalid_argument("path_projector: k out of range");
    Matrix m = Matrix::Zero(d, d);
    m(k, k) = 1.0;
    return OperatorSpec::make_bound({"p"}, {d}, std::move(m), /*unitary=*/false,
                                    /*hermitian=*/true);
}

OperatorSpec WhichPathModel::path_number() const {
    Matrix m = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) m += path_projector(k).matrix();
    return OperatorSpec::make_bound({"p"}, {d}, std::move(m), /*unitary=*/false,
                                    /*hermitian=*/true);
}

OperatorSpec WhichPathModel::path_z() const {
    Matrix m = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) m += root_of_unity(d, k) * path_projector(k).matrix();
    return OperatorSpec::make_bound({"p"}, {d}, std::move(m), /*unitary=*/true,
                                    /*hermitian=*/d == 2);
}

WhichPathModel which_path_model(int d, const CoherenceGram& gamma) {
    check_dimension(d);
    if (gamma.dim() != d)
        throw std::invalid_argument("which_path_model: gamma dimension mismatch");
    Register reg = spin_path_register(d);
    Vector amp = Vector::Zero(reg.total_dim());
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int k = 0; k < d; ++k) amp(static_cast<std::int64_t>(k) * d + k) = scale;
    PureState pure(reg, std::move(amp));
    return WhichPathModel{d, reg, decohere_spin_branches(pure, gamma)};
}

int joint_fixed_space_dimension(int d) {
    check_dimension(d);
    const Matrix z = pauli_z(d).matrix();
    const Matrix x = pauli_x(d).matrix();
    const std::int64_t n = static_cast<std::int64_t>(d) * d;
    const Matrix eye = Matrix::Identity(n, n);
    Matrix stacked(2 * n, n);
    stacked.topRows(n) = kron(z.adjoint(), z) - eye;
    stacked.bottomRows(n) = kron(x, x) - eye;
    Eigen::JacobiSVD<Matrix> svd(stacked);
    int nullity = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) < 1e-8) ++nullity;
    return nullity;
}

}  // namespace ptrlab
