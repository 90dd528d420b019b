// Copyright 2026 The ensembleq developers.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ensembleq/space_layout.hpp"

namespace ensembleq {

using Complex = std::complex<double>;

// Tolerances for the algebraic invariants. States equal up to global phase
// are compared through fidelities, never elementwise.
inline constexpr double kAlgebraTol = 1e-10;
inline constexpr double kSchmidtCutoff = 1e-9;
inline constexpr double kSupportTol = 1e-12;

// Normalized pure state over a SpaceLayout. Immutable after construction;
// every public constructor normalizes, so callers can rely on unit norm.
class Ket {
  public:
    Ket(SpaceLayout layout, Eigen::VectorXcd amplitudes)
        : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
        if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim()) {
            throw std::invalid_argument("Ket: amplitude vector size does not match layout");
        }
        const double norm = amplitudes_.norm();
        if (norm < kSupportTol) {
            throw std::invalid_argument("Ket: cannot normalize a zero-norm amplitude vector");
        }
        amplitudes_ /= norm;
    }

    const SpaceLayout& layout() const { return layout_; }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    Complex amplitude(std::size_t index) const { return amplitudes_(static_cast<Eigen::Index>(index)); }
    std::size_t dim() const { return layout_.total_dim(); }
    double norm() const { return amplitudes_.norm(); }

  private:
    SpaceLayout layout_;
    Eigen::VectorXcd amplitudes_;
};

using BasisAssignment = std::map<std::string, std::size_t>;

// Computational basis vector for a full assignment of every subsystem.
inline Ket basis_ket(const SpaceLayout& layout, const BasisAssignment& assignment) {
    if (assignment.size() != layout.size()) {
        throw std::invalid_argument("basis_ket: every subsystem must be assigned exactly once");
    }
    std::vector<std::size_t> digits(layout.size());
    for (const auto& [label, value] : assignment) {
        const std::size_t pos = layout.position_of(label);
        if (value >= layout.subsystem(pos).dim) {
            throw std::out_of_range("basis_ket: index " + std::to_string(value) +
                                    " out of range for '" + label + "'");
        }
        digits[pos] = value;
    }
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    amps(static_cast<Eigen::Index>(layout.encode(digits))) = Complex{1.0, 0.0};
    return Ket(layout, std::move(amps));
}

// Normalized linear combination. Relative phases are preserved; an overall
// phase is whatever the arithmetic produces.
inline Ket superpose(const std::vector<std::pair<Complex, Ket>>& terms) {
    if (terms.empty()) throw std::invalid_argument("superpose: no terms");
    const SpaceLayout& layout = terms.front().second.layout();
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    for (const auto& [coefficient, ket] : terms) {
        if (!(ket.layout() == layout)) throw std::invalid_argument("superpose: layout mismatch");
        sum += coefficient * ket.amplitudes();
    }
    if (sum.norm() < kSupportTol) {
        throw std::invalid_argument("superpose: terms cancel to a zero-norm state");
    }
    return Ket(layout, std::move(sum));
}

// <a|b>, conjugate-linear in the first argument.
inline Complex inner(const Ket& a, const Ket& b) {
    if (!(a.layout() == b.layout())) throw std::invalid_argument("inner: layout mismatch");
    return a.amplitudes().dot(b.amplitudes());
}

// |<a|b>|^2 — insensitive to global phase.
inline double fidelity(const Ket& a, const Ket& b) {
    return std::norm(inner(a, b));
}

// Hermitian, trace-one, positive-semidefinite operator over a layout.
// Represents either a pure projector or a statistical mixture.
class DensityOperator {
  public:
    DensityOperator(SpaceLayout layout, Eigen::MatrixXcd matrix)
        : layout_(std::move(layout)), matrix_(std::move(matrix)) {
        const auto n = static_cast<Eigen::Index>(layout_.total_dim());
        if (matrix_.rows() != n || matrix_.cols() != n) {
            throw std::invalid_argument("DensityOperator: matrix size does not match layout");
        }
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol) {
            throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
        }
        if (std::abs(matrix_.trace() - Complex{1.0, 0.0}) > kAlgebraTol) {
            throw std::invalid_argument("DensityOperator: trace is not 1");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_, Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < -kAlgebraTol) {
            throw std::invalid_argument("DensityOperator: negative eigenvalue");
        }
    }

    const SpaceLayout& layout() const { return layout_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    std::size_t dim() const { return layout_.total_dim(); }

    // Eigenvalues in ascending order (all real, >= -1e-10 by construction).
    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues();
    }

  private:
    SpaceLayout layout_;
    Eigen::MatrixXcd matrix_;
};

// Rank-1 projector |k><k|.
inline DensityOperator density_from_ket(const Ket& k) {
    Eigen::MatrixXcd outer = k.amplitudes() * k.amplitudes().adjoint();
    return DensityOperator(k.layout(), std::move(outer));
}

// Convex mixture of pure states; weights are normalized to sum to one.
inline DensityOperator mixture(const std::vector<std::pair<double, Ket>>& terms) {
    if (terms.empty()) throw std::invalid_argument("mixture: no terms");
    const SpaceLayout& layout = terms.front().second.layout();
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    double total = 0.0;
    for (const auto& [weight, ket] : terms) {
        if (weight < 0.0) throw std::invalid_argument("mixture: negative weight");
        if (!(ket.layout() == layout)) throw std::invalid_argument("mixture: layout mismatch");
        sum += weight * (ket.amplitudes() * ket.amplitudes().adjoint());
        total += weight;
    }
    if (!(total > 0.0)) throw std::invalid_argument("mixture: weights sum to zero");
    return DensityOperator(layout, sum / total);
}

inline DensityOperator maximally_mixed(const SpaceLayout& layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    return DensityOperator(layout,
                           Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n));
}

// Traces out every subsystem not named in `keep`. The result lives on the
// kept subsystems in their original order; the trace is preserved.
inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const std::vector<std::string>& keep) {
    const SpaceLayout& layout = rho.layout();
    const SpaceLayout kept_layout = layout.sublayout(keep);
    if (kept_layout.size() == layout.size()) {
        return rho;  // nothing to trace out
    }
    const std::vector<std::string> env_labels =
        layout.complement(std::vector<std::string>(keep));
    const SpaceLayout env_layout = layout.sublayout(env_labels);

    // Offsets of kept / environment digit tuples inside the full index, so a
    // full index decomposes uniquely as kept_offset[a] + env_offset[e].
    auto offsets_in_full = [&](const SpaceLayout& part) {
        std::vector<std::size_t> offsets(part.total_dim());
        std::vector<std::size_t> full_strides(part.size());
        for (std::size_t i = 0; i < part.size(); ++i) {
            full_strides[i] = layout.stride_of(layout.position_of(part.subsystem(i).label));
        }
        for_each_index(part, [&](std::size_t index, std::span<const std::size_t> digits) {
            std::size_t offset = 0;
            for (std::size_t i = 0; i < digits.size(); ++i) offset += digits[i] * full_strides[i];
            offsets[index] = offset;
        });
        return offsets;
    };
    const std::vector<std::size_t> kept_offsets = offsets_in_full(kept_layout);
    const std::vector<std::size_t> env_offsets = offsets_in_full(env_layout);

    const auto nk = static_cast<Eigen::Index>(kept_layout.total_dim());
    Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(nk, nk);
    for (Eigen::Index a = 0; a < nk; ++a) {
        for (Eigen::Index b = 0; b < nk; ++b) {
            Complex sum{0.0, 0.0};
            for (std::size_t env : env_offsets) {
                sum += rho.matrix()(static_cast<Eigen::Index>(kept_offsets[a] + env),
                                    static_cast<Eigen::Index>(kept_offsets[b] + env));
            }
            reduced(a, b) = sum;
        }
    }
    return DensityOperator(kept_layout, std::move(reduced));
}

// tr(rho^2); 1 for pure states, 1/dim for the maximally mixed state.
inline double purity(const DensityOperator& rho) {
    return rho.matrix().squaredNorm();
}

// <k|rho|k>.
inline double fidelity_with_ket(const DensityOperator& rho, const Ket& k) {
    if (!(rho.layout() == k.layout())) {
        throw std::invalid_argument("fidelity_with_ket: layout mismatch");
    }
    const Complex value = k.amplitudes().dot(rho.matrix() * k.amplitudes());
    return value.real();
}

// Number of singular values above the cutoff in the bipartite amplitude
// matrix rows=partition, cols=rest. 1 means the state factors across the cut.
inline std::size_t schmidt_rank(const Ket& k, const std::vector<std::string>& partition) {
    const SpaceLayout& layout = k.layout();
    if (partition.empty() || partition.size() >= layout.size()) {
        throw std::invalid_argument("schmidt_rank: partition must be a proper nonempty subset");
    }
    const SpaceLayout part = layout.sublayout(partition);
    if (part.size() != partition.size()) {
        throw std::invalid_argument("schmidt_rank: duplicate labels in partition");
    }
    const SpaceLayout rest = layout.sublayout(layout.complement(partition));

    auto offsets_in_full = [&](const SpaceLayout& sub) {
        std::vector<std::size_t> offsets(sub.total_dim());
        std::vector<std::size_t> full_strides(sub.size());
        for (std::size_t i = 0; i < sub.size(); ++i) {
            full_strides[i] = layout.stride_of(layout.position_of(sub.subsystem(i).label));
        }
        for_each_index(sub, [&](std::size_t index, std::span<const std::size_t> digits) {
            std::size_t offset = 0;
            for (std::size_t i = 0; i < digits.size(); ++i) offset += digits[i] * full_strides[i];
            offsets[index] = offset;
        });
        return offsets;
    };
    const std::vector<std::size_t> row_offsets = offsets_in_full(part);
    const std::vector<std::size_t> col_offsets = offsets_in_full(rest);

    Eigen::MatrixXcd bipartite(static_cast<Eigen::Index>(row_offsets.size()),
                               static_cast<Eigen::Index>(col_offsets.size()));
    for (std::size_t r = 0; r < row_offsets.size(); ++r) {
        for (std::size_t c = 0; c < col_offsets.size(); ++c) {
            bipartite(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                k.amplitude(row_offsets[r] + col_offsets[c]);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(bipartite);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > kSchmidtCutoff) ++rank;
    }
    return rank;
}

}  // namespace ensembleq
