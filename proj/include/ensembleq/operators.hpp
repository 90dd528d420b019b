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

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ensembleq/space_layout.hpp"
#include "ensembleq/states.hpp"

namespace ensembleq {

// Register-local operations on joint states. Everything here is a pure
// function; controlled permutations are verified to be bijections before use.

// Maps the digit of `target` to mapping(digits, digit). The mapping may read
// the other registers' digits but must be a bijection of the target digit for
// each fixed control configuration; this is checked.
inline std::vector<std::size_t> controlled_map_permutation(
    const SpaceLayout& layout, std::string_view target,
    const std::function<std::size_t(std::span<const std::size_t>, std::size_t)>& mapping) {
    const std::size_t pos = layout.position_of(target);
    const std::size_t dim = layout.subsystem(pos).dim;
    const std::size_t stride = layout.stride_of(pos);
    std::vector<std::size_t> perm(layout.total_dim());
    std::vector<char> hit(layout.total_dim(), 0);
    for_each_index(layout, [&](std::size_t index, std::span<const std::size_t> digits) {
        const std::size_t from = digits[pos];
        const std::size_t to = mapping(digits, from);
        if (to >= dim) {
            throw std::invalid_argument("controlled_map_permutation: mapped digit out of range");
        }
        const std::size_t image = index - from * stride + to * stride;
        perm[index] = image;
        if (hit[image]++) {
            throw std::invalid_argument("controlled_map_permutation: mapping is not a bijection");
        }
    });
    return perm;
}

// Modular shift of `target` by amount(control digits); always a bijection as
// long as the amount does not depend on the target digit.
inline std::vector<std::size_t> controlled_shift_permutation(
    const SpaceLayout& layout, std::string_view target,
    const std::function<std::size_t(std::span<const std::size_t>)>& amount) {
    const std::size_t dim = layout.dim_of(target);
    return controlled_map_permutation(
        layout, target, [&](std::span<const std::size_t> digits, std::size_t from) {
            return (from + amount(digits) % dim) % dim;
        });
}

inline std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
    return inv;
}

inline Ket permute(const Ket& state, std::span<const std::size_t> perm) {
    if (perm.size() != state.dim()) throw std::invalid_argument("permute: size mismatch");
    Eigen::VectorXcd out(state.amplitudes().size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out(static_cast<Eigen::Index>(perm[i])) = state.amplitude(i);
    }
    return Ket(state.layout(), std::move(out));
}

inline Eigen::MatrixXcd permutation_matrix(std::span<const std::size_t> perm) {
    const auto n = static_cast<Eigen::Index>(perm.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t col = 0; col < perm.size(); ++col) {
        m(static_cast<Eigen::Index>(perm[col]), static_cast<Eigen::Index>(col)) = 1.0;
    }
    return m;
}

inline Ket apply_controlled_shift(
    const Ket& state, std::string_view target,
    const std::function<std::size_t(std::span<const std::size_t>)>& amount) {
    return permute(state, controlled_shift_permutation(state.layout(), target, amount));
}

// local (d x d, unitary) acting on one register, identity elsewhere.
inline Eigen::VectorXcd apply_register_unitary_raw(const SpaceLayout& layout,
                                                   std::string_view label,
                                                   const Eigen::MatrixXcd& local,
                                                   const Eigen::VectorXcd& in) {
    const std::size_t pos = layout.position_of(label);
    const std::size_t d = layout.subsystem(pos).dim;
    const std::size_t stride = layout.stride_of(pos);
    if (local.rows() != static_cast<Eigen::Index>(d) ||
        local.cols() != static_cast<Eigen::Index>(d)) {
        throw std::invalid_argument("apply_register_unitary: operator size does not match '" +
                                    std::string(label) + "'");
    }
    const Eigen::MatrixXcd gram =
        local.adjoint() * local - Eigen::MatrixXcd::Identity(local.rows(), local.cols());
    if (gram.cwiseAbs().maxCoeff() > kAlgebraTol) {
        throw std::invalid_argument("apply_register_unitary: operator is not unitary");
    }
    Eigen::VectorXcd out(in.size());
    Eigen::VectorXcd block(static_cast<Eigen::Index>(d));
    for (std::size_t base = 0; base < static_cast<std::size_t>(in.size()); ++base) {
        if ((base / stride) % d != 0) continue;
        for (std::size_t a = 0; a < d; ++a) {
            block(static_cast<Eigen::Index>(a)) = in(static_cast<Eigen::Index>(base + a * stride));
        }
        block = local * block;
        for (std::size_t a = 0; a < d; ++a) {
            out(static_cast<Eigen::Index>(base + a * stride)) = block(static_cast<Eigen::Index>(a));
        }
    }
    return out;
}

inline Ket apply_register_unitary(const Ket& state, std::string_view label,
                                  const Eigen::MatrixXcd& local) {
    return Ket(state.layout(),
               apply_register_unitary_raw(state.layout(), label, local, state.amplitudes()));
}

// Probability mass carried by components where `label` is not at `value`.
inline double support_off_value(const Ket& state, std::string_view label, std::size_t value) {
    const std::size_t pos = state.layout().position_of(label);
    const std::size_t dim = state.layout().subsystem(pos).dim;
    const std::size_t stride = state.layout().stride_of(pos);
    if (value >= dim) throw std::out_of_range("support_off_value: value out of range");
    double off = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if ((i / stride) % dim != value) off += std::norm(state.amplitude(i));
    }
    return off;
}

inline void require_register_value(const Ket& state, std::string_view label, std::size_t value,
                                   std::string_view what) {
    if (support_off_value(state, label, value) > kSupportTol) {
        throw std::runtime_error(std::string(what) + ": register '" + std::string(label) +
                                 "' has support away from basis state " + std::to_string(value));
    }
}

}  // namespace ensembleq
