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

#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ensembleq/operators.hpp"
#include "ensembleq/random.hpp"
#include "ensembleq/space_layout.hpp"
#include "ensembleq/states.hpp"

namespace ensembleq {

// unitary: a measurement is an entangling interaction between the measured
// register and a pointer register; the joint state never collapses.
// collapse: the orthodox alternative; the measured register is projected onto
// the observed eigenvalue and the pointer jumps to the matching readout.
enum class MeasurementMode { unitary, collapse };

inline std::string_view to_string(MeasurementMode mode) {
    return mode == MeasurementMode::unitary ? "unitary" : "collapse";
}

inline MeasurementMode mode_from_string(std::string_view text) {
    if (text == "unitary") return MeasurementMode::unitary;
    if (text == "collapse") return MeasurementMode::collapse;
    throw std::invalid_argument("unknown mode '" + std::string(text) +
                                "' (expected unitary or collapse)");
}

// A projective pointer measurement scheme. The pointer starts at 0 and is
// driven to the readout value alpha_r when the object register holds r;
// readout values are nonzero and distinct, so reading alpha identifies r.
// An optional "irrelevant" register is carried inertly, and an optional
// post-measurement unitary on the object register models devices that
// disturb the object while still recording it faithfully.
struct MeasurementModel {
    std::string object_label;
    std::size_t object_basis_size = 0;  // dimension of the object register
    std::string pointer_label;
    std::size_t pointer_dim = 0;  // >= object_basis_size + 1
    std::optional<std::string> irrelevant_label;
    std::vector<std::size_t> readout_values;  // r -> alpha_r
    MeasurementMode mode = MeasurementMode::unitary;
    std::optional<Eigen::MatrixXcd> object_kick;

    // Readouts alpha_r = r + 1 with the tightest pointer that fits.
    static MeasurementModel standard(std::string object_label, std::size_t object_basis_size,
                                     std::string pointer_label,
                                     MeasurementMode mode = MeasurementMode::unitary) {
        MeasurementModel model;
        model.object_label = std::move(object_label);
        model.object_basis_size = object_basis_size;
        model.pointer_label = std::move(pointer_label);
        model.pointer_dim = object_basis_size + 1;
        model.readout_values.resize(object_basis_size);
        for (std::size_t r = 0; r < object_basis_size; ++r) model.readout_values[r] = r + 1;
        model.mode = mode;
        return model;
    }

    void validate() const {
        if (object_basis_size < 2) {
            throw std::invalid_argument("MeasurementModel: object register needs >= 2 outcomes");
        }
        if (pointer_dim < object_basis_size + 1) {
            throw std::invalid_argument(
                "MeasurementModel: pointer dimension must be at least object size + 1");
        }
        if (readout_values.size() != object_basis_size) {
            throw std::invalid_argument("MeasurementModel: one readout value per outcome required");
        }
        for (std::size_t r = 0; r < readout_values.size(); ++r) {
            if (readout_values[r] < 1 || readout_values[r] >= pointer_dim) {
                throw std::invalid_argument("MeasurementModel: readout value out of [1, dim-1]");
            }
            for (std::size_t s = r + 1; s < readout_values.size(); ++s) {
                if (readout_values[r] == readout_values[s]) {
                    throw std::invalid_argument("MeasurementModel: readout values must be distinct");
                }
            }
        }
        if (object_kick) {
            const auto d = static_cast<Eigen::Index>(object_basis_size);
            if (object_kick->rows() != d || object_kick->cols() != d) {
                throw std::invalid_argument("MeasurementModel: object kick size mismatch");
            }
        }
    }

    void validate_against(const SpaceLayout& layout) const {
        validate();
        if (layout.dim_of(object_label) != object_basis_size) {
            throw std::invalid_argument("MeasurementModel: layout dimension of '" + object_label +
                                        "' does not match the declared object size");
        }
        if (layout.dim_of(pointer_label) != pointer_dim) {
            throw std::invalid_argument("MeasurementModel: layout dimension of '" + pointer_label +
                                        "' does not match the declared pointer size");
        }
        if (irrelevant_label) layout.position_of(*irrelevant_label);
    }
};

// Dense unitary over a layout; U†U = I is checked on construction.
class Unitary {
  public:
    Unitary(SpaceLayout layout, Eigen::MatrixXcd matrix)
        : layout_(std::move(layout)), matrix_(std::move(matrix)) {
        const auto n = static_cast<Eigen::Index>(layout_.total_dim());
        if (matrix_.rows() != n || matrix_.cols() != n) {
            throw std::invalid_argument("Unitary: matrix size does not match layout");
        }
        const Eigen::MatrixXcd gram =
            matrix_.adjoint() * matrix_ - Eigen::MatrixXcd::Identity(n, n);
        if (gram.cwiseAbs().maxCoeff() > kAlgebraTol) {
            throw std::invalid_argument("Unitary: U†U deviates from the identity");
        }
    }

    const SpaceLayout& layout() const { return layout_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    Ket apply(const Ket& state) const {
        if (!(state.layout() == layout_)) throw std::invalid_argument("Unitary: layout mismatch");
        return Ket(layout_, matrix_ * state.amplitudes());
    }

  private:
    SpaceLayout layout_;
    Eigen::MatrixXcd matrix_;
};

namespace detail {

inline std::vector<std::size_t> pointer_shift_permutation(const MeasurementModel& model,
                                                          const SpaceLayout& layout) {
    const std::size_t object_pos = layout.position_of(model.object_label);
    return controlled_shift_permutation(
        layout, model.pointer_label,
        [&model, object_pos](std::span<const std::size_t> digits) {
            return model.readout_values[digits[object_pos]];
        });
}

}  // namespace detail

// The measurement interaction as an explicit matrix: a controlled pointer
// shift (pointer += alpha_r mod dim when the object holds r), followed by the
// optional object kick. Every other register is untouched.
inline Unitary build_pointer_unitary(const MeasurementModel& model, const SpaceLayout& layout) {
    model.validate_against(layout);
    Eigen::MatrixXcd matrix = permutation_matrix(detail::pointer_shift_permutation(model, layout));
    if (model.object_kick) {
        for (Eigen::Index col = 0; col < matrix.cols(); ++col) {
            matrix.col(col) = apply_register_unitary_raw(layout, model.object_label,
                                                         *model.object_kick, matrix.col(col));
        }
    }
    return Unitary(layout, std::move(matrix));
}

// Born-rule marginal of a labeled register: the diagonal of its reduced
// density operator. Entries are nonnegative and sum to 1.
inline std::vector<double> pointer_distribution(const Ket& state, std::string_view label) {
    const std::size_t pos = state.layout().position_of(label);
    const std::size_t dim = state.layout().subsystem(pos).dim;
    const std::size_t stride = state.layout().stride_of(pos);
    std::vector<double> probabilities(dim, 0.0);
    for (std::size_t i = 0; i < state.dim(); ++i) {
        probabilities[(i / stride) % dim] += std::norm(state.amplitude(i));
    }
    return probabilities;
}

// Entangling (premeasurement) evolution: |psi>|0> -> sum_r c_r |r>|alpha_r>.
// Norm-preserving and linear in the input; nothing collapses. The protocol
// expects the pointer at 0; other inputs stay well-defined (the shift is
// modular) but are reported through `warning` or stderr.
inline Ket apply_measurement(const Ket& state, const MeasurementModel& model,
                             std::string* warning = nullptr) {
    model.validate_against(state.layout());
    if (model.mode != MeasurementMode::unitary) {
        throw std::invalid_argument("apply_measurement: model mode is not unitary");
    }
    if (support_off_value(state, model.pointer_label, 0) > kSupportTol) {
        const std::string message = "apply_measurement: pointer register '" + model.pointer_label +
                                    "' is not initialized to 0; readings shift relative to alpha_r";
        if (warning != nullptr) {
            *warning = message;
        } else {
            std::cerr << "warning: " << message << "\n";
        }
    }
    Ket result = permute(state, detail::pointer_shift_permutation(model, state.layout()));
    if (model.object_kick) {
        result = apply_register_unitary(result, model.object_label, *model.object_kick);
    }
    return result;
}

// Exact outcome weights the collapse rule draws from (the object marginal).
inline std::vector<double> collapse_outcome_weights(const Ket& state,
                                                    const MeasurementModel& model) {
    model.validate_against(state.layout());
    return pointer_distribution(state, model.object_label);
}

// Normalized projection of `label` onto `value`. This constructs the
// sub-ensemble of trials that showed the given outcome — a new preparation,
// not a dynamical process acting on the original ensemble.
inline Ket condition_on_outcome(const Ket& state, std::string_view label, std::size_t value) {
    const std::size_t pos = state.layout().position_of(label);
    const std::size_t dim = state.layout().subsystem(pos).dim;
    const std::size_t stride = state.layout().stride_of(pos);
    if (value >= dim) throw std::out_of_range("condition_on_outcome: value out of range");
    Eigen::VectorXcd projected = state.amplitudes();
    double mass = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if ((i / stride) % dim == value) {
            mass += std::norm(state.amplitude(i));
        } else {
            projected(static_cast<Eigen::Index>(i)) = Complex{0.0, 0.0};
        }
    }
    if (mass <= kSupportTol) {
        throw std::runtime_error("condition_on_outcome: outcome '" + std::string(label) + "=" +
                                 std::to_string(value) + "' has probability below 1e-12");
    }
    return Ket(state.layout(), std::move(projected));
}

struct CollapseOutcome {
    std::size_t value = 0;
    Ket post_state;
};

// Orthodox projection of a bare register: draw from its Born marginal, then
// keep only the matching branch. Zero-probability outcomes cannot be drawn.
inline CollapseOutcome collapse_register(const Ket& state, std::string_view label,
                                         RandomStream& rng) {
    const std::vector<double> weights = pointer_distribution(state, label);
    const std::size_t value = rng.sample_discrete(weights);
    return CollapseOutcome{value, condition_on_outcome(state, label, value)};
}

// Orthodox pointer measurement: project the object register onto the drawn
// outcome, then drive the pointer to alpha_r (and apply the object kick, when
// the device has one). Registers other than object and pointer are untouched.
inline CollapseOutcome collapse_measurement(const Ket& state, const MeasurementModel& model,
                                            RandomStream& rng) {
    model.validate_against(state.layout());
    if (model.mode != MeasurementMode::collapse) {
        throw std::invalid_argument("collapse_measurement: model mode is not collapse");
    }
    const std::vector<double> weights = pointer_distribution(state, model.object_label);
    const std::size_t outcome = rng.sample_discrete(weights);
    Ket post = condition_on_outcome(state, model.object_label, outcome);
    const std::size_t alpha = model.readout_values[outcome];
    post = apply_controlled_shift(post, model.pointer_label,
                                  [alpha](std::span<const std::size_t>) { return alpha; });
    if (model.object_kick) {
        post = apply_register_unitary(post, model.object_label, *model.object_kick);
    }
    return CollapseOutcome{outcome, std::move(post)};
}

}  // namespace ensembleq
