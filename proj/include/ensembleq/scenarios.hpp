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

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ensembleq/measurement.hpp"
#include "ensembleq/operators.hpp"
#include "ensembleq/space_layout.hpp"
#include "ensembleq/states.hpp"

namespace ensembleq {

// ---------------------------------------------------------------------------
// Stern-Gerlach family
//
// Registers and basis-state names, in layout order (first = most significant):
//   spin    2  up, down
//   path    3  psi (undeflected), psi_up, psi_down
//   light   2  light (probe beam returns), no_light
//   friend  3  unset, f_up, f_down        (the observer's physical brain state)
//   record  3  none, up, down             (which-path record kept by the device)
//   wigner  2  unset, set                 (the outside observer's brain state)
//
// All experiment steps below are real permutation matrices, so no phase
// bookkeeping is needed. Initial states put every register except spin at
// index 0.
// ---------------------------------------------------------------------------

namespace sg {
inline constexpr std::string_view kSpin = "spin";
inline constexpr std::string_view kPath = "path";
inline constexpr std::string_view kLight = "light";
inline constexpr std::string_view kFriend = "friend";
inline constexpr std::string_view kRecord = "record";
inline constexpr std::string_view kWigner = "wigner";
}  // namespace sg

struct RegisterNames {
    std::string label;
    std::vector<std::string> states;
};

inline const std::vector<RegisterNames>& sg_register_names() {
    static const std::vector<RegisterNames> names = {
        {"spin", {"up", "down"}},
        {"path", {"psi", "psi_up", "psi_down"}},
        {"light", {"light", "no_light"}},
        {"friend", {"unset", "f_up", "f_down"}},
        {"record", {"none", "up", "down"}},
        {"wigner", {"unset", "set"}},
    };
    return names;
}

inline SpaceLayout sg_layout() {
    std::vector<Subsystem> subsystems;
    for (const RegisterNames& reg : sg_register_names()) {
        subsystems.push_back({reg.label, reg.states.size()});
    }
    return SpaceLayout(std::move(subsystems));
}

inline const std::vector<std::string>& sg_basis_names(std::string_view label) {
    for (const RegisterNames& reg : sg_register_names()) {
        if (reg.label == label) return reg.states;
    }
    throw std::out_of_range("sg_basis_names: unknown register '" + std::string(label) + "'");
}

// Spin |x+> = (|up> + |down>)/sqrt(2) with the particle undeflected and every
// environment register in its initial basis state.
inline Ket sg_prepare() {
    const SpaceLayout layout = sg_layout();
    BasisAssignment base = {{"spin", 0}, {"path", 0},   {"light", 0},
                            {"friend", 0}, {"record", 0}, {"wigner", 0}};
    BasisAssignment down = base;
    down["spin"] = 1;
    const double c = 1.0 / std::sqrt(2.0);
    return superpose({{c, basis_ket(layout, base)}, {c, basis_ket(layout, down)}});
}

namespace detail {

// Spin-controlled deflection: up sends psi->psi_up, down sends psi->psi_down.
// Completed to a full permutation by swapping instead of shifting, which makes
// the splitter an involution.
inline std::vector<std::size_t> sg_split_permutation(const SpaceLayout& layout) {
    const std::size_t spin_pos = layout.position_of(sg::kSpin);
    return controlled_map_permutation(
        layout, sg::kPath,
        [spin_pos](std::span<const std::size_t> digits, std::size_t path) -> std::size_t {
            const std::size_t deflected = digits[spin_pos] == 0 ? 1 : 2;
            if (path == 0) return deflected;
            if (path == deflected) return 0;
            return path;
        });
}

}  // namespace detail

// Deflects the undeflected beam into the spin-correlated paths. Requires the
// state not to have been split already.
inline Ket sg_split(const Ket& state) {
    require_register_value(state, sg::kPath, 0, "sg_split");
    return permute(state, detail::sg_split_permutation(state.layout()));
}

// The beam-rejoining optics: inverse of the splitter. If nothing recorded the
// path, this restores the pre-split state exactly.
inline Ket sg_recombine(const Ket& state) {
    return permute(state, inverse_permutation(detail::sg_split_permutation(state.layout())));
}

// Copies the path branch into the record register (record += path, mod 3).
// Any register correlated with the branch destroys recombination.
inline Ket sg_with_record(const Ket& state) {
    require_register_value(state, sg::kRecord, 0, "sg_with_record");
    const std::size_t path_pos = state.layout().position_of(sg::kPath);
    return apply_controlled_shift(state, sg::kRecord,
                                  [path_pos](std::span<const std::size_t> digits) {
                                      return digits[path_pos];
                                  });
}

// The friend probes the upper path with a light beam and their brain registers
// the result: two chained controlled shifts, path -> light then path -> friend.
// The upper branch keeps the returned light (index 0) and sets friend=f_up;
// the lower branch flips light to no_light and sets friend=f_down.
inline Ket wigner_friend_measure(const Ket& state) {
    require_register_value(state, sg::kLight, 0, "wigner_friend_measure");
    require_register_value(state, sg::kFriend, 0, "wigner_friend_measure");
    const std::size_t path_pos = state.layout().position_of(sg::kPath);
    Ket lit = apply_controlled_shift(state, sg::kLight,
                                     [path_pos](std::span<const std::size_t> digits) {
                                         return digits[path_pos] == 2 ? 1u : 0u;
                                     });
    return apply_controlled_shift(lit, sg::kFriend,
                                  [path_pos](std::span<const std::size_t> digits) -> std::size_t {
                                      if (digits[path_pos] == 1) return 1;
                                      if (digits[path_pos] == 2) return 2;
                                      return 0;
                                  });
}

// What the particle looks like when the environment (light, brains, records)
// is ignored: trace over everything but spin and path.
inline DensityOperator friend_reduced_state(const Ket& state) {
    return partial_trace(density_from_ket(state), {"spin", "path"});
}

// Rotation taking the spin z-basis to the x-basis, so a computational readout
// of spin afterwards measures along x (index 0 = |x+>, 1 = |x->).
inline Ket rotate_spin_to_x_basis(const Ket& state) {
    const double c = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd h(2, 2);
    h << c, c, c, -c;
    return apply_register_unitary(state, sg::kSpin, h);
}

// ---------------------------------------------------------------------------
// Cat-and-detector experiment: a 2-state cat and a 3-state detector+brain
// register ("db": unset, saw_live, saw_dead).
// ---------------------------------------------------------------------------

inline const std::vector<RegisterNames>& cat_register_names() {
    static const std::vector<RegisterNames> names = {
        {"cat", {"live", "dead"}},
        {"db", {"unset", "saw_live", "saw_dead"}},
    };
    return names;
}

inline SpaceLayout cat_layout() {
    std::vector<Subsystem> subsystems;
    for (const RegisterNames& reg : cat_register_names()) {
        subsystems.push_back({reg.label, reg.states.size()});
    }
    return SpaceLayout(std::move(subsystems));
}

// (|live> + |dead>)/sqrt(2) with the detector unset.
inline Ket cat_prepare() {
    const SpaceLayout layout = cat_layout();
    const double c = 1.0 / std::sqrt(2.0);
    return superpose({{c, basis_ket(layout, {{"cat", 0}, {"db", 0}})},
                      {c, basis_ket(layout, {{"cat", 1}, {"db", 0}})}});
}

// The detector and the experimenter's brain become correlated with the cat:
// db += cat + 1 (mod 3), sending unset -> saw_live / saw_dead.
inline Ket cat_entangle(const Ket& state) {
    require_register_value(state, "db", 0, "cat_entangle");
    const std::size_t cat_pos = state.layout().position_of("cat");
    return apply_controlled_shift(state, "db", [cat_pos](std::span<const std::size_t> digits) {
        return digits[cat_pos] + 1;
    });
}

// ---------------------------------------------------------------------------
// Scenario registry
// ---------------------------------------------------------------------------

struct NamedDistribution {
    std::string name;
    std::vector<std::string> outcomes;
    std::vector<double> probabilities;
};

struct NamedMetric {
    std::string name;
    double value;
};

// Deterministic summary of one scenario evaluation: readout distributions,
// scalar figures of merit, and any reduced operators worth inspecting.
struct ScenarioReport {
    std::string scenario;
    std::string mode;
    std::uint64_t seed = 0;
    std::vector<NamedDistribution> distributions;
    std::vector<NamedMetric> metrics;
    std::vector<std::pair<std::string, Eigen::MatrixXcd>> reduced_operators;
};

// Full cat experiment with exact (non-sampled) results: the detector/brain
// marginal, the cat's reduced state before anyone looks, and the conditioned
// cat states for both outcomes.
inline ScenarioReport cat_scenario() {
    ScenarioReport report;
    report.scenario = "cat";
    report.mode = "exact";

    const Ket entangled = cat_entangle(cat_prepare());
    const std::vector<double> db = pointer_distribution(entangled, "db");
    report.distributions.push_back({"db", cat_register_names()[1].states, db});

    const DensityOperator cat_reduced = partial_trace(density_from_ket(entangled), {"cat"});
    report.reduced_operators.emplace_back("cat_reduced", cat_reduced.matrix());
    report.metrics.push_back({"cat_purity", purity(cat_reduced)});

    const SpaceLayout cat_only({{"cat", 2}});
    const Ket live = basis_ket(cat_only, {{"cat", 0}});
    const Ket dead = basis_ket(cat_only, {{"cat", 1}});
    const char* outcome_names[2] = {"saw_live", "saw_dead"};
    for (std::size_t outcome = 1; outcome <= 2; ++outcome) {
        const Ket conditioned = condition_on_outcome(entangled, "db", outcome);
        const DensityOperator cat_given =
            partial_trace(density_from_ket(conditioned), {"cat"});
        const std::string tag = outcome_names[outcome - 1];
        report.reduced_operators.emplace_back("cat_given_" + tag, cat_given.matrix());
        report.metrics.push_back(
            {"fidelity_live_given_" + tag, fidelity_with_ket(cat_given, live)});
        report.metrics.push_back(
            {"fidelity_dead_given_" + tag, fidelity_with_ket(cat_given, dead)});
    }
    return report;
}

struct ReadoutSpec {
    std::string name;                   // readout id in records and reports
    std::string reg;                    // register that is read
    std::vector<std::string> outcomes;  // index -> outcome name
};

struct EvolveStep {
    std::string name;
    std::function<Ket(const Ket&)> apply;
};

using ScenarioStep = std::variant<EvolveStep, ReadoutSpec>;

struct Scenario {
    std::string id;
    std::string title;
    std::function<Ket()> prepare;
    std::vector<ScenarioStep> steps;

    std::vector<ReadoutSpec> readouts() const {
        std::vector<ReadoutSpec> result;
        for (const ScenarioStep& step : steps) {
            if (const auto* readout = std::get_if<ReadoutSpec>(&step)) result.push_back(*readout);
        }
        return result;
    }
};

// The registered experiments, in stable order. sg-recombine includes an
// intermediate path readout between the splitter and the recombiner; that is
// the readout on which the unitary and collapse accounts part ways.
inline const std::vector<Scenario>& scenario_registry() {
    static const std::vector<Scenario> registry = [] {
        const ReadoutSpec spin_z{"spin", "spin", sg_basis_names("spin")};
        const ReadoutSpec path{"path", "path", sg_basis_names("path")};
        const ReadoutSpec spin_x{"spin_x", "spin", {"plus", "minus"}};
        const ReadoutSpec friend_brain{"friend", "friend", sg_basis_names("friend")};
        const ReadoutSpec db{"db", "db", cat_register_names()[1].states};

        const EvolveStep split{"split", [](const Ket& k) { return sg_split(k); }};
        const EvolveStep recombine{"recombine", [](const Ket& k) { return sg_recombine(k); }};
        const EvolveStep record{"record", [](const Ket& k) { return sg_with_record(k); }};
        const EvolveStep friend_measure{"friend_measure",
                                        [](const Ket& k) { return wigner_friend_measure(k); }};
        const EvolveStep to_x{"spin_x_analyzer",
                              [](const Ket& k) { return rotate_spin_to_x_basis(k); }};

        std::vector<Scenario> registry;
        registry.push_back({"sg-basic",
                            "split a spin-x+ beam and read the spin along z",
                            [] { return sg_prepare(); },
                            {split, spin_z}});
        registry.push_back({"sg-recombine",
                            "split, note the path mid-flight, recombine, read spin along x",
                            [] { return sg_prepare(); },
                            {split, path, recombine, to_x, spin_x}});
        registry.push_back({"sg-record",
                            "split with a which-path record, recombine, read spin along x",
                            [] { return sg_prepare(); },
                            {split, record, recombine, to_x, spin_x}});
        registry.push_back({"wigner-friend",
                            "split, the friend probes the path, read the friend's brain state",
                            [] { return sg_prepare(); },
                            {split, friend_measure, friend_brain}});
        registry.push_back({"cat",
                            "entangle a detector+brain with the cat and read it",
                            [] { return cat_prepare(); },
                            {EvolveStep{"entangle", [](const Ket& k) { return cat_entangle(k); }},
                             db}});
        return registry;
    }();
    return registry;
}

inline std::vector<std::string> scenario_ids() {
    std::vector<std::string> ids;
    for (const Scenario& scenario : scenario_registry()) ids.push_back(scenario.id);
    return ids;
}

inline const Scenario& find_scenario(std::string_view id) {
    for (const Scenario& scenario : scenario_registry()) {
        if (scenario.id == id) return scenario;
    }
    std::ostringstream message;
    message << "unknown scenario '" << id << "'; registered:";
    for (const Scenario& scenario : scenario_registry()) message << " " << scenario.id;
    throw std::out_of_range(message.str());
}

}  // namespace ensembleq
