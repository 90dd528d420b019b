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

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "ensembleq/measurement.hpp"
#include "ensembleq/random.hpp"
#include "ensembleq/scenarios.hpp"

namespace ensembleq {

// Seeded Monte Carlo runner over registered scenarios.
//
// A trial is one member of the ensemble the prepared state describes. In
// unitary mode each readout is a Born-marginal draw taken at that point of
// the experiment; the stored state is never altered — drawing is bookkeeping
// that tells us which sub-ensemble the member belongs to, and readouts carry
// no cross-correlation unless a physical record register was entangled by the
// experiment itself. In collapse mode readouts are sequential orthodox
// projections, so later readouts see the projected state.
//
// Trial i always consumes the stream substream_seed(master_seed, i), which
// makes results bit-identical between serial and parallel execution.

struct TrialRecord {
    std::uint64_t index = 0;
    MeasurementMode mode = MeasurementMode::unitary;
    std::uint64_t stream_seed = 0;
    std::vector<std::uint32_t> outcomes;  // one entry per readout, in step order
};

struct ReadoutStats {
    std::string name;
    std::string reg;
    std::vector<std::string> outcome_names;
    std::vector<std::uint64_t> counts;
    std::vector<double> frequencies;
    std::vector<double> stderrs;  // binomial normal approximation, sqrt(p(1-p)/n)
};

struct EnsembleStats {
    std::string scenario;
    MeasurementMode mode = MeasurementMode::unitary;
    std::uint64_t n_trials = 0;
    std::uint64_t master_seed = 0;
    std::vector<ReadoutStats> readouts;
    std::string selection;  // post-selection predicate, empty for the full ensemble
    std::string parent;     // lineage: where a sub-ensemble was drawn from
    bool empty_selection = false;
};

struct RunResult {
    std::vector<TrialRecord> records;
    EnsembleStats stats;
};

// Exact (non-sampled) per-readout outcome distributions for one mode.
struct ExactDistributions {
    std::vector<std::string> readout_names;
    std::vector<std::vector<double>> probabilities;
};

namespace detail {

inline std::vector<ReadoutStats> empty_readout_stats(const Scenario& scenario) {
    std::vector<ReadoutStats> stats;
    for (const ReadoutSpec& readout : scenario.readouts()) {
        ReadoutStats entry;
        entry.name = readout.name;
        entry.reg = readout.reg;
        entry.outcome_names = readout.outcomes;
        entry.counts.assign(readout.outcomes.size(), 0);
        entry.frequencies.assign(readout.outcomes.size(), 0.0);
        entry.stderrs.assign(readout.outcomes.size(), 0.0);
        stats.push_back(std::move(entry));
    }
    return stats;
}

inline void finalize_frequencies(std::vector<ReadoutStats>& readouts, std::uint64_t n) {
    for (ReadoutStats& readout : readouts) {
        for (std::size_t o = 0; o < readout.counts.size(); ++o) {
            if (n == 0) continue;
            const double p = static_cast<double>(readout.counts[o]) / static_cast<double>(n);
            readout.frequencies[o] = p;
            readout.stderrs[o] = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        }
    }
}

// Precomputed sampling tree. The state trajectory of a trial is fully
// determined by its earlier outcomes, so the Born marginals a trial can ever
// draw from are walked once up front; trials then only consume random draws.
// This reproduces the per-trial draw sequence of evolving each trial
// separately (same marginals, same single draw per readout) at a fraction of
// the cost. In unitary mode every level has exactly one node because draws
// never feed back into the state.
struct SamplingNode {
    std::vector<double> marginal;
    std::vector<std::size_t> children;  // outcome -> node id at the next level
};

struct SamplingPlan {
    std::vector<std::vector<SamplingNode>> levels;  // one level per readout
};

inline SamplingPlan build_sampling_plan(const Scenario& scenario, MeasurementMode mode) {
    SamplingPlan plan;
    std::vector<Ket> frontier;
    frontier.push_back(scenario.prepare());
    for (const ScenarioStep& step : scenario.steps) {
        if (const auto* evolve = std::get_if<EvolveStep>(&step)) {
            for (Ket& state : frontier) state = evolve->apply(state);
            continue;
        }
        const auto& readout = std::get<ReadoutSpec>(step);
        std::vector<SamplingNode> level;
        std::vector<Ket> next;
        for (const Ket& state : frontier) {
            SamplingNode node;
            node.marginal = pointer_distribution(state, readout.reg);
            node.children.assign(node.marginal.size(), 0);
            if (mode == MeasurementMode::collapse) {
                for (std::size_t o = 0; o < node.marginal.size(); ++o) {
                    if (node.marginal[o] <= 0.0) continue;
                    node.children[o] = next.size();
                    next.push_back(condition_on_outcome(state, readout.reg, o));
                }
            }
            level.push_back(std::move(node));
        }
        if (mode == MeasurementMode::unitary) next = frontier;
        plan.levels.push_back(std::move(level));
        frontier = std::move(next);
    }
    return plan;
}

}  // namespace detail

// Walks the scenario once per mode and returns the exact readout statistics.
// Unitary mode records the Born marginal at each readout point. Collapse mode
// enumerates the projection tree: after a readout every branch splits into
// its possible outcomes with the conditional weights a sequential
// collapse_measurement would use.
inline ExactDistributions exact_readout_distributions(const Scenario& scenario,
                                                      MeasurementMode mode) {
    ExactDistributions exact;
    if (mode == MeasurementMode::unitary) {
        Ket state = scenario.prepare();
        for (const ScenarioStep& step : scenario.steps) {
            if (const auto* evolve = std::get_if<EvolveStep>(&step)) {
                state = evolve->apply(state);
            } else {
                const auto& readout = std::get<ReadoutSpec>(step);
                exact.readout_names.push_back(readout.name);
                exact.probabilities.push_back(pointer_distribution(state, readout.reg));
            }
        }
        return exact;
    }

    std::vector<std::pair<double, Ket>> branches;
    branches.emplace_back(1.0, scenario.prepare());
    for (const ScenarioStep& step : scenario.steps) {
        if (const auto* evolve = std::get_if<EvolveStep>(&step)) {
            for (auto& [weight, state] : branches) state = evolve->apply(state);
            continue;
        }
        const auto& readout = std::get<ReadoutSpec>(step);
        std::vector<double> distribution(readout.outcomes.size(), 0.0);
        std::vector<std::pair<double, Ket>> next;
        for (const auto& [weight, state] : branches) {
            const std::vector<double> marginal = pointer_distribution(state, readout.reg);
            for (std::size_t o = 0; o < marginal.size(); ++o) {
                const double joint = weight * marginal[o];
                distribution[o] += joint;
                if (joint > 1e-15) {
                    next.emplace_back(joint, condition_on_outcome(state, readout.reg, o));
                }
            }
        }
        exact.readout_names.push_back(readout.name);
        exact.probabilities.push_back(std::move(distribution));
        branches = std::move(next);
    }
    return exact;
}

// Runs n independent trials. Deterministic for a given (scenario, mode, n,
// master_seed) regardless of `threads`.
inline RunResult run_trials(const Scenario& scenario, MeasurementMode mode, std::uint64_t n,
                            std::uint64_t master_seed, unsigned threads = 1) {
    if (n < 1) throw std::invalid_argument("run_trials: need at least one trial");
    if (threads < 1) threads = 1;

    const std::vector<ReadoutSpec> readouts = scenario.readouts();
    const detail::SamplingPlan plan = detail::build_sampling_plan(scenario, mode);
    RunResult result;
    result.records.resize(n);

    auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            TrialRecord& record = result.records[i];
            record.index = i;
            record.mode = mode;
            record.stream_seed = substream_seed(master_seed, i);
            RandomStream rng(record.stream_seed);
            record.outcomes.reserve(readouts.size());
            std::size_t node = 0;
            for (const std::vector<detail::SamplingNode>& level : plan.levels) {
                const detail::SamplingNode& current = level[node];
                const std::size_t outcome = rng.sample_discrete(current.marginal);
                record.outcomes.push_back(static_cast<std::uint32_t>(outcome));
                node = current.children[outcome];
            }
        }
    };

    if (threads == 1 || n < 2 * threads) {
        run_range(0, n);
    } else {
        std::vector<std::thread> workers;
        const std::uint64_t chunk = (n + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::uint64_t begin = w * chunk;
            const std::uint64_t end = std::min<std::uint64_t>(n, begin + chunk);
            if (begin >= end) break;
            workers.emplace_back(run_range, begin, end);
        }
        for (std::thread& worker : workers) worker.join();
    }

    EnsembleStats& stats = result.stats;
    stats.scenario = scenario.id;
    stats.mode = mode;
    stats.n_trials = n;
    stats.master_seed = master_seed;
    stats.readouts = detail::empty_readout_stats(scenario);
    for (const TrialRecord& record : result.records) {
        for (std::size_t r = 0; r < record.outcomes.size(); ++r) {
            ++stats.readouts[r].counts[record.outcomes[r]];
        }
    }
    detail::finalize_frequencies(stats.readouts, n);
    return result;
}

inline RunResult run_trials(std::string_view scenario_id, MeasurementMode mode, std::uint64_t n,
                            std::uint64_t master_seed, unsigned threads = 1) {
    return run_trials(find_scenario(scenario_id), mode, n, master_seed, threads);
}

// Statistics over the sub-ensemble of records matching the predicate
// (readout name -> required outcome name). An empty match is not an error;
// it is returned flagged, with zero counts.
inline EnsembleStats post_select(const Scenario& scenario, const std::vector<TrialRecord>& records,
                                 const EnsembleStats& parent,
                                 const std::map<std::string, std::string>& predicate) {
    const std::vector<ReadoutSpec> readouts = scenario.readouts();
    std::vector<std::pair<std::size_t, std::uint32_t>> required;  // readout position -> outcome
    std::string description;
    for (const auto& [name, outcome_name] : predicate) {
        bool found = false;
        for (std::size_t r = 0; r < readouts.size(); ++r) {
            if (readouts[r].name != name) continue;
            const auto& outcomes = readouts[r].outcomes;
            bool outcome_found = false;
            for (std::size_t o = 0; o < outcomes.size(); ++o) {
                if (outcomes[o] == outcome_name) {
                    required.emplace_back(r, static_cast<std::uint32_t>(o));
                    outcome_found = true;
                    break;
                }
            }
            if (!outcome_found) {
                throw std::out_of_range("post_select: readout '" + name + "' has no outcome '" +
                                        outcome_name + "'");
            }
            found = true;
            break;
        }
        if (!found) throw std::out_of_range("post_select: unknown readout '" + name + "'");
        if (!description.empty()) description += "&";
        description += name + "=" + outcome_name;
    }

    EnsembleStats stats;
    stats.scenario = parent.scenario;
    stats.mode = parent.mode;
    stats.master_seed = parent.master_seed;
    stats.selection = description;
    stats.parent = parent.scenario + "/n=" + std::to_string(parent.n_trials) +
                   (parent.selection.empty() ? "" : "/" + parent.selection);
    stats.readouts = detail::empty_readout_stats(scenario);

    std::uint64_t n_selected = 0;
    for (const TrialRecord& record : records) {
        bool keep = true;
        for (const auto& [position, outcome] : required) {
            keep = keep && record.outcomes[position] == outcome;
        }
        if (!keep) continue;
        ++n_selected;
        for (std::size_t r = 0; r < record.outcomes.size(); ++r) {
            ++stats.readouts[r].counts[record.outcomes[r]];
        }
    }
    stats.n_trials = n_selected;
    stats.empty_selection = n_selected == 0;
    detail::finalize_frequencies(stats.readouts, n_selected);
    return stats;
}

// Divergence threshold on exact outcome probabilities between modes.
inline constexpr double kModeDivergenceTol = 1e-9;

struct ModeComparison {
    std::string scenario;
    std::uint64_t n_trials = 0;
    std::uint64_t master_seed = 0;
    EnsembleStats unitary_stats;
    EnsembleStats collapse_stats;
    ExactDistributions unitary_exact;
    ExactDistributions collapse_exact;
    bool divergence = false;
    std::vector<std::string> diverging_readouts;
};

// Runs both modes with the same master seed and compares their exact
// predictions outcome by outcome. The divergence flag is raised as soon as
// any exact probability differs by more than 1e-9.
inline ModeComparison compare_modes(std::string_view scenario_id, std::uint64_t n,
                                    std::uint64_t master_seed, unsigned threads = 1) {
    const Scenario& scenario = find_scenario(scenario_id);
    if (n < 1) throw std::invalid_argument("compare_modes: need at least one trial");

    ModeComparison comparison;
    comparison.scenario = scenario.id;
    comparison.n_trials = n;
    comparison.master_seed = master_seed;
    comparison.unitary_stats =
        run_trials(scenario, MeasurementMode::unitary, n, master_seed, threads).stats;
    comparison.collapse_stats =
        run_trials(scenario, MeasurementMode::collapse, n, master_seed, threads).stats;
    comparison.unitary_exact = exact_readout_distributions(scenario, MeasurementMode::unitary);
    comparison.collapse_exact = exact_readout_distributions(scenario, MeasurementMode::collapse);

    for (std::size_t r = 0; r < comparison.unitary_exact.readout_names.size(); ++r) {
        const auto& unitary = comparison.unitary_exact.probabilities[r];
        const auto& collapse = comparison.collapse_exact.probabilities[r];
        double gap = 0.0;
        for (std::size_t o = 0; o < unitary.size(); ++o) {
            gap = std::max(gap, std::abs(unitary[o] - collapse[o]));
        }
        if (gap > kModeDivergenceTol) {
            comparison.divergence = true;
            comparison.diverging_readouts.push_back(comparison.unitary_exact.readout_names[r]);
        }
    }
    return comparison;
}

}  // namespace ensembleq
