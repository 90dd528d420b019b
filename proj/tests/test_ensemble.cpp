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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ensembleq/ensemble.hpp"
#include "ensembleq/reports.hpp"

using namespace ensembleq;
using Catch::Approx;

TEST_CASE("born frequencies converge on the basic split") {
    const std::uint64_t n = 100000;
    const RunResult result = run_trials("sg-basic", MeasurementMode::unitary, n, 7);
    REQUIRE(result.stats.readouts.size() == 1);
    const double frequency = result.stats.readouts[0].frequencies[0];
    CHECK(std::abs(frequency - 0.5) < 3.0 * std::sqrt(0.25 / static_cast<double>(n)));
    CHECK(result.stats.readouts[0].counts[0] + result.stats.readouts[0].counts[1] == n);
}

TEST_CASE("cat outcomes are even") {
    const std::uint64_t n = 10000;
    const RunResult result = run_trials("cat", MeasurementMode::unitary, n, 11);
    const ReadoutStats& db = result.stats.readouts[0];
    CHECK(db.counts[0] == 0);  // the detector never stays unset
    const double live = db.frequencies[1];
    CHECK(std::abs(live - 0.5) < 3.0 * std::sqrt(0.25 / static_cast<double>(n)));
}

TEST_CASE("identical seeds reproduce identical trials") {
    const RunResult a = run_trials("wigner-friend", MeasurementMode::collapse, 2000, 99);
    const RunResult b = run_trials("wigner-friend", MeasurementMode::collapse, 2000, 99);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].index == b.records[i].index);
        CHECK(a.records[i].stream_seed == b.records[i].stream_seed);
        CHECK(a.records[i].outcomes == b.records[i].outcomes);
        // the record is a pure function of (scenario, mode, master seed, index)
        CHECK(a.records[i].stream_seed == substream_seed(99, i));
    }

    const RunResult c = run_trials("wigner-friend", MeasurementMode::collapse, 2000, 100);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        any_difference = any_difference || a.records[i].outcomes != c.records[i].outcomes;
    }
    CHECK(any_difference);
}

TEST_CASE("parallel execution is bit-identical to serial") {
    const RunResult serial = run_trials("sg-recombine", MeasurementMode::collapse, 20000, 5, 1);
    const RunResult parallel = run_trials("sg-recombine", MeasurementMode::collapse, 20000, 5, 4);
    for (std::size_t i = 0; i < serial.records.size(); ++i) {
        REQUIRE(serial.records[i].outcomes == parallel.records[i].outcomes);
    }
    const std::string serial_doc = trials_report(serial.stats, nullptr, false).dump();
    const std::string parallel_doc = trials_report(parallel.stats, nullptr, false).dump();
    CHECK(serial_doc == parallel_doc);
}

TEST_CASE("run_trials validates its inputs") {
    CHECK_THROWS_AS(run_trials("sg-basic", MeasurementMode::unitary, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_trials("no-such-thing", MeasurementMode::unitary, 10, 1),
                    std::out_of_range);
}

TEST_CASE("exact predictions split the modes only where records are missing") {
    // basic split: one readout, both accounts give 50/50
    const Scenario& basic = find_scenario("sg-basic");
    const ExactDistributions basic_unitary =
        exact_readout_distributions(basic, MeasurementMode::unitary);
    const ExactDistributions basic_collapse =
        exact_readout_distributions(basic, MeasurementMode::collapse);
    CHECK(basic_unitary.probabilities[0][0] == Approx(0.5).margin(1e-12));
    CHECK(basic_collapse.probabilities[0][0] == Approx(0.5).margin(1e-12));

    // recombine with a mid-flight look: the unitary account keeps the final
    // spin-x readout deterministic; collapsing at the intermediate readout
    // randomizes it.
    const Scenario& recombine = find_scenario("sg-recombine");
    const ExactDistributions unitary =
        exact_readout_distributions(recombine, MeasurementMode::unitary);
    const ExactDistributions collapse =
        exact_readout_distributions(recombine, MeasurementMode::collapse);
    REQUIRE(unitary.readout_names == std::vector<std::string>{"path", "spin_x"});

    CHECK(unitary.probabilities[0][1] == Approx(0.5).margin(1e-12));  // psi_up mid-flight
    CHECK(unitary.probabilities[0][2] == Approx(0.5).margin(1e-12));
    CHECK(unitary.probabilities[1][0] == Approx(1.0).margin(1e-12));  // |x+> for sure
    CHECK(unitary.probabilities[1][1] == Approx(0.0).margin(1e-12));

    CHECK(collapse.probabilities[0][1] == Approx(0.5).margin(1e-12));
    CHECK(collapse.probabilities[1][0] == Approx(0.5).margin(1e-12));  // coin flip after collapse
    CHECK(collapse.probabilities[1][1] == Approx(0.5).margin(1e-12));
}

TEST_CASE("single-readout scenarios cannot distinguish the modes") {
    for (const std::string id : {"sg-basic", "sg-record", "wigner-friend", "cat"}) {
        const Scenario& scenario = find_scenario(id);
        REQUIRE(scenario.readouts().size() == 1);
        const ExactDistributions unitary =
            exact_readout_distributions(scenario, MeasurementMode::unitary);
        const ExactDistributions collapse =
            exact_readout_distributions(scenario, MeasurementMode::collapse);
        for (std::size_t o = 0; o < unitary.probabilities[0].size(); ++o) {
            CHECK(std::abs(unitary.probabilities[0][o] - collapse.probabilities[0][o]) < 1e-10);
        }
        const ModeComparison comparison = compare_modes(id, 100, 3);
        CHECK_FALSE(comparison.divergence);
        CHECK(comparison.diverging_readouts.empty());
    }
}

TEST_CASE("compare_modes flags the recombination contrast") {
    const ModeComparison comparison = compare_modes("sg-recombine", 5000, 21);
    CHECK(comparison.divergence);
    REQUIRE(comparison.diverging_readouts.size() == 1);
    CHECK(comparison.diverging_readouts[0] == "spin_x");
    CHECK(comparison.unitary_exact.probabilities[1][0] == Approx(1.0).margin(1e-12));
    CHECK(comparison.collapse_exact.probabilities[1][0] == Approx(0.5).margin(1e-12));

    // sampled frequencies track their exact predictions
    const double unitary_freq = comparison.unitary_stats.readouts[1].frequencies[0];
    const double collapse_freq = comparison.collapse_stats.readouts[1].frequencies[0];
    CHECK(unitary_freq == Approx(1.0).margin(1e-12));
    CHECK(std::abs(collapse_freq - 0.5) < 4.0 * std::sqrt(0.25 / 5000.0));

    CHECK_THROWS_AS(compare_modes("sg-recombine", 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(compare_modes("nope", 10, 1), std::out_of_range);
}

TEST_CASE("sampled frequencies stay within four sigma of the exact values") {
    const std::uint64_t n = 100000;
    std::uint64_t seed = 1000;
    for (const Scenario& scenario : scenario_registry()) {
        for (MeasurementMode mode : {MeasurementMode::unitary, MeasurementMode::collapse}) {
            const RunResult result = run_trials(scenario, mode, n, ++seed);
            const ExactDistributions exact = exact_readout_distributions(scenario, mode);
            for (std::size_t r = 0; r < exact.probabilities.size(); ++r) {
                for (std::size_t o = 0; o < exact.probabilities[r].size(); ++o) {
                    const double p = exact.probabilities[r][o];
                    const double bound =
                        std::max(4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)), 1e-12);
                    CHECK(std::abs(result.stats.readouts[r].frequencies[o] - p) < bound);
                }
            }
        }
    }
}

TEST_CASE("post-selection builds the expected sub-ensembles") {
    const Scenario& basic = find_scenario("sg-basic");
    const RunResult result = run_trials(basic, MeasurementMode::unitary, 20000, 13);

    const EnsembleStats up_only = post_select(basic, result.records, result.stats, {{"spin", "up"}});
    CHECK(up_only.selection == "spin=up");
    CHECK(up_only.parent == "sg-basic/n=20000");
    CHECK(up_only.n_trials == result.stats.readouts[0].counts[0]);
    CHECK(up_only.readouts[0].frequencies[0] == 1.0);
    CHECK(up_only.readouts[0].frequencies[1] == 0.0);
    CHECK_FALSE(up_only.empty_selection);

    // a predicate every record satisfies reproduces the parent statistics
    const EnsembleStats everything = post_select(basic, result.records, result.stats, {});
    CHECK(everything.n_trials == result.stats.n_trials);
    CHECK(everything.readouts[0].counts == result.stats.readouts[0].counts);

    // empty sub-ensembles are flagged, not thrown
    const Scenario& cat = find_scenario("cat");
    const RunResult cat_result = run_trials(cat, MeasurementMode::unitary, 100, 3);
    const EnsembleStats none =
        post_select(cat, cat_result.records, cat_result.stats, {{"db", "unset"}});
    CHECK(none.empty_selection);
    CHECK(none.n_trials == 0);

    CHECK_THROWS_AS(post_select(basic, result.records, result.stats, {{"bogus", "up"}}),
                    std::out_of_range);
    CHECK_THROWS_AS(post_select(basic, result.records, result.stats, {{"spin", "sideways"}}),
                    std::out_of_range);
}

TEST_CASE("post-selection agrees with conditioning the state") {
    // In collapse mode the sub-ensemble that saw psi_up mid-flight behaves
    // like the conditioned branch: recombined and rotated, its spin-x readout
    // is a fair coin.
    const Scenario& recombine = find_scenario("sg-recombine");
    const std::uint64_t n = 50000;
    const RunResult result = run_trials(recombine, MeasurementMode::collapse, n, 17);
    const EnsembleStats upper =
        post_select(recombine, result.records, result.stats, {{"path", "psi_up"}});
    REQUIRE(upper.n_trials > 20000);

    const Ket conditioned = condition_on_outcome(sg_split(sg_prepare()), "path", 1);
    const Ket final_state = rotate_spin_to_x_basis(sg_recombine(conditioned));
    const std::vector<double> predicted = pointer_distribution(final_state, "spin");
    for (std::size_t o = 0; o < predicted.size(); ++o) {
        const double p = predicted[o];
        const double bound = std::max(
            4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(upper.n_trials)), 1e-12);
        CHECK(std::abs(upper.readouts[1].frequencies[o] - p) < bound);
    }

    // In unitary mode, conditioning on the readout itself is a point mass.
    const RunResult unitary = run_trials(recombine, MeasurementMode::unitary, 10000, 19);
    const EnsembleStats upper_unitary =
        post_select(recombine, unitary.records, unitary.stats, {{"path", "psi_up"}});
    CHECK(upper_unitary.readouts[0].frequencies[1] == 1.0);
}
