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

// Batch front end. Subcommands:
//   list-scenarios                      print registered scenario ids
//   run        --config FILE | --scenario ... --out FILE
//   wavepacket --sigma0 ... --out FILE
//   compare    --scenario ... --out FILE
//
// Exit codes: 0 success, 1 runtime error, 2 usage error, 3 validation error.
// Results go only to the requested output paths; nothing is written on error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ensembleq/ensembleq.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& explicit_seed) {
    if (explicit_seed) return *explicit_seed;
    if (const char* env = std::getenv("ENSEMBLEQ_SEED")) {
        const auto parsed = ensembleq::detail::parse_number<std::uint64_t>(env);
        if (!parsed) {
            throw ValidationError("ENSEMBLEQ_SEED is set but is not an unsigned integer");
        }
        return *parsed;
    }
    return 1;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void require_valid(const ensembleq::ExperimentConfig& config, bool scenario_given) {
    const std::vector<ensembleq::ConfigError> errors =
        ensembleq::validate_config(config, scenario_given);
    if (!errors.empty()) throw ValidationError(ensembleq::format_errors(errors));
}

void run_experiment(const ensembleq::ExperimentConfig& config) {
    using namespace ensembleq;
    if (config.kind != ConfigKind::wavepacket && config.out.empty()) {
        throw ValidationError("no output path given (--out or 'out')");
    }
    const std::uint64_t seed = resolve_seed(config.seed);

    if (config.kind == ConfigKind::trials) {
        const Scenario& scenario = find_scenario(config.scenario);
        const RunResult result =
            run_trials(scenario, config.mode, config.trials, seed, config.threads);
        const ExactDistributions exact = exact_readout_distributions(scenario, config.mode);
        if (config.format == OutputFormat::csv) {
            write_text_file(config.out, stats_csv(result.stats));
        } else {
            write_text_file(config.out,
                            trials_report(result.stats, &exact, config.timestamp).dump(2) + "\n");
        }
        return;
    }

    if (config.kind == ConfigKind::compare) {
        const ModeComparison comparison =
            compare_modes(config.scenario, config.trials, seed, config.threads);
        write_text_file(config.out, compare_report(comparison, config.timestamp).dump(2) + "\n");
        return;
    }

    // wavepacket
    const PacketParams params = config.packet_params();
    const std::vector<double> times = config.absolute_times();
    const GridSpec grid = config.make_grid();
    if (config.out.empty() && config.stats_out.empty()) {
        throw ValidationError("wavepacket runs need --out and/or --stats-out");
    }
    if (times.size() != 1 && (!config.out.empty() || !config.spectrum_out.empty())) {
        throw ValidationError(
            "curve output needs exactly one time; use stats_out for multi-time sweeps");
    }
    // Build everything before writing anything.
    std::optional<std::string> density_doc, spectrum_doc;
    if (!config.out.empty() || !config.spectrum_out.empty()) {
        const WaveGrid packet = gaussian_packet(params, times.front(), grid);
        if (!config.out.empty()) density_doc = wave_csv(packet);
        if (!config.spectrum_out.empty()) spectrum_doc = spectrum_csv(fourier_decompose(packet));
    }
    std::optional<std::string> stats_doc;
    if (!config.stats_out.empty()) {
        stats_doc = wavepacket_report(params, grid, times, config.timestamp).dump(2) + "\n";
    }
    if (density_doc) write_text_file(config.out, *density_doc);
    if (spectrum_doc) write_text_file(config.spectrum_out, *spectrum_doc);
    if (stats_doc) write_text_file(config.stats_out, *stats_doc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ensembleq — measurement statistics for entangling (no-collapse) and "
                 "orthodox readout models"};
    app.require_subcommand(1);

    CLI::App* list_cmd = app.add_subcommand("list-scenarios", "Print registered scenario ids");

    // run
    CLI::App* run_cmd = app.add_subcommand("run", "Run seeded trials of a scenario");
    std::string run_config_path;
    ensembleq::ExperimentConfig run_flags;
    std::optional<std::uint64_t> run_seed;
    std::string run_mode = "unitary";
    std::string run_format = "json";
    bool run_no_timestamp = false;
    CLI::Option* config_opt = run_cmd->add_option("--config", run_config_path,
                                                  "Experiment config file (key = value lines)");
    CLI::Option* scenario_opt =
        run_cmd->add_option("--scenario", run_flags.scenario, "Registered scenario id");
    run_cmd->add_option("--mode", run_mode, "unitary | collapse");
    run_cmd->add_option("--trials", run_flags.trials, "Number of trials");
    run_cmd->add_option("--seed", run_seed, "Master seed (fallback: ENSEMBLEQ_SEED, then 1)");
    run_cmd->add_option("--threads", run_flags.threads, "Worker threads");
    run_cmd->add_option("--out", run_flags.out, "Result file path");
    run_cmd->add_option("--format", run_format, "json | csv");
    run_cmd->add_flag("--no-timestamp", run_no_timestamp,
                      "Omit the timestamp field for byte-stable output");
    config_opt->excludes(scenario_opt);

    // wavepacket
    CLI::App* wave_cmd =
        app.add_subcommand("wavepacket", "Emit a Gaussian packet density/spectrum as CSV");
    ensembleq::ExperimentConfig wave_flags;
    wave_flags.kind = ensembleq::ConfigKind::wavepacket;
    double wave_time = 0.0;
    bool wave_time_in_tau0 = false;
    bool wave_no_timestamp = false;
    wave_cmd->add_option("--sigma0", wave_flags.sigma0, "Initial position spread");
    wave_cmd->add_option("--mass", wave_flags.mass, "Particle mass");
    wave_cmd->add_option("--hbar", wave_flags.hbar, "Reduced Planck constant");
    wave_cmd->add_option("--p0", wave_flags.p0, "Mean momentum");
    wave_cmd->add_option("--time", wave_time, "Evolution time");
    wave_cmd->add_flag("--time-in-tau0", wave_time_in_tau0,
                       "Interpret --time in units of the spreading time tau0");
    wave_cmd->add_option("--grid-points", wave_flags.grid_points, "Grid size (power of two >= 64)");
    double wave_half_width = 0.0;
    CLI::Option* half_width_opt = wave_cmd->add_option(
        "--half-width", wave_half_width, "Grid half-width (default: sized from the packet)");
    wave_cmd->add_option("--out", wave_flags.out, "Density CSV path");
    wave_cmd->add_option("--spectrum-out", wave_flags.spectrum_out, "Spectrum CSV path");
    wave_cmd->add_option("--stats-out", wave_flags.stats_out, "Moments report (JSON) path");
    wave_cmd->add_flag("--no-timestamp", wave_no_timestamp, "Omit the timestamp field");

    // compare
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "Contrast unitary and collapse modes on one scenario");
    ensembleq::ExperimentConfig compare_flags;
    compare_flags.kind = ensembleq::ConfigKind::compare;
    std::optional<std::uint64_t> compare_seed;
    bool compare_no_timestamp = false;
    compare_cmd->add_option("--scenario", compare_flags.scenario, "Registered scenario id")
        ->required();
    compare_cmd->add_option("--trials", compare_flags.trials, "Trials per mode");
    compare_cmd->add_option("--seed", compare_seed, "Master seed");
    compare_cmd->add_option("--threads", compare_flags.threads, "Worker threads");
    compare_cmd->add_option("--out", compare_flags.out, "Result file path")->required();
    compare_cmd->add_flag("--no-timestamp", compare_no_timestamp, "Omit the timestamp field");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (list_cmd->parsed()) {
            for (const ensembleq::Scenario& scenario : ensembleq::scenario_registry()) {
                std::cout << scenario.id << "\t" << scenario.title << "\n";
            }
            return 0;
        }
        if (run_cmd->parsed()) {
            ensembleq::ExperimentConfig config;
            bool scenario_given;
            if (!run_config_path.empty()) {
                const ensembleq::ConfigParseResult parsed =
                    ensembleq::parse_config(read_file(run_config_path));
                if (!parsed.ok()) throw ValidationError(ensembleq::format_errors(parsed.errors));
                config = *parsed.config;
                scenario_given = true;
                // Flags that still make sense alongside --config act as overrides.
                if (run_cmd->count("--out") > 0) config.out = run_flags.out;
                if (run_seed) config.seed = run_seed;
                if (run_no_timestamp) config.timestamp = false;
            } else {
                config = run_flags;
                config.kind = ensembleq::ConfigKind::trials;
                config.mode = ensembleq::mode_from_string(run_mode);
                if (run_format == "json") config.format = ensembleq::OutputFormat::json;
                else if (run_format == "csv") config.format = ensembleq::OutputFormat::csv;
                else throw ValidationError("--format must be json or csv");
                config.seed = run_seed;
                config.timestamp = !run_no_timestamp;
                scenario_given = scenario_opt->count() > 0;
            }
            require_valid(config, scenario_given);
            run_experiment(config);
            return 0;
        }
        if (wave_cmd->parsed()) {
            wave_flags.times = {wave_time};
            wave_flags.times_in_tau0 = wave_time_in_tau0;
            wave_flags.timestamp = !wave_no_timestamp;
            if (half_width_opt->count() > 0) wave_flags.half_width = wave_half_width;
            require_valid(wave_flags, false);
            run_experiment(wave_flags);
            return 0;
        }
        if (compare_cmd->parsed()) {
            compare_flags.seed = compare_seed;
            compare_flags.timestamp = !compare_no_timestamp;
            require_valid(compare_flags, true);
            run_experiment(compare_flags);
            return 0;
        }
    } catch (const ValidationError& error) {
        std::cerr << "ensembleq: " << error.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& error) {
        std::cerr << "ensembleq: " << error.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& error) {
        std::cerr << "ensembleq: " << error.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
