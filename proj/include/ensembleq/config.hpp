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

#include <bit>
#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ensembleq/measurement.hpp"
#include "ensembleq/scenarios.hpp"
#include "ensembleq/wavepacket.hpp"

namespace ensembleq {

// Experiment config files are plain "key = value" documents: one pair per
// line, '#' starts a comment, blank lines are ignored. Parsing collects every
// error (syntax with line/column, then semantic validation) instead of
// stopping at the first.
//
//   kind       trials | wavepacket | compare   (default trials)
//   scenario   registered scenario id          (required unless wavepacket)
//   mode       unitary | collapse              (default unitary)
//   trials     >= 1                            (default 10000)
//   seed       uint64; falls back to ENSEMBLEQ_SEED, then 1
//   threads    >= 1                            (default 1)
//   out        output path
//   format     json | csv                      (default json)
//   timestamp  true | false                    (default true)
//
// wavepacket keys: sigma0, mass, hbar, p0, time (comma list), time_unit
// (absolute | tau0), grid_points (power of two >= 64), half_width (omit for
// automatic sizing), spectrum_out, stats_out.

enum class ConfigKind { trials, wavepacket, compare };

enum class OutputFormat { json, csv };

struct ExperimentConfig {
    ConfigKind kind = ConfigKind::trials;
    std::string scenario;
    MeasurementMode mode = MeasurementMode::unitary;
    std::uint64_t trials = 10000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out;
    OutputFormat format = OutputFormat::json;
    bool timestamp = true;

    double sigma0 = 1.0;
    double mass = 1.0;
    double hbar = 1.0;
    double p0 = 0.0;
    std::vector<double> times{0.0};
    bool times_in_tau0 = false;
    std::size_t grid_points = 1024;
    std::optional<double> half_width;
    std::string spectrum_out;
    std::string stats_out;

    PacketParams packet_params() const { return PacketParams{sigma0, mass, hbar, p0}; }

    std::vector<double> absolute_times() const {
        std::vector<double> absolute = times;
        if (times_in_tau0) {
            const double tau0 = packet_params().tau0();
            for (double& t : absolute) t *= tau0;
        }
        return absolute;
    }

    // Wide enough for every requested time, with tails below the boundary
    // guard by a comfortable margin.
    GridSpec make_grid() const {
        double half = half_width.value_or(0.0);
        if (!half_width) {
            const PacketParams params = packet_params();
            for (double t : absolute_times()) {
                const double needed =
                    std::abs(params.p0 / params.mass * t) + 12.0 * params.width_at(t);
                half = std::max(half, needed);
            }
            half = std::max(half, 12.0 * params.sigma0);
        }
        return GridSpec::centered(half, grid_points);
    }
};

struct ConfigError {
    std::size_t line = 0;    // 1-based; 0 for document-level errors
    std::size_t column = 0;  // 1-based
    std::string message;
};

struct ConfigParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<ConfigError> errors;
    bool ok() const { return errors.empty(); }
};

inline std::string format_errors(const std::vector<ConfigError>& errors) {
    std::ostringstream out;
    for (const ConfigError& error : errors) {
        out << "config";
        if (error.line > 0) out << ":" << error.line << ":" << error.column;
        out << ": " << error.message << "\n";
    }
    return out.str();
}

// Semantic checks shared by config files and command-line flags. Returns
// every violation, not just the first.
inline std::vector<ConfigError> validate_config(const ExperimentConfig& config,
                                                bool scenario_given = true) {
    std::vector<ConfigError> errors;
    auto fail = [&errors](std::string message) { errors.push_back({0, 0, std::move(message)}); };

    const bool needs_scenario = config.kind != ConfigKind::wavepacket;
    if (needs_scenario) {
        if (!scenario_given || config.scenario.empty()) {
            fail("missing required key 'scenario'");
        } else {
            bool known = false;
            for (const std::string& id : scenario_ids()) known = known || id == config.scenario;
            if (!known) {
                std::string message = "unknown scenario '" + config.scenario + "'; registered:";
                for (const std::string& id : scenario_ids()) message += " " + id;
                fail(std::move(message));
            }
        }
        if (config.trials < 1) fail("'trials' must be at least 1");
    }
    if (config.kind == ConfigKind::wavepacket) {
        if (!(config.sigma0 > 0.0)) fail("'sigma0' must be positive");
        if (!(config.mass > 0.0)) fail("'mass' must be positive");
        if (!(config.hbar > 0.0)) fail("'hbar' must be positive");
        if (config.times.empty()) fail("'time' list is empty");
        if (config.grid_points < 64 || !std::has_single_bit(config.grid_points)) {
            fail("'grid_points' must be a power of two >= 64");
        }
        if (config.half_width && !(*config.half_width > 0.0)) {
            fail("'half_width' must be positive");
        }
    }
    if (config.threads < 1) fail("'threads' must be at least 1");
    return errors;
}

namespace detail {

inline std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    return text;
}

template <typename T>
inline std::optional<T> parse_number(std::string_view text) {
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

}  // namespace detail

inline ConfigParseResult parse_config(std::string_view text) {
    ConfigParseResult result;
    ExperimentConfig config;
    auto fail = [&result](std::size_t line, std::size_t column, std::string message) {
        result.errors.push_back({line, column, std::move(message)});
    };

    bool scenario_given = false;
    std::vector<std::string> seen_keys;
    std::istringstream stream{std::string(text)};
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(stream, raw_line)) {
        ++line_no;
        const std::string_view line = raw_line;
        const std::size_t comment = line.find('#');
        const std::string_view active = detail::trim(line.substr(0, comment));
        if (active.empty()) continue;

        const std::size_t eq = active.find('=');
        if (eq == std::string_view::npos) {
            fail(line_no, 1, "expected 'key = value'");
            continue;
        }
        const std::string_view key = detail::trim(active.substr(0, eq));
        const std::string_view value = detail::trim(active.substr(eq + 1));
        const std::size_t key_col = line.find_first_not_of(" \t") + 1;
        const std::size_t value_col =
            value.empty() ? eq + 2 : static_cast<std::size_t>(value.data() - line.data()) + 1;
        if (key.empty()) {
            fail(line_no, key_col, "missing key before '='");
            continue;
        }
        if (value.empty()) {
            fail(line_no, value_col, "missing value for '" + std::string(key) + "'");
            continue;
        }
        for (const std::string& seen : seen_keys) {
            if (seen == key) fail(line_no, key_col, "duplicate key '" + std::string(key) + "'");
        }
        seen_keys.emplace_back(key);

        auto number_or = [&](auto& target, std::string_view name) {
            using T = std::decay_t<decltype(target)>;
            if (const auto parsed = detail::parse_number<T>(value)) {
                target = *parsed;
            } else {
                fail(line_no, value_col, "invalid number for '" + std::string(name) + "'");
            }
        };

        if (key == "kind") {
            if (value == "trials") config.kind = ConfigKind::trials;
            else if (value == "wavepacket") config.kind = ConfigKind::wavepacket;
            else if (value == "compare") config.kind = ConfigKind::compare;
            else fail(line_no, value_col, "kind must be trials, wavepacket or compare");
        } else if (key == "scenario") {
            config.scenario = std::string(value);
            scenario_given = true;
        } else if (key == "mode") {
            try {
                config.mode = mode_from_string(value);
            } catch (const std::invalid_argument& error) {
                fail(line_no, value_col, error.what());
            }
        } else if (key == "trials") {
            number_or(config.trials, key);
        } else if (key == "seed") {
            std::uint64_t seed = 0;
            if (const auto parsed = detail::parse_number<std::uint64_t>(value)) {
                seed = *parsed;
                config.seed = seed;
            } else {
                fail(line_no, value_col, "invalid number for 'seed'");
            }
        } else if (key == "threads") {
            number_or(config.threads, key);
        } else if (key == "out") {
            config.out = std::string(value);
        } else if (key == "format") {
            if (value == "json") config.format = OutputFormat::json;
            else if (value == "csv") config.format = OutputFormat::csv;
            else fail(line_no, value_col, "format must be json or csv");
        } else if (key == "timestamp") {
            if (value == "true") config.timestamp = true;
            else if (value == "false") config.timestamp = false;
            else fail(line_no, value_col, "timestamp must be true or false");
        } else if (key == "sigma0") {
            number_or(config.sigma0, key);
        } else if (key == "mass") {
            number_or(config.mass, key);
        } else if (key == "hbar") {
            number_or(config.hbar, key);
        } else if (key == "p0") {
            number_or(config.p0, key);
        } else if (key == "time") {
            config.times.clear();
            std::size_t offset = 0;
            std::string_view rest = value;
            bool bad = false;
            while (!rest.empty()) {
                const std::size_t comma = rest.find(',');
                const std::string_view item = detail::trim(rest.substr(0, comma));
                if (const auto parsed = detail::parse_number<double>(item)) {
                    config.times.push_back(*parsed);
                } else {
                    fail(line_no, value_col + offset, "invalid number in 'time' list");
                    bad = true;
                }
                if (comma == std::string_view::npos) break;
                offset += comma + 1;
                rest = rest.substr(comma + 1);
            }
            if (!bad && config.times.empty()) fail(line_no, value_col, "'time' list is empty");
        } else if (key == "time_unit") {
            if (value == "absolute") config.times_in_tau0 = false;
            else if (value == "tau0") config.times_in_tau0 = true;
            else fail(line_no, value_col, "time_unit must be absolute or tau0");
        } else if (key == "grid_points") {
            number_or(config.grid_points, key);
        } else if (key == "half_width") {
            double width = 0.0;
            if (const auto parsed = detail::parse_number<double>(value)) {
                width = *parsed;
                config.half_width = width;
            } else {
                fail(line_no, value_col, "invalid number for 'half_width'");
            }
        } else if (key == "spectrum_out") {
            config.spectrum_out = std::string(value);
        } else if (key == "stats_out") {
            config.stats_out = std::string(value);
        } else {
            fail(line_no, key_col, "unknown key '" + std::string(key) + "'");
        }
    }

    // Semantic validation, independent of line positions.
    for (ConfigError& error : validate_config(config, scenario_given)) {
        result.errors.push_back(std::move(error));
    }

    if (result.errors.empty()) result.config = std::move(config);
    return result;
}

}  // namespace ensembleq
