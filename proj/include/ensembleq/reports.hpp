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

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensembleq/ensemble.hpp"
#include "ensembleq/scenarios.hpp"
#include "ensembleq/wavepacket.hpp"

namespace ensembleq {

// Result-document builders. Key order is fixed (nlohmann ordered_json) and
// doubles use shortest round-trip formatting, so a given run always produces
// the same bytes; the timestamp is the only run-dependent field and every
// builder can omit it.

using json = nlohmann::ordered_json;

inline std::string iso8601_utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02dZ", utc.tm_year + 1900,
                  utc.tm_mon + 1, utc.tm_mday, utc.tm_hour, utc.tm_min, utc.tm_sec);
    return buffer;
}

namespace detail {

inline json readout_block(const ReadoutStats& stats) {
    json block;
    block["counts"] = stats.counts;
    block["frequencies"] = stats.frequencies;
    block["stderr"] = stats.stderrs;
    return block;
}

}  // namespace detail

// Schema "ensembleq/trials/v1": one sampled run of one scenario in one mode,
// with the exact predicted distribution alongside each readout.
inline json trials_report(const EnsembleStats& stats, const ExactDistributions* exact = nullptr,
                          bool with_timestamp = true) {
    json doc;
    doc["schema"] = "ensembleq/trials/v1";
    doc["scenario"] = stats.scenario;
    doc["mode"] = std::string(to_string(stats.mode));
    doc["n_trials"] = stats.n_trials;
    doc["master_seed"] = stats.master_seed;
    if (!stats.selection.empty() || stats.empty_selection) {
        doc["selection"] = stats.selection;
        doc["parent"] = stats.parent;
        doc["empty_selection"] = stats.empty_selection;
    }
    if (with_timestamp) doc["timestamp"] = iso8601_utc_now();
    doc["readouts"] = json::array();
    for (std::size_t r = 0; r < stats.readouts.size(); ++r) {
        const ReadoutStats& readout = stats.readouts[r];
        json block;
        block["name"] = readout.name;
        block["register"] = readout.reg;
        block["outcomes"] = readout.outcome_names;
        block.update(detail::readout_block(readout));
        if (exact != nullptr && r < exact->probabilities.size()) {
            block["exact"] = exact->probabilities[r];
        }
        doc["readouts"].push_back(std::move(block));
    }
    return doc;
}

// Schema "ensembleq/compare/v1": sampled and exact tables for both modes plus
// the divergence verdict.
inline json compare_report(const ModeComparison& comparison, bool with_timestamp = true) {
    json doc;
    doc["schema"] = "ensembleq/compare/v1";
    doc["scenario"] = comparison.scenario;
    doc["n_trials"] = comparison.n_trials;
    doc["master_seed"] = comparison.master_seed;
    if (with_timestamp) doc["timestamp"] = iso8601_utc_now();
    doc["readouts"] = json::array();
    for (std::size_t r = 0; r < comparison.unitary_stats.readouts.size(); ++r) {
        const ReadoutStats& unitary = comparison.unitary_stats.readouts[r];
        const ReadoutStats& collapse = comparison.collapse_stats.readouts[r];
        json block;
        block["name"] = unitary.name;
        block["register"] = unitary.reg;
        block["outcomes"] = unitary.outcome_names;
        block["unitary"] = detail::readout_block(unitary);
        block["unitary"]["exact"] = comparison.unitary_exact.probabilities[r];
        block["collapse"] = detail::readout_block(collapse);
        block["collapse"]["exact"] = comparison.collapse_exact.probabilities[r];
        double gap = 0.0;
        for (std::size_t o = 0; o < unitary.outcome_names.size(); ++o) {
            gap = std::max(gap, std::abs(comparison.unitary_exact.probabilities[r][o] -
                                         comparison.collapse_exact.probabilities[r][o]));
        }
        block["max_exact_gap"] = gap;
        block["diverges"] = gap > kModeDivergenceTol;
        doc["readouts"].push_back(std::move(block));
    }
    doc["divergence"] = comparison.divergence;
    doc["diverging_readouts"] = comparison.diverging_readouts;
    return doc;
}

inline json scenario_report_json(const ScenarioReport& report, bool with_timestamp = true) {
    json doc;
    doc["schema"] = "ensembleq/scenario/v1";
    doc["scenario"] = report.scenario;
    doc["mode"] = report.mode;
    doc["seed"] = report.seed;
    if (with_timestamp) doc["timestamp"] = iso8601_utc_now();
    doc["distributions"] = json::array();
    for (const NamedDistribution& dist : report.distributions) {
        json block;
        block["name"] = dist.name;
        block["outcomes"] = dist.outcomes;
        block["probabilities"] = dist.probabilities;
        doc["distributions"].push_back(std::move(block));
    }
    doc["metrics"] = json::object();
    for (const NamedMetric& metric : report.metrics) doc["metrics"][metric.name] = metric.value;
    doc["reduced_operators"] = json::object();
    for (const auto& [name, matrix] : report.reduced_operators) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
                row.push_back(json::array({matrix(i, j).real(), matrix(i, j).imag()}));
            }
            rows.push_back(std::move(row));
        }
        doc["reduced_operators"][name] = std::move(rows);
    }
    return doc;
}

// Schema "ensembleq/wavepacket/v1": per-time position and velocity moments.
// velocity.std is the Born-weighted spectral width hbar/(2 m sigma0) for a
// Gaussian packet; "velocity_std_alt" records the value hbar/(m sigma0) used
// by an alternative width convention, and "velocity_convention_gap" flags
// that the two deliberately disagree rather than silently picking one.
inline json wavepacket_report(const PacketParams& params, const GridSpec& grid,
                              const std::vector<double>& times, bool with_timestamp = true) {
    params.validate();
    json doc;
    doc["schema"] = "ensembleq/wavepacket/v1";
    doc["params"]["sigma0"] = params.sigma0;
    doc["params"]["mass"] = params.mass;
    doc["params"]["hbar"] = params.hbar;
    doc["params"]["p0"] = params.p0;
    doc["params"]["tau0"] = params.tau0();
    doc["grid"]["x_min"] = grid.x_min();
    doc["grid"]["x_max"] = grid.x_max();
    doc["grid"]["n_points"] = grid.n_points();
    doc["grid"]["dx"] = grid.dx();
    if (with_timestamp) doc["timestamp"] = iso8601_utc_now();

    const double sigma_v_born = params.hbar / (2.0 * params.mass * params.sigma0);
    const double sigma_v_alt = params.hbar / (params.mass * params.sigma0);
    doc["times"] = json::array();
    for (double t : times) {
        const WaveGrid packet = gaussian_packet(params, t, grid);
        const SpectrumGrid spectrum = fourier_decompose(packet);
        const PositionStats position = position_stats(packet);
        const VelocityStats velocity = velocity_stats(spectrum);
        const double k0 = params.p0 / params.hbar;
        const double sigma0 = params.sigma0;
        json block;
        block["t"] = t;
        block["t_over_tau0"] = t / params.tau0();
        block["position"]["mean"] = position.mean;
        block["position"]["std"] = position.std;
        block["position"]["norm"] = position.norm;
        block["position"]["std_predicted"] = params.width_at(t);
        block["velocity"]["mean"] = velocity.mean;
        block["velocity"]["std"] = velocity.std;
        block["velocity"]["std_predicted"] = sigma_v_born;
        block["velocity"]["std_alt"] = sigma_v_alt;
        block["velocity"]["convention_gap"] =
            std::abs(sigma_v_alt - sigma_v_born) > 1e-12 * sigma_v_born;
        block["spectrum"]["parseval_gap"] = parseval_gap(packet, spectrum);
        block["spectrum"]["shape_rms_rel"] =
            spectrum_shape_rms_rel(spectrum, [k0, sigma0](double k) {
                const double d = k - k0;
                return std::exp(-d * d * sigma0 * sigma0);
            });
        doc["times"].push_back(std::move(block));
    }
    return doc;
}

// CSV with the frozen column order "x,re,im,abs2".
inline std::string wave_csv(const WaveGrid& w) {
    std::ostringstream out;
    out.precision(17);
    out << "x,re,im,abs2\n";
    for (std::size_t i = 0; i < w.grid.n_points(); ++i) {
        const Complex amp = w.psi(static_cast<Eigen::Index>(i));
        out << w.grid.x(i) << "," << amp.real() << "," << amp.imag() << "," << std::norm(amp)
            << "\n";
    }
    return out.str();
}

// CSV with the frozen column order "k,re,im,abs2".
inline std::string spectrum_csv(const SpectrumGrid& s) {
    std::ostringstream out;
    out.precision(17);
    out << "k,re,im,abs2\n";
    for (std::size_t j = 0; j < s.k.size(); ++j) {
        const Complex amp = s.f(static_cast<Eigen::Index>(j));
        out << s.k[j] << "," << amp.real() << "," << amp.imag() << "," << std::norm(amp) << "\n";
    }
    return out.str();
}

// CSV with the frozen column order "readout,outcome,count,frequency,stderr".
inline std::string stats_csv(const EnsembleStats& stats) {
    std::ostringstream out;
    out.precision(17);
    out << "readout,outcome,count,frequency,stderr\n";
    for (const ReadoutStats& readout : stats.readouts) {
        for (std::size_t o = 0; o < readout.outcome_names.size(); ++o) {
            out << readout.name << "," << readout.outcome_names[o] << "," << readout.counts[o]
                << "," << readout.frequencies[o] << "," << readout.stderrs[o] << "\n";
        }
    }
    return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

}  // namespace ensembleq
