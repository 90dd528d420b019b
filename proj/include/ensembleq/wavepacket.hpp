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
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ensembleq/random.hpp"

namespace ensembleq {

using Complex = std::complex<double>;

// Free-particle states sampled on a uniform periodic 1-D grid. Conventions:
//
//   forward transform   f(k) = (1/sqrt(2*pi)) * integral psi(x) e^{-ikx} dx
//   inverse transform   psi(x) = (1/sqrt(2*pi)) * integral f(k) e^{+ikx} dk
//
// discretized with dx * sum over grid points, which makes Parseval exact:
// sum |f|^2 dk = sum |psi|^2 dx. Free evolution multiplies each k-mode by
// e^{-i hbar k^2 dt / (2m)}.

struct PacketParams {
    double sigma0 = 1.0;  // initial position spread
    double mass = 1.0;
    double hbar = 1.0;
    double p0 = 0.0;  // mean momentum

    // Timescale on which the packet doubles its variance.
    double tau0() const { return 2.0 * mass * sigma0 * sigma0 / hbar; }

    // Position spread after free flight: sigma0 * sqrt(1 + (t/tau0)^2).
    double width_at(double t) const {
        const double ratio = t / tau0();
        return sigma0 * std::sqrt(1.0 + ratio * ratio);
    }

    void validate() const {
        if (!(sigma0 > 0.0)) throw std::invalid_argument("PacketParams: sigma0 must be positive");
        if (!(mass > 0.0)) throw std::invalid_argument("PacketParams: mass must be positive");
        if (!(hbar > 0.0)) throw std::invalid_argument("PacketParams: hbar must be positive");
    }
};

class GridSpec {
  public:
    GridSpec(double x_min, double x_max, std::size_t n_points)
        : x_min_(x_min), x_max_(x_max), n_(n_points) {
        if (!(x_max_ > x_min_)) throw std::invalid_argument("GridSpec: x_max must exceed x_min");
        if (n_ < 64 || !std::has_single_bit(n_)) {
            throw std::invalid_argument("GridSpec: n_points must be a power of two >= 64");
        }
    }

    static GridSpec centered(double half_width, std::size_t n_points) {
        return GridSpec(-half_width, half_width, n_points);
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t n_points() const { return n_; }
    double dx() const { return (x_max_ - x_min_) / static_cast<double>(n_); }
    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx(); }
    double dk() const { return 2.0 * std::numbers::pi / (x_max_ - x_min_); }
    double k_nyquist() const { return std::numbers::pi / dx(); }

    // Signed wavenumber of FFT bin j (bins above n/2 wrap to negative k).
    double signed_k(std::size_t j) const {
        const auto half = n_ / 2;
        const double offset = j < half ? static_cast<double>(j)
                                       : static_cast<double>(j) - static_cast<double>(n_);
        return offset * dk();
    }

    // The grid must keep the packet's tails below 1e-8 of its peak at both
    // boundaries, and the packet's momentum within the Nyquist band.
    void require_packet_fits(const PacketParams& params, double t) const {
        params.validate();
        const double width = params.width_at(t);
        const double center = params.p0 / params.mass * t;
        const double margin = std::min(center - x_min_, x_max_ - center);
        if (!(margin > 0.0)) {
            throw std::invalid_argument("GridSpec: packet center has left the grid");
        }
        // |psi| envelope is exp(-(x-center)^2 / (4 width^2)).
        const double boundary_ratio = std::exp(-margin * margin / (4.0 * width * width));
        if (boundary_ratio > 1e-8) {
            throw std::invalid_argument(
                "GridSpec: grid too narrow, boundary amplitude exceeds 1e-8 of the peak");
        }
        if (std::abs(params.p0 / params.hbar) >= k_nyquist()) {
            throw std::invalid_argument("GridSpec: packet momentum exceeds the Nyquist band");
        }
    }

    bool operator==(const GridSpec& other) const {
        return x_min_ == other.x_min_ && x_max_ == other.x_max_ && n_ == other.n_;
    }

  private:
    double x_min_;
    double x_max_;
    std::size_t n_;
};

struct WaveGrid {
    GridSpec grid;
    Eigen::VectorXcd psi;
    double hbar = 1.0;
    double mass = 1.0;
    double t = 0.0;
};

struct SpectrumGrid {
    GridSpec grid;           // originating position grid
    std::vector<double> k;   // ascending wavenumbers
    Eigen::VectorXcd f;      // amplitudes, aligned with k
    double hbar = 1.0;
    double mass = 1.0;
    double t = 0.0;
};

inline double norm_squared(const WaveGrid& w) { return w.psi.squaredNorm() * w.grid.dx(); }

inline double norm_squared(const SpectrumGrid& s) { return s.f.squaredNorm() * s.grid.dk(); }

// Box-normalized momentum eigenstate e^{ipx/hbar} / sqrt(L).
inline WaveGrid plane_wave(double momentum, const GridSpec& grid, double hbar = 1.0,
                           double mass = 1.0) {
    if (!(hbar > 0.0) || !(mass > 0.0)) {
        throw std::invalid_argument("plane_wave: hbar and mass must be positive");
    }
    const double k = momentum / hbar;
    if (std::abs(k) >= grid.k_nyquist()) {
        throw std::invalid_argument("plane_wave: wavenumber exceeds the grid's Nyquist band");
    }
    const double box = std::sqrt(grid.x_max() - grid.x_min());
    Eigen::VectorXcd psi(static_cast<Eigen::Index>(grid.n_points()));
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        psi(static_cast<Eigen::Index>(i)) =
            std::exp(Complex{0.0, k * grid.x(i)}) / box;
    }
    return WaveGrid{grid, std::move(psi), hbar, mass, 0.0};
}

// Spreading Gaussian with complex width sigma(t) = sigma0 sqrt(1 + i t/tau0):
//
//   psi(x, t) = sqrt(sigma0) / ((2 pi)^{1/4} sigma(t))
//             * exp(-(x - v0 t)^2 / (4 sigma(t)^2))
//             * exp(i (p0 x - p0^2 t / (2m)) / hbar)
//
// exactly unit-normalized for every t; |psi|^2 is a Gaussian density of
// standard deviation sigma0 sqrt(1 + (t/tau0)^2) centered at v0 t.
inline WaveGrid gaussian_packet(const PacketParams& params, double t, const GridSpec& grid) {
    grid.require_packet_fits(params, t);
    const double tau0 = params.tau0();
    const Complex sigma_t = params.sigma0 * std::sqrt(Complex{1.0, t / tau0});
    const Complex prefactor =
        std::sqrt(params.sigma0) / (std::pow(2.0 * std::numbers::pi, 0.25) * sigma_t);
    const double v0 = params.p0 / params.mass;
    const double phase_rate = params.p0 * params.p0 * t / (2.0 * params.mass * params.hbar);
    Eigen::VectorXcd psi(static_cast<Eigen::Index>(grid.n_points()));
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        const double x = grid.x(i);
        const double xc = x - v0 * t;
        const Complex envelope = std::exp(-xc * xc / (4.0 * sigma_t * sigma_t));
        const Complex boost = std::exp(Complex{0.0, params.p0 * x / params.hbar - phase_rate});
        psi(static_cast<Eigen::Index>(i)) = prefactor * envelope * boost;
    }
    return WaveGrid{grid, std::move(psi), params.hbar, params.mass, t};
}

// DFT with the e^{-ikx} forward kernel, returned with ascending wavenumbers.
inline SpectrumGrid fourier_decompose(const WaveGrid& w) {
    const std::size_t n = w.grid.n_points();
    Eigen::FFT<double> fft;
    Eigen::VectorXcd raw(static_cast<Eigen::Index>(n));
    Eigen::VectorXcd input = w.psi;
    fft.fwd(raw, input);

    const double scale = w.grid.dx() / std::sqrt(2.0 * std::numbers::pi);
    SpectrumGrid s{w.grid, std::vector<double>(n), Eigen::VectorXcd(static_cast<Eigen::Index>(n)),
                   w.hbar, w.mass, w.t};
    // Reorder to ascending k and absorb the grid-origin phase e^{-ik x_min}.
    const std::size_t half = n / 2;
    for (std::size_t out = 0; out < n; ++out) {
        const std::size_t j = (out + half) % n;  // FFT bin feeding slot `out`
        const double k = w.grid.signed_k(j);
        s.k[out] = k;
        s.f(static_cast<Eigen::Index>(out)) =
            scale * std::exp(Complex{0.0, -k * w.grid.x_min()}) * raw(static_cast<Eigen::Index>(j));
    }
    return s;
}

// Inverse of fourier_decompose.
inline WaveGrid fourier_synthesize(const SpectrumGrid& s) {
    const std::size_t n = s.grid.n_points();
    const double scale = s.grid.dx() / std::sqrt(2.0 * std::numbers::pi);
    Eigen::VectorXcd raw(static_cast<Eigen::Index>(n));
    const std::size_t half = n / 2;
    for (std::size_t out = 0; out < n; ++out) {
        const std::size_t j = (out + half) % n;
        raw(static_cast<Eigen::Index>(j)) =
            s.f(static_cast<Eigen::Index>(out)) *
            std::exp(Complex{0.0, s.k[out] * s.grid.x_min()}) / scale;
    }
    Eigen::FFT<double> fft;
    Eigen::VectorXcd psi(static_cast<Eigen::Index>(n));
    fft.inv(psi, raw);
    return WaveGrid{s.grid, std::move(psi), s.hbar, s.mass, s.t};
}

// Spectral free propagation: every k-mode picks up e^{-i hbar k^2 dt / (2m)}.
// Unitary, so the grid norm is conserved exactly up to rounding.
inline WaveGrid evolve_free(const WaveGrid& w, double dt) {
    const std::size_t n = w.grid.n_points();
    Eigen::FFT<double> fft;
    Eigen::VectorXcd modes(static_cast<Eigen::Index>(n));
    Eigen::VectorXcd input = w.psi;
    fft.fwd(modes, input);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = w.grid.signed_k(j);
        modes(static_cast<Eigen::Index>(j)) *=
            std::exp(Complex{0.0, -w.hbar * k * k * dt / (2.0 * w.mass)});
    }
    Eigen::VectorXcd psi(static_cast<Eigen::Index>(n));
    fft.inv(psi, modes);
    return WaveGrid{w.grid, std::move(psi), w.hbar, w.mass, w.t + dt};
}

struct PositionStats {
    double mean = 0.0;
    double std = 0.0;
    double norm = 0.0;  // integral of |psi|^2
};

// Moments of the Born density |psi(x)|^2 dx by direct quadrature.
inline PositionStats position_stats(const WaveGrid& w) {
    const double dx = w.grid.dx();
    double norm = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < w.grid.n_points(); ++i) {
        const double p = std::norm(w.psi(static_cast<Eigen::Index>(i))) * dx;
        norm += p;
        mean += w.grid.x(i) * p;
    }
    mean /= norm;
    double var = 0.0;
    for (std::size_t i = 0; i < w.grid.n_points(); ++i) {
        const double p = std::norm(w.psi(static_cast<Eigen::Index>(i))) * dx;
        const double d = w.grid.x(i) - mean;
        var += d * d * p;
    }
    return PositionStats{mean, std::sqrt(var / norm), norm};
}

struct VelocityStats {
    double mean = 0.0;
    double std = 0.0;
};

// Moments of the spectral Born density |f(k)|^2 dk, mapped through v = hbar k / m.
inline VelocityStats velocity_stats(const SpectrumGrid& s) {
    double norm = 0.0, mean_k = 0.0;
    for (std::size_t j = 0; j < s.k.size(); ++j) {
        const double p = std::norm(s.f(static_cast<Eigen::Index>(j)));
        norm += p;
        mean_k += s.k[j] * p;
    }
    mean_k /= norm;
    double var_k = 0.0;
    for (std::size_t j = 0; j < s.k.size(); ++j) {
        const double p = std::norm(s.f(static_cast<Eigen::Index>(j)));
        const double d = s.k[j] - mean_k;
        var_k += d * d * p;
    }
    const double scale = s.hbar / s.mass;
    return VelocityStats{scale * mean_k, scale * std::sqrt(var_k / norm)};
}

// Inverse-CDF draws from the discrete |psi|^2 dx distribution; reproducible
// for a given seed, returned as grid positions.
inline std::vector<double> sample_position(const WaveGrid& w, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_position: need at least one draw");
    const std::size_t bins = w.grid.n_points();
    std::vector<double> cumulative(bins);
    double acc = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        acc += std::norm(w.psi(static_cast<Eigen::Index>(i)));
        cumulative[i] = acc;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("sample_position: empty density");
    RandomStream rng(seed);
    std::vector<double> samples;
    samples.reserve(n);
    for (std::size_t draw = 0; draw < n; ++draw) {
        const double u = rng.next_double() * acc;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t bin = it == cumulative.end()
                                    ? bins - 1
                                    : static_cast<std::size_t>(it - cumulative.begin());
        samples.push_back(w.grid.x(bin));
    }
    return samples;
}

// |<a|b>|^2 with the grid inner product, normalized so equal states give 1.
inline double grid_fidelity(const WaveGrid& a, const WaveGrid& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("grid_fidelity: grid mismatch");
    const Complex overlap = a.psi.dot(b.psi);
    return std::norm(overlap) / (a.psi.squaredNorm() * b.psi.squaredNorm());
}

// sum |f|^2 dk - sum |psi|^2 dx; zero up to rounding for a matched pair.
inline double parseval_gap(const WaveGrid& w, const SpectrumGrid& s) {
    return norm_squared(s) - norm_squared(w);
}

// L2-relative deviation between the peak-normalized |f(k)| and a reference
// shape, over bins where the reference is at least `floor`:
// ||f_norm - shape||_2 / ||shape||_2.
inline double spectrum_shape_rms_rel(const SpectrumGrid& s,
                                     const std::function<double(double)>& shape,
                                     double floor = 1e-12) {
    const double peak = s.f.cwiseAbs().maxCoeff();
    if (!(peak > 0.0)) throw std::invalid_argument("spectrum_shape_rms_rel: empty spectrum");
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < s.k.size(); ++j) {
        const double reference = shape(s.k[j]);
        if (reference < floor) continue;
        const double observed = std::abs(s.f(static_cast<Eigen::Index>(j))) / peak;
        num += (observed - reference) * (observed - reference);
        den += reference * reference;
    }
    if (!(den > 0.0)) throw std::invalid_argument("spectrum_shape_rms_rel: reference vanishes");
    return std::sqrt(num / den);
}

}  // namespace ensembleq
