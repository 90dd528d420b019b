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
#include <complex>
#include <set>

#include "ensembleq/space_layout.hpp"
#include "ensembleq/states.hpp"
#include "oracles.hpp"

using namespace ensembleq;
using Catch::Approx;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("layout rejects invalid subsystems") {
    CHECK_THROWS_AS(SpaceLayout({{"a", 1}}), std::invalid_argument);
    CHECK_THROWS_AS(SpaceLayout({{"a", 0}}), std::invalid_argument);
    CHECK_THROWS_AS(SpaceLayout({{"a", 2}, {"a", 3}}), std::invalid_argument);
    CHECK_THROWS_AS(SpaceLayout({{"", 2}}), std::invalid_argument);
}

TEST_CASE("layout index arithmetic puts the first subsystem most significant") {
    const SpaceLayout layout({{"spin", 2}, {"path", 3}});
    CHECK(layout.total_dim() == 6);
    const std::vector<std::size_t> digits = {1, 2};
    CHECK(layout.encode(digits) == 5);
    CHECK(layout.decode(5) == digits);
    CHECK(layout.stride_of(0) == 3);
    CHECK(layout.stride_of(1) == 1);
    CHECK_THROWS_AS(layout.position_of("nope"), std::out_of_range);
}

TEST_CASE("encode/decode is bijective for every layout up to dimension 64") {
    const std::vector<SpaceLayout> layouts = {
        SpaceLayout({{"a", 2}}),
        SpaceLayout({{"a", 2}, {"b", 2}}),
        SpaceLayout({{"a", 4}, {"b", 3}, {"c", 5}}),
        SpaceLayout({{"a", 2}, {"b", 2}, {"c", 2}, {"d", 2}, {"e", 2}, {"f", 2}}),
        SpaceLayout({{"a", 8}, {"b", 8}}),
    };
    for (const SpaceLayout& layout : layouts) {
        REQUIRE(layout.total_dim() <= 64);
        std::set<std::size_t> seen;
        for_each_index(layout, [&](std::size_t index, std::span<const std::size_t> digits) {
            CHECK(layout.encode(digits) == index);
            const auto decoded = layout.decode(index);
            CHECK(std::equal(decoded.begin(), decoded.end(), digits.begin()));
            seen.insert(index);
        });
        CHECK(seen.size() == layout.total_dim());
        CHECK(*seen.rbegin() == layout.total_dim() - 1);
    }
}

TEST_CASE("basis_ket places unit amplitude at the encoded index") {
    const SpaceLayout spin_only({{"spin", 2}});
    const Ket up = basis_ket(spin_only, {{"spin", 0}});
    CHECK(up.amplitude(0) == Complex{1.0, 0.0});
    CHECK(up.amplitude(1) == Complex{0.0, 0.0});

    const SpaceLayout layout({{"spin", 2}, {"path", 3}});
    const Ket k = basis_ket(layout, {{"spin", 1}, {"path", 2}});
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(std::abs(k.amplitude(i) - (i == 5 ? 1.0 : 0.0)) < 1e-15);
    }

    CHECK_THROWS_AS(basis_ket(spin_only, {{"spin", 5}}), std::out_of_range);
    CHECK_THROWS_AS(basis_ket(spin_only, {{"nope", 0}}), std::out_of_range);
    CHECK_THROWS_AS(basis_ket(layout, {{"spin", 0}}), std::invalid_argument);  // path unassigned
}

TEST_CASE("superpose builds normalized combinations and keeps relative phase") {
    const SpaceLayout spin_only({{"spin", 2}});
    const Ket up = basis_ket(spin_only, {{"spin", 0}});
    const Ket down = basis_ket(spin_only, {{"spin", 1}});

    const Ket plus = superpose({{kInvSqrt2, up}, {kInvSqrt2, down}});
    CHECK(plus.amplitude(0).real() == Approx(kInvSqrt2).margin(1e-12));
    CHECK(plus.amplitude(1).real() == Approx(kInvSqrt2).margin(1e-12));

    const Ket same = superpose({{1.0, up}, {0.0, down}});
    CHECK(fidelity(same, up) == Approx(1.0).margin(1e-12));

    // unnormalized inputs come out normalized; i phase survives
    const Ket phased = superpose({{2.0, up}, {Complex{0.0, 2.0}, down}});
    CHECK(phased.norm() == Approx(1.0).margin(1e-12));
    CHECK(std::abs(phased.amplitude(1) / phased.amplitude(0) - Complex{0.0, 1.0}) < 1e-12);

    CHECK_THROWS_AS(superpose({{1.0, up}, {-1.0, up}}), std::invalid_argument);
    const SpaceLayout other({{"spin", 3}});
    CHECK_THROWS_AS(superpose({{1.0, up}, {1.0, basis_ket(other, {{"spin", 0}})}}),
                    std::invalid_argument);
}

TEST_CASE("inner is conjugate-linear on the left") {
    const SpaceLayout spin_only({{"spin", 2}});
    const Ket up = basis_ket(spin_only, {{"spin", 0}});
    const Ket down = basis_ket(spin_only, {{"spin", 1}});
    const Ket plus = superpose({{kInvSqrt2, up}, {kInvSqrt2, down}});

    CHECK(inner(up, up) == Complex{1.0, 0.0});
    CHECK(inner(up, down) == Complex{0.0, 0.0});
    CHECK(inner(plus, up).real() == Approx(kInvSqrt2).margin(1e-12));

    const Ket phased = superpose({{kInvSqrt2, up}, {Complex{0.0, kInvSqrt2}, down}});
    CHECK(std::abs(inner(phased, down) - Complex{0.0, -kInvSqrt2}) < 1e-12);  // bra is conjugated
    CHECK(std::abs(inner(phased, phased) - Complex{1.0, 0.0}) < 1e-12);
}

TEST_CASE("density_from_ket gives the rank-1 projector") {
    const SpaceLayout spin_only({{"spin", 2}});
    const Ket up = basis_ket(spin_only, {{"spin", 0}});
    const DensityOperator rho_up = density_from_ket(up);
    CHECK(rho_up.matrix()(0, 0) == Complex{1.0, 0.0});
    CHECK(rho_up.matrix()(1, 1) == Complex{0.0, 0.0});

    const Ket plus = superpose({{kInvSqrt2, up}, {kInvSqrt2, basis_ket(spin_only, {{"spin", 1}})}});
    const DensityOperator rho_plus = density_from_ket(plus);
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
            CHECK(rho_plus.matrix()(i, j).real() == Approx(0.5).margin(1e-12));
        }
    }

    const SpaceLayout big({{"a", 3}, {"b", 4}});
    const DensityOperator random_rho = density_from_ket(oracles::random_ket(big, 11));
    CHECK(std::abs(random_rho.matrix().trace() - Complex{1.0, 0.0}) < 1e-12);
    CHECK(purity(random_rho) == Approx(1.0).margin(1e-10));
}

TEST_CASE("density operator invariants are enforced") {
    const SpaceLayout spin_only({{"spin", 2}});
    Eigen::MatrixXcd bad(2, 2);
    bad << 1.0, 0.5, -0.5, 0.0;  // not Hermitian
    CHECK_THROWS_AS(DensityOperator(spin_only, bad), std::invalid_argument);
    bad << 1.0, 0.0, 0.0, 1.0;  // trace 2
    CHECK_THROWS_AS(DensityOperator(spin_only, bad), std::invalid_argument);
    bad << 1.5, 0.0, 0.0, -0.5;  // negative eigenvalue
    CHECK_THROWS_AS(DensityOperator(spin_only, bad), std::invalid_argument);
}

TEST_CASE("partial trace reproduces the decohered two-branch state") {
    // (|0,1,0> + |1,2,1>)/sqrt(2) on {spin, path, env}; tracing the
    // environment leaves an equal mixture of the two branches.
    const SpaceLayout layout({{"spin", 2}, {"path", 3}, {"env", 2}});
    const Ket branch_up = basis_ket(layout, {{"spin", 0}, {"path", 1}, {"env", 0}});
    const Ket branch_down = basis_ket(layout, {{"spin", 1}, {"path", 2}, {"env", 1}});
    const Ket entangled = superpose({{kInvSqrt2, branch_up}, {kInvSqrt2, branch_down}});

    const DensityOperator reduced = partial_trace(density_from_ket(entangled), {"spin", "path"});
    REQUIRE(reduced.dim() == 6);
    for (Eigen::Index i = 0; i < 6; ++i) {
        for (Eigen::Index j = 0; j < 6; ++j) {
            const double expected = (i == j && (i == 1 || i == 5)) ? 0.5 : 0.0;
            CHECK(std::abs(reduced.matrix()(i, j) - expected) < 1e-12);
        }
    }
    CHECK(purity(reduced) == Approx(0.5).margin(1e-12));

    // Same computation through the brute-force oracle.
    const Eigen::MatrixXcd expected = oracles::partial_trace_oracle(
        density_from_ket(entangled).matrix(), {2, 3, 2}, {true, true, false});
    CHECK((reduced.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace of a Bell pair is maximally mixed") {
    const SpaceLayout layout({{"first", 2}, {"second", 2}});
    const Ket bell = superpose({{kInvSqrt2, basis_ket(layout, {{"first", 0}, {"second", 0}})},
                                {kInvSqrt2, basis_ket(layout, {{"first", 1}, {"second", 1}})}});
    const DensityOperator reduced = partial_trace(density_from_ket(bell), {"first"});

    // Frozen expectation I/2, cross-checked against the oracle.
    const Eigen::MatrixXcd oracle = oracles::partial_trace_oracle(
        density_from_ket(bell).matrix(), {2, 2}, {true, false});
    CHECK((oracle - Eigen::MatrixXcd::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((reduced.matrix() - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace rejects bad label sets") {
    const SpaceLayout layout({{"a", 2}, {"b", 2}});
    const DensityOperator rho = density_from_ket(basis_ket(layout, {{"a", 0}, {"b", 0}}));
    CHECK_THROWS_AS(partial_trace(rho, {}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, {"zz"}), std::out_of_range);
}

TEST_CASE("partial trace properties on random states") {
    const SpaceLayout a_layout({{"a", 3}});
    const SpaceLayout b_layout({{"b", 4}});
    const SpaceLayout ab({{"a", 3}, {"b", 4}});

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        // product state: tracing b recovers the a projector exactly
        const Ket a = oracles::random_ket(a_layout, seed);
        const Ket b = oracles::random_ket(b_layout, seed + 100);
        Eigen::VectorXcd product(12);
        for (Eigen::Index i = 0; i < 3; ++i) {
            for (Eigen::Index j = 0; j < 4; ++j) {
                product(i * 4 + j) = a.amplitude(i) * b.amplitude(j);
            }
        }
        const Ket ab_state(ab, product);
        const DensityOperator reduced = partial_trace(density_from_ket(ab_state), {"a"});
        CHECK((reduced.matrix() - density_from_ket(a).matrix()).cwiseAbs().maxCoeff() < 1e-10);

        // trace preservation for mixtures
        const DensityOperator mixed = mixture({{0.3, oracles::random_ket(ab, seed + 200)},
                                               {0.7, oracles::random_ket(ab, seed + 300)}});
        const DensityOperator traced = partial_trace(mixed, {"b"});
        CHECK(std::abs(traced.matrix().trace() - mixed.matrix().trace()) < 1e-10);

        // agreement with the oracle on arbitrary states
        const Eigen::MatrixXcd expected =
            oracles::partial_trace_oracle(mixed.matrix(), {3, 4}, {false, true});
        CHECK((traced.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("purity spans rank-1 to maximally mixed") {
    const SpaceLayout spin_only({{"spin", 2}});
    const Ket up = basis_ket(spin_only, {{"spin", 0}});
    const Ket down = basis_ket(spin_only, {{"spin", 1}});
    CHECK(purity(density_from_ket(up)) == Approx(1.0).margin(1e-12));
    CHECK(purity(mixture({{0.5, up}, {0.5, down}})) == Approx(0.5).margin(1e-12));

    const SpaceLayout qutrit({{"q", 3}});
    CHECK(purity(maximally_mixed(qutrit)) == Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("purity is 1 exactly for rank-1 operators") {
    const SpaceLayout layout({{"a", 2}, {"b", 3}});
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Ket pure = oracles::random_ket(layout, seed);
        const DensityOperator rho = density_from_ket(pure);
        CHECK(purity(rho) == Approx(1.0).margin(1e-10));
        // rank from eigenvalues
        std::size_t rank = 0;
        for (double lambda : rho.eigenvalues()) rank += lambda > 1e-9 ? 1 : 0;
        CHECK(rank == 1);

        const Ket other = oracles::random_ket(layout, seed + 50);
        const DensityOperator mixed = mixture({{0.5, pure}, {0.5, other}});
        std::size_t mixed_rank = 0;
        for (double lambda : mixed.eigenvalues()) mixed_rank += lambda > 1e-9 ? 1 : 0;
        if (mixed_rank > 1) CHECK(purity(mixed) < 1.0 - 1e-6);
    }
}

TEST_CASE("fidelity_with_ket matches direct computation") {
    const SpaceLayout spin_only({{"spin", 2}});
    const Ket up = basis_ket(spin_only, {{"spin", 0}});
    const Ket down = basis_ket(spin_only, {{"spin", 1}});
    const Ket plus = superpose({{kInvSqrt2, up}, {kInvSqrt2, down}});

    CHECK(fidelity_with_ket(density_from_ket(up), up) == Approx(1.0).margin(1e-12));
    CHECK(fidelity_with_ket(density_from_ket(up), down) == Approx(0.0).margin(1e-12));
    // <+| I/2 |+> = (1/2)(|1/sqrt2|^2 + |1/sqrt2|^2) = 1/2, by hand
    CHECK(fidelity_with_ket(maximally_mixed(spin_only), plus) == Approx(0.5).margin(1e-12));

    const SpaceLayout other({{"spin", 3}});
    CHECK_THROWS_AS(fidelity_with_ket(maximally_mixed(other), up), std::invalid_argument);
}

TEST_CASE("schmidt rank distinguishes product from entangled states") {
    const SpaceLayout layout({{"a", 2}, {"b", 2}});
    const Ket product = basis_ket(layout, {{"a", 0}, {"b", 1}});
    CHECK(schmidt_rank(product, {"b"}) == 1);

    const Ket bell = superpose({{kInvSqrt2, basis_ket(layout, {{"a", 0}, {"b", 0}})},
                                {kInvSqrt2, basis_ket(layout, {{"a", 1}, {"b", 1}})}});
    CHECK(schmidt_rank(bell, {"a"}) == 2);

    CHECK_THROWS_AS(schmidt_rank(bell, {}), std::invalid_argument);
    CHECK_THROWS_AS(schmidt_rank(bell, {"a", "b"}), std::invalid_argument);

    // Schmidt rank equals the rank of the reduced density operator.
    const SpaceLayout abc({{"a", 2}, {"b", 3}, {"c", 2}});
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Ket state = oracles::random_ket(abc, seed);
        const DensityOperator reduced = partial_trace(density_from_ket(state), {"b"});
        std::size_t eigen_rank = 0;
        for (double lambda : reduced.eigenvalues()) eigen_rank += lambda > 1e-9 ? 1 : 0;
        CHECK(schmidt_rank(state, {"b"}) == eigen_rank);
    }
}

TEST_CASE("global phase never changes fidelities") {
    const SpaceLayout layout({{"a", 2}, {"b", 3}});
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Ket state = oracles::random_ket(layout, seed);
        const double theta = 0.1 + static_cast<double>(seed);
        const Ket rotated = superpose({{std::polar(1.0, theta), state}});
        CHECK(fidelity(rotated, state) == Approx(1.0).margin(1e-10));
        CHECK(fidelity_with_ket(density_from_ket(state), rotated) == Approx(1.0).margin(1e-10));
    }
}
