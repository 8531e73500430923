#include <doctest.h>

#include <cmath>
#include <random>

#include "encircle/safety.hpp"

using namespace encircle;

namespace {

CylCoords random_coords(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> rho(0.0, 5.0);
    std::uniform_real_distribution<double> phi(-30.0, 30.0);  // unwrapped values welcome
    std::uniform_real_distribution<double> z(-3.0, 3.0);
    return {rho(rng), phi(rng), z(rng)};
}

}  // namespace

TEST_SUITE("safety") {

TEST_CASE("inter distance basics") {
    const PairDistances zero = inter_distance({1.0, 0.5, 0.2}, {1.0, 0.5, 0.2});
    CHECK(zero.full == doctest::Approx(0.0));
    CHECK(zero.planar == doctest::Approx(0.0));
    CHECK(zero.chord == doctest::Approx(0.0));

    const PairDistances anti = inter_distance({2.0, 0.0, 1.0}, {2.0, M_PI, 1.0});
    CHECK(anti.full == doctest::Approx(4.0));
    CHECK(anti.planar == doctest::Approx(4.0));
    CHECK(anti.chord == doctest::Approx(4.0));
}

TEST_CASE("full distance equals the Cartesian distance of reconstructed points") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 2000; ++trial) {
        const CylCoords qi = random_coords(rng);
        const CylCoords qj = random_coords(rng);
        const double cartesian = (from_cylindrical(qi) - from_cylindrical(qj)).norm();
        CHECK(inter_distance(qi, qj).full == doctest::Approx(cartesian).epsilon(1e-9));
    }
}

TEST_CASE("chain inequality over random configurations") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 100000; ++trial) {
        const CylCoords qi = random_coords(rng);
        const CylCoords qj = random_coords(rng);
        const PairDistances d = inter_distance(qi, qj);
        CHECK(d.full >= d.planar - 1e-12);
        CHECK(d.planar >= std::abs(qi.rho - qj.rho) - 1e-12);
        CHECK(d.planar >= d.chord - 1e-12);
    }
}

TEST_CASE("separation predicates") {
    const SeparationFlags radial = separation_predicates({3.0, 0.0, 0.0}, {0.5, 0.3, 0.0}, 0.25);
    CHECK(radial.radial);

    const SeparationFlags phase =
        separation_predicates({2.0, 0.0, 0.0}, {2.0, M_PI / 3.0, 0.0}, 0.25);
    CHECK(phase.phase);  // min rho = 2 > 0.25 / sin(pi/6) = 0.5
    CHECK_FALSE(phase.radial);

    // Identical phases: the sine vanishes, so no phase separation.
    const SeparationFlags none = separation_predicates({2.0, 1.0, 0.0}, {2.1, 1.0, 0.0}, 0.25);
    CHECK_FALSE(none.phase);
}

TEST_CASE("either separation predicate implies clearance") {
    std::mt19937_64 rng(23);
    const double r = 0.25;
    int separated = 0;
    for (int trial = 0; trial < 100000; ++trial) {
        const CylCoords qi = random_coords(rng);
        const CylCoords qj = random_coords(rng);
        const SeparationFlags flags = separation_predicates(qi, qj, r);
        if (flags.radial || flags.phase) {
            ++separated;
            CHECK(inter_distance(qi, qj).full > 2.0 * r);
        }
    }
    CHECK(separated > 1000);  // the sample actually exercises the implication
}

TEST_CASE("sigma bound values") {
    CHECK(sigma_bound(M_PI / 3.0, 0.25) == doctest::Approx(0.5));
    CHECK(sigma_bound(M_PI, 0.25) == doctest::Approx(0.25));
    // Cross-checked with an extended-precision evaluation of r / sin(pi/5).
    CHECK(sigma_bound(2.0 * M_PI / 5.0, 0.25)
          == doctest::Approx(0.42532540417602).epsilon(1e-12));
    CHECK_THROWS_AS(sigma_bound(0.0, 0.25), DegenerateDelta);
    CHECK_THROWS_AS(sigma_bound(-0.1, 0.25), DegenerateDelta);
}

TEST_CASE("collision audit on synthetic trajectories") {
    {
        // A single robot has no pairs and no violations.
        std::vector<std::vector<Vec3>> positions(10, {Vec3(0.0, 0.0, 0.0)});
        std::vector<std::vector<int>> ids(10, {1});
        const CollisionAudit audit = collision_audit(positions, ids, 0.25);
        CHECK(audit.violations.empty());
    }
    {
        // Two robots approach head-on; violations start once D <= 2r.
        std::vector<std::vector<Vec3>> positions;
        std::vector<std::vector<int>> ids;
        for (int k = 0; k <= 10; ++k) {
            const double x = 1.0 - 0.1 * k;  // gap shrinks from 2.0 to 0.0
            positions.push_back({Vec3(-x, 0.0, 0.0), Vec3(x, 0.0, 0.0)});
            ids.push_back({1, 2});
        }
        const CollisionAudit audit = collision_audit(positions, ids, 0.25);
        CHECK(audit.min_distance == doctest::Approx(0.0));
        CHECK_FALSE(audit.violations.empty());
        CHECK(audit.violations.front().tick == 8);  // first tick with D = 0.4 <= 0.5
        CHECK(audit.violations.front().robot_i == 1);
        CHECK(audit.violations.front().robot_j == 2);
    }
}

}  // TEST_SUITE
