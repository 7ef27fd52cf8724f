#include <cmath>
#include <stdexcept>

#include "avpb/divergences.hpp"
#include "avpb/reverse_bounds.hpp"
#include "avpb/stitch.hpp"
#include "doctest.h"

using namespace avpb;

namespace {

ConvexPhiSpec maurer_spec() {
    return {klsf, [](double, std::uint64_t j) { return std::log(stitch::xi(j)); },
            [](std::uint64_t j) { return static_cast<double>(j); }};
}

}  // namespace

TEST_SUITE("reverse") {

TEST_CASE("convex stitched goldens") {
    const auto spec = maurer_spec();
    CHECK(convex_phi_rhs_stitched(spec, 1, 0.0, 0.05) ==
          doctest::Approx(std::log(2.0) + std::log(20.0) + stitch::il(1)).epsilon(1e-13));
    CHECK(convex_phi_rhs_stitched(spec, 1, 0.0, 0.05) == doctest::Approx(4.18658).epsilon(1e-4));
    // eta(3) = 2: the value anchors on epoch 2 only
    CHECK(convex_phi_rhs_stitched(spec, 3, 0.0, 0.05) ==
          doctest::Approx((std::log(stitch::xi(2)) + std::log(20.0) + stitch::il(3)) / 2.0)
              .epsilon(1e-13));
    const ConvexPhiSpec unit{klsf, [](double, std::uint64_t) { return 0.0; },
                             [](std::uint64_t) { return 1.0; }};
    CHECK(convex_phi_rhs_stitched(unit, 1, 0.0, 0.2) ==
          doctest::Approx(stitch::il(1) + std::log(5.0)).epsilon(1e-13));
    const ConvexPhiSpec bad{klsf, [](double, std::uint64_t) { return 0.0; },
                            [](std::uint64_t) { return 0.0; }};
    CHECK_THROWS_AS(convex_phi_rhs_stitched(bad, 1, 0.0, 0.05), std::invalid_argument);
}

TEST_CASE("convex target goldens") {
    const auto spec = maurer_spec();
    const double v1 = convex_phi_rhs_target(spec, 100, 100, 0.0, 0.05);
    const double v2 = convex_phi_rhs_target(spec, 100, 1000, 0.0, 0.05);
    CHECK(v1 == v2);  // constant in t
    CHECK(v1 == doctest::Approx((std::log(stitch::xi(100)) + std::log(20.0)) / 100.0)
                    .epsilon(1e-13));
    CHECK(v1 >= 0.05298);
    CHECK(v1 <= 0.05991);
    const ConvexPhiSpec unit{klsf, [](double, std::uint64_t) { return 0.0; },
                             [](std::uint64_t) { return 1.0; }};
    CHECK(convex_phi_rhs_target(unit, 1, 1, 0.0, 0.05) ==
          doctest::Approx(std::log(20.0)).epsilon(1e-13));
    CHECK_THROWS_AS(convex_phi_rhs_target(spec, 100, 99, 0.0, 0.05), std::invalid_argument);
}

TEST_CASE("seeger goldens") {
    CHECK(seeger_rhs(1, 0.0, 0.05) ==
          doctest::Approx(std::log(2.0 / 0.05) + stitch::il(1)).epsilon(1e-13));
    CHECK(seeger_rhs(1, 0.0, 0.05) == doctest::Approx(4.18658).epsilon(1e-4));
    const double tgt = seeger_rhs_target(100, 0.0, 0.05);
    CHECK(tgt >= 0.05298);
    CHECK(tgt <= 0.05991);
    // linear in kl with slope 1/eta(t)
    for (std::uint64_t t : {1ull, 7ull, 64ull, 1000ull}) {
        const double slope = seeger_rhs(t, 1.0, 0.05) - seeger_rhs(t, 0.0, 0.05);
        CHECK(slope == doctest::Approx(1.0 / static_cast<double>(stitch::eta(t))).epsilon(1e-12));
    }
    CHECK_THROWS_AS(seeger_rhs(1, 0.0, 1.0), std::domain_error);
}

TEST_CASE("maurer wiring: convex template with xi moments equals seeger") {
    const auto spec = maurer_spec();
    for (std::uint64_t t = 1; t <= 4096; ++t)
        CHECK(convex_phi_rhs_stitched(spec, t, 0.3, 0.05) ==
              doctest::Approx(seeger_rhs(t, 0.3, 0.05)).epsilon(1e-13));
}

TEST_CASE("stitched stays within a factor-two style envelope of the target form") {
    // exact evaluations on a subsample
    for (std::uint64_t t = 1; t <= 512; ++t) {
        const double lhs = seeger_rhs(t, 0.0, 0.05);
        const double envelope = 2.0 * seeger_rhs_target(t, 0.0, 0.05) +
                                (2.0 * stitch::il(t) + 2.0 * std::log(2.0)) / static_cast<double>(t);
        CHECK(lhs <= envelope + 1e-12);
    }
    // bracket-based check across the full range
    for (std::uint64_t t = 1; t <= (1ull << 16); t = t * 2 + 1) {
        const double e = static_cast<double>(stitch::eta(t));
        const double td = static_cast<double>(t);
        const double lhs_upper =
            (std::log(2.0 * std::sqrt(e) / 0.05) + stitch::il(t)) / e;
        const double rhs_lower = 2.0 * (std::log(std::sqrt(td) / 0.05)) / td +
                                 (2.0 * stitch::il(t) + 2.0 * std::log(2.0)) / td;
        CHECK(lhs_upper <= rhs_lower + 1e-12);
    }
}

TEST_CASE("mcallester goldens and clipping") {
    CHECK(mcallester_raw_target(100, 0.0, 0.05, 0.0) ==
          doctest::Approx(0.20364).epsilon(1e-4));
    CHECK(mcallester_raw(1, 0.0, 0.05, 0.0) == doctest::Approx(1.44675).epsilon(1e-4));
    CHECK(mcallester_bound(1, 0.0, 0.05, 0.0) == 1.0);
    CHECK(mcallester_bound(1, 0.0, 0.05, 1.0) == 1.0);
    CHECK_THROWS_AS(mcallester_raw(1, 0.0, 0.05, 1.5), std::domain_error);
}

TEST_CASE("pinsker relaxation never beats kl inversion") {
    for (std::uint64_t t : {1ull, 10ull, 128ull, 2000ull})
        for (double kl : {0.0, 0.3, 2.0})
            for (double r_hat : {0.0, 0.1, 0.5, 0.9}) {
                const double budget = seeger_rhs(t, kl, 0.05);
                const double inv = kl_inv_upper(r_hat, budget);
                CHECK(r_hat + std::sqrt(budget / 2.0) >= inv - 1e-12);
            }
}

TEST_CASE("thiemann goldens") {
    CHECK(thiemann_bound(1, 0.0, 0.05, 1.0, 0.0) == doctest::Approx(8.37313).epsilon(1e-4));
    CHECK(thiemann_bound_min(1, 0.0, 0.05, 0.0) <= thiemann_bound(1, 0.0, 0.05, 1.0, 0.0));
    CHECK_THROWS_AS(thiemann_bound(1, 0.0, 0.05, 2.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(thiemann_bound(1, 0.0, 0.05, 0.0, 0.0), std::domain_error);
    // doubling the epoch strictly shrinks the complexity term
    for (int k = 1; k <= 10; ++k) {
        const std::uint64_t t1 = 1ull << k, t2 = 1ull << (k + 1);
        CHECK(thiemann_bound(t2, 0.3, 0.05, 1.0, 0.0) < thiemann_bound(t1, 0.3, 0.05, 1.0, 0.0));
    }
}

TEST_CASE("ipm variants mirror the convex forms") {
    const auto spec = maurer_spec();
    CHECK(ipm_rhs_stitched(spec, 1, 0.0, 0.05) ==
          convex_phi_rhs_stitched(spec, 1, 0.0, 0.05));
    CHECK(ipm_rhs_stitched(spec, 1, 0.2, 0.05) ==
          doctest::Approx(convex_phi_rhs_stitched(spec, 1, 0.0, 0.05) + 0.2).epsilon(1e-12));
    CHECK(ipm_rhs_stitched(spec, 1, 0.2, 0.05) == doctest::Approx(4.38658).epsilon(1e-4));
    CHECK(ipm_rhs_stitched(spec, 3, 0.1, 0.05) ==
          convex_phi_rhs_stitched(spec, 3, 0.1, 0.05));
    CHECK_THROWS_AS(ipm_rhs_stitched(spec, 1, -0.1, 0.05), std::domain_error);
}

TEST_CASE("renyi convex goldens") {
    auto zero = [](std::uint64_t) { return 0.0; };
    CHECK(renyi_convex_rhs(1, 2.0, 0.0, zero, 0.05) ==
          doctest::Approx(0.5 * (std::log(20.0) + stitch::il(1))).epsilon(1e-13));
    CHECK(renyi_convex_rhs(1, 2.0, 0.0, zero, 0.05) == doctest::Approx(1.74671).epsilon(1e-4));
    // prefactor approaches 1 as alpha grows
    CHECK(renyi_convex_rhs(1, 1e9, 0.0, zero, 0.05) ==
          doctest::Approx(std::log(20.0) + stitch::il(1)).epsilon(1e-6));
    // linear in d_alpha with slope (alpha-1)/alpha
    const double slope = renyi_convex_rhs(8, 2.0, 1.0, zero, 0.05) -
                         renyi_convex_rhs(8, 2.0, 0.0, zero, 0.05);
    CHECK(slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(renyi_convex_rhs(1, 1.0, 0.0, zero, 0.05), std::domain_error);
}

TEST_CASE("stitched values respond to kl and delta as expected") {
    for (std::uint64_t t : {1ull, 5ull, 300ull}) {
        CHECK(seeger_rhs(t, 0.0, 0.05) > 0.0);
        CHECK(std::isfinite(seeger_rhs(t, 0.0, 0.05)));
        CHECK(seeger_rhs(t, 1.0, 0.05) > seeger_rhs(t, 0.0, 0.05));
        CHECK(seeger_rhs(t, 0.0, 0.01) > seeger_rhs(t, 0.0, 0.05));
        CHECK(mcallester_raw(t, 1.0, 0.05, 0.2) > mcallester_raw(t, 0.0, 0.05, 0.2));
    }
}

TEST_CASE("phi helpers") {
    CHECK(phi_quadratic(0.3, 0.1) == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(phi_catoni(0.0, 0.0, 1.0) == 0.0);
    // convexity of the catoni comparator in its first argument is linear;
    // check the closed form at a point instead
    CHECK(phi_catoni(0.5, 0.5, 2.0) ==
          doctest::Approx(-1.0 - std::log(1.0 - 0.5 * (1.0 - std::exp(-2.0)))).epsilon(1e-12));
    CHECK_THROWS_AS(phi_catoni(0.5, 0.5, 0.0), std::domain_error);
}

}  // TEST_SUITE
