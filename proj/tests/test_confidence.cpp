#include <cmath>
#include <stdexcept>

#include "avpb/confidence.hpp"
#include "avpb/forward_bounds.hpp"
#include "doctest.h"

using namespace avpb;

TEST_SUITE("confidence") {

TEST_CASE("subgaussian width golden") {
    const auto sched = LambdaSchedule::constant(0.2);
    const auto cs = subgaussian_cs(0.0, sched, 100, 1.0, 0.0, 0.05);
    CHECK(cs.width == doctest::Approx((std::log(40.0) + 2.0) / 20.0).epsilon(1e-13));
    CHECK(cs.width == doctest::Approx(0.28445).epsilon(1e-4));
    CHECK(cs.lo() == -cs.width);
    CHECK(cs.hi() == cs.width);
}

TEST_CASE("constant lambda makes the center the running mean") {
    const auto sched = LambdaSchedule::constant(0.5);
    // stream mean 0.4 over 10 steps: weighted sum = 0.5 * 4.0
    const auto cs = subgaussian_cs(2.0, sched, 10, 1.0, 0.0, 0.05);
    CHECK(cs.center == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("two-sided width equals the one-sided bound at delta/2") {
    // The ln(2/delta) factor is exactly the union bound over the two sides:
    // each side is the subGaussian deviation bound run at delta/2.
    ForwardBoundState st(ForwardKind::SubGaussian, 1);
    const auto sched = LambdaSchedule::constant(0.2);
    StepObservation obs;
    obs.loss = {0.4};
    obs.cond_mean = {0.4};
    obs.sigma_sub = 1.0;
    for (int i = 0; i < 100; ++i) st.update(sched, obs);
    const auto rho = FiniteMixture::uniform(1);
    for (double kl : {0.0, 0.7}) {
        const double one_sided = st.rhs_with_kl(rho, kl, 0.05 / 2.0) / st.cum_lambda();
        const double two_sided = subgaussian_cs(0.0, sched, 100, 1.0, kl, 0.05).width;
        CHECK(two_sided == doctest::Approx(one_sided).epsilon(1e-13));
    }
}

TEST_CASE("width is linear in kl") {
    const auto sched = LambdaSchedule::constant(0.2);
    const double w0 = subgaussian_cs(0.0, sched, 100, 1.0, 0.0, 0.05).width;
    const double w1 = subgaussian_cs(0.0, sched, 100, 1.0, 1.0, 0.05).width;
    const double w2 = subgaussian_cs(0.0, sched, 100, 1.0, 2.0, 0.05).width;
    CHECK(w1 - w0 == doctest::Approx(1.0 / 20.0).epsilon(1e-12));
    CHECK(w2 - w1 == doctest::Approx(1.0 / 20.0).epsilon(1e-12));
}

TEST_CASE("with constant lambda the width converges to sigma^2 lambda / 2") {
    const double lambda = 0.3, sigma = 1.0;
    const auto sched = LambdaSchedule::constant(lambda);
    const double w = subgaussian_cs(0.0, sched, 2000000, sigma, 0.0, 0.05).width;
    CHECK(w == doctest::Approx(sigma * sigma * lambda / 2.0).epsilon(1e-5));
}

TEST_CASE("zero weight is rejected") {
    const auto sched = LambdaSchedule::constant(0.0);
    CHECK_THROWS_AS(subgaussian_cs(0.0, sched, 10, 1.0, 0.0, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(subgaussian_cs(0.0, LambdaSchedule::constant(0.2), 10, 0.0, 0.0, 0.05),
                    std::domain_error);
}

TEST_CASE("stitched width golden") {
    CHECK(stitched_cs_width(1024, 0.0, 0.05) == doctest::Approx(0.17890).epsilon(1e-4));
    const double explicit_form =
        2.0 * std::sqrt((std::log(6.3 / 0.05) + 1.4 * std::log(std::log2(2048.0))) / 1024.0);
    CHECK(stitched_cs_width(1024, 0.0, 0.05) == doctest::Approx(explicit_form).epsilon(1e-13));
    // kl = 0 kills the second term; the kl term adds exactly kl/sqrt(tail*t)
    const double tail = std::log(6.3 / 0.05) + 1.4 * std::log(std::log2(1025.0));
    CHECK(stitched_cs_width(1024, 0.7, 0.05) - stitched_cs_width(1024, 0.0, 0.05) ==
          doctest::Approx(0.7 / std::sqrt(tail * 1024.0)).epsilon(1e-12));
}

TEST_CASE("stitched width is nonincreasing from t = 2 at fixed kl") {
    for (double kl : {0.0, 0.5, 3.0}) {
        double prev = stitched_cs_width(2, kl, 0.05);
        for (std::uint64_t t = 3; t <= 100000; t = t < 100 ? t + 1 : t * 21 / 20) {
            const double w = stitched_cs_width(t, kl, 0.05);
            CHECK(w <= prev + 1e-15);
            prev = w;
        }
    }
}

TEST_CASE("stitched width obeys an iterated-logarithm envelope") {
    // width * sqrt(t / lnln t) stays bounded over a wide sweep
    double worst = 0.0;
    for (std::uint64_t t = 16; t <= (1ull << 20); t *= 2) {
        const double td = static_cast<double>(t);
        worst = std::max(worst, stitched_cs_width(t, 0.0, 0.05) *
                                    std::sqrt(td / std::log(std::log(td))));
        CHECK(worst < 12.0);
    }
}

TEST_CASE("default schedule golden and monotone decay") {
    const auto sched = default_lambda_schedule(0.05, 1.0, 1000);
    CHECK(sched.at(1) == doctest::Approx(3.26251).epsilon(1e-4));
    CHECK(sched.at(1) ==
          doctest::Approx(std::sqrt(2.0 * std::log(40.0)) / std::sqrt(std::log(2.0)))
              .epsilon(1e-12));
    double prev = sched.at(1);
    for (std::uint64_t t = 2; t <= 2000; ++t) {
        CHECK(sched.at(t) < prev);
        prev = sched.at(t);
    }
}

TEST_CASE("default schedule drives the width toward zero") {
    const auto sched = default_lambda_schedule(0.05, 1.0, 0);
    const double w10 = subgaussian_cs(0.0, sched, 10, 1.0, 0.0, 0.05).width;
    const double w1e3 = subgaussian_cs(0.0, sched, 1000, 1.0, 0.0, 0.05).width;
    const double w1e5 = subgaussian_cs(0.0, sched, 100000, 1.0, 0.0, 0.05).width;
    CHECK(w1e3 < w10);
    CHECK(w1e5 < w1e3);
}

TEST_CASE("schedule kinds and errors") {
    CHECK(LambdaSchedule::target(20.0, 100).at(7) == doctest::Approx(0.2).epsilon(1e-15));
    const auto ex = LambdaSchedule::explicit_list({0.1, 0.2});
    CHECK(ex.at(2) == 0.2);
    CHECK_THROWS_AS(ex.at(3), std::invalid_argument);
    CHECK_THROWS_AS(ex.at(0), std::invalid_argument);
    CHECK_THROWS_AS(LambdaSchedule::constant(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(LambdaSchedule::explicit_list({0.1, -0.2}), std::invalid_argument);
    const auto t = LambdaSchedule::target(20.0, 100);
    CHECK(t.cum(100) == doctest::Approx(20.0).epsilon(1e-13));
    CHECK(t.cum_sq(100) == doctest::Approx(4.0).epsilon(1e-13));
}

}  // TEST_SUITE
