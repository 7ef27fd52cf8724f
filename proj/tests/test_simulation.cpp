#include <cmath>
#include <stdexcept>

#include "avpb/philox.hpp"
#include "avpb/simulation.hpp"
#include "doctest.h"

using namespace avpb;

namespace {

BoundSpec forward_spec(const std::string& name, ForwardKind kind, LambdaSchedule sched) {
    BoundSpec b;
    b.name = name;
    b.method = BoundMethod::Forward;
    b.fkind = kind;
    b.schedule = std::move(sched);
    return b;
}

BoundSpec method_spec(const std::string& name, BoundMethod m) {
    BoundSpec b;
    b.name = name;
    b.method = m;
    return b;
}

ExperimentConfig small_bernoulli_config() {
    ExperimentConfig cfg{Scenario::bernoulli_iid({0.2, 0.4, 0.6}, 64),
                         FiniteMixture::uniform(3)};
    cfg.delta = 0.05;
    cfg.reps = 4;
    cfg.seed = 99;
    cfg.bounds.push_back(
        forward_spec("subgaussian", ForwardKind::SubGaussian, LambdaSchedule::target(16.0, 64)));
    cfg.bounds.push_back(method_spec("seeger", BoundMethod::Seeger));
    cfg.bounds.push_back(method_spec("cs", BoundMethod::SubgaussianCs));
    cfg.bounds.back().schedule = default_lambda_schedule(0.05, 0.5, 64);
    return cfg;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("philox streams are deterministic and distinct") {
    CounterRng a(42, 7, 0), b(42, 7, 0), c(42, 8, 0), d(43, 7, 0);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
        CHECK(x != d.next_u64());
    }
    CounterRng u(1, 2, 3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
    // crude moment sanity for the normal transform
    CounterRng g(5, 0, 0);
    double m = 0.0, m2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = g.normal();
        m += x;
        m2 += x * x;
    }
    m /= n;
    m2 /= n;
    CHECK(std::abs(m) < 0.03);
    CHECK(std::abs(m2 - 1.0) < 0.05);
}

TEST_CASE("gibbs posterior goldens") {
    const auto prior = FiniteMixture::uniform(2);
    const double losses0[] = {0.4, 0.9};
    const auto same = gibbs_posterior(prior, losses0, 0.0);
    CHECK(same[0] == doctest::Approx(0.5).epsilon(1e-15));

    const double losses[] = {0.0, 1.0};
    const auto g = gibbs_posterior(prior, losses, 1.0);
    CHECK(g[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(0.2689414213699951).epsilon(1e-12));

    const double shifted[] = {5.0, 6.0};
    const auto gs = gibbs_posterior(prior, shifted, 1.0);
    CHECK(gs[0] == doctest::Approx(g[0]).epsilon(1e-13));
    CHECK_THROWS_AS(gibbs_posterior(prior, std::span<const double>(losses0, 1), 1.0),
                    std::invalid_argument);
}

TEST_CASE("deterministic degenerate scenario never violates") {
    // uniform with lo == hi: the loss equals its conditional mean
    ExperimentConfig cfg{Scenario::uniform_bounded({0.3, 0.5}, {0.3, 0.5}, 200),
                         FiniteMixture::uniform(2)};
    cfg.delta = 0.05;
    cfg.reps = 2;
    cfg.seed = 1;
    cfg.bounds.push_back(forward_spec("subgaussian", ForwardKind::SubGaussian,
                                      LambdaSchedule::constant(0.5)));
    cfg.bounds.push_back(forward_spec("bernstein", ForwardKind::BernsteinBounded,
                                      LambdaSchedule::constant(0.5)));
    cfg.bounds.push_back(forward_spec("bennett", ForwardKind::Bennett,
                                      LambdaSchedule::constant(0.5)));
    const auto report = coverage(cfg);
    for (const auto& e : report.entries) CHECK(e.violated_reps == 0);
}

TEST_CASE("same (seed, rep) twice gives identical traces") {
    const auto cfg = small_bernoulli_config();
    const Trace a = run_trajectory(cfg, 2);
    const Trace b = run_trajectory(cfg, 2);
    REQUIRE(a.ts.size() == b.ts.size());
    for (std::size_t bi = 0; bi < a.lhs.size(); ++bi)
        for (std::size_t r = 0; r < a.ts.size(); ++r) {
            CHECK(a.lhs[bi][r] == b.lhs[bi][r]);
            CHECK(a.rhs[bi][r] == b.rhs[bi][r]);
        }
    CHECK(a.first_violation == b.first_violation);
}

TEST_CASE("rep traces do not depend on the total number of reps") {
    auto cfg = small_bernoulli_config();
    cfg.reps = 2;
    const Trace a = run_trajectory(cfg, 1);
    cfg.reps = 4;
    const Trace b = run_trajectory(cfg, 1);
    for (std::size_t bi = 0; bi < a.lhs.size(); ++bi)
        for (std::size_t r = 0; r < a.ts.size(); ++r)
            CHECK(a.lhs[bi][r] == b.lhs[bi][r]);
}

TEST_CASE("incompatible bounds are rejected before sampling") {
    // Seeger on unbounded losses
    ExperimentConfig cfg{Scenario::gaussian({1.0}, {0.5}, 10), FiniteMixture::uniform(1)};
    cfg.bounds.push_back(method_spec("seeger", BoundMethod::Seeger));
    CHECK_THROWS_AS(coverage(cfg), std::invalid_argument);

    // PthMoment away from the heavy-tail scenario
    ExperimentConfig cfg2{Scenario::bernoulli_iid({0.5}, 10), FiniteMixture::uniform(1)};
    cfg2.bounds.push_back(
        forward_spec("pth", ForwardKind::PthMoment, LambdaSchedule::constant(1.0)));
    CHECK_THROWS_AS(coverage(cfg2), std::invalid_argument);

    // stitched CS needs sigma <= 1
    ExperimentConfig cfg3{Scenario::gaussian({1.0}, {2.0}, 10), FiniteMixture::uniform(1)};
    cfg3.bounds.push_back(method_spec("cs", BoundMethod::StitchedCs));
    CHECK_THROWS_AS(coverage(cfg3), std::invalid_argument);

    // delta outside (0,1)
    auto cfg4 = small_bernoulli_config();
    cfg4.delta = 1.0;
    CHECK_THROWS_AS(coverage(cfg4), std::invalid_argument);
}

TEST_CASE("reps = 1 yields a 0/1 rate") {
    auto cfg = small_bernoulli_config();
    cfg.reps = 1;
    const auto report = coverage(cfg);
    for (const auto& e : report.entries)
        CHECK((e.violation_rate == 0.0 || e.violation_rate == 1.0));
}

TEST_CASE("violation flags agree with lhs > rhs and first_violation") {
    const auto cfg = small_bernoulli_config();
    const Trace tr = run_trajectory(cfg, 0);
    for (std::size_t bi = 0; bi < tr.bound_names.size(); ++bi) {
        std::uint64_t first = 0;
        for (std::size_t r = 0; r < tr.ts.size(); ++r) {
            const bool v = tr.lhs[bi][r] > tr.rhs[bi][r];
            CHECK(v == (tr.violated[bi][r] != 0));
            if (v && first == 0) first = tr.ts[r];
        }
        CHECK(first == tr.first_violation[bi]);
    }
}

TEST_CASE("moderate-delta coverage stays within the binomial envelope") {
    ExperimentConfig cfg{Scenario::bernoulli_iid({0.3, 0.7}, 100), FiniteMixture::uniform(2)};
    cfg.delta = 0.5;
    cfg.reps = 60;
    cfg.seed = 5;
    cfg.bounds.push_back(
        forward_spec("subgaussian", ForwardKind::SubGaussian, LambdaSchedule::target(10.0, 100)));
    cfg.bounds.push_back(method_spec("seeger", BoundMethod::Seeger));
    const auto report = coverage(cfg);
    for (const auto& e : report.entries)
        CHECK(e.violation_rate <= 0.5 + 3.0 * std::sqrt(0.5 * 0.5 / 60.0));
}

TEST_CASE("sampling without replacement exhausts oracles consistently") {
    std::vector<std::vector<double>> urn(2);
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 64; ++j)
            urn[k].push_back((j % (k + 2)) / static_cast<double>(k + 2));
    ExperimentConfig cfg{Scenario::sampling_without_replacement(urn, 64),
                         FiniteMixture::uniform(2)};
    cfg.delta = 0.2;
    cfg.reps = 3;
    cfg.seed = 11;
    cfg.bounds.push_back(forward_spec("bernstein", ForwardKind::BernsteinBounded,
                                      LambdaSchedule::constant(0.9)));
    cfg.bounds.push_back(
        forward_spec("mgf", ForwardKind::BoundedMGF, LambdaSchedule::constant(0.5)));
    const auto report = coverage(cfg);
    CHECK(report.entries.size() == 2);
    // MGF needs a constant schedule on this scenario
    cfg.bounds[1].schedule = LambdaSchedule::sqrt_log(1.0);
    CHECK_THROWS_AS(coverage(cfg), std::invalid_argument);
}

}  // TEST_SUITE
