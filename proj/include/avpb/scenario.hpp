#pragma once

#include <cstdint>
#include <vector>

#include "avpb/numeric.hpp"
#include "avpb/philox.hpp"

namespace avpb {

// Synthetic loss-stream families over a finite parameter set. One data point
// Z_t is drawn per step and every theta sees a loss f(Z_t, theta), so the
// per-theta losses are driven by a common stream. All conditional moments are
// exact, never estimated.
enum class ScenarioKind {
    BernoulliIid,
    UniformBounded,
    Gaussian,  // rectified at zero so losses stay nonnegative
    ParetoHeavy,
    SamplingWithoutReplacement,
    MdsBounded,
};

const char* to_string(ScenarioKind kind);

struct Scenario {
    ScenarioKind kind;
    std::size_t theta_count = 0;
    std::uint64_t horizon = 0;

    // BernoulliIid: success probability per theta, in (0,1).
    std::vector<double> p;
    // UniformBounded: losses uniform on [lo, hi] per theta, 0 <= lo <= hi.
    std::vector<double> lo, hi;
    // Gaussian: loss = max(0, mean + sd * G) with shared standard normal G.
    std::vector<double> mean, sd;
    // ParetoHeavy: loss = scale * V^(1/moment_p), V standard Pareto with tail
    // index tail_b; requires 2/moment_p < tail_b so second moments exist while
    // heavier moments do not, and moment_p in (1,2].
    std::vector<double> scale;
    double tail_b = 0.0, moment_p = 0.0;
    // SamplingWithoutReplacement: urn[theta][ball]; the same ball index is
    // drawn for every theta. Urn sizes equal and >= horizon; values >= 0.
    std::vector<std::vector<double>> urn;
    // MdsBounded: F_t(theta) = amplitude[theta] * sign_t * s_{t-1}; with
    // momentum the predictable scale s shrinks to 0.5 after a negative sign,
    // making the stream non-i.i.d. The engine sees loss = -F, mean = 0.
    std::vector<double> amplitude;
    bool mds_momentum = false;

    static Scenario bernoulli_iid(std::vector<double> p, std::uint64_t horizon);
    static Scenario uniform_bounded(std::vector<double> lo, std::vector<double> hi,
                                    std::uint64_t horizon);
    static Scenario gaussian(std::vector<double> mean, std::vector<double> sd,
                             std::uint64_t horizon);
    static Scenario pareto_heavy(std::vector<double> scale, double tail_b, double moment_p,
                                 std::uint64_t horizon);
    static Scenario sampling_without_replacement(std::vector<std::vector<double>> urn,
                                                 std::uint64_t horizon);
    static Scenario mds_bounded(std::vector<double> amplitude, bool momentum,
                                std::uint64_t horizon);

    // Marginal mean of the loss per theta (constant over time for every kind
    // here; zero for MdsBounded).
    std::vector<double> true_risk() const;
    // A subGaussian scale valid for every theta and step, NaN for ParetoHeavy.
    double common_sigma() const;
    bool nonnegative_losses() const { return kind != ScenarioKind::MdsBounded; }
    bool iid() const;
    bool exchangeable() const;
    bool bounded_01() const;
};

// Conditional oracle values for the upcoming step, computed before the draw.
struct StepData {
    std::vector<double> loss;
    std::vector<double> cond_mean;
    std::vector<double> raw_second_moment;    // E[f^2 | past] per theta
    std::vector<double> delta_second_moment;  // Var(f | past) per theta
    std::vector<double> log_mgf;              // ln E[exp(lambda f) | past] per theta
    double sigma_sub = kNaN;                  // subGaussian scale, uniform over theta
    double std_bound = kNaN;                  // conditional standard deviation bound
    double range = kNaN;                      // H_t with |f| <= H_t (NaN if unbounded)
    double bern_c = kNaN;                     // Bernstein-condition scale
    double kappa = kNaN;                      // p-th central moment bound
    double p = kNaN;
};

// One replication's sampler. Deterministic given (seed, rep).
class ScenarioStream {
  public:
    ScenarioStream(const Scenario& scenario, std::uint64_t seed, std::uint64_t rep);

    // Fill conditional oracles, then realize the losses and advance. If
    // mgf_lambda is not NaN the per-theta conditional log-MGF at that weight
    // is filled; SamplingWithoutReplacement supports one fixed mgf_lambda per
    // stream (incremental exponential sums).
    void next(double mgf_lambda, StepData& out);

    std::uint64_t step_count() const { return t_; }

  private:
    void oracles(double mgf_lambda, StepData& out);
    void draw(StepData& out);

    const Scenario& sc_;
    CounterRng rng_;
    std::uint64_t t_ = 0;
    // SamplingWithoutReplacement bookkeeping
    std::vector<std::uint32_t> order_;
    std::vector<double> rem_sum_, rem_sq_;
    std::vector<double> rem_exp_;
    double mgf_lambda_prepared_ = kNaN;
    std::size_t remaining_ = 0;
    // MdsBounded predictable scale
    double mds_scale_ = 1.0;
};

}  // namespace avpb
