#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avpb/confidence.hpp"
#include "avpb/distributions.hpp"
#include "avpb/forward_bounds.hpp"
#include "avpb/lambda_schedule.hpp"
#include "avpb/scenario.hpp"

namespace avpb {

// Exponential-weights posterior: weights proportional to
// prior_i * exp(-lambda_post * cum_losses_i), normalized in the log domain.
FiniteMixture gibbs_posterior(const FiniteMixture& prior, std::span<const double> cum_losses,
                              double lambda_post);

enum class BoundMethod {
    Forward,       // one of the ForwardKind accumulators
    Seeger,        // stitched reverse bounds on [0,1] i.i.d. losses
    McAllester,
    Thiemann,
    RenyiConvex,   // alpha > 1, klsf comparison, exact binomial moment oracle
    TvIpm,         // total-variation template, unit-ball function class
    MdsConvex,     // reverse template on exchangeable centered functions
    SubgaussianCs,
    StitchedCs,
};

const char* to_string(BoundMethod method);

struct BoundSpec {
    std::string name;
    BoundMethod method = BoundMethod::Forward;
    ForwardKind fkind = ForwardKind::SubGaussian;
    LambdaSchedule schedule = LambdaSchedule::constant(1.0);
    double alpha = 2.0;              // RenyiConvex
    bool bercu_simplified = false;   // Forward/BercuTouati query form
    double cs_sigma = kNaN;          // CS scale override; NaN uses the scenario's
};

struct ExperimentConfig {
    Scenario scenario;
    FiniteMixture prior;
    std::vector<BoundSpec> bounds;
    double delta = 0.05;
    bool gibbs = true;
    double gibbs_lambda = 1.0;
    // Fixed-posterior rule when gibbs = false; empty means "use the prior".
    std::vector<double> fixed_posterior;
    std::uint64_t reps = 1;
    std::uint64_t seed = 0;
};

// Per-replication record. first_violation[b] is the first t at which bound b
// had lhs > rhs, 0 if none. Row data is filled when recorded.
struct Trace {
    std::vector<std::string> bound_names;
    std::vector<std::uint64_t> first_violation;
    std::vector<std::uint64_t> ts;
    std::vector<double> kl;
    std::vector<std::vector<double>> lhs;       // [bound][row]
    std::vector<std::vector<double>> rhs;       // [bound][row]
    std::vector<std::vector<std::uint8_t>> violated;
};

struct CoverageReport {
    struct Entry {
        std::string bound;
        std::uint64_t violated_reps = 0;
        double violation_rate = 0.0;
        double std_error = 0.0;
    };
    std::vector<Entry> entries;
    std::uint64_t reps = 0;
    std::uint64_t horizon = 0;
};

// Validates the bound/scenario pairing (throws std::invalid_argument before
// any sampling) and runs one replication, deterministic in (seed, rep_index).
Trace run_trajectory(const ExperimentConfig& config, std::uint64_t rep_index);

// Aggregates run_trajectory over rep_index = 0..reps-1. Replications run
// concurrently (thread count from AVPB_THREADS, default hardware) and the
// aggregation is an ordered reduction, so the report is deterministic.
CoverageReport coverage(const ExperimentConfig& config);

}  // namespace avpb
