#pragma once

#include <cstdint>
#include <vector>

namespace avpb {

// A nonnegative predictable weight sequence (lambda_t)_{t>=1}.
//
// Kinds:
//   constant(l)     lambda_i = l
//   target(l, n)    lambda_i = l/n; tuned so a fixed-time bound is recovered
//                   exactly at t = n
//   sqrt_log(c)     lambda_t = c / sqrt(t * ln(t+1)), capped at its t=1 value
//   explicit_list   caller-supplied values; out-of-range access throws
//
// at(i) is pure and safe to call concurrently. cum/cum_sq recompute their
// prefix sums (compensated) on each call.
class LambdaSchedule {
  public:
    static LambdaSchedule constant(double lambda);
    static LambdaSchedule target(double lambda, std::uint64_t n);
    static LambdaSchedule sqrt_log(double c);
    static LambdaSchedule explicit_list(std::vector<double> values);

    // 1-based step index.
    double at(std::uint64_t i) const;
    // sum_{i<=t} lambda_i and sum_{i<=t} lambda_i^2.
    double cum(std::uint64_t t) const;
    double cum_sq(std::uint64_t t) const;

    enum class Kind { Constant, Target, SqrtLog, Explicit };
    Kind kind() const { return kind_; }

  private:
    LambdaSchedule(Kind kind, double a, std::uint64_t n, std::vector<double> values);

    Kind kind_;
    double a_ = 0.0;       // lambda or c
    std::uint64_t n_ = 0;  // target time
    std::vector<double> values_;
};

}  // namespace avpb
