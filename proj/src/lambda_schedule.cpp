#include "avpb/lambda_schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "avpb/numeric.hpp"

namespace avpb {

LambdaSchedule::LambdaSchedule(Kind kind, double a, std::uint64_t n, std::vector<double> values)
    : kind_(kind), a_(a), n_(n), values_(std::move(values)) {}

LambdaSchedule LambdaSchedule::constant(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("LambdaSchedule: lambda must be >= 0");
    return LambdaSchedule(Kind::Constant, lambda, 0, {});
}

LambdaSchedule LambdaSchedule::target(double lambda, std::uint64_t n) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("LambdaSchedule: lambda must be >= 0");
    if (n == 0) throw std::invalid_argument("LambdaSchedule: target time must be >= 1");
    return LambdaSchedule(Kind::Target, lambda, n, {});
}

LambdaSchedule LambdaSchedule::sqrt_log(double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("LambdaSchedule: c must be >= 0");
    return LambdaSchedule(Kind::SqrtLog, c, 0, {});
}

LambdaSchedule LambdaSchedule::explicit_list(std::vector<double> values) {
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("LambdaSchedule: explicit values must be finite and >= 0");
    return LambdaSchedule(Kind::Explicit, 0.0, 0, std::move(values));
}

double LambdaSchedule::at(std::uint64_t i) const {
    if (i == 0) throw std::invalid_argument("LambdaSchedule: steps are 1-based");
    switch (kind_) {
        case Kind::Constant:
            return a_;
        case Kind::Target:
            return a_ / static_cast<double>(n_);
        case Kind::SqrtLog: {
            const double t = static_cast<double>(i);
            const double v = a_ / std::sqrt(t * std::log(t + 1.0));
            const double cap = a_ / std::sqrt(std::log(2.0));
            return v < cap ? v : cap;
        }
        case Kind::Explicit:
            if (i > values_.size())
                throw std::invalid_argument("LambdaSchedule: explicit schedule exhausted");
            return values_[i - 1];
    }
    return 0.0;
}

double LambdaSchedule::cum(std::uint64_t t) const {
    KahanSum s;
    for (std::uint64_t i = 1; i <= t; ++i) s.add(at(i));
    return s.value();
}

double LambdaSchedule::cum_sq(std::uint64_t t) const {
    KahanSum s;
    for (std::uint64_t i = 1; i <= t; ++i) {
        const double l = at(i);
        s.add(l * l);
    }
    return s.value();
}

}  // namespace avpb
