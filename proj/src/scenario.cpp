#include "avpb/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace avpb {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument("Scenario: " + msg);
}

}  // namespace

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::BernoulliIid: return "bernoulli_iid";
        case ScenarioKind::UniformBounded: return "uniform_bounded";
        case ScenarioKind::Gaussian: return "gaussian";
        case ScenarioKind::ParetoHeavy: return "pareto_heavy";
        case ScenarioKind::SamplingWithoutReplacement: return "sampling_without_replacement";
        case ScenarioKind::MdsBounded: return "mds_bounded";
    }
    return "?";
}

Scenario Scenario::bernoulli_iid(std::vector<double> p, std::uint64_t horizon) {
    require(!p.empty() && horizon >= 1, "need parameters and horizon >= 1");
    for (double x : p) require(x > 0.0 && x < 1.0, "bernoulli p must lie in (0,1)");
    Scenario s;
    s.kind = ScenarioKind::BernoulliIid;
    s.theta_count = p.size();
    s.horizon = horizon;
    s.p = std::move(p);
    return s;
}

Scenario Scenario::uniform_bounded(std::vector<double> lo, std::vector<double> hi,
                                   std::uint64_t horizon) {
    require(!lo.empty() && lo.size() == hi.size() && horizon >= 1, "bad uniform parameters");
    for (std::size_t i = 0; i < lo.size(); ++i)
        require(lo[i] >= 0.0 && hi[i] >= lo[i] && std::isfinite(hi[i]),
                "uniform needs 0 <= lo <= hi");
    Scenario s;
    s.kind = ScenarioKind::UniformBounded;
    s.theta_count = lo.size();
    s.horizon = horizon;
    s.lo = std::move(lo);
    s.hi = std::move(hi);
    return s;
}

Scenario Scenario::gaussian(std::vector<double> mean, std::vector<double> sd,
                            std::uint64_t horizon) {
    require(!mean.empty() && mean.size() == sd.size() && horizon >= 1, "bad gaussian parameters");
    for (std::size_t i = 0; i < mean.size(); ++i)
        require(std::isfinite(mean[i]) && sd[i] > 0.0, "gaussian needs finite mean, sd > 0");
    Scenario s;
    s.kind = ScenarioKind::Gaussian;
    s.theta_count = mean.size();
    s.horizon = horizon;
    s.mean = std::move(mean);
    s.sd = std::move(sd);
    return s;
}

Scenario Scenario::pareto_heavy(std::vector<double> scale, double tail_b, double moment_p,
                                std::uint64_t horizon) {
    require(!scale.empty() && horizon >= 1, "need parameters and horizon >= 1");
    require(moment_p > 1.0 && moment_p <= 2.0, "moment_p must lie in (1,2]");
    require(tail_b > 1.0 && tail_b > 2.0 / moment_p,
            "tail_b must exceed max(1, 2/moment_p) so second moments exist");
    for (double x : scale) require(x > 0.0 && std::isfinite(x), "scale must be positive");
    Scenario s;
    s.kind = ScenarioKind::ParetoHeavy;
    s.theta_count = scale.size();
    s.horizon = horizon;
    s.scale = std::move(scale);
    s.tail_b = tail_b;
    s.moment_p = moment_p;
    return s;
}

Scenario Scenario::sampling_without_replacement(std::vector<std::vector<double>> urn,
                                                std::uint64_t horizon) {
    require(!urn.empty() && horizon >= 1, "need parameters and horizon >= 1");
    const std::size_t n = urn.front().size();
    require(n >= horizon, "urn must hold at least `horizon` balls");
    for (const auto& u : urn) {
        require(u.size() == n, "urns must share one ball count");
        for (double v : u) require(v >= 0.0 && std::isfinite(v), "urn values must be >= 0");
    }
    Scenario s;
    s.kind = ScenarioKind::SamplingWithoutReplacement;
    s.theta_count = urn.size();
    s.horizon = horizon;
    s.urn = std::move(urn);
    return s;
}

Scenario Scenario::mds_bounded(std::vector<double> amplitude, bool momentum,
                               std::uint64_t horizon) {
    require(!amplitude.empty() && horizon >= 1, "need parameters and horizon >= 1");
    for (double a : amplitude) require(a > 0.0 && std::isfinite(a), "amplitude must be positive");
    Scenario s;
    s.kind = ScenarioKind::MdsBounded;
    s.theta_count = amplitude.size();
    s.horizon = horizon;
    s.amplitude = std::move(amplitude);
    s.mds_momentum = momentum;
    return s;
}

std::vector<double> Scenario::true_risk() const {
    std::vector<double> r(theta_count);
    switch (kind) {
        case ScenarioKind::BernoulliIid:
            r = p;
            break;
        case ScenarioKind::UniformBounded:
            for (std::size_t i = 0; i < theta_count; ++i) r[i] = 0.5 * (lo[i] + hi[i]);
            break;
        case ScenarioKind::Gaussian:
            for (std::size_t i = 0; i < theta_count; ++i) {
                const double z = mean[i] / sd[i];
                r[i] = mean[i] * normal_cdf(z) + sd[i] * normal_pdf(z);
            }
            break;
        case ScenarioKind::ParetoHeavy: {
            const double m1 = tail_b / (tail_b - 1.0 / moment_p);
            for (std::size_t i = 0; i < theta_count; ++i) r[i] = scale[i] * m1;
            break;
        }
        case ScenarioKind::SamplingWithoutReplacement:
            for (std::size_t i = 0; i < theta_count; ++i) {
                const auto& u = urn[i];
                r[i] = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(u.size());
            }
            break;
        case ScenarioKind::MdsBounded:
            break;  // centered
    }
    return r;
}

double Scenario::common_sigma() const {
    double s = 0.0;
    switch (kind) {
        case ScenarioKind::BernoulliIid:
            return 0.5;
        case ScenarioKind::UniformBounded:
            for (std::size_t i = 0; i < theta_count; ++i) s = std::max(s, 0.5 * (hi[i] - lo[i]));
            return s;
        case ScenarioKind::Gaussian:
            for (double x : sd) s = std::max(s, x);
            return s;
        case ScenarioKind::ParetoHeavy:
            return kNaN;
        case ScenarioKind::SamplingWithoutReplacement:
            for (const auto& u : urn) {
                const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
                s = std::max(s, 0.5 * (*mx - *mn));
            }
            return s;
        case ScenarioKind::MdsBounded:
            for (double a : amplitude) s = std::max(s, a);
            return s;
    }
    return kNaN;
}

bool Scenario::iid() const {
    switch (kind) {
        case ScenarioKind::SamplingWithoutReplacement:
            return false;
        case ScenarioKind::MdsBounded:
            return !mds_momentum;
        default:
            return true;
    }
}

bool Scenario::exchangeable() const {
    return iid() || kind == ScenarioKind::SamplingWithoutReplacement;
}

bool Scenario::bounded_01() const {
    switch (kind) {
        case ScenarioKind::BernoulliIid:
            return true;
        case ScenarioKind::UniformBounded:
            for (std::size_t i = 0; i < theta_count; ++i)
                if (hi[i] > 1.0) return false;
            return true;
        case ScenarioKind::SamplingWithoutReplacement:
            for (const auto& u : urn)
                for (double v : u)
                    if (v > 1.0) return false;
            return true;
        default:
            return false;
    }
}

ScenarioStream::ScenarioStream(const Scenario& scenario, std::uint64_t seed, std::uint64_t rep)
    : sc_(scenario), rng_(seed, rep, /*stream=*/0) {
    if (sc_.kind == ScenarioKind::SamplingWithoutReplacement) {
        const std::size_t n = sc_.urn.front().size();
        order_.resize(n);
        for (std::size_t i = 0; i < n; ++i) order_[i] = static_cast<std::uint32_t>(i);
        remaining_ = n;
        rem_sum_.assign(sc_.theta_count, 0.0);
        rem_sq_.assign(sc_.theta_count, 0.0);
        for (std::size_t k = 0; k < sc_.theta_count; ++k)
            for (double v : sc_.urn[k]) {
                rem_sum_[k] += v;
                rem_sq_[k] += v * v;
            }
    }
}

void ScenarioStream::oracles(double mgf_lambda, StepData& out) {
    const std::size_t K = sc_.theta_count;
    out.cond_mean.resize(K);
    out.raw_second_moment.resize(K);
    out.delta_second_moment.resize(K);
    out.log_mgf.clear();
    out.sigma_sub = out.std_bound = out.range = out.bern_c = out.kappa = out.p = kNaN;

    switch (sc_.kind) {
        case ScenarioKind::BernoulliIid: {
            double vmax = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double p = sc_.p[k];
                out.cond_mean[k] = p;
                out.raw_second_moment[k] = p;
                out.delta_second_moment[k] = p * (1.0 - p);
                vmax = std::max(vmax, p * (1.0 - p));
            }
            out.sigma_sub = 0.5;
            out.std_bound = std::sqrt(vmax);
            out.range = 1.0;
            out.bern_c = 1.0;
            if (!std::isnan(mgf_lambda)) {
                out.log_mgf.resize(K);
                for (std::size_t k = 0; k < K; ++k)
                    out.log_mgf[k] =
                        std::log(1.0 - sc_.p[k] + sc_.p[k] * std::exp(mgf_lambda));
            }
            break;
        }
        case ScenarioKind::UniformBounded: {
            double w = 0.0, h = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double a = sc_.lo[k], b = sc_.hi[k];
                out.cond_mean[k] = 0.5 * (a + b);
                out.raw_second_moment[k] = (a * a + a * b + b * b) / 3.0;
                out.delta_second_moment[k] = (b - a) * (b - a) / 12.0;
                w = std::max(w, b - a);
                h = std::max(h, b);
            }
            out.sigma_sub = 0.5 * w;
            out.std_bound = w / std::sqrt(12.0);
            out.range = h;
            out.bern_c = w;
            if (!std::isnan(mgf_lambda))
                throw std::invalid_argument("ScenarioStream: no MGF oracle for uniform_bounded");
            break;
        }
        case ScenarioKind::Gaussian: {
            double smax = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double m = sc_.mean[k], s = sc_.sd[k];
                const double z = m / s;
                out.cond_mean[k] = m * normal_cdf(z) + s * normal_pdf(z);
                out.raw_second_moment[k] = (m * m + s * s) * normal_cdf(z) + m * s * normal_pdf(z);
                out.delta_second_moment[k] =
                    out.raw_second_moment[k] - out.cond_mean[k] * out.cond_mean[k];
                smax = std::max(smax, s);
            }
            out.sigma_sub = smax;
            out.std_bound = smax;
            if (!std::isnan(mgf_lambda))
                throw std::invalid_argument("ScenarioStream: no MGF oracle for gaussian");
            break;
        }
        case ScenarioKind::ParetoHeavy: {
            const double b = sc_.tail_b, p = sc_.moment_p;
            const double m1 = b / (b - 1.0 / p);
            const double m2 = b / (b - 2.0 / p);
            const double mv = b / (b - 1.0);  // E V = E (V^{1/p})^p
            double kap = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double c = sc_.scale[k];
                out.cond_mean[k] = c * m1;
                out.raw_second_moment[k] = c * c * m2;
                out.delta_second_moment[k] =
                    out.raw_second_moment[k] - out.cond_mean[k] * out.cond_mean[k];
                // |f - mu|^p <= 2^{p-1} (f^p + mu^p) termwise
                kap = std::max(kap, std::exp2(p - 1.0) *
                                        (std::pow(c, p) * mv + std::pow(c * m1, p)));
            }
            out.kappa = kap;
            out.p = p;
            if (!std::isnan(mgf_lambda))
                throw std::invalid_argument("ScenarioStream: no MGF oracle for pareto_heavy");
            break;
        }
        case ScenarioKind::SamplingWithoutReplacement: {
            const double cnt = static_cast<double>(remaining_);
            double vb = 0.0, h = 0.0, w = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const auto& u = sc_.urn[k];
                out.cond_mean[k] = rem_sum_[k] / cnt;
                out.raw_second_moment[k] = rem_sq_[k] / cnt;
                out.delta_second_moment[k] = std::max(
                    0.0, out.raw_second_moment[k] - out.cond_mean[k] * out.cond_mean[k]);
                vb = std::max(vb, out.delta_second_moment[k]);
                const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
                h = std::max(h, *mx);
                w = std::max(w, *mx - *mn);
            }
            out.sigma_sub = 0.5 * w;
            out.std_bound = std::sqrt(vb);
            out.range = std::max(h, 1e-300);
            out.bern_c = std::max(w, 1e-300);
            if (!std::isnan(mgf_lambda)) {
                if (std::isnan(mgf_lambda_prepared_)) {
                    mgf_lambda_prepared_ = mgf_lambda;
                    rem_exp_.assign(K, 0.0);
                    for (std::size_t k = 0; k < K; ++k) {
                        double s = 0.0;
                        for (std::size_t j = 0; j < remaining_; ++j)
                            s += std::exp(mgf_lambda * sc_.urn[k][order_[j]]);
                        rem_exp_[k] = s;
                    }
                } else if (mgf_lambda != mgf_lambda_prepared_) {
                    throw std::logic_error(
                        "ScenarioStream: sampling-without-replacement MGF oracle is prepared "
                        "for one fixed lambda");
                }
                out.log_mgf.resize(K);
                for (std::size_t k = 0; k < K; ++k)
                    out.log_mgf[k] = std::log(rem_exp_[k] / cnt);
            }
            break;
        }
        case ScenarioKind::MdsBounded: {
            double amax = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double as = sc_.amplitude[k] * mds_scale_;
                out.cond_mean[k] = 0.0;
                out.raw_second_moment[k] = as * as;
                out.delta_second_moment[k] = as * as;
                amax = std::max(amax, as);
            }
            out.sigma_sub = amax;
            out.std_bound = amax;
            out.range = amax;
            out.bern_c = amax;
            if (!std::isnan(mgf_lambda))
                throw std::invalid_argument("ScenarioStream: no MGF oracle for mds_bounded");
            break;
        }
    }
}

void ScenarioStream::draw(StepData& out) {
    const std::size_t K = sc_.theta_count;
    out.loss.resize(K);
    switch (sc_.kind) {
        case ScenarioKind::BernoulliIid: {
            const double u = rng_.uniform();
            for (std::size_t k = 0; k < K; ++k) out.loss[k] = u < sc_.p[k] ? 1.0 : 0.0;
            break;
        }
        case ScenarioKind::UniformBounded: {
            const double u = rng_.uniform();
            for (std::size_t k = 0; k < K; ++k)
                out.loss[k] = sc_.lo[k] + (sc_.hi[k] - sc_.lo[k]) * u;
            break;
        }
        case ScenarioKind::Gaussian: {
            const double g = rng_.normal();
            for (std::size_t k = 0; k < K; ++k)
                out.loss[k] = std::max(0.0, sc_.mean[k] + sc_.sd[k] * g);
            break;
        }
        case ScenarioKind::ParetoHeavy: {
            const double u = rng_.uniform();
            const double v = std::pow(1.0 - u, -1.0 / sc_.tail_b);
            const double w = std::pow(v, 1.0 / sc_.moment_p);
            for (std::size_t k = 0; k < K; ++k) out.loss[k] = sc_.scale[k] * w;
            break;
        }
        case ScenarioKind::SamplingWithoutReplacement: {
            const double u = rng_.uniform();
            std::size_t idx = static_cast<std::size_t>(u * static_cast<double>(remaining_));
            if (idx >= remaining_) idx = remaining_ - 1;
            std::swap(order_[idx], order_[remaining_ - 1]);
            const std::uint32_t ball = order_[remaining_ - 1];
            --remaining_;
            for (std::size_t k = 0; k < K; ++k) {
                const double v = sc_.urn[k][ball];
                out.loss[k] = v;
                rem_sum_[k] -= v;
                rem_sq_[k] -= v * v;
                if (!rem_exp_.empty()) rem_exp_[k] -= std::exp(mgf_lambda_prepared_ * v);
            }
            break;
        }
        case ScenarioKind::MdsBounded: {
            const double u = rng_.uniform();
            const double sign = u < 0.5 ? -1.0 : 1.0;
            // the engine consumes loss = -F with conditional mean zero
            for (std::size_t k = 0; k < K; ++k)
                out.loss[k] = -(sc_.amplitude[k] * mds_scale_ * sign);
            if (sc_.mds_momentum) mds_scale_ = sign > 0.0 ? 1.0 : 0.5;
            break;
        }
    }
}

void ScenarioStream::next(double mgf_lambda, StepData& out) {
    if (t_ >= sc_.horizon) throw std::logic_error("ScenarioStream: past horizon");
    if (sc_.kind == ScenarioKind::SamplingWithoutReplacement && remaining_ == 0)
        throw std::logic_error("ScenarioStream: urn exhausted");
    oracles(mgf_lambda, out);
    draw(out);
    ++t_;
}

}  // namespace avpb
