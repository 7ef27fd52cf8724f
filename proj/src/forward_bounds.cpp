#include "avpb/forward_bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "avpb/divergences.hpp"

namespace avpb {

namespace {

constexpr double kEMinus2 = 0.71828182845904523536;  // e - 2

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(std::string("ForwardBoundState: ") + msg);
}

void require_vector(const std::vector<double>& v, std::size_t k, const char* name) {
    if (v.size() != k)
        throw std::invalid_argument(std::string("ForwardBoundState: missing or missized field ") +
                                    name);
    for (double x : v)
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string("ForwardBoundState: nonfinite entry in ") +
                                        name);
}

void require_scalar(double x, const char* name) {
    if (!std::isfinite(x))
        throw std::invalid_argument(std::string("ForwardBoundState: missing scalar field ") + name);
}

double check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("ForwardBoundState: delta must lie in (0,1)");
    return std::log(1.0 / delta);
}

}  // namespace

const char* to_string(ForwardKind kind) {
    switch (kind) {
        case ForwardKind::SubGaussian: return "subgaussian";
        case ForwardKind::GaussianMixture: return "gaussian-mixture";
        case ForwardKind::BernsteinBounded: return "bernstein";
        case ForwardKind::Bennett: return "bennett";
        case ForwardKind::BernsteinCondition: return "bernstein-cond";
        case ForwardKind::BoundedMGF: return "mgf";
        case ForwardKind::SecondMoment: return "second-moment";
        case ForwardKind::BercuTouati: return "bercu";
        case ForwardKind::PthMoment: return "pth-moment";
    }
    return "?";
}

double psi_bennett(double x) { return std::expm1(x) - x; }

double zeta_p(double x, double p) {
    if (!(p > 1.0 && p <= 2.0)) throw std::domain_error("zeta_p: p must lie in (1,2]");
    if (x <= 0.0) return x;
    return std::log1p(x + std::pow(x, p) / p);
}

double log_gaussian_mixture(double dev, double var, double beta) {
    if (!(beta > 0.0)) throw std::domain_error("log_gaussian_mixture: beta must be positive");
    if (!(var >= 0.0)) throw std::domain_error("log_gaussian_mixture: negative variance sum");
    const double u = 1.0 + beta * var;
    return -0.5 * std::log(u) + beta * dev * dev / (2.0 * u);
}

ForwardBoundState::ForwardBoundState(ForwardKind kind, std::size_t theta_count)
    : kind_(kind), theta_count_(theta_count) {
    require(theta_count > 0, "theta_count must be positive");
    lhs_theta_.assign(theta_count, 0.0);
    switch (kind_) {
        case ForwardKind::BernsteinBounded:
        case ForwardKind::Bennett:
        case ForwardKind::BoundedMGF:
        case ForwardKind::SecondMoment:
        case ForwardKind::PthMoment:
            dev_theta_.assign(theta_count, 0.0);
            break;
        case ForwardKind::BercuTouati:
            dev_theta_.assign(theta_count, 0.0);
            dev_theta_alt_.assign(theta_count, 0.0);
            break;
        default:
            break;
    }
}

void ForwardBoundState::check_obs(const LambdaSchedule&, const StepObservation& obs,
                                  double lambda) const {
    require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be finite and >= 0");
    require_vector(obs.loss, theta_count_, "loss");
    switch (kind_) {
        case ForwardKind::SubGaussian:
            require_vector(obs.cond_mean, theta_count_, "cond_mean");
            require_scalar(obs.sigma_sub, "sigma_sub");
            if (std::isfinite(obs.bern_c) && obs.bern_c > 0.0)
                require(lambda <= 1.0 / obs.bern_c, "subexponential cap lambda <= 1/c violated");
            break;
        case ForwardKind::GaussianMixture:
            require_vector(obs.cond_mean, theta_count_, "cond_mean");
            require_scalar(obs.sigma_sub, "sigma_sub");
            break;
        case ForwardKind::BernsteinBounded:
            require_vector(obs.cond_mean, theta_count_, "cond_mean");
            require_vector(obs.second_moment, theta_count_, "second_moment");
            require_scalar(obs.range, "range");
            require(obs.range > 0.0, "range must be positive");
            require(lambda <= 1.0 / obs.range, "cap lambda <= 1/H violated");
            break;
        case ForwardKind::Bennett:
            require_vector(obs.cond_mean, theta_count_, "cond_mean");
            require_scalar(obs.range, "range");
            require(obs.range > 0.0, "range must be positive");
            for (double m : obs.cond_mean) require(m <= obs.range, "cond_mean exceeds range");
            break;
        case ForwardKind::BernsteinCondition:
            require_vector(obs.cond_mean, theta_count_, "cond_mean");
            require_scalar(obs.sigma_sub, "sigma_sub");
            require_scalar(obs.bern_c, "bern_c");
            require(obs.bern_c > 0.0, "bern_c must be positive");
            require(lambda < 1.0 / obs.bern_c, "cap lambda < 1/c violated");
            break;
        case ForwardKind::BoundedMGF:
            require_vector(obs.log_mgf, theta_count_, "log_mgf");
            for (double x : obs.loss) require(x >= 0.0, "losses must be nonnegative");
            break;
        case ForwardKind::SecondMoment:
            require_vector(obs.cond_mean, theta_count_, "cond_mean");
            require_vector(obs.second_moment, theta_count_, "second_moment");
            for (double x : obs.loss) require(x >= 0.0, "losses must be nonnegative");
            break;
        case ForwardKind::BercuTouati:
            require_vector(obs.cond_mean, theta_count_, "cond_mean");
            require_vector(obs.second_moment, theta_count_, "second_moment");
            break;
        case ForwardKind::PthMoment:
            require_vector(obs.cond_mean, theta_count_, "cond_mean");
            require_scalar(obs.kappa, "kappa");
            require_scalar(obs.p, "p");
            require(obs.kappa > 0.0, "kappa must be positive");
            require(obs.p > 1.0 && obs.p <= 2.0, "p must lie in (1,2]");
            break;
    }
}

void ForwardBoundState::update(const LambdaSchedule& schedule, const StepObservation& obs) {
    const double lam = schedule.at(t_ + 1);
    check_obs(schedule, obs, lam);
    const std::size_t K = theta_count_;

    switch (kind_) {
        case ForwardKind::SubGaussian:
            dev_scalar_.add(lam * lam * obs.sigma_sub * obs.sigma_sub / 2.0);
            for (std::size_t i = 0; i < K; ++i)
                lhs_theta_[i] += lam * (obs.cond_mean[i] - obs.loss[i]);
            cum_lambda_.add(lam);
            break;
        case ForwardKind::GaussianMixture:
            // Unit weights: the mixture integrates the weight out.
            var_sum_.add(obs.sigma_sub * obs.sigma_sub);
            for (std::size_t i = 0; i < K; ++i) lhs_theta_[i] += obs.cond_mean[i] - obs.loss[i];
            cum_lambda_.add(1.0);
            break;
        case ForwardKind::BernsteinBounded:
            for (std::size_t i = 0; i < K; ++i) {
                dev_theta_[i] += lam * lam * kEMinus2 * obs.second_moment[i];
                lhs_theta_[i] += lam * (obs.cond_mean[i] - obs.loss[i]);
            }
            cum_lambda_.add(lam);
            break;
        case ForwardKind::Bennett: {
            const double shape = psi_bennett(lam * obs.range) / (obs.range * obs.range);
            for (std::size_t i = 0; i < K; ++i) {
                dev_theta_[i] += obs.cond_mean[i] * obs.cond_mean[i] * shape;
                lhs_theta_[i] += lam * (obs.cond_mean[i] - obs.loss[i]);
            }
            cum_lambda_.add(lam);
            break;
        }
        case ForwardKind::BernsteinCondition:
            dev_scalar_.add(lam * lam * obs.sigma_sub * obs.sigma_sub /
                            (2.0 * (1.0 - obs.bern_c * lam)));
            for (std::size_t i = 0; i < K; ++i)
                lhs_theta_[i] += lam * (obs.cond_mean[i] - obs.loss[i]);
            cum_lambda_.add(lam);
            break;
        case ForwardKind::BoundedMGF:
            for (std::size_t i = 0; i < K; ++i) {
                dev_theta_[i] += obs.log_mgf[i];
                lhs_theta_[i] += lam * obs.loss[i];
            }
            cum_lambda_.add(lam);
            break;
        case ForwardKind::SecondMoment:
            for (std::size_t i = 0; i < K; ++i) {
                dev_theta_[i] += lam * lam / 2.0 * obs.second_moment[i];
                lhs_theta_[i] += lam * (obs.cond_mean[i] - obs.loss[i]);
            }
            cum_lambda_.add(lam);
            break;
        case ForwardKind::BercuTouati:
            for (std::size_t i = 0; i < K; ++i) {
                const double d = obs.cond_mean[i] - obs.loss[i];
                const double var =
                    obs.second_moment[i] - obs.cond_mean[i] * obs.cond_mean[i];
                dev_theta_[i] += lam * lam / 6.0 * (d * d + 2.0 * var);
                dev_theta_alt_[i] += lam * lam / 6.0 *
                                     (obs.loss[i] * obs.loss[i] + 2.0 * obs.second_moment[i]);
                lhs_theta_[i] += lam * d;
                if (obs.loss[i] < 0.0) saw_negative_loss_ = true;
            }
            cum_lambda_.add(lam);
            break;
        case ForwardKind::PthMoment:
            dev_scalar_.add(std::log1p(std::pow(lam, obs.p) * obs.kappa / obs.p));
            for (std::size_t i = 0; i < K; ++i)
                lhs_theta_[i] += zeta_p(lam * (obs.cond_mean[i] - obs.loss[i]), obs.p);
            cum_lambda_.add(lam);
            break;
    }
    ++t_;
}

double ForwardBoundState::deviation_term(const FiniteMixture& posterior) const {
    if (posterior.support_size() != theta_count_)
        throw std::invalid_argument("ForwardBoundState: posterior support mismatch");
    switch (kind_) {
        case ForwardKind::SubGaussian:
        case ForwardKind::BernsteinCondition:
        case ForwardKind::PthMoment:
            return dev_scalar_.value();
        case ForwardKind::GaussianMixture:
            throw std::logic_error("ForwardBoundState: GaussianMixture has no additive deviation");
        case ForwardKind::BercuTouati:
            return posterior.expect(dev_theta_);
        default:
            return posterior.expect(dev_theta_);
    }
}

double ForwardBoundState::rhs(const FiniteMixture& posterior, const FiniteMixture& prior,
                              double delta) const {
    return rhs_with_kl(posterior, kl_divergence(posterior, prior), delta);
}

double ForwardBoundState::rhs_with_kl(const FiniteMixture& posterior, double kl,
                                      double delta) const {
    if (kind_ == ForwardKind::GaussianMixture) return gaussian_mixture_rhs(kl, delta);
    return deviation_term(posterior) + kl + check_delta(delta);
}

std::vector<double> ForwardBoundState::default_beta_sweep() {
    std::vector<double> betas(41);
    for (int i = 0; i <= 40; ++i) betas[i] = std::exp2(-10.0 + 0.5 * i);
    return betas;
}

double ForwardBoundState::gaussian_mixture_rhs(std::span<const double> betas, double kl,
                                               double delta) const {
    if (kind_ != ForwardKind::GaussianMixture)
        throw std::logic_error("gaussian_mixture_rhs: wrong kind");
    if (betas.empty()) throw std::invalid_argument("gaussian_mixture_rhs: empty beta sweep");
    if (!(kl >= 0.0)) throw std::domain_error("gaussian_mixture_rhs: kl must be >= 0");
    const double log_inv_delta = check_delta(delta);
    double best = kInf;
    for (double beta : betas) {
        if (!(beta > 0.0)) throw std::domain_error("gaussian_mixture_rhs: beta must be positive");
        const double s = 1.0 + beta * var_sum_.value();
        const double v = std::sqrt(s / beta * (kl + std::log(s) + log_inv_delta));
        best = std::min(best, v);
    }
    return best;
}

double ForwardBoundState::gaussian_mixture_rhs(double kl, double delta) const {
    const auto betas = default_beta_sweep();
    return gaussian_mixture_rhs(betas, kl, delta);
}

double ForwardBoundState::bercu_rhs(const FiniteMixture& posterior, double kl, double delta,
                                    bool simplified) const {
    if (kind_ != ForwardKind::BercuTouati) throw std::logic_error("bercu_rhs: wrong kind");
    if (simplified && saw_negative_loss_)
        throw std::invalid_argument("bercu_rhs: simplified form requires nonnegative losses");
    const double dev = posterior.expect(simplified ? dev_theta_alt_ : dev_theta_);
    return dev + kl + check_delta(delta);
}

double ForwardBoundState::gap_lhs(const FiniteMixture& posterior) const {
    return posterior.expect(lhs_theta_);
}

}  // namespace avpb
