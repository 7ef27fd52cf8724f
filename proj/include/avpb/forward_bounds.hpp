#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "avpb/distributions.hpp"
#include "avpb/lambda_schedule.hpp"
#include "avpb/numeric.hpp"

namespace avpb {

// Supermartingale-backed bound family. Each kind pairs a deviation
// accumulator with the weighted gap it controls; the divergence and delta are
// supplied at query time so the posterior may change at every step.
enum class ForwardKind {
    SubGaussian,
    GaussianMixture,
    BernsteinBounded,
    Bennett,
    BernsteinCondition,
    BoundedMGF,
    SecondMoment,
    BercuTouati,
    PthMoment,
};

const char* to_string(ForwardKind kind);

// e^x - x - 1; the Bennett deviation shape.
double psi_bennett(double x);

// Influence function: x for x <= 0, ln(1 + x + |x|^p/p) for x > 0.
// Nondecreasing and everywhere below ln(1 + x + |x|^p/p).
double zeta_p(double x, double p);

// ln of the Gaussian-mixture value integral exp(l*dev - l^2*var/2) dN(0,beta)(l)
//   = -ln(1 + beta*var)/2 + beta*dev^2 / (2*(1 + beta*var)).
double log_gaussian_mixture(double dev, double var, double beta);

// One step of oracle information, given as vectors over the finite parameter
// set. `second_moment` is kind-dependent: the conditional second moment of
// the deviation E[Delta^2|F] for BernsteinBounded, the raw conditional second
// moment E[f^2|F] for SecondMoment and BercuTouati. `log_mgf` is the per-theta
// conditional log-MGF ln E[exp(lambda_i f)|F] at this step's lambda.
struct StepObservation {
    std::vector<double> loss;
    std::vector<double> cond_mean;
    std::vector<double> second_moment;
    std::vector<double> log_mgf;
    double sigma_sub = kNaN;  // subGaussian scale / variance-bound sigma_i
    double range = kNaN;      // H_i
    double bern_c = kNaN;     // c_i (Bernstein condition / subexponential cap)
    double kappa = kNaN;      // p-th moment bound
    double p = kNaN;          // moment order, in (1,2]
};

class ForwardBoundState {
  public:
    ForwardBoundState(ForwardKind kind, std::size_t theta_count);

    // Advance one step. lambda_i = schedule.at(t+1); validates the fields the
    // kind requires and the kind's lambda cap. GaussianMixture ignores the
    // schedule (its weight is mixed out; steps carry unit weight).
    void update(const LambdaSchedule& schedule, const StepObservation& obs);

    ForwardKind kind() const { return kind_; }
    std::size_t theta_count() const { return theta_count_; }
    std::uint64_t step_count() const { return t_; }
    double cum_lambda() const { return cum_lambda_.value(); }

    // Deviation accumulator averaged under the posterior (the rhs minus
    // divergence and confidence terms). BercuTouati reports its tight form.
    double deviation_term(const FiniteMixture& posterior) const;

    // Full right-hand side: deviation + kl + ln(1/delta). For GaussianMixture
    // this routes through the default beta sweep.
    double rhs(const FiniteMixture& posterior, const FiniteMixture& prior, double delta) const;
    double rhs_with_kl(const FiniteMixture& posterior, double kl, double delta) const;

    // min over beta of sqrt((s/beta) * (kl + ln(s/delta))), s = 1 + beta*sum sigma_i^2.
    double gaussian_mixture_rhs(std::span<const double> betas, double kl, double delta) const;
    double gaussian_mixture_rhs(double kl, double delta) const;  // default geometric sweep
    static std::vector<double> default_beta_sweep();             // 2^-10 .. 2^10, 41 points

    // BercuTouati with an explicit form choice. The simplified form requires
    // nonnegative losses and is rejected if a negative loss was observed.
    double bercu_rhs(const FiniteMixture& posterior, double kl, double delta,
                     bool simplified) const;

    // The kind's left-hand functional under the posterior:
    //   sum lambda_i * E_rho[mu_i - f_i]          (most kinds)
    //   sum E_rho[mu_i - f_i]                     (GaussianMixture)
    //   sum lambda_i * E_rho[f_i]                 (BoundedMGF)
    //   sum E_rho[zeta_p(lambda_i * Delta_i)]     (PthMoment)
    double gap_lhs(const FiniteMixture& posterior) const;

  private:
    void check_obs(const LambdaSchedule& schedule, const StepObservation& obs,
                   double lambda) const;

    ForwardKind kind_;
    std::size_t theta_count_;
    std::uint64_t t_ = 0;
    KahanSum cum_lambda_;
    KahanSum dev_scalar_;               // scalar deviation accumulators
    KahanSum var_sum_;                  // GaussianMixture: sum sigma_i^2
    std::vector<double> lhs_theta_;     // kind-specific lhs, per theta
    std::vector<double> dev_theta_;     // per-theta deviation accumulators
    std::vector<double> dev_theta_alt_; // BercuTouati simplified form
    bool saw_negative_loss_ = false;
};

}  // namespace avpb
