#include "avpb/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "avpb/divergences.hpp"
#include "avpb/numeric.hpp"
#include "avpb/reverse_bounds.hpp"
#include "avpb/stitch.hpp"

namespace avpb {

const char* to_string(BoundMethod method) {
    switch (method) {
        case BoundMethod::Forward: return "forward";
        case BoundMethod::Seeger: return "seeger";
        case BoundMethod::McAllester: return "mcallester";
        case BoundMethod::Thiemann: return "thiemann";
        case BoundMethod::RenyiConvex: return "renyi";
        case BoundMethod::TvIpm: return "ipm";
        case BoundMethod::MdsConvex: return "mds-convex";
        case BoundMethod::SubgaussianCs: return "cs-subgaussian";
        case BoundMethod::StitchedCs: return "cs-stitched";
    }
    return "?";
}

FiniteMixture gibbs_posterior(const FiniteMixture& prior, std::span<const double> cum_losses,
                              double lambda_post) {
    if (cum_losses.size() != prior.support_size())
        throw std::invalid_argument("gibbs_posterior: dimension mismatch");
    if (!(lambda_post >= 0.0))
        throw std::invalid_argument("gibbs_posterior: lambda_post must be >= 0");
    const std::size_t K = prior.support_size();
    std::vector<double> logw(K);
    double m = -kInf;
    for (std::size_t i = 0; i < K; ++i) {
        logw[i] = (prior[i] > 0.0 ? std::log(prior[i]) : -kInf) - lambda_post * cum_losses[i];
        m = std::max(m, logw[i]);
    }
    std::vector<double> w(K);
    double z = 0.0;
    for (std::size_t i = 0; i < K; ++i) z += (w[i] = std::exp(logw[i] - m));
    for (double& x : w) x /= z;
    return FiniteMixture(std::move(w));
}

namespace {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void fail(const std::string& bound, const std::string& why) {
    throw ConfigError("bound '" + bound + "': " + why);
}

void validate_config(const ExperimentConfig& cfg) {
    const Scenario& sc = cfg.scenario;
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw ConfigError("delta must lie in (0,1)");
    if (cfg.reps < 1) throw ConfigError("reps must be >= 1");
    if (cfg.prior.support_size() != sc.theta_count)
        throw ConfigError("prior support must match scenario theta count");
    if (!cfg.gibbs && !cfg.fixed_posterior.empty() &&
        cfg.fixed_posterior.size() != sc.theta_count)
        throw ConfigError("fixed posterior must match scenario theta count");
    if (cfg.bounds.empty()) throw ConfigError("no bounds configured");

    int mgf_bounds = 0;
    for (const auto& b : cfg.bounds) {
        if (b.name.empty()) throw ConfigError("bound without a name");
        const bool subgaussian_scale = std::isfinite(sc.common_sigma());
        switch (b.method) {
            case BoundMethod::Forward:
                switch (b.fkind) {
                    case ForwardKind::SubGaussian:
                    case ForwardKind::GaussianMixture:
                        if (!subgaussian_scale) fail(b.name, "scenario has no subGaussian scale");
                        break;
                    case ForwardKind::BernsteinBounded:
                        if (sc.kind == ScenarioKind::Gaussian || sc.kind == ScenarioKind::ParetoHeavy)
                            fail(b.name, "needs bounded losses");
                        break;
                    case ForwardKind::Bennett:
                        if (!(sc.kind == ScenarioKind::BernoulliIid ||
                              sc.kind == ScenarioKind::UniformBounded ||
                              sc.kind == ScenarioKind::SamplingWithoutReplacement))
                            fail(b.name, "needs bounded nonnegative losses");
                        break;
                    case ForwardKind::BernsteinCondition:
                        if (sc.kind == ScenarioKind::Gaussian || sc.kind == ScenarioKind::ParetoHeavy)
                            fail(b.name, "needs a bounded Bernstein scale");
                        break;
                    case ForwardKind::BoundedMGF:
                        if (!(sc.kind == ScenarioKind::BernoulliIid ||
                              sc.kind == ScenarioKind::SamplingWithoutReplacement))
                            fail(b.name, "scenario has no MGF oracle");
                        if (sc.kind == ScenarioKind::SamplingWithoutReplacement &&
                            b.schedule.kind() != LambdaSchedule::Kind::Constant)
                            fail(b.name, "sampling-without-replacement MGF needs a constant schedule");
                        ++mgf_bounds;
                        break;
                    case ForwardKind::SecondMoment:
                        if (!sc.nonnegative_losses()) fail(b.name, "needs nonnegative losses");
                        break;
                    case ForwardKind::BercuTouati:
                        if (b.bercu_simplified && !sc.nonnegative_losses())
                            fail(b.name, "simplified form needs nonnegative losses");
                        break;
                    case ForwardKind::PthMoment:
                        if (sc.kind != ScenarioKind::ParetoHeavy)
                            fail(b.name, "scenario provides no p-th moment bound");
                        break;
                }
                break;
            case BoundMethod::Seeger:
            case BoundMethod::McAllester:
            case BoundMethod::Thiemann:
                if (!sc.iid() || !sc.bounded_01())
                    fail(b.name, "needs i.i.d. losses bounded in [0,1]");
                break;
            case BoundMethod::RenyiConvex:
                if (sc.kind != ScenarioKind::BernoulliIid)
                    fail(b.name, "moment oracle implemented for bernoulli_iid only");
                if (!(b.alpha > 1.0)) fail(b.name, "alpha must be > 1");
                break;
            case BoundMethod::TvIpm:
                if (sc.kind != ScenarioKind::BernoulliIid)
                    fail(b.name, "MGF oracle implemented for bernoulli_iid only");
                break;
            case BoundMethod::MdsConvex:
                if (sc.kind != ScenarioKind::MdsBounded || sc.mds_momentum)
                    fail(b.name, "needs the exchangeable (momentum-free) mds scenario");
                break;
            case BoundMethod::SubgaussianCs: {
                const double sig = std::isfinite(b.cs_sigma) ? b.cs_sigma : sc.common_sigma();
                if (!(sig > 0.0) || !std::isfinite(sig))
                    fail(b.name, "needs a positive subGaussian scale");
                if (sc.kind == ScenarioKind::SamplingWithoutReplacement ||
                    (sc.kind == ScenarioKind::MdsBounded && sc.mds_momentum))
                    fail(b.name, "needs a constant conditional mean");
                break;
            }
            case BoundMethod::StitchedCs: {
                const double sig = std::isfinite(b.cs_sigma) ? b.cs_sigma : sc.common_sigma();
                if (!(sig > 0.0) || !std::isfinite(sig) || sig > 1.0)
                    fail(b.name, "needs losses 1-subGaussian (pre-scale by 1/sigma)");
                if (sc.kind == ScenarioKind::SamplingWithoutReplacement ||
                    (sc.kind == ScenarioKind::MdsBounded && sc.mds_momentum))
                    fail(b.name, "needs a constant conditional mean");
                break;
            }
        }
    }
    if (mgf_bounds > 1) throw ConfigError("at most one mgf bound per experiment");
}

unsigned pow2_index(std::uint64_t e) { return static_cast<unsigned>(std::bit_width(e) - 1); }

// Exact E_{Rhat_j}[g(Rhat_j)] for a binomial empirical mean with success
// probability p over j draws.
template <typename G>
double binomial_expect(std::uint64_t j, double p, G&& g) {
    const double jd = static_cast<double>(j);
    const double lp = std::log(p), lq = std::log1p(-p);
    const double lfj = log_factorial(jd);
    double acc = 0.0;
    for (std::uint64_t k = 0; k <= j; ++k) {
        const double kd = static_cast<double>(k);
        const double lpmf =
            lfj - log_factorial(kd) - log_factorial(jd - kd) + kd * lp + (jd - kd) * lq;
        acc += std::exp(lpmf) * g(kd / jd);
    }
    return acc;
}

// Scenario-law expectations used by the reverse bounds; independent of the
// posterior, so shared across replications.
struct BoundOracle {
    std::vector<double> renyi_log_moment;            // index: log2(eta)
    std::vector<std::vector<double>> ipm_mgf;        // [log2(eta)][theta]
    double ipm_lambda0 = kNaN;
};

std::vector<BoundOracle> precompute_oracles(const ExperimentConfig& cfg) {
    const Scenario& sc = cfg.scenario;
    std::vector<BoundOracle> out(cfg.bounds.size());
    const unsigned jmax = sc.horizon ? pow2_index(stitch::eta(sc.horizon)) : 0;
    for (unsigned j = 0; j <= jmax; ++j) stitch::xi_pow2(j);  // warm the cache serially

    for (std::size_t bi = 0; bi < cfg.bounds.size(); ++bi) {
        const BoundSpec& b = cfg.bounds[bi];
        if (b.method == BoundMethod::RenyiConvex) {
            const double a0 = b.alpha / (b.alpha - 1.0);
            out[bi].renyi_log_moment.resize(jmax + 1);
            for (unsigned j = 0; j <= jmax; ++j) {
                const std::uint64_t n = std::uint64_t{1} << j;
                double acc = 0.0;
                for (std::size_t k = 0; k < sc.theta_count; ++k) {
                    const double p = sc.p[k];
                    acc += cfg.prior[k] * binomial_expect(n, p, [&](double r) {
                               return std::pow(klsf(r, p), a0);
                           });
                }
                out[bi].renyi_log_moment[j] = std::log(acc);
            }
        } else if (b.method == BoundMethod::TvIpm) {
            // Unit-ball function class: scale the per-epoch processes so their
            // sup-norm stays below 1, making gamma = ||rho - nu||_1.
            double phimax = 0.0;
            for (double p : sc.p)
                phimax = std::max(phimax, std::max(klsf(0.0, p), klsf(1.0, p)));
            const double lambda0 = 1.0 / (phimax > 0.0 ? phimax : 1.0);
            out[bi].ipm_lambda0 = lambda0;
            out[bi].ipm_mgf.resize(jmax + 1);
            for (unsigned j = 0; j <= jmax; ++j) {
                const std::uint64_t n = std::uint64_t{1} << j;
                auto& row = out[bi].ipm_mgf[j];
                row.resize(sc.theta_count);
                for (std::size_t k = 0; k < sc.theta_count; ++k) {
                    const double p = sc.p[k];
                    row[k] = binomial_expect(
                        n, p, [&](double r) { return std::exp(lambda0 * klsf(r, p)); });
                }
            }
        }
    }
    return out;
}

struct CsTracker {
    std::vector<double> weighted_loss;  // per theta
    KahanSum cum_lambda, cum_lambda_sq;
};

Trace run_one(const ExperimentConfig& cfg, const std::vector<BoundOracle>& oracles,
              std::uint64_t rep, bool record_rows) {
    const Scenario& sc = cfg.scenario;
    const std::size_t K = sc.theta_count;
    const std::size_t B = cfg.bounds.size();
    const double delta = cfg.delta;
    const std::vector<double> risk = sc.true_risk();

    Trace trace;
    trace.bound_names.reserve(B);
    for (const auto& b : cfg.bounds) trace.bound_names.push_back(b.name);
    trace.first_violation.assign(B, 0);
    if (record_rows) {
        trace.ts.reserve(sc.horizon);
        trace.kl.reserve(sc.horizon);
        trace.lhs.assign(B, {});
        trace.rhs.assign(B, {});
        trace.violated.assign(B, {});
    }

    // Per-bound engines and accumulators.
    std::vector<ForwardBoundState> fwd;
    std::vector<int> fwd_index(B, -1);
    std::vector<CsTracker> cs(B);
    int mgf_bound = -1;
    for (std::size_t bi = 0; bi < B; ++bi) {
        const auto& b = cfg.bounds[bi];
        if (b.method == BoundMethod::Forward) {
            fwd_index[bi] = static_cast<int>(fwd.size());
            fwd.emplace_back(b.fkind, K);
            if (b.fkind == ForwardKind::BoundedMGF) mgf_bound = static_cast<int>(bi);
        } else if (b.method == BoundMethod::SubgaussianCs) {
            cs[bi].weighted_loss.assign(K, 0.0);
        }
    }

    const FiniteMixture fixed_posterior =
        cfg.gibbs ? cfg.prior
                  : (cfg.fixed_posterior.empty() ? cfg.prior : FiniteMixture(cfg.fixed_posterior));

    ScenarioStream stream(sc, cfg.seed, rep);
    StepData data;
    StepObservation obs;
    std::vector<double> cum_loss(K, 0.0);
    std::vector<double> scratch(K, 0.0);

    for (std::uint64_t t = 1; t <= sc.horizon; ++t) {
        const double mgf_lambda =
            mgf_bound >= 0 ? cfg.bounds[mgf_bound].schedule.at(t) : kNaN;
        stream.next(mgf_lambda, data);
        for (std::size_t k = 0; k < K; ++k) cum_loss[k] += data.loss[k];

        // Advance forward accumulators.
        for (std::size_t bi = 0; bi < B; ++bi) {
            if (fwd_index[bi] < 0) continue;
            const auto& b = cfg.bounds[bi];
            auto& st = fwd[fwd_index[bi]];
            obs.loss = data.loss;
            obs.cond_mean = data.cond_mean;
            obs.second_moment.clear();
            obs.log_mgf.clear();
            obs.sigma_sub = obs.range = obs.bern_c = obs.kappa = obs.p = kNaN;
            switch (b.fkind) {
                case ForwardKind::SubGaussian:
                case ForwardKind::GaussianMixture:
                    obs.sigma_sub = data.sigma_sub;
                    break;
                case ForwardKind::BernsteinBounded:
                    obs.second_moment = data.delta_second_moment;
                    obs.range = data.range;
                    break;
                case ForwardKind::Bennett:
                    obs.range = data.range;
                    break;
                case ForwardKind::BernsteinCondition:
                    obs.sigma_sub = data.std_bound;
                    obs.bern_c = data.bern_c;
                    break;
                case ForwardKind::BoundedMGF:
                    obs.log_mgf = data.log_mgf;
                    break;
                case ForwardKind::SecondMoment:
                case ForwardKind::BercuTouati:
                    obs.second_moment = data.raw_second_moment;
                    break;
                case ForwardKind::PthMoment:
                    obs.kappa = data.kappa;
                    obs.p = data.p;
                    break;
            }
            st.update(b.schedule, obs);
        }
        // CS weighted sums.
        for (std::size_t bi = 0; bi < B; ++bi) {
            if (cfg.bounds[bi].method != BoundMethod::SubgaussianCs) continue;
            const double l = cfg.bounds[bi].schedule.at(t);
            auto& tr = cs[bi];
            for (std::size_t k = 0; k < K; ++k) tr.weighted_loss[k] += l * data.loss[k];
            tr.cum_lambda.add(l);
            tr.cum_lambda_sq.add(l * l);
        }

        const FiniteMixture rho =
            cfg.gibbs ? gibbs_posterior(cfg.prior, cum_loss, cfg.gibbs_lambda) : fixed_posterior;
        const double kl = kl_divergence(rho, cfg.prior);
        const double td = static_cast<double>(t);

        if (record_rows) {
            trace.ts.push_back(t);
            trace.kl.push_back(kl);
        }

        for (std::size_t bi = 0; bi < B; ++bi) {
            const auto& b = cfg.bounds[bi];
            double lhs = 0.0, rhs = 0.0;
            switch (b.method) {
                case BoundMethod::Forward: {
                    const auto& st = fwd[fwd_index[bi]];
                    lhs = st.gap_lhs(rho);
                    if (b.fkind == ForwardKind::GaussianMixture)
                        rhs = st.gaussian_mixture_rhs(kl, delta);
                    else if (b.fkind == ForwardKind::BercuTouati)
                        rhs = st.bercu_rhs(rho, kl, delta, b.bercu_simplified);
                    else
                        rhs = st.rhs_with_kl(rho, kl, delta);
                    break;
                }
                case BoundMethod::Seeger: {
                    for (std::size_t k = 0; k < K; ++k)
                        scratch[k] = klsf(cum_loss[k] / td, risk[k]);
                    lhs = rho.expect(scratch);
                    rhs = seeger_rhs(t, kl, delta);
                    break;
                }
                case BoundMethod::McAllester: {
                    for (std::size_t k = 0; k < K; ++k) scratch[k] = cum_loss[k] / td;
                    lhs = rho.expect(risk);
                    rhs = mcallester_raw(t, kl, delta, rho.expect(scratch));
                    break;
                }
                case BoundMethod::Thiemann: {
                    for (std::size_t k = 0; k < K; ++k) scratch[k] = cum_loss[k] / td;
                    lhs = rho.expect(risk);
                    rhs = thiemann_bound_min(t, kl, delta, rho.expect(scratch));
                    break;
                }
                case BoundMethod::RenyiConvex: {
                    for (std::size_t k = 0; k < K; ++k)
                        scratch[k] = klsf(cum_loss[k] / td, risk[k]);
                    lhs = std::log(rho.expect(scratch));
                    const auto& table = oracles[bi].renyi_log_moment;
                    rhs = renyi_convex_rhs(
                        t, b.alpha, renyi_divergence(rho, cfg.prior, b.alpha),
                        [&](std::uint64_t e) { return table[pow2_index(e)]; }, delta);
                    break;
                }
                case BoundMethod::TvIpm: {
                    for (std::size_t k = 0; k < K; ++k)
                        scratch[k] = klsf(cum_loss[k] / td, risk[k]);
                    lhs = rho.expect(scratch);
                    const auto& table = oracles[bi].ipm_mgf;
                    const double lambda0 = oracles[bi].ipm_lambda0;
                    ConvexPhiSpec spec{
                        klsf,
                        [&](double, std::uint64_t e) {
                            return std::log(rho.expect(table[pow2_index(e)]));
                        },
                        [&](std::uint64_t) { return lambda0; }};
                    rhs = ipm_rhs_stitched(spec, t, 2.0 * tv_distance(rho, cfg.prior), delta);
                    break;
                }
                case BoundMethod::MdsConvex: {
                    for (std::size_t k = 0; k < K; ++k) scratch[k] = -cum_loss[k] / td;
                    lhs = rho.expect(scratch);
                    ConvexPhiSpec spec{
                        [](double x, double y) { return x - y; },
                        [&](double lambda, std::uint64_t e) {
                            // E exp(lambda * mean of e centered +-a signs) under
                            // lambda = e reduces to e * ln cosh(a) per theta.
                            std::vector<double> vals(K);
                            for (std::size_t k = 0; k < K; ++k)
                                vals[k] = (rho[k] > 0.0 ? std::log(rho[k]) : -kInf) +
                                          static_cast<double>(e) *
                                              std::log(std::cosh(lambda / static_cast<double>(e) *
                                                                 sc.amplitude[k]));
                            return log_sum_exp(vals);
                        },
                        [](std::uint64_t j) { return static_cast<double>(j); }};
                    rhs = convex_phi_rhs_stitched(spec, t, kl, delta);
                    break;
                }
                case BoundMethod::SubgaussianCs: {
                    const auto& tr = cs[bi];
                    const double sigma =
                        std::isfinite(b.cs_sigma) ? b.cs_sigma : sc.common_sigma();
                    const auto seq = subgaussian_cs_from_sums(
                        rho.expect(tr.weighted_loss), tr.cum_lambda.value(),
                        tr.cum_lambda_sq.value(), t, sigma, kl, delta);
                    lhs = std::abs(rho.expect(risk) - seq.center);
                    rhs = seq.width;
                    break;
                }
                case BoundMethod::StitchedCs: {
                    lhs = std::abs(rho.expect(risk) - rho.expect(cum_loss) / td);
                    rhs = stitched_cs_width(t, kl, delta);
                    break;
                }
            }
            const bool viol = lhs > rhs;
            if (viol && trace.first_violation[bi] == 0) trace.first_violation[bi] = t;
            if (record_rows) {
                trace.lhs[bi].push_back(lhs);
                trace.rhs[bi].push_back(rhs);
                trace.violated[bi].push_back(viol ? 1 : 0);
            }
        }
    }
    return trace;
}

unsigned thread_count(std::uint64_t reps) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("AVPB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    if (n < 1) n = 1;
    return static_cast<unsigned>(std::min<std::uint64_t>(n, reps));
}

}  // namespace

Trace run_trajectory(const ExperimentConfig& config, std::uint64_t rep_index) {
    validate_config(config);
    const auto oracles = precompute_oracles(config);
    return run_one(config, oracles, rep_index, /*record_rows=*/true);
}

CoverageReport coverage(const ExperimentConfig& config) {
    validate_config(config);
    const auto oracles = precompute_oracles(config);
    const std::uint64_t reps = config.reps;
    std::vector<std::vector<std::uint64_t>> firsts(reps);

    const unsigned workers = thread_count(reps);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= reps) return;
            try {
                firsts[i] =
                    run_one(config, oracles, i, /*record_rows=*/false).first_violation;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    CoverageReport report;
    report.reps = reps;
    report.horizon = config.scenario.horizon;
    report.entries.resize(config.bounds.size());
    for (std::size_t bi = 0; bi < config.bounds.size(); ++bi) {
        auto& e = report.entries[bi];
        e.bound = config.bounds[bi].name;
        for (std::uint64_t r = 0; r < reps; ++r)
            if (firsts[r][bi] != 0) ++e.violated_reps;
        e.violation_rate = static_cast<double>(e.violated_reps) / static_cast<double>(reps);
        e.std_error =
            std::sqrt(e.violation_rate * (1.0 - e.violation_rate) / static_cast<double>(reps));
    }
    return report;
}

}  // namespace avpb
