// Command-line front end: bound trajectories, confidence sequences, seeded
// coverage simulation, kl inversion, and the xi combinatorial sum.
//
// Exit codes: 0 success, 1 I/O error, 2 configuration error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "avpb/confidence.hpp"
#include "avpb/csv.hpp"
#include "avpb/divergences.hpp"
#include "avpb/forward_bounds.hpp"
#include "avpb/reverse_bounds.hpp"
#include "avpb/simulation.hpp"
#include "avpb/stitch.hpp"

namespace {

using namespace avpb;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = cell.find_last_not_of(" \t");
        out.push_back(std::stod(cell.substr(b, e - b + 1)));
    }
    return out;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

// ---------------------------------------------------------------- bound ----

struct BoundCliOptions {
    std::string kind;
    std::string input;
    std::string output;
    std::string posterior, prior, risk;
    double delta = 0.05;
    double alpha = 2.0;
    double gamma = -1.0;
    double moment = 0.0;
    std::uint64_t at = 0;  // 0 = stitched all-t form
    bool bercu_simplified = false;
};

ForwardKind forward_kind_from_name(const std::string& name) {
    for (ForwardKind k :
         {ForwardKind::SubGaussian, ForwardKind::GaussianMixture, ForwardKind::BernsteinBounded,
          ForwardKind::Bennett, ForwardKind::BernsteinCondition, ForwardKind::BoundedMGF,
          ForwardKind::SecondMoment, ForwardKind::BercuTouati, ForwardKind::PthMoment})
        if (name == to_string(k)) return k;
    throw std::invalid_argument("unknown bound kind '" + name + "'");
}

void run_bound(const BoundCliOptions& opt) {
    const FiniteMixture rho(parse_list(opt.posterior));
    const FiniteMixture nu(parse_list(opt.prior));
    const double kl = kl_divergence(rho, nu);
    const std::size_t K = rho.support_size();

    const csv::Table table = csv::read_file(opt.input);
    const auto loss_cols = table.column_group("loss");
    if (loss_cols.size() != K)
        throw std::invalid_argument("input needs loss0..loss" + std::to_string(K - 1) +
                                    " columns matching the posterior support");

    auto out = open_output(opt.output);
    out << "t,lhs,rhs,kl\n";

    const bool is_reverse = opt.kind == "seeger" || opt.kind == "mcallester" ||
                            opt.kind == "thiemann" || opt.kind == "convex-phi" ||
                            opt.kind == "renyi" || opt.kind == "ipm";
    if (is_reverse) {
        if (opt.risk.empty())
            throw std::invalid_argument("reverse kinds need --risk (true risk per theta)");
        const std::vector<double> risk = parse_list(opt.risk);
        if (risk.size() != K) throw std::invalid_argument("--risk length mismatch");
        const double d_alpha =
            opt.kind == "renyi" ? renyi_divergence(rho, nu, opt.alpha) : 0.0;
        // The convex-phi CLI kind ships the klsf comparison with the binomial
        // moment bound ln xi(j) and lambda_j = j.
        const ConvexPhiSpec maurer{
            klsf, [](double, std::uint64_t j) { return std::log(stitch::xi(j)); },
            [](std::uint64_t j) { return static_cast<double>(j); }};

        std::vector<double> cum(K, 0.0), phi(K), rhat(K);
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const std::uint64_t t = r + 1;
            for (std::size_t k = 0; k < K; ++k) {
                cum[k] += table.rows[r][loss_cols[k]];
                rhat[k] = cum[k] / static_cast<double>(t);
                phi[k] = klsf(rhat[k], risk[k]);
            }
            double lhs = 0.0, rhs = 0.0;
            if (opt.kind == "seeger") {
                lhs = rho.expect(phi);
                rhs = opt.at ? (t >= opt.at ? seeger_rhs_target(opt.at, kl, opt.delta) : kNaN)
                             : seeger_rhs(t, kl, opt.delta);
            } else if (opt.kind == "convex-phi") {
                lhs = rho.expect(phi);
                rhs = opt.at ? (t >= opt.at ? convex_phi_rhs_target(maurer, opt.at, t, kl, opt.delta)
                                            : kNaN)
                             : convex_phi_rhs_stitched(maurer, t, kl, opt.delta);
            } else if (opt.kind == "mcallester") {
                lhs = rho.expect(risk);
                const double rh = rho.expect(rhat);
                rhs = opt.at ? (t >= opt.at ? mcallester_raw_target(opt.at, kl, opt.delta, rh)
                                            : kNaN)
                             : mcallester_raw(t, kl, opt.delta, rh);
            } else if (opt.kind == "thiemann") {
                lhs = rho.expect(risk);
                const double rh = rho.expect(rhat);
                rhs = thiemann_bound_min(t, kl, opt.delta, rh);
            } else if (opt.kind == "renyi") {
                lhs = std::log(rho.expect(phi));
                rhs = renyi_convex_rhs(
                    t, opt.alpha, d_alpha, [&](std::uint64_t) { return opt.moment; }, opt.delta);
            } else {  // ipm
                if (opt.gamma < 0.0)
                    throw std::invalid_argument("--gamma is required for the ipm kind");
                lhs = rho.expect(phi);
                rhs = opt.at
                          ? (t >= opt.at
                                 ? ipm_rhs_target(maurer, opt.at, t, opt.gamma, opt.delta)
                                 : kNaN)
                          : ipm_rhs_stitched(maurer, t, opt.gamma, opt.delta);
            }
            out << t << ',' << csv::format(lhs) << ',' << csv::format(rhs) << ','
                << csv::format(kl) << '\n';
        }
        return;
    }

    // Forward kinds: per-step observations from the CSV columns.
    const ForwardKind fkind = forward_kind_from_name(opt.kind);
    if (fkind == ForwardKind::BoundedMGF)
        throw std::invalid_argument("the mgf kind needs an oracle callback; use the library API");
    const int lambda_col = table.column("lambda");
    if (lambda_col < 0) throw std::invalid_argument("input needs a lambda column");
    const auto mu_cols = table.column_group("mu");
    const auto s2_cols = table.column_group("sigma2");
    const int sig_col = table.column("sigma_sub");
    const int h_col = table.column("H");
    const int c_col = table.column("c");
    const int kap_col = table.column("kappa");
    const int p_col = table.column("p");

    std::vector<double> lambdas;
    for (const auto& row : table.rows) lambdas.push_back(row[lambda_col]);
    const LambdaSchedule schedule = LambdaSchedule::explicit_list(std::move(lambdas));

    ForwardBoundState state(fkind, K);
    StepObservation obs;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        obs.loss.resize(K);
        for (std::size_t k = 0; k < K; ++k) obs.loss[k] = row[loss_cols[k]];
        obs.cond_mean.clear();
        if (mu_cols.size() == K) {
            obs.cond_mean.resize(K);
            for (std::size_t k = 0; k < K; ++k) obs.cond_mean[k] = row[mu_cols[k]];
        }
        obs.second_moment.clear();
        if (s2_cols.size() == K) {
            obs.second_moment.resize(K);
            for (std::size_t k = 0; k < K; ++k) obs.second_moment[k] = row[s2_cols[k]];
        }
        obs.sigma_sub = sig_col >= 0 ? row[sig_col] : kNaN;
        obs.range = h_col >= 0 ? row[h_col] : kNaN;
        obs.bern_c = c_col >= 0 ? row[c_col] : kNaN;
        obs.kappa = kap_col >= 0 ? row[kap_col] : kNaN;
        obs.p = p_col >= 0 ? row[p_col] : kNaN;
        state.update(schedule, obs);

        const double lhs = state.gap_lhs(rho);
        double rhs;
        if (fkind == ForwardKind::GaussianMixture)
            rhs = state.gaussian_mixture_rhs(kl, opt.delta);
        else if (fkind == ForwardKind::BercuTouati)
            rhs = state.bercu_rhs(rho, kl, opt.delta, opt.bercu_simplified);
        else
            rhs = state.rhs_with_kl(rho, kl, opt.delta);
        out << (r + 1) << ',' << csv::format(lhs) << ',' << csv::format(rhs) << ','
            << csv::format(kl) << '\n';
    }
}

// ------------------------------------------------------------------- cs ----

struct CsCliOptions {
    std::string kind = "subgaussian";
    std::string input;
    std::string output;
    double delta = 0.05;
    double sigma = 1.0;
    double kl = 0.0;
    double lambda = -1.0;  // <0: default sqrt_log schedule
};

void run_cs(const CsCliOptions& opt) {
    const csv::Table table = csv::read_file(opt.input);
    const int loss_col = table.column("loss");
    if (loss_col < 0) throw std::invalid_argument("input needs a loss column");

    auto out = open_output(opt.output);
    out << "t,center,lo,hi\n";

    if (opt.kind == "stitched") {
        double cum = 0.0;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            cum += table.rows[r][loss_col];
            const std::uint64_t t = r + 1;
            const double center = cum / static_cast<double>(t);
            const double w = stitched_cs_width(t, opt.kl, opt.delta);
            out << t << ',' << csv::format(center) << ',' << csv::format(center - w) << ','
                << csv::format(center + w) << '\n';
        }
        return;
    }
    if (opt.kind != "subgaussian") throw std::invalid_argument("unknown cs kind '" + opt.kind + "'");

    const LambdaSchedule schedule = opt.lambda >= 0.0
                                        ? LambdaSchedule::constant(opt.lambda)
                                        : default_lambda_schedule(opt.delta, opt.sigma, 0);
    double wsum = 0.0;
    KahanSum cl, cl2;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::uint64_t t = r + 1;
        const double l = schedule.at(t);
        wsum += l * table.rows[r][loss_col];
        cl.add(l);
        cl2.add(l * l);
        const auto cs = subgaussian_cs_from_sums(wsum, cl.value(), cl2.value(), t, opt.sigma,
                                                 opt.kl, opt.delta);
        out << t << ',' << csv::format(cs.center) << ',' << csv::format(cs.lo()) << ','
            << csv::format(cs.hi()) << '\n';
    }
}

// ------------------------------------------------------------- simulate ----

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

class ConfigReader {
  public:
    explicit ConfigReader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}
    bool has(const std::string& k) const { return kv_.count(k) > 0; }
    std::string str(const std::string& k, const std::string& dflt = "") const {
        auto it = kv_.find(k);
        return it == kv_.end() ? dflt : it->second;
    }
    double num(const std::string& k, std::optional<double> dflt = std::nullopt) const {
        auto it = kv_.find(k);
        if (it == kv_.end()) {
            if (dflt) return *dflt;
            throw std::invalid_argument("config: missing key '" + k + "'");
        }
        return std::stod(it->second);
    }
    std::vector<double> list(const std::string& k) const {
        auto it = kv_.find(k);
        if (it == kv_.end()) throw std::invalid_argument("config: missing key '" + k + "'");
        return parse_list(it->second);
    }

  private:
    std::map<std::string, std::string> kv_;
};

Scenario scenario_from_config(const ConfigReader& cfg) {
    const std::string kind = cfg.str("scenario");
    const auto horizon = static_cast<std::uint64_t>(cfg.num("horizon"));
    if (kind == "bernoulli_iid") return Scenario::bernoulli_iid(cfg.list("p"), horizon);
    if (kind == "uniform_bounded")
        return Scenario::uniform_bounded(cfg.list("lo"), cfg.list("hi"), horizon);
    if (kind == "gaussian") return Scenario::gaussian(cfg.list("mean"), cfg.list("sd"), horizon);
    if (kind == "pareto_heavy")
        return Scenario::pareto_heavy(cfg.list("scale"), cfg.num("tail_b"), cfg.num("moment_p"),
                                      horizon);
    if (kind == "sampling_without_replacement") {
        const auto means = cfg.list("urn_mean");
        const auto n = static_cast<std::size_t>(cfg.num("urn_size"));
        const double spread = cfg.num("urn_spread", 0.4);
        std::vector<std::vector<double>> urn(means.size(), std::vector<double>(n));
        for (std::size_t k = 0; k < means.size(); ++k)
            for (std::size_t j = 0; j < n; ++j) {
                const double v = means[k] + spread * std::cos(6.283185307179586 *
                                                              static_cast<double>(j) /
                                                              static_cast<double>(n));
                urn[k][j] = std::min(1.0, std::max(0.0, v));
            }
        return Scenario::sampling_without_replacement(std::move(urn), horizon);
    }
    if (kind == "mds_bounded")
        return Scenario::mds_bounded(cfg.list("amplitude"), cfg.num("momentum", 1.0) != 0.0,
                                     horizon);
    throw std::invalid_argument("config: unknown scenario '" + kind + "'");
}

LambdaSchedule schedule_from_config(const ConfigReader& cfg, const Scenario& sc, double delta) {
    const std::string kind = cfg.str("schedule", "target");
    if (kind == "constant") return LambdaSchedule::constant(cfg.num("schedule_lambda"));
    if (kind == "target") {
        const auto n = static_cast<std::uint64_t>(
            cfg.num("schedule_n", static_cast<double>(sc.horizon)));
        const double lam = cfg.num(
            "schedule_lambda",
            std::sqrt(8.0 * static_cast<double>(n) * std::log(1.0 / delta)));
        return LambdaSchedule::target(lam, n);
    }
    if (kind == "sqrt_log") return LambdaSchedule::sqrt_log(cfg.num("schedule_lambda", 1.0));
    throw std::invalid_argument("config: unknown schedule '" + kind + "'");
}

ExperimentConfig experiment_from_config(const ConfigReader& cfg) {
    Scenario sc = scenario_from_config(cfg);
    const double delta = cfg.num("delta", 0.05);
    const FiniteMixture prior = cfg.str("prior", "uniform") == "uniform"
                                    ? FiniteMixture::uniform(sc.theta_count)
                                    : FiniteMixture(cfg.list("prior"));
    const LambdaSchedule schedule = schedule_from_config(cfg, sc, delta);

    ExperimentConfig ec{std::move(sc), prior, {}, delta};
    ec.gibbs = cfg.str("posterior", "gibbs") == "gibbs";
    ec.gibbs_lambda = cfg.num("gibbs_lambda", 1.0);
    if (!ec.gibbs && cfg.has("fixed_posterior")) ec.fixed_posterior = cfg.list("fixed_posterior");
    ec.reps = static_cast<std::uint64_t>(cfg.num("reps", 1.0));
    ec.seed = static_cast<std::uint64_t>(cfg.num("seed", 0.0));

    std::stringstream names(cfg.str("bounds"));
    std::string name;
    while (std::getline(names, name, ',')) {
        const auto b = name.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = name.find_last_not_of(" \t");
        name = name.substr(b, e - b + 1);

        BoundSpec spec;
        spec.name = name;
        spec.schedule = schedule;
        if (name == "seeger") spec.method = BoundMethod::Seeger;
        else if (name == "mcallester") spec.method = BoundMethod::McAllester;
        else if (name == "thiemann") spec.method = BoundMethod::Thiemann;
        else if (name == "renyi") {
            spec.method = BoundMethod::RenyiConvex;
            spec.alpha = cfg.num("alpha", 2.0);
        } else if (name == "ipm") spec.method = BoundMethod::TvIpm;
        else if (name == "mds-convex") spec.method = BoundMethod::MdsConvex;
        else if (name == "cs-subgaussian") {
            spec.method = BoundMethod::SubgaussianCs;
            spec.schedule = default_lambda_schedule(
                delta, ec.scenario.common_sigma(), ec.scenario.horizon);
        } else if (name == "cs-stitched") spec.method = BoundMethod::StitchedCs;
        else {
            spec.method = BoundMethod::Forward;
            spec.fkind = forward_kind_from_name(name);
        }
        ec.bounds.push_back(std::move(spec));
    }
    if (ec.bounds.empty()) throw std::invalid_argument("config: no bounds listed");
    return ec;
}

void run_simulate(const std::string& config_path, const std::string& out_path,
                  const std::string& trace_path) {
    const ConfigReader cfg(parse_config_file(config_path));
    const ExperimentConfig ec = experiment_from_config(cfg);

    const CoverageReport report = coverage(ec);
    auto out = open_output(out_path);
    out << "bound,violated_reps,reps,violation_rate,std_error\n";
    for (const auto& e : report.entries)
        out << e.bound << ',' << e.violated_reps << ',' << report.reps << ','
            << csv::format(e.violation_rate) << ',' << csv::format(e.std_error) << '\n';

    if (!trace_path.empty()) {
        const Trace trace = run_trajectory(ec, 0);
        auto tout = open_output(trace_path);
        tout << "t,kl";
        for (const auto& n : trace.bound_names)
            tout << ',' << n << "_lhs," << n << "_rhs," << n << "_violated";
        tout << '\n';
        for (std::size_t r = 0; r < trace.ts.size(); ++r) {
            tout << trace.ts[r] << ',' << csv::format(trace.kl[r]);
            for (std::size_t bi = 0; bi < trace.bound_names.size(); ++bi)
                tout << ',' << csv::format(trace.lhs[bi][r]) << ','
                     << csv::format(trace.rhs[bi][r]) << ','
                     << static_cast<int>(trace.violated[bi][r]);
            tout << '\n';
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anytime-valid PAC-Bayes bounds, confidence sequences, and a seeded "
                 "coverage simulator"};
    app.require_subcommand(1);

    // invert-kl
    double ik_p = 0.0, ik_c = 0.0;
    auto* ik = app.add_subcommand("invert-kl", "largest q with klsf(p_hat||q) <= c");
    ik->add_option("p_hat", ik_p, "empirical rate in [0,1]")->required();
    ik->add_option("c", ik_c, "divergence budget >= 0")->required();

    // xi
    std::uint64_t xi_k = 1;
    auto* xs = app.add_subcommand("xi", "binomial normalizer xi(k)");
    xs->add_option("k", xi_k, "k >= 1")->required();

    // bound
    BoundCliOptions bo;
    auto* bd = app.add_subcommand("bound", "bound trajectory from a per-step observation CSV");
    bd->add_option("--kind", bo.kind, "bound kind")->required();
    bd->add_option("--input", bo.input, "observation CSV")->required();
    bd->add_option("--out", bo.output, "output CSV path")->required();
    bd->add_option("--posterior", bo.posterior, "posterior weights w0,w1,...")->required();
    bd->add_option("--prior", bo.prior, "prior weights w0,w1,...")->required();
    bd->add_option("--delta", bo.delta, "confidence level in (0,1)")->required();
    bd->add_option("--at", bo.at, "target time n (reverse kinds)");
    bd->add_option("--risk", bo.risk, "true risk per theta (reverse kinds)");
    bd->add_option("--alpha", bo.alpha, "Renyi order > 1");
    bd->add_option("--gamma", bo.gamma, "IPM value (ipm kind)");
    bd->add_option("--moment", bo.moment, "log moment bound (renyi kind)");
    bd->add_flag("--bercu-simplified", bo.bercu_simplified, "use the simplified form");

    // cs
    CsCliOptions co;
    auto* cs = app.add_subcommand("cs", "confidence sequence from a loss stream CSV");
    cs->add_option("--kind", co.kind, "subgaussian | stitched");
    cs->add_option("--input", co.input, "stream CSV with a loss column")->required();
    cs->add_option("--out", co.output, "output CSV path")->required();
    cs->add_option("--delta", co.delta, "confidence level in (0,1)")->required();
    cs->add_option("--sigma", co.sigma, "subGaussian scale");
    cs->add_option("--kl", co.kl, "divergence of the fixed posterior");
    cs->add_option("--lambda", co.lambda, "constant weight (default: sqrt-log schedule)");

    // simulate
    std::string sim_config, sim_out = "coverage.csv", sim_trace;
    auto* sim = app.add_subcommand("simulate", "seeded Monte Carlo coverage run");
    sim->add_option("--config", sim_config, "key = value experiment file")->required();
    sim->add_option("--out", sim_out, "coverage report CSV");
    sim->add_option("--trace-out", sim_trace, "per-t trace CSV of replication 0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (ik->parsed()) {
            std::printf("%.10g\n", kl_inv_upper(ik_p, ik_c));
        } else if (xs->parsed()) {
            std::printf("%.10g\n", stitch::xi(xi_k));
        } else if (bd->parsed()) {
            if (!(bo.delta > 0.0 && bo.delta < 1.0))
                throw std::invalid_argument("--delta must lie in (0,1)");
            run_bound(bo);
        } else if (cs->parsed()) {
            if (!(co.delta > 0.0 && co.delta < 1.0))
                throw std::invalid_argument("--delta must lie in (0,1)");
            run_cs(co);
        } else if (sim->parsed()) {
            run_simulate(sim_config, sim_out, sim_trace);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
