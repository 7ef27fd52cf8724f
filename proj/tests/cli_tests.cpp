// End-to-end checks of the installed command-line interface. The binary path
// comes in through AVPB_CLI_PATH.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const fs::path dir = fs::temp_directory_path() / "avpb_cli_io";
    fs::create_directories(dir);
    const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = env_prefix + std::string(AVPB_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
#ifdef _WIN32
    const int code = rc;
#else
    const int code = WEXITSTATUS(rc);
#endif
    return {code, slurp(out), slurp(err)};
}

std::string slurp_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "avpb_cli_work";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("invert-kl and xi print goldens") {
    auto r = run_cli("invert-kl 0.3 0.0");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "0.3\n");
    r = run_cli("xi 2");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "2.5\n");
    r = run_cli("invert-kl 0 0.6931471805599453");
    CHECK(r.out.substr(0, 3) == "0.5");
}

TEST_CASE("error channels and exit codes") {
    auto r = run_cli("simulate --config definitely_missing.cfg");
    CHECK(r.exit_code == 1);
    CHECK(!r.err.empty());
    CHECK(r.out.empty());

    r = run_cli("bound --no-such-flag");
    CHECK(r.exit_code == 2);

    r = run_cli("invert-kl 1.5 0.0");
    CHECK(r.exit_code == 2);

    const auto dir = work_dir();
    {
        std::ofstream csv(dir / "stream.csv");
        csv << "loss\n0.4\n0.6\n";
    }
    r = run_cli("cs --input " + (dir / "stream.csv").string() + " --out " +
                (dir / "cs.csv").string() + " --delta 1.5");
    CHECK(r.exit_code == 2);
}

TEST_CASE("bound subcommand produces a trajectory CSV") {
    const auto dir = work_dir();
    {
        std::ofstream csv(dir / "obs.csv");
        csv << "t,lambda,loss0,loss1,mu0,mu1,sigma20,sigma21,sigma_sub,H\n";
        for (int t = 1; t <= 8; ++t)
            csv << t << ",0.25," << (t % 2) << "," << ((t + 1) % 2)
                << ",0.5,0.5,0.25,0.25,0.5,1\n";
    }
    const std::string common = " --input " + (dir / "obs.csv").string() + " --posterior 0.5,0.5" +
                               " --prior 0.5,0.5 --delta 0.05 --out ";
    auto r = run_cli("bound --kind subgaussian" + common + (dir / "sg.csv").string());
    CHECK(r.exit_code == 0);
    const std::string sg = slurp_file(dir / "sg.csv");
    CHECK(sg.rfind("t,lhs,rhs,kl\n", 0) == 0);
    CHECK(sg.back() == '\n');

    r = run_cli("bound --kind bernstein" + common + (dir / "bern.csv").string());
    CHECK(r.exit_code == 0);

    r = run_cli("bound --kind seeger --risk 0.5,0.5" + common + (dir / "seeger.csv").string());
    CHECK(r.exit_code == 0);
    r = run_cli("bound --kind seeger --risk 0.5,0.5 --at 4" + common +
                (dir / "seeger_at.csv").string());
    CHECK(r.exit_code == 0);

    // reverse kinds without --risk are a configuration error
    r = run_cli("bound --kind mcallester" + common + (dir / "mc.csv").string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("cs subcommand emits center and interval") {
    const auto dir = work_dir();
    {
        std::ofstream csv(dir / "stream.csv");
        csv << "loss\n";
        for (int t = 1; t <= 32; ++t) csv << 0.5 + 0.01 * (t % 3) << "\n";
    }
    auto r = run_cli("cs --kind subgaussian --sigma 0.5 --delta 0.05 --input " +
                     (dir / "stream.csv").string() + " --out " + (dir / "cs1.csv").string());
    CHECK(r.exit_code == 0);
    CHECK(slurp_file(dir / "cs1.csv").rfind("t,center,lo,hi\n", 0) == 0);
    r = run_cli("cs --kind stitched --delta 0.05 --input " + (dir / "stream.csv").string() +
                " --out " + (dir / "cs2.csv").string());
    CHECK(r.exit_code == 0);
}

TEST_CASE("thread count does not change simulate output") {
    const auto dir = work_dir();
    {
        std::ofstream cfg(dir / "thr.cfg");
        cfg << "scenario = mds_bounded\namplitude = 0.5, 1.0\nmomentum = 1\n"
               "horizon = 100\ndelta = 0.1\nreps = 30\nseed = 7\n"
               "schedule = constant\nschedule_lambda = 0.3\n"
               "bounds = subgaussian, bernstein\n";
    }
    const std::string base = "simulate --config " + (dir / "thr.cfg").string() + " --out ";
    auto r1 = run_cli(base + (dir / "c1.csv").string(), "AVPB_THREADS=1 ");
    auto r2 = run_cli(base + (dir / "c2.csv").string(), "AVPB_THREADS=4 ");
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp_file(dir / "c1.csv") == slurp_file(dir / "c2.csv"));
}

TEST_CASE("simulate is byte-identical across runs") {
    const auto dir = work_dir();
    {
        std::ofstream cfg(dir / "exp.cfg");
        cfg << "scenario = bernoulli_iid\n"
               "p = 0.25, 0.5, 0.75\n"
               "horizon = 120\n"
               "delta = 0.05\n"
               "reps = 40\n"
               "seed = 1234\n"
               "posterior = gibbs\n"
               "gibbs_lambda = 1.0\n"
               "prior = uniform\n"
               "schedule = target\n"
               "bounds = subgaussian, bernstein, seeger, mcallester, cs-subgaussian\n";
    }
    const std::string base = "simulate --config " + (dir / "exp.cfg").string();
    auto r1 = run_cli(base + " --out " + (dir / "cov1.csv").string() + " --trace-out " +
                      (dir / "tr1.csv").string());
    REQUIRE(r1.exit_code == 0);
    auto r2 = run_cli(base + " --out " + (dir / "cov2.csv").string() + " --trace-out " +
                      (dir / "tr2.csv").string());
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp_file(dir / "cov1.csv") == slurp_file(dir / "cov2.csv"));
    CHECK(slurp_file(dir / "tr1.csv") == slurp_file(dir / "tr2.csv"));
    const std::string cov = slurp_file(dir / "cov1.csv");
    CHECK(cov.rfind("bound,violated_reps,reps,violation_rate,std_error\n", 0) == 0);
    CHECK(cov.find("seeger") != std::string::npos);
}

}  // TEST_SUITE
