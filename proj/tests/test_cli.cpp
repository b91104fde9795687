#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef PEARCEY_CLI_PATH
#define PEARCEY_CLI_PATH "pearcey_cli"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(PEARCEY_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf;
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    while (std::fgets(buf.data(), buf.size(), p)) out += buf.data();
    int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("gap: single point and near-zero limit") {
    RunResult r = run("gap --alpha 2 --rho 0 --s 1e-6");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("s,F,det,est_error,m_used") == 0);
    // F ~ 0 at tiny s
    std::istringstream is(r.output);
    std::string header, data;
    std::getline(is, header);
    std::getline(is, data);
    double s, F;
    std::sscanf(data.c_str(), "%lf,%lf", &s, &F);
    CHECK(std::abs(F) < 1e-8);
}

TEST_CASE("gap: monotone decreasing on a log grid") {
    RunResult r = run("gap --alpha 2 --rho 0 --s-grid 2:10:4log --threads 4");
    CHECK(r.exit_code == 0);
    std::istringstream is(r.output);
    std::string line;
    std::getline(is, line);
    double prev = 1.0;
    int rows = 0;
    while (std::getline(is, line)) {
        double s, F;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &s, &F) == 2);
        CHECK(F < prev);
        prev = F;
        ++rows;
    }
    CHECK(rows == 4);
}

TEST_CASE("gap: thinning raises the log-determinant") {
    RunResult full = run("gap --alpha 2 --rho 0 --s 3");
    RunResult thin = run("gap --alpha 2 --rho 0 --s 3 --gamma 0.5");
    auto second_field = [](const std::string& out) {
        std::istringstream is(out);
        std::string l;
        std::getline(is, l);
        std::getline(is, l);
        double s, F;
        std::sscanf(l.c_str(), "%lf,%lf", &s, &F);
        return F;
    };
    CHECK(second_field(thin.output) > second_field(full.output));
}

TEST_CASE("deterministic byte-identical output") {
    RunResult a = run("gap --alpha 2 --rho 0.5 --s-grid 1:5:3lin --threads 4");
    RunResult b = run("gap --alpha 2 --rho 0.5 --s-grid 1:5:3lin --threads 2");
    CHECK(a.output == b.output);
}

TEST_CASE("json mirrors csv fields") {
    RunResult r = run("gap --alpha 2 --s 1 --format json");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"s\": 1") != std::string::npos);
    CHECK(r.output.find("\"F\": ") != std::string::npos);
    CHECK(r.output.find("\"m_used\": ") != std::string::npos);
}

TEST_CASE("exit codes: config errors give 1") {
    CHECK(run("gap --alpha -2 --s 1").exit_code == 1);
    CHECK(run("gap --alpha 2").exit_code == 1);             // neither --s nor --s-grid
    CHECK(run("gap --alpha 2 --s-grid bogus").exit_code == 1);
    CHECK(run("nonsense").exit_code == 1);
}

TEST_CASE("config file with CLI precedence") {
    std::string path = "/tmp/pearcey_test_config.txt";
    {
        std::ofstream f(path);
        f << "# comment line\n";
        f << "alpha = 3\n";
        f << "rho = 0.25\n";
    }
    RunResult file_only = run("gap --config " + path + " --s 1");
    CHECK(file_only.exit_code == 0);
    RunResult overridden = run("gap --config " + path + " --alpha 2 --s 1");
    CHECK(overridden.exit_code == 0);
    CHECK(file_only.output != overridden.output);  // alpha=3 vs alpha=2
    std::remove(path.c_str());
}

TEST_CASE("kernel subcommand prints all representations") {
    RunResult r = run("kernel --alpha 2 --x 0.7 --y 1.3");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("psi") != std::string::npos);
    CHECK(r.output.find("double") != std::string::npos);
    CHECK(r.output.find("dev_psi_double") != std::string::npos);

    RunResult d = run("kernel --alpha 2 --diag 1.0");
    CHECK(d.exit_code == 0);
    CHECK(d.output.find("diag") != std::string::npos);

    RunResult na = run("kernel --alpha 1.5 --x 0.7 --y 1.3");
    CHECK(na.exit_code == 0);
    CHECK(na.output.find("n/a") != std::string::npos);
}

TEST_CASE("verify suites run clean") {
    RunResult r = run("verify --suite w");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("FAIL") == std::string::npos);
    RunResult l = run("verify --suite lambda");
    CHECK(l.exit_code == 0);
}

TEST_CASE("fit on a synthetic-quality short grid") {
    RunResult r = run("fit --alpha 2 --rho 0 --s-grid 8:20:4log --threads 4 --tol 1e-7");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("C_hat") != std::string::npos);
    CHECK(r.output.find("fcet_slope") != std::string::npos);
}
