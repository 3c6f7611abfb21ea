#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(SPLITMETRIC_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 4096> buf;
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) {
        output.append(buf.data(), got);
    }
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

}  // namespace

TEST_CASE("solve reports the published ratio") {
    const RunResult r = run("solve --m 299 --n 12 --format json");
    REQUIRE(r.exit_code == 0);
    const json out = json::parse(r.output);
    CHECK(out["p_star"] == 161);
    CHECK(out["ratio"].get<double>() == doctest::Approx(0.5385).epsilon(1e-4));
}

TEST_CASE("solve rejects an infeasible problem with exit 2") {
    CHECK(run("solve --m 7 --n 3").exit_code == 2);
    CHECK(run("solve --m 10").exit_code == 2);  // missing required flag
}

TEST_CASE("csv and json outputs carry identical values") {
    const RunResult csv = run("solve --m 243 --n 10 --format csv");
    const RunResult js = run("solve --m 243 --n 10 --format json");
    REQUIRE(csv.exit_code == 0);
    REQUIRE(js.exit_code == 0);
    const json out = json::parse(js.output);

    // second csv line: p_star,ratio,f_at_p_star,real_root
    const auto line_start = csv.output.find('\n') + 1;
    std::string line = csv.output.substr(line_start);
    double ratio = 0.0, f = 0.0, root = 0.0;
    long long p = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf", &p, &ratio, &f, &root) == 4);
    CHECK(p == out["p_star"].get<long long>());
    CHECK(ratio == out["ratio"].get<double>());
    CHECK(f == out["f_at_p_star"].get<double>());
    CHECK(root == out["real_root"].get<double>());
}

TEST_CASE("curve row count and argmin consistency") {
    const RunResult r = run("curve --m 20 --n 2 --format json");
    REQUIRE(r.exit_code == 0);
    const json out = json::parse(r.output);
    CHECK(out["entries"].size() == 14);  // m-1 - (n+4) + 1
    CHECK(out["argmin_p"] == 12);  // matches solve
}

TEST_CASE("asymptotic order 1 is the leading term") {
    const RunResult r = run("asymptotic --m 1000000 --n 5 --order 1 --format json");
    REQUIRE(r.exit_code == 0);
    const json out = json::parse(r.output);
    CHECK(out["expansion"].get<double>() ==
          doctest::Approx(std::cbrt(35.0) * std::pow(1e6, 2.0 / 3.0)));

    const RunResult r4 = run("asymptotic --m 1000000 --n 5 --order 4 --format json");
    const double ratio = json::parse(r4.output)["ratio"].get<double>();
    CHECK(ratio > 0.999);
    CHECK(ratio < 1.001);
}

TEST_CASE("simulate is byte-reproducible and validates trials") {
    const std::string args = "simulate --m 12 --n 3 --trials 200 --seed 9 --format csv";
    const RunResult a = run(args);
    const RunResult b = run(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(run("simulate --m 12 --n 3 --trials 0").exit_code == 2);
}

TEST_CASE("moments marks the divergent row at the alpha = 2 boundary") {
    // p = n+3 gives alpha = 2: <x^-2> divergent, the others finite
    const RunResult r = run("moments --m 30 --n 3 --p 6 --trials 100 --format json");
    REQUIRE(r.exit_code == 0);
    const json out = json::parse(r.output);
    REQUIRE(out.size() == 3);
    CHECK(out[0].contains("rel_err"));
    CHECK(out[1]["closed_form"] == "divergent");

    // n = 1 hides the cross-moment row
    const RunResult one = run("moments --m 20 --n 1 --p 8 --trials 100 --format json");
    CHECK(json::parse(one.output).size() == 2);
}

TEST_CASE("bench on a small file and missing-file handling") {
    const std::string path = "cli_bench_tmp.csv";
    {
        std::ofstream out(path);
        out << "y,x1,x2\n";
        for (int i = 0; i < 30; ++i) {
            out << (0.3 * i + 0.1 * (i % 7)) << "," << i << "," << (i % 7) << "\n";
        }
    }
    const RunResult r = run("bench " + path + " --header --permutations 50 --format json");
    REQUIRE(r.exit_code == 0);
    const json out = json::parse(r.output);
    CHECK(out["policies"].size() == 3);
    CHECK(out["policies"][0]["p"] == 15);
    std::remove(path.c_str());

    CHECK(run("bench /no/such/file.csv").exit_code == 2);
}
