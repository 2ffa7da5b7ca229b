#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>
#include <iomanip>

#include <json.hpp>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(INJNORM_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof(buf), p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

nlohmann::json json_of(const Run& r) { return nlohmann::json::parse(r.out); }

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("injnorm_cli_" + name);
}

}  // namespace

TEST(Cli, state_dicke) {
  const auto r = run("state --dicke --n 3 --d 2 --k 1,2");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(json_of(r).at("gme_bits").get<double>(), 1.169925, 1e-6);
}

TEST(Cli, state_antisym_writes_tensor) {
  const auto path = temp("anti.json");
  const auto r = run("state --antisym --n 3 --d 3 -o " + path.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(json_of(r).at("gme_bits").get<double>(), std::log2(6.0), 1e-12);
  const auto est = run("estimate --input " + path.string() + " --algorithm ngd");
  ASSERT_EQ(est.code, 0) << est.out;
  EXPECT_NEAR(json_of(est).at("gme_bits").get<double>(), std::log2(6.0), 1e-3);
  std::filesystem::remove(path);
}

TEST(Cli, estimate_matches_svd_oracle) {
  const std::string base = "estimate --model gaussian --field real --n 2 --d 16 --seed 5 ";
  const auto ngd = run(base + "--algorithm ngd");
  const auto svd = run(base + "--algorithm svd-oracle");
  ASSERT_EQ(ngd.code, 0) << ngd.out;
  ASSERT_EQ(svd.code, 0) << svd.out;
  const double a = json_of(ngd).at("injective_norm").get<double>();
  const double b = json_of(svd).at("injective_norm").get<double>();
  EXPECT_NEAR(a, b, 1e-6 * b);
}

TEST(Cli, sample_then_estimate_with_trace) {
  const auto path = temp("x.injt");
  const auto trace = temp("trace.csv");
  ASSERT_EQ(run("sample --model mps --field complex --n 3 --d 3 --q 2 --seed 1 -o " + path.string()).code, 0);
  const auto r = run("estimate --input " + path.string() + " --algorithm als --restarts 2 --trace-csv " +
                     trace.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream tr(trace);
  std::string header;
  std::getline(tr, header);
  EXPECT_EQ(header, "epoch,loss");
  std::filesystem::remove(path);
  std::filesystem::remove(trace);
}

TEST(Cli, fit_sqrt_inverse_echoes_constants) {
  const auto path = temp("fit.csv");
  {
    std::ofstream f(path);
    f << std::setprecision(17) << "d,y\n";
    for (double d : {4.0, 9.0, 16.0, 25.0}) f << d << ',' << 2.3 - 1.3 / std::sqrt(d) << '\n';
  }
  const auto r = run("fit --model sqrt-inverse " + path.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json_of(r);
  EXPECT_NEAR(j.at("constants")[0].get<double>(), 2.3, 1e-10);
  EXPECT_NEAR(j.at("constants")[1].get<double>(), -1.3, 1e-10);
  EXPECT_EQ(j.at("n_points"), 4);
  std::filesystem::remove(path);
}

TEST(Cli, bench_then_fit_results_csv) {
  const auto cfg = temp("bench.json");
  const auto out = temp("bench.csv");
  {
    std::ofstream f(cfg);
    f << R"({"model": {"kind": "gaussian", "field": "real", "n": 3, "d": 3},
             "algorithms": ["ngd"], "optimizer": {"restarts": 2}, "d_grid": [3, 4],
             "samples": 2, "seed": 9})";
  }
  const auto r = run("bench --config " + cfg.string() + " --no-wall-time -o " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream f(out);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(f, line)) ++lines;
  EXPECT_EQ(lines, 5u);
  const auto fit = run("fit --model sqrt-inverse --algorithm ngd " + out.string());
  ASSERT_EQ(fit.code, 0) << fit.out;
  const auto j = json_of(fit);
  EXPECT_EQ(j.at("n_points"), 2);
  // two points: the curve passes through the mean injective estimate at each d
  {
    std::ifstream in(out);
    std::getline(in, line);
    std::map<int, std::vector<double>> by_d;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
      by_d[std::stoi(cells[3])].push_back(std::stod(cells[11]));
    }
    const double c1 = j.at("constants")[0], c2 = j.at("constants")[1];
    for (const auto& [d, v] : by_d)
      EXPECT_NEAR(c1 + c2 / std::sqrt(double(d)), (v[0] + v[1]) / 2, 1e-9);
  }
  EXPECT_EQ(run("fit --model sqrt-inverse --algorithm sgd " + out.string()).code, 2);
  std::filesystem::remove(cfg);
  std::filesystem::remove(out);
}

TEST(Cli, usage_errors_exit_2) {
  EXPECT_EQ(run("estimate --bogus-flag").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("bench --config /nonexistent/config.json").code, 2);
  EXPECT_EQ(run("fit /nonexistent/data.csv").code, 2);
  const auto bad = temp("bad.json");
  {
    std::ofstream f(bad);
    f << "{not json";
  }
  const auto r = run("bench --config " + bad.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("\"error\""), std::string::npos);
  std::filesystem::remove(bad);
}

TEST(Cli, domain_errors_exit_1) {
  const auto r = run("state --antisym --n 3 --d 2");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("SpecError"), std::string::npos);
}
