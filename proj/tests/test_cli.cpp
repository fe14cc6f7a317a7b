#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "halfspace/cli.hpp"

using namespace halfspace;
namespace cli = halfspace::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), "halfspace");
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path;
}

// runs the installed binary through the shell, capturing stdout
Run shell(const std::string& args) {
  const std::string cmd = std::string(HALFSPACE_TOOL) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out, ""};
}

}  // namespace

TEST_CASE("argument parsers") {
  CHECK(cli::parse_complex("1.5,-2", "e0") == cplx(1.5, -2.0));
  CHECK(cli::parse_complex("3", "e0") == cplx(3.0, 0.0));
  CHECK_THROWS_AS(cli::parse_complex("1,2,3", "e0"), Error);
  CHECK_THROWS_AS(cli::parse_real("abc", "gamma"), Error);
  CHECK_THROWS_AS(cli::parse_real("nan", "gamma"), Error);
  const cli::Range r = cli::parse_range("0:1:5", "gamma-range");
  CHECK(r.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK_THROWS_AS(cli::parse_range("2:2:1", "x"), Error);
  CHECK_THROWS_AS(cli::parse_range("0:1", "x"), Error);
  CHECK_THROWS_AS(cli::parse_range("0:1:0", "x"), Error);
  CHECK(cli::sci(0.0, 3) == "0.000e+00");
  CHECK(cli::sci(-0.0, 3) == "0.000e+00");
  CHECK(cli::sci(-1234.5, 2) == "-1.23e+03");
}

TEST_CASE("solve: JSON document") {
  const Run r = run({"solve", "--gamma", "0", "--eps", "0.1", "--alpha-p", "0.5"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["version"] == cli::kVersion);
  CHECK(j["command"] == "solve");
  CHECK(j["classification"]["region"] == "D_plus");
  CHECK(j["classification"]["kappa"] == 1);
  CHECK(j["coefficients"]["e_infty"]["re"].get<double>() == Catch::Approx(1.0).epsilon(1e-11));
  CHECK(j["coefficients"]["e_infty"]["im"].get<double>() == Catch::Approx(-10.0).epsilon(1e-11));
  CHECK(j["flux"]["alpha_measured"]["re"].get<double>() == Catch::Approx(0.5).margin(1e-4));
  CHECK(j["status"] == "ok");
  for (const auto& [k, v] : j["residuals"].items()) CHECK(v.get<double>() <= 1e-4);
}

TEST_CASE("solve: CSV layout") {
  const Run r = run({"--format", "csv", "solve", "--gamma", "3", "--eps", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find('\r') == std::string::npos);
  const auto ls = lines(r.out);
  CHECK(ls.front() == "name,re,im");
  CHECK(ls[1].rfind("kappa,0.000000000000e+00,", 0) == 0);
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(std::count(ls[i].begin(), ls[i].end(), ',') == 2);
}

TEST_CASE("solve: specular wall gives A1 = 0") {
  const Run r = run({"solve", "--gamma", "0.5", "--eps", "1", "--alpha-p", "0"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["coefficients"]["a1"]["re"].get<double>() == 0.0);
  CHECK(j["coefficients"]["a1"]["im"].get<double>() == 0.0);
}

TEST_CASE("profile and boundary tables") {
  Run r = run({"--format", "csv", "profile", "--x-count", "20"});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  CHECK(ls.front() == "x,re_e,im_e,abs_e");
  CHECK(ls.size() == 21);
  CHECK(ls[1].rfind("0.000000000000e+00,1.000000000000e+00,", 0) == 0);

  r = run({"--format", "csv", "boundary", "--mu-count", "16"});
  REQUIRE(r.code == 0);
  ls = lines(r.out);
  CHECK(ls.front() == "mu,re_h,im_h,abs_h");
  CHECK(ls.size() == 33);

  r = run({"--format", "json", "boundary", "--mu-count", "16", "--eps", "0.5"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["version"] == cli::kVersion);
  CHECK(j.contains("flux"));
}

TEST_CASE("mode-map: 2x2 grid gives four rows") {
  const Run r = run({"mode-map", "--gamma-range", "-0.5:3:2", "--eps-range", "0.1:3:2"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls.front() == "gamma,eps,kappa,region");
  CHECK(ls[1].find("D_plus") != std::string::npos);   // (-0.5, 0.1)
  CHECK(ls[4].find("D_minus") != std::string::npos);  // (3, 3)
}

TEST_CASE("mode-map output is independent of the thread count") {
  const std::vector<std::string> base{"mode-map", "--gamma-range", "0:3:6", "--eps-range", "0.2:3:6"};
  auto with = [&](const std::string& t) {
    auto a = base;
    a.insert(a.begin(), {"--threads", t});
    return run(a);
  };
  const Run one = with("1"), four = with("4");
  REQUIRE(one.code == 0);
  CHECK(one.out == four.out);
}

TEST_CASE("l-curve table") {
  const Run r = run({"--format", "csv", "l-curve", "--count", "25"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls.front() == "mu,gamma,eps");
  CHECK(ls.size() == 26);
  const Run j = run({"--format", "json", "l-curve", "--count", "25"});
  CHECK(nlohmann::json::parse(j.out)["max_abs_g"].get<double>() <= 1e-8);
}

TEST_CASE("verify: battery and mutation") {
  Run r = run({"verify", "--json"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["version"] == cli::kVersion);
  r = run({"verify"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  r = run({"verify", "--inject-t0-sign-flip"});
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("validation errors exit 2 with JSON on stderr") {
  for (const std::vector<std::string>& a :
       {std::vector<std::string>{"solve", "--eps", "0"}, {"solve", "--gamma", "-2"}, {"solve", "--alpha-p", "1.5"},
        {"solve", "--e0", "1,2,3"}, {"--format", "xml", "solve"}, {"--precision", "-1", "solve"},
        {"profile", "--x-count", "1"}, {"mode-map", "--gamma-range", "0:1"}, {"nonsense"}, {}}) {
    const Run r = run(a);
    INFO(r.err);
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    const auto e = nlohmann::json::parse(r.err.substr(r.err.find('{')));
    CHECK(e["version"] == cli::kVersion);
    CHECK(e.contains("error"));
  }
  const Run r = run({"solve", "--eps", "-1"});
  CHECK(nlohmann::json::parse(r.err)["error"]["field"] == "eps");
}

TEST_CASE("config file: fail closed, flags override") {
  const auto good = temp_file("halfspace_good.json", R"({"params": {"gamma": 3, "eps": 3}, "output": {"precision": 6}})");
  Run r = run({"--config", good.string(), "--format", "csv", "solve"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out)[1] == "kappa,0.000000e+00,0.000000e+00");

  r = run({"--config", good.string(), "--format", "csv", "solve", "--gamma", "0", "--eps", "0.1"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out)[1] == "kappa,1.000000e+00,0.000000e+00");

  const auto bad = temp_file("halfspace_bad.json", R"({"params": {"gamma": 3, "foo": 1}})");
  r = run({"--config", bad.string(), "solve"});
  CHECK(r.code == 2);
  CHECK(nlohmann::json::parse(r.err)["error"]["field"] == "params.foo");

  const auto top = temp_file("halfspace_top.json", R"({"colour": "red"})");
  CHECK(run({"--config", top.string(), "solve"}).code == 2);
  const auto broken = temp_file("halfspace_broken.json", "{");
  CHECK(run({"--config", broken.string(), "solve"}).code == 2);
  CHECK(run({"--config", "/nonexistent/x.json", "solve"}).code == 2);
}

TEST_CASE("--out writes the file") {
  const auto path = std::filesystem::temp_directory_path() / "halfspace_out.csv";
  std::filesystem::remove(path);
  const Run r = run({"--out", path.string(), "--format", "csv", "solve"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == "name,re,im");
}

TEST_CASE("binary: byte-identical output across runs") {
  const std::string args = "--format json solve --gamma 1.5 --eps 0.5 --alpha-p 0.3 --e0 1,-1";
  const Run a = shell(args), b = shell(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == run({"--format", "json", "solve", "--gamma", "1.5", "--eps", "0.5", "--alpha-p", "0.3", "--e0",
                      "1,-1"})
                     .out);
  CHECK(shell("solve --eps 0").code == 2);
  CHECK(shell("verify --inject-t0-sign-flip").code == 1);
}
