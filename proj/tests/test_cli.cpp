#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "knds/qnm.hpp"
#include "knds/spacetime.hpp"
#include "params_io.hpp"

using namespace knds;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + KNDS_CLI_PATH + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "knds_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("parameter file parsing") {
  const BlackHoleParams p = io::parse_params("# comment\nM = 2\nQ=0.1  # trailing\nLambda=0.01\nmass=0.2\n");
  CHECK(p.M == 2.0);
  CHECK(p.Q == 0.1);
  CHECK(p.Lambda == 0.01);
  CHECK(p.m == 0.2);
  CHECK(io::parse_params(io::format_params(p)).M == p.M);
  CHECK_THROWS(io::parse_params("X=1\n"));
  CHECK_THROWS(io::parse_params("M=abc\n"));
  CHECK_THROWS(io::parse_params("M\n"));
}

TEST_CASE("table formatting") {
  io::Table t({"x", "name"});
  t.add({io::num(0.1), "a"}, {true, false});
  t.add({io::num(std::nan("")), "b"}, {true, false});
  CHECK(t.csv() == "x,name\n0.10000000000000001,a\nnan,b\n");
  const auto j = nlohmann::json::parse(t.json());
  REQUIRE(j.is_array());
  CHECK(j[0]["x"].get<double>() == 0.1);
  CHECK(j[1]["x"].is_null());
  CHECK(j[1]["name"] == "b");
}

TEST_CASE("exit codes") {
  CHECK(run("horizons --Q 0.3").code == 0);
  CHECK(run("").code == 2);
  CHECK(run("nosuch").code == 2);
  CHECK(run("horizons --bogus 1").code == 2);
  CHECK(run("horizons -p /nonexistent/params.txt").code == 2);
  const fs::path bad = scratch("bad.txt");
  write(bad, "M=1\nspin=0.3\n");
  CHECK(run("horizons -p " + bad.string()).code == 2);
  CHECK(run("horizons --Lambda 0.5").code == 1);
  CHECK(run("asymptotics --Q 1.2").code == 1);
}

TEST_CASE("validate names the violated condition") {
  const Run ok = run("validate --Q 0.3");
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("admissible,", 0) == 0);
  const Run bad = run("validate --Lambda 0.5 -f json");
  CHECK(bad.code == 1);
  const auto j = nlohmann::json::parse(bad.out);
  CHECK(j[0]["admissible"] == false);
  CHECK_FALSE(j[0]["violated"].get<std::string>().empty());
}

TEST_CASE("horizons output is byte-identical to the library values") {
  const fs::path file = scratch("params.txt");
  write(file, "M=1\nQ=0.3\na=0.05\nLambda=0.04\n");
  const Run r = run("horizons -p " + file.string());
  REQUIRE(r.code == 0);
  const HorizonSet h = horizon_roots(io::read_params_file(file.string()));
  std::string expect = "r_n,r_c,r_minus,r_plus,kappa_n,kappa_c,kappa_minus,kappa_plus\n";
  for (int i = 0; i < 4; ++i) expect += io::num(h.roots()[i]) + ",";
  for (int i = 0; i < 4; ++i) expect += io::num(h.kappas()[i]) + (i < 3 ? "," : "\n");
  CHECK(r.out == expect);
  const fs::path out = scratch("horizons.csv");
  CHECK(run("horizons -p " + file.string() + " -o " + out.string()).code == 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == expect);
}

TEST_CASE("asymptotics JSON") {
  const Run r = run("asymptotics --Q 0 -f json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["r0"].get<double>() == doctest::Approx(3.0));
  CHECK(j["kerr_ds_check"]["max_rel_error"].get<double>() < 1e-12);
}

TEST_CASE("qnm --compare-leading err column") {
  const Run r = run("qnm --Q 0.3 --k 0.5 --l 5 --m 0 --compare-leading -f json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 1);
  const auto& rec = j[0];
  const double dr = rec["lambda_re"].get<double>() - rec["leading_re"].get<double>();
  const double di = rec["lambda_im"].get<double>() - rec["leading_im"].get<double>();
  CHECK(rec["err"].get<double>() == doctest::Approx(std::hypot(dr, di)).epsilon(1e-15));
  CHECK(rec["seed_kind"] == "auto");
  CHECK(run("qnm --Q 0.3 --a 0.01 --k 0.5 --l 5 --compare-leading").code == 1);
}

TEST_CASE("qnm JSON round-trips through a seed file and ignores the worker count") {
  const std::string args = "qnm --Q 0.3 --a 0.01 --k 0.5,-0.5 --l 4 --m 0 -f json";
  const Run first = run(args + " -w 1");
  REQUIRE(first.code == 0);
  CHECK(run(args + " -w 3").out == first.out);
  const fs::path seeds = scratch("seeds.json");
  write(seeds, first.out);
  const Run again = run("qnm --Q 0.3 --a 0.01 -f json --seed-file " + seeds.string());
  REQUIRE(again.code == 0);
  CHECK(again.out == first.out);
  write(seeds, "{\"k\": 0.5}");
  CHECK(run("qnm --Q 0.3 --seed-file " + seeds.string()).code == 2);
}

TEST_CASE("tolerance override is read from the environment") {
  CHECK(run("qnm --Q 0.3 --k 0.5 --l 3", "QNM_TOL_OVERRIDE=zero").code == 2);
  const Run loose = run("qnm --Q 0.3 --k 0.5 --l 3 -f json", "QNM_TOL_OVERRIDE=100");
  const Run tight = run("qnm --Q 0.3 --k 0.5 --l 3 -f json");
  REQUIRE(loose.code == 0);
  REQUIRE(tight.code == 0);
  const auto a = nlohmann::json::parse(loose.out)[0], b = nlohmann::json::parse(tight.out)[0];
  CHECK(std::abs(a["lambda_re"].get<double>() - b["lambda_re"].get<double>()) < 1e-6);
  CHECK(a["iterations"].get<int>() <= b["iterations"].get<int>());
}
