#include "doctest.h"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run bcent(const std::string& args) {
  Run r;
  std::string cmd = std::string(BCENT_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json parsed(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("mahler subcommand") {
  auto r = bcent("mahler --poly \"x^2-x-1\"");
  REQUIRE(r.code == 0);
  CHECK(parsed(r)["mahler"]["approx"].get<double>() == doctest::Approx(1.6180339887498949));
  auto two = bcent("mahler --poly \"[-1,2]\"");
  CHECK(parsed(two)["mahler"]["lo"] == "2/1");
  CHECK(parsed(two)["mahler"]["hi"] == "2/1");
  CHECK(parsed(bcent("mahler --poly \"4x-2\""))["mahler"]["lo"] == "4/1");
  CHECK(bcent("mahler --poly 0").code == 2);
  CHECK(bcent("mahler").code == 2);
  CHECK(bcent("frobnicate").code == 2);
}

TEST_CASE("entropy subcommand") {
  auto r = bcent("entropy --level 1/2 --p 1/2 --l 8 --scales 2^-1..2^-10 --format csv");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("scale,log2_scale,H,H_cond,abs_error\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 11);
  {
    std::ofstream f("cli_one_atom.json");
    f << R"({"atoms":[{"pos":"3/7","mass":"1"}]})";
  }
  auto one = parsed(bcent("entropy --measure cli_one_atom.json"));
  for (const auto& row : one["profile"]) {
    CHECK(row["H"].get<double>() == doctest::Approx(0).epsilon(1e-12));
    CHECK(row["H_cond"].get<double>() == doctest::Approx(0).epsilon(1e-12));
  }
  {
    std::ofstream f("cli_bad.json");
    f << R"({"atoms":[{"pos":"1")";
  }
  CHECK(bcent("entropy --measure cli_bad.json").code == 2);
  CHECK(bcent("entropy --measure does_not_exist.json").code == 2);
}

TEST_CASE("verify subcommand") {
  auto r = bcent("verify --rules R12 --n 100 --repro-dir \"\"");
  REQUIRE(r.code == 0);
  auto j = parsed(r);
  CHECK(j["rules"]["R12"]["total"] == 100);
  CHECK(j.at("total").contains("max_abs_margin"));
  CHECK(bcent("verify --rules R99").code == 2);
  auto a = bcent("--threads 1 verify --rules R1,R3,R13 --n 40 --seed 5 --repro-dir \"\"");
  auto b = bcent("--threads 3 verify --rules R1,R3,R13 --n 40 --seed 5 --repro-dir \"\"");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("check subcommand") {
  auto pass = bcent("check --criterion rational --a 1 --b 1e50 --p 1/2 --bits 256");
  CHECK(pass.code == 0);
  CHECK(parsed(pass)["verdict"] == "PASS");
  auto fail = bcent("check --criterion rational --a 1 --b 10 --p 1/2");
  CHECK(fail.code == 1);
  CHECK(parsed(fail)["verdict"] == "FAIL");
  CHECK(bcent("check --criterion rational --a 1 --p 1/2").code == 2);
  CHECK(bcent("check --criterion nonsense").code == 2);
  CHECK(bcent("check --criterion nth-root --n 2 --k 1e40").code == 0);
  auto sparse = parsed(bcent("check --criterion sparse --poly \"2x-4\" --n 1e40"));
  CHECK(sparse["verdict"] == "PASS");
  CHECK(sparse["eisenstein"]["even_coefficients"] == true);
  auto gap = parsed(bcent("check --criterion gaussian-gap --p 1/2"));
  CHECK(gap["positive"] == true);
  {
    std::ofstream f("cli_batch.csv");
    f << "polynomial,p\n\"x^2+x-1\",1/2\n\"[-1,2]\",1/2\n";
  }
  auto batch = bcent("check --batch cli_batch.csv");
  CHECK(batch.code == 1);
  CHECK(parsed(batch)["reports"].size() == 2);
  // BC_ENTROPY_PRECISION sets the working precision.
  auto env = bcent("check --criterion rational --a 1 --b 1e50 --p 1/2 --format csv");
  auto env256 = std::string("BC_ENTROPY_PRECISION=512 ") + BCENT_PATH + " check --criterion rational --a 1 --b 1e50 --p 1/2";
  FILE* pipe = popen(env256.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  pclose(pipe);
  CHECK(nlohmann::json::parse(out)["precision_bits"] == 512);
  CHECK(env.code == 0);
}

TEST_CASE("study subcommand") {
  auto h = parsed(bcent("study --lambda 1/2 --lmax 12"));
  for (const auto& lvl : h["levels"]) CHECK(lvl["ratio"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  auto sep = bcent("study --lambda \"x^2+x-1\" --lmax 18 --separation");
  CHECK(sep.code == 0);
  auto last = parsed(sep)["separation"].back();
  CHECK(std::fabs(last["rate"].get<double>() - 0.6942419136306173) <= 0.15);
  CHECK(bcent("study --lambda 1/2 --lmax 40").code == 3);
  CHECK(bcent("study --lambda \"x^2-2\" --lmax 4").code == 2);
  auto d1 = bcent("study --lambda 1/2 --lmax 16 --decay --format csv");
  auto d2 = bcent("study --lambda 1/2 --lmax 16 --decay --format csv");
  CHECK(d1.code == 0);
  CHECK(d1.out == d2.out);
}
