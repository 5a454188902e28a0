#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qjm/cli.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qjm");
  std::ostringstream out, err;
  const int code = qjm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

const std::vector<std::string> kPauli{"--m", "1,0,0", "--m", "0,1,0", "--m", "0,0,1"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_CASE("check exit codes") {
  const auto path = temp_file("qjm_pauli.json", R"({"measurements": [[1,0,0],[0,1,0],[0,0,1]]})");
  const auto r = run({"check", "--criterion", "triple", "--input", path});
  CHECK(r.code == 1);
  const auto j = json::parse(r.out);
  CHECK(j["verdict"] == "incompatible");
  CHECK(j["margin"].get<double>() == doctest::Approx(4.0 - 4.0 * std::sqrt(3.0)));
  CHECK(j["manifest"]["command"] == "check");
  CHECK(j["manifest"]["tool_version"] == qjm::cli::kToolVersion);

  const auto p = run({"check", "--criterion", "pairwise", "--m", "0.7071067811865476,0,0", "--m", "0,0.7071067811865476,0"});
  CHECK(p.code == 0);
  CHECK(std::abs(json::parse(p.out)["margin"].get<double>()) < 1e-12);

  const auto nt = run(with({"check", "--criterion", "ntuple"}, kPauli));
  CHECK(nt.code == 2);

  const auto oracle = run(with({"check", "--criterion", "oracle"}, kPauli));
  CHECK(oracle.code == 1);

  const auto all_pairs = run(with({"check", "--criterion", "pairwise"}, kPauli));
  CHECK(all_pairs.code == 1);
  CHECK(json::parse(all_pairs.out)["certificate"]["pairs"].size() == 3);
}

TEST_CASE("malformed input exits 64") {
  const auto bad = temp_file("qjm_bad.json", R"({"measurements": [[2,0,0]]})");
  const auto r = run({"check", "--input", bad});
  CHECK(r.code == 64);
  CHECK(json::parse(r.err)["error"]["kind"] == "invariant");

  CHECK(run({"check", "--m", "1,0"}).code == 64);
  CHECK(run({"check", "--input", "/nonexistent/file.json"}).code == 64);
  CHECK(run({"check", "--criterion", "bogus", "--m", "0,0,0"}).code == 64);
  CHECK(run({"check"}).code == 64);
  CHECK(run({}).code == 64);
  CHECK(run({"check", "--criterion", "triple", "--m", "0,0,0", "--m", "0,0,0"}).code == 64);
}

TEST_CASE("bound and delta") {
  const auto r = run(with({"bound", "--kind", "triple", "--json"}, kPauli));
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(std::abs(j["triple"]["degree"].get<double>() - (2.0 * std::sqrt(3.0) - 2.0)) < 1e-9);

  const auto all = run(with({"bound"}, kPauli));
  CHECK(all.code == 0);
  CHECK(all.out.find("pairwise-sum: raw_margin=1.24264068711928") != std::string::npos);

  const double s = 1.0 / std::sqrt(3.0);
  const std::string v = std::to_string(s);
  const auto d = run(with({"delta", "--json", "--n", v + ",0,0", "--n", "0," + v + ",0", "--n", "0,0," + v}, kPauli));
  REQUIRE(d.code == 0);
  CHECK(json::parse(d.out)["delta"].get<double>() == doctest::Approx(2.0 * std::sqrt(3.0) - 2.0).epsilon(1e-5));

  CHECK(run(with({"delta", "--n", "0,0,0"}, kPauli)).code == 64);
  CHECK(run({"bound", "--kind", "ntuple", "--m", "0,0,0", "--m", "0,0,0"}).code == 64);
}

TEST_CASE("scan") {
  CHECK(run({"scan", "--count", "0"}).code == 64);

  const auto a = run({"scan", "--count", "200", "--seed", "42"});
  const auto b = run({"scan", "--seed", "42", "--count", "200"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream lines(a.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "idx,m1x,m1y,m1z,m2x,m2y,m2z,m3x,m3y,m3z,pair12,pair13,pair23,l1_raw,l2_raw");
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 200);

  const auto known = run({"scan", "--count", "1", "--filter", "genuine-pairwise-ok", "--include-known"});
  CHECK(known.code == 0);
  CHECK(known.out.find("\n1,0.70710678118654746,0,0,0,0.70710678118654746,0,0,0,0.70710678118654746,") != std::string::npos);

  const auto other_seed = run({"scan", "--count", "200", "--seed", "43"});
  CHECK(other_seed.out != a.out);
}

TEST_CASE("reproduce") {
  const auto r = run({"reproduce", "--json", "--starts", "4"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["all_pass"] == true);
  CHECK(j["results"].size() == 5);

  const auto broken = run({"reproduce", "--perturb", "1e-6", "--starts", "2"});
  CHECK(broken.code == 1);
  CHECK(broken.out.find("FAIL") != std::string::npos);
  CHECK(broken.out.find("pauli_optimizer_delta") != std::string::npos);
}

TEST_CASE("output file") {
  const auto path = (std::filesystem::temp_directory_path() / "qjm_out.json").string();
  std::filesystem::remove(path);
  const auto r = run(with({"--output", path, "bound", "--kind", "triple", "--json"}, kPauli));
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const auto j = json::parse(in);
  CHECK(j.contains("triple"));
}
