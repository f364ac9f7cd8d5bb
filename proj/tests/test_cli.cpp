#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polyball/cli.hpp"
#include "polyball/io.hpp"
#include "polyball/random_tuples.hpp"

using namespace polyball;

namespace {
struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "polyball_cli_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = temp_path(name);
  std::ofstream(path) << text;
  return path;
}

const std::string fixtures = POLYBALL_FIXTURES;
}  // namespace

TEST_CASE("curv on a scalar tuple") {
  const auto path = write_file("scalar.json", R"({"n":[1],"dimH":1,"factors":[[[[[0.5,0]]]]]})");
  const auto r = run({"curv", "--input", path, "--qmax", "5"});
  REQUIRE(r.code == 0);
  const Json j = parse_json(r.out);
  for (const auto& g : j["grades"]) {
    const int q = g["q"][0];
    CHECK(g["x"].get<double>() == doctest::Approx(0.75 * std::pow(0.25, q)));
  }
  CHECK(j["bounds"]["rank"] == 1);
  const auto csv = run({"curv", "--input", path, "--qmax", "2", "--format", "csv"});
  CHECK(csv.out.rfind("q_1,x_q,cesaro,defect_product\n0,0.75,", 0) == 0);
  const auto ot = run({"curv", "--input", path, "--qmax", "3", "--formula", "operator-trace"});
  REQUIRE(ot.code == 0);
  CHECK(parse_json(ot.out)["value"].get<double>() == doctest::Approx(0.75 * std::pow(0.25, 3)));
}

TEST_CASE("exit codes") {
  const auto bad = run({"curv", "--input", fixtures + "/malformed.json"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("line") != std::string::npos);
  const auto big = write_file("big.json", R"({"n":[1],"dimH":1,"factors":[[[[[1.5,0]]]]]})");
  const auto nm = run({"curv", "--input", big});
  CHECK(nm.code == 2);
  CHECK(parse_json(nm.err)["worst_p"] == Json::array({1}));
  CHECK(run({"nonsense"}).code == 1);
  CHECK(run({"curv", "--qmax", "x"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("construct mt then mult") {
  const auto path = temp_path("mt.json");
  REQUIRE(run({"construct", "mt", "--n", "2", "--t", "0.5", "--caps", "6", "--out", path}).code == 0);
  const auto r = run({"mult", "--input", path, "--qmax", "5"});
  REQUIRE(r.code == 0);
  const Json j = parse_json(r.out);
  CHECK(j["estimate"].get<double>() == 0.5);
  for (const auto& g : j["multiplicity"]["grades"])
    if (g["q"][0].get<int>() >= 1) CHECK(g["y"].get<double>() == 0.5);
  CHECK(j["complement_exact"] == true);
}

TEST_CASE("construct uncountable then curv") {
  const auto path = temp_path("unc.json");
  REQUIRE(run({"construct", "uncountable", "--t", "0.3", "--omega", "0.8", "--caps", "12,12", "--out", path}).code == 0);
  const auto r = run({"curv", "--input", path, "--qmax", "12"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(parse_json(r.out)["estimate"].get<double>() - 0.3) < 1e-5);
}

TEST_CASE("other constructions") {
  CHECK(run({"construct", "cur0", "--n", "2,2", "--caps", "3,3"}).code == 0);
  CHECK(run({"construct", "finite_codim", "--n", "2", "--L", "2", "--caps", "4"}).code == 0);
  CHECK(run({"construct", "monomial", "--n", "2,1", "--suffixes", "12,2", "--caps", "4,4"}).code == 0);
  CHECK(run({"construct", "monomial_ideal", "--model", "symmetric", "--n", "2", "--generators", "1,0;0,2", "--caps", "4"})
            .code == 0);
  const auto gen = run({"construct", "generated", "--input", fixtures + "/z1_minus_z2.json"});
  CHECK(gen.code == 0);
  CHECK(parse_json(gen.out).contains("layers"));
  const auto a = temp_path("a.json"), b = temp_path("b.json");
  run({"construct", "mt", "--n", "2", "--t", "0.25", "--caps", "4", "--out", a});
  run({"construct", "mt", "--n", "3", "--t", "0.5", "--caps", "4", "--out", b});
  const auto t = run({"construct", "tensor", "--parts", a + "," + b});
  CHECK(t.code == 0);
  CHECK(parse_json(t.out)["factors"].size() == 2);
  CHECK(run({"construct", "bogus"}).code == 1);
}

TEST_CASE("checks") {
  const auto beur = run({"check", "beurling", "--input", fixtures + "/z1_minus_z2.json"});
  REQUIRE(beur.code == 0);
  CHECK(parse_json(beur.out)["verdict"] == false);
  CHECK(parse_json(beur.out)["min_eig"].get<double>() < -1e-3);

  Rng rng(41);
  const auto tp = write_file("pure.json", dump_json(tuple_to_json(random_pure_tuple({2, 2}, 4, 0.6, rng))));
  const auto con = run({"check", "connection", "--input", tp, "--caps", "4,4", "--qmax", "3"});
  REQUIRE(con.code == 0);
  CHECK(parse_json(con.out)["verdict"] == true);
  const auto itw = run({"check", "intertwine", "--input", tp, "--caps", "3,3"});
  CHECK(parse_json(itw.out)["verdict"] == true);

  // complement of the words ending in g_1, completed by right placement of e_1
  const auto comp = compression_tuple(monomial_subspace({2}, {5}, 0, {{1}}));
  const auto cp = write_file("comp.json", dump_json(tuple_to_json(comp.tuple)));
  const auto th = write_file(
      "theta.json", R"({"model":"full","n":[2],"source_dim":1,"target_dim":1,"blocks":[{"target":[1],"matrix":[[1],[0]]}]})");
  const auto idx = run({"check", "index", "--input", cp, "--theta", th, "--caps", "5", "--qmax", "4"});
  REQUIRE(idx.code == 0);
  const Json ij = parse_json(idx.out);
  CHECK(ij["verdict"] == true);
  CHECK(ij["rhs"].get<double>() == doctest::Approx(0.5));

  // same check straight from the subspace file
  const auto sp = write_file("suffix.json", dump_json(subspace_to_json(monomial_subspace({2}, {5}, 0, {{1}}))));
  const auto sidx = run({"check", "index", "--input", sp, "--theta", th, "--qmax", "4"});
  REQUIRE(sidx.code == 0);
  CHECK(parse_json(sidx.out)["lhs"].get<double>() == doctest::Approx(parse_json(sidx.out)["rhs"].get<double>()).epsilon(1e-10));
  const auto scon = run({"check", "connection", "--input", sp, "--qmax", "3"});
  CHECK(parse_json(scon.out)["verdict"] == true);
}

TEST_CASE("output does not depend on the thread count") {
  Rng rng(5);
  const auto tp = write_file("det.json", dump_json(tuple_to_json(random_pure_tuple({2, 2}, 5, 0.7, rng))));
  const auto one = run({"curv", "--input", tp, "--qmax", "5", "--threads", "1"});
  const auto four = run({"curv", "--input", tp, "--qmax", "5", "--threads", "4"});
  REQUIRE(one.code == 0);
  CHECK(one.out == four.out);
  const auto c1 = run({"curv", "--input", tp, "--qmax", "5", "--threads", "1", "--format", "csv"});
  const auto c4 = run({"curv", "--input", tp, "--qmax", "5", "--threads", "3", "--format", "csv"});
  CHECK(c1.out == c4.out);
}

TEST_CASE("curv-c and demo") {
  const auto path = write_file("sym.json", R"({"n":[1],"dimH":1,"factors":[[[[[0.5,0]]]]]})");
  const auto r = run({"curv-c", "--input", path, "--qmax", "4"});
  REQUIRE(r.code == 0);
  const Json j = parse_json(r.out);
  CHECK(j["characteristic"]["verdict"] == true);
  CHECK(j["estimate"].get<double>() == doctest::Approx(0.75 * std::pow(0.25, 4)));
  const auto sub = temp_path("ideal.json");
  run({"construct", "monomial_ideal", "--model", "symmetric", "--n", "2", "--generators", "1,0", "--caps", "6", "--out", sub});
  const auto m = run({"mult", "--input", sub, "--qmax", "6"});
  REQUIRE(m.code == 0);
  CHECK(parse_json(m.out)["multiplicity"]["corner_seq"].back().get<double>() == doctest::Approx(6.0 / 7.0));
  CHECK(run({"demo", "--qmax", "3"}).code == 0);
}
