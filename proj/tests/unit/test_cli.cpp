#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "arbor/cli/commands.hpp"

using arbor::cli::run;
using Json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

Json call_json(std::vector<std::string> args, int expected_code = 0) {
  args.push_back("--format");
  args.push_back("json");
  const Result r = call(args);
  REQUIRE_MESSAGE(r.code == expected_code, r.err);
  return Json::parse(r.out);
}

}  // namespace

TEST_CASE("ranges") {
  using arbor::cli::parse_int_range;
  CHECK(parse_int_range("1..4") == std::vector<int>{1, 2, 3, 4});
  CHECK(parse_int_range("4..1").empty());
  CHECK(parse_int_range("3") == std::vector<int>{3});
  CHECK(parse_int_range("1,3,5") == std::vector<int>{1, 3, 5});
  CHECK_THROWS(parse_int_range("x"));
  CHECK_THROWS(parse_int_range("1..y"));
  CHECK_THROWS(parse_int_range(""));
}

TEST_CASE("orders") {
  const Json two = call_json({"orders", "--r", "2", "--n", "1..4"});
  std::vector<int> logs;
  for (const auto& row : two["rows"]) {
    logs.push_back(row["log2_formula"]);
    CHECK(row["match"] == true);
    CHECK(row["bfs_order"] == (std::uint64_t{1} << row["log2_formula"].get<int>()));
  }
  CHECK(logs == std::vector<int>{1, 3, 6, 12});
  const Json one = call_json({"orders", "--r", "1", "--n", "1..4"});
  logs.clear();
  for (const auto& row : one["rows"]) logs.push_back(row["log2_formula"]);
  CHECK(logs == std::vector<int>{1, 2, 3, 4});
  const Json empty = call_json({"orders", "--r", "1", "--n", "3..1"});
  CHECK(empty["rows"].empty());

  const Result csv = call({"orders", "--r", "2", "--n", "1..2", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out == "r,n,log2_formula,bfs_order,bprime_count,match_flag\n2,1,1,2,2,true\n2,2,3,8,8,true\n");
}

TEST_CASE("frobenius-verify") {
  const Json basilica = call_json({"frobenius-verify", "--p", "7", "--r", "2", "--n", "4"});
  CHECK(basilica["pass"] == true);
  CHECK(basilica["c"] == 6);
  CHECK(basilica["p_r_root"]["exp"] == 2);
  CHECK(basilica["p_r_root"]["value"] == 3);
  CHECK(basilica["frobenius_residue_image"] == Json::array({1, 3}));
  for (const auto& check : basilica["checks"]) CHECK_MESSAGE(check["pass"] == true, check["name"]);

  CHECK(call({"frobenius-verify", "--p", "5", "--r", "1", "--n", "3"}).code == 0);
  const Result orbit = call({"frobenius-verify", "--p", "7", "--r", "2", "--n", "4", "--x0", "6"});
  CHECK(orbit.code == 2);
  CHECK(orbit.err.find("forward orbit") != std::string::npos);
  CHECK(call({"frobenius-verify", "--p", "9", "--r", "2", "--n", "4"}).code == 2);
  CHECK(call({"frobenius-verify", "--p", "13", "--r", "3", "--n", "4"}).code == 2);  // no c of period 3
  CHECK(call({"frobenius-verify", "--r", "2", "--n", "4"}).code == 2);

  const Json mutated = call_json({"frobenius-verify", "--p", "7", "--r", "2", "--n", "6", "--mutate"}, 1);
  CHECK(mutated["pass"] == false);
  CHECK(mutated["mutation"] == "swapped the children of ba");
}

TEST_CASE("label-tree") {
  const std::vector<std::string> args{"label-tree", "--p", "5", "--c", "4", "--r", "2", "--x0", "2", "--n", "3"};
  const Json tree = call_json(args);
  const int k = tree["field"]["k"];
  CHECK(tree["nodes"].size() == 15);
  CHECK(tree["nodes"]["()"][0] == 2);
  CHECK(tree["nodes"]["aba"].size() == static_cast<std::size_t>(k));
  CHECK(tree["verification"]["pass"] == true);
  CHECK(tree["tower"].size() == 2);
  // Byte-identical reruns.
  CHECK(call(args).out == call(args).out);
  std::vector<std::string> json_args = args;
  json_args.insert(json_args.end(), {"--format", "json"});
  CHECK(call(json_args).out == call(json_args).out);
}

TEST_CASE("membership and closures") {
  const Json alpha = call_json({"membership", "--r", "2", "--alpha", "1", "--n", "6"});
  CHECK(alpha["in_b_prime"] == true);
  CHECK(alpha["oracle_agrees"] == true);
  const Json hex = call_json({"membership", "--r", "1", "--sigma", "0301"});
  CHECK(hex["in_b_prime"] == false);
  CHECK(hex["in_m_prime"] == false);  // P = 7 mod 8 at the root, 1 mod 4 at a
  CHECK(call({"membership", "--r", "1", "--sigma", "zz"}).code == 2);

  CHECK(call({"pink-closure", "--r", "2", "--n", "4"}).code == 0);
  CHECK(call({"pink-closure", "--r", "2", "--n", "4", "--mutate"}).code == 1);
  CHECK(call({"pink-closure", "--r", "2", "--n", "6", "--cap", "1000"}).code == 2);

  const Json counts = call_json({"enumerate-bprime", "--r", "2", "--n", "1..3", "--list"});
  CHECK(counts["rows"].size() == 3);
  CHECK(counts["rows"][2]["bprime_count"] == 64);
  CHECK(counts["rows"][2]["elements"].size() == 64);
  CHECK(call({"enumerate-bprime", "--r", "2", "--n", "5"}).code == 2);
}

TEST_CASE("condition-check") {
  const Json holds = call_json({"condition-check", "--c", "-1", "--x0", "5", "--r", "2"});
  CHECK(holds["condition_one"]["condition"] == true);
  CHECK(holds["condition_one"]["rank"] == 4);
  CHECK(holds["condition_one"]["dependencies"].empty());
  const Json fails = call_json({"condition-check", "--c", "-1", "--x0", "3", "--r", "2", "--n", "2"});
  CHECK(fails["condition_one"]["condition"] == false);
  CHECK(fails["condition_one"]["dependencies"] == Json::parse("[[2]]"));
  CHECK(fails["aut_tn"]["condition"] == false);
  CHECK(call({"condition-check", "--c", "-1", "--x0", "5", "--r", "3"}).code == 2);
  CHECK(call({"condition-check", "--c", "-1", "--x0", "5"}).code == 2);
  CHECK(call({"condition-check", "--c", "x", "--x0", "5", "--r", "1"}).code == 2);
  CHECK(call({"condition-check", "--c", "-1", "--x0", "-1", "--n", "2"}).code == 2);
}

TEST_CASE("verify-all") {
  const Result quick = call({"verify-all", "--format", "json"});
  CHECK(quick.code == 0);
  CHECK(quick.out == call({"verify-all", "--format", "json"}).out);
  const Json report = Json::parse(quick.out);
  CHECK(report["criteria"].size() == 8);
  CHECK(report["pass"] == true);
  const Result tampered = call({"verify-all", "--mutate", "--format", "json"});
  CHECK(tampered.code == 1);
  CHECK(Json::parse(tampered.out)["pass"] == false);
  CHECK(call({"verify-all", "--profile", "slow"}).code == 2);
}

TEST_CASE("usage") {
  CHECK(call({}).code == 2);
  CHECK(call({"bogus"}).code == 2);
  CHECK(call({"orders", "--bogus"}).code == 2);
  CHECK(call({"orders", "--format", "xml"}).code == 2);
  const Result help = call({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("frobenius-verify") != std::string::npos);

  const std::string path = "arbor_cli_test_out.json";
  CHECK(call({"orders", "--r", "1", "--n", "1..2", "--format", "json", "--out", path}).code == 0);
  std::ifstream file(path);
  REQUIRE(file);
  CHECK(Json::parse(file)["rows"].size() == 2);
  file.close();
  std::remove(path.c_str());
}
