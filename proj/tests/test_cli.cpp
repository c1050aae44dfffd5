#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "cvmet/cli.hpp"

using namespace cvmet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cvmet");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cvmet_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string body(const std::string& csv) { return csv.substr(csv.find('\n') + 1); }

}  // namespace

TEST_CASE("17 significant digits") {
  for (double v : {0.1, 168.96, -3.0e-200, 1.0 / 3.0, 6.02214076e23}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
    const std::string mantissa = s.substr(0, s.find('e'));
    int digits = 0;
    for (char c : mantissa) digits += std::isdigit(static_cast<unsigned char>(c)) ? 1 : 0;
    CHECK(digits == 17);
  }
  CHECK(format_double(168.96) == "1.6896000000000001e+02");
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("RFC-4180 quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");

  Table t;
  t.columns = {"x", "label"};
  t.rows.push_back({1.5, std::string("a,b")});
  t.rows.push_back({Cell(), true});
  const std::string csv = to_csv(t);
  CHECK(csv == "# cvmet " + tool_version() + "\nx,label\n1.5000000000000000e+00,\"a,b\"\n,true\n");
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("shipped config equals the built-in defaults") {
  const fs::path shipped = fs::path(CVMET_SOURCE_DIR) / "configs" / "default.json";
  REQUIRE(fs::exists(shipped));
  CHECK(nlohmann::json::parse(slurp(shipped)) == nlohmann::json::parse(default_config_json()));
}

TEST_CASE("config parsing and overrides") {
  const RunConfig d = parse_config("");
  CHECK(d.command == "qfi");
  CHECK(d.optomech.g == 0.1);
  CHECK(d.optomech.mirror_dim.d == 256);

  const RunConfig c = parse_config(R"({"strategy": {"m": 2, "name": "qs"}})",
                                   {"strategy.theta1=0.25", "sweep.values=[1,3,5]", "command=sweep"});
  CHECK(c.strategy.m == 2);
  CHECK(c.strategy.strategy == Strategy::quantum_switch);
  CHECK(c.strategy.theta1 == 0.25);
  CHECK(c.sweep_values == std::vector<double>{1, 3, 5});
  CHECK(c.command == "sweep");

  CHECK_THROWS_AS(parse_config(R"({"strategy": {"mm": 2}})"), ValidationError);
  CHECK_THROWS_AS(parse_config("", {"nope=1"}), ValidationError);
  CHECK_THROWS_AS(parse_config("", {"strategy=1"}), ValidationError);
  CHECK_THROWS_AS(parse_config("", {"strategy.m"}), ValidationError);
  CHECK_THROWS_AS(parse_config("{broken"), ValidationError);
  CHECK_THROWS_AS(parse_config("", {"strategy.m=\"two\""}), ValidationError);
  CHECK_THROWS_AS(parse_config("", {"command=sweep", "sweep.values=[]"}), ValidationError);
  CHECK_THROWS_AS(parse_config("", {"command=sweep", "sweep.values=[2,2]"}), ValidationError);
  CHECK_THROWS_AS(parse_config("", {"command=sweep", "sweep.values=[1.5]"}), ValidationError);
  CHECK_THROWS_AS(parse_config("", {"command=launch"}), ValidationError);
  CHECK_THROWS_AS(parse_config("", {"strategy.probe.kind=cat"}), ValidationError);
}

TEST_CASE("bch-table renders exact rationals") {
  RunConfig c = parse_config("", {"command=bch-table", "bch.m_max=2"});
  const CommandOutput out = execute(c);
  CHECK(out.table.columns == std::vector<std::string>{"m", "n", "variant", "power", "coeff_re", "coeff_im"});
  // m=1: C_2 = -i/2, C'_2 = i/2; m=2: C_2 = -iP, C_3 = -1/3, C'_2 = iP, C'_3 = 2/3.
  const std::string csv = body(to_csv(out.table));
  CHECK(csv.find("1,2,AB,0,0,-1/2\n") != std::string::npos);
  CHECK(csv.find("1,2,BA,0,0,1/2\n") != std::string::npos);
  CHECK(csv.find("2,3,AB,0,-1/3,0\n") != std::string::npos);
  CHECK(csv.find("2,3,BA,0,2/3,0\n") != std::string::npos);
  CHECK(out.table.rows.size() == 6);
}

TEST_CASE("qfi command") {
  const RunConfig c = parse_config("", {"strategy.n_queries=4"});
  const CommandOutput out = execute(c);
  REQUIRE(out.table.rows.size() == 1);
  CHECK(std::get<double>(out.table.rows[0][7]) == doctest::Approx(168.96).epsilon(1e-12));
  CHECK(out.status == 0);
}

TEST_CASE("sweep command") {
  const RunConfig c = parse_config("", {"command=sweep", "strategy.name=switch"});
  const CommandOutput out = execute(c);
  CHECK(out.table.columns.front() == "N");
  REQUIRE(out.table.rows.size() == 4);
  for (const auto& row : out.table.rows) {
    const double n = double(std::get<long long>(row[0]));
    const double expect = 0.01 * n * n * n * n + 2 * n * n;
    CHECK(std::get<double>(row[5]) == doctest::Approx(expect).epsilon(1e-8));
    CHECK(std::get<double>(row[6]) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::get<bool>(row[9]));
  }
}

TEST_CASE("ratio command, m = 1 at N = 800") {
  const RunConfig c = parse_config("", {"command=ratio", "ratio.m=[1]", "ratio.n=[800]"});
  const CommandOutput out = execute(c);
  REQUIRE(out.table.rows.size() == 1);
  const double r = std::get<double>(out.table.rows[0][2]);
  CHECK(std::abs(r - 0.25) / 0.25 < 0.02);
}

TEST_CASE("exit codes and files") {
  const fs::path csv = scratch("qfi.csv");
  const fs::path js = scratch("qfi.json");
  CHECK(cli({"qfi", "--set", "strategy.n_queries=2", "--out", csv.string(), "--json", js.string()}) == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("# cvmet ", 0) == 0);
  const auto mirror = nlohmann::json::parse(slurp(js));
  CHECK(mirror["rows"].size() == 1);
  CHECK(mirror["rows"][0]["F"].get<double>() == doctest::Approx(8 * 4 * (2 * 4 * 0.01 + 1)));

  CHECK(cli({"sweep", "--set", "sweep.values=[]"}) == 1);
  CHECK(cli({"frobnicate"}) == 1);
  CHECK(cli({"qfi", "--config", scratch("missing.json").string()}) == 1);
  CHECK(cli({"qfi", "--set", "strategy.m=2", "--set", "parameter=theta1"}) == 1);
  CHECK(cli({"factorization-check", "--set", "factorization.m=[3]", "--set",
             "factorization.lambda=[0.3]", "--out", scratch("fact.csv").string()}) == 2);
}

TEST_CASE("sweep output is deterministic") {
  const fs::path a = scratch("a.csv");
  const fs::path b = scratch("b.csv");
  const std::vector<std::string> args{"--set", "strategy.m=2", "--set", "sweep.values=[1,2,3,5]"};
  std::vector<std::string> ra{"sweep", "--out", a.string()}, rb{"sweep", "--out", b.string()};
  ra.insert(ra.end(), args.begin(), args.end());
  rb.insert(rb.end(), args.begin(), args.end());
  REQUIRE(cli(ra) == 0);
  REQUIRE(cli(rb) == 0);
  CHECK(body(slurp(a)) == body(slurp(b)));
}

TEST_CASE("installed binary") {
  const char* bin = std::getenv("CVMET_BIN");
  if (!bin) return;
  const std::string cmd = std::string(bin) + " sweep --set 'sweep.values=[]' > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 1);
  const std::string ok = std::string(bin) + " bch-table --set bch.m_max=1 > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(ok.c_str())) == 0);
}
