#include <filesystem>
#include <fstream>
#include <regex>

#include <doctest.h>

#include "threshq/experiment.hpp"
#include "threshq/reports.hpp"

using namespace threshq;
using nlohmann::json;

namespace {

bool has_error(const ParseResult& r, const std::string& path, const std::string& fragment) {
  for (const auto& e : r.errors)
    if (e.path == path && e.message.find(fragment) != std::string::npos) return true;
  return false;
}

ExperimentConfig must_parse(const std::string& text) {
  const auto r = parse_config(text);
  INFO(r.describe_errors());
  REQUIRE(r.ok());
  return *r.config;
}

const char* kQuality = R"({"command": "quality", "distribution": {"family": "exponential"},
  "estimator": {"kind": "min_shift"}, "delta": 0.25, "n": 2})";

}  // namespace

TEST_CASE("minimal config gets the defaults") {
  const auto c = must_parse(kQuality);
  CHECK(c.command == Command::Quality);
  CHECK(c.mc.trials == 100000);
  CHECK(c.mc.seed == 42);
  CHECK(c.mc.parallelism == 1);
  CHECK(c.mc.ci_level == 0.95);
  CHECK_FALSE(c.theta_grid.has_value());
  CHECK(c.k == 5);
  CHECK(c.format == OutputFormat::Csv);
  CHECK_FALSE(c.closed_interval);
  CHECK(c.distribution.at("rate") == 1.0);

  const auto t = must_parse(R"({"command": "tree-demo"})");
  CHECK(t.delta_value() == 0.5);
  CHECK(t.estimator.at("kind") == "truncation");
  CHECK(t.radius == 8);
}

TEST_CASE("field errors") {
  CHECK(has_error(parse_config(R"({"command": "bounds", "distribution": {"family": "gaussian"}, "delta": -1})"),
                  "/delta", "delta must be positive"));
  CHECK(has_error(parse_config(R"({"command": "bounds", "distribution": {"family": "gaussian"}, "delta": "x"})"),
                  "/delta", "delta must be a number"));
  const auto mass = parse_config(
      R"({"command": "bounds", "distribution": {"family": "atoms", "points": [[0, 0.5], [1, 0.4]]}, "delta": 0.5})");
  CHECK(has_error(mass, "/distribution", "0.9"));
  const auto exact_mass = parse_config(
      R"({"command": "bounds", "distribution": {"family": "atoms", "points": [["0", "1/2"], ["1", "2/5"]]}, "delta": "1/2"})");
  CHECK(has_error(exact_mass, "/distribution", "9/10"));
  CHECK(has_error(parse_config(R"({"command": "bounds", "distribution": {"family": "cauchy"}, "delta": 1})"),
                  "/distribution", "unknown distribution family"));
  CHECK(has_error(parse_config(R"({"command": "quality", "distribution": {"family": "gaussian"},
                                   "estimator": {"kind": "median"}, "delta": 1})"),
                  "/estimator", "unknown estimator kind"));
  CHECK(has_error(parse_config(R"({"command": "bounds", "distribution": {"family": "gaussian"}, "delta": 1, "sed": 3})"),
                  "/sed", "unknown field"));
  CHECK(has_error(parse_config(R"({"command": "bounds", "distribution": {"family": "gaussian"}, "delta": 1, "radius": 4})"),
                  "/radius", "not used by bounds"));
  CHECK(has_error(parse_config(R"({"command": "bounds", "distribution": {"family": "atoms", "points": [["0", "1/2"], ["1", "1/2"]]}, "delta": 0.5})"),
                  "/delta", "must be one too"));
  CHECK(has_error(parse_config(R"({"command": "bounds", "distribution": {"family": "atoms", "points": [[0, 0.5], [1, 0.5]]}, "delta": "1/2"})"),
                  "/delta", "use one form for both"));
  CHECK(has_error(parse_config(R"({"command": "tree-demo", "delta": 1.5})"), "/delta", "0 < delta < 1"));
  CHECK(has_error(parse_config(R"({"command": "tree-demo", "radius": 30})"), "/radius", "at most 18"));
  CHECK(has_error(parse_config(R"({"command": "circle-avg", "delta": 0.7})"), "/delta", "0 < delta < 1/2"));
  CHECK(has_error(parse_config(R"({"command": "nope"})"), "/command", "unknown command"));
  CHECK(has_error(parse_config(R"({"command": "quality", "distribution": {"family": "gaussian"},
                                   "estimator": {"kind": "mean"}, "delta": 1, "mc": {"trials": 5}})"),
                  "/mc/trials", "at least"));

  // every error at once
  const auto many = parse_config(R"({"command": "bounds", "delta": 0, "bogus": 1})");
  CHECK(many.errors.size() >= 3);
  const auto syntax = parse_config("{\"command\": ");
  REQUIRE(syntax.errors.size() == 1);
  CHECK(syntax.errors[0].path.rfind("@byte", 0) == 0);
}

TEST_CASE("serialize round trip") {
  const std::vector<std::string> docs = {
      kQuality,
      R"({"command": "quality", "distribution": {"family": "gaussian", "sigma": 2}, "estimator": {"kind": "mixture",
          "parts": [{"weight": 0.5, "kind": "mean"}, {"weight": 0.5, "kind": "constant", "value": 1}]},
          "delta": 1, "theta_grid": {"from": -1, "to": 1, "points": 5}, "mc": {"seed": 7, "parallelism": 3}})",
      R"({"command": "bounds", "distribution": {"family": "atoms", "points": [["0", "1/4"], ["1", "7/20"], ["10", "2/5"]]},
          "delta": "3/4", "closed_interval": true})",
      R"({"command": "lemma-check", "distribution": {"family": "atoms", "points": [[0, 0.5], [1, 0.5]]}, "delta": 0.6, "k": 3})",
      R"({"command": "tree-demo", "radius": 5, "estimator": {"kind": "right_translate", "word": "ab"},
          "output": {"format": "json"}})",
      R"({"command": "circle-avg", "delta": 0.1, "n": 2, "density": [[0, 5], [0.2, 0], [0.8, 0], [1, 5]], "gamma_grid": 16})",
      R"({"command": "paper-suite", "radius": 6})",
  };
  for (const auto& d : docs) {
    INFO(d);
    const auto c = must_parse(d);
    const auto again = must_parse(serialize(c));
    CHECK(again == c);
    CHECK(serialize(again) == serialize(c));
  }
}

TEST_CASE("reports do not depend on parallelism") {
  auto c = must_parse(R"({"command": "quality", "distribution": {"family": "gaussian"}, "estimator": {"kind": "window_mle"},
                          "delta": 0.5, "n": 3, "theta_grid": [0, 1, 2.5], "mc": {"trials": 20000}})");
  const std::string one = run(c).payload;
  c.mc.parallelism = 4;
  CHECK(run(c).payload == one);
  CHECK(one.rfind("theta,q,ci,exact,is_worst\n", 0) == 0);
}

TEST_CASE("tree-demo report") {
  const auto r = run(must_parse(R"({"command": "tree-demo", "radius": 4})"));
  CHECK(r.exit_code == kExitOk);
  CHECK(r.payload.rfind("theta,q,num,den\n", 0) == 0);
  CHECK(r.payload.find("\n,1,1,1\n") != std::string::npos);  // identity
  CHECK(r.payload.find("\na,1,1,1\n") != std::string::npos);
  CHECK(r.payload.find("\nb,2/3,2,3\n") != std::string::npos);
  CHECK(r.summary.find("2/3") != std::string::npos);

  const auto j = json::parse(run(must_parse(R"({"command": "tree-demo", "radius": 3, "output": {"format": "json"}})")).payload);
  CHECK(j.at("report").contains("translate_comparison"));
}

TEST_CASE("run verdicts") {
  CHECK(run(must_parse(R"({"command": "bounds", "distribution": {"family": "atoms",
        "points": [["0", "1/4"], ["1", "7/20"], ["10", "2/5"]]}, "delta": "3/4"})")).exit_code == kExitOk);
  CHECK(run(must_parse(R"({"command": "lemma-check", "distribution": {"family": "atoms",
        "points": [[0, 0.4], [1, 0.6]]}, "delta": 0.25, "k": 4})")).exit_code == kExitOk);
}

TEST_CASE("writing the report") {
  const auto dir = std::filesystem::temp_directory_path() / "threshq_experiment_test";
  std::filesystem::create_directories(dir);
  auto c = must_parse(R"({"command": "tree-demo", "radius": 2})");
  c.output_path = (dir / "tree.csv").string();
  const auto r = run(c);
  CHECK(r.written_path == c.output_path);
  std::ifstream in(c.output_path);
  std::string first;
  std::getline(in, first);
  CHECK(first == "theta,q,num,den");
  c.output_path = (dir / "missing" / "x.csv").string();
  CHECK_THROWS_AS(run(c), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("density files") {
  const auto path = std::filesystem::temp_directory_path() / "threshq_density.txt";
  {
    std::ofstream out(path);
    out << "# bump\n0,5\n0.2 0\n0.8,0\n1,5\n";
  }
  const auto knots = read_density_file(path.string());
  REQUIRE(knots.size() == 4);
  CHECK(knots[1].x == 0.2);
  CHECK(knots[3].f == 5);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_density_file("/nonexistent/density"), Error);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0 / 3.0) == "0.6666666666666666");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("ab") == "ab");
}
