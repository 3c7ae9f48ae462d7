// threshq command line front end. Talks to the library only through threshq.h.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "threshq.h"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<unsigned> parallelism;
  std::optional<std::string> out;
  std::optional<std::string> format;
  bool closed_interval = false;
  std::optional<std::string> delta;
  std::optional<std::size_t> n;
  std::optional<std::size_t> k;
  std::optional<std::size_t> radius;
  std::optional<std::size_t> gamma_grid;
  std::optional<std::string> density;
  std::optional<std::string> distribution;
  std::optional<std::string> estimator;
  bool print_config = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "Monte Carlo seed");
  sub->add_option("--trials", f.trials, "Monte Carlo trials per evaluation");
  sub->add_option("--parallelism", f.parallelism, "worker threads (results do not depend on it)");
  sub->add_option("--out", f.out, "write the report here instead of stdout");
  sub->add_option("--format", f.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--closed-interval", f.closed_interval, "count |e(x) - theta| = delta as a success");
  sub->add_flag("--print-config", f.print_config, "print the validated config with defaults and exit");
}

void add_model(CLI::App* sub, Flags& f) {
  sub->add_option("--delta", f.delta, "threshold delta, a number or \"p/q\"");
  sub->add_option("--n", f.n, "sample count");
  sub->add_option("--distribution", f.distribution, "distribution record as JSON text");
}

int fail_with(tq_status s, const char* what) {
  std::cerr << "threshq: " << what << " (" << tq_status_name(s) << ")\n" << tq_last_error();
  const std::string msg = tq_last_error();
  if (!msg.empty() && msg.back() != '\n') std::cerr << '\n';
  return tq_exit_status(s);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case threshold quality of location estimators"};
  app.set_version_flag("--version", tq_version());
  app.require_subcommand(1);
  Flags f;

  auto* quality = app.add_subcommand("quality", "quality of an estimator over a theta grid, checked against bounds");
  add_common(quality, f);
  add_model(quality, f);
  quality->add_option("--estimator", f.estimator, "estimator record as JSON text");
  quality->add_option("--k", f.k, "number of 2*delta*i points added to the default grid");

  auto* bounds = app.add_subcommand("bounds", "S and T ceilings for a distribution");
  add_common(bounds, f);
  add_model(bounds, f);

  auto* lemma = app.add_subcommand("lemma-check", "sumset averaging bound for one-sample estimators on atoms");
  add_common(lemma, f);
  add_model(lemma, f);
  lemma->add_option("--estimator", f.estimator, "estimator record as JSON text");
  lemma->add_option("--k", f.k, "largest k of the sumsets Y_k");

  auto* tree = app.add_subcommand("tree-demo", "exact qualities on the trivalent Cayley tree");
  add_common(tree, f);
  tree->add_option("--delta", f.delta, "threshold in (0, 1)");
  tree->add_option("--radius", f.radius, "ball radius");
  tree->add_option("--estimator", f.estimator, "tree estimator record as JSON text");

  auto* circle = app.add_subcommand("circle-avg", "averaging construction on the circle");
  add_common(circle, f);
  circle->add_option("--delta", f.delta, "threshold in (0, 1/2)");
  circle->add_option("--n", f.n, "sample count");
  circle->add_option("--density", f.density, "density table file with x,f lines on [0, 1]")->check(CLI::ExistingFile);
  circle->add_option("--gamma-grid", f.gamma_grid, "number of gamma (and theta) grid points");
  circle->add_option("--estimator", f.estimator, "circle estimator record as JSON text");

  auto* suite = app.add_subcommand("paper-suite", "every registered scenario against its reference value");
  add_common(suite, f);
  suite->add_option("--radius", f.radius, "tree ball radius");
  suite->add_option("--gamma-grid", f.gamma_grid, "circle grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tq_exit_status(TQ_ERR_CONFIG);  // usage errors count as config errors
  }
  CLI::App* sub = app.get_subcommands().front();

  tq_config* cfg = nullptr;
  tq_status s = f.config_path.empty() ? tq_config_new(sub->get_name().c_str(), &cfg)
                                      : tq_config_parse(read_file(f.config_path).c_str(), &cfg);
  if (s != TQ_OK) return fail_with(s, "cannot read config");

  auto set_json = [&](const char* pointer, const std::string& value) {
    if (s == TQ_OK) s = tq_config_set_json(cfg, pointer, value.c_str());
  };
  auto set_string = [&](const char* pointer, const std::string& value) {
    if (s == TQ_OK) s = tq_config_set_string(cfg, pointer, value.c_str());
  };
  s = tq_config_set_command(cfg, sub->get_name().c_str());
  if (f.distribution) set_json("/distribution", *f.distribution);
  if (f.estimator) set_json("/estimator", *f.estimator);
  if (f.seed) set_json("/mc/seed", std::to_string(*f.seed));
  if (f.trials) set_json("/mc/trials", std::to_string(*f.trials));
  if (f.parallelism) set_json("/mc/parallelism", std::to_string(*f.parallelism));
  if (f.out) set_string("/output/path", *f.out);
  if (f.format) set_string("/output/format", *f.format);
  if (f.closed_interval) set_json("/closed_interval", "true");
  if (f.n) set_json("/n", std::to_string(*f.n));
  if (f.k) set_json("/k", std::to_string(*f.k));
  if (f.radius) set_json("/radius", std::to_string(*f.radius));
  if (f.gamma_grid) set_json("/gamma_grid", std::to_string(*f.gamma_grid));
  if (f.density) set_string("/density_file", *f.density);
  if (f.delta && s == TQ_OK) s = tq_config_set_delta(cfg, f.delta->c_str());
  if (s != TQ_OK) {
    const int code = fail_with(s, "bad override");
    tq_config_free(cfg);
    return code;
  }

  s = tq_config_validate(cfg);
  if (s != TQ_OK) {
    const int code = fail_with(s, "invalid config");
    tq_config_free(cfg);
    return code;
  }

  if (f.print_config) {
    char* text = nullptr;
    s = tq_config_to_json(cfg, &text);
    if (s == TQ_OK) std::cout << text;
    tq_string_free(text);
    tq_config_free(cfg);
    return s == TQ_OK ? 0 : fail_with(s, "cannot serialize config");
  }

  tq_result* result = nullptr;
  s = tq_run(cfg, &result);
  tq_config_free(cfg);
  if (s != TQ_OK) return fail_with(s, "run failed");

  const std::string written = tq_result_written_path(result);
  if (written.empty()) {
    std::cerr << tq_result_summary(result);
    std::cout << tq_result_payload(result);
  } else {
    std::cout << tq_result_summary(result) << "\nreport written to " << written << "\n";
  }
  const int code = tq_result_exit_code(result);
  tq_result_free(result);
  return code;
}
