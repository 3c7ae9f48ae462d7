#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "threshq/compact_circle.hpp"
#include "threshq/distributions.hpp"
#include "threshq/error.hpp"
#include "threshq/estimators.hpp"
#include "threshq/group_tree.hpp"
#include "threshq/quality.hpp"

namespace threshq {

enum class Command { Quality, Bounds, LemmaCheck, TreeDemo, CircleAvg, PaperSuite };
enum class OutputFormat { Csv, Json };

std::string to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

// Exit statuses of run() and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // a verdict or suite scenario came out false
inline constexpr int kExitConfig = 2;
inline constexpr int kExitLimit = 3;
inline constexpr int kExitError = 4;

struct ExperimentConfig {
  Command command = Command::Quality;
  /// Spec objects are kept in normalized JSON form (defaults filled in) and turned
  /// into library objects at run time. Validation already built them once.
  nlohmann::json distribution;  // null when the command does not use one
  nlohmann::json estimator;     // null when the command does not use one
  /// Either a number or a "p/q" string, exactly as given.
  nlohmann::json delta;
  std::size_t n = 1;
  std::optional<std::vector<double>> theta_grid;  // nullopt: default grid
  std::size_t k = 5;
  MCConfig mc;
  bool closed_interval = false;
  OutputFormat format = OutputFormat::Csv;
  std::string output_path;  // empty: payload goes to the caller
  std::size_t radius = 8;
  std::size_t gamma_grid = 64;
  nlohmann::json density;  // circle knots [[x, f], ...] or null for uniform
  std::string density_file;

  double delta_value() const;
  bool operator==(const ExperimentConfig&) const = default;
};

struct FieldError {
  std::string path;  // JSON pointer; for syntax errors "@byte N"
  std::string message;
  bool limit = false;  // a size limit rather than a malformed value
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<FieldError> errors;

  bool ok() const { return config.has_value(); }
  /// Every error is a size limit (reported with the limit exit status).
  bool only_limit_errors() const;
  /// One "path: message" line per error.
  std::string describe_errors() const;
};

/// Total: never throws on bad input, reports every field error it finds.
ParseResult parse_config(std::string_view text);
/// Same checks on an already parsed document.
ParseResult validate_config(const nlohmann::json& doc);

nlohmann::json to_json(const ExperimentConfig& c);
std::string serialize(const ExperimentConfig& c);

/// Stores a delta given as text: a "p/q" string when the text has a '/' or the
/// configured atoms use exact locations, a number otherwise.
void set_delta_text(nlohmann::json& doc, std::string_view text);

/// Library objects from spec records; throw Error(Config) with a readable message.
Distribution distribution_from_json(const nlohmann::json& spec);
RandomizedEstimator estimator_from_json(const nlohmann::json& spec, const Distribution& d, double delta,
                                        std::size_t n, const WindowOptions& opts = {});
circle::CircleEstimator circle_estimator_from_json(const nlohmann::json& spec);
tree::TreeEstimator tree_estimator_from_json(const nlohmann::json& spec);
tree::TreeDistribution tree_distribution_from_json(const nlohmann::json& spec);
/// Parses a density table file: one "x,f" (or whitespace separated) pair per line, '#' comments.
std::vector<Knot> read_density_file(const std::string& path);

struct RunResult {
  int exit_code = kExitOk;
  std::string summary;  // human-readable table
  std::string payload;  // CSV or JSON report
  std::string written_path;
};

/// Runs a validated config. Library errors propagate as threshq::Error; exit_code
/// reports verdicts (kExitOk or kExitCheckFailed).
RunResult run(const ExperimentConfig& c);

/// Maps a library error code to the CLI exit status.
int exit_status_for(ErrorCode code);

}  // namespace threshq
