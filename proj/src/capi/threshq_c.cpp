#include "threshq.h"

#include <cstring>
#include <exception>
#include <string>

#include "threshq/experiment.hpp"
#include "threshq/reports.hpp"

using threshq::ErrorCode;
using nlohmann::json;

struct tq_distribution {
  threshq::Distribution d;
};

struct tq_estimator {
  threshq::RandomizedEstimator e;
};

struct tq_config {
  json doc;
  std::optional<threshq::ExperimentConfig> valid;
};

struct tq_result {
  threshq::RunResult r;
};

namespace {

thread_local std::string last_error;

tq_status code_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return TQ_ERR_INVALID_ARGUMENT;
    case ErrorCode::Config: return TQ_ERR_CONFIG;
    case ErrorCode::Limit: return TQ_ERR_LIMIT;
    case ErrorCode::Domain: return TQ_ERR_DOMAIN;
    case ErrorCode::Inconsistent: return TQ_ERR_INCONSISTENT;
    case ErrorCode::Io: return TQ_ERR_IO;
  }
  return TQ_ERR_INTERNAL;
}

tq_status set_error(tq_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

// Runs f and turns exceptions into status codes.
template <class F>
tq_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return TQ_OK;
  } catch (const threshq::Error& e) {
    return set_error(code_status(e.code()), e.what());
  } catch (const json::exception& e) {
    return set_error(TQ_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(TQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(TQ_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define TQ_REQUIRE(cond, what) \
  if (!(cond)) return set_error(TQ_ERR_INVALID_ARGUMENT, what)

double parse_delta(const char* text) {
  auto r = threshq::parse_rational(text);
  if (!r || *r <= 0) threshq::fail(ErrorCode::InvalidArgument, "delta must be a positive number or \"p/q\"");
  return threshq::to_double(*r);
}

}  // namespace

extern "C" {

const char* tq_version(void) { return "0.1.0"; }

const char* tq_last_error(void) { return last_error.c_str(); }

const char* tq_status_name(tq_status status) {
  switch (status) {
    case TQ_OK: return "ok";
    case TQ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TQ_ERR_CONFIG: return "config error";
    case TQ_ERR_LIMIT: return "limit exceeded";
    case TQ_ERR_DOMAIN: return "domain error";
    case TQ_ERR_INCONSISTENT: return "inconsistent data";
    case TQ_ERR_IO: return "i/o error";
    case TQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void tq_string_free(char* s) { std::free(s); }

void tq_mc_config_default(tq_mc_config* mc) {
  if (!mc) return;
  const threshq::MCConfig def;
  mc->trials = def.trials;
  mc->seed = def.seed;
  mc->parallelism = def.parallelism;
  mc->ci_level = def.ci_level;
}

tq_status tq_distribution_from_json(const char* spec, tq_distribution** out) {
  TQ_REQUIRE(spec && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new tq_distribution{threshq::distribution_from_json(json::parse(spec))}; });
}

void tq_distribution_free(tq_distribution* d) { delete d; }

tq_status tq_distribution_describe(const tq_distribution* d, char** out) {
  TQ_REQUIRE(d && out, "null argument");
  return guarded([&] { *out = dup(d->d.describe()); });
}

tq_status tq_distribution_pdf(const tq_distribution* d, double x, double* out) {
  TQ_REQUIRE(d && out, "null argument");
  return guarded([&] { *out = threshq::pdf(d->d, x); });
}

tq_status tq_distribution_cdf(const tq_distribution* d, double x, double* out) {
  TQ_REQUIRE(d && out, "null argument");
  return guarded([&] { *out = threshq::cdf(d->d, x); });
}

tq_status tq_distribution_sample(const tq_distribution* d, double theta, uint64_t seed, size_t n, double* out) {
  TQ_REQUIRE(d && out, "null argument");
  return guarded([&] {
    const auto xs = threshq::sample(threshq::ShiftedDistribution{d->d, theta}, seed, n);
    std::copy(xs.begin(), xs.end(), out);
  });
}

tq_status tq_estimator_from_json(const char* spec, const tq_distribution* d, const char* delta_text, size_t n,
                                 int closed_interval, tq_estimator** out) {
  TQ_REQUIRE(spec && d && delta_text && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    threshq::WindowOptions opts{closed_interval != 0, std::nullopt};
    if (std::strchr(delta_text, '/')) opts.exact_delta = threshq::parse_rational(delta_text);
    const double delta = parse_delta(delta_text);
    *out = new tq_estimator{threshq::estimator_from_json(json::parse(spec), d->d, delta, n, opts)};
  });
}

void tq_estimator_free(tq_estimator* e) { delete e; }

tq_status tq_estimator_label(const tq_estimator* e, char** out) {
  TQ_REQUIRE(e && out, "null argument");
  return guarded([&] { *out = dup(e->e.label()); });
}

int tq_estimator_is_shift_invariant(const tq_estimator* e) {
  return e && e->e.invariance() == threshq::Invariance::ShiftInvariant;
}

tq_status tq_estimator_evaluate(const tq_estimator* e, const double* x, size_t n, uint64_t seed, double* out) {
  TQ_REQUIRE(e && x && out, "null argument");
  return guarded([&] {
    threshq::Rng rng(seed);
    *out = e->e.evaluate(std::span<const double>(x, n), rng);
  });
}

tq_status tq_quality_at(const tq_estimator* e, const tq_distribution* d, size_t n, double theta, double delta,
                        const tq_mc_config* mc, int closed_interval, double* q, double* ci_half_width) {
  TQ_REQUIRE(e && d && mc && q, "null argument");
  return guarded([&] {
    threshq::MCConfig cfg;
    cfg.trials = mc->trials;
    cfg.seed = mc->seed;
    cfg.parallelism = mc->parallelism;
    cfg.ci_level = mc->ci_level;
    const auto est = threshq::quality_at(e->e, d->d, n, theta, delta, cfg, {closed_interval != 0});
    *q = est.q;
    if (ci_half_width) *ci_half_width = est.ci_half_width;
  });
}

tq_status tq_tree_quality(const char* estimator_spec, double delta, size_t radius, char** out) {
  TQ_REQUIRE(out, "null argument");
  return guarded([&] {
    const threshq::tree::TreeEstimator e = estimator_spec
                                               ? threshq::tree_estimator_from_json(json::parse(estimator_spec))
                                               : threshq::tree::TreeEstimator(threshq::tree::Truncation{});
    const auto bq = threshq::tree::quality_inf_ball(e, threshq::tree::TreeDistribution::standard(), delta, radius);
    *out = dup(threshq::to_string(bq.q));
  });
}

tq_status tq_config_new(const char* command, tq_config** out) {
  TQ_REQUIRE(command && out, "null argument");
  *out = new tq_config{json{{"command", command}}, std::nullopt};
  return TQ_OK;
}

tq_status tq_config_parse(const char* text, tq_config** out) {
  TQ_REQUIRE(text && out, "null argument");
  *out = nullptr;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    return set_error(TQ_ERR_CONFIG, "@byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) return set_error(TQ_ERR_CONFIG, "config must be a JSON object");
  *out = new tq_config{std::move(doc), std::nullopt};
  return TQ_OK;
}

void tq_config_free(tq_config* c) { delete c; }

tq_status tq_config_set_json(tq_config* c, const char* pointer, const char* json_value) {
  TQ_REQUIRE(c && pointer && json_value, "null argument");
  return guarded([&] {
    c->doc[json::json_pointer(pointer)] = json::parse(json_value);
    c->valid.reset();
  });
}

tq_status tq_config_set_string(tq_config* c, const char* pointer, const char* value) {
  TQ_REQUIRE(c && pointer && value, "null argument");
  return guarded([&] {
    c->doc[json::json_pointer(pointer)] = std::string(value);
    c->valid.reset();
  });
}

tq_status tq_config_set_command(tq_config* c, const char* command) {
  return tq_config_set_string(c, "/command", command);
}

tq_status tq_config_set_delta(tq_config* c, const char* text) {
  TQ_REQUIRE(c && text, "null argument");
  return guarded([&] {
    threshq::set_delta_text(c->doc, text);
    c->valid.reset();
  });
}

tq_status tq_config_validate(tq_config* c) {
  TQ_REQUIRE(c, "null argument");
  return guarded([&] {
    auto parsed = threshq::validate_config(c->doc);
    if (!parsed.ok())
      threshq::fail(parsed.only_limit_errors() ? ErrorCode::Limit : ErrorCode::Config, parsed.describe_errors());
    c->valid = std::move(parsed.config);
  });
}

tq_status tq_config_to_json(tq_config* c, char** out) {
  TQ_REQUIRE(c && out, "null argument");
  if (!c->valid) {
    const tq_status s = tq_config_validate(c);
    if (s != TQ_OK) return s;
  }
  return guarded([&] { *out = dup(threshq::serialize(*c->valid)); });
}

tq_status tq_run(tq_config* c, tq_result** out) {
  TQ_REQUIRE(c && out, "null argument");
  *out = nullptr;
  if (!c->valid) {
    const tq_status s = tq_config_validate(c);
    if (s != TQ_OK) return s;
  }
  return guarded([&] { *out = new tq_result{threshq::run(*c->valid)}; });
}

void tq_result_free(tq_result* r) { delete r; }

int tq_result_exit_code(const tq_result* r) { return r ? r->r.exit_code : threshq::kExitError; }

const char* tq_result_summary(const tq_result* r) { return r ? r->r.summary.c_str() : ""; }

const char* tq_result_payload(const tq_result* r) { return r ? r->r.payload.c_str() : ""; }

const char* tq_result_written_path(const tq_result* r) { return r ? r->r.written_path.c_str() : ""; }

int tq_exit_status(tq_status status) {
  switch (status) {
    case TQ_OK: return threshq::kExitOk;
    case TQ_ERR_CONFIG:
    case TQ_ERR_INVALID_ARGUMENT: return threshq::kExitConfig;
    case TQ_ERR_LIMIT: return threshq::kExitLimit;
    default: return threshq::kExitError;
  }
}

}  // extern "C"
