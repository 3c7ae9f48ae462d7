#include "threshq/reports.hpp"

#include <charconv>
#include <sstream>

namespace threshq {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::json to_json(const Rational& r) {
  return {{"num", boost::multiprecision::numerator(r).str()}, {"den", boost::multiprecision::denominator(r).str()}};
}

nlohmann::json to_json(const QualityReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : r.per_theta)
    rows.push_back({{"theta", p.theta}, {"q", p.q}, {"ci_half_width", p.ci_half_width}, {"exact", p.exact}});
  return {
      {"estimator", r.estimator},
      {"n", r.n},
      {"delta", r.delta},
      {"per_theta", rows},
      {"worst_case", {{"q", r.worst_case.q}, {"theta_argmin", r.worst_case.theta},
                      {"ci_half_width", r.worst_case.ci_half_width}, {"exact", r.worst_case.exact}}},
      {"shift_invariant_claim", r.shift_invariant_claim},
      {"invariance_consistent", r.invariance_consistent},
      {"worst_case_is_upper_bound", r.worst_case_is_upper_bound},
  };
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j = {
      {"kind", to_string(r.kind)},
      {"n", r.n},
      {"delta", r.delta},
      {"available", r.available},
      {"method", r.method},
      {"s_equals_t_certified", r.s_equals_t_certified},
  };
  if (r.available) {
    j["value"] = r.value;
    j["ci_half_width"] = r.ci_half_width;
    j["witness"] = r.witness;
    if (r.witness_center) j["witness_center"] = *r.witness_center;
    if (!r.witness_atoms.empty()) j["witness_atoms"] = r.witness_atoms;
  }
  return j;
}

nlohmann::json to_json(const LemmaCheck& r) {
  return {{"k", r.k},           {"y_size", r.y_size},     {"yz_size", r.yz_size}, {"s_value", r.s_value},
          {"avg_quality", r.avg_quality}, {"bound", r.bound}, {"holds", r.holds}};
}

nlohmann::json to_json(const tree::BallQuality& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : r.per_theta) rows.push_back({{"theta", p.theta.str()}, {"q", to_json(p.q)}});
  return {{"quality", to_json(r.q)},
          {"argmin", r.argmin.str()},
          {"is_global_infimum", r.is_global_infimum},
          {"per_theta", rows}};
}

nlohmann::json to_json(const circle::AveragingResult& r) {
  auto grid = [](const std::vector<circle::GridQuality>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : rows) out.push_back({{"point", p.point}, {"q", p.q}, {"ci_half_width", p.ci_half_width}});
    return out;
  };
  return {
      {"q_e", r.q_e},
      {"q_e_ci", r.q_e_ci},
      {"theta_average", r.theta_average},
      {"best_gamma", r.best_gamma.value()},
      {"q_best", r.q_best},
      {"q_best_ci", r.q_best_ci},
      {"gamma_average", r.gamma_average},
      {"gamma_average_ci", r.gamma_average_ci},
      {"holds", r.holds},
      {"average_holds", r.average_holds},
      {"per_theta", grid(r.per_theta)},
      {"per_gamma", grid(r.per_gamma)},
  };
}

std::string to_csv(const QualityReport& r) {
  std::ostringstream out;
  out << "theta,q,ci,exact,is_worst\n";
  bool marked = false;
  for (const auto& p : r.per_theta) {
    const bool worst = !marked && p.theta == r.worst_case.theta && p.q == r.worst_case.q;
    marked = marked || worst;
    out << format_number(p.theta) << ',' << format_number(p.q) << ',' << format_number(p.ci_half_width) << ','
        << (p.exact ? 1 : 0) << ',' << (worst ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string to_csv(const std::vector<BoundReport>& rows) {
  std::ostringstream out;
  out << "kind,n,delta,value,ci,available,certified,method,witness\n";
  for (const auto& r : rows) {
    out << to_string(r.kind) << ',' << r.n << ',' << format_number(r.delta) << ','
        << (r.available ? format_number(r.value) : std::string()) << ',' << format_number(r.ci_half_width) << ','
        << (r.available ? 1 : 0) << ',' << (r.s_equals_t_certified ? 1 : 0) << ',' << csv_field(r.method) << ','
        << csv_field(r.witness) << '\n';
  }
  return out.str();
}

std::string to_csv(const std::vector<LemmaCheck>& rows) {
  std::ostringstream out;
  out << "k,y_size,yz_size,s_value,avg_quality,bound,holds\n";
  for (const auto& r : rows)
    out << r.k << ',' << r.y_size << ',' << r.yz_size << ',' << format_number(r.s_value) << ','
        << format_number(r.avg_quality) << ',' << format_number(r.bound) << ',' << (r.holds ? 1 : 0) << '\n';
  return out.str();
}

std::string to_csv(const tree::BallQuality& r) {
  std::ostringstream out;
  out << "theta,q,num,den\n";
  for (const auto& p : r.per_theta)
    out << p.theta.str() << ',' << to_string(p.q) << ',' << boost::multiprecision::numerator(p.q).str() << ','
        << boost::multiprecision::denominator(p.q).str() << '\n';
  return out.str();
}

std::string to_csv(const circle::AveragingResult& r) {
  std::ostringstream out;
  out << "gamma,q,ci\n";
  for (const auto& p : r.per_gamma)
    out << format_number(p.point) << ',' << format_number(p.q) << ',' << format_number(p.ci_half_width) << '\n';
  return out.str();
}

}  // namespace threshq
